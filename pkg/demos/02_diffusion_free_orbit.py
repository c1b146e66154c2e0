"""
The spatially homogeneous orbit
===============================

Without diffusion the system reduces to two ODEs. One orbit leaves the origin and
ends at the coexistence state; explicit logistic curves bracket it.
"""

from lventire.model import ModelParams
from lventire.odefree import certify_logistic_envelope, monotone_orbit_theta, solve_diffusion_free

model = ModelParams(0.5, 0.5, 1.0, 1.0)

# Pick the orbit that reaches half the coexistence value at t = 0 and grows monotonically.
theta1, theta2 = monotone_orbit_theta(model, 0.5)
orbit = solve_diffusion_free(model, theta1, theta2)
print("shape constants:", orbit.beta_hat1, orbit.beta_hat2)

for t in (-20.0, -5.0, 0.0, 5.0, 20.0):
    p, q = orbit.evaluate(t)
    print(f"t={t:6.1f}  p={p:.6e}  q={q:.6e}")

# Positive margins mean the logistic bounds hold on that side of t = 0.
report = certify_logistic_envelope(orbit)
print("forward margins:", report.forward_margin_p, report.forward_margin_q)
print("backward margins:", report.backward_margin_p, report.backward_margin_q)
print("passed:", report.passed)
