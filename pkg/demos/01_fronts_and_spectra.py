"""
Traveling fronts and their tails
================================

A walk through the spectral side of the package: the competition regime, the
eigenvalues at both equilibria, one traveling front and a check that its tails decay
at the predicted rates.
"""

import numpy as np

from lventire.front import fit_tail_rate, off_collocation_residual, solve_system_front
from lventire.model import ModelParams, classify_regime, coexistence
from lventire.spectral import WaveParams, c_min, classify_minus_infinity, coexistence_eigenvalues, format_report

# Weak competition: both species survive and coexist at (u*, v*).
model = ModelParams(k1=0.5, k2=0.5, r=1.0, d=1.0)
print("regime:", classify_regime(model).description)
print("coexistence state:", coexistence(model))

# Fronts exist for every speed at or above the minimal one.
print("minimal speed:", c_min(model))
wave = WaveParams(model, c=2.2)

# Near (u*, v*) the linearization has two decaying and two growing modes.
spec = coexistence_eigenvalues(wave)
print("coexistence eigenvalues:", np.round(spec.roots, 6))

# Near the origin the eigenvalues come in two pairs; their coincidences decide the tail shape.
print(format_report(classify_minus_infinity(wave)))

# Solve the front and look at how well it satisfies the equations between grid points.
front = solve_system_front(wave)
print("off-grid residual:", off_collocation_residual(front))

# Fitted tail rates against the linear prediction.
for side in ("PlusInfinity", "MinusInfinity"):
    fit = fit_tail_rate(front, side)
    print(f"{side}: fitted {fit.fitted_rate:.5f}, predicted {fit.predicted_rate:.5f}")

# At c = 2 with r = d = 1 all four origin eigenvalues coincide and a polynomial factor appears.
quad = fit_tail_rate(solve_system_front(WaveParams(model, 2.0)), "MinusInfinity")
print("c = 2: secular term detected:", quad.secular_detected, "rate", round(quad.fitted_rate, 4))
