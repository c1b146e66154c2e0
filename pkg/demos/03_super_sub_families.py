"""
Super- and sub-solutions
========================

Fronts moving in from both sides, combined with the homogeneous orbit, give ordered
pairs of functions that sandwich a solution. Their differential inequalities are checked
here on a space-time lattice.
"""

from lventire.front import solve_scalar_front, solve_system_front
from lventire.model import ModelParams
from lventire.odefree import monotone_orbit_theta, solve_diffusion_free
from lventire.spectral import WaveParams
from lventire.supersub import FRONT_SELECTORS, Lattice, build_front_family, build_scalar_family, verify_inequalities

model = ModelParams(0.5, 0.5, 1.0, 1.0)
front = solve_system_front(WaveParams(model, 2.2))
orbit = solve_diffusion_free(model, *monotone_orbit_theta(model, 0.5))
lattice = Lattice(nx=101, nt=101)

# The selector switches the right-moving front, the left-moving front and the orbit on or off.
for sel in FRONT_SELECTORS:
    cert = verify_inequalities(build_front_family(front, orbit, sel), lattice)
    print(sel, "passed" if cert.passed else "FAILED", f"ridge fraction {cert.ridge_fraction:.4f}")

# A second family built from two single-equation fronts.
pair = build_scalar_family(solve_scalar_front(model, "U_eq", 2.0), solve_scalar_front(model, "V_eq", 2.0))
print("scalar family:", verify_inequalities(pair, lattice).passed)
