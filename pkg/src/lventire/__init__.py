"""Traveling fronts, coupled super/sub-solutions and entire solutions of a diffusive
two-species Lotka-Volterra competition system.

Modules
-------
model      parameters, regimes, equilibria, reaction terms
spectral   eigenvalues at the two equilibria and tail templates
front      traveling-front boundary value solver and tail analysis
odefree    diffusion-free orbit and its logistic envelopes
supersub   super/sub-solution families and their lattice check
pde        finite-difference simulation and entire-solution checks
cli        command-line front end
"""

from .errors import LVError
from .model import ModelParams, classify_regime, coexistence, equilibria

__version__ = "0.1.0"

__all__ = ["LVError", "ModelParams", "classify_regime", "coexistence", "equilibria", "__version__"]
