"""Parameters, equilibria and reaction terms of the competitive Lotka-Volterra system.

The system is::

    u_t = u_xx + u (1 - u - k1 v)
    v_t = d v_xx + r v (1 - v - k2 u)

with all four constants strictly positive.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AssumptionViolated, DegenerateRegime

__all__ = [
    "ModelParams",
    "Regime",
    "RegimeCase",
    "EquilibriumKind",
    "Equilibrium",
    "AssumptionReport",
    "classify_regime",
    "equilibria",
    "coexistence",
    "reaction",
    "residual_operators",
    "check_structural_assumptions",
]

IDENTITY_RTOL = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """The four positive constants of the system.

    Parameters
    ----------
    k1, k2 : float
        Competition coefficients.
    r : float
        Growth-rate ratio of the second species.
    d : float
        Diffusion ratio of the second species.
    """

    k1: float
    k2: float
    r: float
    d: float

    def __post_init__(self):
        for name in ("k1", "k2", "r", "d"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating)) and math.isfinite(value)):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def weak_competition(self) -> bool:
        return 0 < self.k1 < 1 and 0 < self.k2 < 1

    @property
    def u_star(self) -> float:
        return coexistence(self)[0]

    @property
    def v_star(self) -> float:
        return coexistence(self)[1]

    def to_dict(self) -> dict:
        return {"k1": self.k1, "k2": self.k2, "r": self.r, "d": self.d}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        missing = {"k1", "k2", "r", "d"} - set(data)
        if missing:
            raise ValueError(f"model object is missing keys: {sorted(missing)}")
        return cls(k1=data["k1"], k2=data["k2"], r=data["r"], d=data["d"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


class Regime(enum.Enum):
    CASE_I = "Case_i"
    CASE_II = "Case_ii"
    CASE_III = "Case_iii"
    CASE_IV_WEAK = "Case_iv_weak"


_REGIME_TEXT = {
    Regime.CASE_I: "0 < k1 < 1 < k2: u survives, kinetics tend to (1, 0)",
    Regime.CASE_II: "0 < k2 < 1 < k1: v survives, kinetics tend to (0, 1)",
    Regime.CASE_III: "k1, k2 > 1: strong competition, bistable between (1, 0) and (0, 1)",
    Regime.CASE_IV_WEAK: "0 < k1, k2 < 1: weak competition, coexistence equilibrium attracts",
}


@dataclass(frozen=True)
class RegimeCase:
    tag: Regime
    description: str


class EquilibriumKind(enum.Enum):
    ORIGIN = "Origin"
    U_ONLY = "UOnly"
    V_ONLY = "VOnly"
    COEXISTENCE = "Coexistence"


@dataclass(frozen=True)
class Equilibrium:
    u: float
    v: float
    kind: EquilibriumKind
    # False when the coexistence point leaves the closed unit box (strong competition).
    in_unit_box: bool = True


def classify_regime(params: ModelParams) -> RegimeCase:
    """Return the kinetic regime of ``params``; depends only on (k1, k2)."""
    k1, k2 = params.k1, params.k2
    if k1 == 1.0 or k2 == 1.0:
        raise DegenerateRegime(f"boundary regime k1={k1}, k2={k2} is not classified")
    if k1 < 1 < k2:
        tag = Regime.CASE_I
    elif k2 < 1 < k1:
        tag = Regime.CASE_II
    elif k1 > 1 and k2 > 1:
        tag = Regime.CASE_III
    else:
        tag = Regime.CASE_IV_WEAK
    return RegimeCase(tag, _REGIME_TEXT[tag])


def coexistence(params: ModelParams) -> tuple[float, float]:
    denom = 1.0 - params.k1 * params.k2
    if denom == 0.0:
        raise DegenerateRegime("k1*k2 = 1: coexistence point is undefined")
    return (1.0 - params.k1) / denom, (1.0 - params.k2) / denom


def equilibria(params: ModelParams) -> list[Equilibrium]:
    """All four constant steady states, origin first and coexistence last."""
    us, vs = coexistence(params)
    inside = 0.0 <= us <= 1.0 and 0.0 <= vs <= 1.0
    return [
        Equilibrium(0.0, 0.0, EquilibriumKind.ORIGIN),
        Equilibrium(1.0, 0.0, EquilibriumKind.U_ONLY),
        Equilibrium(0.0, 1.0, EquilibriumKind.V_ONLY),
        Equilibrium(us, vs, EquilibriumKind.COEXISTENCE, in_unit_box=inside),
    ]


def reaction(params: ModelParams, u, v):
    """Reaction terms ``(u (1 - u - k1 v), r v (1 - v - k2 u))``; broadcasts over arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    f = u * (1.0 - u - params.k1 * v)
    g = params.r * v * (1.0 - v - params.k2 * u)
    if f.ndim == 0:
        return float(f), float(g)
    return f, g


def residual_operators(params: ModelParams, u, v, u_t, u_xx, v_t, v_xx):
    """Pointwise residuals of the two equations.

    Returns ``(u_t - u_xx - f(u, v), v_t - d v_xx - g(u, v))``. A solution gives zero in
    both components; super-solutions give non-negative values, sub-solutions non-positive.
    """
    f, g = reaction(params, u, v)
    res_u = np.asarray(u_t, dtype=float) - np.asarray(u_xx, dtype=float) - f
    res_v = np.asarray(v_t, dtype=float) - params.d * np.asarray(v_xx, dtype=float) - g
    if res_u.ndim == 0:
        return float(res_u), float(res_v)
    return res_u, res_v


@dataclass
class AssumptionReport:
    """Outcome of the lattice check of the structural hypotheses on the kinetics.

    ``violations`` holds ``(label, u, v)`` triples; empty means every check passed.
    """

    samples: int
    zero_residual: tuple[float, float]
    f_origin: float
    g_origin: float
    linearization: np.ndarray
    linearization_eigenvalues: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_structural_assumptions(params: ModelParams, samples: int = 50, raise_on_failure: bool = True) -> AssumptionReport:
    """Check the hypotheses under which monotone fronts to the coexistence state exist.

    Writing the kinetics as ``u f(u, v)`` and ``v g(u, v)`` with per-capita rates
    ``f = 1 - u - k1 v`` and ``g = r (1 - v - k2 u)``, this verifies on a
    ``samples x samples`` lattice of the open box ``(0, u*) x (0, v*)``:

    (a) f and g vanish at the coexistence point;
    (b) 0 < f < f(0, 0) and 0 < g < g(0, 0);
    (c) f_u < 0, f_v <= 0, g_u <= 0, g_v < 0;
    (d) the matrix ``[[u* f_u, u* f_v], [v* g_u, v* g_v]]`` at the coexistence point
        has two real negative eigenvalues.
    """
    if not params.weak_competition:
        raise DegenerateRegime("structural assumptions are only checked under weak competition")
    if samples < 1:
        raise ValueError("samples must be positive")
    k1, k2, r = params.k1, params.k2, params.r
    us, vs = coexistence(params)

    def f(u, v):
        return 1.0 - u - k1 * v

    def g(u, v):
        return r * (1.0 - v - k2 * u)

    violations = []
    f0, g0 = f(0.0, 0.0), g(0.0, 0.0)
    fa, ga = f(us, vs), g(us, vs)
    if abs(fa) > 1e-14 or abs(ga) > 1e-14 * max(1.0, r):
        violations.append(("(a) coexistence is not a zero", us, vs))

    s = (np.arange(samples) + 0.5) / samples
    U, V = np.meshgrid(us * s, vs * s, indexing="ij")
    F, G = f(U, V), g(U, V)
    for label, bad in (
        ("(b) f <= 0", F <= 0),
        ("(b) f >= f(0,0)", F >= f0),
        ("(b) g <= 0", G <= 0),
        ("(b) g >= g(0,0)", G >= g0),
    ):
        for i, j in zip(*np.nonzero(bad)):
            violations.append((label, float(U[i, j]), float(V[i, j])))

    # Partial derivatives of the linear per-capita rates are constant in the box.
    fu, fv, gu, gv = -1.0, -k1, -r * k2, -r
    for label, ok in (("(c) f_u < 0", fu < 0), ("(c) f_v <= 0", fv <= 0), ("(c) g_u <= 0", gu <= 0), ("(c) g_v < 0", gv < 0)):
        if not ok:
            violations.append((label, us, vs))

    mat = np.array([[us * fu, us * fv], [vs * gu, vs * gv]])
    eig = np.linalg.eigvals(mat)
    if np.any(np.abs(eig.imag) > 0) or np.any(eig.real >= 0):
        violations.append(("(d) eigenvalues not real and negative", us, vs))

    report = AssumptionReport(
        samples=samples,
        zero_residual=(fa, ga),
        f_origin=f0,
        g_origin=g0,
        linearization=mat,
        linearization_eigenvalues=np.sort(eig.real),
        violations=violations,
    )
    if violations and raise_on_failure:
        label, u, v = violations[0]
        raise AssumptionViolated(f"{label} at (u, v) = ({u:.6g}, {v:.6g})", point=(u, v))
    return report
