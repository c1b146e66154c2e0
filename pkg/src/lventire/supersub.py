"""Coupled super- and sub-solution pairs and a lattice check of their inequalities.

A pair ``(u_hi, v_lo)``, ``(u_lo, v_hi)`` must satisfy, with
``F3(u, v) = u_t - u_xx - u (1 - u - k1 v)`` and ``F4(u, v) = v_t - d v_xx - r v (1 - v - k2 u)``::

    F3(u_hi, v_lo) >= 0,   F4(u_hi, v_lo) <= 0,
    F3(u_lo, v_hi) <= 0,   F4(u_lo, v_hi) >= 0.

Two families are built here.

Front family, selector ``(i, j, m)``
    ``u_hi = 1``, ``v_lo = 0``, ``u_lo`` the largest and ``v_hi`` the smallest of the
    active branches among the front ``(phi, psi)(x + c t)``, its mirror image
    ``(phi, psi)(-x + c t)`` and the diffusion-free orbit ``(p, q)(t)``.
Scalar family
    ``u_hi = v_hi = 1`` and ``u_lo``, ``v_lo`` the larger of a single-species front and
    its mirror image.

Since ``max`` and ``min`` are not differentiable where two branches tie, the check is
made where one branch is active by a clear margin and tie points are counted separately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainExceeded, InequalityViolated, SelectorAllZero, SubminimalSpeed
from .front import FrontKind, FrontProfile, off_collocation_residual, scalar_min_speed
from .model import ModelParams
from .odefree import DiffusionFreeOrbit

__all__ = [
    "SuperSubPair",
    "Lattice",
    "InequalityCertificate",
    "FRONT_SELECTORS",
    "build_front_family",
    "build_scalar_family",
    "verify_inequalities",
    "parse_selector",
]

FRONT_SELECTORS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)]
EXTRAPOLATION_TOL = 1e-6
RIDGE_MARGIN = 1e-8


def parse_selector(text) -> tuple[int, int, int]:
    """``"110"`` or ``(1, 1, 0)`` to a validated selector tuple."""
    sel = tuple(int(ch) for ch in text) if isinstance(text, str) else tuple(int(v) for v in text)
    if len(sel) != 3 or any(v not in (0, 1) for v in sel):
        raise ValueError(f"selector must be three 0/1 flags, got {text!r}")
    if sum(sel) == 0:
        raise SelectorAllZero("selector flags may not all be zero")
    return sel


@dataclass(frozen=True)
class Branch:
    """One smooth piece of a max/min: a front read along ``sign * x + speed * t`` or an orbit."""

    source: object
    component: str
    sign: float = 1.0
    speed: float = 0.0
    is_orbit: bool = False

    def coordinate(self, x, t):
        return self.sign * x + self.speed * t

    def value(self, x, t):
        if self.is_orbit:
            p, q = self.source.evaluate(t)
            return p if self.component == "phi" else q
        return self.source.evaluate(self.coordinate(x, t), self.component)

    def check_domain(self, x, t, tol):
        if self.is_orbit:
            return
        z = self.coordinate(x, t)
        lo, hi = self.source.extrapolation_uncertainty(self.component)
        if (np.min(z) < self.source.xi[0] and lo > tol) or (np.max(z) > self.source.xi[-1] and hi > tol):
            raise DomainExceeded(
                f"extrapolating {self.component} to [{np.min(z):.3g}, {np.max(z):.3g}] "
                f"carries uncertainty above {tol:g}"
            )


@dataclass(frozen=True)
class SuperSubPair:
    """Evaluators for the four bounding functions of one family member.

    ``translations``, ``T0`` and ``T1`` mirror the optional translation bounds of the
    comparison definition; they have no constructive instance for these families and
    stay unset (``T0 = inf``).
    """

    family: str
    model: ModelParams
    u_lower_branches: tuple
    v_upper_branches: tuple
    v_lower_branches: tuple = ()
    selector: tuple | None = None
    speeds: tuple = ()
    residual_norm: float = 0.0
    sources: dict = field(default_factory=dict)
    translations: dict | None = None
    T0: float = float("inf")
    T1: float | None = None

    @staticmethod
    def _grid(x, t):
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        return x, t

    def branch_values(self, branches, x, t):
        x, t = self._grid(x, t)
        return np.stack([np.broadcast_to(b.value(x, t), x.shape) for b in branches])

    def u_lower(self, x, t):
        return self.branch_values(self.u_lower_branches, x, t).max(axis=0)

    def v_upper(self, x, t):
        if not self.v_upper_branches:
            return np.ones(np.broadcast(np.asarray(x), np.asarray(t)).shape)
        return self.branch_values(self.v_upper_branches, x, t).min(axis=0)

    def u_upper(self, x, t):
        return np.ones(np.broadcast(np.asarray(x), np.asarray(t)).shape)

    def v_lower(self, x, t):
        if not self.v_lower_branches:
            return np.zeros(np.broadcast(np.asarray(x), np.asarray(t)).shape)
        return self.branch_values(self.v_lower_branches, x, t).max(axis=0)

    def check_domain(self, x, t, tol: float = EXTRAPOLATION_TOL):
        for b in self.u_lower_branches + self.v_upper_branches + self.v_lower_branches:
            b.check_domain(np.asarray(x, dtype=float), np.asarray(t, dtype=float), tol)


def build_front_family(front: FrontProfile, orbit: DiffusionFreeOrbit, selector=(1, 1, 0)) -> SuperSubPair:
    """Front-family pair for selector ``(i, j, m)``.

    Parameters
    ----------
    front : FrontProfile
        Unreflected system front with speed ``c``.
    orbit : DiffusionFreeOrbit
        Diffusion-free orbit of the same model (only used when ``m = 1``).
    selector : tuple or str
        Which of the three branches are active.
    """
    sel = parse_selector(selector)
    if front.kind is not FrontKind.SYSTEM or front.reflected:
        raise ValueError("the front family needs an unreflected system front")
    if orbit is not None and orbit.model != front.model:
        raise ValueError("front and orbit belong to different models")
    if sel[2] and orbit is None:
        raise ValueError("selector uses the orbit branch but no orbit was given")
    c = front.c
    u_br, v_br = [], []
    if sel[0]:
        u_br.append(Branch(front, "phi", 1.0, c))
        v_br.append(Branch(front, "psi", 1.0, c))
    if sel[1]:
        u_br.append(Branch(front, "phi", -1.0, c))
        v_br.append(Branch(front, "psi", -1.0, c))
    if sel[2]:
        u_br.append(Branch(orbit, "phi", is_orbit=True))
        v_br.append(Branch(orbit, "psi", is_orbit=True))
    return SuperSubPair(
        family="FrontFamily",
        model=front.model,
        u_lower_branches=tuple(u_br),
        v_upper_branches=tuple(v_br),
        selector=sel,
        speeds=(c,),
        residual_norm=front.residual_norm,
        sources={"front": front, "orbit": orbit},
    )


def build_scalar_family(front_u: FrontProfile, front_v: FrontProfile) -> SuperSubPair:
    """Scalar-family pair from the single-species fronts of each equation."""
    if front_u.kind is not FrontKind.SCALAR_U or front_v.kind is not FrontKind.SCALAR_V:
        raise ValueError("need a ScalarU front and a ScalarV front")
    if front_u.model != front_v.model:
        raise ValueError("fronts belong to different models")
    m = front_u.model
    for which, fr in (("U_eq", front_u), ("V_eq", front_v)):
        stated, actual = scalar_min_speed(m, which)
        if fr.c < max(stated, actual) - 1e-12:
            raise SubminimalSpeed(f"{which} front speed {fr.c} below {max(stated, actual)}")
    s1, s2 = front_u.c, front_v.c
    return SuperSubPair(
        family="ScalarKPPFamily",
        model=m,
        u_lower_branches=(Branch(front_u, "phi", 1.0, s1), Branch(front_u, "phi", -1.0, s1)),
        v_upper_branches=(),
        v_lower_branches=(Branch(front_v, "psi", 1.0, s2), Branch(front_v, "psi", -1.0, s2)),
        speeds=(s1, s2),
        residual_norm=max(front_u.residual_norm, front_v.residual_norm),
        sources={"front_u": front_u, "front_v": front_v},
    )


@dataclass(frozen=True)
class Lattice:
    x_range: tuple = (-40.0, 40.0)
    t_range: tuple = (-10.0, 10.0)
    nx: int = 201
    nt: int = 201

    def mesh(self):
        x = np.linspace(*self.x_range, self.nx)
        t = np.linspace(*self.t_range, self.nt)
        return np.meshgrid(x, t, indexing="ij")


@dataclass
class InequalityCertificate:
    """Signed worst residuals of the four inequalities over a lattice.

    Super residuals should be ``>= -slack``; sub residuals ``<= slack``.
    """

    family: str
    selector: tuple | None
    lattice: Lattice
    slack: float
    worst_super_u: float
    worst_super_v: float
    worst_sub_u: float
    worst_sub_v: float
    worst_points: dict
    ridge_points_skipped: int
    total_points: int
    ordering_ok: bool
    mode: str
    passed: bool

    @property
    def ridge_fraction(self) -> float:
        return self.ridge_points_skipped / self.total_points

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["lattice"] = dict(self.lattice.__dict__)
        d["ridge_fraction"] = self.ridge_fraction
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=float)


def _active(values, margin, largest: bool):
    """Index of the extreme branch and a mask of points where it is not clear by ``margin``."""
    if values.shape[0] == 1:
        return np.zeros(values.shape[1:], dtype=int), np.zeros(values.shape[1:], dtype=bool)
    order = np.argsort(values, axis=0)
    if largest:
        first, second = order[-1], order[-2]
    else:
        first, second = order[0], order[1]
    a = np.take_along_axis(values, first[None], 0)[0]
    b = np.take_along_axis(values, second[None], 0)[0]
    ridge = np.abs(a - b) <= margin * np.maximum(np.abs(a), np.abs(b))
    return first, ridge


def _branch_terms(branch: Branch, x, t, d_coef):
    """``w_t - D w_xx`` of one branch, from the profile derivatives (direct mode)."""
    if branch.is_orbit:
        dp, dq = branch.source.derivative(t)
        return dp if branch.component == "phi" else dq
    z = branch.coordinate(x, t)
    w1 = branch.source.evaluate(z, branch.component, 1)
    w2 = branch.source.evaluate(z, branch.component, 2)
    return branch.speed * w1 - d_coef * w2


def verify_inequalities(
    pair: SuperSubPair,
    lattice: Lattice = Lattice(),
    ridge_margin: float = RIDGE_MARGIN,
    slack: float | None = None,
    mode: str = "substitution",
    raise_on_failure: bool = True,
) -> InequalityCertificate:
    """Evaluate the four residuals on a lattice and check their signs.

    Parameters
    ----------
    pair : SuperSubPair
    lattice : Lattice
    ridge_margin : float
        Relative gap below which two branches count as tied; tied points are skipped.
    slack : float, optional
        Sign tolerance. Defaults to ten times the collocation residual of the fronts in
        substitution mode, and ten times their off-grid residual in direct mode (where
        the interpolation error enters).
    mode : {"substitution", "direct"}
        ``substitution`` replaces second derivatives of a branch by its own ODE, leaving
        only coupling terms; ``direct`` differentiates the interpolated profiles.
    raise_on_failure : bool
        Raise :class:`InequalityViolated` instead of returning a failed certificate.
    """
    if mode not in ("substitution", "direct"):
        raise ValueError("mode must be 'substitution' or 'direct'")
    m = pair.model
    k1, k2, r, d = m.k1, m.k2, m.r, m.d
    if slack is None:
        if mode == "substitution":
            slack = 10.0 * pair.residual_norm
        else:
            fronts = [f for f in pair.sources.values() if isinstance(f, FrontProfile)]
            slack = 10.0 * max(off_collocation_residual(f) for f in fronts)
    X, T = lattice.mesh()
    pair.check_domain(X, T)

    u_hi = pair.u_upper(X, T)
    v_lo = pair.v_lower(X, T)
    u_vals = pair.branch_values(pair.u_lower_branches, X, T)
    u_idx, u_ridge = _active(u_vals, ridge_margin, largest=True)
    u_lo = np.take_along_axis(u_vals, u_idx[None], 0)[0]
    if pair.v_upper_branches:
        v_vals = pair.branch_values(pair.v_upper_branches, X, T)
        v_idx, v_ridge = _active(v_vals, ridge_margin, largest=False)
        v_hi = np.take_along_axis(v_vals, v_idx[None], 0)[0]
    else:
        v_vals = None
        v_ridge = np.zeros(X.shape, dtype=bool)
        v_hi = np.ones(X.shape)
    if pair.v_lower_branches:
        vl_vals = pair.branch_values(pair.v_lower_branches, X, T)
        vl_idx, vl_ridge = _active(vl_vals, ridge_margin, largest=True)
    else:
        vl_ridge = np.zeros(X.shape, dtype=bool)

    # u_hi = 1 in both families, so F3(u_hi, v_lo) = k1 v_lo.
    super_u = k1 * v_lo
    super_v = np.zeros(X.shape)
    sub_u = np.zeros(X.shape)
    sub_v = np.zeros(X.shape)

    for bi, br in enumerate(pair.u_lower_branches):
        sel = u_idx == bi
        if not np.any(sel):
            continue
        x, t = X[sel], T[sel]
        w = u_vals[bi][sel]
        if mode == "substitution":
            # The branch solves w_t - w_xx = w (1 - w - k1 * partner), partner = own v-branch.
            partner = _partner_value(pair, br, x, t)
            sub_u[sel] = k1 * w * (v_hi[sel] - partner)
        else:
            sub_u[sel] = _branch_terms(br, x, t, 1.0) - w * (1 - w - k1 * v_hi[sel])

    if v_vals is not None:
        for bi, br in enumerate(pair.v_upper_branches):
            sel = v_idx == bi
            if not np.any(sel):
                continue
            x, t = X[sel], T[sel]
            w = v_vals[bi][sel]
            if mode == "substitution":
                partner = _partner_value(pair, br, x, t)
                super_v[sel] = r * k2 * w * (u_lo[sel] - partner)
            else:
                super_v[sel] = _branch_terms(br, x, t, d) - r * w * (1 - w - k2 * u_lo[sel])
    else:
        # v_hi = 1: F4(u_lo, 1) = r k2 u_lo.
        super_v = r * k2 * u_lo

    if pair.v_lower_branches:
        for bi, br in enumerate(pair.v_lower_branches):
            sel = vl_idx == bi
            if not np.any(sel):
                continue
            x, t = X[sel], T[sel]
            w = vl_vals[bi][sel]
            if mode == "substitution":
                partner = _partner_value(pair, br, x, t)
                sub_v[sel] = r * k2 * w * (u_hi[sel] - partner)
            else:
                sub_v[sel] = _branch_terms(br, x, t, d) - r * w * (1 - w - k2 * u_hi[sel])

    ridge = u_ridge | v_ridge | vl_ridge
    keep = ~ridge
    ordering_ok = bool(np.all(u_vals.max(axis=0) <= u_hi) and np.all(v_lo <= v_hi))

    def worst(arr, pick):
        masked = np.where(keep, arr, np.nan)
        idx = np.nanargmin(masked) if pick == "min" else np.nanargmax(masked)
        i = np.unravel_index(idx, arr.shape)
        return float(arr[i]), (float(X[i]), float(T[i]))

    ws_u, p1 = worst(super_u, "min")
    ws_v, p2 = worst(super_v, "min")
    wb_u, p3 = worst(sub_u, "max")
    wb_v, p4 = worst(sub_v, "max")
    passed = ws_u >= -slack and ws_v >= -slack and wb_u <= slack and wb_v <= slack and ordering_ok
    cert = InequalityCertificate(
        family=pair.family,
        selector=pair.selector,
        lattice=lattice,
        slack=slack,
        worst_super_u=ws_u,
        worst_super_v=ws_v,
        worst_sub_u=wb_u,
        worst_sub_v=wb_v,
        worst_points={"super_u": p1, "super_v": p2, "sub_u": p3, "sub_v": p4},
        ridge_points_skipped=int(ridge.sum()),
        total_points=int(ridge.size),
        ordering_ok=ordering_ok,
        mode=mode,
        passed=bool(passed),
    )
    if not passed and raise_on_failure:
        raise InequalityViolated(
            f"inequalities fail: super_u {ws_u:.3e} at {p1}, super_v {ws_v:.3e} at {p2}, "
            f"sub_u {wb_u:.3e} at {p3}, sub_v {wb_v:.3e} at {p4}",
            certificate=cert,
        )
    return cert


def _partner_value(pair: SuperSubPair, branch: Branch, x, t):
    """Competitor density that the branch's own equation was solved with.

    For a system front or the orbit this is the other component on the same branch; a
    single-species front solves its equation with the competitor fixed at 1.
    """
    if not branch.is_orbit and branch.source.kind is not FrontKind.SYSTEM:
        return np.ones_like(np.asarray(x, dtype=float))
    other = "psi" if branch.component == "phi" else "phi"
    if branch.is_orbit:
        p, q = branch.source.evaluate(t)
        return q if other == "psi" else p
    return branch.source.evaluate(branch.coordinate(x, t), other)
