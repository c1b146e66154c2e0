"""Travelling-front profiles, tail fits and tail constants.

Fronts are computed by Newton iteration on a fourth-order finite-difference collocation
of the wave ODE over a truncated symmetric interval ``[-L, L]``. At the right end the
deviation from the limit state is forced onto the decaying eigendirection that a
monotone front must follow; at the left end nothing is imposed because every direction
of the origin linearization is unstable in ``xi``. A phase condition pins the midpoint
value at ``xi = 0``.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import make_interp_spline
from scipy.optimize import minimize_scalar

from .errors import (
    BoundViolated,
    DegenerateRegime,
    MonotonicityLost,
    NoConvergence,
    PoorFit,
    SubminimalSpeed,
    WindowTooNarrow,
)
from .model import ModelParams, coexistence
from .spectral import WaveParams, classify_minus_infinity, coexistence_eigenvalues

__all__ = [
    "FrontKind",
    "GridSpec",
    "FrontProfile",
    "TailFit",
    "TailConstants",
    "solve_system_front",
    "solve_scalar_front",
    "reflect",
    "fit_tail_rate",
    "estimate_tail_constants",
    "off_collocation_residual",
    "scalar_min_speed",
]

PAD = 1e-12


class FrontKind(enum.Enum):
    SYSTEM = "SystemFront"
    SCALAR_U = "ScalarU"
    SCALAR_V = "ScalarV"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``xi_i = h (i - m)`` on ``[-L, L]`` with ``N = 2 m + 1`` points.

    When ``auto_extend`` is set the half-length grows at fixed spacing until both
    boundary errors fall below ``boundary_tol`` or ``max_L`` is reached.
    """

    L: float = 60.0
    N: int = 2001
    boundary_tol: float = 1e-8
    auto_extend: bool = True
    max_L: float = 400.0
    newton_tol: float = 1e-11
    max_iter: int = 60

    def __post_init__(self):
        if self.N < 11 or self.N % 2 == 0:
            raise ValueError("N must be odd and at least 11")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def h(self) -> float:
        return self.L / ((self.N - 1) // 2)


def _fd_weights(offsets, order: int) -> np.ndarray:
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    A = np.vander(offsets, n, increasing=True).T
    b = np.zeros(n)
    b[order] = factorial(order)
    return np.linalg.solve(A, b)


def diff_matrices(N: int, h: float):
    """Fourth-order first and second derivative matrices on a uniform grid.

    Five-point central stencils inside, six-point one-sided stencils on the two
    outermost points at each end.
    """
    rows, cols, v1, v2 = [], [], [], []
    for i in range(N):
        if 2 <= i <= N - 3:
            idx = np.arange(i - 2, i + 3)
        elif i < 2:
            idx = np.arange(0, 6)
        else:
            idx = np.arange(N - 6, N)
        off = idx - i
        rows.extend([i] * idx.size)
        cols.extend(idx)
        v1.extend(_fd_weights(off, 1) / h)
        v2.extend(_fd_weights(off, 2) / h**2)
    D1 = sp.csr_matrix((v1, (rows, cols)), shape=(N, N))
    D2 = sp.csr_matrix((v2, (rows, cols)), shape=(N, N))
    return D1, D2


@dataclass(frozen=True)
class FrontProfile:
    """A computed monotone front on a grid.

    For scalar kinds only one of ``phi``/``psi`` is set. Arrays are read-only.
    """

    xi: np.ndarray
    phi: np.ndarray | None
    psi: np.ndarray | None
    dphi: np.ndarray | None
    dpsi: np.ndarray | None
    c: float
    kind: FrontKind
    residual_norm: float
    model: ModelParams
    # Limits at -inf and +inf for each stored component.
    limits: dict = field(default_factory=dict)
    boundary_errors: dict = field(default_factory=dict)
    reflected: bool = False
    newton_iterations: int = 0
    reproducible: bool | None = None

    def __post_init__(self):
        for name in ("xi", "phi", "psi", "dphi", "dpsi"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, dtype=float)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def components(self) -> tuple:
        return tuple(n for n in ("phi", "psi") if getattr(self, n) is not None)

    @property
    def profile(self) -> np.ndarray:
        """The single stored component of a scalar front (``phi`` for a system front)."""
        return self.phi if self.phi is not None else self.psi

    @property
    def h(self) -> float:
        return float(self.xi[1] - self.xi[0])

    @property
    def L(self) -> float:
        return float(self.xi[-1])

    def evaluate(self, z, component: str = "phi", derivative: int = 0):
        """Value or derivative (order 0, 1 or 2) at arbitrary points.

        Inside the grid this is a degree-7 interpolating spline of the stored values;
        outside it continues each tail as a single exponential matched in value and slope
        to the last grid point.
        """
        if derivative not in (0, 1, 2):
            raise ValueError("derivative must be 0, 1 or 2")
        f = getattr(self, component)
        df = getattr(self, "d" + component)
        if f is None:
            raise ValueError(f"front has no component {component!r}")
        z_in = np.asarray(z, dtype=float)
        z = np.atleast_1d(z_in)
        out = np.empty_like(z)
        xi = self.xi
        inside = (z >= xi[0]) & (z <= xi[-1])
        if np.any(inside):
            out[inside] = self._spline(component)(z[inside], nu=derivative)
        lo_lim, hi_lim = self.limits[component]
        for mask, fb, dfb, zb, lim, left in (
            (z < xi[0], f[0], df[0], xi[0], lo_lim, True),
            (z > xi[-1], f[-1], df[-1], xi[-1], hi_lim, False),
        ):
            if not np.any(mask):
                continue
            gap = fb - lim
            rate = dfb / gap if gap != 0 else 0.0
            # A tail must decay towards its limit away from the grid.
            if (left and rate <= 0) or (not left and rate >= 0):
                rate = 0.0
            out[mask] = (lim if derivative == 0 else 0.0) + gap * rate**derivative * np.exp(rate * (z[mask] - zb))
        return out.reshape(z_in.shape) if z_in.ndim else float(out[0])

    def extrapolation_uncertainty(self, component: str) -> tuple[float, float]:
        """Largest possible error of the tail continuation on each side.

        A monotone profile lies between its last grid value and its limit, so the gap at
        the grid edge bounds the error of any extrapolated value.
        """
        f = getattr(self, component)
        lo_lim, hi_lim = self.limits[component]
        return abs(f[0] - lo_lim), abs(f[-1] - hi_lim)

    def _spline(self, component):
        cache = self.__dict__.setdefault("_splines", {})
        if component not in cache:
            cache[component] = make_interp_spline(self.xi, getattr(self, component), k=7)
        return cache[component]

    def to_csv(self, path=None) -> str:
        """Write columns ``xi, phi, psi, dphi, dpsi`` with a commented header; returns the text."""
        buf = io.StringIO()
        buf.write(f"# c={self.c!r}\n# kind={self.kind.value}\n# residual_norm={self.residual_norm!r}\n")
        buf.write(f"# reflected={self.reflected}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi", "phi", "psi", "dphi", "dpsi"])
        n = self.xi.size
        cols = [self.xi] + [getattr(self, k) if getattr(self, k) is not None else [""] * n for k in ("phi", "psi", "dphi", "dpsi")]
        for row in zip(*cols):
            w.writerow(["" if isinstance(x, str) else repr(float(x)) for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @staticmethod
    def read_csv(path) -> dict:
        """Load the columns and header of a CSV written by :meth:`to_csv`."""
        meta, rows = {}, []
        with open(path) as fh:
            for line in fh:
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    meta[key] = value
                else:
                    rows.append(line.rstrip("\n"))
        reader = csv.DictReader(rows)
        data = {k: [] for k in reader.fieldnames}
        for rec in reader:
            for k, v in rec.items():
                data[k].append(float(v) if v != "" else np.nan)
        return {"meta": meta, **{k: np.array(v) for k, v in data.items()}}


def _first_order_matrix(jac_at_limit, diff, c):
    """Jacobian of ``(u_k, u_k')`` flow for ``diff_k u_k'' - c u_k' + R_k = 0``."""
    m = len(diff)
    jac_at_limit = np.asarray(jac_at_limit, dtype=float).reshape(m, m)
    A = np.zeros((2 * m, 2 * m))
    for k in range(m):
        A[2 * k, 2 * k + 1] = 1.0
        A[2 * k + 1, 2 * k + 1] = c / diff[k]
        for j in range(m):
            A[2 * k + 1, 2 * j] = -jac_at_limit[k][j] / diff[k]
    return A


def _right_conditions(A):
    """Rows annihilating every eigendirection except the most negative one."""
    ev, V = np.linalg.eig(A)
    if np.max(np.abs(ev.imag)) > 1e-9 * (1 + np.max(np.abs(ev))):
        raise DegenerateRegime("limit-state linearization has complex eigenvalues")
    order = np.argsort(ev.real)
    W = np.linalg.inv(V.real[:, order])
    return W[1:], float(ev.real[order[0]])


def _newton(xi, diff, c, react, jac, limits, guess, phase_value, grid: GridSpec):
    """Solve ``diff_k u_k'' - c u_k' + R_k(u) = 0`` with projected right-end conditions."""
    N = xi.size
    m = len(diff)
    h = xi[1] - xi[0]
    D1, D2 = diff_matrices(N, h)
    mid = (N - 1) // 2
    E = np.asarray(limits, dtype=float)
    Wc, _ = _right_conditions(_first_order_matrix(jac(E[:, None]), diff, c))
    Wc_sp = sp.csr_matrix(Wc)

    bc_select = sp.lil_matrix((2 * m, m * N))
    last = D1[N - 1].toarray().ravel()
    for k in range(m):
        bc_select[2 * k, k * N + N - 1] = 1.0
        bc_select[2 * k + 1, k * N : (k + 1) * N] = last
    bc_rows = (Wc_sp @ bc_select.tocsr()).tocsr()
    phase_row = sp.csr_matrix(([1.0], ([0], [mid])), shape=(1, m * N))
    ops = [diff[k] * D2 - c * D1 for k in range(m)]

    def residual(U):
        R = react(U)
        eqs = [(ops[k] @ U[k] + R[k])[1:-1] for k in range(m)]
        y = np.concatenate([[U[k][-1] - E[k], last @ U[k]] for k in range(m)])
        return np.concatenate(eqs + [Wc @ y, [U[0][mid] - phase_value]]), max(np.abs(e).max() for e in eqs)

    def jacobian(U):
        J = jac(U)
        blocks = []
        for k in range(m):
            row = [ops[k] + sp.diags(J[k][k]) if j == k else sp.diags(J[k][j]) for j in range(m)]
            blocks.append(sp.hstack(row).tocsr()[1:-1])
        return sp.vstack(blocks + [bc_rows, phase_row]).tocsc()

    U = [np.array(g, dtype=float) for g in guess]
    F, coll = residual(U)
    norm = np.abs(F).max()
    for it in range(1, grid.max_iter + 1):
        step = spla.spsolve(jacobian(U), -F)
        t = 1.0
        while True:
            trial = [U[k] + t * step[k * N : (k + 1) * N] for k in range(m)]
            F_t, coll_t = residual(trial)
            norm_t = np.abs(F_t).max()
            if norm_t < norm or t < 1e-4:
                break
            t *= 0.5
        U, F, norm, coll = trial, F_t, norm_t, coll_t
        if norm < grid.newton_tol or (t == 1.0 and np.abs(step).max() < 1e-14):
            return U, coll, it, D1
    raise NoConvergence(f"Newton failed after {grid.max_iter} iterations, residual {norm:.3e}", residual=norm)


def _logistic_guess(xi, limits, steepness):
    s = 1.0 / (1.0 + np.exp(-steepness * xi))
    return [lim * s for lim in limits]


def _check_monotone(U, dU, kind):
    for k, (u, du) in enumerate(zip(U, dU)):
        if np.any(np.diff(u) <= 0) or np.any(du <= 0):
            bad = int(np.argmin(np.minimum(np.append(np.diff(u), np.inf), du)))
            raise MonotonicityLost(f"{kind.value} component {k} is not strictly increasing near index {bad}")


def _solve_on_grids(diff, c, react, jac, limits, kind, grid, right_rate, left_rate, reproducibility_check):
    h = grid.h
    # Half-length needed for each tail to drop below the boundary tolerance, plus margin.
    scale = max(limits)
    need = max(math.log(scale / grid.boundary_tol) / abs(right_rate), math.log(scale / grid.boundary_tol) / left_rate)
    L = max(grid.L, 1.1 * need + 5.0) if grid.auto_extend else grid.L
    L = min(L, grid.max_L)
    last_error = None
    while True:
        m_half = int(round(L / h))
        xi = h * (np.arange(2 * m_half + 1) - m_half)
        result = None
        for steep in (1.0, 0.5, 2.0):
            try:
                U, coll, its, D1 = _newton(xi, diff, c, react, jac, limits, _logistic_guess(xi, limits, steep), limits[0] / 2, grid)
                dU = [D1 @ u for u in U]
                _check_monotone(U, dU, kind)
                result = (U, dU, coll, its)
                break
            except (NoConvergence, MonotonicityLost) as exc:
                last_error = exc
        if result is None:
            raise last_error
        U, dU, coll, its = result
        errs = {}
        for k, name in enumerate(("phi", "psi")[: len(U)]):
            errs[name] = (abs(U[k][0]), abs(U[k][-1] - limits[k]))
        worst = max(max(e) for e in errs.values())
        if worst < grid.boundary_tol or not grid.auto_extend or L >= grid.max_L:
            break
        L = min(grid.max_L, 1.5 * L)

    reproducible = None
    if reproducibility_check:
        alt, *_ = _newton(xi, diff, c, react, jac, limits, _logistic_guess(xi, limits, 0.3), limits[0] / 2, grid)
        reproducible = all(np.abs(a - u).max() < 1e-7 for a, u in zip(alt, U))
    return xi, U, dU, coll, its, errs, reproducible


def solve_system_front(wave: WaveParams, grid: GridSpec = GridSpec(), reproducibility_check: bool = False) -> FrontProfile:
    """Monotone front of the coupled system from ``(0, 0)`` to ``(u*, v*)`` at speed ``wave.c``.

    Parameters
    ----------
    wave : WaveParams
        Model constants (weak competition) and a speed ``c >= c_min``.
    grid : GridSpec
        Truncation and Newton settings.
    reproducibility_check : bool
        Re-solve from a flatter initial guess and record whether both agree.

    Returns
    -------
    FrontProfile
        With ``residual_norm`` the largest collocation residual and ``boundary_errors``
        the distances to the limits at both ends.
    """
    m = wave.model
    if not m.weak_competition:
        raise DegenerateRegime("system fronts require 0 < k1, k2 < 1")
    us, vs = coexistence(m)
    k1, k2, r, d, c = m.k1, m.k2, m.r, m.d, wave.c

    def react(U):
        u, v = U
        return [u * (1 - u - k1 * v), r * v * (1 - v - k2 * u)]

    def jac(U):
        u, v = U
        return [[1 - 2 * u - k1 * v, -k1 * u], [-r * k2 * v, r * (1 - 2 * v - k2 * u)]]

    right = coexistence_eigenvalues(wave).lambda2
    origin = classify_minus_infinity(wave).named
    left = min(origin["lambda4"], origin["lambda6"])
    xi, U, dU, coll, its, errs, rep = _solve_on_grids(
        [1.0, d], c, react, jac, [us, vs], FrontKind.SYSTEM, grid, right, left, reproducibility_check
    )
    return FrontProfile(
        xi=xi,
        phi=U[0],
        psi=U[1],
        dphi=dU[0],
        dpsi=dU[1],
        c=c,
        kind=FrontKind.SYSTEM,
        residual_norm=float(coll),
        model=m,
        limits={"phi": (0.0, us), "psi": (0.0, vs)},
        boundary_errors=errs,
        newton_iterations=its,
        reproducible=rep,
    )


def scalar_min_speed(model: ModelParams, which: str) -> tuple[float, float]:
    """Speed bounds ``(stated, actual)`` for the single-species fronts.

    ``stated`` is ``2 sqrt(1 - k1)`` or ``2 sqrt(r (1 - k2))``; ``actual`` accounts for the
    diffusion ratio in the second equation, ``2 sqrt(r d (1 - k2))``.
    """
    if which == "U_eq":
        s = 2.0 * math.sqrt(1.0 - model.k1)
        return s, s
    if which == "V_eq":
        return 2.0 * math.sqrt(model.r * (1.0 - model.k2)), 2.0 * math.sqrt(model.r * model.d * (1.0 - model.k2))
    raise ValueError("which must be 'U_eq' or 'V_eq'")


def solve_scalar_front(model: ModelParams, which: str, s: float, grid: GridSpec = GridSpec()) -> FrontProfile:
    """Monotone front of ``D w'' - s w' + a w (b - w) = 0`` from 0 to ``b``.

    ``which='U_eq'`` uses ``D = a = 1``, ``b = 1 - k1``; ``which='V_eq'`` uses ``D = d``,
    ``a = r``, ``b = 1 - k2``.
    """
    if not model.weak_competition:
        raise DegenerateRegime("scalar fronts require 0 < k1, k2 < 1")
    stated, actual = scalar_min_speed(model, which)
    if s < max(stated, actual) - 1e-12:
        raise SubminimalSpeed(f"s = {s} is below the minimal speed {max(stated, actual)}")
    if which == "U_eq":
        D, a, b, kind, comp = 1.0, 1.0, 1.0 - model.k1, FrontKind.SCALAR_U, "phi"
    else:
        D, a, b, kind, comp = model.d, model.r, 1.0 - model.k2, FrontKind.SCALAR_V, "psi"

    def react(U):
        return [a * U[0] * (b - U[0])]

    def jac(U):
        return [[a * (b - 2 * U[0])]]

    right = (s - math.sqrt(s * s + 4 * D * a * b)) / (2 * D)
    disc = max(s * s - 4 * D * a * b, 0.0)
    left = (s - math.sqrt(disc)) / (2 * D)
    xi, U, dU, coll, its, errs, _ = _solve_on_grids([D], s, react, jac, [b], kind, grid, right, left, False)
    errs = {comp: errs["phi"]}
    values = {"phi": None, "psi": None, "dphi": None, "dpsi": None, comp: U[0], "d" + comp: dU[0]}
    return FrontProfile(
        xi=xi,
        c=float(s),
        kind=kind,
        residual_norm=float(coll),
        model=model,
        limits={comp: (0.0, b)},
        boundary_errors=errs,
        newton_iterations=its,
        **values,
    )


def reflect(front: FrontProfile) -> FrontProfile:
    """Mirror image ``xi -> -xi``: values reversed, slopes negated, limits swapped."""
    flip = {}
    for name in ("phi", "psi"):
        f = getattr(front, name)
        flip[name] = None if f is None else f[::-1].copy()
        df = getattr(front, "d" + name)
        flip["d" + name] = None if df is None else -df[::-1]
    return FrontProfile(
        xi=-front.xi[::-1],
        c=front.c,
        kind=front.kind,
        residual_norm=front.residual_norm,
        model=front.model,
        limits={k: (v[1], v[0]) for k, v in front.limits.items()},
        boundary_errors={k: (v[1], v[0]) for k, v in front.boundary_errors.items()},
        reflected=not front.reflected,
        newton_iterations=front.newton_iterations,
        reproducible=front.reproducible,
        **flip,
    )


def off_collocation_residual(front: FrontProfile) -> float:
    """Largest ODE residual at grid midpoints, from a degree-7 spline of the stored values.

    The spline and its derivatives are independent of the finite-difference stencils used
    by the solver, so this checks the profile rather than the discrete equations.
    """
    m = front.model
    xi = front.xi
    mids = 0.5 * (xi[1:] + xi[:-1])
    sign = -1.0 if front.reflected else 1.0
    c = sign * front.c
    res = []
    if front.kind is FrontKind.SYSTEM:
        sp_phi = make_interp_spline(xi, front.phi, k=7)
        sp_psi = make_interp_spline(xi, front.psi, k=7)
        u, v = sp_phi(mids), sp_psi(mids)
        res.append(sp_phi(mids, 2) - c * sp_phi(mids, 1) + u * (1 - u - m.k1 * v))
        res.append(m.d * sp_psi(mids, 2) - c * sp_psi(mids, 1) + m.r * v * (1 - v - m.k2 * u))
    else:
        comp = front.components[0]
        spl = make_interp_spline(xi, front.profile, k=7)
        w = spl(mids)
        if front.kind is FrontKind.SCALAR_U:
            res.append(spl(mids, 2) - c * spl(mids, 1) + w * (1 - m.k1 - w))
        else:
            res.append(m.d * spl(mids, 2) - c * spl(mids, 1) + m.r * w * (1 - m.k2 - w))
        del comp
    return float(max(np.abs(r).max() for r in res))


@dataclass
class TailFit:
    """Log-linear fit of the distance to a limit inside a window.

    ``fitted_rate`` and ``predicted_rate`` refer to ``phi`` (the first component); the
    ``psi`` counterparts and the amplitude ratio are kept alongside.
    """

    side: str
    fitted_rate: float
    predicted_rate: float
    relative_error: float
    window: tuple
    secular_detected: bool
    r_squared: float
    psi_rate: float | None = None
    psi_predicted_rate: float | None = None
    psi_relative_error: float | None = None
    amplitude_ratio: float | None = None
    tau2: float | None = None
    amplitude_ratio_error: float | None = None
    candidates: dict = field(default_factory=dict)
    points: int = 0

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def _line_fit(x, y):
    A = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return coef[0], coef[1], r2, float(np.sqrt(np.mean(resid**2)))


def _secular_fit(x, y):
    """Fit ``y = a + lam x + log(x0 - x)`` with ``x0`` to the right of the window."""
    xmax = x.max()
    width = x.max() - x.min()

    def solve(s):
        x0 = xmax + math.exp(s)
        return _line_fit(x, y - np.log(x0 - x)), x0

    res = minimize_scalar(lambda s: solve(s)[0][3], bounds=(math.log(1e-3 * width), math.log(1e4 * width)), method="bounded")
    (a, lam, r2, rms), x0 = solve(res.x)
    return a, lam, r2, rms, x0


def _fit_component(xi, dist, scale, window, allow_secular):
    lo, hi = window
    sel = (dist > lo * scale) & (dist < hi * scale)
    if np.count_nonzero(sel) < 5:
        raise WindowTooNarrow(f"only {np.count_nonzero(sel)} grid points with distance in [{lo}, {hi}] x {scale:.3g}")
    x, y = xi[sel], np.log(dist[sel])
    a, lam, r2, rms = _line_fit(x, y)
    secular = False
    if allow_secular:
        a2, lam2, r2s, rms2, x0 = _secular_fit(x, y)
        width = x.max() - x.min()
        # A genuine xi * exp(lam xi) factor shows as a finite x0 near the window and a
        # much better fit; a pure exponential pushes x0 off to infinity instead.
        if rms2 < 0.1 * rms and rms > 1e-7 and x0 - x.max() < 20.0 * width:
            secular = True
            a, lam, r2 = a2, lam2, r2s
    return a, lam, r2, secular, int(sel.sum())


def fit_tail_rate(front: FrontProfile, side: str, window: tuple = (1e-6, 1e-3)) -> TailFit:
    """Fit the exponential decay of a system front towards one of its limits.

    Parameters
    ----------
    front : FrontProfile
        An unreflected system front.
    side : {"PlusInfinity", "MinusInfinity"}
    window : tuple
        Bounds on the distance to the limit, relative to the limit value.

    Notes
    -----
    On the ``+inf`` side both components decay at the more negative coexistence root
    ``lambda2``, with the ``psi`` amplitude equal to ``tau2`` times the ``phi`` amplitude. On the ``-inf`` side each component is matched against
    the nearer root of its own quadratic, and a secular ``xi exp(lam xi)`` refit is tried.
    """
    lo, hi = window
    if not (0 < lo < hi < 0.2):
        raise ValueError("window must satisfy 0 < lo < hi < 0.2")
    if front.kind is not FrontKind.SYSTEM or front.reflected:
        raise ValueError("tail fits apply to unreflected system fronts")
    wave = WaveParams(front.model, front.c)
    us, vs = coexistence(front.model)
    xi = front.xi
    if side == "PlusInfinity":
        spec = coexistence_eigenvalues(wave)
        a1, l1, r1, _, n1 = _fit_component(xi, us - front.phi, us, window, False)
        a2, l2, r2, _, _ = _fit_component(xi, vs - front.psi, vs, window, False)
        ratio = math.exp(a2 - a1)
        pred = spec.lambda2
        fit = TailFit(
            side=side,
            fitted_rate=l1,
            predicted_rate=pred,
            relative_error=abs(l1 - pred) / abs(pred),
            window=window,
            secular_detected=False,
            r_squared=min(r1, r2),
            psi_rate=l2,
            psi_predicted_rate=pred,
            psi_relative_error=abs(l2 - pred) / abs(pred),
            amplitude_ratio=ratio,
            tau2=spec.tau2,
            amplitude_ratio_error=abs(ratio - spec.tau2) / abs(spec.tau2),
            candidates={"lambda1": spec.lambda1, "lambda2": spec.lambda2},
            points=n1,
        )
    elif side == "MinusInfinity":
        named = classify_minus_infinity(wave).named
        _, l1, r1, s1, n1 = _fit_component(xi, front.phi, us, window, True)
        _, l2, r2, s2, _ = _fit_component(xi, front.psi, vs, window, True)
        p1 = min((named["lambda3"], named["lambda4"]), key=lambda v: abs(v - l1))
        p2 = min((named["lambda5"], named["lambda6"]), key=lambda v: abs(v - l2))
        fit = TailFit(
            side=side,
            fitted_rate=l1,
            predicted_rate=p1,
            relative_error=abs(l1 - p1) / abs(p1),
            window=window,
            secular_detected=bool(s1 or s2),
            r_squared=min(r1, r2),
            psi_rate=l2,
            psi_predicted_rate=p2,
            psi_relative_error=abs(l2 - p2) / abs(p2),
            candidates=named,
            points=n1,
        )
    else:
        raise ValueError("side must be 'PlusInfinity' or 'MinusInfinity'")
    if fit.r_squared < 0.999:
        raise PoorFit(f"tail fit R^2 = {fit.r_squared:.6f} below 0.999", r_squared=fit.r_squared)
    return fit


@dataclass(frozen=True)
class TailConstants:
    """Bounds on ratios and exponential envelopes of a front, left and right of ``xi = 0``.

    For ``xi <= 0``: ``M1_bar <= w / w' <= M1``, ``M2_bar e^{kappa xi} <= w <= M2 e^{kappa xi}``
    and ``w' <= M2 e^{kappa xi}`` for both components ``w``. For ``xi >= 0``:
    ``M3_bar <= w' / max(u* - phi, v* - psi) <= M3`` and ``w' <= M4 e^{lambda2 xi}``.
    """

    M1: float
    M1_bar: float
    M2: float
    M2_bar: float
    kappa: float
    M3: float
    M3_bar: float
    M4: float
    lambda2: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def certify(self, front: FrontProfile) -> dict:
        """Check all six inequality families on the grid; returns the count checked per family."""
        xi = front.xi
        us, vs = coexistence(front.model)
        left = xi <= 0
        right = xi >= 0
        counts = {}
        for w, dw in ((front.phi, front.dphi), (front.psi, front.dpsi)):
            xl, wl, dl = xi[left], w[left], dw[left]
            env = np.exp(self.kappa * xl)
            checks = {
                "ratio": (self.M1_bar <= wl / dl) & (wl / dl <= self.M1),
                "envelope": (self.M2_bar * env <= wl) & (wl <= self.M2 * env),
                "slope_envelope": dl <= self.M2 * env,
            }
            gap = np.maximum(us - front.phi[right], vs - front.psi[right])
            q = dw[right] / gap
            checks["gap_ratio"] = (self.M3_bar <= q) & (q <= self.M3)
            checks["slope_decay"] = dw[right] <= self.M4 * np.exp(self.lambda2 * xi[right])
            for name, ok in checks.items():
                if not np.all(ok):
                    pos = xl if name in ("ratio", "envelope", "slope_envelope") else xi[right]
                    bad = float(pos[np.argmin(ok)])
                    raise BoundViolated(f"{name} bound fails at xi = {bad:.6g}", xi=bad)
                counts[name] = counts.get(name, 0) + int(ok.size)
        return counts


def estimate_tail_constants(front: FrontProfile, kappa: float | None = None) -> TailConstants:
    """Smallest valid constants on the grid of a converged system front.

    ``kappa`` defaults to the smaller of the two ``-inf`` decay rates fitted from the
    front, so that both components share one envelope exponent.
    """
    if front.kind is not FrontKind.SYSTEM or front.reflected:
        raise ValueError("tail constants apply to unreflected system fronts")
    xi = front.xi
    for name in ("phi", "psi"):
        dw = getattr(front, "d" + name)
        if np.any(dw <= 0):
            bad = float(xi[np.argmin(dw)])
            raise BoundViolated(f"{name}' is not positive at xi = {bad:.6g}", xi=bad)
    if kappa is None:
        fit = fit_tail_rate(front, "MinusInfinity")
        kappa = min(fit.fitted_rate, fit.psi_rate)
    us, vs = coexistence(front.model)
    left, right = xi <= 0, xi >= 0
    env = np.exp(kappa * xi[left])
    gap = np.maximum(us - front.phi[right], vs - front.psi[right])
    if np.any(gap <= 0):
        bad = float(xi[right][np.argmin(gap)])
        raise BoundViolated(f"front reaches its limit at xi = {bad:.6g}", xi=bad)
    lam2 = coexistence_eigenvalues(WaveParams(front.model, front.c)).lambda2
    ratios, scaled, slopes, gap_ratios, decay = [], [], [], [], []
    for w, dw in ((front.phi, front.dphi), (front.psi, front.dpsi)):
        ratios.append(w[left] / dw[left])
        scaled.append(w[left] / env)
        slopes.append(dw[left] / env)
        gap_ratios.append(dw[right] / gap)
        decay.append(dw[right] / np.exp(lam2 * xi[right]))
    ratios, scaled, slopes = np.concatenate(ratios), np.concatenate(scaled), np.concatenate(slopes)
    gap_ratios, decay = np.concatenate(gap_ratios), np.concatenate(decay)
    # Pad by a few ulps so that recomputing the products in certify() cannot round across.
    up, down = 1.0 + PAD, 1.0 - PAD
    consts = TailConstants(
        M1=float(ratios.max()) * up,
        M1_bar=float(ratios.min()) * down,
        M2=float(max(scaled.max(), slopes.max())) * up,
        M2_bar=float(scaled.min()) * down,
        kappa=float(kappa),
        M3=float(gap_ratios.max()) * up,
        M3_bar=float(gap_ratios.min()) * down,
        M4=float(decay.max()) * up,
        lambda2=float(lam2),
    )
    values = [consts.M1, consts.M1_bar, consts.M2, consts.M2_bar, consts.kappa, consts.M3, consts.M3_bar, consts.M4]
    if not all(np.isfinite(v) and v > 0 for v in values):
        raise BoundViolated(f"non-positive tail constant in {consts}")
    consts.certify(front)
    return consts
