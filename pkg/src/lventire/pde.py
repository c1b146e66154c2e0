"""Finite-difference simulation of the reaction-diffusion system and entire-solution checks.

The scheme is an IMEX theta-method on a uniform, exactly symmetric grid: diffusion is
treated implicitly (backward Euler for ``theta = 1``), reaction explicitly. Each linear
solve is averaged with the solve of the mirrored system, which makes the scheme commute
with ``x -> -x`` to the last bit.

Entire solutions are approximated as in the compactness argument: start at ``t = -n``
from a bounding pair, run forward, and watch the solutions for increasing ``n`` settle
on a fixed observation window.
"""

from __future__ import annotations

import json
import math
import time as _time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from .errors import (
    InitialDataOutOfBox,
    NoConvergenceTrend,
    PropertyFailed,
    SandwichViolated,
    StepRejectedFloor,
    UnboundedGrowth,
)
from .model import ModelParams, coexistence, reaction

__all__ = [
    "SchemeConfig",
    "FieldState",
    "SimulationResult",
    "SandwichCertificate",
    "EntireApproximation",
    "EntirePropertiesReport",
    "DerivativeReport",
    "make_grid",
    "step",
    "simulate",
    "initial_from_pair",
    "comparison_harness",
    "entire_approximation",
    "check_entire_properties",
    "derivative_bound_probe",
    "manufactured_convergence",
    "measure_front_speed",
]

BOX_TOL = 1e-12


@dataclass(frozen=True)
class SchemeConfig:
    x_half_length: float = 150.0
    nx: int = 3001
    dt: float = 0.01
    t_start: float = -10.0
    t_end: float = 30.0
    boundary: str = "NeumannZero"
    theta: float = 1.0
    snapshot_every: float = 0.1
    dt_floor: float = 1e-8
    enforce_box: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.nx < 3:
            raise ValueError("nx must be at least 3")
        if not self.t_start < self.t_end:
            raise ValueError("t_start must precede t_end")
        if self.boundary not in ("NeumannZero", "DirichletFromPair"):
            raise ValueError("boundary must be NeumannZero or DirichletFromPair")
        if not 0.5 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0.5, 1]")

    @property
    def dx(self) -> float:
        return 2.0 * self.x_half_length / (self.nx - 1)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def make_grid(config: SchemeConfig) -> np.ndarray:
    """Grid ``dx * (k - (nx - 1) / 2)``, symmetric about 0 to the last bit."""
    return config.dx * (np.arange(config.nx) - (config.nx - 1) / 2.0)


@dataclass(frozen=True)
class FieldState:
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    time: float
    substeps: int = 1

    def in_box(self, tol: float = BOX_TOL) -> bool:
        return bool(
            np.all(self.u >= -tol) and np.all(self.u <= 1 + tol) and np.all(self.v >= -tol) and np.all(self.v <= 1 + tol)
        )

    def reflect(self) -> "FieldState":
        return replace(self, u=self.u[::-1].copy(), v=self.v[::-1].copy())


def _laplacian_banded(n, dx, coef, scale, dirichlet):
    """Banded form of ``I - scale * coef * Lap`` with Neumann ghost rows or Dirichlet rows."""
    a = scale * coef / dx**2
    ab = np.zeros((3, n))
    ab[0, 1:] = -a
    ab[1, :] = 1.0 + 2.0 * a
    ab[2, :-1] = -a
    if dirichlet:
        ab[1, 0] = ab[1, -1] = 1.0
        ab[0, 1] = 0.0
        ab[2, -2] = 0.0
    else:
        # Ghost point u_{-1} = u_1: the boundary row couples with weight 2.
        ab[0, 1] = -2.0 * a
        ab[2, -2] = -2.0 * a
    return ab


def _apply_laplacian(w, dx, dirichlet):
    out = np.empty_like(w)
    out[1:-1] = ((w[:-2] + w[2:]) - 2.0 * w[1:-1]) / dx**2
    if dirichlet:
        out[0] = out[-1] = 0.0
    else:
        out[0] = 2.0 * (w[1] - w[0]) / dx**2
        out[-1] = 2.0 * (w[-2] - w[-1]) / dx**2
    return out


def _symmetric_solve(ab, rhs):
    """Average of the solve and the mirrored solve; commutes exactly with reversal."""
    a = solve_banded((1, 1), ab, rhs)
    b = solve_banded((1, 1), ab, rhs[::-1])[::-1]
    return 0.5 * (a + b)


def _attempt(state, model, config, dt, forcing, boundary):
    dirichlet = config.boundary == "DirichletFromPair"
    dx = config.dx
    n = state.x.size
    th = config.theta
    f, g = reaction(model, state.u, state.v)
    rhs_u = state.u + dt * f
    rhs_v = state.v + dt * g
    if th < 1.0:
        rhs_u = rhs_u + (1 - th) * dt * _apply_laplacian(state.u, dx, dirichlet)
        rhs_v = rhs_v + (1 - th) * dt * model.d * _apply_laplacian(state.v, dx, dirichlet)
    if forcing is not None:
        fu, fv = forcing(state.x, state.time)
        rhs_u = rhs_u + dt * fu
        rhs_v = rhs_v + dt * fv
    if dirichlet:
        (uL, uR), (vL, vR) = boundary(state.time + dt)
        rhs_u[0], rhs_u[-1], rhs_v[0], rhs_v[-1] = uL, uR, vL, vR
    u = _symmetric_solve(_laplacian_banded(n, dx, 1.0, th * dt, dirichlet), rhs_u)
    v = _symmetric_solve(_laplacian_banded(n, dx, model.d, th * dt, dirichlet), rhs_v)
    return FieldState(state.x, u, v, state.time + dt)


def step(state: FieldState, model: ModelParams, config: SchemeConfig, dt: float | None = None, forcing=None, boundary=None) -> FieldState:
    """Advance one step of size ``dt`` (default ``config.dt``).

    If ``config.enforce_box`` is set and the result leaves ``[0, 1]^2``, the step is
    redone as two half steps, recursively down to ``config.dt_floor``.

    Parameters
    ----------
    forcing : callable, optional
        ``forcing(x, t) -> (Fu, Fv)`` added explicitly to the right-hand side.
    boundary : callable, optional
        ``boundary(t) -> ((uL, uR), (vL, vR))`` for Dirichlet boundaries.
    """
    dt = config.dt if dt is None else dt
    if config.boundary == "DirichletFromPair" and boundary is None:
        raise ValueError("Dirichlet boundaries need a boundary callable")
    new = _attempt(state, model, config, dt, forcing, boundary)
    if config.enforce_box and not new.in_box():
        if dt / 2 < config.dt_floor:
            raise StepRejectedFloor(f"step rejected down to dt = {dt:.3e} at t = {state.time:.6g}", state=state)
        half = step(state, model, config, dt / 2, forcing, boundary)
        new = step(half, model, config, dt / 2, forcing, boundary)
        return replace(new, substeps=half.substeps + new.substeps)
    return new


@dataclass
class SimulationResult:
    snapshots: list
    steps: int
    rejections: int
    runtime: float
    config: SchemeConfig

    def __iter__(self):
        return iter(self.snapshots)

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    @property
    def final(self) -> FieldState:
        return self.snapshots[-1]

    def write_csv(self, directory) -> list:
        """One ``snapshot_XXXXX.csv`` per snapshot (columns x, u, v) plus ``manifest.json``."""
        import os

        paths = []
        for k, s in enumerate(self.snapshots):
            path = os.path.join(directory, f"snapshot_{k:05d}.csv")
            with open(path, "w") as fh:
                fh.write(f"# t={s.time!r}\nx,u,v\n")
                for row in zip(s.x, s.u, s.v):
                    fh.write(",".join(repr(float(val)) for val in row) + "\n")
            paths.append(path)
        with open(os.path.join(directory, "manifest.json"), "w") as fh:
            json.dump({"times": [s.time for s in self.snapshots], "config": self.config.to_dict()}, fh, indent=2)
        return paths


def simulate(
    initial: FieldState,
    model: ModelParams,
    config: SchemeConfig,
    forcing=None,
    boundary=None,
    callback=None,
) -> SimulationResult:
    """Run from ``config.t_start`` to ``config.t_end``, keeping snapshots every ``snapshot_every``.

    ``callback(state)`` is called on every snapshot, including the initial one.
    """
    if config.enforce_box and not initial.in_box():
        raise InitialDataOutOfBox("initial data leaves [0, 1]^2")
    t0 = _time.perf_counter()
    n_steps = int(round((config.t_end - config.t_start) / config.dt))
    every = max(1, int(round(config.snapshot_every / config.dt)))
    state = replace(initial, time=config.t_start)
    snaps = [state]
    if callback:
        callback(state)
    rejections = 0
    for k in range(1, n_steps + 1):
        state = step(state, model, config, forcing=forcing, boundary=boundary)
        rejections += state.substeps - 1
        # Keep times on the lattice t_start + k dt rather than accumulating roundoff.
        state = replace(state, time=config.t_start + k * config.dt, substeps=1)
        if k % every == 0 or k == n_steps:
            snaps.append(state)
            if callback:
                callback(state)
    return SimulationResult(snaps, n_steps, rejections, _time.perf_counter() - t0, config)


def initial_from_pair(pair, config: SchemeConfig, t: float, start: str = "sub") -> FieldState:
    """Initial data from a bounding pair.

    ``sub`` takes ``(u_lo, v_lo)``, ``competitive`` takes ``(u_lo, v_hi)`` (the lower end
    in the competitive order) and ``super`` takes ``(u_hi, v_hi)``.
    """
    x = make_grid(config)
    if start == "sub":
        u, v = pair.u_lower(x, t), pair.v_lower(x, t)
    elif start == "competitive":
        u, v = pair.u_lower(x, t), pair.v_upper(x, t)
    elif start == "super":
        u, v = pair.u_upper(x, t), pair.v_upper(x, t)
    else:
        raise ValueError("start must be 'sub', 'competitive' or 'super'")
    return FieldState(x, np.array(u, dtype=float), np.array(v, dtype=float), float(t))


def _pair_boundary(pair, config):
    x_ends = np.array([-config.x_half_length, config.x_half_length])

    def boundary(t):
        u = 0.5 * (pair.u_lower(x_ends, t) + pair.u_upper(x_ends, t))
        v = 0.5 * (pair.v_lower(x_ends, t) + pair.v_upper(x_ends, t))
        return (float(u[0]), float(u[1])), (float(v[0]), float(v[1]))

    return boundary


@dataclass
class SandwichCertificate:
    """Worst margin of ``lower - eps <= solution <= upper + eps`` over all snapshots."""

    eps: float
    worst_margin: float
    worst_x: float
    worst_t: float
    worst_which: str
    checks: int
    margin_history: list
    passed: bool
    runtime: float
    start: str
    simulation: SimulationResult | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "simulation"}
        return d


def comparison_harness(pair, model: ModelParams, config: SchemeConfig, eps: float | None = None, start: str = "sub", raise_on_failure: bool = True) -> SandwichCertificate:
    """Simulate from the pair's data at ``t_start`` and check the sandwich at every snapshot.

    ``eps`` defaults to ``5 (dx^2 + dt)``.
    """
    eps = 5.0 * (config.dx**2 + config.dt) if eps is None else eps
    x = make_grid(config)
    pair.check_domain(*np.meshgrid(x, [config.t_start, config.t_end], indexing="ij"))
    init = initial_from_pair(pair, config, config.t_start, start)
    worst = {"margin": math.inf, "x": 0.0, "t": 0.0, "which": ""}
    history = []

    def check(state):
        t = state.time
        bounds = (
            ("u >= u_lo", state.u - pair.u_lower(x, t)),
            ("u <= u_hi", pair.u_upper(x, t) - state.u),
            ("v >= v_lo", state.v - pair.v_lower(x, t)),
            ("v <= v_hi", pair.v_upper(x, t) - state.v),
        )
        step_min = math.inf
        for name, gap in bounds:
            i = int(np.argmin(gap))
            margin = float(gap[i]) + eps
            step_min = min(step_min, margin)
            if margin < worst["margin"]:
                worst.update(margin=margin, x=float(x[i]), t=float(t), which=name)
        history.append((float(t), step_min))

    boundary = _pair_boundary(pair, config) if config.boundary == "DirichletFromPair" else None
    sim = simulate(init, model, config, boundary=boundary, callback=check)
    passed = worst["margin"] >= 0
    cert = SandwichCertificate(
        eps=eps,
        worst_margin=worst["margin"],
        worst_x=worst["x"],
        worst_t=worst["t"],
        worst_which=worst["which"],
        checks=len(history),
        margin_history=history,
        passed=passed,
        runtime=sim.runtime,
        start=start,
        simulation=sim,
    )
    if not passed and raise_on_failure:
        raise SandwichViolated(
            f"{worst['which']} fails by {-worst['margin']:.3e} at x = {worst['x']:.4g}, t = {worst['t']:.4g}",
            x=worst["x"],
            t=worst["t"],
            margin=worst["margin"],
        )
    return cert


@dataclass
class EntireApproximation:
    """Runs started at ``t = -n`` and their differences on a common time window.

    ``cauchy_gaps[k]`` is the sup-norm of the difference (both components) between the
    runs for ``n_list[k]`` and ``n_list[k + 1]`` over all window snapshots.
    """

    start_times: list
    n_list: list
    window: tuple
    observation_times: np.ndarray
    snapshots: dict
    initial_sup_v: dict
    cauchy_gaps: list
    symmetry_errors: dict
    sandwich: dict
    start: str
    config: SchemeConfig
    edge_v: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_list": self.n_list,
            "window": list(self.window),
            "cauchy_gaps": self.cauchy_gaps,
            "symmetry_errors": {str(k): v for k, v in self.symmetry_errors.items()},
            "initial_sup_v": {str(k): v for k, v in self.initial_sup_v.items()},
            "sandwich_worst_margin": {str(k): v for k, v in self.sandwich.items()},
            "start": self.start,
        }


GAP_FLOOR = 1e-11


def _backward_run(pair, model, config, n, window, obs, start):
    """One run from ``t = -n``; returns kept observation states and diagnostics."""
    x = make_grid(config)
    cfg = replace(config, t_start=float(-n), t_end=float(window[1]))
    init = initial_from_pair(pair, cfg, -n, start)
    eps = 5.0 * (cfg.dx**2 + cfg.dt)
    kept = {}
    diag = {"sandwich": math.inf, "edge": 0.0, "sup_v0": float(np.max(init.v))}

    def collect(state):
        t = state.time
        gaps = (
            state.u - pair.u_lower(x, t),
            pair.u_upper(x, t) - state.u,
            state.v - pair.v_lower(x, t),
            pair.v_upper(x, t) - state.v,
        )
        diag["sandwich"] = min(diag["sandwich"], min(float(g.min()) for g in gaps) + eps)
        if window[0] - 1e-9 <= t <= window[1] + 1e-9:
            diag["edge"] = max(diag["edge"], abs(state.v[0]), abs(state.v[-1]))
        k = int(np.argmin(np.abs(obs - t)))
        if abs(obs[k] - t) < 1e-9:
            kept[float(obs[k])] = state

    simulate(init, model, cfg, callback=collect)
    return kept, diag


def entire_approximation(
    pair,
    model: ModelParams,
    config: SchemeConfig,
    n_list=(5, 10, 20, 40),
    window: tuple = (-2.0, 10.0),
    observe_every: float = 0.5,
    start: str = "sub",
    min_ratio: float = 2.0,
    time_extrapolation: bool = True,
    workers: int = 1,
    raise_on_failure: bool = True,
) -> EntireApproximation:
    """Backward-start approximations of an entire solution.

    For each ``n`` the system is run from ``t = -n`` (data from the pair) to
    ``window[1]``; states at the observation times in ``window`` are kept. Successive
    gaps must shrink by ``min_ratio`` per doubling of ``n``; gaps already below
    ``GAP_FLOOR`` count as converged.

    Parameters
    ----------
    time_extrapolation : bool
        Repeat every run at ``dt / 2`` and keep ``2 w(dt/2) - w(dt)``. The first-order
        time error shifts the discrete front speed by ``O(dt)``; over the extra ``n``
        time units of a longer run this drift is larger than the true gaps.
    workers : int
        Number of threads for the independent runs.
    """
    n_list = sorted(int(n) for n in n_list)
    if len(n_list) < 2:
        raise ValueError("need at least two start times")
    if -n_list[0] > window[0]:
        raise ValueError("the earliest observation time precedes the latest start")
    every = config.snapshot_every
    if abs(observe_every / every - round(observe_every / every)) > 1e-9:
        raise ValueError("observe_every must be a multiple of the snapshot cadence")
    obs = np.round(np.arange(window[0], window[1] + 1e-9, observe_every), 12)
    configs = [config, replace(config, dt=config.dt / 2)] if time_extrapolation else [config]
    jobs = [(n, cfg) for n in n_list for cfg in configs]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda job: _backward_run(pair, model, job[1], job[0], window, obs, start), jobs))
    else:
        results = [_backward_run(pair, model, cfg, n, window, obs, start) for n, cfg in jobs]
    by_n = {}
    for (n, _), res in zip(jobs, results):
        by_n.setdefault(n, []).append(res)

    snaps, sym, sandwich, sup_v0, edge = {}, {}, {}, {}, {}
    for n, runs in by_n.items():
        if len(runs) == 2:
            (coarse, _), (fine, _) = runs
            snaps[n] = {
                t: FieldState(fine[t].x, 2 * fine[t].u - coarse[t].u, 2 * fine[t].v - coarse[t].v, t) for t in coarse
            }
        else:
            snaps[n] = runs[0][0]
        missing = set(float(t) for t in obs) - set(snaps[n])
        if missing:
            raise ValueError(f"observation times {sorted(missing)[:3]} fall between snapshots")
        sandwich[n] = min(d["sandwich"] for _, d in runs)
        edge[n] = max(d["edge"] for _, d in runs)
        sup_v0[n] = runs[0][1]["sup_v0"]
        sym[n] = max(
            max(float(np.max(np.abs(s.u - s.u[::-1]))), float(np.max(np.abs(s.v - s.v[::-1])))) for s in snaps[n].values()
        )

    gaps = []
    for a, b in zip(n_list[:-1], n_list[1:]):
        g = 0.0
        for t in obs:
            sa, sb = snaps[a][float(t)], snaps[b][float(t)]
            g = max(g, float(np.max(np.abs(sa.u - sb.u))), float(np.max(np.abs(sa.v - sb.v))))
        gaps.append(g)
    approx = EntireApproximation(
        start_times=[-n for n in n_list],
        n_list=n_list,
        window=window,
        observation_times=obs,
        snapshots=snaps,
        initial_sup_v=sup_v0,
        cauchy_gaps=gaps,
        symmetry_errors=sym,
        sandwich=sandwich,
        start=start,
        config=config,
        edge_v=edge,
    )
    if raise_on_failure and not gaps_converging(gaps, min_ratio):
        raise NoConvergenceTrend(f"gaps {gaps} do not shrink by {min_ratio} per doubling", gaps=gaps)
    return approx


def gaps_converging(gaps, min_ratio: float = 2.0, floor: float = GAP_FLOOR) -> bool:
    for g0, g1 in zip(gaps[:-1], gaps[1:]):
        if g1 <= floor:
            continue
        if g1 * min_ratio > g0:
            return False
    return True


@dataclass
class EntirePropertiesReport:
    """Desk-scale checks of the four properties of the symmetric entire solution.

    1. symmetry in ``x``;
    2. exponential decay of ``sup_x v`` as ``t`` decreases, against ``envelope_rate``;
    3. ``v`` small at the domain edges over the observation window;
    4. final ``sup_x u`` and ``sup_x v`` inside the stated brackets.
    """

    symmetry_error: float
    sup_v_by_time: dict
    decay_rate: float
    envelope_rate: float
    decay_relative_error: float
    edge_v: float
    final_sup_u: float
    final_sup_v: float
    brackets: dict
    passed: dict
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: (v if not isinstance(v, dict) else {str(a): b for a, b in v.items()}) for k, v in self.__dict__.items()}


def check_entire_properties(
    approx: EntireApproximation,
    model: ModelParams,
    symmetry_tol: float = 1e-10,
    rate_tol: float = 0.2,
    edge_tol: float = 1e-6,
    delta: float = 0.02,
    eps: float = 0.001,
    raise_on_failure: bool = True,
) -> EntirePropertiesReport:
    """Evaluate properties 1-4 on an entire approximation (selector ``(1, 1, 0)``).

    The decay of ``sup_x v`` is read at the start times ``t = -n``; a fit needs at least
    two positive values, otherwise the rate is reported as ``nan``.
    """
    us, vs = coexistence(model)
    sym = max(approx.symmetry_errors.values())
    times = sorted(approx.initial_sup_v)
    sup_v = {-n: approx.initial_sup_v[n] for n in times}
    tt = np.array([-n for n in times], dtype=float)
    vals = np.array([approx.initial_sup_v[n] for n in times])
    notes = []
    if np.count_nonzero(vals > 0) >= 2:
        pos = vals > 0
        rate = float(np.polyfit(tt[pos], np.log(vals[pos]), 1)[0])
    else:
        rate = math.nan
        notes.append("sup_x v vanishes at the start times; no decay rate can be fitted")
    rel = abs(rate - vs) / vs if math.isfinite(rate) else math.nan
    edge = max(approx.edge_v.values())
    n_max = max(approx.n_list)
    last = approx.snapshots[n_max][float(approx.observation_times[-1])]
    sup_u, sup_v_final = float(np.max(last.u)), float(np.max(last.v))
    brackets = {"u": (us - delta, 1 + eps), "v": (-eps, vs + delta)}
    passed = {
        1: sym <= symmetry_tol,
        2: bool(math.isfinite(rel) and rel <= rate_tol),
        3: edge < edge_tol,
        4: brackets["u"][0] <= sup_u <= brackets["u"][1] and brackets["v"][0] <= sup_v_final <= brackets["v"][1],
    }
    report = EntirePropertiesReport(
        symmetry_error=sym,
        sup_v_by_time=sup_v,
        decay_rate=rate,
        envelope_rate=vs,
        decay_relative_error=rel,
        edge_v=edge,
        final_sup_u=sup_u,
        final_sup_v=sup_v_final,
        brackets=brackets,
        passed=passed,
        notes=notes,
    )
    if raise_on_failure:
        measured = {1: sym, 2: rate, 3: edge, 4: (sup_u, sup_v_final)}
        for k in (1, 2, 3, 4):
            if not passed[k]:
                raise PropertyFailed(f"property {k} fails with measured value {measured[k]}", index=k, value=measured[k])
    return report


@dataclass
class DerivativeReport:
    times: np.ndarray
    dt_norm: np.ndarray
    dx_norm: np.ndarray
    dxx_norm: np.ndarray
    maxima: dict
    early_max: float
    late_max: float
    growth_ratio: float
    passed: bool


def derivative_bound_probe(snapshots, t_after: float | None = None, growth_factor: float = 1.5, floor: float = 1e-12) -> DerivativeReport:
    """Sup-norms of discrete ``d/dt``, ``d/dx`` and ``d2/dx2`` of both components.

    Only snapshots later than ``t_after`` (default: first time plus 1) are used. Fails if
    the largest norm over the later half exceeds ``growth_factor`` times the earlier half.
    """
    snaps = list(snapshots)
    if len(snaps) < 3:
        raise ValueError("need at least three snapshots")
    t_after = snaps[0].time + 1.0 if t_after is None else t_after
    times, n_t, n_x, n_xx = [], [], [], []
    for prev, cur in zip(snaps[:-1], snaps[1:]):
        if cur.time <= t_after:
            continue
        h = cur.x[1] - cur.x[0]
        dtime = cur.time - prev.time
        dt_n = max(np.max(np.abs(cur.u - prev.u)), np.max(np.abs(cur.v - prev.v))) / dtime
        dx_n = max(np.max(np.abs(np.gradient(w, h))) for w in (cur.u, cur.v))
        dxx_n = max(np.max(np.abs(w[:-2] - 2 * w[1:-1] + w[2:])) / h**2 for w in (cur.u, cur.v))
        times.append(cur.time)
        n_t.append(dt_n)
        n_x.append(dx_n)
        n_xx.append(dxx_n)
    if len(times) < 2:
        raise ValueError("not enough snapshots after t_after")
    norms = np.array([n_t, n_x, n_xx])
    total = norms.max(axis=0)
    half = len(times) // 2
    early, late = float(total[:half].max()), float(total[half:].max())
    ratio = late / max(early, floor)
    passed = late <= growth_factor * early + floor
    rep = DerivativeReport(
        times=np.array(times),
        dt_norm=norms[0],
        dx_norm=norms[1],
        dxx_norm=norms[2],
        maxima={"dt": float(norms[0].max()), "dx": float(norms[1].max()), "dxx": float(norms[2].max())},
        early_max=early,
        late_max=late,
        growth_ratio=ratio,
        passed=bool(passed),
    )
    if not passed:
        raise UnboundedGrowth(f"derivative norms grow: late max {late:.3e} vs early max {early:.3e}")
    return rep


def manufactured_convergence(
    model: ModelParams,
    nx_list=(21, 41, 81, 161),
    half_length: float = 1.0,
    dt: float = 1e-3,
    t_end: float = 0.5,
    amplitude: float = 0.2,
    richardson: bool = True,
):
    """Spatial convergence against ``w* + A e^{-t} cos(pi x / L)`` for both components.

    The matching forcing is added to each equation. With ``richardson`` the run is
    repeated at ``dt / 2`` and combined as ``2 w(dt/2) - w(dt)`` to remove the
    first-order time error, leaving the spatial error.

    Returns
    -------
    errors : numpy.ndarray
        Max-norm errors at ``t_end``, one per grid.
    order : float
        Least-squares slope of ``log error`` against ``log dx``.
    """
    us, vs = coexistence(model)
    k = math.pi / half_length

    def exact(x, t):
        s = amplitude * math.exp(-t) * np.cos(k * x)
        return us + s, vs + s

    def forcing(x, t):
        u, v = exact(x, t)
        s = amplitude * math.exp(-t) * np.cos(k * x)
        f, g = reaction(model, u, v)
        return -s + k * k * s - f, -s + model.d * k * k * s - g

    errors, dxs = [], []
    for nx in nx_list:
        runs = []
        for h in ((dt, dt / 2) if richardson else (dt,)):
            cfg = SchemeConfig(x_half_length=half_length, nx=nx, dt=h, t_start=0.0, t_end=t_end, snapshot_every=t_end)
            x = make_grid(cfg)
            u0, v0 = exact(x, 0.0)
            runs.append(simulate(FieldState(x, u0, v0, 0.0), model, cfg, forcing=forcing).final)
        if richardson:
            u = 2 * runs[1].u - runs[0].u
            v = 2 * runs[1].v - runs[0].v
        else:
            u, v = runs[0].u, runs[0].v
        ue, ve = exact(runs[0].x, t_end)
        errors.append(max(np.max(np.abs(u - ue)), np.max(np.abs(v - ve))))
        dxs.append(2 * half_length / (nx - 1))
    errors = np.array(errors)
    order = float(np.polyfit(np.log(dxs), np.log(errors), 1)[0])
    return errors, order


def measure_front_speed(snapshots, level: float, component: str = "u") -> float:
    """Speed of the ``level`` crossing of an increasing profile, by linear fit of its position."""
    pos, times = [], []
    for s in snapshots:
        w = getattr(s, component)
        i = int(np.argmax(w >= level))
        if i == 0:
            continue
        x0, x1, w0, w1 = s.x[i - 1], s.x[i], w[i - 1], w[i]
        pos.append(x0 + (level - w0) * (x1 - x0) / (w1 - w0))
        times.append(s.time)
    return float(np.polyfit(times, pos, 1)[0])
