"""The diffusion-free kinetics and their logistic envelopes.

The orbit ``(p(t), q(t))`` of ``p' = p (1 - p - k1 q)``, ``q' = r q (1 - q - k2 p)`` through
``(theta1, theta2)`` at ``t = 0`` rises from the origin at ``t = -inf`` to the coexistence
point at ``t = +inf``. Since ``q < v*`` along the orbit, ``p' > p (u* - p)``, so ``p`` is
compared with the logistic curve through ``theta1``: it lies above it for ``t >= 0`` and
below it for ``t <= 0``. The same holds for ``q`` with capacity ``v*`` and rate ``r v*``
(or the slower rate ``v*`` when ``r >= 1``).

Only one orbit is increasing in both components and stays below ``(u*, v*)``: the one
entering the coexistence point along its fast (positive) eigendirection. Every other orbit
approaches along the slow direction, which has components of opposite sign, so one density
overshoots its coexistence value. :func:`monotone_orbit_theta` picks initial data on the
monotone orbit.

Integration is carried out for ``(log p, log q)`` so that relative accuracy survives deep
into the ``t -> -inf`` tail where the densities underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import Blowup, EnvelopeViolated, InitialDataOutOfBox
from .model import ModelParams, coexistence

__all__ = [
    "DiffusionFreeOrbit",
    "EnvelopeReport",
    "solve_diffusion_free",
    "certify_logistic_envelope",
    "log_logistic",
    "monotone_orbit_theta",
]


def log_logistic(t, capacity: float, beta: float, rate: float):
    """``log`` of ``K beta e^{rate t} / (1 + beta e^{rate t})``, stable for large ``|t|``."""
    a = math.log(beta) + rate * np.asarray(t, dtype=float)
    return math.log(capacity) + a - np.logaddexp(0.0, a)


@dataclass(frozen=True)
class DiffusionFreeOrbit:
    """A sampled orbit with dense evaluation.

    ``beta_hat2`` uses the ``v*`` capacity; ``beta_hat2_printed`` is the variant with
    ``u*`` in the denominator, kept for comparison.
    """

    t_grid: np.ndarray
    p1: np.ndarray
    q1: np.ndarray
    theta1: float
    theta2: float
    beta_hat1: float
    beta_hat2: float
    beta_hat2_printed: float
    model: ModelParams
    T: float
    _log_forward: object = field(repr=False, compare=False, default=None)
    _log_backward: object = field(repr=False, compare=False, default=None)

    def log_values(self, t):
        """``(log p, log q)`` at arbitrary times.

        Beyond ``-T`` the orbit is continued along its log-linear asymptote; beyond ``+T``
        it is held at its last value (the gap to the limit is below roundoff there).
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        P = np.empty_like(t)
        Q = np.empty_like(t)
        fwd = (t >= 0) & (t <= self.T)
        bwd = (t < 0) & (t >= -self.T)
        if np.any(fwd):
            P[fwd], Q[fwd] = self._log_forward(t[fwd])
        if np.any(bwd):
            P[bwd], Q[bwd] = self._log_backward(t[bwd])
        lo = t < -self.T
        if np.any(lo):
            P0, Q0 = (float(x[0]) for x in self._log_backward(np.array([-self.T])))
            dP, dQ = _log_rhs(self.model, P0, Q0)
            P[lo] = P0 + dP * (t[lo] + self.T)
            Q[lo] = Q0 + dQ * (t[lo] + self.T)
        hi = t > self.T
        if np.any(hi):
            P_end, Q_end = (float(x[0]) for x in self._log_forward(np.array([self.T])))
            P[hi], Q[hi] = P_end, Q_end
        return P, Q

    def evaluate(self, t):
        """``(p, q)`` at arbitrary times; scalars in, scalars out."""
        scalar = np.ndim(t) == 0
        P, Q = self.log_values(t)
        p, q = np.exp(P), np.exp(Q)
        return (float(p[0]), float(q[0])) if scalar else (p, q)

    def derivative(self, t):
        """``(p', q')`` from the kinetics."""
        p, q = self.evaluate(t)
        m = self.model
        return p * (1 - p - m.k1 * q), m.r * q * (1 - q - m.k2 * p)

    def lower_envelopes(self, t=None):
        """Logistic curves through ``theta1`` and ``theta2`` with the certified rates."""
        t = self.t_grid if t is None else np.asarray(t, dtype=float)
        us, vs = coexistence(self.model)
        return (
            np.exp(log_logistic(t, us, self.beta_hat1, us)),
            np.exp(log_logistic(t, vs, self.beta_hat2, _q_rate(self.model))),
        )

    def to_csv(self, path=None) -> str:
        env_p, env_q = self.lower_envelopes()
        lines = ["t,p1,q1,lower_env_p,lower_env_q"]
        for row in zip(self.t_grid, self.p1, self.q1, env_p, env_q):
            lines.append(",".join(repr(float(x)) for x in row))
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _q_rate(model: ModelParams) -> float:
    _, vs = coexistence(model)
    return vs if model.r >= 1 else model.r * vs


def _log_rhs(model, P, Q):
    p, q = np.exp(P), np.exp(Q)
    return 1.0 - p - model.k1 * q, model.r * (1.0 - q - model.k2 * p)


def solve_diffusion_free(
    model: ModelParams,
    theta1: float,
    theta2: float,
    T: float = 60.0,
    tol: float = 1e-12,
    n_grid: int = 2401,
) -> DiffusionFreeOrbit:
    """Integrate the kinetics forward and backward from ``(theta1, theta2)`` at ``t = 0``.

    Parameters
    ----------
    model : ModelParams
        Weak-competition constants.
    theta1, theta2 : float
        Initial densities, strictly inside ``(0, u*) x (0, v*)``.
    T : float
        Integration horizon in both directions.
    tol : float
        Target accuracy of the orbit. The DOP853 integrator (in log variables) runs at a
        local tolerance of ``tol / 10`` so that accumulated error stays near ``tol``.
    n_grid : int
        Number of stored samples on ``[-T, T]``.
    """
    if not model.weak_competition:
        raise InitialDataOutOfBox("the diffusion-free orbit is defined for weak competition only")
    us, vs = coexistence(model)
    if not (0 < theta1 < us and 0 < theta2 < vs):
        raise InitialDataOutOfBox(f"(theta1, theta2) = ({theta1}, {theta2}) outside (0, {us}) x (0, {vs})")

    def rhs(_, y):
        return _log_rhs(model, y[0], y[1])

    y0 = [math.log(theta1), math.log(theta2)]
    local = max(tol / 10.0, 2.5e-14)
    sols = []
    for t_end in (T, -T):
        sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=local, atol=local, dense_output=True, max_step=1.0)
        if not sol.success or not np.all(np.isfinite(sol.y)):
            raise Blowup(f"integration towards t = {t_end} failed: {sol.message}")
        sols.append(sol.sol)
    fwd, bwd = sols

    t_grid = np.linspace(-T, T, n_grid)
    P = np.where(t_grid >= 0, fwd(np.clip(t_grid, 0, T))[0], bwd(np.clip(t_grid, -T, 0))[0])
    Q = np.where(t_grid >= 0, fwd(np.clip(t_grid, 0, T))[1], bwd(np.clip(t_grid, -T, 0))[1])
    p, q = np.exp(P), np.exp(Q)
    if np.any(p >= 1.0) or np.any(q >= 1.0):
        raise Blowup("orbit left the unit box")
    return DiffusionFreeOrbit(
        t_grid=t_grid,
        p1=p,
        q1=q,
        theta1=float(theta1),
        theta2=float(theta2),
        beta_hat1=theta1 / (us - theta1),
        beta_hat2=theta2 / (vs - theta2),
        beta_hat2_printed=theta2 / (us - theta2) if theta2 < us else math.inf,
        model=model,
        T=float(T),
        _log_forward=fwd,
        _log_backward=bwd,
    )


def monotone_orbit_theta(model: ModelParams, level: float = 0.5, offset: float = 1e-9, tol: float = 1e-12) -> tuple[float, float]:
    """Point ``(theta1, theta2)`` with ``theta1 = level * u*`` on the monotone orbit.

    The orbit is traced backwards from ``(u*, v*) - offset * e`` with ``e`` the positive
    eigenvector of the fast coexistence eigenvalue. Backward integration is stable along
    this direction since it is the most strongly repelling one in reversed time.
    """
    if not model.weak_competition:
        raise InitialDataOutOfBox("the monotone orbit exists for weak competition only")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    us, vs = coexistence(model)
    jac = np.array([[-us, -model.k1 * us], [-model.r * model.k2 * vs, -model.r * vs]])
    ev, vec = np.linalg.eig(jac)
    e = np.abs(vec[:, int(np.argmin(ev.real))].real)
    e /= np.linalg.norm(e)
    start = [math.log(us - offset * e[0]), math.log(vs - offset * e[1])]
    target = math.log(level * us)

    def rhs(_, y):
        return _log_rhs(model, y[0], y[1])

    def hit(_, y):
        return y[0] - target

    hit.terminal = True
    sol = solve_ivp(rhs, (0.0, -400.0), start, method="DOP853", rtol=tol, atol=tol, events=hit, max_step=1.0)
    if sol.status != 1:
        raise Blowup("backward trace of the monotone orbit did not reach the requested level")
    P, Q = sol.y_events[0][0]
    return level * us, float(math.exp(Q))


@dataclass
class EnvelopeReport:
    """Worst log-margins of the logistic comparison, split by time direction.

    Positive margins mean the inequality holds. ``forward`` margins are
    ``log(orbit) - log(envelope)`` on ``t >= 0``; ``backward`` margins are
    ``log(envelope) - log(orbit)`` on ``t <= 0``.
    """

    forward_margin_p: float
    backward_margin_p: float
    forward_margin_q: float
    backward_margin_q: float
    cap_margin: float
    q_rate: float
    monotone: bool
    literal_lower_bound_all_t: bool
    printed_beta2_forward_margin: float
    printed_rate_q_forward_margin: float
    backward_constant: float
    passed: bool = True
    notes: list = field(default_factory=list)


def certify_logistic_envelope(orbit: DiffusionFreeOrbit, tol: float = 1e-10) -> EnvelopeReport:
    """Certify the logistic comparison at every stored time.

    Raises
    ------
    EnvelopeViolated
        If the direction-aware bound, the cap by the coexistence values or monotonicity
        fails by more than ``tol`` (relative).
    """
    m = orbit.model
    us, vs = coexistence(m)
    t = orbit.t_grid
    P, Q = orbit.log_values(t)
    Lp = log_logistic(t, us, orbit.beta_hat1, us)
    Lq = log_logistic(t, vs, orbit.beta_hat2, _q_rate(m))
    fwd, bwd = t >= 0, t <= 0

    fp = float(np.min(P[fwd] - Lp[fwd]))
    bp = float(np.min(Lp[bwd] - P[bwd]))
    fq = float(np.min(Q[fwd] - Lq[fwd]))
    bq = float(np.min(Lq[bwd] - Q[bwd]))
    cap = float(min(np.min(math.log(us) - P), np.min(math.log(vs) - Q)))
    # Growth rates from the kinetics; differences of stored values stall at roundoff near the limit.
    dP, dQ = _log_rhs(m, P, Q)
    monotone = bool(np.all(dP > -tol) and np.all(dQ > -tol))

    literal = bool(np.all(P - Lp >= -tol) and np.all(Q - Lq >= -tol))
    if math.isfinite(orbit.beta_hat2_printed):
        Lq_printed = log_logistic(t, vs, orbit.beta_hat2_printed, _q_rate(m))
        printed_beta = float(np.min(Q[fwd] - Lq_printed[fwd]))
    else:
        printed_beta = -math.inf
    Lq_rate = log_logistic(t, vs, orbit.beta_hat2, vs)
    printed_rate = float(np.min(Q[fwd] - Lq_rate[fwd]))

    back = t <= 0
    backward_constant = float(np.max(np.maximum(orbit.p1[back], orbit.q1[back]) / np.exp(min(us, vs) * t[back])))

    report = EnvelopeReport(
        forward_margin_p=fp,
        backward_margin_p=bp,
        forward_margin_q=fq,
        backward_margin_q=bq,
        cap_margin=cap,
        q_rate=_q_rate(m),
        monotone=monotone,
        literal_lower_bound_all_t=literal,
        printed_beta2_forward_margin=printed_beta,
        printed_rate_q_forward_margin=printed_rate,
        backward_constant=backward_constant,
    )
    if not literal:
        report.notes.append("for t < 0 the logistic curve is an upper bound, not a lower bound")
    if printed_beta < -tol:
        report.notes.append("the u*-denominator constant for q does not give a lower bound")
    failures = [
        ("forward p", fp, t[fwd][np.argmin(P[fwd] - Lp[fwd])]),
        ("backward p", bp, t[bwd][np.argmin(Lp[bwd] - P[bwd])]),
        ("forward q", fq, t[fwd][np.argmin(Q[fwd] - Lq[fwd])]),
        ("backward q", bq, t[bwd][np.argmin(Lq[bwd] - Q[bwd])]),
        ("cap", cap, t[np.argmin(np.minimum(math.log(us) - P, math.log(vs) - Q))]),
    ]
    for name, margin, where in failures:
        if margin < -tol:
            report.passed = False
            raise EnvelopeViolated(f"{name} envelope fails by {-margin:.3e} at t = {where:.6g}", t=float(where))
    if not monotone:
        report.passed = False
        raise EnvelopeViolated("orbit is not strictly increasing")
    return report
