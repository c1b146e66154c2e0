"""Linearizations of the travelling-wave ODE at its two end states.

A front ``(phi, psi)(x + c t)`` solves the first-order system in ``y = (phi, phi', psi, psi')``::

    phi'' = c phi' - phi (1 - phi - k1 psi)
    psi'' = (c psi' - r psi (1 - psi - k2 phi)) / d

Near the coexistence point the front decays along the slower stable eigendirection; near
the origin the four positive roots of two quadratics, and their coincidences, fix the
shape of the leading-edge tail. This module computes both spectra, classifies the
coincidence pattern at the origin and produces the matching tail templates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguousMultiplicity,
    DegenerateRegime,
    HomotopyBreak,
    NotAnEigenvalue,
    SignSplitViolation,
    SubminimalSpeed,
)
from .model import ModelParams, coexistence

__all__ = [
    "WaveParams",
    "BasePoint",
    "LinearizationMatrix",
    "MultiplicityCase",
    "TailTerm",
    "AsymptoticTemplate",
    "SpectralReport",
    "CoexistenceSpectrum",
    "HomotopyReport",
    "c_min",
    "linearize",
    "homotopy_matrix",
    "origin_eigenvalues",
    "coexistence_quartic",
    "companion_roots",
    "coexistence_eigenvalues",
    "homotopy_check",
    "classify_minus_infinity",
    "coexistence_report",
    "generalized_eigenvector_chains",
    "format_report",
]

SPEED_TOL = 1e-12
# Discriminants within this relative band of zero are treated as exact double roots.
DISC_RTOL = 1e-12
PREDICATE_RTOL = 1e-12
COINCIDENCE_RTOL = 1e-9
# Double roots perturb to a complex pair of size ~sqrt(eps), so realness is judged loosely.
IMAG_TOL = 1e-6
CHAIN_TOL = 1e-10


def c_min(model: ModelParams) -> float:
    """Minimal front speed ``2 max(1, sqrt(r d))``."""
    return 2.0 * max(1.0, math.sqrt(model.r * model.d))


@dataclass(frozen=True)
class WaveParams:
    model: ModelParams
    c: float

    def __post_init__(self):
        cm = c_min(self.model)
        if not math.isfinite(self.c) or self.c < cm - SPEED_TOL:
            raise SubminimalSpeed(f"c = {self.c} is below c_min = {cm}")
        object.__setattr__(self, "c", float(self.c))

    @property
    def c_min(self) -> float:
        return c_min(self.model)


class BasePoint(enum.Enum):
    COEXISTENCE = "CoexistencePoint"
    ORIGIN = "OriginPoint"


@dataclass(frozen=True)
class LinearizationMatrix:
    entries: np.ndarray
    base_point: BasePoint


def homotopy_matrix(wave: WaveParams, rho: float) -> np.ndarray:
    """Coexistence linearization with the ``u``-to-``v`` coupling scaled by ``rho``."""
    m = wave.model
    if not m.weak_competition:
        raise DegenerateRegime("the coexistence linearization needs 0 < k1, k2 < 1")
    us, vs = coexistence(m)
    c, r, d = wave.c, m.r, m.d
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [us, c, rho * m.k1 * us, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [r / d * m.k2 * vs, 0.0, r / d * vs, c / d],
        ]
    )


def linearize(wave: WaveParams, at: BasePoint) -> LinearizationMatrix:
    """Jacobian of the first-order wave system at ``(u*, 0, v*, 0)`` or at the origin."""
    at = BasePoint(at)
    if at is BasePoint.COEXISTENCE:
        return LinearizationMatrix(homotopy_matrix(wave, 1.0), at)
    c, r, d = wave.c, wave.model.r, wave.model.d
    entries = np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, c, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -r / d, c / d],
        ]
    )
    return LinearizationMatrix(entries, at)


def _clamped_sqrt(disc: float, scale: float) -> float:
    if disc < -DISC_RTOL * scale:
        raise SubminimalSpeed(f"negative discriminant {disc:.3e}: roots are complex")
    if abs(disc) <= DISC_RTOL * scale:
        return 0.0
    return math.sqrt(disc)


def origin_eigenvalues(wave: WaveParams) -> tuple[float, float, float, float]:
    """Closed-form roots ``(lam3, lam4, lam5, lam6)`` of the origin linearization.

    ``lam3 >= lam4`` solve ``lam^2 - c lam + 1 = 0`` and ``lam5 >= lam6`` solve
    ``d lam^2 - c lam + r = 0``.
    """
    c, r, d = wave.c, wave.model.r, wave.model.d
    s1 = _clamped_sqrt(c * c - 4.0, c * c)
    s2 = _clamped_sqrt(c * c - 4.0 * r * d, c * c)
    lam3 = (c + s1) / 2.0
    # The small roots are evaluated through the product to avoid cancellation.
    lam4 = 1.0 / lam3
    lam5 = (c + s2) / (2.0 * d)
    lam6 = r / (d * lam5)
    if s1 == 0.0:
        lam3 = lam4 = c / 2.0
    if s2 == 0.0:
        lam5 = lam6 = c / (2.0 * d)
    return lam3, lam4, lam5, lam6


def coexistence_quartic(wave: WaveParams, rho: float = 1.0) -> np.ndarray:
    """Monic characteristic polynomial coefficients (highest degree first) at the coexistence point."""
    m = wave.model
    us, vs = coexistence(m)
    c, r, d = wave.c, m.r, m.d
    return np.array(
        [
            1.0,
            -(c + c / d),
            c * c / d - us - r / d * vs,
            c * r / d * vs + c / d * us,
            r / d * us * vs - rho * r * m.k1 * m.k2 / d * us * vs,
        ]
    )


def companion_roots(coeffs) -> np.ndarray:
    """Roots of a polynomial from the eigenvalues of its companion matrix.

    Returns the raw (possibly complex) eigenvalues, unsorted.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    a = coeffs[1:] / coeffs[0]
    n = a.size
    comp = np.zeros((n, n))
    comp[0, :] = -a
    comp[1:, :-1] = np.eye(n - 1)
    return np.linalg.eigvals(comp)


def _certify_real(roots: np.ndarray) -> np.ndarray | None:
    bad = np.abs(roots.imag) > IMAG_TOL * (1.0 + np.abs(roots))
    if np.any(bad):
        return None
    return np.sort(roots.real)


@dataclass(frozen=True)
class CoexistenceSpectrum:
    """Real roots at the coexistence point, split by sign.

    ``lambda1 > lambda2`` are the negative roots, ``tau1 < 0 < tau2`` the matching
    ``psi``-to-``phi`` ratios in the eigenvectors ``(1, lam, tau, tau lam)``.
    """

    lambda1: float
    lambda2: float
    positive: tuple[float, float]
    tau1: float
    tau2: float
    mu2: float

    @property
    def roots(self) -> np.ndarray:
        return np.array(sorted([self.lambda2, self.lambda1, *self.positive]))


def _tau(wave: WaveParams, lam: float) -> float:
    us, _ = coexistence(wave.model)
    return float((lam * lam - wave.c * lam - us) / (wave.model.k1 * us))


def mu_roots(wave: WaveParams) -> tuple[float, float, float, float]:
    """Roots of the decoupled (``rho = 0``) problem, ``mu1 > 0 > mu2`` and ``mu3 > 0 > mu4``."""
    us, vs = coexistence(wave.model)
    c, r, d = wave.c, wave.model.r, wave.model.d
    s1 = math.sqrt(c * c + 4.0 * us)
    s2 = math.sqrt(c * c + 4.0 * d * r * vs)
    return (c + s1) / 2.0, (c - s1) / 2.0, (c + s2) / (2.0 * d), (c - s2) / (2.0 * d)


def coexistence_eigenvalues(wave: WaveParams) -> CoexistenceSpectrum:
    if not wave.model.weak_competition:
        raise DegenerateRegime("coexistence spectrum requires weak competition")
    roots = _certify_real(companion_roots(coexistence_quartic(wave)))
    if roots is None:
        raise SignSplitViolation("coexistence quartic has non-real roots")
    neg = roots[roots < 0]
    pos = roots[roots > 0]
    if neg.size != 2 or pos.size != 2:
        raise SignSplitViolation(f"expected a 2+2 sign split, got roots {roots}")
    lam2, lam1 = neg
    return CoexistenceSpectrum(
        lambda1=float(lam1),
        lambda2=float(lam2),
        positive=(float(pos[0]), float(pos[1])),
        tau1=_tau(wave, lam1),
        tau2=_tau(wave, lam2),
        mu2=mu_roots(wave)[1],
    )


@dataclass
class HomotopyReport:
    rhos: np.ndarray
    determinants: np.ndarray
    determinants_formula: np.ndarray
    roots: np.ndarray
    mu: tuple[float, float, float, float]
    rho0_max_error: float


def homotopy_check(wave: WaveParams, rho_steps: int = 11) -> HomotopyReport:
    """Follow the coexistence roots as the coupling ``rho`` goes from 0 to 1.

    At every step the determinant (the constant term of the quartic) must stay
    positive and the roots must split two negative, two positive.
    """
    if rho_steps < 2:
        raise ValueError("rho_steps must be at least 2")
    m = wave.model
    if not m.weak_competition:
        raise DegenerateRegime("homotopy check requires weak competition")
    us, vs = coexistence(m)
    rhos = np.linspace(0.0, 1.0, rho_steps)
    dets, formula, all_roots = [], [], []
    for rho in rhos:
        det = float(np.linalg.det(homotopy_matrix(wave, rho)))
        d_rho = m.r / m.d * us * vs - rho * m.r * m.k1 * m.k2 / m.d * us * vs
        quartic = coexistence_quartic(wave, rho)
        if not d_rho > 0 or not det > 0 or not quartic[-1] > 0:
            raise HomotopyBreak(f"determinant lost positivity at rho={rho}", rho=rho)
        roots = _certify_real(companion_roots(quartic))
        if roots is None or np.sum(roots < 0) != 2 or np.sum(roots > 0) != 2:
            raise HomotopyBreak(f"2+2 real split lost at rho={rho}: {roots}", rho=rho)
        dets.append(det)
        formula.append(d_rho)
        all_roots.append(roots)
    mu = mu_roots(wave)
    rho0_err = float(np.max(np.abs(np.sort(mu) - all_roots[0])))
    return HomotopyReport(rhos, np.array(dets), np.array(formula), np.array(all_roots), mu, rho0_err)


class MultiplicityCase(enum.Enum):
    """Coincidence pattern of ``lam3 >= lam4`` (phi pair) and ``lam5 >= lam6`` (psi pair)."""

    SIMPLE = "simple"
    PHI_PAIR = "phi_pair"  # lam3 = lam4
    PSI_PAIR = "psi_pair"  # lam5 = lam6
    FAST_FAST = "fast_fast"  # lam3 = lam5
    FAST_SLOW = "fast_slow"  # lam3 = lam6
    SLOW_FAST = "slow_fast"  # lam4 = lam5
    SLOW_SLOW = "slow_slow"  # lam4 = lam6
    BOTH_PAIRS = "both_pairs"  # lam3 = lam4 and lam5 = lam6
    CROSSED_PAIRS = "crossed_pairs"  # lam3 = lam5 and lam4 = lam6
    TRIPLE_PHI_PAIR_FAST = "triple_phi_pair_fast"  # lam3 = lam4 = lam5 > lam6
    TRIPLE_PHI_PAIR_SLOW = "triple_phi_pair_slow"  # lam5 > lam6 = lam3 = lam4
    TRIPLE_PSI_PAIR_FAST = "triple_psi_pair_fast"  # lam5 = lam6 = lam3 > lam4
    TRIPLE_PSI_PAIR_SLOW = "triple_psi_pair_slow"  # lam3 > lam4 = lam5 = lam6
    QUADRUPLE = "quadruple"


def _partition_key(blocks) -> frozenset:
    return frozenset(frozenset(b) for b in blocks if len(b) > 1)


_PATTERNS = {
    _partition_key([]): MultiplicityCase.SIMPLE,
    _partition_key([{3, 4}]): MultiplicityCase.PHI_PAIR,
    _partition_key([{5, 6}]): MultiplicityCase.PSI_PAIR,
    _partition_key([{3, 5}]): MultiplicityCase.FAST_FAST,
    _partition_key([{3, 6}]): MultiplicityCase.FAST_SLOW,
    _partition_key([{4, 5}]): MultiplicityCase.SLOW_FAST,
    _partition_key([{4, 6}]): MultiplicityCase.SLOW_SLOW,
    _partition_key([{3, 4}, {5, 6}]): MultiplicityCase.BOTH_PAIRS,
    _partition_key([{3, 5}, {4, 6}]): MultiplicityCase.CROSSED_PAIRS,
    _partition_key([{3, 4, 5}]): MultiplicityCase.TRIPLE_PHI_PAIR_FAST,
    _partition_key([{3, 4, 6}]): MultiplicityCase.TRIPLE_PHI_PAIR_SLOW,
    _partition_key([{3, 5, 6}]): MultiplicityCase.TRIPLE_PSI_PAIR_FAST,
    _partition_key([{4, 5, 6}]): MultiplicityCase.TRIPLE_PSI_PAIR_SLOW,
    _partition_key([{3, 4, 5, 6}]): MultiplicityCase.QUADRUPLE,
}


def _merge(pairs) -> list[set]:
    blocks = [{i} for i in (3, 4, 5, 6)]
    for a, b in pairs:
        ba = next(x for x in blocks if a in x)
        bb = next(x for x in blocks if b in x)
        if ba is not bb:
            ba |= bb
            blocks.remove(bb)
    return blocks


def coincidence_pattern(lams, rtol: float = COINCIDENCE_RTOL) -> frozenset:
    """Partition of ``{3, 4, 5, 6}`` induced by numerically equal eigenvalues."""
    vals = dict(zip((3, 4, 5, 6), lams))
    pairs = [
        (a, b)
        for a in vals
        for b in vals
        if a < b and abs(vals[a] - vals[b]) <= rtol * (1.0 + max(abs(vals[a]), abs(vals[b])))
    ]
    return _partition_key(_merge(pairs))


def _predicate_pattern(wave: WaveParams, lams) -> frozenset:
    """Partition decided from exact parameter relations rather than root values."""
    c, r, d = wave.c, wave.model.r, wave.model.d
    lam3, lam4, lam5, lam6 = lams
    pairs = []
    phi_double = abs(c - 2.0) <= PREDICATE_RTOL * 2.0
    psi_double = abs(c - 2.0 * math.sqrt(r * d)) <= PREDICATE_RTOL * c
    if phi_double:
        pairs.append((3, 4))
    if psi_double:
        pairs.append((5, 6))
    # The two quadratics share a root iff their resultant vanishes.
    resultant = (d - r) ** 2 + c * c * (1.0 - d) * (1.0 - r)
    scale = (d + r) ** 2 + c * c * (1.0 + d) * (1.0 + r)
    if abs(resultant) <= PREDICATE_RTOL * scale:
        if abs(d - 1.0) <= PREDICATE_RTOL and abs(r - 1.0) <= PREDICATE_RTOL:
            pairs += [(3, 5), (4, 6)]
        else:
            common = (d - r) / (c * (d - 1.0)) if d != 1.0 else None
            if common is None:
                raise AmbiguousMultiplicity("vanishing resultant with d = 1 but r != 1")
            a = 3 if abs(common - lam3) <= abs(common - lam4) else 4
            b = 5 if abs(common - lam5) <= abs(common - lam6) else 6
            pairs.append((a, b))
    return _partition_key(_merge(pairs))


@dataclass(frozen=True)
class TailTerm:
    """One term ``coef * xi**degree * exp(rate * xi)`` of a tail expansion."""

    label: str
    rate: float
    degree: int
    sign_constraint: str


@dataclass(frozen=True)
class AsymptoticTemplate:
    side: str  # "PlusInfinity" or "MinusInfinity"
    terms_phi: tuple
    terms_psi: tuple
    coupling: str = ""

    def dominant(self, component: str) -> TailTerm:
        """Leading term as the tail is approached (slowest decay, secular term preferred)."""
        terms = self.terms_phi if component == "phi" else self.terms_psi
        if self.side == "PlusInfinity":
            return terms[0]
        return min(terms, key=lambda t: (t.rate, -t.degree))


@dataclass
class SpectralReport:
    base_point: BasePoint
    c: float
    eigenvalues: list  # (value, multiplicity), ascending
    stable_dim: int
    unstable_dim: int
    eigvectors: list
    generalized_eigvectors: list  # Jordan chains, eigenvector first
    case_tag: str
    template: AsymptoticTemplate
    tau1: float | None = None
    tau2: float | None = None
    named: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def terms(ts):
            return [
                {"label": t.label, "rate": t.rate, "degree": t.degree, "sign_constraint": t.sign_constraint}
                for t in ts
            ]

        return {
            "base_point": self.base_point.value,
            "c": self.c,
            "eigenvalues": [{"value": float(v), "multiplicity": int(k)} for v, k in self.eigenvalues],
            "stable_dim": self.stable_dim,
            "unstable_dim": self.unstable_dim,
            "eigvectors": [np.asarray(v).tolist() for v in self.eigvectors],
            "generalized_eigvectors": [[np.asarray(v).tolist() for v in ch] for ch in self.generalized_eigvectors],
            "case_tag": self.case_tag,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "named": {k: float(v) for k, v in self.named.items()},
            "template": {
                "side": self.template.side,
                "terms_phi": terms(self.template.terms_phi),
                "terms_psi": terms(self.template.terms_psi),
                "coupling": self.template.coupling,
            },
        }


def _component_terms(lams: dict, fast: int, slow: int, blocks) -> tuple:
    rep = {i: min(b) for b in blocks for i in b}
    if rep[fast] == rep[slow]:
        label = f"lambda{rep[fast]}"
        return (
            TailTerm(label, lams[fast], 0, "gt0_if_partner_zero"),
            TailTerm(label, lams[fast], 1, "ge0"),
        )
    return (
        TailTerm(f"lambda{rep[fast]}", lams[fast], 0, "gt0_if_partner_zero"),
        TailTerm(f"lambda{rep[slow]}", lams[slow], 0, "ge0"),
    )


def classify_minus_infinity(wave: WaveParams) -> SpectralReport:
    """Classify the origin spectrum and build the leading-edge tail template.

    Exact parameter relations (``c = 2``, ``c = 2 sqrt(r d)``, a vanishing resultant of
    the two quadratics) decide the pattern; raw root coincidence is the cross-check. If
    roots coincide to ``COINCIDENCE_RTOL`` where the relations say they differ, the case
    is reported as ambiguous instead of guessed.
    """
    lams = origin_eigenvalues(wave)
    by_root = coincidence_pattern(lams)
    by_param = _predicate_pattern(wave, lams)
    extra = {b for b in by_root if not any(b <= p for p in by_param)}
    if extra:
        raise AmbiguousMultiplicity(
            f"roots {lams} coincide as {sorted(map(sorted, by_root))} but parameter relations give "
            f"{sorted(map(sorted, by_param))}"
        )
    case = _PATTERNS.get(by_param)
    if case is None:
        raise AmbiguousMultiplicity(f"impossible coincidence pattern {sorted(map(sorted, by_param))}")
    blocks = [set(b) for b in by_param] + [{i} for i in (3, 4, 5, 6) if not any(i in b for b in by_param)]
    named = dict(zip((3, 4, 5, 6), lams))
    # Snap every block to one representative value.
    for b in blocks:
        v = named[min(b)]
        for i in b:
            named[i] = v

    template = AsymptoticTemplate(
        "MinusInfinity",
        _component_terms(named, 3, 4, blocks),
        _component_terms(named, 5, 6, blocks),
    )
    mat = linearize(wave, BasePoint.ORIGIN).entries
    eigenvalues, eigvectors, chains = [], [], []
    for b in sorted(blocks, key=lambda b: named[min(b)]):
        lam = named[min(b)]
        eigenvalues.append((lam, len(b)))
        block_chains = generalized_eigenvector_chains(mat, lam, len(b))
        for ch in block_chains:
            eigvectors.append(ch[0])
            if len(ch) > 1:
                chains.append(ch)
    return SpectralReport(
        base_point=BasePoint.ORIGIN,
        c=wave.c,
        eigenvalues=eigenvalues,
        stable_dim=0,
        unstable_dim=4,
        eigvectors=eigvectors,
        generalized_eigvectors=chains,
        case_tag=case.value,
        template=template,
        named={f"lambda{i}": named[i] for i in (3, 4, 5, 6)},
    )


def coexistence_report(wave: WaveParams) -> SpectralReport:
    """Spectrum at the coexistence point and the single-rate template at ``+inf``."""
    spec = coexistence_eigenvalues(wave)
    roots = spec.roots
    vecs = []
    for lam in roots:
        tau = _tau(wave, lam)
        vecs.append(np.array([1.0, lam, tau, tau * lam]))
    term_phi = (TailTerm("lambda2", spec.lambda2, 0, "gt0"),)
    term_psi = (TailTerm("lambda2", spec.lambda2, 0, "gt0"),)
    template = AsymptoticTemplate(
        "PlusInfinity",
        term_phi,
        term_psi,
        coupling=f"psi coefficient = tau2 * phi coefficient, tau2 = {spec.tau2:.12g}",
    )
    return SpectralReport(
        base_point=BasePoint.COEXISTENCE,
        c=wave.c,
        eigenvalues=[(float(v), 1) for v in roots],
        stable_dim=2,
        unstable_dim=2,
        eigvectors=vecs,
        generalized_eigvectors=[],
        case_tag="hyperbolic_2_2",
        template=template,
        tau1=spec.tau1,
        tau2=spec.tau2,
        named={"lambda1": spec.lambda1, "lambda2": spec.lambda2, "mu2": spec.mu2},
    )


def _null_space(mat: np.ndarray, tol: float) -> np.ndarray:
    _, s, vt = np.linalg.svd(mat)
    scale = max(1.0, s[0] if s.size else 1.0)
    rank = int(np.sum(s > tol * scale))
    return vt[rank:].T.conj()


def _orth(mat: np.ndarray, tol: float) -> np.ndarray:
    if mat.size == 0:
        return mat
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0] if s.size else 1.0)]


def generalized_eigenvector_chains(matrix, lam: float, algebraic_multiplicity: int, tol: float = CHAIN_TOL) -> list:
    """Jordan chains of ``matrix`` for eigenvalue ``lam``.

    Each chain ``[v0, v1, ...]`` satisfies ``(M - lam I) v0 = 0`` and
    ``(M - lam I) v_k = v_{k-1}``. Chain tops are picked orthogonal to the kernel of the
    next lower power, longest chains first; every chain is scaled so that its eigenvector
    has unit norm and a positive largest entry.
    """
    M = matrix.entries if isinstance(matrix, LinearizationMatrix) else np.asarray(matrix, dtype=float)
    n = M.shape[0]
    N = M - lam * np.eye(n)
    smin = np.linalg.svd(N, compute_uv=False)[-1]
    if smin > tol * max(1.0, np.linalg.norm(M, 2)):
        raise NotAnEigenvalue(f"{lam} is not an eigenvalue (smallest singular value {smin:.3e})")

    kernels = [np.zeros((n, 0))]
    power = np.eye(n)
    while True:
        power = N @ power
        ker = _null_space(power, tol)
        if ker.shape[1] == kernels[-1].shape[1] or len(kernels) > n:
            break
        kernels.append(ker)
        if ker.shape[1] >= algebraic_multiplicity:
            break
    if kernels[-1].shape[1] != algebraic_multiplicity:
        raise NotAnEigenvalue(
            f"generalized eigenspace of {lam} has dimension {kernels[-1].shape[1]}, expected {algebraic_multiplicity}"
        )

    depth = len(kernels) - 1
    tops: list[tuple[int, np.ndarray]] = []
    for k in range(depth, 0, -1):
        existing = [np.linalg.matrix_power(N, length - k) @ top for length, top in tops if length > k]
        span = np.hstack([kernels[k - 1]] + [e[:, None] for e in existing]) if existing or kernels[k - 1].size else kernels[k - 1]
        q = _orth(span, tol) if span.size else np.zeros((n, 0))
        proj = kernels[k] - q @ (q.T @ kernels[k])
        new = _orth(proj, tol)
        for j in range(new.shape[1]):
            tops.append((k, new[:, j]))

    chains = []
    for length, top in tops:
        chain = [np.linalg.matrix_power(N, length - 1 - i) @ top for i in range(length)]
        head = chain[0]
        scale = np.linalg.norm(head)
        if head[np.argmax(np.abs(head))] < 0:
            scale = -scale
        chains.append([v / scale for v in chain])
    return chains


def format_report(report: SpectralReport) -> str:
    """Fixed-layout text table of a report and its tail template."""
    lines = [
        f"base point : {report.base_point.value}",
        f"speed c    : {report.c:.12g}",
        f"case       : {report.case_tag}",
        f"dims       : stable={report.stable_dim} unstable={report.unstable_dim}",
        "eigenvalue              multiplicity",
    ]
    for v, k in report.eigenvalues:
        lines.append(f"{v:>22.15g}  {k:>12d}")
    if report.tau1 is not None:
        lines.append(f"tau1 = {report.tau1:.15g}   tau2 = {report.tau2:.15g}")
    lines.append(f"template ({report.template.side})")
    lines.append("component  label      rate                    degree  sign")
    for comp, terms in (("phi", report.template.terms_phi), ("psi", report.template.terms_psi)):
        for t in terms:
            lines.append(f"{comp:<10} {t.label:<10} {t.rate:>22.15g}  {t.degree:>6d}  {t.sign_constraint}")
    if report.template.coupling:
        lines.append(f"coupling: {report.template.coupling}")
    return "\n".join(lines)
