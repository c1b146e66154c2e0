"""Command-line front end.

Every subcommand builds a :class:`RunConfig` from an optional JSON file plus flags
(flags win), writes its outputs atomically into the output directory together with the
resolved configuration, prints a one-line summary and returns

* 0 when everything it certified passed,
* 1 when a certification failed,
* 2 on usage or configuration errors.

The output directory comes from ``--out``, else the ``LVENTIRE_OUTPUT_DIR`` environment
variable, else the config file, else ``lventire_out``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import front as front_mod
from . import pde, spectral
from .errors import LVError, MissingArtifact, SubminimalSpeed
from .model import ModelParams, classify_regime, coexistence
from .odefree import certify_logistic_envelope, monotone_orbit_theta, solve_diffusion_free
from .supersub import Lattice, build_front_family, build_scalar_family, parse_selector, verify_inequalities

__all__ = ["RunConfig", "run_command", "emit_plot_script", "write_atomic", "main"]

OUTPUT_ENV = "LVENTIRE_OUTPUT_DIR"
DEFAULT_SEED = 20240607
DEFAULT_OUTPUT = "lventire_out"

# Exceptions that mean "the computation ran and a certified property failed".
CERTIFIED_FAILURES = (
    "InequalityViolated",
    "SandwichViolated",
    "NoConvergenceTrend",
    "PropertyFailed",
    "UnboundedGrowth",
    "BoundViolated",
    "EnvelopeViolated",
    "PoorFit",
    "MonotonicityLost",
    "NoConvergence",
)


@dataclass
class RunConfig:
    """Everything a run depends on; persisted verbatim as ``run_config.json``."""

    model: ModelParams = field(default_factory=lambda: ModelParams(0.5, 0.5, 1.0, 1.0))
    c: float | None = None
    selector: tuple = (1, 1, 0)
    front_grid: front_mod.GridSpec = field(default_factory=front_mod.GridSpec)
    lattice: Lattice = field(default_factory=Lattice)
    scheme: pde.SchemeConfig = field(default_factory=pde.SchemeConfig)
    output_dir: str = DEFAULT_OUTPUT
    seed: int = DEFAULT_SEED

    @property
    def speed(self) -> float:
        """``c`` if given, else the minimal speed plus 0.2."""
        return self.c if self.c is not None else spectral.c_min(self.model) + 0.2

    def validate(self) -> "RunConfig":
        self.selector = parse_selector(self.selector)
        if self.c is not None and not math.isfinite(self.c):
            raise ValueError("c must be finite")
        if int(self.seed) != self.seed:
            raise ValueError("seed must be an integer")
        return self

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "c": self.c,
            "selector": "".join(str(s) for s in self.selector),
            "front_grid": asdict(self.front_grid),
            "lattice": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.lattice).items()},
            "scheme": asdict(self.scheme),
            "output_dir": self.output_dir,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls()
        if "model" in data:
            cfg.model = ModelParams.from_dict(data["model"])
        if "c" in data:
            cfg.c = None if data["c"] is None else float(data["c"])
        if "selector" in data:
            cfg.selector = parse_selector(data["selector"])
        if "front_grid" in data:
            cfg.front_grid = replace(cfg.front_grid, **data["front_grid"])
        if "lattice" in data:
            lat = {k: tuple(v) if isinstance(v, list) else v for k, v in data["lattice"].items()}
            cfg.lattice = replace(cfg.lattice, **lat)
        if "scheme" in data:
            cfg.scheme = replace(cfg.scheme, **data["scheme"])
        if "output_dir" in data:
            cfg.output_dir = str(data["output_dir"])
        if "seed" in data:
            cfg.seed = int(data["seed"])
        return cfg


def write_atomic(path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _dump(obj) -> str:
    def default(o):
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if hasattr(o, "value"):
            return o.value
        if hasattr(o, "__dict__"):
            return {k: v for k, v in o.__dict__.items() if not k.startswith("_")}
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


# ---------------------------------------------------------------- plotting


def emit_plot_script(artifacts, kind: str, path=None) -> Path:
    """Write a gnuplot script for ``kind`` in {"front", "tail", "sandwich"}.

    Parameters
    ----------
    artifacts : list of path-like
        ``front``: a front CSV. ``tail``: a front CSV and its ``tails.json``.
        ``sandwich``: a ``margins.csv`` from ``simulate``.
    path : path-like, optional
        Script location; defaults to ``<kind>.gp`` next to the first artifact.
    """
    artifacts = [Path(a) for a in artifacts]
    if not artifacts:
        raise MissingArtifact("no artifacts given")
    for a in artifacts:
        if not a.exists():
            raise MissingArtifact(f"artifact {a} does not exist")
    csvs = [a for a in artifacts if a.suffix == ".csv"]
    jsons = [a for a in artifacts if a.suffix == ".json"]
    lines = ["set datafile separator ','", "set key left top"]
    if kind == "front":
        if not csvs:
            raise MissingArtifact("front plot needs a front CSV")
        src = csvs[0].name
        lines += [
            "set xlabel 'xi'",
            "set ylabel 'density'",
            f"plot '{src}' using 1:2 skip 5 with lines title 'phi', \\",
            f"     '{src}' using 1:3 skip 5 with lines title 'psi'",
        ]
    elif kind == "tail":
        if not csvs or not jsons:
            raise MissingArtifact("tail plot needs a front CSV and tails.json")
        tails = json.loads(jsons[0].read_text())
        plus = tails["plus_infinity"]
        lam2 = plus["predicted_rate"]
        us = tails["limits"]["phi"][1]
        src = csvs[0].name
        lines += [
            "set logscale y",
            "set xlabel 'xi'",
            "set ylabel 'u* - phi'",
            f"lam2 = {lam2!r}",
            f"ustar = {us!r}",
            f"a = {plus.get('amplitude', 1e-3)!r}",
            f"x0 = {plus.get('anchor', 0.0)!r}",
            f"plot '{src}' using 1:(ustar - $2) skip 5 with lines title 'u* - phi', \\",
            "     a * exp(lam2 * (x - x0)) with lines dashtype 2 title sprintf('slope lambda2 = %.5f', lam2)",
        ]
    elif kind == "sandwich":
        if not csvs:
            raise MissingArtifact("sandwich plot needs margins.csv")
        src = csvs[0].name
        lines += [
            "set xlabel 't'",
            "set ylabel 'worst margin'",
            f"plot '{src}' using 1:2 skip 1 with lines title 'margin (>= 0 passes)', 0 with lines dashtype 2 notitle",
        ]
    else:
        raise ValueError("kind must be 'front', 'tail' or 'sandwich'")
    out = Path(path) if path is not None else artifacts[0].parent / f"{kind}.gp"
    write_atomic(out, "\n".join(lines) + "\n")
    return out


# ---------------------------------------------------------------- parser


def _common(p):
    p.add_argument("--config", type=Path, help="JSON config file; flags override its keys")
    p.add_argument("--k1", type=float)
    p.add_argument("--k2", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--c", type=float, help="wave speed (default: minimal speed + 0.2)")
    p.add_argument("--selector", type=str, help="three 0/1 flags, e.g. 110")
    p.add_argument("--out", type=str, help="output directory")
    p.add_argument("--seed", type=int)


def _scheme_flags(p):
    p.add_argument("--nx", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--half-length", type=float, dest="x_half_length")
    p.add_argument("--t-start", type=float, dest="t_start")
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--boundary", choices=["NeumannZero", "DirichletFromPair"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lventire", description="Entire solutions of a diffusive two-species competition system")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify the competition regime")
    _common(p)

    p = sub.add_parser("spectral", help="eigenvalue reports at both equilibria")
    _common(p)
    p.add_argument("--draws", type=int, default=0, help="also run the split property on this many random draws")

    p = sub.add_parser("front", help="solve a traveling front")
    p.add_argument("action", choices=["solve", "scalar"])
    _common(p)
    p.add_argument("--which", choices=["U_eq", "V_eq"], default="U_eq", help="equation for a scalar front")
    p.add_argument("--L", type=float, dest="front_L")
    p.add_argument("--N", type=int, dest="front_N")

    p = sub.add_parser("odefree", help="diffusion-free orbit and logistic envelopes")
    _common(p)
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)

    p = sub.add_parser("supersub", help="check the super/sub-solution inequalities on a lattice")
    p.add_argument("action", nargs="?", choices=["verify"], default="verify")
    _common(p)
    p.add_argument("--x-range", type=str, help="lattice x range, e.g. -40,40")
    p.add_argument("--t-range", type=str, help="lattice t range, e.g. -10,10")
    p.add_argument("--lattice-nx", type=int)
    p.add_argument("--lattice-nt", type=int)
    p.add_argument("--family", choices=["front", "scalar"], default="front")
    p.add_argument("--mode", choices=["substitution", "direct"], default="substitution")
    p.add_argument("--s1", type=float, help="scalar U-front speed")
    p.add_argument("--s2", type=float, help="scalar V-front speed")

    p = sub.add_parser("simulate", help="PDE run with the comparison sandwich check")
    _common(p)
    _scheme_flags(p)
    p.add_argument("--start", choices=["sub", "competitive", "super"], default="sub")
    p.add_argument("--csv-every", type=int, default=0, help="write every k-th snapshot as CSV (0: none)")

    for name, aliases, text in (
        ("entire", [], "backward-start approximation of the entire solution"),
        ("properties", ["check42"], "symmetry, decay, edge and bracket properties of the entire solution"),
    ):
        p = sub.add_parser(name, aliases=aliases, help=text)
        _common(p)
        _scheme_flags(p)
        p.add_argument("--n", type=str, default="5,10,20,40", help="comma-separated start times n (runs start at -n)")
        p.add_argument("--window", type=str, default="-2,10")
        p.add_argument("--start", choices=["sub", "competitive", "super"], default="sub")
        p.add_argument("--no-time-extrapolation", action="store_true")

    p = sub.add_parser("probe", help="derivative bounds along a PDE run")
    _common(p)
    _scheme_flags(p)
    p.add_argument("--start", choices=["sub", "competitive", "super"], default="sub")

    p = sub.add_parser("plot", help="emit a gnuplot script for existing artifacts")
    p.add_argument("kind", choices=["front", "tail", "sandwich"])
    p.add_argument("artifacts", nargs="+", type=Path)
    p.add_argument("--script", type=Path)
    return parser


def resolve_config(args) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
    cfg = RunConfig.from_dict(data)
    m = cfg.model.to_dict()
    for key in ("k1", "k2", "r", "d"):
        if getattr(args, key, None) is not None:
            m[key] = getattr(args, key)
    cfg.model = ModelParams.from_dict(m)
    if getattr(args, "c", None) is not None:
        cfg.c = args.c
    if getattr(args, "selector", None):
        cfg.selector = args.selector
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    scheme = {k: getattr(args, k) for k in ("nx", "dt", "x_half_length", "t_start", "t_end", "boundary") if getattr(args, k, None) is not None}
    if scheme:
        cfg.scheme = replace(cfg.scheme, **scheme)
    grid = {}
    if getattr(args, "front_L", None) is not None:
        grid["L"] = args.front_L
    if getattr(args, "front_N", None) is not None:
        grid["N"] = args.front_N
    if grid:
        cfg.front_grid = replace(cfg.front_grid, **grid)
    lat = {}
    for flag, key in (("x_range", "x_range"), ("t_range", "t_range")):
        if getattr(args, flag, None):
            pair = tuple(float(v) for v in getattr(args, flag).split(","))
            if len(pair) != 2:
                raise ValueError(f"{flag} needs two numbers")
            lat[key] = pair
    for flag, key in (("lattice_nx", "nx"), ("lattice_nt", "nt")):
        if getattr(args, flag, None) is not None:
            lat[key] = getattr(args, flag)
    if lat:
        cfg.lattice = replace(cfg.lattice, **lat)
    if os.environ.get(OUTPUT_ENV):
        cfg.output_dir = os.environ[OUTPUT_ENV]
    if getattr(args, "out", None):
        cfg.output_dir = args.out
    return cfg.validate()


# ---------------------------------------------------------------- commands


def _front(cfg):
    return front_mod.solve_system_front(spectral.WaveParams(cfg.model, cfg.speed), cfg.front_grid)


def _orbit(cfg):
    return solve_diffusion_free(cfg.model, *monotone_orbit_theta(cfg.model, 0.5))


def _pair(cfg):
    return build_front_family(_front(cfg), _orbit(cfg), cfg.selector)


def cmd_classify(cfg, args, out):
    case = classify_regime(cfg.model)
    print(case.tag.value)
    return 0


def cmd_spectral(cfg, args, out):
    wave = spectral.WaveParams(cfg.model, cfg.speed)
    minus = spectral.classify_minus_infinity(wave)
    plus = spectral.coexistence_report(wave)
    payload = {"minus_infinity": minus.to_dict(), "plus_infinity": plus.to_dict()}
    code = 0
    if args.draws:
        rng = np.random.default_rng(cfg.seed)
        failures = []
        for _ in range(args.draws):
            k1, k2 = rng.uniform(0.05, 0.95, 2)
            r, d = rng.uniform(0.2, 5.0, 2)
            m = ModelParams(k1, k2, r, d)
            c = spectral.c_min(m) + rng.uniform(0, 3)
            sp = spectral.coexistence_eigenvalues(spectral.WaveParams(m, c))
            if not (sp.tau1 < 0 < sp.tau2 and sp.lambda2 < sp.mu2 < sp.lambda1):
                failures.append({"model": m.to_dict(), "c": c})
        payload["split_property"] = {"draws": args.draws, "seed": cfg.seed, "failures": failures}
        code = 1 if failures else 0
    write_atomic(out / "spectral.json", _dump(payload))
    print(spectral.format_report(minus))
    print(spectral.format_report(plus))
    print(f"{minus.case_tag}: stable/unstable at origin {minus.stable_dim}/{minus.unstable_dim}, at coexistence {plus.stable_dim}/{plus.unstable_dim}")
    return code


def cmd_front(cfg, args, out):
    if args.action == "scalar":
        stated, actual = front_mod.scalar_min_speed(cfg.model, args.which)
        s = cfg.c if cfg.c is not None else max(stated, actual) + 0.2
        fr = front_mod.solve_scalar_front(cfg.model, args.which, s, cfg.front_grid)
        write_atomic(out / f"front_{args.which}.csv", fr.to_csv())
        print(f"{args.which} front at s = {s:.6g}: residual {fr.residual_norm:.2e}, L = {fr.L:.4g}")
        return 0
    fr = _front(cfg)
    plus = front_mod.fit_tail_rate(fr, "PlusInfinity")
    minus = front_mod.fit_tail_rate(fr, "MinusInfinity")
    consts = front_mod.estimate_tail_constants(fr)
    consts.certify(fr)
    us = fr.limits["phi"][1]
    # Anchor for the guide line in tail plots.
    i = int(np.argmin(np.abs((us - fr.phi) - 1e-4)))
    tails = {
        "plus_infinity": dict(plus.to_dict(), amplitude=float(us - fr.phi[i]), anchor=float(fr.xi[i])),
        "minus_infinity": minus.to_dict(),
        "constants": consts.to_dict(),
        "limits": {k: list(v) for k, v in fr.limits.items()},
        "residual_norm": fr.residual_norm,
        "off_collocation_residual": front_mod.off_collocation_residual(fr),
        "boundary_errors": fr.boundary_errors,
    }
    write_atomic(out / "front.csv", fr.to_csv())
    write_atomic(out / "tails.json", _dump(tails))
    print(f"front c = {fr.c:.6g}: residual {fr.residual_norm:.2e}, +inf rate {plus.fitted_rate:.6g} vs {plus.predicted_rate:.6g}")
    return 0


def cmd_odefree(cfg, args, out):
    if (args.theta1 is None) != (args.theta2 is None):
        raise ValueError("give both --theta1 and --theta2 or neither")
    theta = (args.theta1, args.theta2) if args.theta1 is not None else monotone_orbit_theta(cfg.model, 0.5)
    orbit = solve_diffusion_free(cfg.model, *theta)
    write_atomic(out / "orbit.csv", orbit.to_csv())
    report = certify_logistic_envelope(orbit)
    write_atomic(out / "envelope.json", _dump({"theta": list(theta), "report": report}))
    print(f"orbit from ({theta[0]:.6g}, {theta[1]:.6g}): envelope certified, monotone = {report.monotone}")
    return 0


def cmd_supersub(cfg, args, out):
    if args.family == "scalar":
        fu = front_mod.solve_scalar_front(cfg.model, "U_eq", args.s1 if args.s1 else max(front_mod.scalar_min_speed(cfg.model, "U_eq")) + 0.2, cfg.front_grid)
        fv = front_mod.solve_scalar_front(cfg.model, "V_eq", args.s2 if args.s2 else max(front_mod.scalar_min_speed(cfg.model, "V_eq")) + 0.2, cfg.front_grid)
        pair = build_scalar_family(fu, fv)
    else:
        pair = _pair(cfg)
    cert = verify_inequalities(pair, cfg.lattice, mode=args.mode, raise_on_failure=False)
    write_atomic(out / "certificate.json", cert.to_json() + "\n")
    print(f"{'inequality':<12}{'worst':>14}  sign")
    for name, val, good in (
        ("super u", cert.worst_super_u, cert.worst_super_u >= -cert.slack),
        ("super v", cert.worst_super_v, cert.worst_super_v >= -cert.slack),
        ("sub u", cert.worst_sub_u, cert.worst_sub_u <= cert.slack),
        ("sub v", cert.worst_sub_v, cert.worst_sub_v <= cert.slack),
    ):
        print(f"{name:<12}{val:>14.3e}  {'ok' if good else 'FAIL'}")
    print(f"{cert.family} {cert.selector}: {'pass' if cert.passed else 'FAIL'}, ridge fraction {cert.ridge_fraction:.4f}")
    return 0 if cert.passed else 1


def _state_csv(s) -> str:
    rows = "".join(f"{a!r},{b!r},{c!r}\n" for a, b, c in zip(s.x.tolist(), s.u.tolist(), s.v.tolist()))
    return f"# t={s.time!r}\nx,u,v\n" + rows


def _margins_csv(history) -> str:
    return "t,margin\n" + "".join(f"{t!r},{m!r}\n" for t, m in history)


def cmd_simulate(cfg, args, out):
    pair = _pair(cfg)
    cert = pde.comparison_harness(pair, cfg.model, cfg.scheme, start=args.start, raise_on_failure=False)
    sim = cert.simulation
    if args.csv_every:
        snapdir = out / "snapshots"
        snapdir.mkdir(parents=True, exist_ok=True)
        picked = sim.snapshots[:: args.csv_every]
        for k, s in enumerate(picked):
            write_atomic(snapdir / f"snapshot_{k:05d}.csv", _state_csv(s))
        write_atomic(snapdir / "manifest.json", _dump({"times": [s.time for s in picked], "config": cfg.scheme.to_dict()}))
    payload = cert.to_dict()
    payload.pop("runtime")
    write_atomic(out / "sandwich.json", _dump(payload))
    write_atomic(out / "margins.csv", _margins_csv(cert.margin_history))
    print(f"sandwich {'holds' if cert.passed else 'VIOLATED'}: worst margin {cert.worst_margin:.3e} ({cert.worst_which}) with eps {cert.eps:.3e}")
    return 0 if cert.passed else 1


def _entire(cfg, args):
    n_list = [int(v) for v in args.n.split(",")]
    window = tuple(float(v) for v in args.window.split(","))
    if len(window) != 2:
        raise ValueError("window must be two numbers")
    approx = pde.entire_approximation(
        _pair(cfg),
        cfg.model,
        cfg.scheme,
        n_list=n_list,
        window=window,
        start=args.start,
        time_extrapolation=not args.no_time_extrapolation,
        raise_on_failure=False,
    )
    return approx


def cmd_entire(cfg, args, out):
    approx = _entire(cfg, args)
    ok = pde.gaps_converging(approx.cauchy_gaps)
    n_max = max(approx.n_list)
    snapdir = out / "entire_snapshots"
    snapdir.mkdir(parents=True, exist_ok=True)
    for k, t in enumerate(approx.observation_times):
        s = approx.snapshots[n_max][float(t)]
        write_atomic(snapdir / f"snapshot_{k:05d}.csv", _state_csv(s))
    write_atomic(snapdir / "manifest.json", _dump({"n": n_max, "times": [float(t) for t in approx.observation_times]}))
    last = approx.snapshots[n_max][float(approx.observation_times[-1])]
    write_atomic(out / "entire_final.csv", _state_csv(last))
    write_atomic(out / "gaps.json", _dump(dict(approx.to_dict(), converging=ok)))
    print(f"gaps {', '.join(f'{g:.3e}' for g in approx.cauchy_gaps)}: {'decreasing' if ok else 'NOT decreasing'}")
    return 0 if ok else 1


def cmd_properties(cfg, args, out):
    approx = _entire(cfg, args)
    report = pde.check_entire_properties(approx, cfg.model, raise_on_failure=False)
    write_atomic(out / "properties.json", _dump(report.to_dict()))
    status = ", ".join(f"{k}:{'pass' if v else 'FAIL'}" for k, v in report.passed.items())
    print(f"properties {status}")
    return 0 if all(report.passed.values()) else 1


def cmd_probe(cfg, args, out):
    cert = pde.comparison_harness(_pair(cfg), cfg.model, cfg.scheme, start=args.start, raise_on_failure=False)
    rep = pde.derivative_bound_probe(cert.simulation.snapshots, growth_factor=1.5)
    payload = {"maxima": rep.maxima, "early_max": rep.early_max, "late_max": rep.late_max, "growth_ratio": rep.growth_ratio, "passed": rep.passed}
    write_atomic(out / "probe.json", _dump(payload))
    print(f"derivative norms: {', '.join(f'{k} {v:.3e}' for k, v in rep.maxima.items())}; growth ratio {rep.growth_ratio:.3f}")
    return 0


def cmd_plot(cfg, args, out):
    path = emit_plot_script(args.artifacts, args.kind, args.script)
    print(f"wrote {path}")
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "spectral": cmd_spectral,
    "front": cmd_front,
    "odefree": cmd_odefree,
    "supersub": cmd_supersub,
    "simulate": cmd_simulate,
    "entire": cmd_entire,
    "properties": cmd_properties,
    "check42": cmd_properties,
    "probe": cmd_probe,
    "plot": cmd_plot,
}


def run_command(argv=None) -> int:
    """Parse ``argv``, run the subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        if args.command == "plot":
            return cmd_plot(None, args, None)
        cfg = resolve_config(args)
        out = Path(cfg.output_dir)
        if args.command != "classify":
            out.mkdir(parents=True, exist_ok=True)
            write_atomic(out / "run_config.json", cfg.to_json() + "\n")
        return COMMANDS[args.command](cfg, args, out)
    except (ValueError, SubminimalSpeed, MissingArtifact, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LVError as exc:
        if type(exc).__name__ in CERTIFIED_FAILURES:
            print(f"certified failure: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
