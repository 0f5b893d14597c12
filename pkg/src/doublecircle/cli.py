"""Command-line entry point.

Subcommands::

    doublecircle window   --lambda-min 2.5 --lambda-max 3.6
    doublecircle verify   --lambda 3.2 --alpha 0.618033988749895 --out report.json --csv orbit.csv
    doublecircle theorem2 --lambda 3.2 --g scaled:0.618033988749895
    doublecircle sweep    --lambda-min 3.01 --lambda-max 3.44 --grid 100 --out sweep.csv

Exit codes: 0 all certified, 1 bad configuration, 2 premise failure (no
cycle, no window, or a certificate failed), 3 rational rotation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .circle import GOLDEN
from .errors import AmbiguousCycles, DomainError, NoFixedPoint, NoTwoCycle, WindowNotFound
from .map1d import (
    MapFamily,
    check_doubling_condition,
    doubling_window,
    find_two_cycle,
    find_two_cycles,
    get_family,
)
from .skew import (
    ConstantRotation,
    SkewState,
    SkewSystem,
    VariableRotation,
    orbit,
    write_orbit_csv,
)
from .verify import VerificationReport, verify_system, SCHEMA_VERSION

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PREMISE = 2
EXIT_RATIONAL = 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GSpec:
    """Closed-form rotation g(lam, r): ``const:a``, ``affine:a,b`` (a + b r)
    or ``scaled:a`` (a (1 + r))."""

    kind: str
    coeffs: Tuple[float, ...]

    @classmethod
    def parse(cls, text: str) -> "GSpec":
        kind, _, rest = text.partition(":")
        arity = {"const": 1, "affine": 2, "scaled": 1}
        if kind not in arity or not rest:
            raise ConfigError(f"bad g spec {text!r}; use const:a, affine:a,b or scaled:a")
        try:
            coeffs = tuple(float(c) for c in rest.split(","))
        except ValueError:
            raise ConfigError(f"bad coefficients in g spec {text!r}") from None
        if len(coeffs) != arity[kind] or not all(math.isfinite(c) for c in coeffs):
            raise ConfigError(f"g spec {text!r} needs {arity[kind]} finite coefficient(s)")
        return cls(kind, coeffs)

    def __str__(self):
        return f"{self.kind}:{','.join(repr(c) for c in self.coeffs)}"

    def function(self) -> Callable:
        if self.kind == "const":
            (a,) = self.coeffs
            return lambda lam, r: a + 0.0 * r
        if self.kind == "affine":
            a, b = self.coeffs
            return lambda lam, r: a + b * r
        (a,) = self.coeffs
        return lambda lam, r: a * (1.0 + r)


@dataclass(frozen=True)
class RunConfig:
    family: str = "logistic"
    lam: Optional[float] = None
    lambda_min: Optional[float] = None
    lambda_max: Optional[float] = None
    grid: int = 100
    alpha: float = GOLDEN
    g: Optional[str] = None
    eps: float = 1e-3
    k_max: int = 10**5
    orbit_len: int = 1000
    transient: int = 10**4
    seed: int = 0
    n_samples: int = 512
    tol: float = 1e-9
    delta: float = 1e-6
    n_starts: int = 100
    attraction_tol: float = 1e-6
    min_attraction: float = 0.95
    max_denominator: int = 10**6
    window_tol: float = 1e-6
    out: Optional[str] = None
    csv: Optional[str] = None
    embed: bool = False
    format: str = "text"

    def validate(self) -> "RunConfig":
        for name in ("eps", "tol", "delta", "attraction_tol", "window_tol", "min_attraction"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("grid", "k_max", "orbit_len", "n_samples", "n_starts", "max_denominator"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.transient < 0:
            raise ConfigError("transient must be >= 0")
        if self.format not in ("text", "json"):
            raise ConfigError("format must be text or json")
        for name in ("lam", "lambda_min", "lambda_max", "alpha"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise ConfigError(f"{name} must be finite")
        return self

    def family_obj(self) -> MapFamily:
        try:
            return get_family(self.family)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def lambda_range(self) -> Tuple[float, float]:
        if self.lambda_min is None or self.lambda_max is None:
            raise ConfigError("--lambda-min and --lambda-max are required")
        if not self.lambda_min < self.lambda_max:
            raise ConfigError("need lambda-min < lambda-max")
        return self.lambda_min, self.lambda_max

    def single_lambda(self) -> float:
        if self.lam is None:
            raise ConfigError("--lambda is required")
        return self.lam

    def gspec(self) -> GSpec:
        if self.g is None:
            raise ConfigError("--g is required")
        return GSpec.parse(self.g)


# --- commands --------------------------------------------------------------

@dataclass
class Result:
    code: int
    report: dict
    summary: str
    csv_text: Optional[str] = None


def _fmt(x) -> str:
    return format(float(x), ".17g")


def cmd_window(cfg: RunConfig) -> Result:
    lo, hi = cfg.lambda_range()
    fam = cfg.family_obj()
    base = {"schema_version": SCHEMA_VERSION, "command": "window", "family": fam.name,
            "lambda_min": lo, "lambda_max": hi}
    try:
        win = doubling_window(fam, lo, hi, cfg.window_tol)
    except WindowNotFound as exc:
        return Result(EXIT_PREMISE, dict(base, error=str(exc)), f"window not found: {exc}")
    try:
        cond = check_doubling_condition(fam, win.lambda_c)
        cond_d = dataclasses.asdict(cond)
        cond_d["passed"] = cond.passed
    except NoFixedPoint as exc:
        cond_d = {"passed": False, "error": str(exc)}
    report = dict(base, lambda_c=win.lambda_c, lambda_0=win.lambda_0, condition=cond_d)
    summary = "\n".join([
        f"family     {fam.name}",
        f"lambda_c   {win.lambda_c:.9f}",
        f"lambda_0   {win.lambda_0:.9f}",
        f"f'(x*)+1   {cond_d.get('derivative_gap', float('nan')):.3e}  ok={cond_d.get('derivative_ok')}",
        f"transvers. {cond_d.get('transversality', float('nan')):.6g}  ok={cond_d.get('transversality_ok')}",
        f"nondegen.  {cond_d.get('nondegeneracy', float('nan')):.6g}  ok={cond_d.get('nondegeneracy_ok')}",
    ])
    return Result(EXIT_OK, report, summary)


def _certify(cfg: RunConfig, rotation, command: str, extra: Optional[dict] = None) -> Result:
    lam = cfg.single_lambda()
    fam = cfg.family_obj()
    base = {"schema_version": SCHEMA_VERSION, "command": command, "family": fam.name, "lambda": lam}
    try:
        cyc = find_two_cycle(fam, lam)
    except (NoTwoCycle, AmbiguousCycles) as exc:
        return Result(EXIT_PREMISE, dict(base, error=str(exc), passed=False), f"no usable 2-cycle: {exc}")
    sys_ = SkewSystem(fam, rotation, lam)
    rep = verify_system(
        sys_, cyc,
        n_samples=cfg.n_samples, tol=cfg.tol, delta=cfg.delta, eps=cfg.eps, k_max=cfg.k_max,
        n_starts=cfg.n_starts, transient=cfg.transient, attraction_tol=cfg.attraction_tol,
        min_attraction=cfg.min_attraction, seed=cfg.seed, max_denominator=cfg.max_denominator,
    )
    report = dict(base, **rep.to_dict())
    report["command"] = command
    if extra:
        report.update(extra)
    if rep.rational_rotation is not None:
        code = EXIT_RATIONAL
    elif rep.passed:
        code = EXIT_OK
    else:
        code = EXIT_PREMISE

    csv_text = None
    if cfg.csv:
        states = orbit(sys_, SkewState.at(cyc.r1, 0.0), cfg.orbit_len)
        buf = io.StringIO()
        write_orbit_csv(buf, states, embed=cfg.embed)
        csv_text = buf.getvalue()
    return Result(code, report, _summary(rep, code), csv_text)


def _summary(rep: VerificationReport, code: int) -> str:
    lines = [
        f"lambda {rep.lam!r}: r1 = {rep.r1:.10f}, r2 = {rep.r2:.10f}, multiplier = {rep.multiplier:.6g}",
        f"double-step rotation {rep.rotation['double_step_rotation']!r}",
    ]
    d = rep.to_dict()
    for name in ("disjoint", "swap_forward", "swap_backward", "union_invariant"):
        lines.append(f"  {name:16s} {'PASS' if d[name]['passed'] else 'FAIL'}  margin {d[name]['margin']:.3e}")
    for name in ("f2_gamma1", "f2_gamma2"):
        c = d[name]
        lines.append(f"  {name:16s} {'PASS' if c['passed'] else 'FAIL'}  r-dev {c['r_deviation']:.3e}"
                     f"  theta-dev {c['theta_deviation']:.3e}")
    lines.append(f"  {'f2_swap_literal':16s} {'pass' if d['f2_swap_literal']['passed'] else 'fail'}"
                 f"  margin {d['f2_swap_literal']['margin']:.3e} (informational)")
    if rep.density is None:
        rr = rep.rational_rotation
        lines.append(f"  density          RATIONAL rotation {rr['rotation']!r}, period {rr['period']},"
                     f" distinct points {rr['gamma1_distinct_points']}/{rr['gamma2_distinct_points']}")
    else:
        for name, c in (("density_gamma1", rep.density.gamma1), ("density_gamma2", rep.density.gamma2)):
            lines.append(f"  {name:16s} {'PASS' if c.passed else 'FAIL'}  max_gap {c.max_gap:.3e}"
                         f" < eps {c.eps:g} at k = {c.achieving_k}")
    a = rep.attraction
    lines.append(f"  {'attraction':16s} {'PASS' if rep.attraction_passed else 'FAIL'}  fraction {a.fraction:.3f}")
    lines.append(f"exit {code}")
    return "\n".join(lines)


def cmd_verify(cfg: RunConfig) -> Result:
    return _certify(cfg, ConstantRotation(cfg.alpha, cfg.max_denominator), "verify")


def cmd_theorem2(cfg: RunConfig) -> Result:
    gs = cfg.gspec()
    rotation = VariableRotation(gs.function(), cfg.max_denominator, label=str(gs))
    return _certify(cfg, rotation, "theorem2", {"g": str(gs)})


SWEEP_COLUMNS = ["lambda", "r1", "r2", "multiplier", "margin", "status"]


def sweep_rows(fam: MapFamily, lambdas) -> list:
    rows = []
    for lam in lambdas:
        lam = float(lam)
        cycles = find_two_cycles(fam, lam)
        if not cycles:
            rows.append([lam, None, None, None, None, "no-cycle"])
            continue
        if len(cycles) > 1:
            rows.append([lam, None, None, None, None, "ambiguous"])
            continue
        c = cycles[0]
        rows.append([lam, c.r1, c.r2, c.multiplier, c.r2 - c.r1, "ok" if c.attracting else "unstable"])
    return rows


def cmd_sweep(cfg: RunConfig) -> Result:
    lo, hi = cfg.lambda_range()
    fam = cfg.family_obj()
    lambdas = np.linspace(lo, hi, cfg.grid) if cfg.grid > 1 else np.array([lo])
    rows = sweep_rows(fam, lambdas)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow(["" if v is None else (v if isinstance(v, str) else _fmt(v)) for v in row])
    counts = {}
    for row in rows:
        counts[row[-1]] = counts.get(row[-1], 0) + 1
    report = {"schema_version": SCHEMA_VERSION, "command": "sweep", "family": fam.name,
              "rows": len(rows), "status_counts": counts}
    summary = f"{len(rows)} rows: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))
    return Result(EXIT_OK, report, summary, csv_text=buf.getvalue())


COMMANDS = {
    "window": cmd_window,
    "verify": cmd_verify,
    "theorem2": cmd_theorem2,
    "sweep": cmd_sweep,
}


# --- argument handling -----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


FLAGS = [
    ("--family", str, "family", "map family (logistic)"),
    ("--lambda", float, "lam", "parameter value"),
    ("--lambda-min", float, "lambda_min", "lower end of the parameter range"),
    ("--lambda-max", float, "lambda_max", "upper end of the parameter range"),
    ("--grid", int, "grid", "number of sweep points"),
    ("--alpha", float, "alpha", "constant rotation"),
    ("--g", str, "g", "rotation g(lambda, r): const:a | affine:a,b | scaled:a"),
    ("--eps", float, "eps", "density resolution"),
    ("--k-max", int, "k_max", "max orbit points per circle for density"),
    ("--orbit-len", int, "orbit_len", "states written to the CSV orbit dump"),
    ("--transient", int, "transient", "steps before judging attraction"),
    ("--seed", int, "seed", "seed for random starts"),
    ("--n-samples", int, "n_samples", "samples per circle"),
    ("--tol", float, "tol", "invariance tolerance"),
    ("--delta", float, "delta", "disjointness threshold"),
    ("--n-starts", int, "n_starts", "random starts for attraction"),
    ("--attraction-tol", float, "attraction_tol", "distance counting as converged"),
    ("--min-attraction", float, "min_attraction", "required converged fraction"),
    ("--max-denominator", int, "max_denominator", "rationality resolution"),
    ("--window-tol", float, "window_tol", "bisection tolerance for the window"),
    ("--out", str, "out", "write the JSON report (CSV for sweep) here"),
    ("--csv", str, "csv", "write the orbit dump here"),
    ("--format", str, "format", "stdout format: text or json"),
]


COMMAND_HELP = {
    "window": "locate the parameter range where the 2-cycle exists and attracts",
    "verify": "certify the two circles under a constant rotation",
    "theorem2": "certify the two circles under a rotation g(lambda, r)",
    "sweep": "tabulate the 2-cycle over a parameter grid (CSV)",
}
EXIT_HELP = "exit codes: 0 certified, 1 bad configuration, 2 premise failure, 3 rational rotation"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="doublecircle",
        description="Certify the pair of invariant circles of logistic-type skew products.",
        epilog=EXIT_HELP,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COMMAND_HELP[name], epilog=EXIT_HELP)
        p.add_argument("--config", default=None, help="JSON file of settings; flags override it")
        for flag, typ, dest, help_ in FLAGS:
            p.add_argument(flag, type=typ, dest=dest, default=argparse.SUPPRESS, help=help_)
        p.add_argument("--embed", action="store_true", default=argparse.SUPPRESS,
                       help="add x, y columns to the orbit dump")
    return parser


def load_config(argv: Sequence[str]) -> Tuple[str, RunConfig]:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    path = args.pop("config", None)
    settings = {}
    if path:
        try:
            with open(path) as fh:
                settings = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if "lambda" in settings:
            settings["lam"] = settings.pop("lambda")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(settings) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    settings.update(args)
    try:
        cfg = RunConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return command, cfg.validate()


def run(command: str, cfg: RunConfig) -> Result:
    return COMMANDS[command](cfg)


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        command, cfg = load_config(sys.argv[1:] if argv is None else argv)
        res = run(command, cfg)
    except ConfigError as exc:
        print(f"doublecircle: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if command == "sweep":
        if cfg.out:
            _write(cfg.out, res.csv_text)
            print(res.summary, file=stdout)
        else:
            stdout.write(res.csv_text)
        return res.code

    text = json.dumps(res.report, indent=2) + "\n"
    if cfg.out:
        _write(cfg.out, text)
    if cfg.csv and res.csv_text is not None:
        _write(cfg.csv, res.csv_text)
    stdout.write(text if cfg.format == "json" else res.summary + "\n")
    return res.code


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


if __name__ == "__main__":
    sys.exit(main())
