"""Command-line front end.

Every command writes one output file (JSON by default) and prints a one-line
summary.  Exit status: 0 on success, 2 when a result is indeterminate, 1 on
any error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bounds import compare_bounds, verify_grid_property
from .caratheodory import CurveDecomposition, decompose_origin
from .cubature import (
    equispaced_rule,
    gauss_legendre_rule,
    polynomial_exactness,
    tchakaloff,
    trig_exactness,
)
from .linprog import HullCertificate
from .suite import report_csv, report_table, run_suite
from .trig import GeodesicBall, Interval, Spectrum, curve_from_spectrum, parse_spectrum, region_from_dict
from .witness import (
    Indeterminate,
    PositivityWitness,
    SignChangeCertificate,
    babenko_threshold,
    ball_positivity,
    interval_positivity,
    length_sweep,
    min_diameter_sign_change,
    sweep_csv,
)

COMMANDS = ("threshold", "witness", "signset", "decompose", "cubature", "bounds", "gridcheck", "suite")
VERIFY_TOL = 1e-7
EXIT_OK, EXIT_ERROR, EXIT_INDETERMINATE = 0, 1, 2


class CliError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Every knob a command may read.  ``None`` means the command's default."""

    spectrum: Optional[str] = None
    n: Optional[int] = None
    p: Optional[int] = None
    tol: float = 5e-3
    grid: Optional[int] = None
    margin: float = 1e-6
    seed: int = 0
    jobs: int = 0  # 0: one worker per available CPU
    out: Optional[str] = None
    format: str = "json"
    verify: bool = False
    timing: bool = False
    start: float = 0.0
    length: Optional[float] = None
    center: Optional[str] = None
    radius: Optional[float] = None
    sweep: Optional[str] = None
    equispaced: Optional[int] = None
    gauss: Optional[int] = None
    tchakaloff: bool = False

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls(**parse_config(text))

    def workers(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    kind = _TYPES[key]
    if raw == "None":
        return None
    if "bool" in kind:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise CliError(f"config key {key!r}: expected a boolean, got {raw!r}")
    try:
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise CliError(f"config key {key!r}: cannot parse {raw!r}") from None
    return raw


def parse_config(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"config line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise CliError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trigzeros", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--spectrum", help='e.g. "1,2,3" or "1,0;0,1;1,1"')
    common.add_argument("--n", type=int, help="torus dimension")
    common.add_argument("--p", type=int, help="prime")
    common.add_argument("--tol", type=float)
    common.add_argument("--grid", type=int, help="grid resolution (meaning depends on the command)")
    common.add_argument("--margin", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, help="worker processes (default: all CPUs)")
    common.add_argument("--out", help="output path (default: <command>.<format>)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--verify", action="store_true", default=None,
                        help="reload the output and re-check it from the file alone")
    common.add_argument("--timing", action="store_true", default=None,
                        help="record wall-clock times in CSV sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("threshold", parents=[common], help="arc-length threshold by bisection")
    w = sub.add_parser("witness", parents=[common], help="positivity witness on an arc or ball")
    w.add_argument("--start", type=float)
    w.add_argument("--length", type=float)
    w.add_argument("--center", help='ball center, e.g. "0.5,0.5"')
    w.add_argument("--radius", type=float)
    w.add_argument("--sweep", help="lengths as start:stop:step (CSV output)")
    sub.add_parser("signset", parents=[common], help="smallest-diameter sign-change set")
    sub.add_parser("decompose", parents=[common], help="origin as a short convex combination")
    c = sub.add_parser("cubature", parents=[common], help="positive integration rules")
    kind = c.add_mutually_exclusive_group(required=False)
    kind.add_argument("--equispaced", type=int, metavar="D")
    kind.add_argument("--gauss", type=int, metavar="M")
    kind.add_argument("--tchakaloff", action="store_true", default=None)
    sub.add_parser("bounds", parents=[common], help="compare zero-distribution radii")
    sub.add_parser("gridcheck", parents=[common], help="check the p-grid covering property")
    sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            values = parse_config(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliError(f"cannot read config: {exc}") from None
    for key in _TYPES:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return ExperimentConfig(**values)


def _spectrum(cfg: ExperimentConfig) -> Spectrum:
    if not cfg.spectrum:
        raise CliError("--spectrum is required")
    S = parse_spectrum(cfg.spectrum)
    if cfg.n is not None and cfg.n != S.n:
        raise CliError(f"--n {cfg.n} does not match the spectrum dimension {S.n}")
    return S


def _require(value, flag):
    if value is None:
        raise CliError(f"{flag} is required")
    return value


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError(f"cannot parse {text!r} as numbers") from None


def _sweep_lengths(text: str) -> list[float]:
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise CliError("--sweep expects start:stop:step") from None
    if step <= 0 or b < a:
        raise CliError("--sweep needs stop >= start and a positive step")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


# --------------------------------------------------------------------------
# commands: each returns (result document, csv text or None, summary, exit code)


def cmd_threshold(cfg):
    S = _spectrum(cfg)
    res = babenko_threshold(S, tol=cfg.tol, grid_resolution=cfg.grid or 2048, margin=cfg.margin,
                            timing=cfg.timing)
    summary = f"L* = {res.length:.4f} in [{res.bracket[0]:.4f}, {res.bracket[1]:.4f}] for S={S}"
    code = EXIT_INDETERMINATE if res.indeterminate else EXIT_OK
    return {"kind": "threshold", **res.to_dict()}, sweep_csv(res.steps), summary, code


def cmd_witness(cfg):
    S = _spectrum(cfg)
    if cfg.sweep:
        if S.n != 1:
            raise CliError("--sweep needs a univariate spectrum")
        rows = length_sweep(S, _sweep_lengths(cfg.sweep), cfg.start, cfg.grid or 2048, cfg.margin,
                            jobs=cfg.workers(), timing=cfg.timing)
        doc = {"kind": "sweep", "start": cfg.start,
               "rows": [{k: v for k, v in asdict(r).items() if k != "wall_ms" or cfg.timing} for r in rows]}
        counts = {v: sum(r.verdict == v for r in rows) for v in ("witness", "infeasible", "indeterminate")}
        summary = f"{len(rows)} lengths: " + ", ".join(f"{k}={v}" for k, v in counts.items())
        code = EXIT_INDETERMINATE if counts["indeterminate"] else EXIT_OK
        return doc, sweep_csv(rows), summary, code
    if cfg.radius is not None or cfg.center is not None:
        center = _floats(cfg.center) if cfg.center else [0.0] * S.n
        region = GeodesicBall(tuple(center), _require(cfg.radius, "--radius"))
        grid = cfg.grid or 64
        res = ball_positivity(S, region, grid, cfg.margin)
    else:
        if S.n != 1:
            raise CliError("arcs need a univariate spectrum; use --center/--radius on the torus")
        region = Interval(cfg.start, _require(cfg.length, "--length"))
        grid = cfg.grid or 2048
        res = interval_positivity(S, region, grid, cfg.margin)
    if isinstance(res, PositivityWitness):
        return res.to_dict(), None, f"witness: positive with min {res.margin:.3g} on {region}", EXIT_OK
    if isinstance(res, Indeterminate):
        return res.to_dict(), None, f"indeterminate: {res.reason}", EXIT_INDETERMINATE
    doc = {"kind": "infeasible", "spectrum": S.to_dict(), "region": region.to_dict(),
           "grid_resolution": grid, "certificate": res.to_dict()}
    return doc, None, f"infeasible: every polynomial changes sign on {region}", EXIT_OK


def cmd_signset(cfg):
    S = _spectrum(cfg)
    res = min_diameter_sign_change(S, tol=cfg.tol, grid_size=cfg.grid or 105)
    summary = f"delta* = {res.delta:.4f} (lower {res.lower:.4f}) for S={S}, {res.cliques_tested} sets tested"
    code = EXIT_INDETERMINATE if res.indeterminate else EXIT_OK
    return {"kind": "signset", **res.to_dict()}, None, summary, code


def cmd_decompose(cfg):
    S = _spectrum(cfg)
    dec = decompose_origin(S, sample_size=cfg.grid or 720)
    doc = {"kind": "decomposition", "spectrum": S.to_dict(), **dec.to_dict()}
    summary = f"{dec.params.size} points, span {dec.span_length:.4f}, residual {dec.residual:.1e}"
    return doc, None, summary, EXIT_OK


def cmd_cubature(cfg):
    if cfg.equispaced is not None:
        rule, spectrum = equispaced_rule(cfg.equispaced), Spectrum.initial(cfg.equispaced)
    elif cfg.gauss is not None:
        rule, spectrum = gauss_legendre_rule(cfg.gauss), None
    elif cfg.tchakaloff:
        spectrum = _spectrum(cfg)
        default = 64 if spectrum.n == 1 else 24
        rule = tchakaloff(spectrum, cfg.grid or max(default, 4 * (2 * len(spectrum) + 1)))
    else:
        raise CliError("choose one of --equispaced D, --gauss M, --tchakaloff")
    doc = {"kind": "cubature", "spectrum": None if spectrum is None else spectrum.to_dict(), **rule.to_dict()}
    summary = f"{len(rule)}-node rule exact on {rule.exact_space}, max residual {rule.max_residual:.1e}"
    return doc, None, summary, EXIT_OK


def cmd_bounds(cfg):
    S = _spectrum(cfg)
    rep = compare_bounds(S, cfg.n or S.n, _require(cfg.p, "--p"))
    radii = {k: getattr(rep, k) for k in ("torus_radius", "kozma_oravecz", "steinerberger")}
    summary = f"winner {rep.winner} = {radii[rep.winner]:.6g} for S={S}, p={rep.p}"
    return {"kind": "bounds", **rep.to_dict()}, rep.to_csv(), summary, EXIT_OK


def cmd_gridcheck(cfg):
    n, p = _require(cfg.n, "--n"), _require(cfg.p, "--p")
    chk = verify_grid_property(n, p)
    doc = {"kind": "gridcheck", "n": n, "p": p, "radius": chk.radius, "passed": chk.passed,
           "max_cover_distance": float(chk.cover_distances.max())}
    summary = f"{'PASS' if chk.passed else 'FAIL'} r={chk.radius:.6f}"
    return doc, None, summary, EXIT_OK if chk.passed else EXIT_ERROR


def cmd_suite(cfg):
    checks = run_suite(seed=cfg.seed, jobs=cfg.workers())
    sys.stdout.write(report_table(checks))
    for c in checks:
        print(f"criterion {c.number}: {c.seconds:.1f} s", file=sys.stderr)
    doc = {"kind": "suite", "seed": cfg.seed, "checks": [c.to_dict() for c in checks]}
    passed = sum(c.passed for c in checks)
    code = EXIT_OK if passed == len(checks) else EXIT_ERROR
    return doc, report_csv(checks), f"{passed}/{len(checks)} criteria passed", code


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# --------------------------------------------------------------------------
# verification from the serialized file alone


def _verify_doc(doc: dict) -> str:
    result = doc["result"]
    kind = result.get("kind")
    if kind == "witness":
        w = PositivityWitness.from_dict(result)
        low = w.min_on_grid(w.verify_resolution)
        if low <= 0:
            raise CliError(f"witness is not positive on its verification grid (min {low:.3g})")
        return f"witness min {low:.3g} > 0"
    if kind == "infeasible":
        S = Spectrum.from_dict(result["spectrum"])
        region = region_from_dict(result["region"])
        pts = region.grid(result["grid_resolution"])
        V = curve_from_spectrum(S, np.asarray(pts).reshape(len(pts), S.n))
        if not HullCertificate.from_dict(result["certificate"]).check(V, VERIFY_TOL):
            raise CliError("hull certificate does not re-validate")
        return "hull certificate re-validated"
    if kind in ("threshold", "signset"):
        S = Spectrum.from_dict(result["spectrum"])
        msgs = []
        if result.get("witness"):
            w = PositivityWitness.from_dict(result["witness"])
            if w.min_on_grid(w.verify_resolution) <= 0:
                raise CliError("lower-bracket witness is not positive")
            msgs.append("witness ok")
        if result.get("certificate"):
            cert = SignChangeCertificate.from_dict(result["certificate"])
            rebuilt = SignChangeCertificate.build(S, cert.support, cert.weights)
            if rebuilt.residual > VERIFY_TOL or abs(cert.weights.sum() - 1) > 1e-9 or cert.weights.min() < 0:
                raise CliError(f"sign-change certificate residual {rebuilt.residual:.3g}")
            msgs.append(f"certificate residual {rebuilt.residual:.1e}, diameter {rebuilt.diameter:.4f}")
        return "; ".join(msgs) or "nothing to verify"
    if kind == "decomposition":
        S = Spectrum.from_dict(result["spectrum"])
        dec = CurveDecomposition.from_dict(result)
        resid = float(np.abs(dec.weights @ curve_from_spectrum(S, dec.params.reshape(-1, 1))).max())
        if resid > VERIFY_TOL or dec.weights.min() < 0 or abs(dec.weights.sum() - 1) > 1e-9:
            raise CliError(f"decomposition residual {resid:.3g}")
        return f"decomposition residual {resid:.1e}"
    if kind == "cubature":
        nodes, weights = np.array(result["nodes"]), np.array(result["weights"])
        if result["spectrum"] is None:
            degree = int(result["exact_space"].split("<=")[1].rstrip("}"))
            report = polynomial_exactness(nodes, weights, degree)
        else:
            report = trig_exactness(Spectrum.from_dict(result["spectrum"]), nodes, weights)
        worst = max(report.values())
        if worst > VERIFY_TOL:
            raise CliError(f"cubature residual {worst:.3g}")
        return f"cubature residual {worst:.1e}"
    if kind == "bounds":
        S = Spectrum.from_dict(result["spectrum"])
        fresh = compare_bounds(S, result["n"], result["p"]).to_dict()
        fresh["kind"] = "bounds"
        if fresh != result:
            raise CliError("recomputed bounds differ from the file")
        return "bounds recomputed identically"
    if kind == "gridcheck":
        chk = verify_grid_property(result["n"], result["p"])
        if chk.passed != result["passed"]:
            raise CliError("grid check verdict differs on recomputation")
        return "grid check recomputed"
    return f"no certificate to verify for {kind}"


# --------------------------------------------------------------------------


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from None


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        cfg = load_config(args)
        doc, table, summary, code = HANDLERS[args.command](cfg)
        wrapped = {"command": args.command, "result": doc}
        out = Path(cfg.out or f"{args.command}.{cfg.format}")
        if cfg.format == "csv":
            if table is None:
                raise CliError(f"{args.command} has no CSV output; use --format json")
            _write(out, table)
        else:
            _write(out, json.dumps(wrapped, indent=2, sort_keys=True) + "\n")
        print(summary)
        if cfg.verify:
            if cfg.format != "json":
                raise CliError("--verify needs JSON output")
            print("verify: " + _verify_doc(json.loads(out.read_text(encoding="utf-8"))))
        return code
    except (CliError, ValueError, RuntimeError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
