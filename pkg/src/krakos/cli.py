"""Command-line entry point.

Each run prints one JSON document (see ``docs/report-schema.json``) on
stdout and a short human summary on stderr. Exit codes: 0 success,
1 internal error, 2 invalid input, 3 optimizer did not converge.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from krakos import __version__
from krakos.bounds import cnot_lower_bound
from krakos.entanglement import Bipartition
from krakos.errors import InvalidOptions, KrakosError
from krakos.fern import FERN, BBox, FERN_BBOX, IfsSystem, fern_stats, write_csv, write_pgm
from krakos.gates import matrix_to_pairs, parse_gate_spec
from krakos.properties import LOCALITY_TOL, OPTIMIZER_TOL, check_chaining, check_locality, check_stability
from krakos.qmat import UnitaryGate
from krakos.report import RunReport, to_dict
from krakos.strength import Measure, Metric, OptimizerOptions, StrengthReport

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 1, 2, 3
DEFAULT_RESIDUAL_THRESHOLD = 1e-3
METRIC_FLAGS = {"frob": "frobenius-raw", "frob-norm": "frobenius-normalized", "spectral": "spectral"}


class ConvergenceFailure(Exception):
    def __init__(self, report: StrengthReport, threshold: float):
        self.report = report
        super().__init__(
            f"optimizer did not converge: residual {report.residual:.3e} exceeds {threshold:.1e}"
        )


def _default_seed() -> int:
    raw = os.environ.get("KRAKOS_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InvalidOptions(f"KRAKOS_SEED must be an integer, got {raw!r}") from None


def _common(p: argparse.ArgumentParser, gate_default: str | None = None) -> None:
    p.add_argument("--gate", default=gate_default, help="gate spec, e.g. CNOT or 'CNOT ⊗ CNOT'")
    p.add_argument("--gate-file", help="file holding a gate spec or inline JSON matrix")
    p.add_argument("--cut", help="comma-separated qubit indices of side A (default: 0)")
    p.add_argument("--metric", choices=sorted(METRIC_FLAGS), default="frob")
    p.add_argument("--phase-opt", action=argparse.BooleanOptionalAction, default=True,
                   help="minimize the metric over a global phase (default on)")
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--max-iterations", type=int, default=2000)
    p.add_argument("--simplex-tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=None, help="default: $KRAKOS_SEED or 0")
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--out", help="also write the JSON report to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="krakos", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"krakos {__version__}")
    parser.add_argument("--config", help="JSON file whose keys map 1:1 onto flags (allowed anywhere in argv)")
    sub = parser.add_subparsers(dest="command", required=True)

    strength = sub.add_parser("strength", help="compute a strength measure")
    strength.add_argument("kind", choices=["kdelta", "kdist"])
    _common(strength, "CNOT")

    check = sub.add_parser("check", help="verify chaining, stability or locality")
    check.add_argument("property", choices=["locality", "chaining", "stability"])
    check.add_argument("--measure", choices=["kdelta", "kdist"], default="kdelta")
    check.add_argument("--samples", type=int, default=100)
    check.add_argument("--qubits", type=int, default=2)
    check.add_argument("--placement", choices=["a", "b", "both"], default="both")
    _common(check, "CNOT")

    bound = sub.add_parser("bound", help="CNOT-count lower bound")
    bound.add_argument("kind", choices=["cnot"])
    bound.add_argument("--measure", choices=["kdelta", "kdist"], default="kdelta")
    _common(bound, "CNOT")

    fern = sub.add_parser("fern", help="chaos-game fern")
    fern.add_argument("--iters", type=int, default=100000)
    fern.add_argument("--burn-in", type=int, default=100)
    fern.add_argument("--width", type=int, default=400)
    fern.add_argument("--height", type=int, default=800)
    fern.add_argument("--bbox", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    fern.add_argument("--ifs", help="JSON file describing a custom IFS")
    fern.add_argument("--seed", type=int, default=None)
    fern.add_argument("--out", help="PGM output path")
    fern.add_argument("--csv", help="CSV output path")

    gate = sub.add_parser("gate", help="inspect a gate")
    gate.add_argument("kind", choices=["show"])
    gate.add_argument("spec", nargs="?")
    gate.add_argument("--gate")
    gate.add_argument("--gate-file")
    return parser


def _config_tokens(path: str) -> list[str]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidOptions(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidOptions("config file must hold a JSON object")
    tokens: list[str] = []
    for key, value in doc.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            tokens.append(flag if value else "--no-" + flag[2:])
        elif isinstance(value, list):
            tokens.append(flag)
            tokens.extend(str(v) for v in value)
        else:
            tokens.extend([flag, str(value)])
    return tokens


def _split_config(argv: list[str]) -> tuple[str | None, list[str]]:
    """Remove ``--config PATH`` (accepted anywhere in argv) and return it."""
    path, rest = None, []
    it = iter(argv)
    for a in it:
        if a == "--config":
            path = next(it, None)
            if path is None:
                raise InvalidOptions("--config needs a file path")
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
        else:
            rest.append(a)
    return path, rest


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    config, rest = _split_config(argv)
    args = parser.parse_args(rest)
    if config:
        # config flags go right after the subcommand so explicit flags win
        at = rest.index(args.command) + 1
        args = parser.parse_args(rest[:at] + _config_tokens(config) + rest[at:])
    return args


def _gate(args) -> UnitaryGate:
    if getattr(args, "gate_file", None):
        try:
            text = Path(args.gate_file).read_text()
        except OSError as exc:
            raise InvalidOptions(f"cannot read gate file: {exc}") from None
        return parse_gate_spec(text)
    spec = getattr(args, "spec", None) or args.gate
    if spec is None:
        raise InvalidOptions("no gate given (use --gate or --gate-file)")
    return parse_gate_spec(spec)


def _cut(args, num_qubits: int) -> Bipartition:
    if not args.cut:
        return Bipartition.default(num_qubits)
    try:
        side = [int(t) for t in args.cut.split(",") if t.strip()]
    except ValueError:
        raise InvalidOptions(f"--cut must be comma-separated integers, got {args.cut!r}") from None
    return Bipartition(num_qubits, side)


def _measure(kind: str, args) -> Measure:
    return Measure(kind, Metric(METRIC_FLAGS[args.metric], args.phase_opt))


def _opts(args, seed: int) -> OptimizerOptions:
    return OptimizerOptions(args.starts, args.max_iterations, args.simplex_tol, seed)


def _check_convergence(report: StrengthReport, args) -> None:
    threshold = args.tolerance if args.tolerance is not None else DEFAULT_RESIDUAL_THRESHOLD
    if not report.converged and report.residual > threshold:
        raise ConvergenceFailure(report, threshold)


def run(args) -> tuple[dict, str, int | None]:
    """Execute a parsed command; returns (payload, summary, seed)."""
    seed = None
    if args.command != "gate":
        seed = args.seed if args.seed is not None else _default_seed()

    if args.command == "strength":
        u = _gate(args)
        measure = _measure(args.kind, args)
        cut = _cut(args, u.num_qubits) if args.kind == "kdelta" else None
        report = measure.evaluate(u, _opts(args, seed), cut)
        _check_convergence(report, args)
        summary = f"{report.measure} = {report.value:.6f} ({report.direction}, {report.starts_run}/{report.starts} starts)"
        return to_dict(report), summary, seed

    if args.command == "check":
        measure = _measure(args.measure, args)
        opts = _opts(args, seed)
        if args.property == "locality":
            tol = args.tolerance if args.tolerance is not None else LOCALITY_TOL
            report = check_locality(measure, args.samples, seed, opts, args.qubits, tol)
        elif args.property == "chaining":
            tol = args.tolerance if args.tolerance is not None else OPTIMIZER_TOL
            report = check_chaining(measure, args.samples, seed, tol, opts, args.qubits)
        else:
            tol = args.tolerance if args.tolerance is not None else OPTIMIZER_TOL
            u = _gate(args)
            cut = _cut(args, u.num_qubits)
            report = check_stability(measure, u, args.placement, opts, cut, tol)
        summary = (
            f"{report.property} / {report.measure}: {report.violations} violations in "
            f"{report.samples} samples (worst excess {report.worst_excess:.3e}, tolerance {report.tolerance:g})"
        )
        return to_dict(report), summary, seed

    if args.command == "bound":
        u = _gate(args)
        measure = _measure(args.measure, args)
        cut = _cut(args, u.num_qubits) if args.measure == "kdelta" else None
        bound = cnot_lower_bound(u, cut, measure, _opts(args, seed))
        _check_convergence(bound.strength_used, args)
        summary = f"CNOT count >= {bound.lower_bound} ({'sound' if bound.sound else 'unsound'})"
        if bound.note:
            summary += f"; {bound.note}"
        return to_dict(bound), summary, seed

    if args.command == "fern":
        system = IfsSystem.load(args.ifs) if args.ifs else FERN
        bbox = BBox(*args.bbox) if args.bbox else FERN_BBOX
        stats, points, image = fern_stats(system, args.iters, args.burn_in, seed, args.width, args.height, bbox)
        if args.out:
            write_pgm(args.out, image)
        if args.csv:
            write_csv(args.csv, points)
        summary = (
            f"{stats.points} points, {stats.inside_fraction:.4%} inside bbox, "
            f"max y {stats.y_range[1]:.4f}, map counts {list(stats.map_counts)}"
        )
        return to_dict(stats), summary, seed

    u = _gate(args)
    payload = {"type": "gate", "num_qubits": u.num_qubits, "matrix": matrix_to_pairs(u.matrix)}
    with np.printoptions(precision=4, suppress=True, linewidth=120):
        summary = f"{u.num_qubits}-qubit gate\n{u.matrix}"
    return payload, summary, None


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    try:
        args = parse_args(argv)
        payload, summary, seed = run(args)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INVALID
    except ConvergenceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (KrakosError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    report = RunReport(argv, seed, time.perf_counter() - start, payload)
    text = report.to_json()
    print(text)
    if getattr(args, "out", None) and args.command != "fern":
        Path(args.out).write_text(text + "\n")
    print(summary, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
