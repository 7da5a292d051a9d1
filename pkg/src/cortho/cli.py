"""Command-line front end.

Exit codes: 0 success or positive verdict, 2 negative mathematical verdict
(the run itself succeeded), 1 operational error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import families, io
from .core import InsufficientTableError, RecurrenceTable, TableError
from .determinacy import CAVEAT, DEFAULT_SCHEDULE, classify_determinacy
from .spectral import ConvergenceError, gauss_measure, verify_orthonormality
from .structure import DEFAULT_TOL, DecompositionError, analyze, decompose

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2

COMMANDS = ("analyze", "decompose", "measure", "verify", "determinacy", "generate")
GRAM_TOL = 1e-9


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    family: str | None = None
    params: dict | None = None
    rows: int | None = None
    N: int = 20
    M: int | None = None
    tol: float | None = None
    width: int | None = None
    output_format: str | None = None
    output_path: str | None = None
    z: complex | None = None
    schedule: tuple[int, ...] = DEFAULT_SCHEDULE
    ratio_threshold: float = 4.0

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.N < 1:
            raise UsageError("N must be at least 1")
        if self.M is not None and self.command == "verify" and self.M > self.N:
            raise UsageError(f"M = {self.M} exceeds N = {self.N}")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tol must be positive")
        if (self.input_path is None) == (self.family is None):
            raise UsageError("give exactly one of an input file or --family")

    def needed_rows(self) -> int:
        if self.rows is not None:
            return self.rows
        if self.command == "determinacy":
            return max(40, self.schedule[-1])
        return max(40, self.N + 1)


def _load(cfg: RunConfig) -> RecurrenceTable:
    if cfg.family is not None:
        return families.make(cfg.family, cfg.needed_rows(), **(cfg.params or {}))
    return io.load_table(cfg.input_path)


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path and cfg.output_path != "-":
        try:
            Path(cfg.output_path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {cfg.output_path}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)


def _failure(exc: DecompositionError) -> dict:
    return io.report("decomposition", {"decomposable": False, "failure": exc.to_dict()})


def _tol(cfg: RunConfig) -> float:
    return DEFAULT_TOL if cfg.tol is None else cfg.tol


def _cmd_analyze(cfg: RunConfig) -> int:
    table = _load(cfg)
    rep = analyze(table, _tol(cfg), cfg.width)
    if cfg.output_format == "text":
        lines = [f"irreducible: {rep.irreducible}",
                 f"band-limited: {rep.is_rr} (width {rep.band.width})"]
        if rep.normality is not None:
            m, n = rep.normality.worst_entry
            lines.append(f"formally normal: {rep.formally_normal} "
                         f"(max residual {rep.normality.max_residual:.17g} at ({m}, {n}))")
        if rep.three_term is not None:
            lines.append(f"three-term: a = {rep.three_term.a}, b = {rep.three_term.b}")
        if rep.rejection_reason:
            lines.append(f"rejected: {rep.rejection_reason['message']}")
        _emit("\n".join(lines) + "\n", cfg)
    else:
        _emit(io.dumps(io.analysis_to_dict(rep)), cfg)
    return EXIT_OK if rep.decomposable else EXIT_NEGATIVE


def _cmd_decompose(cfg: RunConfig) -> int:
    table = _load(cfg)
    try:
        form = decompose(table, _tol(cfg), cfg.width)
    except DecompositionError as exc:
        _emit(io.dumps(_failure(exc)), cfg)
        return EXIT_NEGATIVE
    _emit(io.dumps(io.report("decomposition", {"decomposable": True, "three_term": form})), cfg)
    return EXIT_OK


def _cmd_measure(cfg: RunConfig) -> int:
    table = _load(cfg)
    try:
        form = decompose(table, _tol(cfg), cfg.width)
    except DecompositionError as exc:
        _emit(io.dumps(_failure(exc)), cfg)
        return EXIT_NEGATIVE
    mu = gauss_measure(form, cfg.N)
    if cfg.output_format in (None, "csv"):
        _emit(io.measure_csv(mu), cfg)
    elif cfg.output_format == "json":
        _emit(io.dumps(io.report("measure", {"N": cfg.N, "measure": mu,
                                             "line_residual": mu.line_residual()})), cfg)
    else:
        lines = [f"{x.real:.17g} {x.imag:+.17g}i  {w:.17g}" for x, w in zip(mu.nodes, mu.weights)]
        _emit("\n".join(lines) + "\n", cfg)
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    table = _load(cfg)
    try:
        form = decompose(table, DEFAULT_TOL, cfg.width)
    except DecompositionError as exc:
        _emit(io.dumps(_failure(exc)), cfg)
        return EXIT_NEGATIVE
    M = cfg.N if cfg.M is None else cfg.M
    mu = gauss_measure(form, cfg.N)
    residual = verify_orthonormality(table, mu, M)
    tol = GRAM_TOL if cfg.tol is None else cfg.tol
    ok = residual <= tol
    if cfg.output_format == "text":
        _emit(f"N = {cfg.N}, M = {M}: max |G - I| = {residual:.3g} "
              f"({'ok' if ok else 'exceeds'} tol {tol:g})\n", cfg)
    else:
        _emit(io.dumps(io.report("verify", {"N": cfg.N, "M": M, "max_residual": residual,
                                            "tol": tol, "passed": ok})), cfg)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _cmd_determinacy(cfg: RunConfig) -> int:
    table = _load(cfg)
    try:
        rep = classify_determinacy(table, cfg.z, cfg.schedule, cfg.ratio_threshold,
                                   tol=_tol(cfg))
    except DecompositionError as exc:
        _emit(io.dumps(_failure(exc)), cfg)
        return EXIT_NEGATIVE
    if cfg.output_format == "csv":
        _emit(io.determinacy_csv(rep), cfg)
    elif cfg.output_format == "text":
        _emit(f"{rep.verdict}: {rep.reason}\nnote: {CAVEAT}\n", cfg)
    else:
        _emit(io.dumps(io.report("determinacy", rep.to_dict())), cfg)
    return EXIT_OK


def _cmd_generate(cfg: RunConfig) -> int:
    table = _load(cfg)
    _emit(io.dumps(io.table_to_dict(table)), cfg)
    return EXIT_OK


HANDLERS = {
    "analyze": _cmd_analyze,
    "decompose": _cmd_decompose,
    "measure": _cmd_measure,
    "verify": _cmd_verify,
    "determinacy": _cmd_determinacy,
    "generate": _cmd_generate,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        cfg.validate()
        return HANDLERS[cfg.command](cfg)
    except (UsageError, TableError, InsufficientTableError, ConvergenceError,
            KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="recurrence JSON file ('-' for stdin)")
    common.add_argument("--family", choices=sorted(families.FAMILIES))
    common.add_argument("--rows", type=int, help="rows to generate for --family")
    common.add_argument("--a-arg", type=float, help="argument of the unimodular direction a")
    common.add_argument("--a", dest="a", help="direction a (normalized to modulus 1)")
    common.add_argument("--b", help="line offset b, e.g. 1+2i")
    common.add_argument("--power", type=float, help="exponent for the fast-growth family")
    common.add_argument("--tol", type=float)
    common.add_argument("--width", type=int, help="declared band width")
    common.add_argument("--format", dest="output_format", choices=("json", "csv", "text"))
    common.add_argument("-o", "--output", dest="output_path")

    parser = argparse.ArgumentParser(
        prog="cortho",
        description="Orthonormalizing measures for polynomial recurrences.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="structural verdicts and residuals")
    sub.add_parser("decompose", parents=[common], help="reduce to b + aJ")
    p = sub.add_parser("measure", parents=[common], help="N-point Gauss measure")
    p.add_argument("--N", type=int, default=20)
    p = sub.add_parser("verify", parents=[common], help="Gram residual under the Gauss measure")
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--M", type=int)
    p = sub.add_parser("determinacy", parents=[common], help="uniqueness diagnostic")
    p.add_argument("--z", help="test point (default: unit distance off the line)")
    p.add_argument("--schedule", default=",".join(map(str, DEFAULT_SCHEDULE)))
    p.add_argument("--ratio-threshold", type=float, default=4.0)
    sub.add_parser("generate", parents=[common], help="write a recurrence file for a family")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {}
    if args.a_arg is not None:
        params["a_arg"] = args.a_arg
    if args.a is not None:
        params["a"] = io.parse_complex(args.a)
    if args.b is not None:
        params["b"] = io.parse_complex(args.b)
    if args.power is not None:
        params["power"] = args.power
    z = getattr(args, "z", None)
    schedule = getattr(args, "schedule", None)
    return RunConfig(
        command=args.command, input_path=args.input, family=args.family, params=params,
        rows=args.rows, N=getattr(args, "N", 20), M=getattr(args, "M", None), tol=args.tol,
        width=args.width, output_format=args.output_format, output_path=args.output_path,
        z=None if z is None else io.parse_complex(z),
        schedule=DEFAULT_SCHEDULE if schedule is None
        else tuple(int(x) for x in schedule.split(",")),
        ratio_threshold=getattr(args, "ratio_threshold", 4.0),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
