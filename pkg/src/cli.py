"""
Command-line front end

    cf <eval|classify|transform|probe|bernoulli> [--family NAME | --spec FILE] [--q C]
       [--depth N] [--precision BITS] [--tol T] [--exact] [--format json|csv]
       [--to FORM] [--v RULE --w RULE] [--grid SPEC] [--values K0,K1,...]

Reports go to stdout, logs to stderr. Exit codes: 0 success (any verdict),
2 usage or parse error, 3 degenerate fraction.
"""

import argparse
import asyncio
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import jsonschema

from src.cf_core import CoefficientSource, approximant, approximant_values, convergents
from src.classify import (
    Inconclusive,
    classify_family,
    probe_verdict,
    stern_stolz,
    theorem2_certify,
    theorem5_monitor,
)
from src.limits import general_convergence_probe
from src.numerics import (
    CfError,
    DegenerateFractionError,
    ExactComplex,
    ExtComplex,
    PreconditionError,
    RepeatedValueError,
    WrongFormError,
    ZeroFactorError,
    ZeroPartialNumeratorError,
    format_ext,
    format_scalar,
    parse_complex,
    parse_ext,
)
from src.qcf import QFamily, UNIT_DENOMINATOR, FamilyFormatError, UnknownFamilyError, instantiate, load_family, registry_lookup
from src.qpolynomial import PolynomialSyntaxError
from src.reports import build_report, error_report, render_csv, render_json, validate_report
from src.transforms import bernoulli_cf, even_part, odd_part, to_unit_denominator, to_unit_numerator

logger = logging.getLogger(__name__)

COMMANDS = ("eval", "classify", "transform", "probe", "bernoulli")
TRANSFORMS = ("unit-numerator", "unit-denominator", "even-part", "odd-part", "bernoulli")
FORMATS = ("json", "csv")
MIN_PRECISION_BITS = 64
MIN_MAX_DEPTH = 8

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

TABLE_COLUMNS = ["n", "a", "b", "approximant"]


class UsageError(CfError):
    pass


USAGE_ERRORS = (
    UsageError,
    PolynomialSyntaxError,
    UnknownFamilyError,
    FamilyFormatError,
    PreconditionError,
    WrongFormError,
)
DEGENERATE_ERRORS = (
    DegenerateFractionError,
    ZeroPartialNumeratorError,
    ZeroFactorError,
    RepeatedValueError,
)


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name, str(default))
    try:
        return int(value)
    except ValueError:
        error_msg = f"Configuration error: {name}={value!r} is not an integer"
        logger.error(error_msg)
        raise UsageError(error_msg) from None


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name, str(default))
    try:
        return float(value)
    except ValueError:
        error_msg = f"Configuration error: {name}={value!r} is not a number"
        logger.error(error_msg)
        raise UsageError(error_msg) from None


@dataclass(frozen=True)
class RunConfig:
    """One invocation: command, source and numeric settings (flags override environment)"""

    command: str
    family: Optional[str] = None
    spec: Optional[str] = None
    q: Optional[ExactComplex] = None
    depth: int = 16
    probe_depth: int = 1000
    precision_bits: int = 256
    tol: float = 1e-30
    max_depth: int = 4096
    exact: bool = False
    output_format: str = "json"
    to: Optional[str] = None
    v: str = "1"
    w: str = "2"
    grid: Optional[str] = None
    values: Optional[str] = None
    workers: int = 4

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION_BITS:
            raise UsageError(f"Precision must be at least {MIN_PRECISION_BITS} bits, got {self.precision_bits}")
        if self.depth < 1 or self.probe_depth < 1:
            raise UsageError(f"Depth must be at least 1, got {min(self.depth, self.probe_depth)}")
        if self.max_depth < MIN_MAX_DEPTH:
            raise UsageError(f"Maximum depth must be at least {MIN_MAX_DEPTH}, got {self.max_depth}")
        if not self.tol > 0:
            raise UsageError(f"Tolerance must be positive, got {self.tol}")
        if self.output_format not in FORMATS:
            raise UsageError(f"Unknown format '{self.output_format}', expected one of {FORMATS}")
        if self.workers < 1:
            raise UsageError(f"Worker count must be positive, got {self.workers}")
        if self.family is not None and self.spec is not None:
            raise UsageError("Give either --family or --spec, not both")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        precision = args.precision if args.precision is not None else _env_int("CF_PRECISION_BITS", 256)
        q = None
        if args.q is not None:
            try:
                q = parse_complex(args.q, max(precision, MIN_PRECISION_BITS))
            except ValueError as e:
                raise UsageError(str(e)) from None
        tol = _env_float("CF_TOL", 1e-30)
        if args.tol is not None:
            try:
                tol = float(args.tol)
            except ValueError:
                raise UsageError(f"Cannot parse tolerance '{args.tol}'") from None
        depth = args.depth if args.depth is not None else _env_int("CF_DEPTH", 16)
        return cls(
            command=args.command,
            family=args.family,
            spec=args.spec,
            q=q,
            depth=depth,
            probe_depth=args.depth if args.depth is not None else _env_int("CF_PROBE_DEPTH", 1000),
            precision_bits=precision,
            tol=tol,
            max_depth=_env_int("CF_MAX_DEPTH", 4096),
            exact=args.exact,
            output_format=args.format or os.getenv("CF_FORMAT", "json"),
            to=getattr(args, "to", None),
            v=getattr(args, "v", None) or "1",
            w=getattr(args, "w", None) or "2",
            grid=getattr(args, "grid", None),
            values=getattr(args, "values", None),
            workers=_env_int("CF_WORKERS", 4),
        )

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "command": self.command,
            "source": self.family or self.spec,
            "q": None if self.q is None else format_scalar(self.q),
            "depth": self.probe_depth if self.command == "probe" else self.depth,
            "precision_bits": self.precision_bits,
            "tol": repr(self.tol),
            "max_depth": self.max_depth,
            "exact": self.exact,
            "format": self.output_format,
        }
        if self.command == "transform":
            result["to"] = self.to
        if self.command in ("probe", "classify"):
            result["v"] = self.v
            result["w"] = self.w
        if self.grid is not None:
            result["grid"] = self.grid
        if self.values is not None:
            result["values"] = self.values
        return result


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--family", help="Registered family or rule source (e.g. rogers-ramanujan, K, example2-G)")
    source.add_argument("--spec", help="Family file in the JSON family format")
    common.add_argument("--q", help="Complex literal such as 2, -1/2, 3/2+1i, 0.75")
    common.add_argument("--depth", type=int, help="Number of partial quotients to tabulate or probe")
    common.add_argument("--precision", type=int, help="Working precision in bits (>= 64)")
    common.add_argument("--tol", help="Chordal tolerance for limit estimates")
    common.add_argument("--exact", action="store_true", help="Use exact Gaussian-rational arithmetic")
    common.add_argument("--format", choices=FORMATS, help="Report format")

    parser = _ArgumentParser(prog="cf", description="Continued fraction toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    commands.add_parser("eval", parents=[common], help="Tabulate approximants")
    classify = commands.add_parser("classify", parents=[common], help="Convergence/divergence verdict")
    classify.add_argument("--v", help="First probe rule (constant or 'inf')")
    classify.add_argument("--w", help="Second probe rule (constant or 'inf')")
    classify.add_argument("--grid", help="re0:re1:steps[,im0:im1:steps] or q1;q2;...")
    transform = commands.add_parser("transform", parents=[common], help="Transformed coefficient table")
    transform.add_argument("--to", required=True, choices=TRANSFORMS)
    probe = commands.add_parser("probe", parents=[common], help="General convergence probe")
    probe.add_argument("--v", help="First probe rule (constant or 'inf')")
    probe.add_argument("--w", help="Second probe rule (constant or 'inf')")
    bernoulli = commands.add_parser("bernoulli", parents=[common], help="Fraction with prescribed approximants")
    bernoulli.add_argument("--values", help="Comma-separated values K0,K1,...")
    return parser


def parse_grid(text: str, bits: int) -> List[ExactComplex]:
    """Grid points in deterministic order (real axis outer, imaginary axis inner)"""
    if ";" in text or ":" not in text:
        return [parse_complex(part, bits) for part in text.split(";") if part.strip()]

    def axis(part: str) -> List[Fraction]:
        pieces = part.split(":")
        if len(pieces) != 3:
            raise UsageError(f"Grid axis must be start:end:steps, got '{part}'")
        start = parse_complex(pieces[0], bits).re
        end = parse_complex(pieces[1], bits).re
        try:
            steps = int(pieces[2])
        except ValueError:
            raise UsageError(f"Grid steps must be an integer, got '{pieces[2]}'") from None
        if steps < 1:
            raise UsageError(f"Grid steps must be positive, got {steps}")
        if steps == 1:
            return [start]
        return [start + (end - start) * i / (steps - 1) for i in range(steps)]

    axes = text.split(",")
    if len(axes) > 2:
        raise UsageError(f"Grid has at most a real and an imaginary axis, got '{text}'")
    reals = axis(axes[0])
    imags = axis(axes[1]) if len(axes) == 2 else [Fraction(0)]
    return [ExactComplex(re, im) for re in reals for im in imags]


def _classify_point(family: QFamily, q: ExactComplex, tol: float, precision: int,
                    max_depth: int, exact: bool) -> Dict[str, Any]:
    """Worker body for --grid; failures are reported per point"""
    try:
        verdict = classify_family(family, q, tol, precision, max_depth, exact)
        return {"q": format_scalar(q), "status": "ok", "verdict": verdict.to_dict()}
    except CfError as e:
        return {"q": format_scalar(q), "status": "error", "message": str(e)}


def _table_row(n: int, pq, value) -> Dict[str, Any]:
    return {
        "n": n,
        "a": format_scalar(pq.a),
        "b": format_scalar(pq.b),
        "approximant": format_ext(value),
    }


class CfApplication:
    """Runs one command for a RunConfig and returns (result, CSV columns or None)"""

    def __init__(self, config: RunConfig):
        self.config = config

    # --- sources -------------------------------------------------------------

    def _family_or_source(self):
        config = self.config
        if config.spec is not None:
            return load_family(config.spec)
        if config.family is not None:
            return registry_lookup(config.family)
        raise UsageError("A source is required: give --family or --spec")

    def _q(self) -> ExactComplex:
        if self.config.q is None:
            raise UsageError("This family needs a value for --q")
        if self.config.q.is_zero():
            raise UsageError("q must be nonzero")
        return self.config.q

    def resolve(self, backend: bool = True) -> Tuple[Optional[QFamily], CoefficientSource]:
        """Family (if any) and coefficient source; backend=False keeps the exact source"""
        found = self._family_or_source()
        if isinstance(found, QFamily):
            family = found
            cf = instantiate(family, self._q())
        else:
            family, cf = None, found
        return family, self._backend(cf) if backend else cf

    def _backend(self, cf: CoefficientSource) -> CoefficientSource:
        return cf if self.config.exact else cf.at_precision(self.config.precision_bits)

    def _table(self, cf: CoefficientSource, depth: int) -> List[Dict[str, Any]]:
        depth = cf.available(depth)
        rows = [{"n": 0, "a": None, "b": format_scalar(cf.b0), "approximant": format_ext(ExtComplex(cf.b0))}]
        for state in convergents(cf, depth):
            rows.append(_table_row(state.n, cf.coefficient(state.n), approximant(state)))
        return rows

    # --- commands ------------------------------------------------------------

    def cmd_eval(self) -> Tuple[Dict[str, Any], Optional[List[str]]]:
        _, cf = self.resolve()
        depth = cf.available(self.config.depth)
        rows = []
        for state in convergents(cf, depth):
            row = {"n": state.n, "value": format_ext(approximant(state))}
            if self.config.exact:
                row["A"] = format_scalar(state.A_curr)
                row["B"] = format_scalar(state.B_curr)
            rows.append(row)
        columns = ["n", "value"] + (["A", "B"] if self.config.exact else [])
        return {"source": cf.name, "b0": format_scalar(cf.b0), "rows": rows}, columns

    def cmd_transform(self) -> Tuple[Dict[str, Any], Optional[List[str]]]:
        _, cf = self.resolve()
        target = self.config.to
        depth = self.config.depth
        if target == "unit-numerator":
            transformed = to_unit_numerator(cf)
        elif target == "unit-denominator":
            transformed = to_unit_denominator(cf)
        elif target == "even-part":
            transformed = even_part(cf)
        elif target == "odd-part":
            transformed = odd_part(cf)
        elif target == "bernoulli":
            transformed = bernoulli_cf(approximant_values(cf, cf.available(depth)))
        else:
            raise UsageError(f"Unknown transform '{target}'")
        result = {"source": cf.name, "to": target, "rows": self._table(transformed, depth)}
        return result, TABLE_COLUMNS

    def cmd_bernoulli(self) -> Tuple[Dict[str, Any], Optional[List[str]]]:
        config = self.config
        if config.values is not None:
            try:
                values = [parse_ext(v, config.precision_bits) for v in config.values.split(",")]
            except ValueError as e:
                raise UsageError(str(e)) from None
            source_name = None
        else:
            _, cf = self.resolve()
            values = approximant_values(cf, cf.available(config.depth))
            source_name = cf.name
        if len(values) < 2:
            raise UsageError("The Bernoulli construction needs at least two values")
        built = self._backend(bernoulli_cf(values))
        result = {"source": source_name, "values": [format_ext(v) for v in values],
                  "rows": self._table(built, len(values) - 1)}
        return result, TABLE_COLUMNS

    def cmd_probe(self) -> Tuple[Dict[str, Any], Optional[List[str]]]:
        config = self.config
        _, cf = self.resolve(backend=False)
        report = general_convergence_probe(
            cf, config.v, config.w, config.probe_depth, config.precision_bits, config.tol, config.exact
        )
        return {"source": cf.name, "probe": report.to_dict()}, None

    def cmd_classify(self) -> Tuple[Dict[str, Any], Optional[List[str]]]:
        config = self.config
        found = self._family_or_source()
        if config.grid is not None:
            if not isinstance(found, QFamily):
                raise UsageError("--grid needs a q-family")
            points = parse_grid(config.grid, config.precision_bits)
            grid = asyncio.run(self._classify_grid(found, points))
            return {"source": found.name, "grid": grid}, None

        if not isinstance(found, QFamily):
            report, verdict = probe_verdict(found, config.v, config.w, config.probe_depth,
                                            config.precision_bits, config.tol, config.exact)
            cross_checks = {"theorem2": theorem2_certify(found, config.tol, config.precision_bits,
                                                         config.max_depth, exact=config.exact).to_dict()}
            try:
                monitor = theorem5_monitor(found, tol=config.tol, precision=config.precision_bits,
                                           max_depth=config.max_depth, exact=config.exact)
            except PreconditionError as e:
                monitor = Inconclusive(str(e), "theorem5")
            cross_checks["theorem5"] = monitor.to_dict()
            return {"source": found.name, "verdict": verdict.to_dict(), "probe": report.to_dict(),
                    "cross_checks": cross_checks}, None

        q = self._q()
        verdict = classify_family(found, q, config.tol, config.precision_bits, config.max_depth, config.exact)
        result = {"source": found.name, "q": format_scalar(q), "verdict": verdict.to_dict()}
        if found.form == UNIT_DENOMINATOR and q.abs_sq() > 1:
            cf = instantiate(found, q)
            result["cross_checks"] = {
                "stern_stolz": stern_stolz(cf, tol=config.tol, precision=config.precision_bits,
                                           max_depth=config.max_depth).to_dict()
            }
        return result, None

    async def _classify_grid(self, family: QFamily, points: Sequence[ExactComplex]) -> List[Dict[str, Any]]:
        config = self.config
        logger.info(f"Classifying {family.name} on {len(points)} grid points with {config.workers} workers")
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            tasks = [
                loop.run_in_executor(pool, _classify_point, family, q, config.tol,
                                     config.precision_bits, config.max_depth, config.exact)
                for q in points
            ]
            return list(await asyncio.gather(*tasks))

    def run(self) -> Tuple[Dict[str, Any], Optional[List[str]]]:
        handler = getattr(self, f"cmd_{self.config.command}")
        return handler()


def _render(report: Dict[str, Any], columns: Optional[List[str]], output_format: str) -> str:
    if output_format == "csv":
        if columns is not None:
            return render_csv(report["result"]["rows"], columns)
        logger.warning(f"{report['command']} reports are JSON only; ignoring --format csv")
    return render_json(report)


def run(argv: Optional[Sequence[str]] = None) -> Tuple[int, str]:
    """Execute one invocation and return (exit code, rendered report)"""
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        config = RunConfig.from_args(args)
        logger.info(f"Running {command} with {config.to_dict()}")
        result, columns = CfApplication(config).run()
        report = build_report(command, config.to_dict(), result)
        validate_report(report)
        return EXIT_OK, _render(report, columns, config.output_format)
    except SystemExit as e:
        # --help
        return (e.code if isinstance(e.code, int) else EXIT_OK), ""
    except USAGE_ERRORS as e:
        logger.error(f"{command or 'cf'}: {e}")
        return EXIT_USAGE, render_json(error_report(command, e, EXIT_USAGE))
    except DEGENERATE_ERRORS as e:
        logger.error(f"{command or 'cf'}: degenerate fraction: {e}")
        return EXIT_DEGENERATE, render_json(error_report(command, e, EXIT_DEGENERATE))
    except jsonschema.ValidationError as e:
        logger.error(f"{command}: report failed schema validation: {e.message}")
        return EXIT_INTERNAL, render_json(error_report(command, e, EXIT_INTERNAL))


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run(argv)
    if text:
        print(text)
    return code
