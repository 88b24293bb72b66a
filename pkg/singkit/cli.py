"""
Command-line entry point: ``python -m singkit <subcommand> [flags]``.

Artifacts and reports go to stdout (or ``--out``), logs go to stderr as JSON
lines. Exit codes: 0 success, 1 verification mismatch, 2 bad input,
3 resource or limit exceeded.
"""

import argparse
import contextvars
import json
import logging
import sys
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel, Field as ModelField

from singkit.core.cache import cached_artifact
from singkit.core.config import settings
from singkit.core.exceptions import (
    EXIT_MISMATCH,
    EXIT_OK,
    InsufficientTermsError,
    InvalidInputError,
    SingkitError,
)
from singkit.core.logging import run_id_var, setup_logging
from singkit.core.metrics import MetricsManager
from singkit.core.schemas import CheckResult, Report
from singkit.schemas.files import dumps, read_model, write_atomic
from singkit.schemas.landau import PointRecord
from singkit.schemas.operator import OperatorFile
from singkit.schemas.series import SeriesFile
from singkit.services import landau, modular, numerics, odefit, seriesgen, sorokin
from singkit.services.exactalg import RATIONALS, Field, prime_pool

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "svg", "pretty")
SERIES_MODELS = ("phiH", "phiK", "phiH1", "phiH2", "sorokin")
GLOBAL_FLAGS = ("threads", "prime_offset", "out", "format", "no_cache", "metrics_file", "log_level")


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

class RunConfig(BaseModel):
    """Everything that determines the bytes of a run's output.

    Thread count, output path, format and logging are left out: they never
    change results.
    """

    subcommand: str
    params: Dict[str, Any] = ModelField(default_factory=dict)
    prime_offset: int
    caching: bool
    phik_prefactor: str
    enable_cyclotomic: bool
    fit_guard: int
    stretch_fits: bool
    version: str


def run_config(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in GLOBAL_FLAGS and k not in ("command", "handler")}
    return RunConfig(
        subcommand=args.command,
        params=params,
        prime_offset=settings.arithmetic.prime_offset,
        caching=settings.enable_caching,
        phik_prefactor=settings.phik_prefactor,
        enable_cyclotomic=settings.enable_cyclotomic,
        fit_guard=settings.fit.guard,
        stretch_fits=settings.fit.enable_stretch_fits,
        version=settings.version,
    )


@contextmanager
def _overrides(args: argparse.Namespace):
    """Apply the per-run flags to the settings singleton and restore it afterwards."""
    saved = (settings.threads, settings.arithmetic.prime_offset, settings.enable_caching, settings.metrics_file)
    try:
        if args.threads is not None:
            if args.threads < 1:
                raise InvalidInputError("--threads must be a positive integer", details={"threads": args.threads})
            settings.threads = args.threads
        if args.prime_offset is not None:
            if not 0 <= args.prime_offset < len(prime_pool()):
                raise InvalidInputError("--prime-offset must index the prime pool",
                                        details={"prime_offset": args.prime_offset, "pool": len(prime_pool())})
            settings.arithmetic.prime_offset = args.prime_offset
        if args.no_cache:
            settings.enable_caching = False
        if args.metrics_file:
            settings.metrics_file = args.metrics_file
        yield
    finally:
        (settings.threads, settings.arithmetic.prime_offset,
         settings.enable_caching, settings.metrics_file) = saved


def parallel_map(fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
    """Run independent tasks on the worker pool; results come back in input order."""
    if settings.threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        futures = [pool.submit(contextvars.copy_context().run, fn, item) for item in items]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# Outcome of a subcommand
# ---------------------------------------------------------------------------

@dataclass
class Outcome:
    data: Any = None
    checks: Optional[List[CheckResult]] = None
    artifact: Optional[BaseModel] = None
    points: Optional[List[numerics.ComplexPoint]] = None
    text: Optional[str] = None


def parse_field(spec: str) -> Field:
    """``rational``, ``prime`` (first prime of the pool at the configured offset) or an explicit prime."""
    if spec == "rational":
        return RATIONALS
    if spec == "prime":
        return Field.mod(prime_pool()[settings.arithmetic.prime_offset])
    try:
        return Field.mod(int(spec))
    except ValueError as exc:
        raise InvalidInputError(f"Unknown field {spec!r}", details={"expected": "rational | prime | <p>"}) from exc


def _require(args: argparse.Namespace, *names: str):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise InvalidInputError(f"{args.command} --model {args.model} needs {', '.join(missing)}")


def _check(name: str, ok: bool, **details) -> CheckResult:
    return CheckResult(check=name, status="pass" if ok else "fail", details=details)


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

@cached_artifact("series", dump=lambda s: s.to_json(), load=seriesgen.TruncatedSeries.from_json)
def generate_series(model: str, terms: int, field: dict, n: Optional[int] = None, k: Optional[int] = None,
                    j: Optional[int] = None, variant: Optional[str] = None,
                    part: str = "rational") -> seriesgen.TruncatedSeries:
    """One exact series; the cache key is model + params + field + order."""
    F = Field.from_json(field)
    if model == "phiH":
        return seriesgen.phiH_series(n, terms, F)
    if model == "phiK":
        return seriesgen.phiK_series(n, k, j, terms, F, variant)
    if model in ("phiH1", "phiH2"):
        return seriesgen.closed_form_series(model, terms, F)
    if model == "sorokin":
        if not F.is_rational:
            raise InvalidInputError("Sorokin series are generated over the rationals only")
        pair = seriesgen.sorokin_series(n, terms)
        return pair.zeta2 if part == "zeta2" else pair.rational
    raise InvalidInputError(f"Unknown series model {model!r}", details={"known": list(SERIES_MODELS)})


def cmd_series(args: argparse.Namespace, config: RunConfig) -> Outcome:
    if args.model in ("phiH", "sorokin"):
        _require(args, "n")
    elif args.model == "phiK":
        _require(args, "n", "k", "j")
    if args.affine:
        _require(args, "n")
    field = parse_field(args.field)
    variant = args.variant or settings.phik_prefactor if args.model == "phiK" else None
    s = generate_series(args.model, args.terms, field.to_json(), n=args.n, k=args.k, j=args.j,
                        variant=variant, part=args.part)
    if args.var != s.variable:
        s = seriesgen.change_variable(s, args.var)
    if args.affine:
        s = seriesgen.phiD_affine(s, args.n)
    document = SeriesFile.from_series(s, config=config.model_dump())
    preview = [field.to_str(c) for c in s.coeffs[:12]]
    return Outcome(data=document.model_dump(mode="json"), artifact=document,
                   text=f"{args.model} {s.variable} order {s.order}: " + ", ".join(preview))


# ---------------------------------------------------------------------------
# fit / apply
# ---------------------------------------------------------------------------

ANSATZ = {"phiH3": odefit.phiH3_profile, "phiH4": odefit.phiH4_profile}


def cmd_fit(args: argparse.Namespace, config: RunConfig) -> Outcome:
    s = read_model(args.series, SeriesFile).to_series()
    if args.field != "rational":
        s = s.over(parse_field(args.field))
    if args.minimal:
        L = odefit.minimal_operator(s, args.max_order, args.max_degree, guard=args.guard)
    else:
        if args.ansatz is None and (args.order is None or args.degree is None):
            raise InvalidInputError("fit needs --minimal, --ansatz or both --order and --degree")
        ansatz = ANSATZ[args.ansatz]() if args.ansatz else None
        order = ansatz.order if ansatz else args.order
        basis = odefit.fit_operators(s, order, args.degree or 0, ansatz=ansatz, guard=args.guard)
        if not basis:
            raise InsufficientTermsError("No operator of the requested shape annihilates the series",
                                         details={"order": order, "terms": s.order})
        L = basis[0]
        for other in basis[1:]:
            L = odefit.gcrd(L, other)
    document = OperatorFile.from_operator(L, config=config.model_dump())
    checks = None
    if args.golden:
        reference = odefit.golden_operator(args.golden)
        if not L.field.is_rational:
            reference = odefit.operator_mod_p(reference, L.field.prime)
        checks = [_check(f"operator:{args.golden}", L == reference, order=L.order, reference_order=reference.order)]
    return Outcome(data=document.model_dump(mode="json"), artifact=document, checks=checks,
                   text=odefit.format_operator(L))


def cmd_apply(args: argparse.Namespace, config: RunConfig) -> Outcome:
    L = read_model(args.operator, OperatorFile).to_operator()
    s = read_model(args.series, SeriesFile).to_series()
    residual = odefit.apply_operator(L, s)
    first = next((i for i, c in enumerate(residual.coeffs) if c), None)
    document = SeriesFile.from_series(residual, config=config.model_dump())
    return Outcome(data=document.model_dump(mode="json"), artifact=document,
                   checks=[_check("residual:zero", first is None, first_nonzero=first, length=residual.order)],
                   text="residual vanishes" if first is None else f"residual nonzero at exponent {first}")


# ---------------------------------------------------------------------------
# landau / pinch / crescent / nickelian / plot
# ---------------------------------------------------------------------------

def _landau_task(emit: str) -> Callable[[int], dict]:
    def task(n: int) -> dict:
        if emit == "report":
            return landau.singularity_report(n)
        factors = landau.singularity_set(n).factors()
        if emit == "s-poly":
            return {"n": n, "s_polys": [str(landau.w_poly_to_s_poly(f)) for f in factors]}
        return {"n": n, "factors": [str(f) for f in factors]}
    return task


def cmd_landau(args: argparse.Namespace, config: RunConfig) -> Outcome:
    results = parallel_map(_landau_task(args.emit), args.n)
    checks = None
    if args.golden:
        diffs = parallel_map(landau.golden_diff, args.n)
        checks = [_check(f"landau:n={d['n']}:{d['mode']}", d["passed"], missing=d["missing"], extra=d["extra"])
                  for d in diffs]
    lines = []
    for r in results:
        items = r.get("factors") or r.get("s_polys") or [e["factor"] for e in r.get("entries", [])]
        lines.append(f"n = {r['n']}: " + "  ".join(str(i) for i in items))
    return Outcome(data=results, checks=checks, text="\n".join(lines))


def cmd_pinch(args: argparse.Namespace, config: RunConfig) -> Outcome:
    factored = landau.cheb_pinch_poly(args.k1, args.k2)
    points = []
    for f, _ in factored.factors:
        points.extend(numerics.polynomial_s_points(f, family="pinch", p1=args.k1, p2=args.k2))
    return Outcome(data={"k1": args.k1, "k2": args.k2, "factored": factored.to_json()},
                   points=points, text=str(factored))


def cmd_crescent(args: argparse.Namespace, config: RunConfig) -> Outcome:
    points = numerics.crescent_points(args.k, args.n_max, args.parity, include_swapped=args.swapped)
    halves = numerics.split_half_planes(points)
    data = {
        "k": args.k,
        "n_max": args.n_max,
        "parity": args.parity,
        "count": len(points),
        "half_planes": {side: len(pts) for side, pts in halves.items()},
        "symmetric": numerics.is_symmetric(points),
    }
    text = ", ".join(f"{side}: {count}" for side, count in data["half_planes"].items())
    return Outcome(data=data, points=points, text=text)


def _nickelian_cloud(n: int) -> List[numerics.ComplexPoint]:
    return [numerics.ComplexPoint(z.real, z.imag).with_tags(n=n, family="nickelian")
            for z in landau.nickelian_points(n)]


def cmd_nickelian(args: argparse.Namespace, config: RunConfig) -> Outcome:
    points = _nickelian_cloud(args.n)
    deviation = max((abs(abs(p.value) - 1) for p in points), default=0.0)
    return Outcome(data={"n": args.n, "count": len(points), "max_circle_deviation": deviation},
                   points=points, text=f"{len(points)} points, max ||s|-1| = {deviation:.3e}")


def cmd_plot(args: argparse.Namespace, config: RunConfig) -> Outcome:
    if args.kind == "crescent":
        points = numerics.crescent_points(args.k, args.n_max, args.parity, include_swapped=args.swapped)
        data = {"kind": "crescent", "count": len(points)}
    elif args.kind == "nickelian":
        points = _nickelian_cloud(args.n_max)
        data = {"kind": "nickelian", "count": len(points)}
    else:
        points = []
        for k in range(args.k_max + 1):
            k1, k2 = (k, k + 1) if k % 2 == 0 else (k + 1, k)
            for f, _ in landau.cheb_pinch_poly(k1, k2).factors:
                points.extend(numerics.polynomial_s_points(f, family="annulus", k=k))
        data = {"kind": "annulus", "count": len(points), "profile": numerics.annulus_profile(args.k_max)}
    return Outcome(data=data, points=points, text=f"{data['kind']}: {len(points)} points")


# ---------------------------------------------------------------------------
# modular / sorokin
# ---------------------------------------------------------------------------

def cmd_modular(args: argparse.Namespace, config: RunConfig) -> Outcome:
    if args.action == "curve":
        return Outcome(checks=modular.curve_checks(include_level4=not args.no_level4))
    if args.action == "fixed":
        return Outcome(checks=modular.fixed_checks(include_cubics=not args.no_cubics))
    if args.action == "heegner":
        return Outcome(checks=modular.heegner_checks())
    if args.action == "nome":
        return Outcome(checks=modular.nome_checks())
    scan = modular.cm_scan(args.n_max, args.n_min)
    return Outcome(data=scan)


def _sorokin_task(args: argparse.Namespace) -> Callable[[int], sorokin.SorokinVerification]:
    def task(n: int) -> sorokin.SorokinVerification:
        return sorokin.sorokin_verify(n, args.terms, control=not args.no_control)
    return task


def cmd_sorokin(args: argparse.Namespace, config: RunConfig) -> Outcome:
    if not args.verify:
        ops = {str(n): sorokin.sorokin_operator(n) for n in args.n}
        return Outcome(data={n: L.to_json() for n, L in ops.items()},
                       text="\n".join(f"n = {n}: {odefit.format_operator(L)}" for n, L in ops.items()))
    checks = []
    for result in parallel_map(_sorokin_task(args), args.n):
        checks.extend(CheckResult(check=f"n={result.n}:{c.check}", status=c.status, details=c.details)
                      for c in result.checks)
    return Outcome(checks=checks)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker pool size (default ISING_SINGKIT_THREADS)")
    common.add_argument("--prime-offset", type=int, default=None, help="index of the first prime of the pool")
    common.add_argument("--out", default=None, help="write the output here (atomically) instead of stdout")
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--no-cache", action="store_true", help="bypass the artifact cache")
    common.add_argument("--metrics-file", default=None, help="Prometheus textfile written at exit")
    common.add_argument("--log-level", default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="singkit", description="Ising-class integral singularity toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", parents=[common], help="generate an exact truncated series")
    p.add_argument("--model", choices=SERIES_MODELS, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--terms", type=int, required=True)
    p.add_argument("--field", default="rational")
    p.add_argument("--variant", choices=seriesgen.PREFACTOR_VARIANTS, default=None)
    p.add_argument("--var", choices=seriesgen.VARIABLES, default="w")
    p.add_argument("--part", choices=("rational", "zeta2"), default="rational")
    p.add_argument("--affine", action="store_true", help="map to the Phi_D normalization")
    p.set_defaults(handler=cmd_series)

    p = sub.add_parser("fit", parents=[common], help="guess an annihilating operator")
    p.add_argument("--series", required=True)
    p.add_argument("--minimal", action="store_true")
    p.add_argument("--max-order", type=int, default=8)
    p.add_argument("--max-degree", type=int, default=40)
    p.add_argument("--order", type=int)
    p.add_argument("--degree", type=int)
    p.add_argument("--ansatz", choices=sorted(ANSATZ))
    p.add_argument("--guard", type=int, default=None)
    p.add_argument("--field", default="rational")
    p.add_argument("--golden", default=None, help="compare with a shipped reference operator")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("apply", parents=[common], help="apply an operator to a series")
    p.add_argument("--operator", required=True)
    p.add_argument("--series", required=True)
    p.set_defaults(handler=cmd_apply)

    p = sub.add_parser("landau", parents=[common], help="Landau singularity sets")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--emit", choices=("factors", "report", "s-poly"), default="factors")
    p.add_argument("--golden", action="store_true", help="diff against the shipped reference lists")
    p.set_defaults(handler=cmd_landau)

    p = sub.add_parser("pinch", parents=[common], help="Chebyshev pinch polynomial")
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.set_defaults(handler=cmd_pinch)

    p = sub.add_parser("crescent", parents=[common], help="crescent point cloud in the s-plane")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--parity", choices=("odd", "even", "all"), default="odd")
    p.add_argument("--swapped", action="store_true")
    p.set_defaults(handler=cmd_crescent)

    p = sub.add_parser("nickelian", parents=[common], help="Nickelian points on the unit circle")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_nickelian)

    p = sub.add_parser("modular", parents=[common], help="modular-curve and CM checks")
    p.add_argument("action", choices=("fixed", "curve", "heegner", "nome", "scan"))
    p.add_argument("--no-level4", action="store_true")
    p.add_argument("--no-cubics", action="store_true")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--n-min", type=int, default=3)
    p.set_defaults(handler=cmd_modular)

    p = sub.add_parser("sorokin", parents=[common], help="Sorokin operators and annihilation checks")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--terms", type=int, default=80)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--no-control", action="store_true")
    p.set_defaults(handler=cmd_sorokin)

    p = sub.add_parser("plot", parents=[common], help="SVG/CSV export of point clouds")
    p.add_argument("--kind", choices=("crescent", "nickelian", "annulus"), required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--n-max", type=int, default=21)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--parity", choices=("odd", "even", "all"), default="odd")
    p.add_argument("--swapped", action="store_true")
    p.set_defaults(handler=cmd_plot)

    return parser


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _jsonable(value: Any) -> Any:
    return json.loads(json.dumps(value, default=str))


def _pretty_checks(checks: Iterable[CheckResult]) -> str:
    return "\n".join(f"{c.status.upper():8} {c.check}" for c in checks)


def render(outcome: Outcome, report: Report, fmt: str) -> str:
    if fmt in ("csv", "svg"):
        if outcome.points is None:
            raise InvalidInputError(f"--format {fmt} needs a point-producing subcommand")
        if fmt == "csv":
            return numerics.points_to_csv(outcome.points)
        return numerics.points_to_svg(outcome.points)
    if fmt == "pretty":
        parts = [outcome.text] if outcome.text else []
        if outcome.checks is not None:
            parts.append(_pretty_checks(outcome.checks))
        if not parts:
            parts.append(dumps(_jsonable(outcome.data)).rstrip("\n"))
        return "\n".join(parts) + "\n"
    return dumps(report.to_dict())


def _emit(text: str, out: Optional[str]):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def run(args: argparse.Namespace, config: RunConfig) -> int:
    metadata = {"config": config.model_dump()}
    fmt = args.format or ("svg" if args.command == "plot" else "json")
    with MetricsManager.timed(f"cli_{args.command}"):
        outcome = args.handler(args, config)

    data = outcome.data
    if outcome.points is not None and isinstance(data, dict):
        data = {**data, "points": [PointRecord.from_point(p).model_dump() for p in outcome.points]}
    if outcome.artifact is not None and args.out and fmt == "json":
        # the artifact file itself is the output; stdout gets a short envelope
        write_atomic(args.out, dumps(outcome.artifact.model_dump(mode="json")))
        data = {"path": args.out}
    if outcome.checks is not None:
        report = Report.from_checks(outcome.checks, metadata=metadata)
        if data is not None:
            report.metadata["result"] = _jsonable(data)
    else:
        report = Report.ok(_jsonable(data), metadata=metadata)

    text = render(outcome, report, fmt)
    _emit(text, None if (outcome.artifact is not None and fmt == "json") else args.out)
    return EXIT_OK if report.success else EXIT_MISMATCH


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or settings.log_level)
    token = run_id_var.set(uuid.uuid4().hex[:12])
    metadata: Dict[str, Any] = {}
    try:
        with _overrides(args):
            config = run_config(args)
            metadata = {"config": config.model_dump()}
            logger.info("Run started", extra={"subcommand": args.command})
            try:
                return run(args, config)
            finally:
                if settings.metrics_file:
                    MetricsManager.export(settings.metrics_file)
    except SingkitError as exc:
        logger.warning(f"{exc.error_code}: {exc.message}", extra={"subcommand": args.command})
        report = Report.fail(exc.message, code=exc.error_code, details=_jsonable(exc.details),
                             metadata=metadata)
        sys.stdout.write(dumps(report.to_dict()))
        return exc.exit_code
    except Exception as exc:
        logger.exception("Unhandled error", extra={"subcommand": args.command})
        report = Report.fail(str(exc) or type(exc).__name__, code="INTERNAL_ERROR", metadata=metadata)
        sys.stdout.write(dumps(report.to_dict()))
        return EXIT_MISMATCH
    finally:
        run_id_var.reset(token)


if __name__ == "__main__":
    sys.exit(main())
