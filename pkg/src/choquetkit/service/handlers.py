"""Pure request -> response functions behind the service endpoints.

The CLI calls these directly for in-process runs; the FastAPI app wires them
to routes.  Input faults surface as ChoquetKitError subclasses, which the app
converts to HTTP 422 and the CLI to exit code 2.
"""

from __future__ import annotations

import numpy as np

from ..capacity import (
    IntervalCapacity,
    check_submodular_distortion,
    estimate_c,
    parse_distortion,
)
from ..choquet import (
    QuadratureConfig,
    choquet_integral,
    choquet_oracle,
    run_integral_properties,
)
from ..errors import PreconditionError
from ..expr import evaluator, parse, sample
from ..inequalities import run_inequality_properties
from ..korovkin import convergence_table, korovkin_bound_report
from ..operators import OperatorSpec, Truncation, baskakov_kc, eval_grid, szasz_kc
from . import schemas

DEFAULT_UNBOUNDED_WINDOW = (0.0, 4.0)


def _family_window(family: str, window) -> tuple[float, float]:
    if window is not None:
        return (float(window[0]), float(window[1]))
    return (0.0, 1.0) if family == "bernstein" else DEFAULT_UNBOUNDED_WINDOW


def run_integrate(req: schemas.IntegrateRequest) -> schemas.IntegrateResponse:
    ast = parse(req.expression)
    distortion = parse_distortion(req.distortion)
    f = sample(ast, req.interval, req.grid_size)
    cap = IntervalCapacity(req.interval, distortion)
    value = choquet_integral(f, cap)
    oracle = choquet_oracle(f, cap, config=QuadratureConfig(level_grid=req.level_grid))
    return schemas.IntegrateResponse(value=value, oracle=oracle, difference=value - oracle)


def run_operator(req: schemas.OperatorRequest) -> schemas.OperatorResponse:
    ast = parse(req.expression)
    fn = evaluator(ast)
    distortion = parse_distortion(req.distortion)
    window = _family_window(req.family, req.window)
    eval_range = req.eval_range or (
        window if req.family == "bernstein" else (window[0], window[1])
    )
    spec = OperatorSpec(
        family=req.family,
        degree=req.degree,
        distortion=distortion,
        truncation=Truncation(tail_tol=req.tail_tol),
        window=window,
        samples_per_cell=req.samples_per_cell,
    )
    xs = np.linspace(eval_range[0], eval_range[1], req.grid_size)
    values = eval_grid(spec, fn, xs)
    truncation = None
    if req.family != "bernstein":
        # Tail report at the last (widest-reaching) evaluation point.
        family_fn = szasz_kc if req.family == "szasz" else baskakov_kc
        _, rep = family_fn(
            fn,
            req.degree,
            distortion,
            float(xs[-1]),
            truncation=spec.truncation,
            window=window,
            samples_per_cell=req.samples_per_cell,
        )
        truncation = schemas.TruncationInfo(**rep.to_dict())
    points = [schemas.OperatorPoint(x=float(x), value=v) for x, v in zip(xs, values)]
    return schemas.OperatorResponse(
        family=req.family,
        degree=req.degree,
        distortion=distortion.spec,
        points=points,
        truncation=truncation,
    )


def run_korovkin(req: schemas.KorovkinRequest) -> schemas.KorovkinResponse:
    ast = parse(req.expression)
    fn = evaluator(ast)
    distortion = parse_distortion(req.distortion)
    window = _family_window(req.family, req.window)
    eval_range = req.eval_range or (
        window if req.family == "bernstein" else (0.0, min(0.3, window[1]))
    )
    if req.c is not None:
        c_used, c_source = float(req.c), "given"
    else:
        est = estimate_c(distortion)
        if est.unbounded:
            raise PreconditionError(
                "the capacity is not dominated by any multiple of its dual "
                "(estimate unbounded); pass an explicit c"
            )
        c_used, c_source = max(1.0, est.c), "estimated"
    xs = np.linspace(eval_range[0], eval_range[1], req.grid_size)
    truncation = Truncation(tail_tol=req.tail_tol)
    report = korovkin_bound_report(
        fn,
        distortion,
        c_used,
        req.ns,
        xs,
        family=req.family,
        window=window,
        grid_size=req.omega_grid,
        samples_per_cell=req.samples_per_cell,
        truncation=truncation,
    )
    table = convergence_table(
        fn,
        req.family,
        distortion,
        req.ns,
        xs,
        window=window,
        samples_per_cell=req.samples_per_cell,
        truncation=truncation,
    )
    return schemas.KorovkinResponse(
        c_used=c_used,
        c_source=c_source,
        summary=schemas.KorovkinSummary(**report.summary()),
        rows=[schemas.KorovkinRow(**r.to_dict()) for r in report.rows],
        convergence=schemas.ConvergenceInfo(
            ns=list(table.ns), sup_errors=list(table.sup_errors), decreasing=table.decreasing
        ),
        all_hold=report.all_hold,
    )


def run_properties(req: schemas.PropertiesRequest) -> schemas.PropertiesResponse:
    distortion = parse_distortion(req.distortion)
    cap = IntervalCapacity((0.0, 1.0), distortion)
    integral = run_integral_properties(
        cap, req.trials, req.seed, grid_size=req.grid_size, workers=req.workers
    )
    inequality = run_inequality_properties(cap, req.trials, req.seed, grid_size=req.grid_size)
    suites = [
        schemas.SuiteReport(**integral.to_dict()),
        schemas.SuiteReport(**inequality.to_dict()),
    ]
    failures = integral.failures + inequality.failures
    return schemas.PropertiesResponse(
        failures=failures,
        all_passed=integral.all_passed and inequality.all_passed,
        suites=suites,
    )


def run_capacity(req: schemas.CapacityRequest) -> schemas.CapacityResponse:
    distortion = parse_distortion(req.distortion)
    dual = distortion.dual()
    xs = np.linspace(0.0, 1.0, req.table_points)
    points = [
        schemas.CapacityPoint(x=float(x), nu=float(distortion(x)), nu_dual=float(dual(x)))
        for x in xs
    ]
    concavity = check_submodular_distortion(distortion, min(req.grid_size, 512))
    est = estimate_c(distortion, grid_size=req.grid_size, cap=req.ratio_cap)
    return schemas.CapacityResponse(
        distortion=distortion.spec,
        points=points,
        submodular=concavity.submodular,
        submodular_witness=concavity.witness,
        c=est.c,
        unbounded=est.unbounded,
        max_ratio=est.max_ratio,
    )
