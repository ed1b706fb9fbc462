"""Command-line client for the service layer.

Every subcommand builds a request model and either calls the in-process
handler (default) or POSTs it to a running server given via ``--server``.
Exit codes are a stable contract: 0 success, 1 assertion or property failure,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .errors import ChoquetKitError, WindowError
from .korovkin import KOROVKIN_CSV_HEADER
from .service import handlers, schemas

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

WORKERS_ENV = "CHOQUETKIT_WORKERS"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _post(server: str, path: str, request) -> dict:
    import httpx

    response = httpx.post(server.rstrip("/") + path, json=request.model_dump(mode="json"), timeout=600.0)
    if response.status_code == 422:
        detail = response.json()
        raise ChoquetKitError(detail.get("detail", response.text))
    response.raise_for_status()
    return response.json()


def _dispatch(args, path: str, request, handler, response_model):
    if args.server:
        return response_model.model_validate(_post(args.server, path, request))
    return handler(request)


def _load_config(argv: Sequence[str] | None) -> dict:
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return {}
    with open(known.config) as handle:
        config = json.load(handle)
    if not isinstance(config, dict):
        raise ChoquetKitError("config file must hold a JSON object of flag defaults")
    return config


def _setting(args, config: dict, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _workers_default() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_integrate(args, config) -> int:
    req = schemas.IntegrateRequest(
        expression=args.function,
        distortion=_setting(args, config, "distortion", "identity"),
        interval=tuple(_setting(args, config, "interval", (0.0, 1.0))),
        grid_size=int(_setting(args, config, "grid", 1000)),
        level_grid=int(_setting(args, config, "level_grid", 4096)),
    )
    resp = _dispatch(args, "/integrate", req, handlers.run_integrate, schemas.IntegrateResponse)
    fmt = _setting(args, config, "format", "text")
    if fmt == "json":
        _emit(resp.model_dump_json(), args.output)
    elif fmt == "csv":
        _emit(
            "value,oracle,difference\n"
            f"{resp.value!r},{resp.oracle!r},{resp.difference!r}\n",
            args.output,
        )
    else:
        _emit(
            f"value {resp.value!r}\noracle {resp.oracle!r}\ndifference {resp.difference!r}\n",
            args.output,
        )
    return EXIT_OK


def _cmd_operator(args, config) -> int:
    req = schemas.OperatorRequest(
        family=_setting(args, config, "family", "bernstein"),
        expression=args.function,
        distortion=_setting(args, config, "distortion", "identity"),
        degree=int(_setting(args, config, "degree", 10)),
        grid_size=int(_setting(args, config, "grid", 11)),
        window=_setting(args, config, "window", None),
        eval_range=_setting(args, config, "eval_range", None),
        tail_tol=float(_setting(args, config, "tail_tol", 1e-12)),
    )
    resp = _dispatch(args, "/operator", req, handlers.run_operator, schemas.OperatorResponse)
    fmt = _setting(args, config, "format", "csv")
    if fmt == "json":
        _emit(resp.model_dump_json(), args.output)
    else:
        lines = ["x,value"] + [f"{p.x!r},{p.value!r}" for p in resp.points]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _cmd_korovkin(args, config) -> int:
    req = schemas.KorovkinRequest(
        expression=args.function,
        distortion=_setting(args, config, "distortion", "moebius"),
        family=_setting(args, config, "family", "bernstein"),
        c=_setting(args, config, "c", None),
        ns=list(_setting(args, config, "ns", [1, 2, 4, 8, 16, 32, 64])),
        grid_size=int(_setting(args, config, "grid", 51)),
        window=_setting(args, config, "window", None),
        eval_range=_setting(args, config, "eval_range", None),
        omega_grid=int(_setting(args, config, "omega_grid", 1024)),
    )
    resp = _dispatch(args, "/korovkin", req, handlers.run_korovkin, schemas.KorovkinResponse)
    fmt = _setting(args, config, "format", "csv")
    if fmt == "json":
        _emit(resp.model_dump_json(), args.output)
    else:
        lines = [KOROVKIN_CSV_HEADER]
        for r in resp.rows:
            lines.append(
                f"{resp.summary.family},{resp.summary.distortion},{resp.c_used!r},{r.n},"
                f"{r.x!r},{r.fx!r},{r.knfx!r},{r.abs_error!r},{r.delta!r},{r.bound!r},"
                f"{'true' if r.holds else 'false'}"
            )
        csv_text = "\n".join(lines) + "\n"
        summary = json.dumps(
            {**resp.summary.model_dump(), "convergence": resp.convergence.model_dump()}
        )
        if args.output:
            _emit(csv_text, args.output)
            sys.stdout.write(summary + "\n")
        else:
            sys.stdout.write(csv_text)
            sys.stderr.write(summary + "\n")
    return EXIT_OK if resp.all_hold else EXIT_FAILURE


def _cmd_properties(args, config) -> int:
    workers = _setting(args, config, "workers", None)
    req = schemas.PropertiesRequest(
        distortion=_setting(args, config, "distortion", "moebius"),
        seed=int(_setting(args, config, "seed", 0)),
        trials=int(_setting(args, config, "trials", 100)),
        grid_size=int(_setting(args, config, "grid", 256)),
        workers=int(workers) if workers is not None else _workers_default(),
    )
    resp = _dispatch(args, "/properties", req, handlers.run_properties, schemas.PropertiesResponse)
    _emit(resp.model_dump_json(indent=2), args.output)
    return EXIT_OK if resp.failures == 0 else EXIT_FAILURE


def _cmd_capacity(args, config) -> int:
    req = schemas.CapacityRequest(
        distortion=_setting(args, config, "distortion", "moebius"),
        grid_size=int(_setting(args, config, "grid", 10_000)),
        table_points=int(_setting(args, config, "points", 11)),
    )
    resp = _dispatch(args, "/capacity", req, handlers.run_capacity, schemas.CapacityResponse)
    fmt = _setting(args, config, "format", "text")
    if fmt == "json":
        _emit(resp.model_dump_json(), args.output)
        return EXIT_OK
    lines = [f"distortion {resp.distortion}", "x nu dual"]
    for p in resp.points:
        lines.append(f"{p.x:.6f} {p.nu:.12f} {p.nu_dual:.12f}")
    lines.append(f"submodular {'yes' if resp.submodular else 'no'}")
    if resp.submodular_witness:
        lines.append(f"witness {resp.submodular_witness[0]:g} {resp.submodular_witness[1]:g}")
    lines.append("c unbounded" if resp.unbounded else f"c {resp.c!r}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _cmd_serve(args, config) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(
        app,
        host=_setting(args, config, "host", "127.0.0.1"),
        port=int(_setting(args, config, "port", 8000)),
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--output", help="write the primary payload to this path")
    sub.add_argument("--format", choices=["text", "csv", "json"], default=None)
    sub.add_argument("--server", help="base URL of a running service; default is in-process")
    sub.add_argument("--config", help="JSON file of flag defaults (keys = flag names)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choquetkit",
        description="Choquet integration, Kantorovich-Choquet operators, and verification suites.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("integrate", help="Choquet integral of an expression with its oracle")
    p.add_argument("-f", "--function", required=True, help="expression in the variable t")
    p.add_argument(
        "-d", "--distortion", default=None,
        help="identity | power:<a> | moebius | table:<path> (default identity)",
    )
    p.add_argument(
        "-i", "--interval", nargs=2, type=float, default=None, metavar=("A", "B"),
        help="integration interval (default 0 1)",
    )
    p.add_argument("--grid", type=int, default=None, help="sampling cells (default 1000)")
    p.add_argument(
        "--level-grid", dest="level_grid", type=int, default=None,
        help="oracle threshold subdivisions (default 4096)",
    )
    _add_common(p)
    p.set_defaults(run=_cmd_integrate)

    p = subs.add_parser("operator", help="evaluate an operator family on a grid")
    p.add_argument(
        "-F", "--family", choices=["bernstein", "szasz", "baskakov"], default=None,
        help="operator family (default bernstein)",
    )
    p.add_argument("-n", "--degree", type=int, default=None, help="degree (default 10)")
    p.add_argument("-f", "--function", required=True, help="expression in the variable t")
    p.add_argument("-d", "--distortion", default=None, help="per-cell distortion (default identity)")
    p.add_argument("--grid", type=int, default=None, help="number of evaluation points (default 11)")
    p.add_argument(
        "--window", nargs=2, type=float, default=None, metavar=("A", "B"),
        help="domain of the function (default [0,1] bernstein, [0,4] otherwise)",
    )
    p.add_argument(
        "--eval", dest="eval_range", nargs=2, type=float, default=None, metavar=("A", "B"),
        help="evaluation range for x (default: the window)",
    )
    p.add_argument(
        "--tail-tol", dest="tail_tol", type=float, default=None,
        help="truncation tail tolerance (default 1e-12)",
    )
    _add_common(p)
    p.set_defaults(run=_cmd_operator)

    p = subs.add_parser("korovkin", help="quantitative error-bound rows and convergence table")
    p.add_argument("-f", "--function", required=True, help="nonnegative expression in t")
    p.add_argument("-d", "--distortion", default=None, help="capacity distortion (default moebius)")
    p.add_argument(
        "-F", "--family", choices=["bernstein", "szasz", "baskakov"], default=None,
        help="operator family (default bernstein)",
    )
    p.add_argument("-c", type=float, default=None, help="dual-domination constant (default: estimated)")
    p.add_argument("--ns", nargs="+", type=int, default=None, help="degrees (default 1 2 4 .. 64)")
    p.add_argument("--grid", type=int, default=None, help="number of x points (default 51)")
    p.add_argument(
        "--window", nargs=2, type=float, default=None, metavar=("A", "B"),
        help="function domain for the unbounded families (default 0 4)",
    )
    p.add_argument(
        "--eval", dest="eval_range", nargs=2, type=float, default=None, metavar=("A", "B"),
        help="x range (default: window for bernstein, [0, 0.3] otherwise)",
    )
    p.add_argument(
        "--omega-grid", dest="omega_grid", type=int, default=None,
        help="sampling cells for the modulus of continuity (default 1024)",
    )
    _add_common(p)
    p.set_defaults(run=_cmd_korovkin)

    p = subs.add_parser("properties", help="randomized integral + inequality suites")
    p.add_argument("--seed", type=int, default=None, help="suite seed (default 0)")
    p.add_argument("--trials", type=int, default=None, help="trials per suite (default 100)")
    p.add_argument("-d", "--distortion", default=None, help="capacity distortion (default moebius)")
    p.add_argument("--grid", type=int, default=None, help="sampling cells per trial (default 256)")
    p.add_argument("--workers", type=int, default=None, help=f"default from ${WORKERS_ENV} or 1")
    _add_common(p)
    p.set_defaults(run=_cmd_properties)

    p = subs.add_parser("capacity", help="capacity and dual table, submodularity, constant c")
    p.add_argument("-d", "--distortion", default=None, help="distortion spec (default moebius)")
    p.add_argument("--grid", type=int, default=None, help="grid for the c estimate (default 10000)")
    p.add_argument("--points", type=int, default=None, help="display points (default 11)")
    _add_common(p)
    p.set_defaults(run=_cmd_capacity)

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default=None, help="bind host (default 127.0.0.1)")
    p.add_argument("--port", type=int, default=None, help="bind port (default 8000)")
    _add_common(p)
    p.set_defaults(run=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        config = _load_config(argv)
        args = parser.parse_args(argv)
        return args.run(args, config)
    except WindowError as exc:
        sys.stderr.write(f"error: {exc} (required window end: {exc.required_b:g})\n")
        return EXIT_USAGE
    except ChoquetKitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
