"""Command-line front end; a thin client over the service handlers.

Every subcommand builds a request model and dispatches it either in-process
(default) or to a running service instance (`--server URL`).  Reports are
emitted as canonical JSON (byte-identical for identical requests); sweeps
and profiles are CSV with a header row.

Exit codes: 0 all checks passed, 1 an inequality/consistency check failed,
2 invalid input (reported as a machine-readable error object).

A config file (`--config path`) holds `key=value` lines using the long
option names (e.g. `r-max=12`); explicit flags win over file values, and
unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from pydantic import ValidationError

from .errors import ComputationError, InvalidParam
from .radial import Grid, RadialFunction, read_profile_csv
from .reports import SCHEMA_VERSION, csv_text, dumps
from .service.handlers import dispatch

# subcommand -> list of (flag, request_field, argparse type)
_COMMAND_FLAGS: dict[str, list[tuple[str, str, Any]]] = {
    "constants": [("n", "n", float)],
    "deficit": [
        ("n", "n", float),
        ("statement", "statement", str),
        ("seed", "seed", int),
        ("pieces", "pieces", int),
        ("r-max", "r_max", float),
        ("amplitude", "amplitude", float),
    ],
    "extremal": [
        ("n", "n", float),
        ("a", "a", float),
        ("lambda0", "lambda0", float),
        ("nodes", "num_nodes", int),
        ("r-max", "r_max", float),
    ],
    "minimize": [
        ("n", "n", float),
        ("a", "a", float),
        ("r-max", "r_max", float),
        ("nodes", "num_nodes", int),
        ("epsilon-smooth", "epsilon_smooth", float),
        ("constraint-tol", "constraint_tol", float),
        ("grad-tol", "grad_tol", float),
        ("max-iters", "max_iters", int),
        ("penalty-growth", "penalty_growth", float),
        ("init", "init", str),
        ("init-perturbation", "init_perturbation", float),
    ],
    "shoot": [
        ("n", "n", float),
        ("lambda0", "lambda0", float),
        ("r-max", "r_max", float),
        ("nodes", "num_nodes", int),
        ("tolerance", "tolerance", float),
    ],
    "onofri": [
        ("lambdas", "lambdas", str),
        ("seeds", "seeds", str),
        ("max-degree", "max_degree", int),
        ("coeff-bound", "coeff_bound", float),
    ],
    "bliss": [
        ("k", "k", float),
        ("l", "l", float),
        ("x-max", "x_max", float),
        ("samples", "num_samples", int),
        ("seed", "seed", int),
    ],
    "moser": [
        ("n", "n", float),
        ("a", "a", float),
        ("beta", "beta", float),
        ("samples", "num_samples", int),
        ("seed", "seed", int),
        ("pieces", "pieces", int),
        ("r-max", "r_max", float),
    ],
    "sweep": [
        ("quantity", "quantity", str),
        ("n", "n", float),
        ("start", "start", float),
        ("stop", "stop", float),
        ("points", "points", int),
    ],
}

_PROFILE_COMMANDS = {"extremal", "minimize", "shoot"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exphardy",
        description="Numerical verification toolkit for sharp exponential-weight inequalities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", default=None, choices=["json", "csv"])
        p.add_argument("--config", default=None, help="key=value defaults file")
        p.add_argument("--server", default=None, help="base URL of a running service")

    for command, flags in _COMMAND_FLAGS.items():
        p = sub.add_parser(command)
        for flag, _field, typ in flags:
            p.add_argument(f"--{flag}", default=None, type=typ, dest=f"opt_{flag.replace('-', '_')}")
        if command == "deficit":
            p.add_argument("--input", default=None, help="CSV profile (r,u) to evaluate instead of generating")
        if command == "sweep":
            p.add_argument("--linear", action="store_true", help="linear spacing (default: logarithmic)")
        if command in _PROFILE_COMMANDS:
            p.add_argument(
                "--emit-profile",
                nargs="?",
                const="-",
                default=None,
                help="emit the function profile as CSV (to PATH, or stdout if no path)",
            )
        add_common(p)

    p = sub.add_parser("verify")
    p.add_argument("--all", action="store_true", help="run every check suite")
    p.add_argument("--check", action="append", default=None, help="run one named check (repeatable)")
    add_common(p)

    p = sub.add_parser("serve")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", default=8711, type=int)
    return parser


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidParam(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _parse_int_list(text: str) -> list[int]:
    """Comma list ('1,2,3') or half-open range ('0:100')."""
    text = text.strip()
    if ":" in text:
        lo, _, hi = text.partition(":")
        return list(range(int(lo), int(hi)))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _collect_params(args: argparse.Namespace, command: str) -> dict:
    flags = _COMMAND_FLAGS[command]
    by_flag = {flag: (field, typ) for flag, field, typ in flags}

    params: dict[str, Any] = {}
    if args.config:
        for key, raw in _load_config(args.config).items():
            if key not in by_flag:
                raise InvalidParam(f"unknown config key {key!r} for command {command!r}")
            field, typ = by_flag[key]
            params[field] = raw  # pydantic coerces strings

    for flag, field, _typ in flags:
        value = getattr(args, f"opt_{flag.replace('-', '_')}")
        if value is not None:
            params[field] = value

    if command == "onofri":
        for field in ("lambdas", "seeds"):
            if field in params and isinstance(params[field], str):
                parse = _parse_float_list if field == "lambdas" else _parse_int_list
                params[field] = parse(params[field])
    if command == "sweep" and getattr(args, "linear", False):
        params["log_scale"] = False
    if command == "deficit" and getattr(args, "input", None):
        profile = read_profile_csv(args.input)
        params["nodes"] = profile.grid.nodes.tolist()
        params["values"] = profile.values.tolist()
    if command in _PROFILE_COMMANDS and getattr(args, "emit_profile", None) is not None:
        params["include_profile"] = True
    return params


def _remote_dispatch(server: str, command: str, params: dict) -> dict:
    import httpx

    response = httpx.post(f"{server.rstrip('/')}/{command}", json=params, timeout=600.0)
    payload = response.json()
    if response.status_code != 200:
        message = payload.get("error", {}).get("message", response.text)
        raise InvalidParam(f"server rejected request: {message}")
    return payload


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _payload_to_csv(payload: dict) -> str:
    columns = payload["columns"]
    rows = [[row[c] for c in columns] for row in payload["rows"]]
    return csv_text(columns, rows)


def _profile_to_csv(profile: dict) -> str:
    u = RadialFunction(Grid(profile["r"]), profile["u"])
    from .radial import profile_csv_string

    return profile_csv_string(u)


def _run_command(args: argparse.Namespace) -> int:
    command = args.command
    if command == "verify":
        checks = None if (args.all or not args.check) else args.check
        params: dict[str, Any] = {"checks": checks}
    else:
        params = _collect_params(args, command)

    if args.server:
        payload = _remote_dispatch(args.server, command, params)
    else:
        payload = dispatch(command, params)

    fmt = args.format or ("csv" if command == "sweep" else "json")
    if fmt == "csv" and command != "sweep":
        raise InvalidParam(f"csv output is only defined for sweep, not {command!r}")

    profile_dest = getattr(args, "emit_profile", None)
    profile = payload.pop("profile", None)
    if profile_dest is not None:
        if profile is None:
            raise InvalidParam("no profile in response")
        csv_out = _profile_to_csv(profile)
        if profile_dest == "-":
            sys.stdout.write(csv_out)
        else:
            with open(profile_dest, "w") as handle:
                handle.write(csv_out)

    body = _payload_to_csv(payload) if fmt == "csv" else dumps(payload)
    if not (profile_dest == "-" and args.output is None):
        _emit(body, args.output)
    return 0 if payload.get("passed", True) else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        return _run_command(args)
    except (ComputationError, ValidationError, OSError, ValueError) as exc:
        error = {
            "schema_version": SCHEMA_VERSION,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        sys.stdout.write(dumps(error))
        return 2


if __name__ == "__main__":
    sys.exit(main())
