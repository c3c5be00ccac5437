"""Command-line entry points.

Four subcommands, all thin wrappers over the library:

* ``serve``      host the wire protocol (WebSocket frames on a TCP port)
* ``run``        execute a program headlessly and emit a deterministic report
* ``validate``   print diagnostics for a program
* ``translate``  render a program in a vendor dialect

Exit codes: 0 success, 1 validation found errors, 2 usage or parse
failure, 3 run ended in a collision, 4 run rejected by validation.
"""
from __future__ import annotations

import argparse
import json
import os
import socket
import sys
from pathlib import Path
from typing import Optional

from .dsl import (
    DEFAULT_PROGRAM_NAME,
    InterchangeError,
    ParseError,
    Program,
    parse_program,
    program_from_dict,
    validate_program,
)
from .profiles import DEFAULT_PROFILE, ArmProfile, ProfileFormatError, load_arm_profile
from .protocol import DEFAULT_PORT, PORT_ENV_VAR
from .runner import exit_code_for, render_report, run_program
from .scene import Scene, SceneFormatError, load_scene_file
from .vendor import UnknownDialect, VendorParseError, dialect_ids, parse_vendor, translate_to_vendor

USAGE_ERROR = 2


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except (ParseError, InterchangeError, VendorParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (SceneFormatError, ProfileFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speared")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    serve = sub.add_parser("serve", help="host the messaging service")
    serve.add_argument("--scene", help="scene JSON file (default: empty scene)")
    serve.add_argument("--profile", help="arm profile JSON file (default: built-in desk arm)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument(
        "--port",
        type=int,
        default=None,
        help=f"TCP port (default: ${PORT_ENV_VAR} or {DEFAULT_PORT})",
    )
    serve.add_argument("--tick-rate", type=float, default=50.0, help="simulation ticks per second")
    serve.set_defaults(handler=_cmd_serve)

    run = sub.add_parser("run", help="execute a program headlessly")
    _add_program_argument(run)
    run.add_argument("--scene", help="scene JSON file (default: empty scene)")
    run.add_argument("--profile", help="arm profile JSON file")
    run.add_argument("--dialect", choices=dialect_ids(), help="treat the program as vendor source")
    run.add_argument("--speed", type=float, default=1.0, help="physics speed factor")
    run.add_argument("--dt", type=float, default=0.01, help="simulation step size in seconds")
    run.add_argument("--report", help="write the report JSON to this path")
    run.add_argument("--json", action="store_true", help="print the report JSON on stdout")
    run.set_defaults(handler=_cmd_run)

    validate = sub.add_parser("validate", help="check a program against the arm profile")
    _add_program_argument(validate)
    validate.add_argument("--profile", help="arm profile JSON file")
    validate.add_argument("--dialect", choices=dialect_ids(), help="treat the program as vendor source")
    validate.add_argument("--json", action="store_true", help="print diagnostics as JSON")
    validate.set_defaults(handler=_cmd_validate)

    translate = sub.add_parser("translate", help="render a program in a vendor dialect")
    _add_program_argument(translate)
    translate.add_argument("--dialect", choices=dialect_ids(), required=True)
    translate.add_argument("--json", action="store_true", help="wrap the vendor text in JSON")
    translate.set_defaults(handler=_cmd_translate)

    return parser


def _add_program_argument(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("program_path", nargs="?", help="program file (.rbt DSL or .json interchange)")
    sub.add_argument("--program", dest="program_flag", help="alternative to the positional path")


def _cmd_serve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    import uvicorn

    from .runtime import Runtime
    from .server import create_app

    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    if not 1 <= port <= 65535:
        parser.error(f"port must be in 1..65535, got {port}")
    if args.tick_rate <= 0:
        parser.error("tick rate must be positive")

    scene = load_scene_file(args.scene) if args.scene else Scene()
    profile = _load_profile(args.profile)
    interval = 1.0 / args.tick_rate
    runtime = Runtime(profile, scene, eager=False, step_dt=interval)
    app = create_app(runtime, ticked=True, tick_interval=interval)

    try:
        sock = socket.create_server((args.host, port))
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{port}: {exc}", file=sys.stderr)
        return 1
    print(f"serving on ws://{args.host}:{port}/ws", file=sys.stderr)
    config = uvicorn.Config(app, host=args.host, port=port, log_level="warning")
    uvicorn.Server(config).run(sockets=[sock])
    return 0


def _cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.dt <= 0:
        parser.error("dt must be positive")
    if args.speed <= 0:
        parser.error("speed must be positive")
    program = _load_program(args, parser)
    scene = load_scene_file(args.scene) if args.scene else Scene()
    profile = _load_profile(args.profile)
    report = run_program(profile, scene, program, dt=args.dt, speed_factor=args.speed)
    text = render_report(report)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    if args.json:
        print(text)
    else:
        _print_run_summary(report)
    return exit_code_for(report)


def _cmd_validate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    program = _load_program(args, parser)
    profile = _load_profile(args.profile)
    diagnostics = validate_program(program, profile)
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "command_index": d.command_index,
                        "severity": d.severity,
                        "code": d.code,
                        "message": d.message,
                    }
                    for d in diagnostics
                ],
                sort_keys=True,
            )
        )
    else:
        for d in diagnostics:
            print(f"{d.severity} {d.code} @{d.command_index}: {d.message}")
    return 1 if any(d.severity == "error" for d in diagnostics) else 0


def _cmd_translate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    program = _load_program(args, parser, allow_dialect_input=False)
    text = translate_to_vendor(program, args.dialect)
    if args.json:
        print(json.dumps({"dialect": args.dialect, "text": text}, sort_keys=True))
    else:
        print(text)
    return 0


def _print_run_summary(report: dict) -> None:
    print(f"status: {report['status']}")
    for d in report["diagnostics"]:
        print(f"  {d['severity']} {d['code']} @{d['command_index']}: {d['message']}")
    for event in report["events"]:
        if event["event"] == "collision":
            index = event["command_index"]
            print(f"  collision with {event['object_id']} during command {index}")
    if report["final_state"] is not None:
        print(f"clock: {report['final_state']['clock']:.3f} s, events: {len(report['events'])}")


def _load_profile(path: Optional[str]) -> ArmProfile:
    return load_arm_profile(path) if path else DEFAULT_PROFILE


def _load_program(
    args: argparse.Namespace,
    parser: argparse.ArgumentParser,
    allow_dialect_input: bool = True,
) -> Program:
    path_text = args.program_flag or args.program_path
    if not path_text:
        parser.error("a program file is required")
    if args.program_flag and args.program_path:
        parser.error("give the program either positionally or with --program, not both")
    path = Path(path_text)
    text = path.read_text(encoding="utf-8")
    name = _program_name(path.stem)
    dialect = getattr(args, "dialect", None)
    if allow_dialect_input and dialect:
        return parse_vendor(text, dialect, name=name)
    if path.suffix.lower() == ".json":
        return program_from_dict(json.loads(text))
    return parse_program(text, name=name)


def _program_name(stem: str) -> str:
    cleaned = "".join(c for c in stem if c.isalnum() or c in "_-")[:64]
    return cleaned or DEFAULT_PROGRAM_NAME


if __name__ == "__main__":
    sys.exit(main())
