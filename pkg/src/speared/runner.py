"""Headless program execution producing a deterministic report.

The runner steps the simulator at a fixed dt with no wall-time pacing and
records every event with its stamp. Identical inputs produce byte-identical
reports (the JSON is rendered canonically with sorted keys).
"""
from __future__ import annotations

import json

from .dsl import Program, validate_program
from .profiles import ArmProfile
from .scene import Scene
from .sim import ProgramFinished, SimEvent, Simulator, event_to_payload

REPORT_VERSION = 1

#: Hard cap on simulated seconds, against runaway programs.
MAX_SIMULATED_SECONDS = 3600.0

STATUS_SUCCESS = "success"
STATUS_COLLISION = "collision"
STATUS_VALIDATION_FAILED = "validation_failed"

EXIT_SUCCESS = 0
EXIT_COLLISION = 3
EXIT_VALIDATION_FAILED = 4

_STATUS_EXIT_CODES = {
    STATUS_SUCCESS: EXIT_SUCCESS,
    STATUS_COLLISION: EXIT_COLLISION,
    STATUS_VALIDATION_FAILED: EXIT_VALIDATION_FAILED,
}


def run_program(
    profile: ArmProfile,
    scene: Scene,
    program: Program,
    *,
    dt: float = 0.01,
    speed_factor: float = 1.0,
) -> dict:
    """Execute a program to completion and return the report dictionary."""
    diagnostics = validate_program(program, profile)
    if any(d.severity == "error" for d in diagnostics):
        return _report(
            program,
            status=STATUS_VALIDATION_FAILED,
            dt=dt,
            speed_factor=speed_factor,
            events=[],
            final_state=None,
            diagnostics=diagnostics,
        )

    sim = Simulator(profile, scene)
    if speed_factor != 1.0:
        sim.set_physics("set_speed", speed_factor)
    events: list[SimEvent] = list(sim.submit_program(program))
    status = STATUS_SUCCESS
    while not sim.idle:
        if sim.clock > MAX_SIMULATED_SECONDS:
            raise RuntimeError("program exceeded the simulated time budget")
        events.extend(sim.step(dt))
    for event in events:
        if isinstance(event, ProgramFinished):
            status = event.status
    return _report(
        program,
        status=status,
        dt=dt,
        speed_factor=speed_factor,
        events=events,
        final_state=sim.state_payload(),
        diagnostics=diagnostics,
    )


def exit_code_for(report: dict) -> int:
    return _STATUS_EXIT_CODES[report["status"]]


def render_report(report: dict) -> str:
    """Canonical JSON text; byte-identical for identical reports."""
    return json.dumps(report, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _report(program, *, status, dt, speed_factor, events, final_state, diagnostics) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "program": program.name,
        "status": status,
        "dt": dt,
        "speed_factor": speed_factor,
        "events": [event_to_payload(e) for e in events],
        "final_state": final_state,
        "diagnostics": [
            {
                "command_index": d.command_index,
                "severity": d.severity,
                "code": d.code,
                "message": d.message,
            }
            for d in diagnostics
        ],
    }
