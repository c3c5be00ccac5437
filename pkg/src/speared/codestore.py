"""Shared program store with optimistic concurrency.

Holds the single "current" robot program that AR and non-AR clients keep
in sync. Writes are compare-and-swap on a revision counter: a store is
accepted only when the writer's expected revision matches the current one,
and each accepted store bumps the revision by exactly one. A rejected
writer receives the current revision and program so it can rebase.
"""
from __future__ import annotations

from threading import Lock
from typing import Optional

from .dsl import Program, program_from_dict, program_to_dict


class StoreConflict(Exception):
    """Stale write: carries the authoritative revision and program."""

    def __init__(self, current_revision: int, program: dict) -> None:
        super().__init__(f"expected revision mismatch; current revision is {current_revision}")
        self.current_revision = current_revision
        self.program = program


class CodeStore:
    """Revisioned single-document program store (starts empty at revision 0)."""

    def __init__(self) -> None:
        self._lock = Lock()
        self._revision = 0
        self._program = program_to_dict(Program())
        self._last_writer: Optional[str] = None

    def load(self) -> tuple[dict, int]:
        with self._lock:
            return self._program, self._revision

    @property
    def revision(self) -> int:
        with self._lock:
            return self._revision

    @property
    def last_writer(self) -> Optional[str]:
        with self._lock:
            return self._last_writer

    def store(self, program: dict, expected_revision: int, client: str) -> int:
        """CAS write; returns the new revision or raises :class:`StoreConflict`.

        The program must be in interchange form; it is validated and kept
        verbatim so loads round-trip field-exactly.
        """
        parsed = program_from_dict(program)  # raises InterchangeError off-schema
        del parsed
        with self._lock:
            if expected_revision != self._revision:
                raise StoreConflict(self._revision, self._program)
            self._revision += 1
            self._program = program
            self._last_writer = client
            return self._revision
