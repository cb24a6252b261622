"""Shared record type for single solver runs."""

from __future__ import annotations

from dataclasses import dataclass

from .cubes import Solution

ALGORITHMS = ("pso", "sa", "rsa")


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one seeded solver run.

    elapsed is wall-clock seconds around the solver loop only; solution is
    present exactly when the run was not truncated.
    """

    algorithm: str
    seed: int
    elapsed: float
    iterations: int
    restarts: int
    solution: Solution | None
    truncated: bool

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm tag {self.algorithm!r}")
        if self.elapsed < 0:
            raise ValueError("elapsed must be >= 0")
        if self.truncated == (self.solution is not None):
            raise ValueError("solution must be present iff the run was not truncated")
