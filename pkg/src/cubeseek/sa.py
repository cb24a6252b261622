"""Simulated annealing over the integer lattice, with and without restarts.

Cooling follows temp(m) = 1/(ln m + 0.01) where m counts proposals.  Moves
are drawn uniformly from a (2*radius+1)^2 box around the current state,
minus the state itself and clipped at the domain border.  Acceptance is the
Metropolis rule.  The restarting variant re-randomises the state (and the
cooling clock) once rtm consecutive states share the same energy.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import cubes
from .cubes import SearchPoint, SearchRange, Solution
from .records import TrialRecord

DEFAULT_RTM = 30


@dataclass(frozen=True)
class AnnealConfig:
    k: int
    range: SearchRange
    threshold: float = 1e-4
    neighbourhood_radius: int = 10
    cooling_offset: float = 0.01
    rtm: int | None = None
    max_iterations: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.neighbourhood_radius < 1:
            raise ValueError("neighbourhood_radius must be >= 1")
        if not 0.0 < self.threshold <= 0.5:
            raise ValueError("threshold must lie in (0, 0.5]")
        if self.cooling_offset <= 0:
            raise ValueError("cooling_offset must be > 0")
        if self.rtm is not None and self.rtm < 2:
            raise ValueError("rtm must be >= 2")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass
class AnnealState:
    """Current chain state; same_energy_run counts the state itself."""

    current: SearchPoint
    energy: float
    m: int = 1
    same_energy_run: int = 1


def temperature(m: int, cooling_offset: float = 0.01) -> float:
    """Cooling schedule 1/(ln m + offset); strictly decreasing from 1/offset."""
    if m < 1:
        raise ValueError("iteration counter m must be >= 1")
    return 1.0 / (math.log(m) + cooling_offset)


def _clipped_box(p: SearchPoint, box: SearchRange, radius: int):
    """Offset bounds (a_lo, a_hi, b_lo, b_hi) of the in-range neighbourhood."""
    x, y = p
    if not box.contains(x, y):
        raise ValueError(f"point {p} lies outside the search range")
    return (
        max(-radius, box.x_min - x),
        min(radius, box.x_max - x),
        max(-radius, box.y_min - y),
        min(radius, box.y_max - y),
    )


def neighbourhood(p: SearchPoint, box: SearchRange, radius: int = 10) -> list[SearchPoint]:
    """All in-range points within the box around p, excluding p itself."""
    a_lo, a_hi, b_lo, b_hi = _clipped_box(SearchPoint(*p), box, radius)
    x, y = p
    return [
        SearchPoint(x + a, y + b)
        for a in range(a_lo, a_hi + 1)
        for b in range(b_lo, b_hi + 1)
        if not (a == 0 and b == 0)
    ]


def propose(p: SearchPoint, box: SearchRange, rng: np.random.Generator,
            radius: int = 10) -> SearchPoint:
    """Uniform draw from neighbourhood(p, box) without materialising it."""
    a_lo, a_hi, b_lo, b_hi = _clipped_box(SearchPoint(*p), box, radius)
    nb = b_hi - b_lo + 1
    cells = (a_hi - a_lo + 1) * nb
    if cells <= 1:
        raise ValueError("neighbourhood is empty (degenerate range)")
    centre = (-a_lo) * nb + (-b_lo)
    idx = int(rng.integers(0, cells - 1))
    if idx >= centre:
        idx += 1
    return SearchPoint(p[0] + a_lo + idx // nb, p[1] + b_lo + idx % nb)


def accept(delta_e: float, temp: float, rng: np.random.Generator) -> bool:
    """Metropolis rule: downhill always, uphill with probability exp(-dE/T)."""
    if temp <= 0:
        raise ValueError("temperature must be > 0")
    if delta_e <= 0:
        return True
    return bool(rng.random() < math.exp(-delta_e / temp))


def update_same_energy_run(run: int, accepted: bool, energy_changed: bool) -> int:
    """Equal-energy counter: a rejection or an accepted equal-energy move
    extends the run; an accepted move to a different energy starts a new one."""
    if accepted and energy_changed:
        return 1
    return run + 1


def run_sa(cfg: AnnealConfig, rng: np.random.Generator | None = None) -> TrialRecord:
    """Plain annealing; ignores any restart setting in the config."""
    return _anneal(cfg, rng, rtm=None, tag="sa")


def run_rsa(cfg: AnnealConfig, rng: np.random.Generator | None = None) -> TrialRecord:
    """Restarting annealing; rtm defaults to 30 when the config leaves it unset."""
    rtm = cfg.rtm if cfg.rtm is not None else DEFAULT_RTM
    return _anneal(cfg, rng, rtm=rtm, tag="rsa")


def _anneal(cfg: AnnealConfig, rng: np.random.Generator | None,
            rtm: int | None, tag: str) -> TrialRecord:
    cubes.require_searchable(cfg.k)
    box = cfg.range
    if box.is_degenerate():
        raise ValueError("search range must contain more than one point")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(cfg.seed))

    k = cfg.k
    thr = cfg.threshold
    radius = cfg.neighbourhood_radius
    offset = cfg.cooling_offset
    max_iter = cfg.max_iterations
    rand = rng.random
    randint = rng.integers
    exp = math.exp
    log = math.log
    x_min, x_max, y_min, y_max = box.x_min, box.x_max, box.y_min, box.y_max

    def verified(x: int, y: int) -> Solution | None:
        z = cubes.candidate_z(k, (x, y))
        if cubes.verify_solution(k, x, y, z):
            return Solution(k, x, y, z)
        return None

    start = time.perf_counter()
    x = int(randint(x_min, x_max + 1))
    y = int(randint(y_min, y_max + 1))
    energy = cubes.fitness(k, (x, y))
    m = 1
    same_run = 1
    iterations = 0
    restarts = 0

    if max_iter != 0 and energy <= thr:
        sol = verified(x, y)
        if sol is not None:
            elapsed = time.perf_counter() - start
            return TrialRecord(tag, cfg.seed, elapsed, 0, 0, sol, False)

    while max_iter is None or iterations < max_iter:
        if rtm is not None and same_run >= rtm:
            x = int(randint(x_min, x_max + 1))
            y = int(randint(y_min, y_max + 1))
            energy = cubes.fitness(k, (x, y))
            m = 1
            same_run = 1
            restarts += 1
            if energy <= thr:
                sol = verified(x, y)
                if sol is not None:
                    elapsed = time.perf_counter() - start
                    return TrialRecord(tag, cfg.seed, elapsed, iterations, restarts, sol, False)

        # propose from the clipped box, skipping the centre cell
        a_lo = -radius if x - radius >= x_min else x_min - x
        a_hi = radius if x + radius <= x_max else x_max - x
        b_lo = -radius if y - radius >= y_min else y_min - y
        b_hi = radius if y + radius <= y_max else y_max - y
        nb = b_hi - b_lo + 1
        cells = (a_hi - a_lo + 1) * nb
        centre = (-a_lo) * nb + (-b_lo)
        idx = int(randint(0, cells - 1))
        if idx >= centre:
            idx += 1
        qx = x + a_lo + idx // nb
        qy = y + b_lo + idx % nb

        q_energy = cubes.fitness(k, (qx, qy))
        delta = q_energy - energy
        if delta <= 0 or rand() < exp(-delta * (log(m) + offset)):
            same_run = update_same_energy_run(same_run, True, q_energy != energy)
            x, y, energy = qx, qy, q_energy
        else:
            same_run = update_same_energy_run(same_run, False, False)
        m += 1
        iterations += 1

        if energy <= thr:
            sol = verified(x, y)
            if sol is not None:
                elapsed = time.perf_counter() - start
                return TrialRecord(tag, cfg.seed, elapsed, iterations, restarts, sol, False)

    elapsed = time.perf_counter() - start
    return TrialRecord(tag, cfg.seed, elapsed, iterations, restarts, None, True)
