"""Dispersive particle swarm search over the integer lattice.

The swarm keeps three reference positions: the current swarm best (sb),
a persistent memory of the best position found so far (bsb), and per
particle the best of its ring neighbours (nb).  Once dp = s/5 particles
sit on bsb, every position is re-randomised; the bsb memory survives the
dispersion.  A worse sb can still displace bsb with probability
1 - (ff(sb) - ff(bsb)) / 0.5, which lets the memory drift away from deep
local minima after a dispersion.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import cubes
from .cubes import SearchRange, Solution
from .records import TrialRecord


@dataclass(frozen=True)
class SwarmConfig:
    k: int
    range: SearchRange
    swarm_size: int = 50
    threshold: float = 1e-4
    max_iterations: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 3:
            raise ValueError("swarm_size must be >= 3 (ring topology needs distinct neighbours)")
        if not 0.0 < self.threshold <= 0.5:
            raise ValueError("threshold must lie in (0, 0.5]")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if abs(self.k) > 10**18:
            raise OverflowError("|k| above 1e18 is not supported by the vectorised solver")

    @property
    def dispersion_parameter(self) -> int:
        # s // 5, floored at 1 so the dispersion mechanism exists for tiny swarms
        return max(1, self.swarm_size // 5)


@dataclass
class SwarmState:
    positions: np.ndarray          # (s, 2) int64
    fitnesses: np.ndarray          # (s,) float64
    sb: np.ndarray                 # (2,) int64, current swarm best
    sb_fitness: float
    bsb: np.ndarray                # (2,) int64, best swarm best memory
    bsb_fitness: float
    nb: np.ndarray                 # (s, 2) int64, ring-neighbourhood bests
    iteration: int = 0

    def copy(self) -> "SwarmState":
        return SwarmState(
            self.positions.copy(), self.fitnesses.copy(),
            self.sb.copy(), self.sb_fitness,
            self.bsb.copy(), self.bsb_fitness,
            self.nb.copy(), self.iteration,
        )


def _make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _uniform_positions(rng: np.random.Generator, rng_box: SearchRange, n: int) -> np.ndarray:
    pos = np.empty((n, 2), dtype=np.int64)
    pos[:, 0] = rng.integers(rng_box.x_min, rng_box.x_max + 1, size=n)
    pos[:, 1] = rng.integers(rng_box.y_min, rng_box.y_max + 1, size=n)
    return pos


def _swarm_fitness(k: int, positions: np.ndarray) -> np.ndarray:
    """Vectorised fitness; sub-guard entries are re-scored via the exact path."""
    m = k - positions[:, 0] ** 3 - positions[:, 1] ** 3
    z = np.cbrt(m.astype(np.float64))
    f = np.abs(z - np.rint(z))
    low = np.nonzero(f < cubes.EXACTNESS_GUARD)[0]
    for i in low:
        f[i] = cubes.fitness(k, (int(positions[i, 0]), int(positions[i, 1])))
    return f


def _ring_best(positions: np.ndarray, fitnesses: np.ndarray) -> np.ndarray:
    """nb_i = position of the fitness-minimal particle among {i-1, i, i+1} mod s."""
    s = len(fitnesses)
    stacked = np.stack([np.roll(fitnesses, 1), fitnesses, np.roll(fitnesses, -1)])
    choice = np.argmin(stacked, axis=0)  # 0 -> i-1, 1 -> i, 2 -> i+1
    idx = (np.arange(s) + choice - 1) % s
    return positions[idx].copy()


def position_update(x_id: int, nb_d: int, sb_d: int, bsb_d: int, r: float) -> int:
    """One coordinate of the move rule: round(nb + (r/2)(sb + bsb - 2x)).

    Rounding is half away from zero; ties at .5 are frequent because the
    bracket is integer whenever r has few mantissa bits.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    v = nb_d + 0.5 * r * (sb_d + bsb_d - 2 * x_id)
    return _round_half_away(v)


def _round_half_away(v: float) -> int:
    if v >= 0:
        return int(math.floor(v + 0.5))
    return -int(math.floor(-v + 0.5))


def _position_update_array(positions, nb, sb, bsb, r) -> np.ndarray:
    v = nb + (r / 2.0) * (sb + bsb - 2 * positions)
    return np.where(v >= 0, np.floor(v + 0.5), -np.floor(-v + 0.5)).astype(np.int64)


def dispersion_check(state: SwarmState, cfg: SwarmConfig) -> bool:
    """True when at least dp particles sit exactly on bsb."""
    count = int(np.all(state.positions == state.bsb, axis=1).sum())
    return count >= cfg.dispersion_parameter


def bsb_update(sb_fitness: float, bsb_fitness: float, rng: np.random.Generator) -> bool:
    """Should sb replace bsb?

    Strict improvements always win.  A worse sb wins with probability
    1 - (ff(sb) - ff(bsb)) / 0.5; an equal one never does (adopting it
    would only discard positional memory).
    """
    if sb_fitness < bsb_fitness:
        return True
    if sb_fitness > bsb_fitness:
        p = 1.0 - (sb_fitness - bsb_fitness) / 0.5
        return bool(rng.random() < p)
    return False


def init_swarm(cfg: SwarmConfig, rng: np.random.Generator) -> SwarmState:
    """Uniform random swarm; sb is the fitness-minimal particle and bsb <- sb."""
    positions = _uniform_positions(rng, cfg.range, cfg.swarm_size)
    fitnesses = _swarm_fitness(cfg.k, positions)
    i = int(np.argmin(fitnesses))
    sb, sb_fit = positions[i].copy(), float(fitnesses[i])
    return SwarmState(
        positions=positions,
        fitnesses=fitnesses,
        sb=sb,
        sb_fitness=sb_fit,
        bsb=sb.copy(),
        bsb_fitness=sb_fit,
        nb=_ring_best(positions, fitnesses),
        iteration=0,
    )


def step(state: SwarmState, cfg: SwarmConfig, rng: np.random.Generator) -> SwarmState:
    """One iteration: dispersion or move, confinement, then sb/bsb/nb updates."""
    box = cfg.range
    if dispersion_check(state, cfg):
        positions = _uniform_positions(rng, box, cfg.swarm_size)
    else:
        r = rng.random((cfg.swarm_size, 2))
        positions = _position_update_array(state.positions, state.nb, state.sb, state.bsb, r)
        out = (
            (positions[:, 0] < box.x_min) | (positions[:, 0] > box.x_max)
            | (positions[:, 1] < box.y_min) | (positions[:, 1] > box.y_max)
        )
        n_out = int(out.sum())
        if n_out:
            positions[out] = _uniform_positions(rng, box, n_out)

    fitnesses = _swarm_fitness(cfg.k, positions)
    i = int(np.argmin(fitnesses))
    sb, sb_fit = positions[i].copy(), float(fitnesses[i])
    if bsb_update(sb_fit, state.bsb_fitness, rng):
        bsb, bsb_fit = sb.copy(), sb_fit
    else:
        bsb, bsb_fit = state.bsb.copy(), state.bsb_fitness
    return SwarmState(
        positions=positions,
        fitnesses=fitnesses,
        sb=sb,
        sb_fitness=sb_fit,
        bsb=bsb,
        bsb_fitness=bsb_fit,
        nb=_ring_best(positions, fitnesses),
        iteration=state.iteration + 1,
    )


def _find_solution(cfg: SwarmConfig, state: SwarmState) -> Solution | None:
    """Try exact verification of every particle at or below the threshold."""
    for i in np.nonzero(state.fitnesses <= cfg.threshold)[0]:
        x, y = int(state.positions[i, 0]), int(state.positions[i, 1])
        z = cubes.candidate_z(cfg.k, (x, y))
        if cubes.verify_solution(cfg.k, x, y, z):
            return Solution(cfg.k, x, y, z)
    return None


def run(cfg: SwarmConfig, rng: np.random.Generator | None = None) -> TrialRecord:
    """Iterate the swarm until a verified solution or the iteration cap."""
    cubes.require_searchable(cfg.k)
    if rng is None:
        rng = _make_rng(cfg.seed)
    start = time.perf_counter()
    state = init_swarm(cfg, rng)
    solution = None
    if cfg.max_iterations != 0:
        solution = _find_solution(cfg, state)
    while solution is None:
        if cfg.max_iterations is not None and state.iteration >= cfg.max_iterations:
            elapsed = time.perf_counter() - start
            return TrialRecord("pso", cfg.seed, elapsed, state.iteration, 0, None, True)
        state = step(state, cfg, rng)
        solution = _find_solution(cfg, state)
    elapsed = time.perf_counter() - start
    return TrialRecord("pso", cfg.seed, elapsed, state.iteration, 0, solution, False)
