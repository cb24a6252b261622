"""Seeded batch runs, running-time datasets, histograms and persistence.

Trial i of a batch runs with seed base_seed + i, so batches are
reproducible in content (iteration counts, solutions) at any parallelism;
only the wall-clock column varies between invocations.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace, asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import pso, sa
from .cubes import SearchRange, Solution
from .records import ALGORITHMS, TrialRecord

CSV_HEADER = "trial,algorithm,seed,time_seconds,iterations,restarts,x,y,z,truncated"


class DatasetFormatError(ValueError):
    """Malformed dataset file; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DegenerateDataError(ValueError):
    pass


@dataclass(frozen=True)
class TimeDataset:
    """A batch of trial records plus a JSON-compatible metadata snapshot."""

    records: tuple[TrialRecord, ...]
    meta: dict

    def __post_init__(self):
        if len(self.records) < 1:
            raise ValueError("dataset must contain at least one record")
        tags = {r.algorithm for r in self.records}
        if len(tags) != 1:
            raise ValueError(f"records mix algorithm tags: {sorted(tags)}")

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def algorithm(self) -> str:
        return self.records[0].algorithm

    def times(self) -> np.ndarray:
        """Elapsed seconds of the non-truncated trials."""
        return np.array([r.elapsed for r in self.records if not r.truncated], dtype=float)

    def __eq__(self, other):
        if not isinstance(other, TimeDataset):
            return NotImplemented
        return self.records == other.records and self.meta == other.meta


@dataclass(frozen=True)
class Histogram:
    """Equal-width density histogram; densities integrate to one."""

    bin_width: float
    bin_edges: np.ndarray
    densities: np.ndarray
    counts: np.ndarray
    n: int


def _solver_for(algorithm: str):
    if algorithm == "pso":
        return pso.run
    if algorithm == "sa":
        return sa.run_sa
    if algorithm == "rsa":
        return sa.run_rsa
    raise ValueError(f"unknown algorithm tag {algorithm!r} (expected one of {ALGORITHMS})")


def _run_trial(args) -> TrialRecord:
    algorithm, cfg = args
    return _solver_for(algorithm)(cfg)


def run_batch(algorithm: str, cfg, n: int, base_seed: int,
              parallelism: int = 1) -> TimeDataset:
    """n independent trials with seeds base_seed..base_seed+n-1.

    Records are kept in trial-index order regardless of completion order.
    A failing trial aborts the whole batch, naming its index.
    """
    _solver_for(algorithm)
    if n < 1:
        raise ValueError("n must be >= 1")
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    jobs = [(algorithm, replace(cfg, seed=base_seed + i)) for i in range(n)]
    if parallelism == 1:
        records = []
        for i, job in enumerate(jobs):
            try:
                records.append(_run_trial(job))
            except Exception as e:
                raise RuntimeError(f"trial {i} (seed {base_seed + i}) failed: {e}") from e
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(_run_trial, job) for job in jobs]
            records = []
            for i, fut in enumerate(futures):
                try:
                    records.append(fut.result())
                except Exception as e:
                    raise RuntimeError(f"trial {i} (seed {base_seed + i}) failed: {e}") from e

    cfg_dict = asdict(cfg)
    box = cfg_dict.pop("range")
    cfg_dict.pop("seed", None)
    meta = {
        "format_version": 1,
        "algorithm": algorithm,
        "k": cfg.k,
        "range": box,
        "range_tag": cfg.range.tag,
        "n": n,
        "base_seed": base_seed,
        "config": cfg_dict,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    return TimeDataset(tuple(records), meta)


def histogram(data, bins: int) -> Histogram:
    """Equal-width bins over [min, max] with width (max - min)/bins.

    Densities are count/(n * width); the rightmost edge is inclusive.
    """
    times = data.times() if isinstance(data, TimeDataset) else np.asarray(data, dtype=float)
    n = len(times)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if bins >= n:
        raise ValueError(f"bins must be < sample size (got {bins} bins for {n} samples)")
    lo, hi = float(times.min()), float(times.max())
    if hi <= lo:
        raise DegenerateDataError("all times are equal; histogram width would be zero")
    width = (hi - lo) / bins
    edges = lo + width * np.arange(bins + 1)
    edges[-1] = hi
    counts, _ = np.histogram(times, bins=edges)
    densities = counts / (n * width)
    return Histogram(width, edges, densities, counts, n)


def _format_time(t: float) -> str:
    # shortest positional decimal that round-trips, at least 6 fractional digits
    return np.format_float_positional(t, unique=True, pad_right=6)


def save_dataset(ds: TimeDataset, path) -> None:
    """Write the CSV plus a <path>.json sidecar with the metadata snapshot."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for i, r in enumerate(ds.records):
            if r.solution is not None:
                x, y, z = str(r.solution.x), str(r.solution.y), str(r.solution.z)
            else:
                x = y = z = ""
            writer.writerow([
                i, r.algorithm, r.seed, _format_time(r.elapsed),
                r.iterations, r.restarts, x, y, z,
                "true" if r.truncated else "false",
            ])
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps(ds.meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _parse_row(row: list[str], line: int, k: int | None) -> TrialRecord:
    if len(row) != 10:
        raise DatasetFormatError(f"expected 10 fields, got {len(row)}", line)
    try:
        algorithm = row[1]
        seed = int(row[2])
        elapsed = float(row[3])
        iterations = int(row[4])
        restarts = int(row[5])
        truncated = {"true": True, "false": False}[row[9].strip().lower()]
    except (ValueError, KeyError) as e:
        raise DatasetFormatError(f"cannot parse record: {e}", line) from e
    has_xyz = any(f.strip() for f in row[6:9])
    if truncated:
        if has_xyz:
            raise DatasetFormatError("truncated trial must not carry a solution", line)
        solution = None
    else:
        if not all(f.strip() for f in row[6:9]):
            raise DatasetFormatError("non-truncated trial is missing x, y or z", line)
        try:
            x, y, z = (int(f) for f in row[6:9])
        except ValueError as e:
            raise DatasetFormatError(f"cannot parse solution: {e}", line) from e
        if k is None:
            k = x**3 + y**3 + z**3
        try:
            solution = Solution(k, x, y, z)
        except ValueError as e:
            raise DatasetFormatError(str(e), line) from e
    try:
        return TrialRecord(algorithm, seed, elapsed, iterations, restarts, solution, truncated)
    except ValueError as e:
        raise DatasetFormatError(str(e), line) from e


def load_dataset(path) -> TimeDataset:
    """Inverse of save_dataset; the sidecar is used when present."""
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    meta = None
    if sidecar.exists():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    k = meta.get("k") if meta else None

    records = []
    with path.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError(f"empty file, expected header {CSV_HEADER!r}", 1) from None
        if ",".join(header) != CSV_HEADER:
            raise DatasetFormatError(
                f"bad header {','.join(header)!r}, expected {CSV_HEADER!r}", 1)
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            records.append(_parse_row(row, line, k))
    if not records:
        raise DatasetFormatError("dataset has a header but no records", 2)
    if meta is None:
        meta = {
            "format_version": 1,
            "algorithm": records[0].algorithm,
            "k": k,
            "range": None,
            "range_tag": None,
            "n": len(records),
            "base_seed": None,
            "config": None,
            "created_at": None,
        }
    return TimeDataset(tuple(records), meta)
