"""Exact integer arithmetic and the distance-to-nearest-integer fitness.

For fixed k, a lattice point (x, y) is scored by how far the real cube
root of k - x^3 - y^3 is from the nearest integer.  The score is zero
exactly at integer solutions of x^3 + y^3 + z^3 = k, which is confirmed
in exact integer arithmetic before a zero is ever reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

#: Hard cap on |x|, |y|, |z|.  Cubes of capped coordinates stay far inside
#: the signed 128-bit range, and inside int64 for the vectorised solvers.
COORD_CAP = 10**6

#: Largest residual k - x^3 - y^3 we accept (signed 128-bit range).
INT128_MAX = 2**127 - 1

#: Fitness values below this are "possibly exact" and must be confirmed by
#: verify_solution; the float cube root of ~1e18 is only good to ~1e-10.
EXACTNESS_GUARD = 1e-9


class SearchPoint(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class SearchRange:
    """Rectangular integer lattice domain [x_min, x_max] x [y_min, y_max]."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(
                f"invalid range: [{self.x_min}, {self.x_max}] x [{self.y_min}, {self.y_max}]"
            )
        for v in (self.x_min, self.x_max, self.y_min, self.y_max):
            if abs(v) > COORD_CAP:
                raise OverflowError(f"range bound {v} exceeds the |coordinate| cap {COORD_CAP}")

    @classmethod
    def from_power(cls, p: int) -> "SearchRange":
        """The scanned domain -10^p <= x <= 0 <= y <= 10^p."""
        return cls(-(10**p), 0, 0, 10**p)

    @classmethod
    def from_tag(cls, tag: str) -> "SearchRange":
        """Parse the shorthand tags R3, R4, R5."""
        t = tag.strip().upper()
        if len(t) == 2 and t[0] == "R" and t[1] in "345":
            return cls.from_power(int(t[1]))
        raise ValueError(f"unknown range tag {tag!r} (expected R3, R4 or R5)")

    @property
    def tag(self) -> str | None:
        """R3/R4/R5 when the bounds match one of the built-ins, else None."""
        for p in (3, 4, 5):
            if self == SearchRange.from_power(p):
                return f"R{p}"
        return None

    def contains(self, x: int, y: int) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def is_degenerate(self) -> bool:
        return self.x_min == self.x_max and self.y_min == self.y_max


@dataclass(frozen=True)
class Solution:
    """A verified integer solution of x^3 + y^3 + z^3 = k."""

    k: int
    x: int
    y: int
    z: int

    def __post_init__(self):
        if not verify_solution(self.k, self.x, self.y, self.z):
            raise ValueError(
                f"({self.x})^3 + ({self.y})^3 + ({self.z})^3 != {self.k}: not a solution"
            )


def nearest_integer_distance(v: float) -> float:
    """Distance from v to the nearest integer, in [0, 0.5]."""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite input: {v!r}")
    return abs(v - round(v))


def signed_cbrt(v: float) -> float:
    """Real cube root with the sign of v.

    A pow-based estimate is refined with one Newton step, which brings the
    result to within an ulp of the true root for |v| up to 1e18.
    """
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite input: {v!r}")
    if v == 0.0:
        return 0.0
    a = abs(v)
    y = a ** (1.0 / 3.0)
    y = (2.0 * y + a / (y * y)) / 3.0
    return y if v > 0 else -y


def _as_point(p) -> SearchPoint:
    x, y = p
    return SearchPoint(int(x), int(y))


def _residual(k: int, x: int, y: int) -> int:
    """k - x^3 - y^3 in exact integer arithmetic, range checked."""
    if abs(x) > COORD_CAP or abs(y) > COORD_CAP:
        raise OverflowError(f"|x|, |y| must not exceed {COORD_CAP}: got ({x}, {y})")
    m = k - x * x * x - y * y * y
    if abs(m) > INT128_MAX:
        raise OverflowError(f"k - x^3 - y^3 = {m} exceeds the signed 128-bit range")
    return m


def fitness(k: int, p) -> float:
    """The search score ||cbrt(k - x^3 - y^3)||, zero iff (x, y) extends to a solution.

    The cube sum is exact; only the final cube root is floating point.
    Values below EXACTNESS_GUARD are confirmed with verify_solution: a
    verified point returns exactly 0.0, an unverified one gets a positive
    first-order distance estimate so that near-misses at huge magnitudes
    can never masquerade as solutions.
    """
    x, y = _as_point(p)
    m = _residual(k, x, y)
    raw = nearest_integer_distance(signed_cbrt(float(m)))
    if raw < EXACTNESS_GUARD:
        z = candidate_z(k, (x, y))
        if verify_solution(k, x, y, z):
            return 0.0
        # Distance of cbrt(m) from the best integer z, to first order.
        return abs(m - z * z * z) / (3.0 * max(z * z, 1))
    return raw


def candidate_z(k: int, p) -> int:
    """The integer z minimising |k - x^3 - y^3 - z^3|.

    Starts from the rounded float cube root and corrects by +-1, since the
    float root of a large residual can round to a neighbouring integer.
    """
    x, y = _as_point(p)
    m = _residual(k, x, y)
    z = round(signed_cbrt(float(m)))
    best, best_err = z, abs(m - z * z * z)
    for cand in (z - 1, z + 1):
        err = abs(m - cand * cand * cand)
        if err < best_err:
            best, best_err = cand, err
    return best


def verify_solution(k: int, x: int, y: int, z: int) -> bool:
    """Exact check of x^3 + y^3 + z^3 = k.  No floating point anywhere."""
    for v in (x, y, z):
        if abs(v) > COORD_CAP:
            raise OverflowError(f"|coordinate| {abs(v)} exceeds the cap {COORD_CAP}")
    if abs(k) > INT128_MAX:
        raise OverflowError(f"|k| exceeds the signed 128-bit range")
    return x * x * x + y * y * y + z * z * z == k


def validate_k(k: int) -> str:
    """Classify k as "searchable" or "insoluble".

    k = 4 or 5 (mod 9) has no representation as a sum of three cubes:
    cubes are 0, +-1 mod 9, so three of them can never sum to +-4.
    """
    return "insoluble" if k % 9 in (4, 5) else "searchable"


def require_searchable(k: int) -> None:
    """Raise ValueError for k in the insoluble congruence classes."""
    if validate_k(k) == "insoluble":
        raise ValueError(
            f"k={k} is insoluble: k = {k % 9} (mod 9) admits no sum-of-three-cubes solution"
        )
