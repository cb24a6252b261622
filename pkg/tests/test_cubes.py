import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeseek import cubes
from cubeseek.cubes import (
    SearchPoint,
    SearchRange,
    Solution,
    candidate_z,
    fitness,
    nearest_integer_distance,
    signed_cbrt,
    validate_k,
    verify_solution,
)

CBRT2 = 1.2599210498948732  # 2**(1/3) correctly rounded


def icbrt_floor(a: int) -> int:
    """Integer-only oracle: largest z >= 0 with z^3 <= a, by bisection."""
    assert a >= 0
    lo, hi = 0, 1
    while hi**3 <= a:
        hi *= 2
    while hi - lo > 1:  # invariant: lo^3 <= a < hi^3
        mid = (lo + hi) // 2
        if mid**3 <= a:
            lo = mid
        else:
            hi = mid
    return lo


def best_integer_z(m: int) -> int:
    """Oracle: the integer z minimising |m - z^3|, via exact bisection."""
    a = icbrt_floor(abs(m))
    cands = [a - 1, a, a + 1, a + 2]
    if m < 0:
        cands = [-c for c in cands]
    return min(cands, key=lambda z: (abs(m - z**3), abs(z)))


class TestNearestIntegerDistance:
    def test_integer_input(self):
        assert nearest_integer_distance(3.0) == 0.0

    def test_midpoint_is_max(self):
        assert nearest_integer_distance(2.5) == 0.5

    def test_cbrt2_offset(self):
        assert nearest_integer_distance(-1.2599210499) == pytest.approx(0.2599210499, abs=1e-12)

    @pytest.mark.parametrize("bad", [float("inf"), float("-inf"), float("nan")])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            nearest_integer_distance(bad)

    @given(st.floats(-1e6, 1e6), st.integers(-1000, 1000))
    def test_periodicity(self, v, n):
        assert nearest_integer_distance(v + n) == pytest.approx(
            nearest_integer_distance(v), abs=1e-9)

    @given(st.floats(allow_nan=False, allow_infinity=False, width=64))
    def test_symmetry_and_range(self, v):
        d = nearest_integer_distance(v)
        assert d == nearest_integer_distance(-v)
        assert 0.0 <= d <= 0.5


class TestSignedCbrt:
    def test_exact_cube(self):
        assert signed_cbrt(-27) == -3.0

    def test_zero(self):
        assert signed_cbrt(0) == 0.0

    def test_two(self):
        assert signed_cbrt(2) == pytest.approx(CBRT2, abs=1e-15)

    @given(st.floats(-1e18, 1e18))
    def test_cube_reproduces_input(self, v):
        y = signed_cbrt(v)
        assert y**3 == pytest.approx(v, rel=1e-12, abs=1e-300)

    @given(st.lists(st.floats(-1e18, 1e18), min_size=2, max_size=20))
    def test_monotone(self, vs):
        vs.sort()
        roots = [signed_cbrt(v) for v in vs]
        assert all(a <= b for a, b in zip(roots, roots[1:]))

    def test_sign_matches(self):
        assert signed_cbrt(5.0) > 0 > signed_cbrt(-5.0)


class TestFitness:
    def test_known_solution_point(self):
        assert fitness(2, (1, 1)) == 0.0

    def test_origin_for_k2(self):
        assert fitness(2, (0, 0)) == pytest.approx(0.2599210498948732, abs=1e-12)

    def test_parametric_solution(self):
        # 343 - 125 - 216 = 2
        assert fitness(2, (7, -5)) == 0.0

    def test_zero_iff_exact(self):
        # 10^15 is a perfect cube; 10^15 + 1 is not, and its float cube
        # root is only ~3e-12 away from 10^5 -- inside the guard zone.
        assert fitness(10**15, (0, 0)) == 0.0
        near = fitness(10**15 + 1, (0, 0))
        assert near > 0.0
        assert near < 1e-9

    def test_overflow_guard(self):
        with pytest.raises(OverflowError):
            fitness(2, (10**7, 0))

    @given(st.integers(-100, 100), st.integers(-100, 100), st.integers(-50, 50))
    def test_range(self, x, y, k):
        assert 0.0 <= fitness(k, (x, y)) <= 0.5


class TestCandidateZ:
    def test_rounding(self):
        assert candidate_z(2, (0, 0)) == 1

    def test_solution_point(self):
        assert candidate_z(2, (1, 1)) == 0

    def test_negative_cube(self):
        assert candidate_z(2, (7, -5)) == -6

    @given(st.integers(-(10**18), 10**18))
    def test_minimises_error_against_oracle(self, m):
        z = candidate_z(m, (0, 0))
        zo = best_integer_z(m)
        assert abs(m - z**3) == abs(m - zo**3)

    def test_exact_z_for_parametric_family(self):
        # (1+6t^3)^3 + (1-6t^3)^3 + (-6t^2)^3 = 2
        for t in range(1, 21):
            x, y, z = 1 + 6 * t**3, 1 - 6 * t**3, -6 * t**2
            assert candidate_z(2, (x, y)) == z
            assert verify_solution(2, x, y, z)


class TestVerifySolution:
    def test_trivial_true(self):
        assert verify_solution(2, 1, 1, 0)

    def test_parametric_true(self):
        assert verify_solution(2, 49, -47, -24)

    def test_false(self):
        assert not verify_solution(2, 1, 1, 1)

    def test_coordinate_cap(self):
        with pytest.raises(OverflowError):
            verify_solution(2, 10**6 + 1, 0, 0)

    def test_no_silent_wrap_at_cap(self):
        # the largest allowed coordinates still verify exactly
        c = 10**6
        assert verify_solution(3 * c**3, c, c, c)


class TestValidateK:
    @pytest.mark.parametrize("k,verdict", [
        (13, "insoluble"),   # 13 = 4 (mod 9)
        (2, "searchable"),
        (5, "insoluble"),    # mirror congruence class
        (4, "insoluble"),
        (42, "searchable"),
        (-4, "insoluble"),   # -4 = 5 (mod 9)
        (33, "searchable"),
    ])
    def test_verdicts(self, k, verdict):
        assert validate_k(k) == verdict


class TestSearchRange:
    def test_builtin_ranges(self):
        r3 = SearchRange.from_tag("R3")
        assert (r3.x_min, r3.x_max, r3.y_min, r3.y_max) == (-1000, 0, 0, 1000)
        assert SearchRange.from_power(5).tag == "R5"

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            SearchRange(1, 0, 0, 1)

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            SearchRange.from_tag("R9")

    def test_contains(self):
        r = SearchRange.from_tag("R3")
        assert r.contains(0, 0) and r.contains(-1000, 1000)
        assert not r.contains(1, 0)


class TestSolutionType:
    def test_constructs_only_verified(self):
        Solution(2, 1, 1, 0)
        with pytest.raises(ValueError):
            Solution(2, 1, 1, 1)


def test_brute_force_zero_set_matches_enumeration():
    """Every fitness-0 point in [-50,0]x[0,50] is found by exact enumeration."""
    k = 2
    by_fitness = set()
    for x in range(-50, 1):
        for y in range(0, 51):
            if fitness(k, (x, y)) == 0.0:
                by_fitness.add((x, y))
    by_enumeration = set()
    for x in range(-50, 1):
        for y in range(0, 51):
            m = k - x**3 - y**3
            z = best_integer_z(m)
            if z**3 == m:
                by_enumeration.add((x, y))
    assert by_fitness == by_enumeration
    assert (0, 1) in by_fitness  # 0 + 1 + 1
