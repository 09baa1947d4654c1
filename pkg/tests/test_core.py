import math
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np
import pytest

from projlab import (
    Direction,
    InvalidParameterError,
    ParamTriple,
    Scale,
    arc_distance,
    direction_grid,
    perpendicular_direction,
)
from projlab.core import floor_pow2, integer_root

PI = math.pi


def brute_arc_distance(t1, t2):
    # minimum over antipodal lifts theta + k*pi
    return min(abs(t1 - t2 + k * PI) for k in range(-3, 4))


class TestScale:
    def test_delta_exact(self):
        for n in (0, 1, 10, 52, 62):
            assert Scale(n).delta == 2.0 ** (-n)
            assert Scale(n).side == 2**n

    def test_range(self):
        with pytest.raises(InvalidParameterError):
            Scale(-1)
        with pytest.raises(InvalidParameterError):
            Scale(63)


class TestArcDistance:
    def test_identity(self):
        assert arc_distance(Direction(0.0), Direction(0.0)) == 0.0

    def test_quarter(self):
        assert arc_distance(Direction(0.0), Direction(PI / 4)) == pytest.approx(PI / 4)

    def test_antipodal_identification(self):
        # nearly-horizontal directions on both sides of theta = 0
        got = arc_distance(Direction(0.01), Direction(PI - 0.01))
        assert got == pytest.approx(brute_arc_distance(0.01, PI - 0.01))
        assert got == pytest.approx(0.02)

    def test_metric_properties(self):
        rng = np.random.default_rng(7)
        thetas = rng.uniform(0.0, PI, size=(10_000, 3))
        for t1, t2, t3 in thetas:
            d1, d2, d3 = Direction(t1), Direction(t2), Direction(t3)
            a, b, c = arc_distance(d1, d2), arc_distance(d1, d3), arc_distance(d3, d2)
            assert 0.0 <= a <= PI / 2 + 1e-12
            assert a == arc_distance(d2, d1)
            assert a <= b + c + 1e-12  # triangle
            assert a == pytest.approx(brute_arc_distance(t1, t2), abs=1e-12)
        # identity of indiscernibles within 1e-12
        assert arc_distance(Direction(0.3), Direction(0.3)) <= 1e-12


class TestDirectionGrid:
    def test_p1(self):
        assert [d.theta for d in direction_grid(1)] == [0.0]

    def test_p4(self):
        assert [d.theta for d in direction_grid(4)] == pytest.approx(
            [0.0, PI / 4, PI / 2, 3 * PI / 4]
        )

    def test_equidistribution(self):
        for p in (2, 3, 8, 32, 256):
            grid = direction_grid(p)
            thetas = [d.theta for d in grid]
            assert thetas == sorted(thetas)
            gaps = np.diff(thetas + [thetas[0] + PI])
            assert np.allclose(gaps, PI / p, atol=1e-12)
            # pairwise separation at least pi/p
            for i in range(p):
                for j in range(i + 1, min(i + 4, p)):
                    assert arc_distance(grid[i], grid[j]) >= PI / p - 1e-12

    def test_dyadic_spacing(self):
        grid = direction_grid(2**5)
        assert np.allclose(np.diff([d.theta for d in grid]), PI * 2.0**-5, atol=1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            direction_grid(0)


class TestPerpendicular:
    def test_horizontal_line(self):
        assert perpendicular_direction(Fraction(0)).theta == pytest.approx(PI / 2)

    def test_diagonal(self):
        assert perpendicular_direction(Fraction(1)).theta == pytest.approx(3 * PI / 4)

    def test_small_slope(self):
        got = perpendicular_direction(Fraction(1, 4096)).theta
        assert got == pytest.approx(PI / 2 + math.atan(1.0 / 4096.0))

    def test_projection_functional(self):
        # projecting along the perpendicular computes y - sigma*x, normalized
        sigma = Fraction(3, 7)
        e = perpendicular_direction(sigma)
        x, y = 0.2, 0.9
        expected = (y - float(sigma) * x) / math.hypot(1.0, float(sigma))
        assert e.project(x, y) == pytest.approx(expected)


class TestExactSlope:
    def test_comparisons_match_high_precision(self):
        getcontext().prec = 50
        rng = np.random.default_rng(11)
        nums = rng.integers(-(2**63), 2**63, size=(10_000, 2))
        dens = rng.integers(1, 2**63, size=(10_000, 2))
        for (n1, n2), (d1, d2) in zip(nums, dens):
            a = Fraction(int(n1), int(d1))
            b = Fraction(int(n2), int(d2))
            da = Decimal(a.numerator) / Decimal(a.denominator)
            db = Decimal(b.numerator) / Decimal(b.denominator)
            assert (a < b) == (da < db)
            assert (a == b) == (da == db)

    def test_reduced_form(self):
        s = Fraction(6, 4)
        assert s.numerator == 3 and s.denominator == 2


class TestParamTriple:
    def test_tau_exact(self):
        p = ParamTriple(Scale(16), Fraction(3, 4), 12)
        assert p.tau == Fraction(12, 16) == Fraction(3, 4)
        assert p.delta == 2.0**-16 and p.r == 2.0**-12

    def test_range_checks(self):
        with pytest.raises(InvalidParameterError):
            ParamTriple(Scale(10), Fraction(1, 4), 5)  # s < 1/2
        with pytest.raises(InvalidParameterError):
            ParamTriple(Scale(10), Fraction(1, 2), 11)  # r < delta
        with pytest.raises(InvalidParameterError):
            ParamTriple(Scale(10), Fraction(1, 2), -1)  # r > 1

    def test_exact_threshold(self):
        p = ParamTriple(Scale(10), Fraction(17, 20), 10)
        # delta^-s = 2^8.5 = 362.03...; 362 passes, 363 fails
        assert p.count_leq_delta_pow(362, p.s)
        assert not p.count_leq_delta_pow(363, p.s)
        assert p.floor_delta_pow(p.s) == 362


class TestExactPowers:
    def test_integer_root(self):
        assert integer_root(8, 3) == 2
        assert integer_root(26, 3) == 2
        assert integer_root(27, 3) == 3
        assert integer_root(0, 5) == 0
        rng = np.random.default_rng(3)
        for _ in range(200):
            x = int(rng.integers(0, 10**12))
            k = int(rng.integers(1, 6))
            r = integer_root(x, k)
            assert r**k <= x < (r + 1) ** k

    def test_floor_pow2(self):
        assert floor_pow2(Fraction(0)) == 1
        assert floor_pow2(Fraction(1, 2)) == 1
        assert floor_pow2(Fraction(3, 2)) == 2
        assert floor_pow2(Fraction(5)) == 32
        for p in range(0, 40):
            for q in (1, 2, 3, 5):
                v = floor_pow2(Fraction(p, q))
                assert v**q <= 2**p < (v + 1) ** q
