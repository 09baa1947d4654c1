"""Dyadic scales, directions on the half-circle, and exact slope arithmetic.

Everything downstream works on the quotient circle [0, pi): a direction and
its antipode produce the same projection covering numbers, so directions are
stored as angles theta in [0, pi) and all direction sweeps run over that
half-circle.  Arc lengths on the quotient are half the corresponding full
S^1 arc lengths.

Angles are ordinary doubles.  Slopes that feed the exact grid construction
are `fractions.Fraction` values (alias `ExactSlope`), compared by
cross-multiplication, never through floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

PI = math.pi

# Exact rational slope: reduced, positive denominator, exact ordering.
ExactSlope = Fraction


class InvalidParameterError(ValueError):
    """A parameter fails a documented range or integrality constraint."""


@dataclass(frozen=True)
class Scale:
    """Dyadic scale delta = 2^-n."""

    n: int

    def __post_init__(self):
        if not (0 <= self.n <= 62):
            raise InvalidParameterError(f"dyadic level n={self.n} outside [0, 62]")

    @property
    def delta(self) -> float:
        return 2.0 ** (-self.n)

    @property
    def side(self) -> int:
        """Number of lattice cells per axis, 2^n."""
        return 1 << self.n


@dataclass(frozen=True)
class Direction:
    """Unit direction identified with its antipode, stored as theta in [0, pi)."""

    theta: float

    def __post_init__(self):
        t = math.fmod(self.theta, PI)
        if t < 0.0:
            t += PI
        if t >= PI:  # fmod roundoff can land exactly on pi
            t -= PI
        object.__setattr__(self, "theta", t)

    @property
    def unit(self) -> tuple[float, float]:
        return (math.cos(self.theta), math.sin(self.theta))

    def project(self, x: float, y: float) -> float:
        c, s = self.unit
        return x * c + y * s


@dataclass(frozen=True)
class ParamTriple:
    """The parameter triple (delta, s, r) = (2^-a, s, 2^-b) with 0 <= b <= a.

    s is kept as an exact rational in [1/2, 1); tau = b/a satisfies
    r = delta^tau exactly.
    """

    scale: Scale
    s: Fraction
    log2r: int

    def __post_init__(self):
        s = Fraction(self.s)
        object.__setattr__(self, "s", s)
        if not (Fraction(1, 2) <= s < 1):
            raise InvalidParameterError(f"s={s} outside [1/2, 1)")
        if not (0 <= self.log2r <= self.scale.n):
            raise InvalidParameterError(
                f"log2r={self.log2r} outside [0, {self.scale.n}]: need delta <= r <= 1"
            )

    @property
    def a(self) -> int:
        return self.scale.n

    @property
    def b(self) -> int:
        return self.log2r

    @property
    def delta(self) -> float:
        return self.scale.delta

    @property
    def r(self) -> float:
        return 2.0 ** (-self.log2r)

    @property
    def tau(self) -> Fraction:
        if self.a == 0:
            raise InvalidParameterError("tau undefined at scale n=0")
        return Fraction(self.b, self.a)

    def delta_pow(self, expo: Fraction) -> float:
        """delta^expo as a float, exponent handled exactly as a rational."""
        return 2.0 ** (-self.a * float(Fraction(expo)))

    def count_leq_delta_pow(self, count: int, expo: Fraction) -> bool:
        """Exact integer test `count <= delta^-expo` for expo = p/q >= 0.

        Avoids float thresholds: count^q <= 2^(a p) is evaluated in integer
        arithmetic, so membership tests at the threshold are exact.
        """
        e = Fraction(expo)
        if count <= 0:
            return True
        return count ** e.denominator <= 1 << (self.a * e.numerator)

    def floor_delta_pow(self, expo: Fraction) -> int:
        """floor(delta^-expo) for expo = p/q >= 0, exact."""
        e = Fraction(expo)
        lo, hi = 0, 1 << (self.a * e.numerator // e.denominator + 1)
        target = 1 << (self.a * e.numerator)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid ** e.denominator <= target:
                lo = mid
            else:
                hi = mid - 1
        return lo


def integer_root(x: int, k: int) -> int:
    """floor(x^(1/k)) for nonnegative integer x, exact."""
    if x < 0 or k < 1:
        raise InvalidParameterError("integer_root needs x >= 0, k >= 1")
    if x in (0, 1) or k == 1:
        return x
    hi = 1 << (x.bit_length() // k + 1)
    lo = 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def floor_pow2(expo: Fraction) -> int:
    """floor(2^expo) for a nonnegative rational exponent, exact."""
    e = Fraction(expo)
    if e < 0:
        raise InvalidParameterError(f"floor_pow2 needs a nonnegative exponent, got {e}")
    return integer_root(1 << e.numerator, e.denominator)


def arc_distance(d1: Direction, d2: Direction) -> float:
    """Metric on the quotient circle: min angular distance over antipodal lifts.

    Values lie in [0, pi/2].
    """
    diff = abs(d1.theta - d2.theta)
    return min(diff, PI - diff)


def direction_grid(p: int) -> list[Direction]:
    """p equidistributed directions theta_k = pi k / p, k = 0..p-1, ascending.

    Consecutive (cyclic) gaps on the quotient circle are exactly pi/p.
    """
    if p < 1:
        raise InvalidParameterError(f"direction grid size p={p} must be >= 1")
    return [Direction(PI * k / p) for k in range(p)]


def perpendicular_direction(slope: ExactSlope | int) -> Direction:
    """Direction perpendicular to lines of the given slope.

    The returned e is proportional to (-slope, 1); projection onto e computes
    the functional y - slope*x up to the normalization 1/sqrt(1 + slope^2).
    """
    sigma = float(slope)
    return Direction(math.atan2(1.0, -sigma))
