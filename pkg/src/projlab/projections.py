"""Projections, 1D covering numbers, and the small-projection direction sets.

The covering primitive is the greedy sweep: sort the values, start a closed
interval of the requested width at the leftmost uncovered value, repeat.
For fixed-length intervals this greedy is exactly optimal, which the test
suite re-verifies against exhaustive enumeration on small instances.

`compute_E_s` evaluates the direction set

    E_s = { e : N(projection of the set along e, delta) <= delta^-s }

on a finite sweep grid of the half-circle.  The threshold comparison is done
in exact integer arithmetic (count^q <= 2^(a p) for s = p/q), so membership
at the threshold never depends on float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Direction, InvalidParameterError, ParamTriple, direction_grid
from .pointsets import LatticePointSet

# Closed-interval coverage tolerance, relative to the interval width.
COVER_RTOL = 1e-12


def _sorted_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size > 1:
        if arr[0] > arr[-1]:
            arr = arr[::-1]
        d = np.diff(arr)
        if (d < 0).any():
            arr = np.sort(arr, kind="stable")
    return np.ascontiguousarray(arr)


def greedy_cover_starts(
    sorted_values: np.ndarray, width: float, stop_after: int | None = None
) -> np.ndarray:
    """Left endpoints of the greedy cover of sorted values by closed
    width-intervals.  If `stop_after` is given, gives up once that many
    intervals have been started (the true count is then >= stop_after)."""
    starts = []
    i = 0
    n = len(sorted_values)
    reach = width * (1.0 + COVER_RTOL)
    while i < n:
        v = sorted_values[i]
        starts.append(v)
        if stop_after is not None and len(starts) >= stop_after:
            break
        i = int(np.searchsorted(sorted_values, v + reach, side="right"))
    return np.asarray(starts, dtype=np.float64)


def covering_number_1d(values, width: float, stop_after: int | None = None) -> int:
    """Minimum number of closed length-`width` intervals covering the values.

    Empty input gives 0.  Ties (a value exactly at an interval end) count as
    covered, up to a relative 1e-12 slack.
    """
    if width <= 0:
        raise InvalidParameterError(f"width={width} must be positive")
    arr = _sorted_values(values)
    if arr.size == 0:
        return 0
    return len(greedy_cover_starts(arr, width, stop_after=stop_after))


def covering_lower_bound(sorted_values: np.ndarray, width: float) -> int:
    """Cheap certified lower bound: ceil(B/2) where B counts occupied bins of
    width 2w, since one closed w-interval meets at most two such bins."""
    if len(sorted_values) == 0:
        return 0
    bins = np.floor(sorted_values / (2.0 * width))
    occupied = 1 + int(np.count_nonzero(np.diff(bins)))
    return (occupied + 1) // 2


@dataclass(frozen=True)
class ProjectionProfile:
    direction: Direction
    values: np.ndarray  # sorted ascending
    covering_number: int
    width: float


def project(ps: LatticePointSet, e: Direction) -> ProjectionProfile:
    """Orthogonal projection values of the set along e, with the covering
    number at width delta attached."""
    c, s = e.unit
    delta = ps.scale.delta
    vals = (ps.points[:, 0] * c + ps.points[:, 1] * s) * delta
    vals = _sorted_values(vals)
    return ProjectionProfile(e, vals, covering_number_1d(vals, delta), delta)


@dataclass(frozen=True)
class DirectionSetES:
    """Sweep-grid approximation of E_s, with the full sweep table retained.

    `sweep_counts` are exact covering numbers for members; for non-members
    they may be clipped to threshold+1 (the sweep stops counting once
    membership is decided) unless the set was built with full_counts=True.
    """

    params: ParamTriple
    members: list[Direction]
    threshold: float  # delta^-s, for display; membership used exact arithmetic
    sweep_thetas: np.ndarray = field(repr=False)
    sweep_counts: np.ndarray = field(repr=False)
    sweep_is_member: np.ndarray = field(repr=False)

    def member_thetas(self) -> np.ndarray:
        return np.array([d.theta for d in self.members])

    def member_arcs(self) -> list[tuple[float, float]]:
        """Membership as maximal runs [theta_lo, theta_hi] of consecutive
        sweep gridpoints, merged across the 0 ~ pi wrap."""
        flags = self.sweep_is_member
        if not flags.any():
            return []
        th = self.sweep_thetas
        arcs = []
        start = None
        for i, f in enumerate(flags):
            if f and start is None:
                start = i
            elif not f and start is not None:
                arcs.append((th[start], th[i - 1]))
                start = None
        if start is not None:
            arcs.append((th[start], th[-1]))
        if len(arcs) > 1 and flags[0] and flags[-1]:
            first = arcs.pop(0)
            last = arcs.pop()
            arcs.append((last[0], first[1]))  # wraps through theta = 0
        return arcs


def compute_E_s(
    ps: LatticePointSet,
    params: ParamTriple,
    sweep: int | None = None,
    jobs: int = 1,
    full_counts: bool = False,
) -> DirectionSetES:
    """Evaluate E_s membership on direction_grid(sweep).

    The sweep defaults to 4 * 2^n gridpoints so the angular resolution is
    finer than delta.  Projections for different directions are independent;
    with jobs > 1 they run on a thread pool and are merged in angle order.
    """
    if sweep is None:
        sweep = 4 * ps.scale.side
    if sweep < 1:
        raise InvalidParameterError(f"sweep={sweep} must be >= 1")
    delta = params.delta
    t_int = params.floor_delta_pow(params.s)  # floor(delta^-s), exact
    stop = None if full_counts else t_int + 1
    grid = direction_grid(sweep)
    pts = ps.points
    u = pts[:, 0] * delta
    v = pts[:, 1] * delta

    def count_for(d: Direction) -> int:
        c, s = d.unit
        vals = _sorted_values(u * c + v * s)
        if not full_counts and covering_lower_bound(vals, delta) > t_int:
            return t_int + 1  # certified non-member; exact count not needed
        return len(greedy_cover_starts(vals, delta, stop_after=stop))

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(count_for, grid))
    else:
        counts = [count_for(d) for d in grid]

    counts = np.asarray(counts, dtype=np.int64)
    is_member = counts <= t_int
    members = [d for d, ok in zip(grid, is_member) if ok]
    return DirectionSetES(
        params=params,
        members=members,
        threshold=params.delta_pow(-params.s),
        sweep_thetas=np.array([d.theta for d in grid]),
        sweep_counts=counts,
        sweep_is_member=is_member,
    )


def covering_number_directions(E: DirectionSetES | list[Direction], r: float) -> int:
    """Minimal number of closed arcs of length r covering the member angles
    on the quotient circle [0, pi), wrap-around included."""
    if isinstance(E, DirectionSetES):
        thetas = E.member_thetas()
    else:
        thetas = np.array([d.theta for d in E])
    return covering_number_circle(thetas, r, circumference=np.pi)


def covering_number_circle(points, r: float, circumference: float) -> int:
    """Exact minimal covering of circle points by closed arcs of length r.

    Some optimal cover has every arc's left end anchored at a point.  Fix
    the pivot point right after the largest cyclic gap; the arc covering the
    pivot is anchored at a point within distance r behind it, and given that
    first arc the rest of the circle is covered optimally by the linear
    greedy.  Minimizing over the (few) admissible anchors is exact.
    """
    if r <= 0:
        raise InvalidParameterError(f"arc length r={r} must be positive")
    th = np.unique(np.asarray(points, dtype=np.float64) % circumference)
    k = len(th)
    if k == 0:
        return 0
    if r >= circumference:
        return 1
    gaps = np.diff(np.concatenate([th, [th[0] + circumference]]))
    reach = r * (1.0 + COVER_RTOL)

    def greedy_from(idx: int) -> int:
        # cover all k points going cyclically from the arc anchored at th[idx]
        count = 0
        pos = 0  # points consumed, counted from idx
        while pos < k:
            count += 1
            i = idx + pos
            start = th[i % k] + (circumference if i >= k else 0.0)
            limit = start + reach
            while pos < k:
                j = idx + pos
                val = th[j % k] + (circumference if j >= k else 0.0)
                if val <= limit:
                    pos += 1
                else:
                    break
        return count

    pivot = (int(np.argmax(gaps)) + 1) % k
    best = None
    for idx in range(k):
        back = (th[pivot] - th[idx]) % circumference
        if back <= reach:  # the arc anchored at th[idx] reaches the pivot
            cnt = greedy_from(idx)
            best = cnt if best is None else min(best, cnt)
    return best


def esets_csv(es: DirectionSetES, stream) -> None:
    """Emit the sweep table: columns theta,covering_number,is_member."""
    stream.write("theta,covering_number,is_member\n")
    for th, cnt, ok in zip(es.sweep_thetas, es.sweep_counts, es.sweep_is_member):
        stream.write(f"{th:.17g},{int(cnt)},{int(ok)}\n")
