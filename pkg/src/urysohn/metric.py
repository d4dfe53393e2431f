"""Finite rational metric spaces: validation, amalgamation, one-point feasibility."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .rationals import ZERO


class MetricTableError(Exception):
    """Structural defect in a distance table (missing or ill-typed entry).

    Distinct from an axiom violation, which is reported, not raised.
    """


class WitnessError(Exception):
    """A supplied embedding witness is not what it claims to be."""


@dataclass(frozen=True)
class FinMetric:
    """Finite metric space with exact rational distances.

    The order of ``points`` is significant: all tuple enumeration
    downstream follows it.  Treated as immutable.
    """

    points: tuple[str, ...]
    table: dict[tuple[str, str], Fraction]

    def d(self, x: str, y: str) -> Fraction:
        if x == y:
            if x not in self.points:
                raise MetricTableError(f"unknown point {x!r}")
            return ZERO
        try:
            return self.table[(x, y)]
        except KeyError:
            raise MetricTableError(f"no distance entry for ({x!r}, {y!r})") from None

    def pairs(self) -> Iterable[tuple[str, str]]:
        return combinations(self.points, 2)

    def diam(self) -> Fraction:
        return max((self.d(x, y) for x, y in self.pairs()), default=ZERO)

    def max_value(self) -> Fraction:
        return self.diam()

    def restrict(self, ids: Iterable[str]) -> "FinMetric":
        keep = tuple(p for p in self.points if p in set(ids))
        return FinMetric(
            keep,
            {
                (x, y): v
                for (x, y), v in self.table.items()
                if x in keep and y in keep
            },
        )

    def __len__(self) -> int:
        return len(self.points)


def fin_metric(points: Iterable[str], entries: Mapping[tuple[str, str], Fraction]) -> FinMetric:
    """Build a FinMetric from one-sided pair entries; symmetric closure is implied."""
    pts = tuple(points)
    if len(set(pts)) != len(pts):
        raise MetricTableError("duplicate point ids")
    table: dict[tuple[str, str], Fraction] = {}
    for (x, y), v in entries.items():
        if x == y:
            raise MetricTableError(f"diagonal entry for {x!r}")
        if (x, y) in table and table[(x, y)] != v:
            raise MetricTableError(f"conflicting entries for ({x!r}, {y!r})")
        table[(x, y)] = v
        table[(y, x)] = v
    return FinMetric(pts, table)


def single_point(pid: str) -> FinMetric:
    return FinMetric((pid,), {})


EMPTY_METRIC = FinMetric((), {})


def validate_metric(m: FinMetric) -> list[str]:
    """Check all four metric axioms; return one message per violation.

    A missing table entry raises MetricTableError instead of being reported.
    """
    report = []
    for x, y in m.pairs():
        dxy = m.d(x, y)
        dyx = m.d(y, x)
        if dxy != dyx:
            report.append(f"symmetry ({x},{y}): {dxy} != {dyx}")
        if dxy < 0:
            report.append(f"negativity ({x},{y}): {dxy} < 0")
        elif dxy == 0:
            report.append(f"identity ({x},{y}): distinct points at distance 0")
    for x, z, y in _ordered_triples(m.points):
        if m.d(x, y) > m.d(x, z) + m.d(z, y):
            report.append(
                f"triangle ({x},{y},{z}): {m.d(x, y)} > {m.d(x, z)} + {m.d(z, y)}"
            )
    return report


def _ordered_triples(points: tuple[str, ...]):
    for x, y, z in combinations(points, 3):
        yield x, y, z
        yield x, z, y
        yield y, x, z


def tuple_dist(m: FinMetric, a: tuple[str, ...], b: tuple[str, ...]) -> Fraction:
    """Sum metric on tuples: d(a, b) = sum_i d(a_i, b_i)."""
    return sum((m.d(x, y) for x, y in zip(a, b)), start=ZERO)


def path_amalgam_metric(
    b: FinMetric,
    c: FinMetric,
    a: FinMetric,
    map_b: Mapping[str, str],
    map_c: Mapping[str, str],
) -> FinMetric:
    """Shortest-path amalgam of b and c over the common subspace a.

    ``map_b``/``map_c`` send a's points into b/c and must be isometric.
    The result lives on a's ids, b's non-image ids and c's non-image ids;
    cross distances go through the cheapest common point.
    """
    _check_isometric(a, b, map_b, "map_b")
    _check_isometric(a, c, map_c, "map_c")
    img_b = {map_b[p]: p for p in a.points}
    img_c = {map_c[p]: p for p in a.points}
    rest_b = [p for p in b.points if p not in img_b]
    rest_c = [p for p in c.points if p not in img_c]
    if not a.points and rest_b and rest_c:
        raise WitnessError(
            "empty common part with both sides nonempty; use jep_gap_metric"
        )
    clash = (set(rest_b) & set(rest_c)) | (set(a.points) & set(rest_b + rest_c))
    if clash:
        raise MetricTableError(f"id collision outside the common part: {sorted(clash)}")

    points = tuple(a.points) + tuple(rest_b) + tuple(rest_c)
    back_b = {p: img_b.get(p, p) for p in b.points}  # b id -> output id
    back_c = {p: img_c.get(p, p) for p in c.points}
    entries: dict[tuple[str, str], Fraction] = {}
    for x, y in b.pairs():
        entries[(back_b[x], back_b[y])] = b.d(x, y)
    for x, y in c.pairs():
        key = (back_c[x], back_c[y])
        if key not in entries and (key[1], key[0]) not in entries:
            entries[key] = c.d(x, y)
    for x in rest_b:
        for y in rest_c:
            entries[(x, y)] = min(
                b.d(x, map_b[z]) + c.d(map_c[z], y) for z in a.points
            )
    return fin_metric(points, entries)


def _check_isometric(a: FinMetric, target: FinMetric, phi: Mapping[str, str], label: str):
    if set(phi.keys()) != set(a.points):
        raise WitnessError(f"{label} does not cover the common part")
    if len(set(phi.values())) != len(a.points):
        raise WitnessError(f"{label} is not injective")
    for p in a.points:
        if phi[p] not in target.points:
            raise WitnessError(f"{label} sends {p!r} outside the target")
    for x, y in a.pairs():
        if target.d(phi[x], phi[y]) != a.d(x, y):
            raise WitnessError(
                f"{label} distorts ({x},{y}): {target.d(phi[x], phi[y])} != {a.d(x, y)}"
            )


def jep_gap_metric(a: FinMetric, b: FinMetric, gap: Fraction) -> FinMetric:
    """Disjoint union of a and b with every cross distance equal to ``gap``.

    A constant cross distance is a metric iff 2*gap covers both diameters.
    """
    if not a.points:
        return b
    if not b.points:
        return a
    if set(a.points) & set(b.points):
        raise MetricTableError("point ids must be disjoint")
    if gap <= 0:
        raise ValueError("gap must be positive when both sides are nonempty")
    for side, name in ((a, "left"), (b, "right")):
        for x, y in side.pairs():
            if side.d(x, y) > 2 * gap:
                raise ValueError(
                    f"infeasible gap: triangle ({x},{y}) on the {name} side needs "
                    f"{side.d(x, y)} <= 2*{gap}"
                )
    entries = dict(a.table)
    entries.update(b.table)
    one_sided = {
        (x, y): v for (x, y), v in entries.items()
    }
    for x in a.points:
        for y in b.points:
            one_sided[(x, y)] = gap
    return fin_metric(tuple(a.points) + tuple(b.points), one_sided)


@dataclass(frozen=True)
class OnePointSpec:
    """Proposed distances from a new point to a base set of existing points."""

    base: tuple[str, ...]
    eta: dict[str, Fraction]


def one_point_feasible(m: FinMetric, spec: OnePointSpec) -> tuple[bool, str | None]:
    """Can a new point be adjoined to the base subspace at the eta distances?

    Returns (True, None) or (False, first violated inequality).  The check
    is exactly the triangle sandwich |eta_i - eta_j| <= d(i,j) <= eta_i + eta_j.
    """
    for p in spec.base:
        if p not in m.points:
            raise MetricTableError(f"base point {p!r} not in the space")
        if spec.eta[p] == 0:
            raise ValueError(f"eta({p}) = 0: the new point must be distinct")
        if spec.eta[p] < 0:
            raise ValueError(f"eta({p}) < 0")
    for x, y in combinations(spec.base, 2):
        lo, hi = spec.eta[x], spec.eta[y]
        dxy = m.d(x, y)
        if abs(lo - hi) > dxy:
            return False, f"|eta({x}) - eta({y})| = {abs(lo - hi)} > d = {dxy}"
        if dxy > lo + hi:
            return False, f"d({x},{y}) = {dxy} > eta({x}) + eta({y}) = {lo + hi}"
    return True, None
