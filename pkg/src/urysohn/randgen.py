"""Seeded random instance generators for experiments and acceptance drivers.

Everything draws from a caller-supplied random.Random, so a fixed seed
reproduces runs bit for bit.  Metrics are built incrementally with each new
distance clamped into its feasible triangle window; predicate tables are
built the same way inside their Katetov windows, which keeps every
generated object valid by construction.
"""
from __future__ import annotations

from fractions import Fraction
from random import Random
from typing import Sequence

from .cauchy import IndexedStructure, indexed_structure
from .metric import FinMetric, fin_metric, tuple_dist
from .rationals import ZERO
from .relational import (
    StructureK,
    canonical_extend,
    pattern_slots,
    tuples_over,
)
from .spaces import CompactPresentation, PolishPresentation, SuitableFn, suitable


def rand_rat(rng: Random, den: int = 8, lo: int = 1, hi: int = 16) -> Fraction:
    return Fraction(rng.randint(lo, hi), den)


def _clamp(v: Fraction, lo: Fraction | None, hi: Fraction | None) -> Fraction:
    if lo is not None and v < lo:
        v = lo
    if hi is not None and v > hi:
        v = hi
    return v


def random_metric(rng: Random, ids: Sequence[str], den: int = 8, hi: int = 16) -> FinMetric:
    """Random rational metric; distances live on the grid k/den."""
    pts = list(ids)
    entries: dict[tuple[str, str], Fraction] = {}

    def d(x, y):
        return entries.get((x, y)) or entries[(y, x)]

    for i, x in enumerate(pts):
        for y in pts[i + 1 :]:
            lo = max(
                (abs(d(x, z) - d(y, z)) for z in pts[:i]),
                default=Fraction(1, den),
            )
            lo = max(lo, Fraction(1, den))
            cap = min(
                (d(x, z) + d(y, z) for z in pts[:i]),
                default=None,
            )
            entries[(x, y)] = _clamp(rand_rat(rng, den, 1, hi), lo, cap)
    return fin_metric(pts, entries)


def random_table(
    rng: Random,
    metric: FinMetric,
    arity: int,
    base: dict[tuple[str, ...], Fraction] | None = None,
    den: int = 8,
    hi: int = 16,
) -> dict[tuple[str, ...], Fraction]:
    """Complete a partial 1-Lipschitz table with random in-window values."""
    out = dict(base or {})
    for tup in tuples_over(metric.points, arity):
        if tup in out:
            continue
        lo = max(
            (w - tuple_dist(metric, t2, tup) for t2, w in out.items()),
            default=ZERO,
        )
        cap = min(
            (w + tuple_dist(metric, t2, tup) for t2, w in out.items()),
            default=None,
        )
        out[tup] = _clamp(rand_rat(rng, den, 0, hi), max(lo, ZERO), cap)
    return out


def random_structure_k(
    rng: Random,
    ids: Sequence[str],
    max_arity: int = 2,
    den: int = 8,
) -> StructureK:
    metric = random_metric(rng, ids, den)
    n_a = rng.randint(1, min(max_arity, len(metric)))
    pred = {}
    for n, m in pattern_slots(n_a):
        for tup, v in random_table(rng, metric, n, den=den).items():
            pred[(n, m, tup)] = v
    return StructureK(metric, n_a, pred)


def random_extension_k(
    rng: Random,
    s: StructureK,
    new_id: str,
    raise_bound: bool = False,
    den: int = 8,
) -> StructureK:
    """One random extra point; optionally one extra predicate slot per arity."""
    pts = list(s.points)
    entries = {(x, y): s.metric.d(x, y) for x, y in s.metric.pairs()}
    new_entries: dict[str, Fraction] = {}
    for i, x in enumerate(pts):
        lo = max(
            (abs(new_entries[y] - s.metric.d(x, y)) for y in pts[:i]),
            default=Fraction(1, den),
        )
        lo = max(lo, Fraction(1, den))
        cap = min(
            (new_entries[y] + s.metric.d(x, y) for y in pts[:i]),
            default=None,
        )
        new_entries[x] = _clamp(rand_rat(rng, den), lo, cap)
    entries.update({(x, new_id): v for x, v in new_entries.items()})
    metric = fin_metric(pts + [new_id], entries)
    n_b = min(s.n_a + 1, len(pts) + 1) if raise_bound else s.n_a
    pred = {}
    for n, m in pattern_slots(n_b):
        if n <= s.n_a and m <= s.n_a + 1 - n:
            base = {tup: s.pred[(n, m, tup)] for tup in tuples_over(s.points, n)}
        else:
            base = {}
        for tup, v in random_table(rng, metric, n, base, den=den).items():
            pred[(n, m, tup)] = v
    return StructureK(metric, n_b, pred)


def random_slot_permutation(rng: Random, s: StructureK) -> tuple[StructureK, dict[int, dict[int, int]]]:
    """Shuffle the slot indices per arity; returns the permuted copy and maps."""
    sigma: dict[int, dict[int, int]] = {}
    for n in range(1, s.n_a + 1):
        targets = list(range(1, s.n_a + 2 - n))
        rng.shuffle(targets)
        sigma[n] = {m: targets[m - 1] for m in range(1, s.n_a + 2 - n)}
    pred = {(n, sigma[n][m], tup): v for (n, m, tup), v in s.pred.items()}
    return StructureK(s.metric, s.n_a, pred), sigma


def random_extension_bark(
    rng: Random,
    x: IndexedStructure,
    new_id: str = "bnew",
    raise_bound: bool = False,
    den: int = 8,
) -> IndexedStructure:
    """Random one-point extension; a raised bound brings one fresh slot per arity."""
    pts = list(x.points)
    entries = {(a, b): x.metric.d(a, b) for a, b in x.metric.pairs()}
    new_entries: dict[str, Fraction] = {}
    for i, a in enumerate(pts):
        lo = max(
            (abs(new_entries[b] - x.metric.d(a, b)) for b in pts[:i]),
            default=Fraction(1, den),
        )
        lo = max(lo, Fraction(1, den))
        cap = min(
            (new_entries[b] + x.metric.d(a, b) for b in pts[:i]),
            default=None,
        )
        new_entries[a] = _clamp(rand_rat(rng, den), lo, cap)
    entries.update({(a, new_id): v for a, v in new_entries.items()})
    metric = fin_metric(pts + [new_id], entries)
    bound = min(x.bound + 1, len(pts) + 1) if raise_bound else x.bound
    indices = {}
    for n in range(1, bound + 1):
        old = x.indices.get(n, ())
        need = bound + 1 - n
        fresh = []
        nxt = max(old, default=0) + 1
        while len(old) + len(fresh) < need:
            fresh.append(nxt)
            nxt += 1
        indices[n] = tuple(old) + tuple(fresh)
    pred = {}
    for n in indices:
        for m in indices[n]:
            base = (
                {tup: x.pred[(n, m, tup)] for tup in tuples_over(x.points, n)}
                if m in x.indices.get(n, ())
                else {}
            )
            for tup, v in random_table(rng, metric, n, base, den=den).items():
                pred[(n, m, tup)] = v
    return IndexedStructure(metric, bound, indices, pred)


def random_bark(
    rng: Random,
    ids: Sequence[str],
    bound: int | None = None,
    den: int = 8,
) -> IndexedStructure:
    """Random structure with arbitrary (possibly sparse) index sets."""
    metric = random_metric(rng, ids, den)
    if bound is None:
        bound = rng.randint(0, min(2, len(metric)))
    indices = {
        n: tuple(sorted(rng.sample(range(1, 10), bound - n + 1)))
        for n in range(1, bound + 1)
    }
    pred = {}
    for n in indices:
        for m in indices[n]:
            for tup, v in random_table(rng, metric, n, den=den).items():
                pred[(n, m, tup)] = v
    return IndexedStructure(metric, bound, indices, pred)


def random_suitable(rng: Random, k: CompactPresentation, den: int = 8, hi: int = 8) -> SuitableFn:
    """Random profile: random consistent values on a random support."""
    pins: dict[int, Fraction] = {}
    for i in range(1, k.size + 1):
        if rng.random() < 0.6:
            lo = max((v - k.d_idx(j, i) for j, v in pins.items()), default=ZERO)
            cap = min((v + k.d_idx(j, i) for j, v in pins.items()), default=None)
            pins[i] = _clamp(rand_rat(rng, den, 0, hi), max(lo, ZERO), cap)
    return suitable(pins)


def compatible_profile(
    rng: Random,
    k: CompactPresentation,
    neighbours: Sequence[tuple[SuitableFn, Fraction]],
    den: int = 8,
    hi: int = 8,
) -> SuitableFn:
    """Random profile clamped between the envelopes the neighbours admit.

    The pointwise lower and upper envelopes of 1-Lipschitz functions are
    1-Lipschitz, so clamping a random profile between them stays valid.
    """
    from .spaces import eval_suitable, suitable_from_values

    raw = random_suitable(rng, k, den, hi)
    values = {}
    for n in range(1, k.size + 1):
        v = eval_suitable(raw, n, k)
        lo = max(
            (eval_suitable(f, n, k) - d for f, d in neighbours),
            default=None,
        )
        cap = min(
            (eval_suitable(f, n, k) + d for f, d in neighbours),
            default=None,
        )
        values[n] = _clamp(v, max(lo, ZERO) if lo is not None else ZERO, cap)
    return suitable_from_values(values, k)


def random_structure_c(rng: Random, k: CompactPresentation, ids: Sequence[str], den: int = 8):
    """Random valid product-side structure: profiles built compatibly in order."""
    from .product import StructureC

    metric = random_metric(rng, ids, den)
    fns = {}
    done: list[str] = []
    for p in metric.points:
        fns[p] = compatible_profile(
            rng, k, [(fns[q], metric.d(p, q)) for q in done], den
        )
        done.append(p)
    return StructureC(metric, fns)


def random_structure_l(
    rng: Random,
    z: PolishPresentation,
    ids: Sequence[str],
    lip: Fraction,
    den: int = 8,
    retries: int = 200,
):
    """Random valid Lipschitz-labelled structure over a Polish presentation.

    Label and triangle constraints can collide for tight metrics, so draws
    are rejected until a valid instance appears; small instances converge
    in a couple of tries.
    """
    from .lipschitz import StructureL, validate_l

    for _ in range(retries):
        labels = {p: rng.randint(1, z.size) for p in ids}
        pts = list(ids)
        entries: dict[tuple[str, str], Fraction] = {}
        feasible = True
        for i, x in enumerate(pts):
            for y in pts[i + 1 :]:
                lo = max(
                    (
                        abs(
                            (entries.get((x, w)) or entries[(w, x)])
                            - (entries.get((y, w)) or entries[(w, y)])
                        )
                        for w in pts[:i]
                    ),
                    default=Fraction(1, den),
                )
                lo = max(lo, Fraction(1, den), z.d_idx(labels[x], labels[y]) / lip)
                cap = min(
                    (
                        (entries.get((x, w)) or entries[(w, x)])
                        + (entries.get((y, w)) or entries[(w, y)])
                        for w in pts[:i]
                    ),
                    default=None,
                )
                if cap is not None and lo > cap:
                    feasible = False
                    break
                entries[(x, y)] = _clamp(rand_rat(rng, den, 1, 4 * den), lo, cap)
            if not feasible:
                break
        if not feasible:
            continue
        s = StructureL(fin_metric(pts, entries), labels, lip)
        if validate_l(s, z) == []:
            return s
    raise RuntimeError("could not draw a valid labelled structure")


def random_compact(rng: Random, size: int, den: int = 8) -> CompactPresentation:
    ids = [f"q{i}" for i in range(1, size + 1)]
    return CompactPresentation(random_metric(rng, ids, den))


def random_polish(rng: Random, size: int, den: int = 8) -> PolishPresentation:
    ids = [f"z{i}" for i in range(1, size + 1)]
    return PolishPresentation(random_metric(rng, ids, den))


def random_wish_extension(
    rng: Random,
    o,
    side_points,
    x: IndexedStructure,
    side_globals: dict[tuple[int, int], int],
    build_depth: int,
    k: int,
    den: int = 8,
) -> IndexedStructure:
    """Random one-point extension of an embedded copy, measured in the oracle.

    The base part is the copy read at the deepest level the coming build will
    touch, so its metric and predicate rows are exact oracle data; the wish
    point's rows are random values clamped into their feasible windows.
    """
    from .cauchy import required_depth

    level = required_depth(k, build_depth)
    measured = [p.at(level) for p in side_points]
    entries = {
        (a, b): o.distance(a, b)
        for i, a in enumerate(measured)
        for b in measured[i + 1 :]
    }
    new_entries: dict[str, Fraction] = {}
    for i, a in enumerate(measured):
        lo = max(
            (abs(new_entries[b] - o.distance(a, b)) for b in measured[:i]),
            default=Fraction(1, den),
        )
        lo = max(lo, Fraction(1, den))
        cap = min(
            (new_entries[b] + o.distance(a, b) for b in measured[:i]),
            default=None,
        )
        new_entries[a] = _clamp(rand_rat(rng, den), lo, cap)
    entries.update({(a, "wish"): v for a, v in new_entries.items()})
    metric = fin_metric(measured + ["wish"], entries)
    pred = {}
    for n in x.indices:
        for m in x.indices[n]:
            g = side_globals[(n, m)]
            base = {
                tup: o.predicate_value(n, g, tup)
                for tup in tuples_over(tuple(measured), n)
            }
            for tup, v in random_table(rng, metric, n, base, den=den).items():
                pred[(n, m, tup)] = v
    return IndexedStructure(metric, x.bound, dict(x.indices), pred)


def random_target_bark(
    rng: Random,
    n_points: int,
    max_arity: int = 2,
    den: int = 8,
) -> IndexedStructure:
    """Initial-segment-indexed structure, the shape solvers consume directly."""
    ids = [f"b{i}" for i in range(1, n_points + 1)]
    metric = random_metric(rng, ids, den)
    bound = rng.randint(0, min(max_arity, n_points))
    pred = {}
    for n in range(1, bound + 1):
        for m in range(1, bound + 2 - n):
            for tup, v in random_table(rng, metric, n, den=den).items():
                pred[(n, m, tup)] = v
    return indexed_structure(metric, bound, pred)
