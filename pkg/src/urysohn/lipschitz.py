"""Structures carrying an L-Lipschitz map into a fixed Polish presentation.

Each point is labelled with one dense index of the target space; the label
metric must contract by the factor L.  The limit function is read off a
Cauchy point by taking the label at depth j, certified within L * 2^-j.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .cauchy import CauchyPoint, SolverError, required_depth, solve_sandwich
from .certificates import Check
from .engine import LimitOracle
from .metric import FinMetric, jep_gap_metric, path_amalgam_metric, validate_metric
from .rationals import ZERO, pow2
from .spaces import PolishPresentation


@dataclass(frozen=True)
class StructureL:
    """Finite metric space with a dense-index label per point."""

    metric: FinMetric
    labels: dict[str, int]
    lip: Fraction

    @property
    def points(self) -> tuple[str, ...]:
        return self.metric.points


def validate_l(s: StructureL, z: PolishPresentation) -> list[str]:
    report = [f"metric: {msg}" for msg in validate_metric(s.metric)]
    if s.lip <= 0:
        report.append("the Lipschitz constant must be positive")
    for p in s.points:
        if p not in s.labels:
            report.append(f"missing label for {p!r}")
            continue
        try:
            z.check_index(s.labels[p])
        except IndexError as exc:
            report.append(str(exc))
    if report:
        return report
    for i, a in enumerate(s.points):
        for b in s.points[i + 1 :]:
            dz = z.d_idx(s.labels[a], s.labels[b])
            if dz > s.lip * s.metric.d(a, b):
                report.append(
                    f"lipschitz ({a},{b}): {dz} > {s.lip} * {s.metric.d(a, b)}"
                )
    return report


def amalgamate_l(
    b: StructureL,
    c: StructureL,
    a: StructureL,
    map_b: Mapping[str, str],
    map_c: Mapping[str, str],
    z: PolishPresentation,
) -> StructureL:
    if b.lip != c.lip:
        raise ValueError(f"mismatched Lipschitz constants: {b.lip} != {c.lip}")
    for p in a.points:
        if b.labels[map_b[p]] != c.labels[map_c[p]]:
            raise ValueError(f"sides disagree on the label of {p!r}")
    metric = path_amalgam_metric(b.metric, c.metric, a.metric, map_b, map_c)
    back_b = {map_b[p]: p for p in a.points}
    back_c = {map_c[p]: p for p in a.points}
    labels = {}
    for p in b.points:
        labels[back_b.get(p, p)] = b.labels[p]
    for p in c.points:
        labels.setdefault(back_c.get(p, p), c.labels[p])
    return StructureL(metric, labels, b.lip)


def joint_embed_l(a: StructureL, b: StructureL, z: PolishPresentation) -> StructureL:
    """Disjoint union at a constant gap.

    The gap uses max d_Z(labels)/L across the two sides, so the Lipschitz
    condition holds at every cross pair for any positive L.
    """
    if a.lip != b.lip:
        raise ValueError(f"mismatched Lipschitz constants: {a.lip} != {b.lip}")
    m = max(a.metric.diam(), b.metric.diam())
    m_f = max(
        (
            z.d_idx(a.labels[p], b.labels[q]) / a.lip
            for p in a.points
            for q in b.points
        ),
        default=ZERO,
    )
    m = max(m, m_f)
    gap = 2 * m if m > 0 else Fraction(1)
    metric = jep_gap_metric(a.metric, b.metric, gap)
    return StructureL(metric, {**a.labels, **b.labels}, a.lip)


def check_label_modulus(
    seq: Sequence[int], k: int, z: PolishPresentation, lip: Fraction
) -> list[Check]:
    """The label sequence must contract like d_Z(q_j, q_i) < L / (k 2^(j+2))."""
    checks = []
    for j in range(1, len(seq) + 1):
        for i in range(j + 1, len(seq) + 1):
            checks.append(
                Check(
                    f"modulus-{j}-{i}",
                    z.d_idx(seq[j - 1], seq[i - 1]),
                    "<",
                    lip / (k * 2 ** (j + 2)),
                )
            )
    return checks


@dataclass(frozen=True)
class LipschitzExtensionOutcome:
    point: CauchyPoint
    checks: tuple[Check, ...]


def extend_one_point_l(
    o: LimitOracle,
    anchors: Sequence[CauchyPoint],
    target_metric: FinMetric,
    target: int | Sequence[int],
    depth: int,
    drift_slack: int = 0,
) -> LipschitzExtensionOutcome:
    """Realize the last point of ``target_metric`` with label targets ``target``.

    A plain index means the constant sequence.  Every per-step Lipschitz
    inequality against the base is verified exactly before growth.
    """
    z = o.polish
    lip = o.lip_const
    if z is None or lip is None:
        raise SolverError("oracle does not carry a polish presentation")
    k = len(target_metric)
    seq = [target] * depth if isinstance(target, int) else list(target)
    if len(seq) < depth:
        raise SolverError(f"label sequence of length {len(seq)} shorter than {depth}")
    for i in seq:
        z.check_index(i)
    checks: list[Check] = list(check_label_modulus(seq[:depth], k, z, lip))
    for c in checks:
        if not c.holds:
            raise SolverError(f"label sequence breaks its modulus: {c.name}")
    if len(anchors) != k - 1:
        raise SolverError(f"{k}-point target needs {k - 1} anchors")
    need = required_depth(k, depth)
    for i, a in enumerate(anchors):
        if a.depth < need:
            raise SolverError(f"anchor {i} too shallow: depth {need} required")
    pts = target_metric.points
    olds, new_pt = pts[:-1], pts[-1]

    ids: list[str] = []
    certs: list[Fraction] = []
    for level in range(1, depth + 1):
        avec = [a.at(required_depth(k, level)) for a in anchors]
        bound = pow2(-(level + k + 1 - drift_slack))
        for i in range(len(avec)):
            for j in range(i + 1, len(avec)):
                drift = abs(
                    o.distance(avec[i], avec[j]) - target_metric.d(olds[i], olds[j])
                )
                checks.append(Check(f"drift-{level}-{olds[i]}-{olds[j]}", drift, "<", bound))
                if drift >= bound:
                    raise SolverError(
                        f"anchor drift {drift} at level {level} reaches {bound}"
                    )
        prev = ids[-1] if ids else None
        sol = solve_sandwich(
            avec,
            [target_metric.d(olds[i], new_pt) for i in range(len(olds))],
            o.distance,
            level,
            prev,
        )
        checks.extend(sol.checks)
        base_dists = {a: sol.eta[i] for i, a in enumerate(avec)}
        if prev:
            base_dists[prev] = sol.link
        label = seq[level - 1]
        for u, du in base_dists.items():
            c = Check(
                f"step-lipschitz-{level}-{u}",
                z.d_idx(label, o.lip_index_at(u)),
                "<=",
                lip * du,
            )
            checks.append(c)
            if not c.holds:
                raise SolverError(
                    f"label {label} at level {level} breaks the Lipschitz bound "
                    f"against {u!r}"
                )
        result = o.grow(base_dists, lip_index=label)
        ids.append(result.point)
        if prev:
            certs.append(sol.link)
    return LipschitzExtensionOutcome(
        CauchyPoint(tuple(ids), tuple(certs)), tuple(checks)
    )


def snapshot_lipschitz(o: LimitOracle) -> StructureL:
    """The oracle's current label state as one finite structure."""
    return StructureL(o.metric(), {p: o.lip_index_at(p) for p in o.points}, o.lip_const)


def eval_limit_function(
    o: LimitOracle, p: CauchyPoint, depth: int
) -> tuple[int, Fraction]:
    """Dense index at the given depth plus the certified radius L * 2^-depth.

    The radius shrinks with depth, so deeper reads never loosen the bound.
    """
    if depth < 1 or p.depth < depth:
        raise SolverError(f"point of depth {p.depth} cannot be read at {depth}")
    if len(p.certs) != p.depth - 1:
        raise SolverError("missing gap certificates")
    return o.lip_index_at(p.at(depth)), o.lip_const * pow2(-depth)
