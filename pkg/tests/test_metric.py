from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from urysohn.metric import (
    FinMetric,
    MetricTableError,
    OnePointSpec,
    WitnessError,
    fin_metric,
    jep_gap_metric,
    one_point_feasible,
    path_amalgam_metric,
    single_point,
    validate_metric,
)

F = Fraction


def space(*entries):
    pts = []
    table = {}
    for x, y, v in entries:
        for p in (x, y):
            if p not in pts:
                pts.append(p)
        table[(x, y)] = F(v)
    return fin_metric(pts, table)


def test_triangle_violation_reported():
    m = space(("x", "y", 1), ("y", "z", 1), ("x", "z", 3))
    report = validate_metric(m)
    assert any("triangle" in msg and "x" in msg and "z" in msg for msg in report)


def test_single_point_valid():
    assert validate_metric(single_point("x")) == []


def test_zero_distance_between_distinct_points():
    m = space(("x", "y", 0))
    report = validate_metric(m)
    assert any("identity" in msg for msg in report)


def test_missing_entry_is_structural():
    m = FinMetric(("x", "y"), {})
    with pytest.raises(MetricTableError):
        validate_metric(m)


def test_path_amalgam_single_path():
    a = single_point("a")
    b = space(("a", "b", 1))
    c = space(("a", "c", 2))
    d = path_amalgam_metric(b, c, a, {"a": "a"}, {"a": "a"})
    assert d.d("b", "c") == 3
    assert validate_metric(d) == []


def test_path_amalgam_min_formula():
    # cross distance evaluated by hand: min(1+5, 3+3) = 6
    a = space(("a1", "a2", 2))
    b = space(("a1", "a2", 2), ("b", "a1", 1), ("b", "a2", 3))
    c = space(("a1", "a2", 2), ("c", "a1", 5), ("c", "a2", 3))
    ident = {"a1": "a1", "a2": "a2"}
    d = path_amalgam_metric(b, c, a, ident, ident)
    assert d.d("b", "c") == 6
    assert d.d("b", "a1") == 1 and d.d("c", "a2") == 3
    assert validate_metric(d) == []


def test_path_amalgam_no_new_points():
    a = space(("x", "y", 1))
    d = path_amalgam_metric(a, a, a, {"x": "x", "y": "y"}, {"x": "x", "y": "y"})
    assert d.points == a.points
    assert d.d("x", "y") == 1


def test_path_amalgam_rejects_distorting_witness():
    a = space(("x", "y", 1))
    b = space(("x", "y", 2))
    with pytest.raises(WitnessError):
        path_amalgam_metric(b, b, a, {"x": "x", "y": "y"}, {"x": "x", "y": "y"})


def test_path_amalgam_empty_common_part_redirects():
    a = FinMetric((), {})
    with pytest.raises(WitnessError, match="jep_gap_metric"):
        path_amalgam_metric(single_point("b"), single_point("c"), a, {}, {})


def test_jep_gap_two_singletons():
    d = jep_gap_metric(single_point("a"), single_point("b"), F(6))
    assert d.d("a", "b") == 6
    assert validate_metric(d) == []


def test_jep_gap_empty_side():
    b = space(("x", "y", 1))
    assert jep_gap_metric(FinMetric((), {}), b, F(1)) is b


def test_jep_gap_constant_cross_condition():
    a = space(("a1", "a2", 2))
    b = space(("b1", "b2", 3))
    d = jep_gap_metric(a, b, F(6))
    assert validate_metric(d) == []
    with pytest.raises(ValueError):
        jep_gap_metric(a, b, F(1))


def test_jep_gap_zero_rejected():
    with pytest.raises(ValueError):
        jep_gap_metric(single_point("a"), single_point("b"), F(0))


def test_one_point_feasible_examples():
    m = space(("v1", "v2", 2))
    ok, _ = one_point_feasible(m, OnePointSpec(("v1", "v2"), {"v1": F(1), "v2": F(1)}))
    assert ok
    ok, why = one_point_feasible(m, OnePointSpec(("v1", "v2"), {"v1": F(1), "v2": F(5)}))
    assert not ok and "4" in why
    ok, _ = one_point_feasible(m, OnePointSpec(("v1", "v2"), {"v1": F(3), "v2": F(3)}))
    assert ok


def test_one_point_zero_eta_rejected():
    m = space(("v1", "v2", 2))
    with pytest.raises(ValueError):
        one_point_feasible(m, OnePointSpec(("v1",), {"v1": F(0)}))


# -- randomized laws ---------------------------------------------------------

rat_eighths = st.integers(min_value=1, max_value=16).map(lambda n: F(n, 8))


@st.composite
def random_metric(draw, ids=("p", "q", "r", "s")):
    n = draw(st.integers(min_value=1, max_value=len(ids)))
    pts = list(ids[:n])
    table = {}
    for i, x in enumerate(pts):
        for y in pts[i + 1 :]:
            raw = draw(rat_eighths)
            lo = max(
                (abs(table[(x, z)] - table[(y, z)]) for z in pts[:i] if (y, z) in table),
                default=F(1, 8),
            )
            hi = min(
                (table[(x, z)] + table[(y, z)] for z in pts[:i] if (y, z) in table),
                default=F(16, 8),
            )
            if lo > hi:
                lo = hi
            table[(x, y)] = min(max(raw, lo), hi)
            table[(y, x)] = table[(x, y)]
    one_sided = {(x, y): v for (x, y), v in table.items() if pts.index(x) < pts.index(y)}
    return fin_metric(pts, one_sided)


@given(random_metric())
@settings(max_examples=60, deadline=None)
def test_random_generator_yields_metrics(m):
    assert validate_metric(m) == []


@given(random_metric(ids=("p", "q", "r")), random_metric(ids=("x", "y", "z")), rat_eighths)
@settings(max_examples=60, deadline=None)
def test_jep_gap_with_doubled_max_always_valid(a, b, _v):
    gap = 2 * max(a.diam(), b.diam(), F(1, 2))
    d = jep_gap_metric(a, b, gap)
    assert validate_metric(d) == []
    for x, y in a.pairs():
        assert d.d(x, y) == a.d(x, y)


@given(random_metric(ids=("p", "q", "r", "s")), st.data())
@settings(max_examples=60, deadline=None)
def test_path_amalgam_is_identity_on_both_sides(m, data):
    cut = data.draw(st.integers(min_value=1, max_value=len(m.points)))
    common = m.points[:cut]
    a = m.restrict(common)
    ident = {p: p for p in common}
    d = path_amalgam_metric(m, a, a, ident, ident)
    for x, y in m.pairs():
        assert d.d(x, y) == m.d(x, y)
    assert validate_metric(d) == []


@given(random_metric(), st.data())
@settings(max_examples=80, deadline=None)
def test_one_point_feasible_matches_brute_force(m, data):
    eta = {
        p: data.draw(rat_eighths, label=f"eta_{p}")
        for p in m.points
    }
    ok, _ = one_point_feasible(m, OnePointSpec(m.points, eta))
    new = "w"
    table = {(x, y): m.d(x, y) for x, y in m.pairs()}
    table.update({(p, new): eta[p] for p in m.points})
    full = fin_metric(list(m.points) + [new], table)
    assert ok == (validate_metric(full) == [])
