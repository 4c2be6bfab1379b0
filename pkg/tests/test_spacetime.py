from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relcausal.graph import OBSERVED, CausalStructure
from relcausal.intervention import AffectsRelation
from relcausal.scenarios import builtin, canonical_embeddings
from relcausal.spacetime import (
    MINKOWSKI,
    Embedding,
    FinitePoset,
    MinkowskiCone,
    MinkowskiPoint,
    Ordering,
    SpaceError,
    check_nsc,
    check_nss,
    future_of_point,
    joint_future,
    precedes,
    region_contains,
)

P = MinkowskiPoint


@pytest.fixture(scope="module")
def pr():
    return builtin("jamming-pr")


def test_precedes_examples():
    assert precedes(P(0, 0), P(2, 2)) is Ordering.BEFORE
    assert precedes(P(2, 2), P(0, 0)) is Ordering.AFTER
    assert precedes(P(0, 0), P(0, 4)) is Ordering.SPACELIKE
    assert precedes(P(1, 3), P(1, 3)) is Ordering.EQUAL


def test_points_are_exact():
    assert P("1/2", 0).t == Fraction(1, 2)
    with pytest.raises((SpaceError, TypeError, ValueError)):
        P(0.5, 0)
    q = P(3, 2)
    assert (q.u, q.v) == (1, 5)
    assert P.from_lightcone(1, 5) == q


def test_joint_future_examples():
    e = canonical_embeddings()["task1"]
    cone = joint_future(e, ["B"])
    assert (cone.u0, cone.v0) == (0, 4)
    cone = joint_future(e, ["X", "Z"])
    assert (cone.u0, cone.v0) == (1, 5)
    assert cone.apex == P(3, 2)
    assert joint_future(e, ["A", "C"]) == joint_future(e, ["B"])
    with pytest.raises(SpaceError):
        joint_future(e, [])


def test_region_contains_examples():
    assert region_contains(MinkowskiCone(0, 4), MinkowskiCone(1, 5))
    assert region_contains(MinkowskiCone(0, 4), MinkowskiCone(0, 4))
    assert not region_contains(MinkowskiCone(0, 4), MinkowskiCone(-1, 5))


def test_poset_order_and_regions():
    # diamond a < b, a < c, b < d, c < d plus an isolated e
    s = FinitePoset("abcde", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    assert precedes("a", "d", s) is Ordering.BEFORE
    assert precedes("b", "c", s) is Ordering.SPACELIKE
    assert precedes("d", "a", s) is Ordering.AFTER
    assert precedes("e", "e", s) is Ordering.EQUAL
    e = Embedding(s, {"X": "b", "Y": "c", "W": "a"})
    jf = joint_future(e, ["X", "Y"])
    assert jf.elements == frozenset("d")
    assert region_contains(future_of_point("a", s), jf)
    assert not region_contains(jf, future_of_point("a", s))


def test_poset_rejects_cycles_and_unknown_points():
    with pytest.raises(SpaceError):
        FinitePoset("ab", [("a", "b"), ("b", "a")])
    with pytest.raises(SpaceError):
        FinitePoset("ab", [("a", "z")])
    s = FinitePoset("ab", [("a", "b")])
    with pytest.raises(SpaceError):
        Embedding(s, {"X": "q"})
    with pytest.raises(SpaceError):
        precedes("a", P(0, 0), s)


def test_mixed_spaces_rejected():
    s = FinitePoset("ab", [("a", "b")])
    with pytest.raises(SpaceError):
        region_contains(MinkowskiCone(0, 0), future_of_point("a", s))


def test_nsc_fig3_task1(pr):
    v = check_nsc(pr.model.structure, pr.embedding("task1"))
    assert not v.passed
    assert v.violations == [("B", "Z")]


def test_nsc_trivial_cases():
    g = CausalStructure(["A", "X"], [("A", "X")])
    assert check_nsc(g, Embedding(MINKOWSKI, {"A": P(0, 0), "X": P(1, 0)})).passed
    g = CausalStructure(["A", "X"])
    assert check_nsc(g, Embedding(MINKOWSKI, {"A": P(0, 0), "X": P(0, 5)})).passed


def test_nsc_coincident_and_unlocated():
    g = CausalStructure({"A": OBSERVED, "X": OBSERVED, "L": "unobserved"}, [("A", "X"), ("L", "X")])
    e = Embedding(MINKOWSKI, {"A": P(0, 0), "X": P(0, 0)})
    v = check_nsc(g, e)
    assert v.passed and v.unchecked == [("L", "X")]
    assert not check_nsc(g, e, strict=True).passed
    with pytest.raises(SpaceError):
        check_nsc(g, Embedding(MINKOWSKI, {"A": P(0, 0)}))


def test_nss_fig3_both_embeddings(pr):
    for name in ("task1", "task2"):
        v = check_nss(pr.relations, pr.embedding(name))
        assert v.passed and v.checked, name


def test_nss_detects_spacelike_signal():
    r = AffectsRelation(("A",), ("B",), (), True, True)
    e = Embedding(MINKOWSKI, {"A": P(0, 0), "B": P(0, 3)})
    v = check_nss([r], e)
    assert not v.passed and v.violations[0].relation == r
    assert check_nss([r], e.moved(B=P(3, 3))).passed


def test_nss_ignores_reducible_and_non_holding():
    e = Embedding(MINKOWSKI, {"A": P(0, 0), "B": P(0, 3)})
    assert check_nss([AffectsRelation(("A",), ("B",), (), True, False)], e).passed
    assert check_nss([AffectsRelation(("A",), ("B",), (), False)], e).passed


def test_nss_needs_locations():
    r = AffectsRelation(("A",), ("B",), (), True, True)
    with pytest.raises(SpaceError):
        check_nss([r], Embedding(MINKOWSKI, {"A": P(0, 0)}))


rationals = st.fractions(min_value=-6, max_value=6, max_denominator=4)
points = st.builds(MinkowskiPoint, rationals, rationals)


@settings(max_examples=300, deadline=None)
@given(points, points, points)
def test_precedes_is_a_partial_order(p, q, r):
    def le(a, b):
        return precedes(a, b) in (Ordering.BEFORE, Ordering.EQUAL)

    assert le(p, p)
    if le(p, q) and le(q, p):
        assert p == q
    if le(p, q) and le(q, r):
        assert le(p, r)
    # converse symmetry
    flipped = {Ordering.BEFORE: Ordering.AFTER, Ordering.AFTER: Ordering.BEFORE}
    rel = precedes(p, q)
    assert precedes(q, p) is flipped.get(rel, rel)


@settings(max_examples=200, deadline=None)
@given(st.lists(points, min_size=1, max_size=4), st.lists(points, min_size=1, max_size=3))
def test_joint_future_monotone(s, t):
    locs = {f"S{i}": p for i, p in enumerate(s)} | {f"T{i}": p for i, p in enumerate(t)}
    e = Embedding(MINKOWSKI, locs)
    small = joint_future(e, [f"S{i}" for i in range(len(s))])
    big = joint_future(e, list(locs))
    assert region_contains(small, big)


@settings(max_examples=100, deadline=None)
@given(st.lists(points, min_size=1, max_size=3))
def test_cone_matches_pointwise_oracle(ps):
    e = Embedding(MINKOWSKI, {f"N{i}": p for i, p in enumerate(ps)})
    cone = joint_future(e, list(e.locations))
    for t, x in itertools.product(range(-6, 7), repeat=2):
        q = P(t, x)
        in_all = all(precedes(p, q) in (Ordering.BEFORE, Ordering.EQUAL) for p in ps)
        assert cone.contains_point(q) == in_all
        assert cone.contains_point(q) == (precedes(cone.apex, q) in (Ordering.BEFORE, Ordering.EQUAL))
