"""Space-time orders, embeddings, inclusive futures and the NSC / NSS checks.

Two kinds of space are supported: (1+1)-dimensional Minkowski space-time in
units with c = 1, and arbitrary finite partially ordered sets. Light-like
separation counts as ordered, so every future region is inclusive.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Union

from .graph import CausalStructure
from .intervention import AffectsRelation, irreducible_within


class SpaceError(ValueError):
    pass


class Ordering(enum.Enum):
    BEFORE = "strictly-before"
    EQUAL = "equal"
    AFTER = "strictly-after"
    SPACELIKE = "spacelike"


@dataclass(frozen=True, order=True)
class MinkowskiPoint:
    t: Fraction
    x: Fraction

    def __post_init__(self):
        for name in ("t", "x"):
            value = getattr(self, name)
            if isinstance(value, float):
                raise SpaceError(f"coordinates must be exact, got float {value!r}")
            object.__setattr__(self, name, Fraction(value))

    @property
    def u(self) -> Fraction:
        return self.t - self.x

    @property
    def v(self) -> Fraction:
        return self.t + self.x

    @classmethod
    def from_lightcone(cls, u, v) -> "MinkowskiPoint":
        u, v = Fraction(u), Fraction(v)
        return cls((u + v) / 2, (v - u) / 2)

    def __str__(self) -> str:
        return f"(t={self.t}, x={self.x})"


class Minkowski11:
    """(1+1)-dimensional Minkowski space-time with c = 1."""

    kind = "minkowski11"

    def __repr__(self) -> str:
        return "Minkowski11()"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Minkowski11)

    def __hash__(self) -> int:
        return hash(self.kind)

    def leq(self, p: MinkowskiPoint, q: MinkowskiPoint) -> bool:
        return p.u <= q.u and p.v <= q.v

    def check_point(self, p) -> None:
        if not isinstance(p, MinkowskiPoint):
            raise SpaceError(f"{p!r} is not a Minkowski point")


MINKOWSKI = Minkowski11()


class FinitePoset:
    """Finite partial order built from covering (or any generating) relations.

    The order is the reflexive-transitive closure of ``covers``; a cycle in the
    generating relation would break antisymmetry and is rejected.
    """

    kind = "poset"

    def __init__(self, elements: Iterable[Hashable], covers: Iterable[tuple[Hashable, Hashable]] = ()):
        self.elements: tuple = tuple(dict.fromkeys(elements))
        self.covers: tuple = tuple((a, b) for a, b in covers)
        succ: dict = {e: set() for e in self.elements}
        for a, b in self.covers:
            for e in (a, b):
                if e not in succ:
                    raise SpaceError(f"cover ({a!r}, {b!r}) mentions unknown element {e!r}")
            if a != b:
                succ[a].add(b)
        self._up: dict = {}
        for e in self.elements:
            seen = {e}
            stack = list(succ[e])
            while stack:
                n = stack.pop()
                if n not in seen:
                    seen.add(n)
                    stack.extend(succ[n])
            self._up[e] = frozenset(seen)
        for a in self.elements:
            for b in self._up[a]:
                if a != b and a in self._up[b]:
                    raise SpaceError(f"relation is not antisymmetric: {a!r} and {b!r} precede each other")

    def __repr__(self) -> str:
        return f"FinitePoset({list(self.elements)!r}, covers={list(self.covers)!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinitePoset) and self._up == other._up

    def __hash__(self) -> int:
        return hash(frozenset(self._up.items()))

    def leq(self, p, q) -> bool:
        return q in self._up[p]

    def up_set(self, p) -> frozenset:
        self.check_point(p)
        return self._up[p]

    def check_point(self, p) -> None:
        try:
            ok = p in self._up
        except TypeError:
            ok = False
        if not ok:
            raise SpaceError(f"{p!r} is not an element of the poset")


Space = Union[Minkowski11, FinitePoset]


def _space_of(p, q, space: Space | None) -> Space:
    if space is None:
        if isinstance(p, MinkowskiPoint) and isinstance(q, MinkowskiPoint):
            return MINKOWSKI
        raise SpaceError("poset elements need an explicit space")
    space.check_point(p)
    space.check_point(q)
    return space


def precedes(p, q, space: Space | None = None) -> Ordering:
    """Order relation between two points of the same space."""
    space = _space_of(p, q, space)
    if p == q:
        return Ordering.EQUAL
    if space.leq(p, q):
        return Ordering.BEFORE
    if space.leq(q, p):
        return Ordering.AFTER
    return Ordering.SPACELIKE


@dataclass(frozen=True)
class MinkowskiCone:
    """Inclusive future of the apex {q : u_q >= u0 and v_q >= v0}."""

    u0: Fraction
    v0: Fraction

    @property
    def apex(self) -> MinkowskiPoint:
        return MinkowskiPoint.from_lightcone(self.u0, self.v0)

    def contains_point(self, q: MinkowskiPoint) -> bool:
        return q.u >= self.u0 and q.v >= self.v0


@dataclass(frozen=True)
class PosetRegion:
    space: FinitePoset
    elements: frozenset

    def __post_init__(self):
        for e in self.elements:
            for f in self.space.up_set(e):
                if f not in self.elements:
                    raise SpaceError("poset region is not up-closed")

    def contains_point(self, q) -> bool:
        return q in self.elements


ConeRegion = Union[MinkowskiCone, PosetRegion]


def future_of_point(p, space: Space) -> ConeRegion:
    space.check_point(p)
    if isinstance(space, Minkowski11):
        return MinkowskiCone(p.u, p.v)
    return PosetRegion(space, space.up_set(p))


def region_contains(outer: ConeRegion, inner: ConeRegion) -> bool:
    """True iff ``inner`` is a subset of ``outer``."""
    if isinstance(outer, MinkowskiCone) and isinstance(inner, MinkowskiCone):
        return outer.u0 <= inner.u0 and outer.v0 <= inner.v0
    if isinstance(outer, PosetRegion) and isinstance(inner, PosetRegion):
        if outer.space != inner.space:
            raise SpaceError("regions belong to different posets")
        return inner.elements <= outer.elements
    raise SpaceError("cannot compare regions of different kinds of space")


@dataclass
class Embedding:
    """Locations of (at least the observed) nodes in one space."""

    space: Space
    locations: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.locations = dict(self.locations)
        for n, p in self.locations.items():
            try:
                self.space.check_point(p)
            except SpaceError as exc:
                raise SpaceError(f"node {n!r}: {exc}") from None

    def __getitem__(self, node: str):
        try:
            return self.locations[node]
        except KeyError:
            raise SpaceError(f"node {node!r} is not located") from None

    def __contains__(self, node: str) -> bool:
        return node in self.locations

    def order(self, a: str, b: str) -> Ordering:
        return precedes(self[a], self[b], self.space)

    def future(self, node: str) -> ConeRegion:
        return future_of_point(self[node], self.space)

    def joint_future(self, nodes: Iterable[str]) -> ConeRegion:
        return joint_future(self, nodes)

    def moved(self, **locations) -> "Embedding":
        return Embedding(self.space, {**self.locations, **locations})


def joint_future(e: Embedding, nodes: Iterable[str]) -> ConeRegion:
    """Intersection of the inclusive futures of ``nodes``."""
    nodes = list(nodes)
    if not nodes:
        raise SpaceError("joint future of an empty node set is undefined")
    points = [e[n] for n in nodes]
    if isinstance(e.space, Minkowski11):
        return MinkowskiCone(max(p.u for p in points), max(p.v for p in points))
    region = frozenset(e.space.elements)
    for p in points:
        region &= e.space.up_set(p)
    return PosetRegion(e.space, region)


@dataclass
class NSCVerdict:
    passed: bool
    violations: list[tuple[str, str]] = field(default_factory=list)
    unchecked: list[tuple[str, str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def check_nsc(g: CausalStructure, e: Embedding, strict: bool = False) -> NSCVerdict:
    """Every located edge must point into the inclusive future of its source.

    Coincident endpoints are allowed unless ``strict``. Edges with an
    unlocated (unobserved) endpoint are listed as unchecked.
    """
    missing = [n for n in g.observed if n not in e]
    if missing:
        raise SpaceError(f"observed nodes {missing} are not located")
    verdict = NSCVerdict(passed=True)
    for a, b in sorted(g.edges):
        if a not in e or b not in e:
            verdict.unchecked.append((a, b))
            continue
        rel = e.order(a, b)
        ok = rel is Ordering.BEFORE or (rel is Ordering.EQUAL and not strict)
        if not ok:
            verdict.violations.append((a, b))
    verdict.passed = not verdict.violations
    return verdict


@dataclass
class NSSViolation:
    relation: AffectsRelation
    reason: str


@dataclass
class NSSVerdict:
    passed: bool
    checked: list[AffectsRelation] = field(default_factory=list)
    violations: list[NSSViolation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def compatible(r: AffectsRelation, e: Embedding) -> bool:
    """Joint future of target and do-set lies inside the joint future of the source."""
    return region_contains(joint_future(e, r.source), joint_future(e, r.target + r.do_set))


def check_nss(relations: Iterable[AffectsRelation], e: Embedding) -> NSSVerdict:
    """Compatibility of a set of affects relations with an embedding.

    Only holding, irreducible relations constrain the embedding. A relation
    whose irreducibility is unknown is judged against the set itself.
    """
    relations = list(relations)
    for r in relations:
        for n in r.source + r.target + r.do_set:
            if n not in e:
                raise SpaceError(f"node {n!r} of relation {r} is not located")
    verdict = NSSVerdict(passed=True)
    for r in relations:
        if not r.holds:
            continue
        irreducible = r.irreducible if r.irreducible is not None else irreducible_within(relations, r)
        if not irreducible:
            continue
        verdict.checked.append(r)
        if not compatible(r, e):
            verdict.violations.append(
                NSSViolation(r, f"joint future of {sorted(r.target + r.do_set)} is not inside "
                                f"the joint future of {sorted(r.source)}")
            )
    verdict.passed = not verdict.violations
    return verdict
