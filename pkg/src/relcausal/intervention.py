"""Interventions, affects relations and their reducibility."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graph import CausalStructure, GraphError
from .model import ClassicalCausalModel, JointDistribution, ModelError


def do_surgery(g: CausalStructure, targets: Iterable[str]) -> CausalStructure:
    """Remove every edge pointing into ``targets``."""
    targets = set(targets)
    for t in targets:
        if not g.is_observed(t):
            raise GraphError(f"cannot intervene on unobserved node {t!r}")
    return g.without_edges_into(targets)


def post_intervention_distribution(
    m: ClassicalCausalModel, assignment: Mapping[str, int], over: Iterable[str]
) -> JointDistribution:
    """P_{G_do(T)}(over | T = t) for the intervention T = t given by ``assignment``."""
    return m.intervened(dict(assignment)).joint(tuple(over))


@dataclass(frozen=True)
class AffectsRelation:
    """``source`` affects ``target`` given do(``do_set``).

    ``irreducible`` is None when it has not been determined. ``witness`` holds
    the first (x, z) exhibiting the difference together with both
    distributions of the target.
    """

    source: tuple[str, ...]
    target: tuple[str, ...]
    do_set: tuple[str, ...] = ()
    holds: bool = True
    irreducible: bool | None = None
    witness: dict | None = None

    def __post_init__(self):
        for name in ("source", "target", "do_set"):
            object.__setattr__(self, name, tuple(sorted(getattr(self, name))))
        _check_triple(self.source, self.target, self.do_set)

    @property
    def key(self) -> tuple[frozenset, frozenset, frozenset]:
        return frozenset(self.source), frozenset(self.target), frozenset(self.do_set)

    def __str__(self) -> str:
        s = f"{{{','.join(self.source)}}} -> {{{','.join(self.target)}}}"
        if self.do_set:
            s += f" | do({{{','.join(self.do_set)}}})"
        return s

    def __hash__(self) -> int:
        return hash((self.key, self.holds, self.irreducible))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffectsRelation):
            return NotImplemented
        return (self.key, self.holds, self.irreducible) == (other.key, other.holds, other.irreducible)


def _check_triple(xs, ys, zs) -> None:
    xs, ys, zs = set(xs), set(ys), set(zs)
    if not xs or not ys:
        raise ModelError("affects relations need non-empty source and target")
    if xs & ys or xs & zs or ys & zs:
        raise ModelError("source, target and do-set must be pairwise disjoint")


def _values(m: ClassicalCausalModel, nodes: Sequence[str]):
    return itertools.product(*(range(m.alphabets[n]) for n in nodes))


def affects(
    m: ClassicalCausalModel,
    xs: Iterable[str],
    ys: Iterable[str],
    zs: Iterable[str] = (),
    z_values: Iterable[Sequence[int]] | None = None,
) -> AffectsRelation:
    """Decide whether X affects Y given do(Z) by exact comparison.

    Holds iff some x, z give P_do(XZ)(Y | x, z) != P_do(Z)(Y | z); with Z
    empty the right-hand side is the observational P(Y). ``z_values``
    restricts the do-values tried.
    """
    xs, ys, zs = tuple(sorted(xs)), tuple(sorted(ys)), tuple(sorted(zs))
    _check_triple(xs, ys, zs)
    for n in xs + ys + zs:
        if n not in m.structure.roles:
            raise ModelError(f"unknown node {n!r}")
        if not m.structure.is_observed(n):
            raise ModelError(f"affects relations are over observed nodes; {n!r} is unobserved")
    z_choices = list(_values(m, zs)) if z_values is None else [tuple(z) for z in z_values]
    x_choices = list(_values(m, xs))
    for z in z_choices:
        z_assign = dict(zip(zs, z))
        baseline = post_intervention_distribution(m, z_assign, ys)
        for x in x_choices:
            shifted = post_intervention_distribution(m, {**z_assign, **dict(zip(xs, x))}, ys)
            if shifted != baseline:
                witness = {
                    "x": dict(zip(xs, x)),
                    "z": z_assign,
                    "do_xz": shifted,
                    "do_z": baseline,
                }
                return AffectsRelation(xs, ys, zs, True, None, witness)
    return AffectsRelation(xs, ys, zs, False, None, None)


def _proper_subsets(xs: Sequence[str]):
    for k in range(1, len(xs)):
        yield from itertools.combinations(xs, k)


def is_irreducible(m: ClassicalCausalModel, r: AffectsRelation) -> bool:
    """Every non-empty proper sub-source still affects the target once the rest of the source joins the do-set."""
    if not r.holds:
        raise ModelError(f"irreducibility is only defined for holding relations; {r} does not hold")
    for sub in _proper_subsets(r.source):
        rest = tuple(n for n in r.source if n not in sub)
        if not affects(m, sub, r.target, r.do_set + rest).holds:
            return False
    return True


def with_irreducibility(m: ClassicalCausalModel, r: AffectsRelation) -> AffectsRelation:
    return AffectsRelation(r.source, r.target, r.do_set, r.holds, is_irreducible(m, r), r.witness)


def _subsets(nodes: Sequence[str], lo: int, hi: int | None):
    hi = len(nodes) if hi is None else min(hi, len(nodes))
    for k in range(lo, hi + 1):
        yield from itertools.combinations(nodes, k)


def enumerate_affects(
    m: ClassicalCausalModel,
    max_set_sizes: tuple[int | None, int | None, int | None] = (None, None, None),
    nodes: Iterable[str] | None = None,
) -> list[AffectsRelation]:
    """All holding affects relations among observed nodes, annotated with irreducibility.

    ``max_set_sizes`` caps |X|, |Y| and |Z| (None = no cap). Output order is
    deterministic: by source, then target, then do-set.
    """
    pool = tuple(m.observed if nodes is None else nodes)
    max_x, max_y, max_z = max_set_sizes
    found = []
    for xs in _subsets(pool, 1, max_x):
        rest = [n for n in pool if n not in xs]
        for ys in _subsets(rest, 1, max_y):
            others = [n for n in rest if n not in ys]
            for zs in _subsets(others, 0, max_z):
                r = affects(m, xs, ys, zs)
                if r.holds:
                    found.append(with_irreducibility(m, r))
    found.sort(key=lambda r: (len(r.source), r.source, len(r.target), r.target, len(r.do_set), r.do_set))
    return found


def irreducible_within(relations: Iterable[AffectsRelation], r: AffectsRelation) -> bool:
    """Irreducibility judged only from membership in ``relations``.

    A sub-relation missing from the set counts as not holding.
    """
    holding = {q.key for q in relations if q.holds}
    for sub in _proper_subsets(r.source):
        rest = frozenset(n for n in r.source if n not in sub)
        if (frozenset(sub), frozenset(r.target), frozenset(r.do_set) | rest) not in holding:
            return False
    return True
