"""Causal structures: directed acyclic graphs with observed/unobserved nodes."""
from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping

OBSERVED = "observed"
UNOBSERVED = "unobserved"
ROLES = (OBSERVED, UNOBSERVED)


class GraphError(ValueError):
    """Raised for malformed structures or invalid queries."""


class CyclicGraphError(GraphError):
    pass


class CausalStructure:
    """Immutable DAG whose nodes carry an observed/unobserved role.

    Nodes are identified by their names. Construction validates that the
    graph has no self-loops, no duplicate edges and no directed cycles.
    ``nodes`` is either a name -> role mapping or an iterable of names (all
    observed).
    """

    def __init__(self, nodes: Mapping[str, str] | Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        if isinstance(nodes, Mapping):
            roles = dict(nodes)
        else:
            roles = {}
            for n in nodes:
                if n in roles:
                    raise GraphError(f"duplicate node {n!r}")
                roles[n] = OBSERVED
        for n, r in roles.items():
            if r not in ROLES:
                raise GraphError(f"node {n!r}: unknown role {r!r}")
        edge_list = [tuple(e) for e in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            raise GraphError("duplicate edge")
        parents: dict[str, set[str]] = {n: set() for n in roles}
        children: dict[str, set[str]] = {n: set() for n in roles}
        for a, b in edge_set:
            for n in (a, b):
                if n not in roles:
                    raise GraphError(f"edge ({a!r}, {b!r}) references unknown node {n!r}")
            if a == b:
                raise GraphError(f"self-loop on {a!r}")
            parents[b].add(a)
            children[a].add(b)
        self.roles: dict[str, str] = roles
        self.edges: frozenset[tuple[str, str]] = edge_set
        self._parents = {n: frozenset(p) for n, p in parents.items()}
        self._children = {n: frozenset(c) for n, c in children.items()}
        self._order = self._toposort()

    def __repr__(self) -> str:
        edges = ", ".join(f"{a}->{b}" for a, b in sorted(self.edges))
        return f"CausalStructure(nodes={self.roles!r}, edges=[{edges}])"

    def __hash__(self) -> int:
        return hash((frozenset(self.roles.items()), self.edges))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalStructure):
            return NotImplemented
        return dict(self.roles) == dict(other.roles) and self.edges == other.edges

    def _toposort(self) -> tuple[str, ...]:
        # Kahn's algorithm; ties broken by insertion order for determinism
        indeg = {n: len(self._parents[n]) for n in self.roles}
        ready = deque(n for n in self.roles if indeg[n] == 0)
        order = []
        while ready:
            n = ready.popleft()
            order.append(n)
            for c in sorted(self._children[n], key=list(self.roles).index):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(self.roles):
            stuck = sorted(n for n in self.roles if indeg[n] > 0)
            raise CyclicGraphError(f"graph contains a directed cycle through {stuck}")
        return tuple(order)

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(self.roles)

    @property
    def observed(self) -> tuple[str, ...]:
        return tuple(n for n, r in self.roles.items() if r == OBSERVED)

    @property
    def unobserved(self) -> tuple[str, ...]:
        return tuple(n for n, r in self.roles.items() if r == UNOBSERVED)

    def topological_order(self) -> tuple[str, ...]:
        return self._order

    def is_observed(self, n: str) -> bool:
        self._check(n)
        return self.roles[n] == OBSERVED

    def _check(self, n: str) -> None:
        if n not in self.roles:
            raise GraphError(f"unknown node {n!r}")

    def parents(self, n: str) -> frozenset[str]:
        self._check(n)
        return self._parents[n]

    def children(self, n: str) -> frozenset[str]:
        self._check(n)
        return self._children[n]

    def descendants(self, n: str) -> frozenset[str]:
        self._check(n)
        return _reach(n, self._children)

    def ancestors(self, n: str) -> frozenset[str]:
        self._check(n)
        return _reach(n, self._parents)

    def without_edges_into(self, targets: Iterable[str]) -> "CausalStructure":
        targets = set(targets)
        for t in targets:
            self._check(t)
        return CausalStructure(self.roles, [e for e in self.edges if e[1] not in targets])

    def d_separated(self, xs: Iterable[str], ys: Iterable[str], zs: Iterable[str] = ()) -> bool:
        return d_separated(self, xs, ys, zs)


def _reach(start: str, adjacency: Mapping[str, frozenset[str]]) -> frozenset[str]:
    seen: set[str] = set()
    stack = list(adjacency[start])
    while stack:
        n = stack.pop()
        if n not in seen:
            seen.add(n)
            stack.extend(adjacency[n])
    return frozenset(seen)


def parents(g: CausalStructure, n: str) -> frozenset[str]:
    return g.parents(n)


def descendants(g: CausalStructure, n: str) -> frozenset[str]:
    """All nodes reachable from ``n`` along directed edges, ``n`` excluded."""
    return g.descendants(n)


def _query_sets(g: CausalStructure, xs, ys, zs) -> tuple[frozenset, frozenset, frozenset]:
    xs, ys, zs = frozenset(xs), frozenset(ys), frozenset(zs)
    if not xs or not ys:
        raise GraphError("d-separation query needs non-empty X and Y")
    if xs & ys or xs & zs or ys & zs:
        raise GraphError("X, Y and Z must be pairwise disjoint")
    for n in xs | ys | zs:
        g._check(n)
    return xs, ys, zs


def d_separated(g: CausalStructure, xs: Iterable[str], ys: Iterable[str], zs: Iterable[str] = ()) -> bool:
    """True iff every path from ``xs`` to ``ys`` is blocked by ``zs``.

    Linear-time reachability ("Bayes ball"): a trail may pass a non-collider
    only if it is not conditioned on, and a collider only if it or one of its
    descendants is conditioned on. Unobserved nodes take part like any other.
    """
    xs, ys, zs = _query_sets(g, xs, ys, zs)

    # nodes that are in zs or have a descendant in zs
    opens_collider: set[str] = set(zs)
    frontier = list(zs)
    while frontier:
        n = frontier.pop()
        for p in g._parents[n]:
            if p not in opens_collider:
                opens_collider.add(p)
                frontier.append(p)

    # direction "up": arrived from a child; "down": arrived from a parent
    visited: set[tuple[str, str]] = set()
    queue = deque((x, "up") for x in xs)
    while queue:
        n, direction = queue.popleft()
        if (n, direction) in visited:
            continue
        visited.add((n, direction))
        if n in ys:
            return False
        if direction == "up":
            if n in zs:
                continue
            queue.extend((p, "up") for p in g._parents[n])
            queue.extend((c, "down") for c in g._children[n])
        else:
            if n not in zs:
                queue.extend((c, "down") for c in g._children[n])
            if n in opens_collider:
                queue.extend((p, "up") for p in g._parents[n])
    return True
