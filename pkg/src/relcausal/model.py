"""Classical causal models over finite alphabets with exact rational enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .graph import CausalStructure, GraphError, d_separated

DEFAULT_ENUMERATION_BOUND = 2**22

Values = tuple[int, ...]


class ModelError(ValueError):
    pass


class EnumerationBoundError(ModelError):
    pass


class ZeroProbabilityError(ModelError):
    """The conditioning event has probability zero."""


def as_fraction(p) -> Fraction:
    if isinstance(p, float):
        raise ModelError(f"probabilities must be exact, got float {p!r}")
    return Fraction(p)


class JointDistribution:
    """Exact probability table over an ordered tuple of variables.

    Only entries with non-zero probability are stored, so two distributions
    are equal exactly when their (variable-aligned) tables are equal.
    """

    __slots__ = ("variables", "table")

    def __init__(self, variables: Sequence[str], table: Mapping[Values, Fraction], *, check: bool = True):
        self.variables: tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ModelError(f"repeated variable in {self.variables}")
        cleaned = {}
        for key, p in table.items():
            if check:
                p = as_fraction(p)
                if p < 0:
                    raise ModelError(f"negative probability {p} at {key}")
                if len(key) != len(self.variables):
                    raise ModelError(f"entry {key} does not match variables {self.variables}")
            if p:
                cleaned[tuple(key)] = p
        if check and sum(cleaned.values()) != 1:
            raise ModelError(f"total mass is {sum(cleaned.values())}, not 1")
        self.table: dict[Values, Fraction] = cleaned

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.table.items()))
        return f"JointDistribution({self.variables}, {{{body}}})"

    def _aligned(self, order: Sequence[str]) -> dict[Values, Fraction]:
        idx = [self.variables.index(v) for v in order]
        return {tuple(k[i] for i in idx): p for k, p in self.table.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointDistribution):
            return NotImplemented
        if set(self.variables) != set(other.variables):
            return False
        return self.table == other._aligned(self.variables)

    __hash__ = None  # type: ignore[assignment]

    def items(self) -> Iterator[tuple[Values, Fraction]]:
        return iter(sorted(self.table.items()))

    def as_dicts(self) -> Iterator[tuple[dict[str, int], Fraction]]:
        for key, p in self.items():
            yield dict(zip(self.variables, key)), p

    def probability(self, assignment: Mapping[str, int]) -> Fraction:
        """Probability of the event fixing the given variables."""
        idx = [(self.variables.index(v), val) for v, val in assignment.items()]
        return sum((p for k, p in self.table.items() if all(k[i] == val for i, val in idx)), Fraction(0))

    def marginal(self, variables: Iterable[str]) -> "JointDistribution":
        variables = tuple(variables)
        missing = set(variables) - set(self.variables)
        if missing:
            raise ModelError(f"cannot marginalise onto unknown variables {sorted(missing)}")
        idx = [self.variables.index(v) for v in variables]
        out: dict[Values, Fraction] = {}
        for k, p in self.table.items():
            key = tuple(k[i] for i in idx)
            out[key] = out.get(key, 0) + p
        return JointDistribution(variables, out, check=False)

    def conditional(self, target: Iterable[str], given: Mapping[str, int]) -> "JointDistribution":
        return conditional(self, target, given)


def conditional(d: JointDistribution, target: Iterable[str], given: Mapping[str, int]) -> JointDistribution:
    """Exact conditional distribution of ``target`` given the event ``given``.

    Raises ZeroProbabilityError if the conditioning event is impossible.
    """
    target = tuple(target)
    if set(target) & set(given):
        raise ModelError("target and conditioning variables overlap")
    unknown = (set(target) | set(given)) - set(d.variables)
    if unknown:
        raise ModelError(f"unknown variables {sorted(unknown)}")
    gidx = [(d.variables.index(v), val) for v, val in given.items()]
    tidx = [d.variables.index(v) for v in target]
    out: dict[Values, Fraction] = {}
    mass = Fraction(0)
    for k, p in d.table.items():
        if all(k[i] == val for i, val in gidx):
            key = tuple(k[i] for i in tidx)
            out[key] = out.get(key, 0) + p
            mass += p
    if mass == 0:
        raise ZeroProbabilityError(f"P({dict(given)}) = 0")
    return JointDistribution(target, {k: p / mass for k, p in out.items()}, check=False)


def independence_counterexample(
    d: JointDistribution, xs: Sequence[str], ys: Sequence[str], zs: Sequence[str] = ()
) -> dict | None:
    """Return None if X and Y are independent given Z under ``d``.

    Otherwise return the first (x, y, z) at which
    P(xyz)P(z) != P(xz)P(yz). The comparison is cross-multiplied, so no
    division or tolerance is involved.
    """
    xs, ys, zs = tuple(xs), tuple(ys), tuple(zs)
    nx, ny = len(xs), len(ys)
    table = d.marginal(xs + ys + zs).table
    # the test is homogeneous, so scale everything to integers
    scale = lcm(*(p.denominator for p in table.values()))
    joint = {k: p.numerator * (scale // p.denominator) for k, p in table.items()}
    p_xz: dict[tuple, int] = {}
    p_yz: dict[tuple, int] = {}
    p_z: dict[tuple, int] = {}
    for k, p in joint.items():
        x, y, z = k[:nx], k[nx:nx + ny], k[nx + ny:]
        p_xz[x + z] = p_xz.get(x + z, 0) + p
        p_yz[y + z] = p_yz.get(y + z, 0) + p
        p_z[z] = p_z.get(z, 0) + p
    xs_by_z: dict[tuple, list] = {}
    ys_by_z: dict[tuple, list] = {}
    for k in sorted(p_xz):
        xs_by_z.setdefault(k[nx:], []).append(k[:nx])
    for k in sorted(p_yz):
        ys_by_z.setdefault(k[ny:], []).append(k[:ny])
    for z in sorted(p_z):
        pz = p_z[z]
        for x in xs_by_z[z]:
            pxz = p_xz[x + z]
            for y in ys_by_z[z]:
                if joint.get(x + y + z, 0) * pz != pxz * p_yz[y + z]:
                    return {
                        "x": dict(zip(xs, x)),
                        "y": dict(zip(ys, y)),
                        "z": dict(zip(zs, z)),
                        "p_xyz": Fraction(joint.get(x + y + z, 0), scale),
                        "p_xz": Fraction(pxz, scale),
                        "p_yz": Fraction(p_yz[y + z], scale),
                        "p_z": Fraction(pz, scale),
                    }
    return None


def conditionally_independent(d: JointDistribution, xs, ys, zs=()) -> bool:
    return independence_counterexample(d, tuple(xs), tuple(ys), tuple(zs)) is None


@dataclass(frozen=True)
class Mechanism:
    """Deterministic function of a node's parents given as a lookup table."""

    node: str
    parent_order: tuple[str, ...]
    table: Mapping[Values, int]

    def __post_init__(self):
        object.__setattr__(self, "parent_order", tuple(self.parent_order))
        object.__setattr__(self, "table", {tuple(k): int(v) for k, v in dict(self.table).items()})
        for k in self.table:
            if len(k) != len(self.parent_order):
                raise ModelError(f"mechanism for {self.node!r}: key {k} has wrong arity")

    def __hash__(self) -> int:
        return hash((self.node, self.parent_order, frozenset(self.table.items())))

    def __call__(self, *values: int) -> int:
        return self.table[tuple(values)]

    @classmethod
    def from_function(
        cls,
        node: str,
        parent_order: Sequence[str],
        fn: Callable[..., int],
        alphabets: Mapping[str, int] | None = None,
    ) -> "Mechanism":
        sizes = [(alphabets or {}).get(p, 2) for p in parent_order]
        table = {vals: int(fn(*vals)) for vals in itertools.product(*(range(s) for s in sizes))}
        return cls(node, tuple(parent_order), table)

    @classmethod
    def primitive(cls, node: str, name: str, parent_order: Sequence[str]) -> "Mechanism":
        """Named binary mechanism: ID, NOT, XOR (parity) or AND (product)."""
        name = name.upper()
        n = len(parent_order)
        if name in ("ID", "NOT") and n != 1:
            raise ModelError(f"primitive {name} needs exactly one parent, got {n}")
        if name in ("XOR", "AND") and n < 1:
            raise ModelError(f"primitive {name} needs at least one parent")
        fns = {
            "ID": lambda *v: v[0],
            "NOT": lambda *v: 1 - v[0],
            "XOR": lambda *v: sum(v) % 2,
            "AND": lambda *v: int(all(v)),
        }
        if name not in fns:
            raise ModelError(f"unknown primitive {name!r}; expected one of {sorted(fns)}")
        return cls.from_function(node, parent_order, fns[name])


@dataclass(frozen=True)
class ExogenousDistribution:
    node: str
    pmf: Mapping[int, Fraction]

    def __post_init__(self):
        pmf = {int(k): as_fraction(v) for k, v in dict(self.pmf).items()}
        if any(p < 0 for p in pmf.values()):
            raise ModelError(f"exogenous distribution of {self.node!r} has a negative entry")
        if sum(pmf.values()) != 1:
            raise ModelError(f"exogenous distribution of {self.node!r} sums to {sum(pmf.values())}")
        object.__setattr__(self, "pmf", pmf)

    def __hash__(self) -> int:
        return hash((self.node, frozenset(self.pmf.items())))

    @classmethod
    def uniform(cls, node: str, size: int = 2) -> "ExogenousDistribution":
        return cls(node, {v: Fraction(1, size) for v in range(size)})

    @classmethod
    def point(cls, node: str, value: int, size: int = 2) -> "ExogenousDistribution":
        return cls(node, {v: Fraction(int(v == value)) for v in range(size)})


def _normalise(items, kind) -> dict:
    if isinstance(items, Mapping):
        return dict(items)
    return {item.node: item for item in items}


class ClassicalCausalModel:
    """Structure plus one mechanism per parented node and one distribution per parentless node.

    Parentless observed nodes without an explicit distribution get the uniform
    one (free settings). Parentless unobserved nodes must be given explicitly.
    Alphabet sizes default to 2.
    """

    def __init__(
        self,
        structure: CausalStructure,
        mechanisms: Mapping[str, Mechanism] | Iterable[Mechanism] = (),
        exogenous: Mapping[str, ExogenousDistribution] | Iterable[ExogenousDistribution] = (),
        alphabets: Mapping[str, int] | None = None,
        enumeration_bound: int = DEFAULT_ENUMERATION_BOUND,
    ):
        self.structure = structure
        self.alphabets = {n: int((alphabets or {}).get(n, 2)) for n in structure.nodes}
        extra = set(alphabets or {}) - set(structure.nodes)
        if extra:
            raise ModelError(f"alphabet given for unknown nodes {sorted(extra)}")
        for n, size in self.alphabets.items():
            if size < 1:
                raise ModelError(f"alphabet of {n!r} must have size >= 1")
        self.mechanisms: dict[str, Mechanism] = _normalise(mechanisms, "mechanism")
        self.exogenous: dict[str, ExogenousDistribution] = _normalise(exogenous, "exogenous")
        self.enumeration_bound = enumeration_bound
        for n in structure.nodes:
            if not structure.parents(n) and n not in self.exogenous and n not in self.mechanisms:
                if structure.is_observed(n):
                    self.exogenous[n] = ExogenousDistribution.uniform(n, self.alphabets[n])
        self._validate()
        self._cache: dict = {}

    def _validate(self) -> None:
        g = self.structure
        for n in set(self.mechanisms) | set(self.exogenous):
            if n not in g.roles:
                raise ModelError(f"specification given for unknown node {n!r}")
        for n in g.nodes:
            has_mech, has_exo = n in self.mechanisms, n in self.exogenous
            if has_mech == has_exo:
                raise ModelError(f"node {n!r} needs exactly one of mechanism / exogenous distribution")
            if has_exo:
                if g.parents(n):
                    raise ModelError(f"node {n!r} has parents but an exogenous distribution")
                for v in self.exogenous[n].pmf:
                    if not 0 <= v < self.alphabets[n]:
                        raise ModelError(f"exogenous value {v} outside alphabet of {n!r}")
                continue
            mech = self.mechanisms[n]
            if mech.node != n:
                raise ModelError(f"mechanism registered under {n!r} is for {mech.node!r}")
            if set(mech.parent_order) != set(g.parents(n)) or len(mech.parent_order) != len(g.parents(n)):
                raise ModelError(
                    f"mechanism for {n!r} uses parents {list(mech.parent_order)}, "
                    f"structure has {sorted(g.parents(n))}"
                )
            sizes = [self.alphabets[p] for p in mech.parent_order]
            for key in itertools.product(*(range(s) for s in sizes)):
                if key not in mech.table:
                    raise ModelError(f"mechanism for {n!r} undefined at parent values {key}")
                if not 0 <= mech.table[key] < self.alphabets[n]:
                    raise ModelError(f"mechanism for {n!r} outputs {mech.table[key]} outside its alphabet")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClassicalCausalModel):
            return NotImplemented
        return (
            self.structure == other.structure
            and self.alphabets == other.alphabets
            and self.exogenous == other.exogenous
            and {n: _canonical_mech(m) for n, m in self.mechanisms.items()}
            == {n: _canonical_mech(m) for n, m in other.mechanisms.items()}
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ClassicalCausalModel({self.structure!r})"

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.structure.nodes

    @property
    def observed(self) -> tuple[str, ...]:
        return self.structure.observed

    def replace(self, *, structure=None, mechanisms=None, exogenous=None) -> "ClassicalCausalModel":
        """Copy with some mechanisms / exogenous distributions swapped out."""
        mechs = dict(self.mechanisms)
        exo = dict(self.exogenous)
        for n, m in (mechanisms or {}).items():
            exo.pop(n, None)
            mechs[n] = m
        for n, e in (exogenous or {}).items():
            mechs.pop(n, None)
            exo[n] = e
        return ClassicalCausalModel(
            structure or self.structure, mechs, exo, self.alphabets, self.enumeration_bound
        )

    def state_space_size(self) -> int:
        size = 1
        for e in self.exogenous.values():
            size *= sum(1 for p in e.pmf.values() if p)
        return size

    def _compiled(self):
        if "compiled" not in self._cache:
            order = self.structure.topological_order()
            pos = {n: i for i, n in enumerate(order)}
            # integer weights per node; the product of the scales is the common denominator
            exo = []
            denominator = 1
            for n in order:
                if n in self.exogenous:
                    pmf = sorted((v, p) for v, p in self.exogenous[n].pmf.items() if p)
                    scale = lcm(*(p.denominator for _, p in pmf))
                    denominator *= scale
                    exo.append((pos[n], [(v, p.numerator * (scale // p.denominator)) for v, p in pmf]))
            mechs = []
            for n in order:
                if n in self.mechanisms:
                    m = self.mechanisms[n]
                    mechs.append((pos[n], tuple(pos[p] for p in m.parent_order), m.table))
            self._cache["compiled"] = (order, pos, exo, mechs, denominator)
        return self._cache["compiled"]

    def joint(self, over: Iterable[str] | None = None) -> JointDistribution:
        """Exact distribution of ``over`` (default: observed nodes)."""
        over = tuple(self.observed if over is None else over)
        key = ("joint", over)
        if key in self._cache:
            return self._cache[key]
        for n in over:
            if n not in self.structure.roles:
                raise ModelError(f"unknown node {n!r}")
        if self.state_space_size() > self.enumeration_bound:
            raise EnumerationBoundError(
                f"{self.state_space_size()} exogenous states exceed the bound {self.enumeration_bound}"
            )
        order, pos, exo, mechs, denominator = self._compiled()
        out_idx = [pos[n] for n in over]
        state = [0] * len(order)
        counts: dict[Values, int] = {}
        exo_pos = [i for i, _ in exo]
        for combo in itertools.product(*(support for _, support in exo)):
            weight = 1
            for i, (v, w) in zip(exo_pos, combo):
                state[i] = v
                weight *= w
            for i, pidx, table in mechs:
                state[i] = table[tuple(state[j] for j in pidx)]
            k = tuple(state[i] for i in out_idx)
            counts[k] = counts.get(k, 0) + weight
        out = {k: Fraction(c, denominator) for k, c in counts.items()}
        d = JointDistribution(over, out, check=False)
        self._cache[key] = d
        return d

    def intervened(self, assignment: Mapping[str, int]) -> "ClassicalCausalModel":
        """Model on G_do(targets) with each target a point mass at its assigned value."""
        key = ("do", frozenset(assignment.items()))
        if key in self._cache:
            return self._cache[key]
        for n, v in assignment.items():
            if n not in self.structure.roles:
                raise ModelError(f"unknown node {n!r}")
            if not self.structure.is_observed(n):
                raise ModelError(f"cannot intervene on unobserved node {n!r}")
            if not 0 <= v < self.alphabets[n]:
                raise ModelError(f"value {v} outside alphabet of {n!r}")
        cut = self.structure.without_edges_into(assignment)
        mechs = {n: m for n, m in self.mechanisms.items() if n not in assignment}
        exo = {n: e for n, e in self.exogenous.items() if n not in assignment}
        for n, v in assignment.items():
            exo[n] = ExogenousDistribution.point(n, v, self.alphabets[n])
        m = ClassicalCausalModel(cut, mechs, exo, self.alphabets, self.enumeration_bound)
        self._cache[key] = m
        return m


def _canonical_mech(m: Mechanism):
    order = sorted(range(len(m.parent_order)), key=lambda i: m.parent_order[i])
    return (
        tuple(m.parent_order[i] for i in order),
        frozenset((tuple(k[i] for i in order), v) for k, v in m.table.items()),
    )


def joint_distribution(m: ClassicalCausalModel, over: Iterable[str] | None = None) -> JointDistribution:
    return m.joint(over)


@dataclass
class DsepReport:
    passed: bool
    checked: int = 0
    separated: int = 0
    counterexample: dict | None = field(default=None)


def verify_dsep_property(m: ClassicalCausalModel, structure: CausalStructure | None = None) -> DsepReport:
    """Check that the observed distribution of ``m`` satisfies the d-separation property.

    Every disjoint triple (X, Y, Z) of observed nodes with X, Y non-empty and
    X d-separated from Y given Z must have X independent of Y given Z.
    ``structure`` defaults to the model's own; pass another graph to test the
    distribution against it.
    """
    g = structure if structure is not None else m.structure
    if set(g.observed) != set(m.observed):
        raise ModelError("structure and model disagree on the observed nodes")
    obs = g.observed
    d = m.joint(obs)
    report = DsepReport(passed=True)
    # labels: 0 none, 1 X, 2 Y, 3 Z; X/Y symmetric so require min X < min Y
    for labels in itertools.product(range(4), repeat=len(obs)):
        xs = [n for n, lab in zip(obs, labels) if lab == 1]
        ys = [n for n, lab in zip(obs, labels) if lab == 2]
        if not xs or not ys or labels.index(1) > labels.index(2):
            continue
        zs = [n for n, lab in zip(obs, labels) if lab == 3]
        report.checked += 1
        if not d_separated(g, xs, ys, zs):
            continue
        report.separated += 1
        cex = independence_counterexample(d, xs, ys, zs)
        if cex is not None:
            report.passed = False
            report.counterexample = {"X": xs, "Y": ys, "Z": zs, **cex}
            return report
    return report


__all__ = [
    "ClassicalCausalModel",
    "DsepReport",
    "EnumerationBoundError",
    "ExogenousDistribution",
    "GraphError",
    "JointDistribution",
    "Mechanism",
    "ModelError",
    "ZeroProbabilityError",
    "conditional",
    "conditionally_independent",
    "independence_counterexample",
    "joint_distribution",
    "verify_dsep_property",
]
