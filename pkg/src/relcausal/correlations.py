"""Bipartite Bell behaviours P(XZ|AC), CHSH, locality and jamming."""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .lp import nonnegative_solution
from .model import ClassicalCausalModel, ExogenousDistribution, ModelError, conditional
from .intervention import post_intervention_distribution

BITS = (0, 1)
# row order of the 4x4 table: (a, c); column order: (x, z)
PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


def _index(x: int, z: int, a: int, c: int) -> int:
    return a * 8 + c * 4 + x * 2 + z


@dataclass(frozen=True)
class BellBehavior:
    """Exact conditional distribution P(x, z | a, c) for binary x, z, a, c."""

    table: tuple[Fraction, ...]

    def __post_init__(self):
        table = tuple(Fraction(p) for p in self.table)
        if len(table) != 16:
            raise ValueError("a behaviour has exactly 16 entries")
        object.__setattr__(self, "table", table)
        for a, c in PAIRS:
            col = [table[_index(x, z, a, c)] for x, z in PAIRS]
            if any(p < 0 for p in col):
                raise ValueError(f"negative probability for settings a={a}, c={c}")
            if sum(col) != 1:
                raise ValueError(f"probabilities for settings a={a}, c={c} sum to {sum(col)}")

    @classmethod
    def from_function(cls, fn: Callable[[int, int, int, int], object]) -> "BellBehavior":
        """Build from ``fn(x, z, a, c)``."""
        table = [Fraction(0)] * 16
        for x, z, a, c in itertools.product(BITS, repeat=4):
            table[_index(x, z, a, c)] = Fraction(fn(x, z, a, c))
        return cls(tuple(table))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "BellBehavior":
        """4x4 table: row (a, c) in order 00, 01, 10, 11; column (x, z) likewise."""
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ValueError("behaviour table must be 4x4")
        table = [Fraction(0)] * 16
        for (a, c), row in zip(PAIRS, rows):
            for (x, z), p in zip(PAIRS, row):
                if isinstance(p, float):
                    raise ValueError(f"behaviour entries must be exact, got float {p!r}")
                table[_index(x, z, a, c)] = Fraction(p)
        return cls(tuple(table))

    @classmethod
    def deterministic(cls, f: Sequence[int], g: Sequence[int]) -> "BellBehavior":
        """x = f[a], z = g[c]."""
        return cls.from_function(lambda x, z, a, c: int(x == f[a] and z == g[c]))

    def rows(self) -> list[list[Fraction]]:
        return [[self.p(x, z, a, c) for x, z in PAIRS] for a, c in PAIRS]

    def p(self, x: int, z: int, a: int, c: int) -> Fraction:
        return self.table[_index(x, z, a, c)]

    def column(self, a: int, c: int) -> tuple[Fraction, ...]:
        return tuple(self.p(x, z, a, c) for x, z in PAIRS)

    def correlator(self, a: int, c: int) -> Fraction:
        """E(a, c) with outcomes 0 -> +1 and 1 -> -1."""
        return sum(((-1) ** (x ^ z) * self.p(x, z, a, c) for x, z in PAIRS), Fraction(0))

    def x_marginal(self, x: int, a: int, c: int) -> Fraction:
        return self.p(x, 0, a, c) + self.p(x, 1, a, c)

    def z_marginal(self, z: int, a: int, c: int) -> Fraction:
        return self.p(0, z, a, c) + self.p(1, z, a, c)

    def is_no_signalling(self) -> bool:
        return all(
            self.x_marginal(0, a, 0) == self.x_marginal(0, a, 1) for a in BITS
        ) and all(self.z_marginal(0, 0, c) == self.z_marginal(0, 1, c) for c in BITS)

    def settings_independent(self) -> bool:
        return len({self.column(a, c) for a, c in PAIRS}) == 1

    def max_column_distance(self) -> Fraction:
        """Largest total-variation distance between two setting columns."""
        cols = [self.column(a, c) for a, c in PAIRS]
        return max(
            sum((abs(p - q) for p, q in zip(c1, c2)), Fraction(0)) / 2
            for c1, c2 in itertools.combinations(cols, 2)
        )


PR_BOX = BellBehavior.from_function(lambda x, z, a, c: Fraction(1, 2) if x ^ z == a & c else 0)
UNIFORM = BellBehavior.from_function(lambda x, z, a, c: Fraction(1, 4))

# deterministic local strategies: x = f[a], z = g[c]
STRATEGIES: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = tuple(
    (f, g) for f in itertools.product(BITS, repeat=2) for g in itertools.product(BITS, repeat=2)
)


def chsh_values(b: BellBehavior) -> dict[tuple[int, int, int], Fraction]:
    """All eight CHSH expressions, keyed by the relabelling (alpha, beta, gamma).

    S = sum_{a,c} (-1)^(a.c + alpha.a + beta.c + gamma) E(a, c).
    """
    corr = {(a, c): b.correlator(a, c) for a, c in PAIRS}
    out = {}
    for alpha, beta, gamma in itertools.product(BITS, repeat=3):
        out[(alpha, beta, gamma)] = sum(
            ((-1) ** ((a & c) ^ (alpha & a) ^ (beta & c) ^ gamma) * corr[(a, c)] for a, c in PAIRS),
            Fraction(0),
        )
    return out


@functools.lru_cache(maxsize=65536)
def chsh_value(b: BellBehavior) -> Fraction:
    """Largest of the eight CHSH expressions."""
    return max(chsh_values(b).values())


@dataclass(frozen=True)
class LocalModelWitness:
    """Convex weights over the 16 deterministic strategies ((f0, f1), (g0, g1))."""

    weights: Mapping[tuple[tuple[int, int], tuple[int, int]], Fraction]

    def __post_init__(self):
        w = {s: Fraction(p) for s, p in dict(self.weights).items() if p}
        if any(p < 0 for p in w.values()) or sum(w.values()) != 1:
            raise ValueError("witness weights must be a probability distribution")
        unknown = set(w) - set(STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies {sorted(unknown)}")
        object.__setattr__(self, "weights", w)

    def __hash__(self) -> int:
        return hash(frozenset(self.weights.items()))

    def reconstruct(self) -> BellBehavior:
        table = [Fraction(0)] * 16
        for (f, g), p in self.weights.items():
            for a, c in PAIRS:
                table[_index(f[a], g[c], a, c)] += p
        return BellBehavior(tuple(table))


@dataclass(frozen=True)
class LocalityVerdict:
    local: bool
    chsh: Fraction
    signalling: bool = False
    witness: LocalModelWitness | None = field(default=None, compare=False)


def _strategy_matrix():
    cols = [BellBehavior.deterministic(f, g).table for f, g in STRATEGIES]
    rows = [[col[i] for col in cols] for i in range(16)]
    rows.append([Fraction(1)] * len(STRATEGIES))
    return rows


_STRATEGY_ROWS = _strategy_matrix()


@functools.lru_cache(maxsize=65536)
def local_decomposition(b: BellBehavior) -> LocalModelWitness | None:
    """Decide the local decomposition by exact linear feasibility.

    Independent of the CHSH route: solves for nonnegative weights on the
    deterministic strategies reproducing every entry of ``b``.
    """
    x = nonnegative_solution(_STRATEGY_ROWS, list(b.table) + [Fraction(1)])
    if x is None:
        return None
    witness = LocalModelWitness(dict(zip(STRATEGIES, x)))
    if witness.reconstruct() != b:
        raise ArithmeticError("feasibility solution does not reproduce the behaviour")
    return witness


def is_local(b: BellBehavior) -> LocalityVerdict:
    """Local iff no CHSH expression exceeds 2, for no-signalling behaviours.

    Local behaviours come with an exact witness. Signalling behaviours are
    decided by feasibility alone and flagged.
    """
    chsh = chsh_value(b)
    if not b.is_no_signalling():
        witness = local_decomposition(b)
        return LocalityVerdict(witness is not None, chsh, True, witness)
    if chsh > 2:
        return LocalityVerdict(False, chsh)
    witness = local_decomposition(b)
    if witness is None:
        raise ArithmeticError(f"CHSH {chsh} <= 2 but no local decomposition was found")
    return LocalityVerdict(True, chsh, False, witness)


def behavior_from_model(
    m: ClassicalCausalModel, a: str, c: str, x: str, z: str, mode: str = "do"
) -> BellBehavior:
    """P(x z | a c) of a model, either under do(A, C) or by conditioning.

    In ``observe-uniform`` mode parentless settings are given uniform priors
    before conditioning.
    """
    for n in (a, c, x, z):
        if n not in m.structure.roles or not m.structure.is_observed(n):
            raise ModelError(f"{n!r} is not an observed node")
        if m.alphabets[n] != 2:
            raise ModelError(f"{n!r} is not binary")
    table = [Fraction(0)] * 16
    if mode == "do":
        for av, cv in PAIRS:
            d = post_intervention_distribution(m, {a: av, c: cv}, (x, z))
            for (xv, zv), p in d.items():
                table[_index(xv, zv, av, cv)] = p
    elif mode == "observe-uniform":
        free = {n: ExogenousDistribution.uniform(n) for n in (a, c) if not m.structure.parents(n)}
        joint = m.replace(exogenous=free).joint((a, c, x, z))
        for av, cv in PAIRS:
            d = conditional(joint, (x, z), {a: av, c: cv})
            for (xv, zv), p in d.items():
                table[_index(xv, zv, av, cv)] = p
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'do' or 'observe-uniform'")
    return BellBehavior(tuple(table))


@dataclass(frozen=True)
class JammingVerdict:
    joint_dependence: bool
    x_marginal_invariant: bool
    z_marginal_invariant: bool
    skipped_b_values: tuple[int, ...] = ()

    @property
    def is_jamming(self) -> bool:
        return self.joint_dependence and self.x_marginal_invariant and self.z_marginal_invariant


def jamming_conditions(m: ClassicalCausalModel, b: str, x: str, z: str) -> JammingVerdict:
    """P(XZ|B) != P(XZ) while P(X|B) = P(X) and P(Z|B) = P(Z).

    Evaluated on the observational distribution (parentless settings default
    to uniform). Values of B with probability zero are skipped and reported.
    """
    joint = m.joint((b, x, z))
    p_xz, p_x, p_z = joint.marginal((x, z)), joint.marginal((x,)), joint.marginal((z,))
    b_marg = joint.marginal((b,))
    live = [v for v in range(m.alphabets[b]) if b_marg.probability({b: v}) > 0]
    skipped = tuple(v for v in range(m.alphabets[b]) if v not in live)
    if not live:
        raise ModelError(f"every value of {b!r} has probability zero")
    dep = any(conditional(joint, (x, z), {b: v}) != p_xz for v in live)
    x_inv = all(conditional(joint, (x,), {b: v}) == p_x for v in live)
    z_inv = all(conditional(joint, (z,), {b: v}) == p_z for v in live)
    return JammingVerdict(dep, x_inv, z_inv, skipped)
