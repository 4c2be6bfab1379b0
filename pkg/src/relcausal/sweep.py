"""Brute-force check that NSC-respecting classical models cannot do the two tasks.

Models are generated on the largest causal structure that NSC allows for the
canonical Task-1 / Task-2 embedding (settings free, shared latent in the joint
past), with every deterministic mechanism on that structure and latent
distributions from a configured set.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .correlations import behavior_from_model, chsh_value, is_local
from .graph import OBSERVED, UNOBSERVED, CausalStructure, d_separated
from .model import ClassicalCausalModel, ExogenousDistribution, Mechanism, independence_counterexample
from .scenarios import LAMBDA, canonical_embeddings
from .spacetime import Embedding, Ordering, SpaceError

FREE = ("A", "C")
DEFAULT_MODEL_CAP = 1_000_000


class SweepError(ValueError):
    pass


def nsc_allowed_edges(nodes: Iterable[str], e: Embedding, free: Iterable[str] = FREE) -> set[tuple[str, str]]:
    """Edges N -> M permitted by NSC: loc(N) precedes or equals loc(M), never into a free node."""
    nodes = list(nodes)
    free = set(free)
    for n in nodes:
        if n not in e:
            raise SpaceError(f"node {n!r} is not located")
    allowed = set()
    for n, m in itertools.permutations(nodes, 2):
        if m in free:
            continue
        if e.order(n, m) in (Ordering.BEFORE, Ordering.EQUAL):
            allowed.add((n, m))
    return allowed


def latent_distributions(k: int, spec: str | tuple = "uniform") -> list[dict[int, Fraction]]:
    """Latent pmfs: ``"uniform"`` or ``("grid", d)``, every pmf with entries i/d' for d' <= d."""
    if spec == "uniform":
        return [{v: Fraction(1, k) for v in range(k)}]
    kind, d = spec
    if kind != "grid" or d < 1:
        raise SweepError(f"unknown latent distribution set {spec!r}")
    seen = {}
    for denom in range(1, d + 1):
        for cuts in itertools.combinations(range(denom + k - 1), k - 1):
            parts, prev = [], -1
            for cut in cuts + (denom + k - 1,):
                parts.append(cut - prev - 1)
                prev = cut
            pmf = tuple(Fraction(p, denom) for p in parts)
            seen.setdefault(pmf, None)
    return [dict(enumerate(p)) for p in seen]


@dataclass(frozen=True)
class SweepConfig:
    task: int = 1
    latent_k: int = 2
    mode: str = "exhaustive"
    budget: int = 1000
    seed: int = 0
    latent_dists: str | tuple = "uniform"
    model_cap: int = DEFAULT_MODEL_CAP
    proof_trace: bool = True

    def __post_init__(self):
        if self.task not in (1, 2):
            raise SweepError("task must be 1 or 2")
        if self.latent_k < 1:
            raise SweepError("latent cardinality must be positive")
        if self.mode not in ("exhaustive", "sampled"):
            raise SweepError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.budget < 1:
            raise SweepError("sampled mode needs a positive budget")


@dataclass
class SweepReport:
    config: SweepConfig
    allowed_edges: list[tuple[str, str]]
    models_checked: int = 0
    max_chsh: Fraction | None = None
    max_column_distance: Fraction | None = None
    witnesses_verified: int = 0
    distinct_behaviors: int = 0
    graph_trace: dict[str, bool] = field(default_factory=dict)
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples and all(self.graph_trace.values())


def _structure(cfg: SweepConfig) -> tuple[CausalStructure, list[tuple[str, str]]]:
    e = canonical_embeddings()[f"task{cfg.task}"]
    nodes = (LAMBDA, "A", "C", "X", "Z")
    edges = sorted(nsc_allowed_edges(nodes, e))
    roles = {n: OBSERVED for n in nodes}
    roles[LAMBDA] = UNOBSERVED
    return CausalStructure(roles, edges), edges


def _mechanism_space(g: CausalStructure, alphabets: dict[str, int]):
    """For each parented node: (node, parent order, list of input tuples)."""
    out = []
    for n in g.topological_order():
        parents = tuple(sorted(g.parents(n)))
        if parents:
            inputs = list(itertools.product(*(range(alphabets[p]) for p in parents)))
            out.append((n, parents, inputs))
    return out


def _models(cfg: SweepConfig, g: CausalStructure) -> Iterator[tuple[dict, ClassicalCausalModel]]:
    alphabets = {n: 2 for n in g.nodes}
    alphabets[LAMBDA] = cfg.latent_k
    space = _mechanism_space(g, alphabets)
    dists = latent_distributions(cfg.latent_k, cfg.latent_dists)

    def build(outputs: tuple[tuple[int, ...], ...], pmf: dict) -> tuple[dict, ClassicalCausalModel]:
        mechs = [
            Mechanism(n, parents, dict(zip(inputs, outs)))
            for (n, parents, inputs), outs in zip(space, outputs)
        ]
        desc = {n: list(outs) for (n, _, _), outs in zip(space, outputs)}
        desc[LAMBDA] = {str(v): str(p) for v, p in pmf.items()}
        m = ClassicalCausalModel(g, mechs, [ExogenousDistribution(LAMBDA, pmf)], alphabets)
        return desc, m

    per_node = [list(itertools.product(range(alphabets[n]), repeat=len(inputs))) for n, _, inputs in space]
    if cfg.mode == "exhaustive":
        total = len(dists)
        for choices in per_node:
            total *= len(choices)
        if total > cfg.model_cap:
            raise SweepError(f"exhaustive sweep would generate {total} models, cap is {cfg.model_cap}")
        for pmf in dists:
            for outputs in itertools.product(*per_node):
                yield build(outputs, pmf)
    else:
        rng = random.Random(cfg.seed)
        for _ in range(cfg.budget):
            outputs = tuple(
                tuple(rng.randrange(alphabets[n]) for _ in inputs) for n, _, inputs in space
            )
            yield build(outputs, rng.choice(dists))


def _graph_trace(cfg: SweepConfig, g: CausalStructure) -> dict[str, bool]:
    if cfg.task == 1:
        return {
            "Lambda _||_ AC": d_separated(g, {LAMBDA}, {"A", "C"}, ()),
            "X _||_ Z | Lambda A C": d_separated(g, {"X"}, {"Z"}, {LAMBDA, "A", "C"}),
            "X _||_ C | A Lambda": d_separated(g, {"X"}, {"C"}, {"A", LAMBDA}),
            "Z _||_ A | C Lambda": d_separated(g, {"Z"}, {"A"}, {"C", LAMBDA}),
        }
    return {"XZ _||_ AC": d_separated(g, {"X", "Z"}, {"A", "C"}, ())}


_PROOF_STEPS = (
    ("P(Lambda|AC) = P(Lambda)", (LAMBDA,), ("A", "C"), ()),
    ("P(X|Lambda Z A C) = P(X|Lambda A C)", ("X",), ("Z",), (LAMBDA, "A", "C")),
    ("P(X|Lambda A C) = P(X|Lambda A)", ("X",), ("C",), (LAMBDA, "A")),
    ("P(Z|Lambda A C) = P(Z|Lambda C)", ("Z",), ("A",), (LAMBDA, "C")),
)


def sweep(cfg: SweepConfig) -> SweepReport:
    """Run every generated model through the task's impossibility check.

    Task 1: CHSH <= 2 and an exact local witness (plus, with ``proof_trace``,
    the conditional independences used in the impossibility argument).
    Task 2: P(XZ|AC) identical for all setting pairs.
    """
    g, edges = _structure(cfg)
    report = SweepReport(cfg, edges, graph_trace=_graph_trace(cfg, g))
    behaviours = set()
    for desc, m in _models(cfg, g):
        report.models_checked += 1
        b = behavior_from_model(m, "A", "C", "X", "Z", mode="do")
        behaviours.add(b)
        failures = []
        if cfg.task == 1:
            chsh = chsh_value(b)
            if report.max_chsh is None or chsh > report.max_chsh:
                report.max_chsh = chsh
            if chsh > 2:
                failures.append(f"CHSH {chsh} > 2")
            verdict = is_local(b)
            if not verdict.local or verdict.witness is None:
                failures.append("no local decomposition")
            elif verdict.witness.reconstruct() == b:
                report.witnesses_verified += 1
            else:
                failures.append("local witness does not reproduce the behaviour")
            if cfg.proof_trace:
                joint = m.joint((LAMBDA, "A", "C", "X", "Z"))
                for label, xs, ys, zs in _PROOF_STEPS:
                    if independence_counterexample(joint, xs, ys, zs) is not None:
                        failures.append(f"proof step fails: {label}")
        else:
            dist = b.max_column_distance()
            if report.max_column_distance is None or dist > report.max_column_distance:
                report.max_column_distance = dist
            if dist != 0:
                failures.append(f"settings-dependent behaviour (distance {dist})")
        if failures:
            report.counterexamples.append({"model": desc, "failures": failures})
    report.distinct_behaviors = len(behaviours)
    return report
