"""Built-in jamming / hidden-variable scenarios, their embeddings and timing."""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .graph import OBSERVED, UNOBSERVED, CausalStructure
from .intervention import AffectsRelation, enumerate_affects
from .model import ClassicalCausalModel, ExogenousDistribution, Mechanism, ModelError
from .spacetime import (
    MINKOWSKI,
    Embedding,
    MinkowskiPoint,
    Ordering,
    check_nss,
    joint_future,
    region_contains,
)

LAMBDA = "Lambda"
BUILTIN_NAMES = ("jamming-pr", "jamming-noisy", "jamming-symmetric", "nlhv")
DEFAULT_NOISE = Fraction(3, 16)


class ScenarioError(ValueError):
    pass


@dataclass
class ScenarioSpec:
    name: str
    model: ClassicalCausalModel
    embeddings: dict[str, Embedding]
    roles: dict[str, str]
    parameters: dict[str, Fraction] = field(default_factory=dict)
    _relations: list[AffectsRelation] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for role, node in self.roles.items():
            if node not in self.model.structure.roles:
                raise ScenarioError(f"designated {role} node {node!r} is not in the model")
        for role in ("A", "C", "X", "Z", "B"):
            node = self.roles.get(role)
            if node is not None and not self.model.structure.is_observed(node):
                raise ScenarioError(f"designated {role} node {node!r} must be observed")
        latent = self.roles.get("Lambda")
        if latent is not None and self.model.structure.is_observed(latent):
            raise ScenarioError(f"designated Lambda node {latent!r} must be unobserved")

    @property
    def relations(self) -> list[AffectsRelation]:
        """Every holding affects relation of the model (computed once)."""
        if self._relations is None:
            self._relations = enumerate_affects(self.model)
        return self._relations

    def embedding(self, name: str) -> Embedding:
        try:
            return self.embeddings[name]
        except KeyError:
            raise ScenarioError(
                f"scenario {self.name!r} has no embedding {name!r}; available: {sorted(self.embeddings)}"
            ) from None


def canonical_embeddings(xa=0, xc=4, latents=(LAMBDA,)) -> dict[str, Embedding]:
    """Task-1 and Task-2 embeddings for settings at (0, xa) and (0, xc).

    Coordinates are (t, x) with c = 1. With d = xc - xa: B sits where the light
    rays from A and C meet, latent nodes lie in the joint past, Task-1 outputs
    are timelike to their own setting only, Task-2 outputs are pushed outward
    by d/4 so every setting/output pair is spacelike.
    """
    xa, xc = Fraction(xa), Fraction(xc)
    d = xc - xa
    if d <= 0:
        raise ScenarioError("need xc > xa")
    mid = (xa + xc) / 2
    common = {
        "A": MinkowskiPoint(0, xa),
        "C": MinkowskiPoint(0, xc),
        "B": MinkowskiPoint(d / 2, mid),
    }
    for n in latents:
        common[n] = MinkowskiPoint(-Fraction(5, 4) * d, mid)
    task1 = {**common, "X": MinkowskiPoint(d / 4, xa), "Z": MinkowskiPoint(d / 4, xc)}
    task2 = {**common, "X": MinkowskiPoint(0, xa - d / 4), "Z": MinkowskiPoint(0, xc + d / 4)}
    return {"task1": Embedding(MINKOWSKI, task1), "task2": Embedding(MINKOWSKI, task2)}


def _xor(*v):
    return sum(v) % 2


def jamming_pr_model(latent_pmf: Mapping[int, Fraction] | None = None) -> ClassicalCausalModel:
    """Lambda uniform, X = Lambda, B = A.C, Z = Lambda xor B."""
    g = CausalStructure(
        {"A": OBSERVED, "C": OBSERVED, "B": OBSERVED, "X": OBSERVED, "Z": OBSERVED, LAMBDA: UNOBSERVED},
        [("A", "B"), ("C", "B"), (LAMBDA, "X"), (LAMBDA, "Z"), ("B", "Z")],
    )
    pmf = latent_pmf if latent_pmf is not None else {0: Fraction(1, 2), 1: Fraction(1, 2)}
    return ClassicalCausalModel(
        g,
        [
            Mechanism.primitive("B", "AND", ("A", "C")),
            Mechanism.primitive("X", "ID", (LAMBDA,)),
            Mechanism.primitive("Z", "XOR", (LAMBDA, "B")),
        ],
        [ExogenousDistribution(LAMBDA, pmf)],
    )


def _noise(p_f) -> ExogenousDistribution:
    p_f = Fraction(p_f)
    if not 0 <= p_f <= 1:
        raise ScenarioError(f"noise probability {p_f} outside [0, 1]")
    return ExogenousDistribution("F", {0: 1 - p_f, 1: p_f})


def jamming_noisy_model(p_f=DEFAULT_NOISE) -> ClassicalCausalModel:
    """Lambda = (E, F): X = E, B = A.C, Z = E xor F xor B with P(F = 1) = p_f."""
    g = CausalStructure(
        {"A": OBSERVED, "C": OBSERVED, "B": OBSERVED, "X": OBSERVED, "Z": OBSERVED,
         "E": UNOBSERVED, "F": UNOBSERVED},
        [("A", "B"), ("C", "B"), ("E", "X"), ("E", "Z"), ("F", "Z"), ("B", "Z")],
    )
    return ClassicalCausalModel(
        g,
        [
            Mechanism.primitive("B", "AND", ("A", "C")),
            Mechanism.primitive("X", "ID", ("E",)),
            Mechanism.primitive("Z", "XOR", ("E", "F", "B")),
        ],
        [ExogenousDistribution.uniform("E"), _noise(p_f)],
    )


def jamming_symmetric_model(p_f=0) -> ClassicalCausalModel:
    """Lambda = (E, F, G), E and G uniform; B feeds both outputs.

    X = E xor (G xor 1).(F xor B), Z = E xor G.(F xor B).
    """
    g = CausalStructure(
        {"A": OBSERVED, "C": OBSERVED, "B": OBSERVED, "X": OBSERVED, "Z": OBSERVED,
         "E": UNOBSERVED, "F": UNOBSERVED, "G": UNOBSERVED},
        [("A", "B"), ("C", "B"),
         ("E", "X"), ("G", "X"), ("F", "X"), ("B", "X"),
         ("E", "Z"), ("G", "Z"), ("F", "Z"), ("B", "Z")],
    )
    parents = ("E", "G", "F", "B")
    return ClassicalCausalModel(
        g,
        [
            Mechanism.primitive("B", "AND", ("A", "C")),
            Mechanism.from_function("X", parents, lambda e, g_, f, b: e ^ ((g_ ^ 1) & (f ^ b))),
            Mechanism.from_function("Z", parents, lambda e, g_, f, b: e ^ (g_ & (f ^ b))),
        ],
        [ExogenousDistribution.uniform("E"), ExogenousDistribution.uniform("G"), _noise(p_f)],
    )


def nlhv_model() -> ClassicalCausalModel:
    """No B: X = Lambda xor A.C, Z = Lambda, Lambda uniform."""
    g = CausalStructure(
        {"A": OBSERVED, "C": OBSERVED, "X": OBSERVED, "Z": OBSERVED, LAMBDA: UNOBSERVED},
        [("A", "X"), ("C", "X"), (LAMBDA, "X"), (LAMBDA, "Z")],
    )
    return ClassicalCausalModel(
        g,
        [
            Mechanism.from_function("X", (LAMBDA, "A", "C"), lambda lam, a, c: lam ^ (a & c)),
            Mechanism.primitive("Z", "ID", (LAMBDA,)),
        ],
        [ExogenousDistribution.uniform(LAMBDA)],
    )


_NAME_RE = re.compile(r"^([a-z-]+)(?:\((.*)\))?$")


def builtin(name: str, p_f=None) -> ScenarioSpec:
    """Look up a built-in scenario.

    The noise parameter of ``jamming-noisy`` / ``jamming-symmetric`` may be
    passed as ``p_f`` or inline, e.g. ``jamming-noisy(1/8)``.
    """
    match = _NAME_RE.match(name.strip())
    if not match or match.group(1) not in BUILTIN_NAMES:
        raise ScenarioError(f"unknown scenario {name!r}; built-ins are {list(BUILTIN_NAMES)}")
    base, inline = match.groups()
    if inline is not None:
        if p_f is not None:
            raise ScenarioError("noise parameter given twice")
        try:
            p_f = Fraction(inline.strip())
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(f"invalid noise parameter {inline!r}") from None
    if p_f is not None and base not in ("jamming-noisy", "jamming-symmetric"):
        raise ScenarioError(f"scenario {base!r} takes no noise parameter")

    roles = {"A": "A", "C": "C", "X": "X", "Z": "Z"}
    params: dict[str, Fraction] = {}
    if base == "jamming-pr":
        model = jamming_pr_model()
        latents = (LAMBDA,)
        roles.update(B="B", Lambda=LAMBDA)
    elif base == "jamming-noisy":
        params["p_f"] = Fraction(DEFAULT_NOISE if p_f is None else p_f)
        model = jamming_noisy_model(params["p_f"])
        latents = ("E", "F")
        roles.update(B="B")
    elif base == "jamming-symmetric":
        params["p_f"] = Fraction(0 if p_f is None else p_f)
        model = jamming_symmetric_model(params["p_f"])
        latents = ("E", "F", "G")
        roles.update(B="B")
    else:
        model = nlhv_model()
        latents = (LAMBDA,)
        roles.update(Lambda=LAMBDA)
    embeddings = canonical_embeddings(latents=latents)
    if "B" not in model.structure.roles:
        embeddings = {k: Embedding(e.space, {n: p for n, p in e.locations.items() if n != "B"})
                      for k, e in embeddings.items()}
    spec = ScenarioSpec(base, model, embeddings, roles, params)
    for kind, check in (("task1", task1_constraints), ("task2", task2_constraints)):
        failed = [k for k, ok in check(spec.embeddings[kind], roles).items() if not ok]
        if failed:
            raise AssertionError(f"{kind} embedding of {base} violates {failed}")
    return spec


def _before(e: Embedding, a: str, b: str) -> bool:
    return e.order(a, b) in (Ordering.BEFORE, Ordering.EQUAL)


def _spacelike(e: Embedding, a: str, b: str) -> bool:
    return e.order(a, b) is Ordering.SPACELIKE


def _latent_constraints(e: Embedding, roles: Mapping[str, str]) -> dict[str, bool]:
    out = {}
    latent = roles.get("Lambda")
    if latent is not None and latent in e:
        a, c = roles["A"], roles["C"]
        out["Lambda not in future of A"] = not _before(e, a, latent)
        out["Lambda not in future of C"] = not _before(e, c, latent)
        out["Lambda in joint past"] = all(
            _before(e, latent, n) for n in e.locations if n != latent and n in roles.values()
        )
    return out


def _bob_constraints(e: Embedding, roles: Mapping[str, str]) -> dict[str, bool]:
    b = roles.get("B")
    if b is None or b not in e:
        return {}
    a, c, x, z = (roles[k] for k in "ACXZ")
    return {
        "A < B": _before(e, a, b),
        "C < B": _before(e, c, b),
        "F(X)&F(Z) within F(B)": region_contains(e.future(b), joint_future(e, (x, z))),
    }


def task1_constraints(e: Embedding, roles: Mapping[str, str]) -> dict[str, bool]:
    """All four of A, C, X, Z pairwise spacelike except A < X and C < Z."""
    a, c, x, z = (roles[k] for k in "ACXZ")
    out = {
        "A < X": e.order(a, x) is Ordering.BEFORE,
        "C < Z": e.order(c, z) is Ordering.BEFORE,
        "A ~ C": _spacelike(e, a, c),
        "A ~ Z": _spacelike(e, a, z),
        "C ~ X": _spacelike(e, c, x),
        "X ~ Z": _spacelike(e, x, z),
    }
    out.update(_latent_constraints(e, roles))
    out.update(_bob_constraints(e, roles))
    return out


def task2_constraints(e: Embedding, roles: Mapping[str, str]) -> dict[str, bool]:
    """F(X) & F(Z) inside F(A) & F(C) while A does not precede X nor C precede Z."""
    a, c, x, z = (roles[k] for k in "ACXZ")
    out = {
        "F(X)&F(Z) within F(A)&F(C)": region_contains(joint_future(e, (a, c)), joint_future(e, (x, z))),
        "A not< X": not _before(e, a, x),
        "C not< Z": not _before(e, c, z),
    }
    out.update(_latent_constraints(e, roles))
    out.update(_bob_constraints(e, roles))
    return out


def slide_outputs(base: Embedding, s, x: str = "X", z: str = "Z", roles: Mapping[str, str] | None = None) -> Embedding:
    """Move X back along its constant-u light ray and Z along its constant-v ray by time ``s``.

    The joint future of {X, Z} is unchanged, so every containment that held
    for the base still holds.
    """
    s = Fraction(s)
    if s < 0:
        raise ScenarioError("slide parameter must be nonnegative")
    roles = dict(roles or {"A": "A", "C": "C", "X": x, "Z": z})
    failed = [k for k, ok in task2_constraints(base, roles).items() if not ok]
    if failed:
        raise ScenarioError(f"base embedding violates the Task-2 constraints {failed}")
    px, pz = base[x], base[z]
    moved = base.moved(**{x: MinkowskiPoint(px.t - s, px.x - s), z: MinkowskiPoint(pz.t - s, pz.x + s)})
    if joint_future(moved, (x, z)) != joint_future(base, (x, z)):
        raise AssertionError("sliding changed the joint future of the outputs")
    failed = [k for k, ok in task2_constraints(moved, roles).items() if not ok]
    if failed:
        raise AssertionError(f"slid embedding violates {failed}")
    return moved


@dataclass(frozen=True)
class SlideFamily:
    base: Embedding
    x: str = "X"
    z: str = "Z"

    def at(self, s) -> Embedding:
        return slide_outputs(self.base, s, self.x, self.z)


@dataclass(frozen=True)
class TimingReport:
    configuration: str
    t_nsc: Fraction
    t_jam: Fraction
    t_nhv: Fraction | None = None
    slide: Fraction | None = None
    nss_passed: bool | None = None
    apex: tuple[Fraction, Fraction] | None = None
    frame_note: str = ""


@functools.lru_cache(maxsize=1)
def _jamming_pr_relations() -> tuple[AffectsRelation, ...]:
    return tuple(builtin("jamming-pr").relations)


def timing(xa, xc, c=1, configuration: str = "colocated-outputs", s=0) -> TimingReport:
    """Correlation-establishment times for settings fixed at ``xa`` < ``xc``.

    ``colocated-outputs``: outputs at the settings' locations; the jamming time
    is when light from both settings first meets (Bob's location). ``slide``:
    Task-2 outputs slid back by time ``s``; the jamming time is the time of the
    output events.
    """
    xa, xc, c = Fraction(xa), Fraction(xc), Fraction(c)
    if c <= 0:
        raise ScenarioError("speed of light must be positive")
    if xc == xa:
        raise ScenarioError("degenerate geometry: xa == xc")
    if xc < xa:
        raise ScenarioError("need xc > xa")
    t_nsc = (xc - xa) / c
    # embeddings use natural time c*t so that light rays have unit slope
    embeddings = canonical_embeddings(xa, xc)
    if configuration == "colocated-outputs":
        apex = joint_future(embeddings["task1"], ("A", "C"))
        t_jam = apex.apex.t / c
        if t_jam != t_nsc / 2:
            raise AssertionError("colocated jamming time is not half the NSC time")
        return TimingReport(
            configuration, t_nsc, t_jam, t_nhv=Fraction(0), apex=(apex.u0, apex.v0),
            frame_note="common rest frame of the stationary parties",
        )
    if configuration == "slide":
        s = Fraction(s)
        moved = slide_outputs(embeddings["task2"], c * s)
        apex = joint_future(moved, ("X", "Z"))
        t_out = max(moved["X"].t, moved["Z"].t) / c
        relations = _jamming_pr_relations()
        return TimingReport(
            configuration, t_nsc, t_out, slide=s,
            nss_passed=check_nss(relations, moved).passed,
            apex=(apex.u0, apex.v0),
            frame_note="base frame of the Task-2 embedding; outputs slid along light rays",
        )
    raise ScenarioError(f"unknown configuration {configuration!r}")
