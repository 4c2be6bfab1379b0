"""JSON scenario configuration: parsing with located diagnostics, and export.

A config document looks like::

    {
      "schema": "relcausal-scenario/1",
      "name": "my-scenario",
      "nodes": [{"name": "A", "role": "observed", "alphabet": 2}, ...],
      "edges": [["A", "B"], ...],
      "mechanisms": {
        "B": {"parents": ["A", "C"], "primitive": "AND"},
        "Z": {"parents": ["Lambda", "B"], "table": [0, 1, 1, 0]}
      },
      "exogenous": {"Lambda": {"0": "1/2", "1": "1/2"}},
      "embeddings": {
        "task1": {"space": "minkowski11", "locations": {"A": ["0", "0"], ...}},
        "lab": {"space": "poset", "elements": ["p", "q"], "covers": [["p", "q"]],
                "locations": {"A": "p", ...}}
      },
      "roles": {"A": "A", "C": "C", "X": "X", "Z": "Z"}
    }

Mechanism tables list outputs in lexicographic order of the parent values
(first parent most significant). Probabilities and coordinates are strings
such as ``"1/3"`` (integers are accepted); floats are rejected.
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Any

from .graph import ROLES, CausalStructure, GraphError
from .model import ClassicalCausalModel, ExogenousDistribution, Mechanism, ModelError
from .scenarios import ScenarioError, ScenarioSpec
from .spacetime import MINKOWSKI, Embedding, FinitePoset, MinkowskiPoint, SpaceError

SCHEMA = "relcausal-scenario/1"


class ConfigError(ValueError):
    """Malformed config; ``where`` is a JSON position or a field path."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"expected an exact rational string such as \"1/2\", got {value!r}", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"not a rational: {value!r}", where)


def _expect(value: Any, kind: type | tuple, where: str, what: str):
    if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise ConfigError(f"expected {what}", where)
    return value


def _nodes(doc: dict) -> tuple[dict[str, str], dict[str, int]]:
    roles: dict[str, str] = {}
    alphabets: dict[str, int] = {}
    for i, entry in enumerate(_expect(doc.get("nodes"), list, "nodes", "a list of nodes")):
        where = f"nodes[{i}]"
        _expect(entry, dict, where, "an object with name, role, alphabet")
        name = _expect(entry.get("name"), str, f"{where}.name", "a node name string")
        if name in roles:
            raise ConfigError(f"duplicate node {name!r}", f"{where}.name")
        role = entry.get("role", "observed")
        if role not in ROLES:
            raise ConfigError(f"role must be one of {list(ROLES)}, got {role!r}", f"{where}.role")
        size = _expect(entry.get("alphabet", 2), int, f"{where}.alphabet", "an integer alphabet size")
        if size < 1:
            raise ConfigError("alphabet size must be positive", f"{where}.alphabet")
        roles[name] = role
        alphabets[name] = size
    return roles, alphabets


def _edges(doc: dict) -> list[tuple[str, str]]:
    edges = []
    for i, e in enumerate(_expect(doc.get("edges", []), list, "edges", "a list of [source, target] pairs")):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(n, str) for n in e)):
            raise ConfigError("expected [source, target]", f"edges[{i}]")
        edges.append((e[0], e[1]))
    return edges


def _mechanism(node: str, spec: Any, alphabets: dict[str, int]) -> Mechanism:
    where = f"mechanisms.{node}"
    _expect(spec, dict, where, "an object with parents and primitive or table")
    parents = _expect(spec.get("parents", []), list, f"{where}.parents", "a list of parent names")
    for j, p in enumerate(parents):
        if p not in alphabets:
            raise ConfigError(f"unknown parent {p!r}", f"{where}.parents[{j}]")
    has_prim, has_table = "primitive" in spec, "table" in spec
    if has_prim == has_table:
        raise ConfigError("give exactly one of 'primitive' or 'table'", where)
    if has_prim:
        try:
            return Mechanism.primitive(node, spec["primitive"], parents)
        except ModelError as exc:
            raise ConfigError(str(exc), f"{where}.primitive") from None
    table = _expect(spec["table"], list, f"{where}.table", "a list of outputs")
    keys = list(itertools.product(*(range(alphabets[p]) for p in parents)))
    if len(table) != len(keys):
        raise ConfigError(f"table needs {len(keys)} entries, has {len(table)}", f"{where}.table")
    for j, out in enumerate(table):
        _expect(out, int, f"{where}.table[{j}]", "an integer output")
    return Mechanism(node, tuple(parents), dict(zip(keys, table)))


def _exogenous(node: str, spec: Any) -> ExogenousDistribution:
    where = f"exogenous.{node}"
    _expect(spec, dict, where, "an object mapping values to probability strings")
    pmf = {}
    for k, p in spec.items():
        try:
            v = int(k)
        except ValueError:
            raise ConfigError(f"value key {k!r} is not an integer", f"{where}.{k}") from None
        pmf[v] = parse_rational(p, f"{where}.{k}")
    try:
        return ExogenousDistribution(node, pmf)
    except ModelError as exc:
        raise ConfigError(str(exc), where) from None


def _embedding(name: str, spec: Any) -> Embedding:
    where = f"embeddings.{name}"
    _expect(spec, dict, where, "an object with space and locations")
    kind = spec.get("space")
    locs = _expect(spec.get("locations", {}), dict, f"{where}.locations", "an object of node locations")
    if kind == "minkowski11":
        points = {}
        for n, p in locs.items():
            at = f"{where}.locations.{n}"
            if not (isinstance(p, list) and len(p) == 2):
                raise ConfigError("expected [t, x]", at)
            points[n] = MinkowskiPoint(parse_rational(p[0], f"{at}[0]"), parse_rational(p[1], f"{at}[1]"))
        return Embedding(MINKOWSKI, points)
    if kind == "poset":
        elements = _expect(spec.get("elements"), list, f"{where}.elements", "a list of element names")
        covers = _expect(spec.get("covers", []), list, f"{where}.covers", "a list of [lower, upper] pairs")
        for j, c in enumerate(covers):
            if not (isinstance(c, list) and len(c) == 2):
                raise ConfigError("expected [lower, upper]", f"{where}.covers[{j}]")
        try:
            space = FinitePoset(elements, [tuple(c) for c in covers])
            return Embedding(space, locs)
        except (SpaceError, TypeError) as exc:
            raise ConfigError(str(exc), where) from None
    raise ConfigError(f"space must be 'minkowski11' or 'poset', got {kind!r}", f"{where}.space")


def from_dict(doc: Any) -> ScenarioSpec:
    """Build a scenario from an already-decoded config document."""
    _expect(doc, dict, "$", "a top-level object")
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", "schema")
    roles, alphabets = _nodes(doc)
    edges = _edges(doc)
    try:
        structure = CausalStructure(roles, edges)
    except GraphError as exc:
        raise ConfigError(str(exc), "edges") from None
    mech_doc = _expect(doc.get("mechanisms", {}), dict, "mechanisms", "an object keyed by node")
    exo_doc = _expect(doc.get("exogenous", {}), dict, "exogenous", "an object keyed by node")
    for section, d in (("mechanisms", mech_doc), ("exogenous", exo_doc)):
        for n in d:
            if n not in roles:
                raise ConfigError(f"unknown node {n!r}", f"{section}.{n}")
    mechanisms = [_mechanism(n, s, alphabets) for n, s in mech_doc.items()]
    exogenous = [_exogenous(n, s) for n, s in exo_doc.items()]
    try:
        model = ClassicalCausalModel(structure, mechanisms, exogenous, alphabets)
    except ModelError as exc:
        raise ConfigError(str(exc), "mechanisms") from None
    emb_doc = _expect(doc.get("embeddings", {}), dict, "embeddings", "an object keyed by embedding name")
    embeddings = {name: _embedding(name, s) for name, s in emb_doc.items()}
    designated = _expect(doc.get("roles", {}), dict, "roles", "an object of designated nodes")
    name = _expect(doc.get("name", "config"), str, "name", "a string")
    try:
        return ScenarioSpec(name, model, embeddings, dict(designated))
    except ScenarioError as exc:
        raise ConfigError(str(exc), "roles") from None


def loads(text: str) -> ScenarioSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return from_dict(doc)


def load(path: str) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _ratstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _export_embedding(e: Embedding) -> dict:
    if isinstance(e.space, FinitePoset):
        return {
            "space": "poset",
            "elements": list(e.space.elements),
            "covers": [list(c) for c in e.space.covers],
            "locations": dict(sorted(e.locations.items())),
        }
    return {
        "space": "minkowski11",
        "locations": {n: [_ratstr(p.t), _ratstr(p.x)] for n, p in sorted(e.locations.items())},
    }


def to_dict(spec: ScenarioSpec) -> dict:
    """Config document for ``spec``; mechanisms are always written as tables."""
    m = spec.model
    g = m.structure
    mechanisms = {}
    for n, mech in sorted(m.mechanisms.items()):
        keys = itertools.product(*(range(m.alphabets[p]) for p in mech.parent_order))
        mechanisms[n] = {"parents": list(mech.parent_order), "table": [mech.table[k] for k in keys]}
    return {
        "schema": SCHEMA,
        "name": spec.name,
        "nodes": [{"name": n, "role": g.roles[n], "alphabet": m.alphabets[n]} for n in g.nodes],
        "edges": [list(e) for e in sorted(g.edges)],
        "mechanisms": mechanisms,
        "exogenous": {
            n: {str(v): _ratstr(p) for v, p in sorted(d.pmf.items())} for n, d in sorted(m.exogenous.items())
        },
        "embeddings": {k: _export_embedding(e) for k, e in sorted(spec.embeddings.items())},
        "roles": dict(sorted(spec.roles.items())),
    }


def dumps(spec: ScenarioSpec) -> str:
    return json.dumps(to_dict(spec), indent=2, sort_keys=True) + "\n"
