from __future__ import annotations

import json
from fractions import Fraction

import pytest

from relcausal import config
from relcausal.config import ConfigError
from relcausal.scenarios import BUILTIN_NAMES, builtin
from relcausal.spacetime import FinitePoset, MinkowskiPoint, check_nsc

CHAIN = {
    "name": "chain",
    "nodes": [{"name": "A"}, {"name": "X"}, {"name": "L", "role": "unobserved", "alphabet": 3}],
    "edges": [["A", "X"], ["L", "X"]],
    "mechanisms": {"X": {"parents": ["A", "L"], "table": [0, 0, 1, 1, 1, 0]}},
    "exogenous": {"A": {"0": "1/3", "1": "2/3"}, "L": {"0": "1/2", "1": "1/4", "2": "1/4"}},
    "embeddings": {
        "lab": {"space": "minkowski11", "locations": {"A": ["0", "0"], "X": ["1", "1/2"]}},
        "poset": {"space": "poset", "elements": ["p", "q"], "covers": [["p", "q"]],
                  "locations": {"A": "p", "X": "q"}},
    },
}


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_round_trip(name):
    spec = builtin(name)
    back = config.loads(config.dumps(spec))
    assert back.model == spec.model
    assert back.roles == spec.roles
    for k, e in spec.embeddings.items():
        assert back.embeddings[k].locations == e.locations
    assert config.dumps(back) == config.dumps(spec)


def test_parse_chain():
    spec = config.from_dict(CHAIN)
    m = spec.model
    assert m.alphabets == {"A": 2, "X": 2, "L": 3}
    assert m.mechanisms["X"](1, 0) == 1 and m.mechanisms["X"](1, 2) == 0
    assert m.exogenous["A"].pmf == {0: Fraction(1, 3), 1: Fraction(2, 3)}
    assert spec.embedding("lab")["X"] == MinkowskiPoint(1, Fraction(1, 2))
    assert isinstance(spec.embedding("poset").space, FinitePoset)
    assert check_nsc(m.structure, spec.embedding("lab")).unchecked == [("L", "X")]
    assert config.loads(config.dumps(spec)).model == m


def test_primitive_mechanism():
    doc = {
        "nodes": [{"name": "A"}, {"name": "B"}, {"name": "C"}],
        "edges": [["A", "C"], ["B", "C"]],
        "mechanisms": {"C": {"parents": ["A", "B"], "primitive": "XOR"}},
    }
    m = config.from_dict(doc).model
    assert m.mechanisms["C"](1, 1) == 0


def _error(doc) -> ConfigError:
    text = doc if isinstance(doc, str) else json.dumps(doc)
    with pytest.raises(ConfigError) as info:
        config.loads(text)
    return info.value


def test_syntax_error_has_line_and_column():
    err = _error('{\n  "nodes": [\n    {"name": "A",}\n  ]\n}')
    assert err.where == "line 3, column 18"


def test_float_probability_rejected():
    doc = json.loads(json.dumps(CHAIN))
    doc["exogenous"]["A"] = {"0": 0.5, "1": "1/2"}
    assert _error(doc).where == "exogenous.A.0"


def test_field_paths():
    doc = json.loads(json.dumps(CHAIN))
    doc["mechanisms"]["X"]["table"] = [0, 1]
    assert _error(doc).where == "mechanisms.X.table"

    doc = json.loads(json.dumps(CHAIN))
    doc["nodes"][1]["role"] = "latent"
    assert _error(doc).where == "nodes[1].role"

    doc = json.loads(json.dumps(CHAIN))
    doc["edges"].append(["X", "A"])
    assert _error(doc).where == "edges"

    doc = json.loads(json.dumps(CHAIN))
    doc["embeddings"]["lab"]["space"] = "euclid"
    assert _error(doc).where == "embeddings.lab.space"

    doc = json.loads(json.dumps(CHAIN))
    doc["exogenous"]["L"]["2"] = "1/2"
    assert _error(doc).where == "exogenous.L"

    doc = json.loads(json.dumps(CHAIN))
    doc["mechanisms"]["X"]["parents"] = ["A", "Q"]
    assert _error(doc).where == "mechanisms.X.parents[1]"

    doc = json.loads(json.dumps(CHAIN))
    doc["roles"] = {"A": "missing"}
    assert _error(doc).where == "roles"

    doc = json.loads(json.dumps(CHAIN))
    doc["schema"] = "other/9"
    assert _error(doc).where == "schema"


def test_missing_mechanism_reported():
    doc = json.loads(json.dumps(CHAIN))
    del doc["mechanisms"]["X"]
    assert "X" in str(_error(doc))


def test_bad_poset():
    doc = json.loads(json.dumps(CHAIN))
    doc["embeddings"]["poset"]["covers"] = [["p", "q"], ["q", "p"]]
    assert _error(doc).where == "embeddings.poset"
