"""Versioned, byte-deterministic JSON reports.

Every rational quantity (a ``Fraction``) is written as a ``"p/q"`` string, so
a CHSH value of 4 reads ``"4/1"`` and no float ever enters a report. Plain
integers such as counts and alphabet sizes stay JSON integers.
"""
from __future__ import annotations

import dataclasses
import enum
import json
from fractions import Fraction
from typing import Any

from .correlations import PAIRS, BellBehavior, JammingVerdict, LocalityVerdict, LocalModelWitness
from .intervention import AffectsRelation
from .model import JointDistribution
from .spacetime import MinkowskiPoint, NSCVerdict, NSSVerdict

SCHEMA = "relcausal-report/1"


def rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def relation_dict(r: AffectsRelation) -> dict:
    out = {
        "source": list(r.source),
        "target": list(r.target),
        "do": list(r.do_set),
        "holds": r.holds,
        "irreducible": r.irreducible,
        "text": str(r),
    }
    if r.witness is not None:
        out["witness"] = r.witness
    return out


def behavior_dict(b: BellBehavior) -> dict:
    return {
        "rows": ["a,c=" + f"{a}{c}" for a, c in PAIRS],
        "columns": ["x,z=" + f"{x}{z}" for x, z in PAIRS],
        "table": b.rows(),
    }


def witness_dict(w: LocalModelWitness) -> list:
    return [
        {"f": list(f), "g": list(g), "weight": p}
        for (f, g), p in sorted(w.weights.items())
    ]


def nsc_dict(v: NSCVerdict) -> dict:
    return {
        "passed": v.passed,
        "violations": [f"{a}->{b}" for a, b in v.violations],
        "unchecked": [f"{a}->{b}" for a, b in v.unchecked],
    }


def nss_dict(v: NSSVerdict) -> dict:
    return {
        "passed": v.passed,
        "checked": len(v.checked),
        "violations": [{"relation": str(x.relation), "reason": x.reason} for x in v.violations],
    }


def locality_dict(v: LocalityVerdict) -> dict:
    out = {"local": v.local, "chsh": v.chsh, "signalling": v.signalling}
    if v.witness is not None:
        out["witness"] = witness_dict(v.witness)
    return out


def jamming_dict(v: JammingVerdict) -> dict:
    return {
        "is_jamming": v.is_jamming,
        "joint_dependence": v.joint_dependence,
        "x_marginal_invariant": v.x_marginal_invariant,
        "z_marginal_invariant": v.z_marginal_invariant,
        "skipped_b_values": list(v.skipped_b_values),
    }


def jsonable(obj: Any) -> Any:
    """Recursively convert to JSON types, rationals as strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, MinkowskiPoint):
        return {"t": rational(obj.t), "x": rational(obj.x)}
    if isinstance(obj, AffectsRelation):
        return jsonable(relation_dict(obj))
    if isinstance(obj, BellBehavior):
        return jsonable(behavior_dict(obj))
    if isinstance(obj, JointDistribution):
        return {
            "variables": list(obj.variables),
            "table": [{"values": list(k), "p": rational(p)} for k, p in sorted(obj.items())],
        }
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    if dataclasses.is_dataclass(obj):
        return jsonable({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def document(command: str, inputs: dict, passed: bool, body: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "inputs": inputs, "passed": passed, **body}


def dumps(doc: dict) -> str:
    """Byte-deterministic JSON text."""
    return json.dumps(jsonable(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _flatten(prefix: str, value: Any, out: list[str]) -> None:
    if isinstance(value, dict):
        if not value:
            out.append(f"{prefix}: {{}}")
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append(f"{prefix}: {json.dumps(value, ensure_ascii=False)}")


def table(doc: dict) -> str:
    """Flat ``key: value`` text rendering of a report."""
    lines: list[str] = []
    _flatten("", jsonable(doc), lines)
    return "\n".join(lines) + "\n"
