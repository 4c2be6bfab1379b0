"""Command-line interface.

Exit codes: 0 when the check passes (or a plain computation succeeds), 1 when
a checker returns a negative verdict, 2 for usage, config or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import config, report
from .correlations import BellBehavior, behavior_from_model, chsh_value, chsh_values, is_local, jamming_conditions
from .graph import GraphError, d_separated
from .intervention import affects, enumerate_affects, with_irreducibility
from .model import ModelError
from .scenarios import ScenarioError, ScenarioSpec, builtin, timing
from .spacetime import Minkowski11, SpaceError, check_nsc, check_nss
from .sweep import SweepConfig, SweepError, sweep


class UsageError(Exception):
    pass


def _load_source(source: str) -> ScenarioSpec:
    if source.endswith(".json") or os.path.sep in source or os.path.exists(source):
        try:
            return config.load(source)
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc.strerror}") from None
    return builtin(source)


def _names(text: str | None) -> list[str]:
    if not text:
        return []
    return [n.strip() for n in text.split(",") if n.strip()]


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _role(spec: ScenarioSpec, role: str, override: str | None) -> str:
    node = override or spec.roles.get(role)
    if node is None:
        raise UsageError(f"scenario {spec.name!r} designates no {role} node; pass --{role.lower()}")
    return node


def _behavior(args, spec: ScenarioSpec | None) -> BellBehavior:
    if args.behavior:
        try:
            with open(args.behavior, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.behavior}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise config.ConfigError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
        rows = doc.get("table", doc.get("rows")) if isinstance(doc, dict) else doc
        if not isinstance(rows, list) or len(rows) != 4:
            raise config.ConfigError("expected a 4x4 table of rational strings", "table")
        parsed = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 4:
                raise config.ConfigError("expected a row of 4 entries", f"table[{i}]")
            parsed.append([config.parse_rational(p, f"table[{i}][{j}]") for j, p in enumerate(row)])
        try:
            return BellBehavior.from_rows(parsed)
        except ValueError as exc:
            raise config.ConfigError(str(exc), "table") from None
    if spec is None:
        raise UsageError("give a scenario or --behavior FILE")
    a, c, x, z = (_role(spec, r, None) for r in "ACXZ")
    return behavior_from_model(spec.model, a, c, x, z, mode=args.mode)


def _timing_block(spec: ScenarioSpec, embedding: str) -> dict | None:
    e = spec.embeddings.get(embedding)
    a, c = spec.roles.get("A"), spec.roles.get("C")
    if e is None or not isinstance(e.space, Minkowski11) or a not in e or c not in e:
        return None
    xa, xc = sorted((e[a].x, e[c].x))
    if xa == xc:
        return None
    return report.jsonable(timing(xa, xc))


def cmd_scenario(args) -> tuple[bool, dict]:
    spec = _load_source(args.name)
    if args.action == "export":
        doc = config.to_dict(spec)
        return True, {"config": doc}
    e = spec.embedding(args.embedding)
    m = spec.model
    body: dict = {
        "model": {
            "name": spec.name,
            "nodes": {n: {"role": m.structure.roles[n], "alphabet": m.alphabets[n]} for n in m.structure.nodes},
            "edges": [f"{u}->{v}" for u, v in sorted(m.structure.edges)],
            "roles": spec.roles,
            "parameters": spec.parameters,
        },
    }
    if all(r in spec.roles for r in "ACXZ"):
        b = behavior_from_model(m, *(spec.roles[r] for r in "ACXZ"))
        body["behavior"] = report.behavior_dict(b)
        body["chsh"] = chsh_value(b)
    if "B" in spec.roles:
        body["jamming"] = report.jamming_dict(
            jamming_conditions(m, spec.roles["B"], spec.roles["X"], spec.roles["Z"])
        )
    body["nsc"] = report.nsc_dict(check_nsc(m.structure, e))
    nss = check_nss(spec.relations, e)
    body["nss"] = report.nss_dict(nss)
    body["timing"] = _timing_block(spec, args.embedding)
    return nss.passed, body


def cmd_dsep(args) -> tuple[bool, dict]:
    spec = _load_source(args.source)
    xs, ys, zs = _names(args.x), _names(args.y), _names(args.given)
    sep = d_separated(spec.model.structure, xs, ys, zs)
    return sep, {"d_separated": sep}


def cmd_affects(args) -> tuple[bool, dict]:
    spec = _load_source(args.source)
    if not args.source_set:
        rels = enumerate_affects(spec.model)
        return True, {"relations": [report.relation_dict(r) for r in rels]}
    if not args.target:
        raise UsageError("--target is required with --from")
    r = affects(spec.model, _names(args.source_set), _names(args.target), _names(args.do))
    if r.holds:
        r = with_irreducibility(spec.model, r)
    return r.holds, {"relation": report.relation_dict(r)}


def cmd_check_nsc(args) -> tuple[bool, dict]:
    spec = _load_source(args.source)
    v = check_nsc(spec.model.structure, spec.embedding(args.embedding), strict=args.strict)
    return v.passed, {"nsc": report.nsc_dict(v)}


def cmd_check_nss(args) -> tuple[bool, dict]:
    spec = _load_source(args.source)
    v = check_nss(spec.relations, spec.embedding(args.embedding))
    return v.passed, {"nss": report.nss_dict(v)}


def cmd_chsh(args) -> tuple[bool, dict]:
    spec = _load_source(args.source) if args.source else None
    b = _behavior(args, spec)
    values = {f"{al}{be}{ga}": s for (al, be, ga), s in sorted(chsh_values(b).items())}
    return True, {"behavior": report.behavior_dict(b), "chsh": chsh_value(b), "chsh_variants": values}


def cmd_local(args) -> tuple[bool, dict]:
    spec = _load_source(args.source) if args.source else None
    b = _behavior(args, spec)
    v = is_local(b)
    return v.local, {"behavior": report.behavior_dict(b), "locality": report.locality_dict(v)}


def cmd_jamming(args) -> tuple[bool, dict]:
    spec = _load_source(args.source)
    b, x, z = (_role(spec, r, getattr(args, r.lower())) for r in "BXZ")
    v = jamming_conditions(spec.model, b, x, z)
    return v.is_jamming, {"jamming": report.jamming_dict(v)}


def _latent_dists(text: str):
    if text == "uniform":
        return "uniform"
    kind, _, d = text.partition(":")
    if kind != "grid" or not d.isdigit():
        raise UsageError("--latent-dists must be 'uniform' or 'grid:D'")
    return ("grid", int(d))


def cmd_sweep(args) -> tuple[bool, dict]:
    cfg = SweepConfig(
        task=args.task,
        latent_k=args.latent_k,
        mode=args.mode,
        budget=args.budget,
        seed=args.seed,
        latent_dists=_latent_dists(args.latent_dists),
        proof_trace=not args.no_proof_trace,
    )
    r = sweep(cfg)
    body = {
        "sweep": {
            "task": cfg.task,
            "latent_k": cfg.latent_k,
            "mode": cfg.mode,
            "seed": cfg.seed,
            "allowed_edges": [f"{u}->{v}" for u, v in r.allowed_edges],
            "models_checked": r.models_checked,
            "max_chsh": r.max_chsh,
            "max_column_distance": r.max_column_distance,
            "witnesses_verified": r.witnesses_verified,
            "distinct_behaviors": r.distinct_behaviors,
            "graph_trace": r.graph_trace,
            "counterexample_count": len(r.counterexamples),
            "counterexamples": r.counterexamples[: args.max_counterexamples],
        }
    }
    return r.passed, body


def cmd_timing(args) -> tuple[bool, dict]:
    t = timing(
        _rational(args.xa), _rational(args.xc), _rational(args.c),
        configuration=args.configuration, s=_rational(args.s),
    )
    passed = t.nss_passed is not False
    return passed, {"timing": t}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="relcausal", description="Relativistic causal model checks.")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", parents=[common], help="run or export a built-in or config scenario")
    sc.add_argument("action", choices=("run", "export"))
    sc.add_argument("name", help="built-in name (e.g. jamming-pr, jamming-noisy(1/8)) or config path")
    sc.add_argument("--embedding", default="task1")
    sc.add_argument("--report", dest="out_alias", help="same as --out")
    sc.set_defaults(func=cmd_scenario)

    ds = sub.add_parser("dsep", parents=[common], help="d-separation query")
    ds.add_argument("source")
    ds.add_argument("x", help="comma-separated node list")
    ds.add_argument("y", help="comma-separated node list")
    ds.add_argument("--given", default="")
    ds.set_defaults(func=cmd_dsep)

    af = sub.add_parser("affects", parents=[common], help="decide or enumerate affects relations")
    af.add_argument("source")
    af.add_argument("--from", dest="source_set", help="comma-separated source set; omit to enumerate all")
    af.add_argument("--target")
    af.add_argument("--do", default="")
    af.set_defaults(func=cmd_affects)

    for name, fn in (("check-nsc", cmd_check_nsc), ("check-nss", cmd_check_nss)):
        c = sub.add_parser(name, parents=[common], help=f"{name[6:].upper()} verdict for an embedding")
        c.add_argument("source")
        c.add_argument("--embedding", default="task1")
        if name == "check-nsc":
            c.add_argument("--strict", action="store_true", help="disallow coincident endpoints")
        c.set_defaults(func=fn)

    for name, fn in (("chsh", cmd_chsh), ("local", cmd_local)):
        c = sub.add_parser(name, parents=[common], help=f"{name} of a model's or a file's behaviour")
        c.add_argument("source", nargs="?")
        c.add_argument("--behavior", help="JSON file with a 4x4 table (rows a,c; columns x,z)")
        c.add_argument("--mode", choices=("do", "observe-uniform"), default="do")
        c.set_defaults(func=fn)

    jm = sub.add_parser("jamming", parents=[common], help="jamming conditions for B, X, Z")
    jm.add_argument("source")
    for r in "bxz":
        jm.add_argument(f"--{r}")
    jm.set_defaults(func=cmd_jamming)

    sw = sub.add_parser("sweep", parents=[common], help="brute-force impossibility sweep")
    sw.add_argument("--task", type=int, choices=(1, 2), default=1)
    sw.add_argument("--latent-k", type=int, default=2)
    sw.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    sw.add_argument("--budget", type=int, default=1000)
    sw.add_argument("--latent-dists", default="uniform", help="'uniform' or 'grid:D'")
    sw.add_argument("--no-proof-trace", action="store_true")
    sw.add_argument("--max-counterexamples", type=int, default=20)
    sw.set_defaults(func=cmd_sweep)

    tm = sub.add_parser("timing", parents=[common], help="correlation-establishment times")
    tm.add_argument("--xa", default="0")
    tm.add_argument("--xc", default="4")
    tm.add_argument("--c", default="1")
    tm.add_argument("--configuration", choices=("colocated-outputs", "slide"), default="colocated-outputs")
    tm.add_argument("--s", default="0")
    tm.set_defaults(func=cmd_timing)
    return p


_INPUT_ERRORS = (UsageError, config.ConfigError, ScenarioError, GraphError, ModelError, SpaceError, SweepError)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = getattr(args, "out_alias", None) or args.out
    try:
        passed, body = args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "out_alias", "format")}
    if args.command == "scenario" and args.action == "export":
        text = json.dumps(body["config"], indent=2, sort_keys=True) + "\n"
    else:
        doc = report.document(args.command, inputs, passed, body)
        text = report.dumps(doc) if args.format == "json" else report.table(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0 if passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
