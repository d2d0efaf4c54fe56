"""Command-line front end: check | semantics | metric | ktop | dump.

Results go to stdout (or --output), diagnostics to stderr. Exit codes:
0 success, 1 parse/validation/analysis failure, 2 ill-formed dynamic
structure (check only). Output is deterministic; the JSON stats block's
millis field is the single exception.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .analysis import DEFAULT_BUDGET, AnalysisRequest, analyze
from .bdd import VarOrder, from_structure_function, minimise
from .domains import ValueKind, builtin
from .errors import AtError, BudgetExceeded
from .io import emit_dot, emit_dot_bdd, emit_model, emit_result, parse_model
from .semantics import (
    is_well_formed,
    minimal_attacks_dynamic,
    minimal_attacks_static,
)
from .tree import Dynamics, Shape, bas_of, classify


def _load(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def _write(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("ATQUANT_BUDGET")
    if env is None:
        return DEFAULT_BUDGET
    try:
        return int(env)
    except ValueError:
        raise AtError(f"ATQUANT_BUDGET is not an integer: {env!r}") from None


def _order(doc, name):
    if name is None:
        return None
    if name not in doc.orders:
        known = ", ".join(sorted(doc.orders)) or "(none declared)"
        raise AtError(f"unknown order {name!r}; declared: {known}")
    return VarOrder(doc.orders[name])


def _alpha(doc, domain, name: str) -> dict:
    """Attribution table for the domain. Pareto products take one name per
    component, comma-joined, zipped into vector singletons."""
    if domain.kind is ValueKind.PARETO:
        parts = [p.strip() for p in name.split(",")]
        if len(parts) != len(domain.components):
            raise AtError(
                f"{domain.name} needs {len(domain.components)} comma-joined "
                f"attribution names, got {len(parts)}"
            )
        tables = []
        for part in parts:
            if part not in doc.attributions:
                raise AtError(f"model declares no attribution {part!r}")
            tables.append(doc.attributions[part])
        return {
            b: frozenset({tuple(tab[b] for tab in tables)}) for b in bas_of(doc.tree)
        }
    if name not in doc.attributions:
        known = ", ".join(sorted(doc.attributions)) or "(none declared)"
        raise AtError(f"model declares no attribution {name!r}; declared: {known}")
    return dict(doc.attributions[name])


def _shape_text(kind) -> str:
    return "DAG" if kind.shape is Shape.DAG else "tree"


def cmd_check(args) -> int:
    try:
        doc = _load(args.model)
    except (AtError, OSError) as e:
        if args.format == "json":
            _write(args, json.dumps({"valid": False, "error": str(e)}, indent=2) + "\n")
        else:
            print(f"invalid: {e}", file=sys.stderr)
        return 1
    kind = classify(doc.tree)
    if kind.dynamics is Dynamics.DYNAMIC:
        well, cycle = is_well_formed(doc.tree)
    else:
        well, cycle = True, None
    cycle_labels = [doc.tree.label_of(v) for v in cycle] if cycle else None
    if args.format == "json":
        payload = {
            "valid": True,
            "shape": kind.shape.value,
            "dynamics": kind.dynamics.value,
            "well_formed": well,
            "cycle": cycle_labels,
        }
        _write(args, json.dumps(payload, indent=2) + "\n")
    else:
        line = f"{_shape_text(kind)}, {kind.dynamics.value}"
        if kind.dynamics is Dynamics.DYNAMIC:
            line += ", well-formed" if well else ", ill-formed"
        out = line + "\n"
        if not well:
            out += "cycle: " + " -> ".join(cycle_labels) + "\n"
        _write(args, out)
    return 0 if well else 2


def _attack_key(t, attack):
    pos = {b: i for i, b in enumerate(bas_of(t))}
    return (len(attack), tuple(sorted(pos[b] for b in attack)))


def _attack_labels(t, attack) -> list[str]:
    pos = {b: i for i, b in enumerate(bas_of(t))}
    return [t.label_of(b) for b in sorted(attack, key=pos.__getitem__)]


def cmd_semantics(args) -> int:
    doc = _load(args.model)
    t = doc.tree
    kind = classify(t)
    budget = _budget(args)
    if kind.dynamics is Dynamics.STATIC:
        suite = sorted(minimal_attacks_static(t, budget), key=lambda a: _attack_key(t, a))
        if args.format == "json":
            payload = {
                "kind": f"{_shape_text(kind)}, {kind.dynamics.value}",
                "attacks": [{"bas": _attack_labels(t, a)} for a in suite],
            }
            _write(args, json.dumps(payload, indent=2) + "\n")
        else:
            lines = ["{" + ", ".join(_attack_labels(t, a)) + "}" for a in suite]
            _write(args, "\n".join(lines) + "\n")
    else:
        suite = sorted(
            minimal_attacks_dynamic(t, budget),
            key=lambda p: (_attack_key(t, p.nodes), sorted(p.order)),
        )
        if args.format == "json":
            payload = {
                "kind": f"{_shape_text(kind)}, {kind.dynamics.value}",
                "attacks": [
                    {
                        "bas": _attack_labels(t, p.nodes),
                        "order": [
                            [t.label_of(a), t.label_of(b)] for a, b in sorted(p.order)
                        ],
                    }
                    for p in suite
                ],
            }
            _write(args, json.dumps(payload, indent=2) + "\n")
        else:
            lines = []
            for p in suite:
                bas = "{" + ", ".join(_attack_labels(t, p.nodes)) + "}"
                if p.order:
                    chain = ", ".join(
                        f"{t.label_of(a)} < {t.label_of(b)}" for a, b in sorted(p.order)
                    )
                    lines.append(f"{bas} : {chain}")
                else:
                    lines.append(f"{bas} : -")
            _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_metric(args) -> int:
    doc = _load(args.model)
    domain = builtin(args.domain)
    alpha = _alpha(doc, domain, args.attribution)
    req = AnalysisRequest(
        doc.tree,
        alpha,
        domain,
        algorithm=args.algorithm,
        order=_order(doc, args.order),
        budget=_budget(args),
    )
    res = analyze(req)
    _write(args, emit_result(res, doc.tree, args.format))
    return 0


def cmd_ktop(args) -> int:
    doc = _load(args.model)
    domain = builtin(args.domain)
    alpha = _alpha(doc, domain, args.attribution)
    req = AnalysisRequest(
        doc.tree,
        alpha,
        domain,
        k=args.k,
        order=_order(doc, args.order),
        budget=_budget(args),
    )
    res = analyze(req)
    _write(args, emit_result(res, doc.tree, args.format))
    return 0


def cmd_dump(args) -> int:
    doc = _load(args.model)
    if args.what == "at":
        _write(args, emit_dot(doc.tree))
    elif args.what == "model":
        _write(args, emit_model(doc))
    else:
        b = from_structure_function(doc.tree, _order(doc, args.order))
        if args.what == "bdd-min":
            b = minimise(b)
        _write(args, emit_dot_bdd(b, doc.tree))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="atquant", description="Quantitative attack-tree analysis."
    )
    sub = top.add_subparsers(dest="cmd", required=True)

    def common(p, fmt=True):
        p.add_argument("model", help="path to a .at model file")
        if fmt:
            p.add_argument("--format", choices=["json", "text"], default="text")
        p.add_argument("--output", help="write to this file instead of stdout")

    p = sub.add_parser("check", help="validate structure and well-formedness")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("semantics", help="enumerate the minimal attacks")
    common(p)
    p.add_argument("--budget", type=int, help="max BAS count for enumeration")
    p.set_defaults(fn=cmd_semantics)

    p = sub.add_parser("metric", help="compute a metric value")
    common(p)
    p.add_argument("--domain", required=True)
    p.add_argument("--attribution", required=True,
                   help="attribution name; comma-joined names for pareto products")
    p.add_argument("--algorithm", choices=["auto", "bu", "bdd", "oracle"], default="auto")
    p.add_argument("--order", help="declared variable order to use for BDDs")
    p.add_argument("--budget", type=int, help="max BAS count for the oracle")
    p.set_defaults(fn=cmd_metric)

    p = sub.add_parser("ktop", help="rank the k best attacks")
    common(p)
    p.add_argument("--domain", required=True)
    p.add_argument("--attribution", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--order", help="declared variable order to use")
    p.add_argument("--budget", type=int, help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_ktop)

    p = sub.add_parser("dump", help="emit DOT (or the canonical model text)")
    common(p, fmt=False)
    p.add_argument("--what", choices=["at", "bdd", "bdd-min", "model"], default="at")
    p.add_argument("--order", help="declared variable order for BDD dumps")
    p.set_defaults(fn=cmd_dump)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceeded as e:
        print(
            f"error: {e}; pass --budget (or set ATQUANT_BUDGET) to acknowledge "
            "the exponential cost",
            file=sys.stderr,
        )
        return 1
    except AtError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
