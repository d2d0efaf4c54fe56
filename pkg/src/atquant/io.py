"""Model files, result serialization, DOT export.

The model format is Galileo-flavoured: quoted node labels, one declaration
per line, `//` comments. Beyond the tree itself a file may carry named
attribution blocks (BAS label -> value) and named variable orders:

    toplevel "root";
    "root" or "n" "crypto";
    "crypto" and "t" "p";
    "n" bas;  "t" bas;  "p" bas;

    attribution "cost" { "n" = 10; "t" = 2; "p" = inf; }
    order "left" = "n" < "t" < "p";

Values are exact: integers, ratios p/q, decimals (read as exact rationals),
or inf. Emission is canonical, so emit(parse(emit(doc))) == emit(doc).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .analysis import AnalysisResult
from .bdd import FALSE, TRUE, Bdd
from .domains import INF
from .errors import (
    BasWithChildren,
    CyclicStructure,
    DanglingReference,
    DuplicateDefinition,
    GateWithoutChildren,
    ModelSyntaxError,
    TreeBuildError,
    UnknownNode,
)
from .tree import AttackTree, NodeType, bas_of, build

_KINDS = {"bas": NodeType.BAS, "or": NodeType.OR, "and": NodeType.AND, "sand": NodeType.SAND}
_PUNCT = set(";{}=<>/(),")


@dataclass(frozen=True)
class ModelDocument:
    tree: AttackTree
    attributions: dict = field(default_factory=dict)  # name -> {bas id -> value}
    orders: dict = field(default_factory=dict)  # name -> tuple of bas ids


@dataclass(frozen=True)
class _Token:
    kind: str  # STR WORD NUM PUNCT EOF
    text: str
    line: int
    col: int


def _scan(text: str) -> list[_Token]:
    out = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                raise ModelSyntaxError("unterminated string", line, col)
            out.append(_Token("STR", text[i + 1:j], line, col))
            col += j - i + 1
            i = j + 1
        elif c.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            out.append(_Token("NUM", text[i:j], line, col))
            col += j - i
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_-"):
                j += 1
            out.append(_Token("WORD", text[i:j], line, col))
            col += j - i
            i = j
        elif c in _PUNCT:
            out.append(_Token("PUNCT", c, line, col))
            i += 1
            col += 1
        else:
            raise ModelSyntaxError(f"unexpected character {c!r}", line, col)
    out.append(_Token("EOF", "", line, col))
    return out


def _locate(e: TreeBuildError, tok: _Token) -> TreeBuildError:
    """Rebuild a structural error so its message names the source position."""
    msg = f"{e} at line {tok.line}, col {tok.col}"
    out = CyclicStructure(msg, cycle=e.cycle) if isinstance(e, CyclicStructure) else type(e)(msg)
    out.line, out.col = tok.line, tok.col
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _scan(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise ModelSyntaxError(f"expected {want!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def value(self):
        tok = self.next()
        if tok.kind == "WORD" and tok.text == "inf":
            return INF
        if tok.kind != "NUM":
            raise ModelSyntaxError(f"expected a value, found {tok.text!r}", tok.line, tok.col)
        if self.peek().kind == "PUNCT" and self.peek().text == "/":
            self.next()
            den = self.expect("NUM")
            if "." in tok.text or "." in den.text:
                raise ModelSyntaxError("ratio parts must be integers", tok.line, tok.col)
            if int(den.text) == 0:
                raise ModelSyntaxError("zero denominator", den.line, den.col)
            return Fraction(int(tok.text), int(den.text))
        if "." in tok.text:
            if tok.text.count(".") > 1 or tok.text.endswith("."):
                raise ModelSyntaxError(f"bad number {tok.text!r}", tok.line, tok.col)
            return Fraction(tok.text)  # exact decimal
        return int(tok.text)


def parse_model(text: str) -> ModelDocument:
    p = _Parser(text)
    toplevel: Optional[_Token] = None
    defs: list[tuple[str, NodeType, list[_Token]]] = []
    def_lines: dict[str, _Token] = {}
    raw_attr: list[tuple[str, _Token, list[tuple[_Token, object]]]] = []
    raw_orders: list[tuple[str, _Token, list[_Token]]] = []

    while p.peek().kind != "EOF":
        tok = p.next()
        if tok.kind == "WORD" and tok.text == "toplevel":
            name = p.expect("STR")
            p.expect("PUNCT", ";")
            if toplevel is not None:
                raise DuplicateDefinition("second toplevel declaration", name.line, name.col)
            toplevel = name
        elif tok.kind == "WORD" and tok.text == "attribution":
            name = p.expect("STR")
            if any(name.text == n for n, _, _ in raw_attr):
                raise DuplicateDefinition(f"attribution {name.text!r} defined twice", name.line, name.col)
            p.expect("PUNCT", "{")
            bindings: list[tuple[_Token, object]] = []
            while not (p.peek().kind == "PUNCT" and p.peek().text == "}"):
                label = p.expect("STR")
                p.expect("PUNCT", "=")
                v = p.value()
                p.expect("PUNCT", ";")
                bindings.append((label, v))
            p.next()  # the closing brace
            raw_attr.append((name.text, name, bindings))
        elif tok.kind == "WORD" and tok.text == "order":
            name = p.expect("STR")
            if any(name.text == n for n, _, _ in raw_orders):
                raise DuplicateDefinition(f"order {name.text!r} defined twice", name.line, name.col)
            p.expect("PUNCT", "=")
            labels = [p.expect("STR")]
            while p.peek().kind == "PUNCT" and p.peek().text == "<":
                p.next()
                labels.append(p.expect("STR"))
            p.expect("PUNCT", ";")
            raw_orders.append((name.text, name, labels))
        elif tok.kind == "STR":
            kind_tok = p.expect("WORD")
            if kind_tok.text not in _KINDS:
                raise ModelSyntaxError(
                    f"expected one of bas/or/and/sand, found {kind_tok.text!r}",
                    kind_tok.line, kind_tok.col,
                )
            children = []
            while p.peek().kind == "STR":
                children.append(p.next())
            p.expect("PUNCT", ";")
            if tok.text in def_lines:
                raise DuplicateDefinition(f"node {tok.text!r} defined twice", tok.line, tok.col)
            def_lines[tok.text] = tok
            kind = _KINDS[kind_tok.text]
            if kind is NodeType.BAS and children:
                raise _locate(BasWithChildren(f"basic action {tok.text!r} lists children"), tok)
            if kind is not NodeType.BAS and not children:
                raise _locate(GateWithoutChildren(f"gate {tok.text!r} has no children"), tok)
            defs.append((tok.text, kind, children))
        else:
            raise ModelSyntaxError(f"unexpected token {tok.text!r}", tok.line, tok.col)

    if toplevel is None:
        raise ModelSyntaxError("missing toplevel declaration", 1, 1)
    if toplevel.text not in def_lines:
        raise ModelSyntaxError(
            f"toplevel {toplevel.text!r} is never defined", toplevel.line, toplevel.col
        )
    for label, _, children in defs:
        for c in children:
            if c.text not in def_lines:
                raise _locate(
                    DanglingReference(f"node {label!r} references undefined node {c.text!r}"), c
                )
    try:
        tree = build([(l, k, [c.text for c in cs]) for l, k, cs in defs], toplevel.text)
    except CyclicStructure as e:
        raise _locate(e, def_lines[defs[e.cycle[0]][0]] if e.cycle else toplevel) from None
    except TreeBuildError as e:
        raise _locate(e, toplevel) from None

    bas_ids = bas_of(tree)
    bas_labels = {tree.label_of(b): b for b in bas_ids}
    attributions: dict[str, dict[int, object]] = {}
    for name, name_tok, bindings in raw_attr:
        table: dict[int, object] = {}
        for label, v in bindings:
            if label.text not in bas_labels:
                raise ModelSyntaxError(
                    f"attribution {name!r} names {label.text!r}, which is not a basic action",
                    label.line, label.col,
                )
            if bas_labels[label.text] in table:
                raise DuplicateDefinition(
                    f"attribution {name!r} binds {label.text!r} twice", label.line, label.col
                )
            table[bas_labels[label.text]] = v
        missing = [tree.label_of(b) for b in bas_ids if b not in table]
        if missing:
            raise ModelSyntaxError(
                f"attribution {name!r} misses basic actions: {', '.join(sorted(missing))}",
                name_tok.line, name_tok.col,
            )
        attributions[name] = table

    orders: dict[str, tuple[int, ...]] = {}
    for name, name_tok, labels in raw_orders:
        ids = []
        for label in labels:
            if label.text not in bas_labels:
                raise ModelSyntaxError(
                    f"order {name!r} names {label.text!r}, which is not a basic action",
                    label.line, label.col,
                )
            ids.append(bas_labels[label.text])
        if len(set(ids)) != len(ids) or set(ids) != set(bas_ids):
            raise ModelSyntaxError(
                f"order {name!r} is not a permutation of the basic actions",
                name_tok.line, name_tok.col,
            )
        orders[name] = tuple(ids)

    return ModelDocument(tree, attributions, orders)


def render_value(v) -> object:
    """Exact, canonical rendering: inf, integer, p/q, or a sorted front."""
    if v is INF:
        return "inf"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, frozenset):
        return sorted([render_value(x) for x in vec] for vec in v)
    raise ValueError(f"unrenderable value {v!r}")


def emit_model(doc: ModelDocument) -> str:
    t = doc.tree
    lines = [f'toplevel "{t.label_of(t.root)}";']
    for node in t.nodes:
        if node.type is NodeType.BAS:
            lines.append(f'"{node.label}" bas;')
        else:
            kids = " ".join(f'"{t.label_of(c)}"' for c in node.children)
            lines.append(f'"{node.label}" {node.type.value} {kids};')
    for name in sorted(doc.attributions):
        lines.append("")
        lines.append(f'attribution "{name}" {{')
        table = doc.attributions[name]
        for b in bas_of(t):
            lines.append(f'  "{t.label_of(b)}" = {_value_text(table[b])};')
        lines.append("}")
    for name in sorted(doc.orders):
        lines.append("")
        chain = " < ".join(f'"{t.label_of(b)}"' for b in doc.orders[name])
        lines.append(f'order "{name}" = {chain};')
    return "\n".join(lines) + "\n"


def _value_text(v) -> str:
    rendered = render_value(v)
    if not isinstance(rendered, str):
        raise ValueError("model files hold scalar values only")
    return rendered


def emit_result(res: AnalysisResult, t: AttackTree, fmt: str = "json") -> str:
    """Result record as stable JSON or terse text.

    JSON keeps field order fixed and renders every number exactly; BAS sets
    become sorted label lists. Text drops the stats block (and with it the
    only nondeterministic field, millis), so text output is byte-stable.
    """
    if res.algorithm == "ktop":
        value = render_value(res.value[0][0]) if res.value else None
    else:
        value = render_value(res.value)
    if fmt == "text":
        lines = []
        if res.algorithm == "ktop":
            for v, attack in res.witnesses or ():
                labels = ",".join(sorted(t.label_of(b) for b in attack))
                lines.append(f"{render_value(v)} {{{labels}}}")
        else:
            lines.append(f"metric: {res.metric}")
            rendered = value if isinstance(value, str) else json.dumps(value)
            lines.append(f"value: {rendered}")
            lines.append(f"algorithm: {res.algorithm}")
        for w in res.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines) + "\n"
    if fmt != "json":
        raise ValueError(f"unknown format {fmt!r}")
    payload: dict = {
        "metric": res.metric,
        "value": value,
        "algorithm": res.algorithm,
        "warnings": list(res.warnings),
    }
    if res.witnesses is not None:
        payload["witnesses"] = [
            {"value": render_value(v), "attack": sorted(t.label_of(b) for b in attack)}
            for v, attack in res.witnesses
        ]
    payload["stats"] = res.stats
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


_SHAPES = {NodeType.BAS: "box", NodeType.OR: "ellipse", NodeType.AND: "ellipse", NodeType.SAND: "ellipse"}


def emit_dot(t: AttackTree) -> str:
    """The model as a GraphViz digraph; SAND edges are numbered since their
    child order is semantic."""
    lines = ["digraph attack_tree {", "  rankdir=TB;"]
    for node in t.nodes:
        if node.type is NodeType.BAS:
            lines.append(f'  n{node.id} [shape=box, label="{node.label}"];')
        else:
            lines.append(
                f'  n{node.id} [shape=ellipse, label="{node.label}\\n[{node.type.value.upper()}]"];'
            )
    for node in t.nodes:
        for pos, c in enumerate(node.children):
            if node.type is NodeType.SAND:
                lines.append(f'  n{node.id} -> n{c} [label="{pos + 1}"];')
            else:
                lines.append(f"  n{node.id} -> n{c};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot_bdd(b: Bdd, t: AttackTree) -> str:
    """Decision diagram as a digraph: dashed low edges, solid high edges,
    boxed terminals."""
    lines = ["digraph bdd {", "  rankdir=TB;"]
    reachable = b.reachable()
    for v in sorted(reachable):
        if v == FALSE:
            lines.append('  n0 [shape=box, label="0"];')
        elif v == TRUE:
            lines.append('  n1 [shape=box, label="1"];')
        else:
            try:
                label = t.label_of(b.var_at(v))
            except UnknownNode:
                label = str(b.var_at(v))
            lines.append(f'  n{v} [shape=circle, label="{label}"];')
    for v in sorted(reachable):
        if v >= 2:
            lines.append(f"  n{v} -> n{b.store.lows[v]} [style=dashed];")
            lines.append(f"  n{v} -> n{b.store.highs[v]} [style=solid];")
    lines.append("}")
    return "\n".join(lines) + "\n"
