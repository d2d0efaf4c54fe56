"""Metric computation: efficient algorithms plus the dispatcher.

Four computation routes, each with hard preconditions enforced here:

- bu_sat: single bottom-up pass over a STATIC proper TREE (semiring domain).
- bu_bdd: fold over the minimal-solutions BDD; handles shared subtrees
  (static DAGs), needs both neutral elements.
- k_top: the k best attacks from shortest paths in the weighted BDD; only
  for domains whose conjunctive operator is numeric addition.
- bu_dat: bottom-up over a well-formed DYNAMIC proper tree, mapping OR/AND/
  SAND to the domain's three operators.

The module also exposes naive_bottom_up without the shape guard. It exists
so tests (and the curious) can watch the tree fold double-count shared
subtrees on a DAG; nothing routes to it automatically.
"""

from __future__ import annotations

import functools
import math
import time
from bisect import insort
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bdd import FALSE, TRUE, Bdd, VarOrder, from_structure_function, minimise
from .domains import INF, AttributeDomain, KTopMode, ValueKind
from .errors import (
    DagRejected,
    DynamicTreeRejected,
    IncompatibleDomain,
    MissingAttribution,
    MissingNeutrals,
    NotProbability,
    NotSemiring,
    NotSemiringDynamic,
    UnsupportedDomainForKTop,
)
from .semantics import (
    DEFAULT_BUDGET,
    is_well_formed,
    oracle_metric_dynamic,
    oracle_metric_static,
)
from .tree import AttackTree, Dynamics, NodeType, Shape, bas_of, classify


def validate_attribution(t: AttackTree, alpha: dict, domain: AttributeDomain) -> None:
    """Attributions must cover every BAS with a value the domain accepts."""
    for b in bas_of(t):
        if b not in alpha:
            raise MissingAttribution(f"no value for basic action {t.label_of(b)!r}")
        domain.validate_value(alpha[b])


def _fold(t: AttackTree, alpha: dict, domain: AttributeDomain, start: int):
    """Memoized bottom-up fold; the memoization is what makes it naive on
    DAGs (a shared node contributes one value to every parent)."""
    ops = {
        NodeType.OR: domain.or_op,
        NodeType.AND: domain.and_op,
        NodeType.SAND: domain.seq_op,
    }
    vals: dict[int, object] = {}
    stack = [start]
    while stack:
        v = stack.pop()
        if v in vals:
            continue
        node = t.nodes[v]
        if node.type is NodeType.BAS:
            try:
                vals[v] = alpha[v]
            except KeyError:
                raise MissingAttribution(f"no value for basic action {node.label!r}") from None
            continue
        pending = [c for c in node.children if c not in vals]
        if pending:
            stack.append(v)
            stack.extend(pending)
            continue
        op = ops[node.type]
        if op is None:
            raise IncompatibleDomain(
                f"domain {domain.name} has no sequential operator for SAND gate {node.label!r}"
            )
        vals[v] = functools.reduce(op, [vals[c] for c in node.children])
    return vals[start]


def naive_bottom_up(t: AttackTree, alpha: dict, domain: AttributeDomain, node: Optional[int] = None):
    """The tree fold applied without checking for sharing. Wrong on DAGs."""
    if classify(t).dynamics is Dynamics.DYNAMIC:
        raise DynamicTreeRejected("naive_bottom_up evaluates OR/AND models only")
    return _fold(t, alpha, domain, t.root if node is None else node)


def bu_sat(t: AttackTree, alpha: dict, domain: AttributeDomain, node: Optional[int] = None):
    """Bottom-up metric on a static proper tree (exact for semirings)."""
    kind = classify(t)
    if kind.shape is Shape.DAG:
        raise DagRejected("bu_sat is only sound on proper trees; shared nodes double-count")
    if kind.dynamics is Dynamics.DYNAMIC:
        raise DynamicTreeRejected("bu_sat handles static models; use bu_dat")
    if not domain.is_semiring:
        raise NotSemiring(f"domain {domain.name} is not a semiring")
    return _fold(t, alpha, domain, t.root if node is None else node)


@dataclass(frozen=True)
class BuBddRun:
    value: object
    diagram: Bdd = field(repr=False)
    visits: int


def bu_bdd_detailed(
    t: AttackTree, alpha: dict, domain: AttributeDomain, order: Optional[VarOrder] = None
) -> BuBddRun:
    if not domain.is_semiring:
        raise NotSemiring(f"domain {domain.name} is not a semiring")
    if not domain.has_neutrals:
        raise MissingNeutrals(f"domain {domain.name} lacks neutral elements for the BDD fold")
    m = minimise(from_structure_function(t, order))
    store = m.store
    vals: dict[int, object] = {FALSE: domain.or_neutral, TRUE: domain.and_neutral}
    stack = [m.root]
    while stack:
        v = stack.pop()
        if v in vals:
            continue
        low, high = store.lows[v], store.highs[v]
        if low not in vals or high not in vals:
            stack.extend((v, low, high))
            continue
        var = m.var_at(v)
        if var not in alpha:
            raise MissingAttribution(f"no value for basic action {t.label_of(var)!r}")
        vals[v] = domain.or_op(vals[low], domain.and_op(vals[high], alpha[var]))
    return BuBddRun(vals[m.root], m, len(vals))


def bu_bdd(t: AttackTree, alpha: dict, domain: AttributeDomain, order: Optional[VarOrder] = None):
    """Metric through the minimal-solutions BDD; exact on shared structures."""
    return bu_bdd_detailed(t, alpha, domain, order).value


def k_top(
    t: AttackTree,
    alpha: dict,
    domain: AttributeDomain,
    k: int,
    order: Optional[VarOrder] = None,
) -> list:
    """The k best (metric, attack) pairs, best first.

    High edges carry the signed attribute of their variable, low edges are
    free, and k-shortest root-to-TRUE paths in rank (topological) order give
    the k best attacks; the sign flips max domains into min problems. Ties
    break on the lexicographically least decision sequence. Returns fewer
    than k pairs exactly when fewer minimal attacks exist.
    """
    pairs, _ = k_top_detailed(t, alpha, domain, k, order)
    return pairs


def k_top_detailed(
    t: AttackTree,
    alpha: dict,
    domain: AttributeDomain,
    k: int,
    order: Optional[VarOrder] = None,
) -> tuple[list, Bdd]:
    if k < 1:
        raise ValueError("k must be at least 1")
    if domain.ktop_mode is KTopMode.UNSUPPORTED:
        raise UnsupportedDomainForKTop(
            f"domain {domain.name} does not reduce to additive shortest paths"
        )
    sgn = 1 if domain.ktop_mode is KTopMode.MIN_ADDITIVE else -1
    m = minimise(from_structure_function(t, order))
    store = m.store

    def weight(v: int):
        var = m.var_at(v)
        if var not in alpha:
            raise MissingAttribution(f"no value for basic action {t.label_of(var)!r}")
        a = alpha[var]
        if a is INF:
            return math.inf if sgn == 1 else -math.inf
        return sgn * a

    interior = sorted((v for v in m.reachable() if v >= 2), key=lambda v: store.ranks[v])
    best: dict[int, list] = {m.root: [(0, ())]} if m.root >= 2 else {}
    done: list = []
    if m.root == TRUE:
        done = [(0, ())]
    for v in interior:
        for w, dec in best.pop(v, []):
            for child, step, dw in ((store.lows[v], 0, 0), (store.highs[v], 1, weight(v))):
                entry = (w + dw, dec + ((store.ranks[v], step),))
                if child == TRUE:
                    insort(done, entry)
                    del done[k:]
                elif child != FALSE:
                    bucket = best.setdefault(child, [])
                    insort(bucket, entry)
                    del bucket[k:]

    out = []
    for w, dec in done[:k]:
        attack = frozenset(m.order.bas_at(rank) for rank, step in dec if step == 1)
        metric = INF if isinstance(w, float) and math.isinf(w) else sgn * w
        out.append((metric, attack))
    return out, m


def bu_dat(t: AttackTree, alpha: dict, domain: AttributeDomain, node: Optional[int] = None):
    """Bottom-up metric on a well-formed dynamic proper tree.

    Sound when the domain is a dynamic semiring, and also when its
    sequential operator IS its conjunctive operator (then this computes the
    static fold of the projection, which matches the definitional triple
    fold because both degenerate to one flat fold over each attack).
    """
    kind = classify(t)
    if kind.shape is Shape.DAG:
        raise DagRejected("bu_dat is only sound on proper trees")
    if domain.seq_op is None or not (
        domain.is_semiring_dynamic or (domain.seq_equals_and and domain.is_semiring)
    ):
        raise NotSemiringDynamic(
            f"domain {domain.name} does not support bottom-up dynamic evaluation"
        )
    ok, cycle = is_well_formed(t)
    if not ok:  # unreachable for proper trees; SAND children are disjoint
        raise DagRejected(f"ordering cycle through {[t.label_of(v) for v in cycle]}")
    return _fold(t, alpha, domain, t.root if node is None else node)


def total_probability_tree(t: AttackTree, alpha: dict) -> Fraction:
    """Probability that the root succeeds when each BAS fires independently.

    Needs a proper static tree: gate inputs are then independent, so AND
    multiplies and OR complements the product of complements. Sharing would
    break independence and SAND would need timing, so both are rejected.
    """
    kind = classify(t)
    if kind.shape is Shape.DAG:
        raise DagRejected("shared subtrees break the independence argument")
    if kind.dynamics is Dynamics.DYNAMIC:
        raise DynamicTreeRejected("total probability is defined for static trees")
    vals: dict[int, Fraction] = {}
    stack = [t.root]
    while stack:
        v = stack.pop()
        if v in vals:
            continue
        node = t.nodes[v]
        if node.type is NodeType.BAS:
            try:
                p = alpha[v]
            except KeyError:
                raise MissingAttribution(f"no value for basic action {node.label!r}") from None
            if isinstance(p, bool) or not isinstance(p, (int, Fraction)) or not 0 <= p <= 1:
                raise NotProbability(f"value {p!r} for {node.label!r} is not a probability")
            vals[v] = Fraction(p)
            continue
        pending = [c for c in node.children if c not in vals]
        if pending:
            stack.append(v)
            stack.extend(pending)
            continue
        kids = [vals[c] for c in node.children]
        if node.type is NodeType.AND:
            vals[v] = math.prod(kids, start=Fraction(1))
        else:
            vals[v] = 1 - math.prod((1 - p for p in kids), start=Fraction(1))
    return vals[t.root]


@dataclass(frozen=True)
class AnalysisRequest:
    tree: AttackTree
    alpha: dict
    domain: AttributeDomain
    algorithm: str = "auto"  # auto | bu | bdd | oracle
    k: Optional[int] = None
    order: Optional[VarOrder] = None
    budget: int = DEFAULT_BUDGET


@dataclass(frozen=True)
class AnalysisResult:
    metric: str
    value: object  # scalar metric, or tuple of (metric, attack) pairs for k_top
    algorithm: str
    warnings: tuple[str, ...]
    witnesses: Optional[tuple] = None  # (metric, frozenset of BAS ids) pairs
    stats: dict = field(default_factory=dict)


_ORACLE_WARNING = "definitional oracle is exponential in the number of basic actions"


def analyze(req: AnalysisRequest) -> AnalysisResult:
    """Route a request to the cheapest sound algorithm and time it.

    Auto policy: static trees take the bottom-up pass, static DAGs the BDD
    fold, dynamic trees the dynamic bottom-up pass; anything else (dynamic
    DAGs, non-semiring domains) falls back to the exhaustive oracle with a
    warning. Explicit algorithm choices are honored or rejected, never
    silently downgraded.
    """
    t, domain, alpha = req.tree, req.domain, req.alpha
    validate_attribution(t, alpha, domain)
    kind = classify(t)
    warnings: list[str] = []
    witnesses = None
    stats: dict = {"nodes": len(t)}
    started = time.perf_counter()

    if req.k is not None:
        pairs, diagram = k_top_detailed(t, alpha, domain, req.k, req.order)
        value: object = tuple(pairs)
        witnesses = tuple(pairs)
        algorithm = "ktop"
        stats["bdd_nodes"] = diagram.node_count()
    else:
        algorithm = req.algorithm
        if algorithm == "auto":
            if kind.dynamics is Dynamics.STATIC and kind.shape is Shape.TREE:
                algorithm = "bu" if domain.is_semiring else "oracle"
            elif kind.dynamics is Dynamics.STATIC:
                algorithm = "bdd" if domain.is_semiring and domain.has_neutrals else "oracle"
            elif kind.shape is Shape.TREE:
                eligible = domain.seq_op is not None and (
                    domain.is_semiring_dynamic or (domain.seq_equals_and and domain.is_semiring)
                )
                algorithm = "bu" if eligible else "oracle"
            else:
                algorithm = "oracle"
                warnings.append(
                    "no efficient algorithm is known for dynamic models with shared "
                    "subtrees; falling back to the exponential definitional oracle"
                )
            if algorithm == "oracle" and not warnings:
                warnings.append(_ORACLE_WARNING)

        if algorithm == "bu":
            value = (
                bu_dat(t, alpha, domain)
                if kind.dynamics is Dynamics.DYNAMIC
                else bu_sat(t, alpha, domain)
            )
        elif algorithm == "bdd":
            run = bu_bdd_detailed(t, alpha, domain, req.order)
            value = run.value
            stats["bdd_nodes"] = run.diagram.node_count()
        elif algorithm == "oracle":
            value = (
                oracle_metric_dynamic(t, alpha, domain, req.budget)
                if kind.dynamics is Dynamics.DYNAMIC
                else oracle_metric_static(t, alpha, domain, req.budget)
            )
        else:
            raise ValueError(f"unknown algorithm {req.algorithm!r}")

    stats["millis"] = int((time.perf_counter() - started) * 1000)
    return AnalysisResult(
        metric=domain.name,
        value=value,
        algorithm=algorithm,
        warnings=tuple(warnings),
        witnesses=witnesses,
        stats=stats,
    )
