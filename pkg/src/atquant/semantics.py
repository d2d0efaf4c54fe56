"""Definitional semantics: the exhaustive oracle.

Everything here is deliberately brute force. Minimal attacks come from
enumerating the full truth table of the structure function; metrics come
from folding the domain operators over that enumeration exactly as the
definitions state. The efficient algorithms in analysis.py are tested
against these functions, never the other way around.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from random import Random
from typing import Iterable, Optional

from .errors import (
    BudgetExceeded,
    DynamicTreeRejected,
    EmptySuite,
    IllFormed,
    IncompatibleDomain,
    MissingAttribution,
)
from .domains import AttributeDomain
from .tree import AttackTree, Dynamics, NodeType, bas_of, classify, descendants, static_projection

DEFAULT_BUDGET = 20

Attack = frozenset  # of BAS node ids
AttackSuite = frozenset  # of Attack


@dataclass(frozen=True)
class OrderingGraph:
    """Precedence constraints between BAS induced by SAND gates."""

    vertices: tuple[int, ...]
    edges: frozenset  # of (earlier id, later id)
    pair_insertions: int = field(compare=False, default=0)


@dataclass(frozen=True)
class PosetAttack:
    """An attack set together with the execution order imposed on it.

    The order is stored as a transitive reduction, so two poset attacks are
    equal iff they constrain execution identically.
    """

    nodes: frozenset
    order: frozenset  # of (id, id), transitively reduced


@dataclass(frozen=True)
class HasseDiagram:
    nodes: frozenset
    edges: frozenset
    components: tuple[frozenset, ...]  # sorted by smallest member id


def structure_function(t: AttackTree, attack: Iterable[int]) -> bool:
    """Does the given set of performed BAS make the root succeed?

    SAND gates are evaluated as AND: reachability ignores order, which only
    matters for which posets count as attacks, not for set-level success.
    """
    chosen = set(attack)
    vals: dict[int, bool] = {}
    stack = [t.root]
    while stack:
        v = stack.pop()
        if v in vals:
            continue
        node = t.nodes[v]
        if node.type is NodeType.BAS:
            vals[v] = v in chosen
            continue
        pending = [c for c in node.children if c not in vals]
        if pending:
            stack.append(v)
            stack.extend(pending)
            continue
        kids = [vals[c] for c in node.children]
        vals[v] = any(kids) if node.type is NodeType.OR else all(kids)
    return vals[t.root]


def _truth_table(t: AttackTree, bas: tuple[int, ...]) -> int:
    """Bit m of the result is the structure function at the assignment whose
    bit j selects bas[j]. One big int per node keeps this exact and fast."""
    n = len(bas)
    rows = 1 << n
    columns: dict[int, int] = {}
    for j, b in enumerate(bas):
        period = 1 << j
        block = ((1 << period) - 1) << period  # one low run, one high run
        width = period * 2
        while width < rows:
            block |= block << width
            width *= 2
        columns[b] = block
    full = (1 << rows) - 1
    vals: dict[int, int] = {}
    stack = [t.root]
    while stack:
        v = stack.pop()
        if v in vals:
            continue
        node = t.nodes[v]
        if node.type is NodeType.BAS:
            vals[v] = columns[v]
            continue
        pending = [c for c in node.children if c not in vals]
        if pending:
            stack.append(v)
            stack.extend(pending)
            continue
        acc = vals[node.children[0]]
        for c in node.children[1:]:
            acc = (acc | vals[c]) if node.type is NodeType.OR else (acc & vals[c])
        vals[v] = acc & full
    return vals[t.root]


def minimal_attacks_static(t: AttackTree, budget: int = DEFAULT_BUDGET) -> AttackSuite:
    """All subset-minimal successful attacks, by exhaustive enumeration.

    Minimality is tested by single-element removal, which coincides with
    subset-minimality because structure functions are monotone (a property
    test cross-checks this against the literal all-subsets filter).
    """
    if classify(t).dynamics is Dynamics.DYNAMIC:
        raise DynamicTreeRejected("minimal_attacks_static needs a static model; project first")
    bas = bas_of(t)
    n = len(bas)
    if n > budget:
        raise BudgetExceeded(f"{n} basic actions exceed the oracle budget of {budget}")
    table = _truth_table(t, bas)
    buf = table.to_bytes(((1 << n) + 7) // 8, "little")

    def hit(m: int) -> bool:
        return (buf[m >> 3] >> (m & 7)) & 1 == 1

    out = []
    for m in range(1 << n):
        if not hit(m):
            continue
        sub = m
        minimal = True
        while sub:
            low = sub & -sub
            if hit(m ^ low):
                minimal = False
                break
            sub ^= low
        if minimal:
            out.append(frozenset(bas[j] for j in range(n) if (m >> j) & 1))
    return frozenset(out)


def ordering_graph(t: AttackTree) -> OrderingGraph:
    """BAS precedence: each SAND gate orders all basic actions under one
    child before all basic actions under the next."""
    bas = bas_of(t)
    edges = set()
    inserted = 0
    for node in t.nodes:
        if node.type is not NodeType.SAND:
            continue
        for left, right in zip(node.children, node.children[1:]):
            for a in descendants(t, left):
                for b in descendants(t, right):
                    edges.add((a, b))
                    inserted += 1
    return OrderingGraph(bas, frozenset(edges), inserted)


def is_well_formed(t: AttackTree) -> tuple[bool, Optional[list[int]]]:
    """A dynamic model is well-formed iff its ordering graph is acyclic.

    Returns (True, None) or (False, witness) where the witness is a node id
    cycle with first == last (a self-loop shows up as [b, b]).
    """
    og = ordering_graph(t)
    succs: dict[int, list[int]] = {v: [] for v in og.vertices}
    for a, b in sorted(og.edges):
        succs[a].append(b)
    color: dict[int, int] = {}  # 1 on stack, 2 done
    for start in og.vertices:
        if color.get(start):
            continue
        stack = [(start, iter(succs[start]))]
        color[start] = 1
        path = [start]
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color.get(w) == 1:
                    cycle = path[path.index(w):] + [w]
                    return False, cycle
                if not color.get(w):
                    color[w] = 1
                    path.append(w)
                    stack.append((w, iter(succs[w])))
                    advanced = True
                    break
            if not advanced:
                color[v] = 2
                path.pop()
                stack.pop()
    return True, None


# -- tiny relation utilities ---------------------------------------------------

def transitive_closure(nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> frozenset:
    succs: dict[int, set[int]] = {v: set() for v in nodes}
    for a, b in edges:
        succs[a].add(b)
    closure = set()
    for start in succs:
        seen: set[int] = set()
        stack = list(succs[start])
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(succs.get(v, ()))
        closure.update((start, v) for v in seen)
    return frozenset(closure)


def transitive_reduction(nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> frozenset:
    """Unique minimal relation with the same closure (input must be acyclic)."""
    nodes = list(nodes)
    closure = transitive_closure(nodes, edges)
    kept = set()
    for a, b in closure:
        if not any((a, w) in closure and (w, b) in closure for w in nodes if w != a and w != b):
            kept.add((a, b))
    return frozenset(kept)


def _components(nodes: frozenset, edges: Iterable[tuple[int, int]]) -> tuple[frozenset, ...]:
    neigh: dict[int, set[int]] = {v: set() for v in nodes}
    for a, b in edges:
        neigh[a].add(b)
        neigh[b].add(a)
    out = []
    seen: set[int] = set()
    for start in sorted(nodes):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in neigh[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return tuple(out)


def minimal_attacks_dynamic(t: AttackTree, budget: int = DEFAULT_BUDGET) -> frozenset:
    """Poset attacks: each minimal attack of the static projection carries
    the ordering-graph restriction as its execution order."""
    ok, cycle = is_well_formed(t)
    if not ok:
        labels = " -> ".join(t.label_of(v) for v in cycle)
        raise IllFormed(f"ordering graph has a cycle: {labels}", cycle=cycle)
    og = ordering_graph(t)
    suite = minimal_attacks_static(static_projection(t), budget)
    out = []
    for attack in suite:
        restricted = [(a, b) for a, b in og.edges if a in attack and b in attack]
        out.append(PosetAttack(attack, transitive_reduction(attack, restricted)))
    return frozenset(out)


def hasse(p: PosetAttack) -> HasseDiagram:
    reduced = transitive_reduction(p.nodes, p.order)
    return HasseDiagram(p.nodes, reduced, _components(p.nodes, reduced))


# -- definitional metrics ------------------------------------------------------

def _attr(alpha: dict, v: int):
    try:
        return alpha[v]
    except KeyError:
        raise MissingAttribution(f"no attribute value for basic action id {v}") from None


def oracle_metric_static(
    t: AttackTree, alpha: dict, domain: AttributeDomain, budget: int = DEFAULT_BUDGET
):
    """Disjunctive fold over minimal attacks of the conjunctive fold of
    attribute values. Works for any commutative/associative pair of
    operators; the domain does not have to be a semiring."""
    suite = minimal_attacks_static(t, budget)
    if not suite:
        raise EmptySuite("model has no successful attack")  # impossible for built models
    per_attack = [
        functools.reduce(domain.and_op, [_attr(alpha, v) for v in sorted(attack)])
        for attack in sorted(suite, key=lambda a: sorted(a))
    ]
    return functools.reduce(domain.or_op, per_attack)


def oracle_metric_dynamic(
    t: AttackTree, alpha: dict, domain: AttributeDomain, budget: int = DEFAULT_BUDGET
):
    """Triple fold: sequential op along each connected component of the
    Hasse diagram (in id order), conjunctive across components, disjunctive
    across poset attacks. Static models degenerate to the static fold."""
    suite = minimal_attacks_dynamic(t, budget)
    if not suite:
        raise EmptySuite("model has no successful attack")
    per_attack = []
    for p in sorted(suite, key=lambda p: sorted(p.nodes)):
        parts = []
        for comp in hasse(p).components:
            values = [_attr(alpha, v) for v in sorted(comp)]
            if len(values) > 1 and domain.seq_op is None:
                raise IncompatibleDomain(
                    f"domain {domain.name} has no sequential operator for a chained component"
                )
            parts.append(values[0] if len(values) == 1 else functools.reduce(domain.seq_op, values))
        per_attack.append(functools.reduce(domain.and_op, parts))
    return functools.reduce(domain.or_op, per_attack)


def coherence_check(
    t: AttackTree,
    trials: int = 100,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    restrict_order: bool = True,
) -> list:
    """Sample successful attacks and random supersets; report violations.

    With restrict_order (the actual semantics: a superset attack takes the
    ordering-graph restriction as its order) the result must be empty.
    With restrict_order=False the superset keeps only the original order
    plus random orientations for the new elements, reproducing the known
    failure of coherence for order-carrying attacks.
    """
    rng = Random(seed)
    proj = static_projection(t)
    dynamic = classify(t).dynamics is Dynamics.DYNAMIC
    suite = sorted(minimal_attacks_static(proj, budget), key=lambda a: sorted(a))
    bas = bas_of(t)
    og = ordering_graph(t) if dynamic else None
    violations = []
    for _ in range(trials):
        attack = set(rng.choice(suite))
        extra = [b for b in bas if b not in attack and rng.random() < 0.5]
        sup = frozenset(attack | set(extra))
        if restrict_order or not dynamic:
            ok = structure_function(proj, sup)
            order = frozenset((a, b) for a, b in og.edges if a in sup and b in sup) if dynamic else frozenset()
        else:
            base = {(a, b) for a, b in og.edges if a in attack and b in attack}
            for x in extra:
                others = sorted(sup - {x})
                y = rng.choice(others)
                pair = (x, y) if rng.random() < 0.5 else (y, x)
                trial = base | {pair}
                if all((b, a) not in transitive_closure(sup, trial) for a, b in trial):
                    base = trial
            order = frozenset(base)
            ok = successful_poset(t, sup, order, budget=budget)
        if not ok:
            violations.append((frozenset(attack), sup, order))
    return violations


def successful_poset(
    t: AttackTree, nodes: frozenset, order: Iterable[tuple[int, int]], budget: int = DEFAULT_BUDGET
) -> bool:
    """Is (nodes, order) a successful attack: the set succeeds statically and
    the declared order implies every ordering-graph constraint inside it."""
    if not structure_function(static_projection(t), nodes):
        return False
    og = ordering_graph(t)
    closure = transitive_closure(nodes, order)
    return all(
        (a, b) in closure for a, b in og.edges if a in nodes and b in nodes
    )
