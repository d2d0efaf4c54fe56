"""Attack tree core model.

Nodes live in a contiguous integer-id store; children are id tuples, so the
same structure type covers proper trees and DAGs with shared subtrees. All
traversals are iterative: models with 10^5 nodes (or degenerate chains) must
not hit the interpreter recursion limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    BasWithChildren,
    CyclicStructure,
    DanglingReference,
    DisconnectedNode,
    DuplicateLabel,
    GateWithoutChildren,
    MultipleRoots,
    NoRoot,
    UnknownNode,
)


class NodeType(Enum):
    BAS = "bas"
    OR = "or"
    AND = "and"
    SAND = "sand"


GATES = (NodeType.OR, NodeType.AND, NodeType.SAND)


class Shape(Enum):
    TREE = "tree"
    DAG = "dag"


class Dynamics(Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class StructureKind:
    shape: Shape
    dynamics: Dynamics

    def __str__(self):
        return f"({self.shape.value}, {self.dynamics.value})"


@dataclass(frozen=True)
class Node:
    id: int
    label: str
    type: NodeType
    children: tuple[int, ...]


@dataclass(frozen=True)
class AttackTree:
    nodes: tuple[Node, ...]  # index == node id
    root: int
    _by_label: dict = field(compare=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self._by_label.update({n.label: n.id for n in self.nodes})

    def __len__(self):
        return len(self.nodes)

    def node(self, node_id: int) -> Node:
        if not 0 <= node_id < len(self.nodes):
            raise UnknownNode(f"no node with id {node_id}")
        return self.nodes[node_id]

    def id_of(self, label: str) -> int:
        try:
            return self._by_label[label]
        except KeyError:
            raise UnknownNode(f"no node labelled {label!r}") from None

    def label_of(self, node_id: int) -> str:
        return self.node(node_id).label


def build(defs: Iterable[tuple[str, NodeType, Sequence[str]]], root_label: str) -> AttackTree:
    """Validate and freeze a node store from (label, type, child labels) triples.

    Ids are assigned in definition order. Rejects, in this order: duplicate
    labels, dangling child references, BAS with children / gates without,
    cycles (with a concrete witness), root problems, unreachable nodes.
    Repeated children inside one gate are accepted here; they make the model
    a DAG and the dynamic well-formedness pass deals with the consequences.
    """
    defs = list(defs)
    by_label: dict[str, int] = {}
    for i, (label, _, _) in enumerate(defs):
        if label in by_label:
            raise DuplicateLabel(f"node {label!r} defined twice")
        by_label[label] = i

    nodes = []
    for i, (label, ntype, child_labels) in enumerate(defs):
        kids = []
        for c in child_labels:
            if c not in by_label:
                raise DanglingReference(f"node {label!r} references undefined node {c!r}")
            kids.append(by_label[c])
        if ntype is NodeType.BAS and kids:
            raise BasWithChildren(f"basic action {label!r} has children")
        if ntype is not NodeType.BAS and not kids:
            raise GateWithoutChildren(f"gate {label!r} has no children")
        nodes.append(Node(i, label, ntype, tuple(kids)))

    _check_acyclic(nodes)

    if root_label not in by_label:
        raise DanglingReference(f"declared root {root_label!r} is not defined")
    root = by_label[root_label]

    has_parent = [False] * len(nodes)
    for n in nodes:
        for c in n.children:
            if c != n.id:
                has_parent[c] = True
    parentless = [n.id for n in nodes if not has_parent[n.id]]
    if len(parentless) > 1:
        names = ", ".join(repr(nodes[i].label) for i in parentless)
        raise MultipleRoots(f"more than one root candidate: {names}")
    if not parentless or parentless[0] != root:
        raise NoRoot(f"declared root {root_label!r} is not the unique parentless node")

    reach = _reachable(nodes, root)
    if len(reach) != len(nodes):
        missing = next(n.label for n in nodes if n.id not in reach)
        raise DisconnectedNode(f"node {missing!r} is not reachable from the root")

    return AttackTree(tuple(nodes), root)


def _check_acyclic(nodes: list[Node]) -> None:
    # Kahn's algorithm; whatever survives lies on or feeds a cycle.
    indeg = [0] * len(nodes)
    for n in nodes:
        for c in n.children:
            indeg[c] += 1
    queue = [n.id for n in nodes if indeg[n.id] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for c in nodes[v].children:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if seen == len(nodes):
        return
    # Extract a concrete cycle: walk child edges inside the leftover set.
    leftover = {n.id for n in nodes if indeg[n.id] > 0}
    v = min(leftover)
    trail, pos = [], {}
    while v not in pos:
        pos[v] = len(trail)
        trail.append(v)
        v = next(c for c in nodes[v].children if c in leftover)
    cycle = trail[pos[v]:] + [v]
    names = " -> ".join(repr(nodes[i].label) for i in cycle)
    raise CyclicStructure(f"cycle in child relation: {names}", cycle=cycle)


def _reachable(nodes: Sequence[Node], root: int) -> set[int]:
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for c in nodes[v].children:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def classify(t: AttackTree) -> StructureKind:
    """Tree vs DAG (any node referenced twice, same-gate repeats included)
    and static vs dynamic (any SAND present)."""
    refs = 0
    seen: set[int] = set()
    shape = Shape.TREE
    dynamics = Dynamics.STATIC
    for n in t.nodes:
        if n.type is NodeType.SAND:
            dynamics = Dynamics.DYNAMIC
        for c in n.children:
            if c in seen:
                shape = Shape.DAG
            seen.add(c)
            refs += 1
    return StructureKind(shape, dynamics)


def bas_of(t: AttackTree) -> tuple[int, ...]:
    """BAS ids in depth-first leftmost order, first occurrence only."""
    out: list[int] = []
    seen: set[int] = set()
    stack = [t.root]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        node = t.nodes[v]
        if node.type is NodeType.BAS:
            out.append(v)
        else:
            stack.extend(reversed(node.children))
    return tuple(out)


def descendants(t: AttackTree, node_id: int) -> frozenset[int]:
    """BAS ids reachable at or below the given node."""
    t.node(node_id)  # raises UnknownNode
    found: set[int] = set()
    seen: set[int] = set()
    stack = [node_id]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        node = t.nodes[v]
        if node.type is NodeType.BAS:
            found.add(v)
        else:
            stack.extend(node.children)
    return frozenset(found)


def static_projection(t: AttackTree) -> AttackTree:
    """Retype every SAND gate as AND; ids, labels and children are kept.

    Idempotent, and the identity on static models (same object back).
    """
    if all(n.type is not NodeType.SAND for n in t.nodes):
        return t
    nodes = tuple(
        Node(n.id, n.label, NodeType.AND, n.children) if n.type is NodeType.SAND else n
        for n in t.nodes
    )
    return AttackTree(nodes, t.root)
