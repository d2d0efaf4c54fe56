"""Shared test machinery: tuple-tree construction, golden models, random
model generators for the differential suites."""

from itertools import count
from random import Random

from atquant import bas_of, build, classify
from atquant.tree import AttackTree, NodeType, Shape

GATE = {"or": NodeType.OR, "and": NodeType.AND, "sand": NodeType.SAND}


def tt(shape) -> AttackTree:
    """Nested tuples to AttackTree; bare strings are BAS, repeats shared.

    tt(("or", "n", ("and", "t", "p")))
    """
    defs = []
    seen = set()
    gi = count()

    def walk(node) -> str:
        if isinstance(node, str):
            if node not in seen:
                seen.add(node)
                defs.append((node, NodeType.BAS, []))
            return node
        kind, *kids = node
        kid_labels = [walk(k) for k in kids]
        label = f"g{next(gi)}"
        defs.append((label, GATE[kind], kid_labels))
        return label

    return build(defs, walk(shape))


def treasure() -> AttackTree:
    return tt(("or", "n", ("and", "t", "p")))


def overlap() -> AttackTree:
    return tt(("and", ("or", "a", "b"), ("or", "b", "c")))


def exploit() -> AttackTree:
    return tt(("or", ("and", "ff", "w"), ("sand", "w", "cc")))


def exploit_tree() -> AttackTree:
    """The dynamic golden with its shared action split in two, making it a tree."""
    return tt(("or", ("and", "ff", "w1"), ("sand", "w2", "cc")))


def chains() -> AttackTree:
    return tt(("and", ("sand", "a", "b"), ("sand", "b", "c")))


def sand_over_and() -> AttackTree:
    """SAND(AND(a, b), c): the shape where a sequential step follows
    genuinely parallel work."""
    return tt(("sand", ("and", "a", "b"), "c"))


def ill_repeat() -> AttackTree:
    return tt(("sand", "a", "b", "a"))


def ill_cross() -> AttackTree:
    return tt(("sand", ("and", "a", "b"), ("and", "b", "c")))


def alpha(t: AttackTree, table: dict) -> dict:
    return {t.id_of(k): v for k, v in table.items()}


def labels(t: AttackTree, ids) -> frozenset:
    return frozenset(t.label_of(i) for i in ids)


def suite_labels(t: AttackTree, suite) -> set:
    return {labels(t, a) for a in suite}


def rand_tree(rng: Random, max_bas: int = 8, dynamic: bool = False) -> AttackTree:
    """Random proper tree; every BAS referenced once."""
    n = rng.randint(1, max_bas)
    defs = [(f"b{i}", NodeType.BAS, []) for i in range(n)]
    avail = [f"b{i}" for i in range(n)]
    kinds = [NodeType.OR, NodeType.AND] + ([NodeType.SAND] if dynamic else [])
    gi = 0
    while len(avail) > 1:
        k = min(len(avail), rng.choice((2, 2, 2, 3)))
        rng.shuffle(avail)
        kids, avail = avail[:k], avail[k:]
        defs.append((f"g{gi}", rng.choice(kinds), kids))
        avail.append(f"g{gi}")
        gi += 1
    return build(defs, avail[0])


def rand_tree_dat(rng: Random, max_bas: int = 8) -> AttackTree:
    """Random tree with at least one SAND gate. Tree-shaped ordering graphs
    are always acyclic, so no well-formedness rejection loop is needed."""
    while True:
        t = rand_tree(rng, max_bas, dynamic=True)
        if any(node.type is NodeType.SAND for node in t.nodes):
            return t


def rand_dag(rng: Random, max_bas: int = 8, dynamic: bool = False) -> AttackTree:
    """Random single-rooted DAG with at least one shared reference."""
    n = rng.randint(2, max_bas)
    defs = [(f"b{i}", NodeType.BAS, []) for i in range(n)]
    pool = [f"b{i}" for i in range(n)]
    kinds = [NodeType.OR, NodeType.AND] + ([NodeType.SAND] if dynamic else [])
    for gi in range(rng.randint(1, 4)):
        kids = rng.sample(pool, rng.randint(1, min(3, len(pool))))
        if rng.random() < 0.15:
            kids = kids + [rng.choice(kids)]  # same-gate repetition is a DAG too
        defs.append((f"g{gi}", rng.choice(kinds), kids))
        pool.append(f"g{gi}")
    has_parent = {c for _, _, cs in defs for c in cs}
    orphans = [lbl for lbl, _, _ in defs if lbl not in has_parent]
    if len(orphans) > 1:
        defs.append(("root", rng.choice(kinds), orphans))
    root = defs[-1][0] if len(orphans) > 1 else orphans[0]

    t = build(defs, root)
    if classify(t).shape is Shape.DAG:
        return t
    # Tree came out: force one share. Children must be defined earlier than
    # the gate that adopts them, which keeps the child relation acyclic.
    order = {lbl: i for i, (lbl, _, _) in enumerate(defs)}
    for gidx in rng.sample(range(len(defs)), len(defs)):
        lbl, kind, kids = defs[gidx]
        if kind is NodeType.BAS:
            continue
        candidates = [x for x, _, _ in defs if order[x] < gidx and x not in kids]
        extra = rng.choice(candidates) if candidates else kids[0]
        defs[gidx] = (lbl, kind, list(kids) + [extra])
        return build(defs, root)
    raise AssertionError("unreachable: a 2+ BAS model always has a gate")


def rand_alpha(rng: Random, t: AttackTree, domain) -> dict:
    return {b: domain.random_value(rng) for b in bas_of(t)}


# Builtins usable by each algorithm in the random differential suites.
SAT_DOMAINS = (
    "min-cost",
    "min-time-seq",
    "min-skill",
    "max-challenge",
    "max-damage",
    "prob-max",
    "pareto(min-cost,min-skill)",
)
# bu_dat agrees with the flat definitional fold exactly when folding a chain
# pairwise is the same as folding it in one go, i.e. when seq is and. The
# min-time-par domain (seq strictly coarser than and) is exercised by goldens
# and the pinned gap test instead.
DAT_DOMAINS = (
    "min-cost",
    "min-time-seq",
    "min-skill",
    "max-challenge",
    "max-damage",
    "prob-max",
)
