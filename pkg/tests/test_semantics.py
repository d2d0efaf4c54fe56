import random
from fractions import Fraction
from itertools import chain, combinations

import pytest

from atquant import (
    bas_of,
    build,
    builtin,
    hasse,
    is_well_formed,
    minimal_attacks_dynamic,
    minimal_attacks_static,
    oracle_metric_dynamic,
    oracle_metric_static,
    ordering_graph,
    coherence_check,
    static_projection,
    structure_function,
)
from atquant.errors import BudgetExceeded, DynamicTreeRejected, IllFormed, IncompatibleDomain
from atquant.semantics import (
    PosetAttack,
    successful_poset,
    transitive_closure,
    transitive_reduction,
)
from atquant.tree import NodeType

from helpers import (
    alpha,
    overlap,
    ill_cross,
    ill_repeat,
    labels,
    rand_dag,
    rand_tree,
    rand_tree_dat,
    suite_labels,
    chains,
    exploit,
    treasure,
    tt,
)


def ids(t, *names):
    return frozenset(t.id_of(n) for n in names)


def powerset(xs):
    xs = list(xs)
    return chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))


def test_structure_function_treasure():
    t = treasure()
    assert structure_function(t, ids(t, "n"))
    assert structure_function(t, ids(t, "t", "p"))
    assert structure_function(t, ids(t, "n", "t", "p"))
    assert not structure_function(t, ids(t, "t"))
    assert not structure_function(t, ids(t, "p"))
    assert not structure_function(t, frozenset())


def test_structure_function_reads_sand_as_and():
    d = exploit()
    assert structure_function(d, ids(d, "w", "cc"))
    assert structure_function(d, ids(d, "ff", "w"))
    assert not structure_function(d, ids(d, "ff", "cc"))


def test_minimal_attacks_ts_and_overlap():
    t = treasure()
    assert suite_labels(t, minimal_attacks_static(t)) == {
        frozenset({"n"}),
        frozenset({"t", "p"}),
    }
    f = overlap()
    assert suite_labels(f, minimal_attacks_static(f)) == {
        frozenset({"b"}),
        frozenset({"a", "c"}),
    }


def test_minimal_attacks_rejects_dynamic_trees():
    with pytest.raises(DynamicTreeRejected):
        minimal_attacks_static(exploit())


def test_budget_guard():
    wide = tt(tuple(["or"] + [f"x{i}" for i in range(21)]))
    with pytest.raises(BudgetExceeded):
        minimal_attacks_static(wide)
    assert len(minimal_attacks_static(wide, budget=21)) == 21
    narrow = tt(tuple(["or"] + [f"x{i}" for i in range(9)]))
    with pytest.raises(BudgetExceeded):
        minimal_attacks_static(narrow, budget=8)


def test_minimality_against_full_subset_filter():
    # independent definition: successful sets none of whose proper subsets succeed
    rng = random.Random(42)
    for i in range(120):
        t = rand_tree(rng, 6) if i % 2 else rand_dag(rng, 6)
        succ = [
            frozenset(s) for s in powerset(bas_of(t)) if structure_function(t, frozenset(s))
        ]
        expected = {a for a in succ if not any(b < a for b in succ)}
        assert minimal_attacks_static(t) == frozenset(expected)


def test_ordering_graph_goldens():
    d = exploit()
    og = ordering_graph(d)
    assert {(d.label_of(a), d.label_of(b)) for a, b in og.edges} == {("w", "cc")}
    assert set(og.vertices) == set(bas_of(d))
    assert og.pair_insertions >= 1

    g3 = chains()
    assert {(g3.label_of(a), g3.label_of(b)) for a, b in ordering_graph(g3).edges} == {
        ("a", "b"),
        ("b", "c"),
    }

    assert ordering_graph(treasure()).edges == frozenset()


def test_ordering_graph_uses_consecutive_pairs_only():
    t = tt(("sand", "a", "b", "c"))
    shown = {(t.label_of(a), t.label_of(b)) for a, b in ordering_graph(t).edges}
    assert shown == {("a", "b"), ("b", "c")}  # (a, c) only via transitivity


def test_well_formedness_goldens():
    ok, cycle = is_well_formed(exploit())
    assert ok and cycle is None
    ok, cycle = is_well_formed(chains())
    assert ok and cycle is None
    ok, cycle = is_well_formed(treasure())
    assert ok

    bad = ill_repeat()
    ok, cycle = is_well_formed(bad)
    assert not ok
    assert [bad.label_of(v) for v in cycle] == ["a", "b", "a"]

    cross = ill_cross()
    ok, cycle = is_well_formed(cross)
    assert not ok
    assert [cross.label_of(v) for v in cycle] == ["b", "b"]
    assert cycle[0] == cycle[-1]


def test_pair_insertion_ceiling():
    # edge construction stays within the n^2 * m budget claimed for it
    rng = random.Random(9)
    cases = [rand_tree_dat(rng, 8) for _ in range(30)]
    cases.append(tt(("sand", "a", "b", "c", "d", "e", "f")))
    cases.append(exploit())
    for t in cases:
        n = len(t)
        m = sum(len(node.children) for node in t.nodes)
        og = ordering_graph(t)
        assert og.pair_insertions <= n * n * m


def test_transitive_closure_and_reduction():
    nodes = {1, 2, 3, 4}
    chain_edges = {(1, 2), (2, 3), (3, 4)}
    closure = transitive_closure(nodes, chain_edges)
    assert closure == {(1, 2), (2, 3), (3, 4), (1, 3), (2, 4), (1, 4)}
    assert transitive_reduction(nodes, closure) == frozenset(chain_edges)

    diamond = {(1, 2), (1, 3), (2, 4), (3, 4)}
    assert transitive_reduction(nodes, diamond) == frozenset(diamond)
    assert (1, 4) in transitive_closure(nodes, diamond)


def test_minimal_attacks_dynamic_exploit():
    d = exploit()
    suite = minimal_attacks_dynamic(d)
    shown = {
        (labels(d, p.nodes), frozenset((d.label_of(a), d.label_of(b)) for a, b in p.order))
        for p in suite
    }
    assert shown == {
        (frozenset({"w", "cc"}), frozenset({("w", "cc")})),
        (frozenset({"ff", "w"}), frozenset()),
    }


def test_minimal_attacks_dynamic_t3_is_reduced():
    g = chains()
    (p,) = minimal_attacks_dynamic(g)
    assert labels(g, p.nodes) == {"a", "b", "c"}
    shown = {(g.label_of(a), g.label_of(b)) for a, b in p.order}
    assert shown == {("a", "b"), ("b", "c")}  # no (a, c): transitively reduced


def test_minimal_attacks_dynamic_rejects_ill_formed():
    with pytest.raises(IllFormed) as ei:
        minimal_attacks_dynamic(ill_repeat())
    assert "a -> b -> a" in str(ei.value)
    assert ei.value.cycle


def test_minimal_attacks_dynamic_on_static_tree_degenerates():
    t = treasure()
    suite = minimal_attacks_dynamic(t)
    assert {p.nodes for p in suite} == minimal_attacks_static(t)
    assert all(p.order == frozenset() for p in suite)


def test_hasse_components():
    p = PosetAttack(frozenset({1, 2, 3}), frozenset({(1, 2)}))
    h = hasse(p)
    assert h.components == (frozenset({1, 2}), frozenset({3}))

    g = chains()
    (pa,) = minimal_attacks_dynamic(g)
    assert hasse(pa).components == (pa.nodes,)


def test_oracle_static_goldens():
    t = treasure()
    assert oracle_metric_static(t, alpha(t, {"n": 1, "t": 100, "p": 0}), builtin("min-time-seq")) == 1
    pm = builtin("prob-max")
    a = alpha(t, {"n": Fraction(7, 100), "t": Fraction(19, 20), "p": Fraction(1, 100)})
    assert oracle_metric_static(t, a, pm) == Fraction(7, 100)
    f = overlap()
    assert oracle_metric_static(f, alpha(f, {"a": 3, "b": 1, "c": 4}), builtin("min-cost")) == 1


def test_oracle_handles_non_semirings():
    f = overlap()
    ctd = builtin("cost-to-defend")
    # attacks {b} and {a,c}: min within, sum across: min(1) + min(3,4) = 4
    assert oracle_metric_static(f, alpha(f, {"a": 3, "b": 1, "c": 4}), ctd) == 4


def test_oracle_dynamic_goldens():
    d = exploit()
    assert oracle_metric_dynamic(d, alpha(d, {"ff": 3, "w": 15, "cc": 1}), builtin("min-time-par")) == 15
    assert oracle_metric_dynamic(d, alpha(d, {"ff": 42, "w": 10, "cc": 0}), builtin("min-skill")) == 10
    g = chains()
    assert oracle_metric_dynamic(g, alpha(g, {"a": 1, "b": 4, "c": 8}), builtin("min-cost")) == 13


def test_oracle_dynamic_on_static_tree_matches_static():
    t = treasure()
    a = alpha(t, {"n": 10, "t": 2, "p": 3})
    mc = builtin("min-cost")
    assert oracle_metric_dynamic(t, a, mc) == oracle_metric_static(t, a, mc)


def test_oracle_dynamic_needs_seq_for_chains():
    t = tt(("sand", "a", "b"))
    par = builtin("pareto(min-cost,min-skill)")
    a = {b: par.random_value(random.Random(1)) for b in bas_of(t)}
    with pytest.raises(IncompatibleDomain):
        oracle_metric_dynamic(t, a, par)


def test_successful_poset():
    d = exploit()
    w, cc, ff = d.id_of("w"), d.id_of("cc"), d.id_of("ff")
    assert successful_poset(d, frozenset({w, cc}), {(w, cc)})
    assert not successful_poset(d, frozenset({w, cc}), {(cc, w)})
    assert successful_poset(d, frozenset({ff, w}), frozenset())
    assert not successful_poset(d, frozenset({cc}), frozenset())
    # order implied transitively still counts
    g = chains()
    a, b, c = (g.id_of(x) for x in "abc")
    assert successful_poset(g, frozenset({a, b, c}), {(a, b), (b, c)})
    assert not successful_poset(g, frozenset({a, b, c}), {(a, b), (c, b)})


def test_minimal_dynamic_attacks_are_successful_posets():
    rng = random.Random(13)
    for _ in range(40):
        t = rand_tree_dat(rng, 7)
        for p in minimal_attacks_dynamic(t):
            assert successful_poset(t, p.nodes, p.order)
            assert p.order == transitive_reduction(p.nodes, p.order)


def test_coherence_clean_on_goldens_and_random_dats():
    for t in (treasure(), overlap(), exploit(), chains()):
        assert coherence_check(t, trials=60, seed=5) == []
    rng = random.Random(99)
    for _ in range(20):
        t = rand_tree_dat(rng, 7)
        assert coherence_check(t, trials=30, seed=rng.randrange(10**6)) == []


def test_coherence_fails_for_unrestricted_orders():
    # supersets that invent their own execution order can break the ordering
    # constraints, so this variant must find violations
    t = tt(("or", "c", ("sand", "a", "b")))
    violations = coherence_check(t, trials=100, seed=0, restrict_order=False)
    assert violations
    attack, sup, order = violations[0]
    assert attack < sup
    assert not successful_poset(t, sup, order)
