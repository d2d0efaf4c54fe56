import random
from itertools import chain, combinations

import pytest

from atquant import (
    bas_of,
    default_order,
    from_structure_function,
    minimal_attacks_static,
    minimise,
    structure_function,
    top_paths,
)
from atquant.bdd import FALSE, TRUE, Bdd, VarOrder, _Store, check_minimised_shape, validate
from atquant.errors import DynamicTreeRejected, InvalidBdd, OrderMismatch

from helpers import overlap, rand_dag, rand_tree, suite_labels, exploit, treasure, tt


def powerset(xs):
    xs = list(xs)
    return chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))


def shuffled_order(rng, t):
    bas = list(bas_of(t))
    rng.shuffle(bas)
    return VarOrder(tuple(bas))


def test_var_order_rejects_repeats_and_unknowns():
    with pytest.raises(OrderMismatch):
        VarOrder((1, 2, 1))
    order = VarOrder((3, 1))
    assert order.rank_of(3) == 0 and order.bas_at(1) == 1
    with pytest.raises(OrderMismatch):
        order.rank_of(7)
    assert len(order) == 2


def test_from_structure_function_preconditions():
    with pytest.raises(DynamicTreeRejected):
        from_structure_function(exploit())
    t = treasure()
    with pytest.raises(OrderMismatch):
        from_structure_function(t, VarOrder((t.root,)))


def test_bdd_agrees_with_structure_function_everywhere():
    rng = random.Random(5)
    for i in range(60):
        t = rand_tree(rng, 6) if i % 2 else rand_dag(rng, 6)
        orders = [default_order(t)] + [shuffled_order(rng, t) for _ in range(3)]
        for order in orders:
            b = from_structure_function(t, order)
            validate(b)
            for s in powerset(bas_of(t)):
                assert b.evaluate(s) == structure_function(t, frozenset(s))


def test_canonicity_across_stores():
    b1 = from_structure_function(overlap())
    b2 = from_structure_function(overlap())
    assert b1.store is not b2.store
    assert b1.canonical() == b2.canonical()
    # a different formula gives a different canonical form
    assert b1.canonical() != from_structure_function(treasure()).canonical()


def test_apply_hash_consing_never_duplicates():
    # same (rank, low, high) gets one id even via different apply routes
    f = overlap()
    b = from_structure_function(f)
    triples = set()
    for v in b.reachable():
        if v >= 2:
            triple = (b.store.ranks[v], b.store.lows[v], b.store.highs[v])
            assert triple not in triples
            triples.add(triple)


def test_store_node_rejects_rank_inversions():
    order = VarOrder((0, 1))
    store = _Store(order)
    deep = store.node(1, FALSE, TRUE)
    store.node(0, FALSE, deep)  # increasing rank is fine
    with pytest.raises(InvalidBdd):
        store.node(1, FALSE, deep)  # equal rank child
    shallow = store.node(0, FALSE, TRUE)
    with pytest.raises(InvalidBdd):
        store.node(1, shallow, TRUE)  # decreasing rank child


def test_validate_catches_equal_children():
    order = VarOrder((0,))
    store = _Store(order)
    broken = store.node(0, TRUE, TRUE)
    with pytest.raises(InvalidBdd):
        validate(Bdd(store, order, broken))


def test_ts_bdd_has_three_decision_nodes():
    b = from_structure_function(treasure())
    assert b.node_count() == 3
    m = minimise(b)
    assert m.node_count() == 3
    validate(m)
    check_minimised_shape(m)


def test_and_chain_bdd_shape():
    t = tt(("and", "a", "b"))
    b = minimise(from_structure_function(t))
    assert b.node_count() == 2
    assert top_paths(b) == frozenset({frozenset(bas_of(t))})


def test_minimise_overlap_golden():
    f = overlap()
    m = minimise(from_structure_function(f))
    assert suite_labels(f, top_paths(m)) == {frozenset({"b"}), frozenset({"a", "c"})}
    assert m.node_count() == 3
    check_minimised_shape(m)


def test_minimise_keeps_already_minimal_functions():
    # OR of distinct leaves: every solution is already minimal
    t = tt(("or", "a", "b", "c"))
    b = from_structure_function(t)
    m = minimise(b)
    assert top_paths(m) == {frozenset({v}) for v in bas_of(t)}


def test_top_paths_on_terminals():
    order = VarOrder((0,))
    store = _Store(order)
    assert top_paths(Bdd(store, order, FALSE)) == frozenset()
    assert top_paths(Bdd(store, order, TRUE)) == frozenset({frozenset()})


def test_minimised_paths_equal_minimal_attacks_everywhere():
    rng = random.Random(77)
    for i in range(80):
        t = rand_tree(rng, 7) if i % 2 else rand_dag(rng, 7)
        suite = minimal_attacks_static(t)
        for order in (default_order(t), shuffled_order(rng, t)):
            m = minimise(from_structure_function(t, order))
            validate(m)
            check_minimised_shape(m)
            assert top_paths(m) == suite


def test_minimised_diagram_is_an_antichain_of_paths():
    rng = random.Random(3)
    for _ in range(30):
        t = rand_dag(rng, 7)
        paths = top_paths(minimise(from_structure_function(t)))
        for p in paths:
            for q in paths:
                assert not (p < q)


def test_root_is_never_terminal_for_built_models():
    rng = random.Random(21)
    for _ in range(20):
        t = rand_tree(rng, 5)
        b = from_structure_function(t)
        assert b.root >= 2
        # full set succeeds, empty set fails: the function is not constant
        assert b.evaluate(bas_of(t)) and not b.evaluate(())
