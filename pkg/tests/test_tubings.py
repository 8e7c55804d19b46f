from collections import Counter
from fractions import Fraction as F

import pytest

import oracles
from tubedse.cocycle import MellinSeries, MellinTruncationError, phi_recursive
from tubedse.poly import Poly
from tubedse.trees import DecoratedTree, ladder, parse_tree, single_primitive, trees_up_to_size
from tubedse.tubings import (
    IndexedTree,
    TubingEvaluator,
    count_tubings,
    enumerate_tubings,
    mel,
    phi_tubing,
    phi_tubing_naive,
    tubing_report,
)

L = Poly.var("L")
P = single_primitive()
P2 = single_primitive("p", 1, [1, 1], ("e1", "e2"))
Q2 = single_primitive("q", 1, [1, 1], ("e1", "e2"))


def a(n):
    return Poly.var(f"a[p][{n}]")


def sym(*prims):
    return {p.label: MellinSeries.symbolic(p) for p in prims}


def _family(tau):
    return frozenset(frozenset(s) for s in tau.tubes())


def test_small_examples():
    (only,) = enumerate_tubings(DecoratedTree("p"))
    assert only.b == 1 and only.root_types == ()
    assert len(enumerate_tubings(ladder(4))) == 5
    assert all(len(tau.tubes()) == 7 for tau in enumerate_tubings(ladder(4)))


@pytest.mark.parametrize("n", range(1, 9))
def test_ladder_counts_are_catalan(n):
    assert len(enumerate_tubings(ladder(n))) == count_tubings(ladder(n)) == oracles.catalan(n - 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_tubings_match_brute_force(n):
    alphabet = {"p": ("e1", "e2")} if n <= 4 else {"p": ("e",)}
    for shape in oracles.brute_tree_classes(n, alphabet).values():
        t = oracles.to_tree(*shape)
        # renumber in the tree's own preorder to match tubing vertex ids
        parent, _, _ = oracles.from_tree(t)
        ours = enumerate_tubings(t)
        brute = oracles.brute_binary_tubings(parent)
        assert {_family(tau) for tau in ours} == {frozenset(f) for f in brute}
        assert len(ours) == len(brute) == count_tubings(t)


@pytest.mark.parametrize("n", range(2, 6))
def test_statistics_match_brute_force(n):
    for shape in oracles.brute_tree_classes(n, {"p": ("e1", "e2")}).values():
        t = oracles.to_tree(*shape)
        parent, _, pl = oracles.from_tree(t)
        for tau in enumerate_tubings(t):
            rank, root_types = oracles.tube_statistics(parent, pl, _family(tau))
            assert list(tau.root_types) == root_types
            for v in range(n):
                assert {e: c for e, c in tau.rank.get(v, {}).items() if c} == rank[v]


def test_statistics_consistency():
    for t in trees_up_to_size([P2], 5):
        for tau in enumerate_tubings(t):
            total_rank = sum(sum(c.values()) for c in tau.rank.values())
            # every non-singleton tube contributes one rank unit
            assert total_rank == len(tau.vertices) - 1
            assert tau.b == sum(1 for s in tau.tubes() if 0 in s)
            assert sum(tau.rank_vector(0, P2.places)) == tau.b - 1
            assert tau.beta(1, P2.places) == tau.rank_vector(0, P2.places)
            assert tau.beta(tau.b, P2.places) == (0, 0)


def test_mel_examples():
    m = sym(P)
    it = IndexedTree(DecoratedTree("p"))
    assert mel(enumerate_tubings(DecoratedTree("p"))[0], it, m) == 1
    (tau,) = enumerate_tubings(ladder(2))
    assert mel(tau, IndexedTree(ladder(2)), m) == a(0)
    nested = [tau for tau in enumerate_tubings(ladder(4)) if tau.b == 4]
    assert len(nested) == 1 and mel(nested[0], IndexedTree(ladder(4)), m) == a(0) ** 3


def test_mel_respects_truncation():
    m = {"p": MellinSeries.symbolic(P, truncation=1)}
    star = parse_tree("p(e: p(e: p, e: p))")
    with pytest.raises(MellinTruncationError):
        phi_tubing_naive(star, m)


def test_single_vertex():
    assert phi_tubing(DecoratedTree("p"), sym(P)) == a(0) * L


def test_ladder_three():
    # two tubings: b=2 with the middle vertex ranked, and b=3 fully nested
    expect = (a(0) * a(1) * (a(1) * L + a(0) * L ** 2 * F(1, 2))
              + a(0) ** 2 * (a(2) * L + a(1) * L ** 2 * F(1, 2) + a(0) * L ** 3 * F(1, 6)))
    assert phi_tubing(ladder(3), sym(P)) == expect


ORACLE_CASES = [
    ([P], 6),
    ([P2], 5),
    ([P2, Q2], 4),
    ([P, single_primitive("q", 2, 1, ("e",))], 5),
]


@pytest.mark.parametrize("prims,n", ORACLE_CASES)
def test_fast_naive_and_recursive_agree(prims, n):
    m = sym(*prims)
    ev = TubingEvaluator(m)
    for t in trees_up_to_size(prims, n):
        rec = phi_recursive(t, m)
        assert ev(t) == rec
        if t.size <= 5:
            assert phi_tubing_naive(t, m) == rec


def test_sigma_is_sum_of_mel_with_root_factor():
    m = sym(P2)
    ev = TubingEvaluator(m)
    for t in trees_up_to_size([P2], 4):
        it = IndexedTree(t)
        direct = Poly.const(0)
        for tau in enumerate_tubings(t):
            direct = direct + mel(tau, it, m) * m["p"].value(tau.rank_vector(0, P2.places))
        assert ev.sigma(t) == direct


def test_aggregate_keys_are_root_type_sequences():
    t = parse_tree("p(e1: p, e2: p(e1: p))")
    ev = TubingEvaluator(sym(P2))
    seqs = Counter(tuple(tau.root_types) for tau in enumerate_tubings(t))
    assert set(ev.aggregate(t)) == set(seqs)


def test_report_shape():
    t = parse_tree("p(e: p, e: p(e: p))")
    rep = tubing_report(t, sym(P), emit_tubes=True)
    assert rep["count"] == 5 == len(rep["tubings"])
    assert sorted(row["b"] for row in rep["tubings"]) == [3, 3, 4, 4, 4]
    assert rep["vertices"][0] == {"id": 0, "decoration": "p", "parent": None, "place": None}
    assert all(len(row["tubes"]) == 3 for row in rep["tubings"])


def test_tree_shape_counts():
    star = parse_tree("p(e: p, e: p, e: p)")
    # the root splits off one leaf at a time: 3!
    assert count_tubings(star) == 6
    # non-isomorphic 3-vertex shapes: cherry has 2, ladder has 2
    assert count_tubings(parse_tree("p(e: p, e: p)")) == 2
