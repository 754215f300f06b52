import itertools

import numpy as np
import pytest

from thetarep import brauer
from thetarep.exact_modules import BoundViolated
from thetarep.gf_core import field_build
from thetarep.ps_jh import (
    NonGeneric, conjectural_dot, conjectural_f2_grouping, enumerate_lambda, hypercube,
    hypercube_vx, jh_character_matches, jh_factors, jh_socle_dot, lambda_for_subset, oracle_twists,
    socle_layers,
)
from thetarep.weight_algebra import TensorTerm, cg_general


def brute_lambdas(f):
    """Every tuple over the alphabet obeying the adjacency rule, by exhaustion."""
    low, high = {"X", "XM1"}, {"PM2", "PM1"}
    out = []
    for t in itertools.product(["X", "XM1", "PM2", "PM1"], repeat=f):
        ok = all((t[(i + 1) % f] in {"X", "PM2"}) if t[i] in low else (t[(i + 1) % f] in {"PM1", "XM1"})
                 for i in range(f))
        if ok:
            out.append(t)
    return out


@pytest.mark.parametrize("f", range(1, 7))
def test_lambda_bijection(f):
    lams = enumerate_lambda(f)
    assert len(lams) == 2 ** f
    assert sorted(l.entries for l in lams) == sorted(brute_lambdas(f))
    subsets = {frozenset(l.subset) for l in lams}
    assert len(subsets) == 2 ** f
    for lam in lams:
        assert lambda_for_subset(lam.subset, f) == lam


def test_lambda_examples():
    assert [l.entries for l in enumerate_lambda(1)] == [("X",), ("PM1",)]
    assert {l.entries for l in enumerate_lambda(2)} == {("X", "X"), ("XM1", "PM2"), ("PM2", "XM1"), ("PM1", "PM1")}
    assert lambda_for_subset(set(), 2).entries == ("X", "X")
    assert lambda_for_subset({0}, 2).entries == ("XM1", "PM2")
    assert lambda_for_subset({0, 1}, 2).entries == ("PM1", "PM1")
    assert lambda_for_subset({0}, 2).apply((2, 3), 7) == (1, 2)


def test_socle_layers():
    empty = lambda_for_subset(set(), 2)
    assert socle_layers(empty) == [[()], [(0,), (1,)], [(0, 1)]]
    assert socle_layers(lambda_for_subset({0, 1}, 2)) == [[(0, 1)]]
    assert [len(x) for x in socle_layers(lambda_for_subset(set(), 3))] == [1, 3, 3, 1]


def test_jh_f2_example():
    res = jh_factors(23, 7, 2)
    got = {(x.weight, x.e) for x in res.factors}
    assert got == {((2, 3), 0), ((3, 2), 3), ((1, 2), 28), ((4, 3), 23)}
    assert res.dim == 50 and res.generic
    assert jh_character_matches(res)


def test_jh_f1_example():
    res = jh_factors(3, 5, 1)
    assert [(x.weight, x.e) for x in res.factors] == [((3,), 0), ((1,), 3)]
    assert res.dim == 6


def test_jh_non_generic():
    res = jh_factors(0, 7, 2)
    assert not res.generic and any("non-generic" in n for n in res.notes)


@pytest.mark.parametrize("p,f", [(3, 1), (5, 1), (3, 2), (7, 2)])
def test_jh_random_generic(p, f):
    q = p ** f
    rng = np.random.default_rng(p * 100 + f)
    generic = [r for r in range(1, q - 1) if jh_factors(r, p, f).generic]
    for r in rng.choice(generic, min(20, len(generic)), replace=False):
        res = jh_factors(int(r), p, f)
        assert res.dim == q + 1
        assert jh_character_matches(res)


def test_jh_full_character_f2():
    """Class-by-class comparison with the induced character."""
    spec = field_build(7, 2)
    res = jh_factors(23, 7, 2)
    total = sum(brauer.char_table(TensorTerm.of(x.weight, e=x.e), spec) for x in res.factors)
    assert np.array_equal(total, brauer.induced_table(0, 23, spec))


@pytest.mark.parametrize("p,f,r", [(3, 3, 13), (5, 3, 86), (3, 4, 40)])
def test_jh_higher_f_oracle(p, f, r):
    res = jh_factors(r, p, f)
    assert res.dim == p ** f + 1
    assert all(x.provenance == "oracle-determined" for x in res.factors)
    assert jh_character_matches(res)


def test_oracle_twists_multiset_unique():
    """Every matching assignment gives the same multiset of twisted weights."""
    spec = field_build(3, 3)
    res = jh_factors(13, 3, 3)
    weights = [x.weight for x in res.factors]
    sols = oracle_twists(weights, 0, 13, spec)
    assert sols
    multisets = {tuple(sorted(zip(weights, s))) for s in sols}
    assert len(multisets) == 1
    assert tuple(sorted((x.weight, x.e) for x in res.factors)) in multisets


@pytest.mark.parametrize("f", range(1, 7))
def test_hypercube_counts(f):
    g = hypercube(f)
    assert len(g.vertices) == 2 ** f and len(g.edges) == f * 2 ** (f - 1)
    assert all(set(u) < set(v) and len(v) == len(u) + 1 for u, v in g.edges)


def test_hypercube_vx_labels():
    g = hypercube_vx((19, 19), 3, 1)
    assert len(g.vertices) == 4
    top = g.labels[(0, 1)]
    assert top.S == 4 and top.r_prime == (15, 15)
    for v, lab in g.labels.items():
        j = [int(i in v) for i in range(2)]
        assert lab.S == sum(3 ** l for l in v)
        assert lab.r_prime == tuple(19 - j[i] - 3 * j[(i + 1) % 2] for i in range(2))
    assert g.to_dot().count("->") == 4
    assert len(g.to_json()["edges"]) == 4
    with pytest.raises(BoundViolated):
        hypercube_vx((5, 5), 3, 1)


def test_conjectural_grouping():
    ds = conjectural_f2_grouping(2, 3, 7)
    nodes = [n for d in ds for n in d.nodes()]
    assert len(ds) == 4 and len(set(nodes)) == 16
    assert sum(np.prod([x + 1 for x in w]) for w, _ in nodes) == 4 * 50
    assert "CONJECTURAL" in conjectural_dot(ds, 7)
    with pytest.raises(NonGeneric):
        conjectural_f2_grouping(1, 3, 7)


def test_conjectural_matches_tensor_with_11():
    p = 11
    res = jh_factors(3 + 4 * p, p, 2)
    from_tensor = []
    for x in res.factors:
        for t in cg_general(x.weight, (1, 1), p).twist(x.e).terms:
            from_tensor.append((t.factors[0].m, t.e))
    conj = [n for d in conjectural_f2_grouping(3, 4, p) for n in d.nodes()]
    assert sorted(from_tensor) == sorted(conj)


def test_jh_dot():
    dot = jh_socle_dot(jh_factors(23, 7, 2))
    assert dot.startswith("digraph") and dot.count("->") == 4 and "(4,3)⊗D^23" in dot
