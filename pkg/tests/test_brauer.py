import numpy as np
import pytest

from thetarep import brauer
from thetarep.brauer import CycInt, cyclotomic_poly, pregular_classes
from thetarep.gf_core import field_build
from thetarep.weight_algebra import TensorTerm, WeightSum

from oracles import (
    NaiveField, conjugacy_classes, eigen_multiplicities, element_order, naive_cyclotomic, naive_rho,
)


def test_cyclotomic_matches_division():
    assert cyclotomic_poly(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_poly(1) == (-1, 1)
    for n in range(1, 100):
        assert tuple(cyclotomic_poly(n)) == naive_cyclotomic(n)
    assert len(cyclotomic_poly(80)) - 1 == 32


def test_cycint_ring_laws():
    n = 80
    rng = np.random.default_rng(2)
    rand = lambda: CycInt.from_counts(n, rng.integers(-3, 4, n))
    for _ in range(30):
        a, b, c = rand(), rand(), rand()
        assert a + b == b + a and a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero()
        assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-6
    z = CycInt.zeta(n)
    assert z ** n == CycInt.integer(n, 1)
    phi = cyclotomic_poly(n)
    total = CycInt.integer(n, 0)
    for k, c in enumerate(phi):
        total = total + (z ** k) * c
    assert total.is_zero()


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)])
def test_class_count(p, f):
    q = p ** f
    classes = pregular_classes(field_build(p, f))
    assert len(classes) == q * (q - 1)
    kinds = [c.kind for c in classes]
    assert kinds.count("central") == q - 1
    assert kinds.count("split") == (q - 1) * (q - 2) // 2
    assert kinds.count("nonsplit") == q * (q - 1) // 2


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2)])
def test_classes_against_brute_force(p, f):
    spec = field_build(p, f)
    F = NaiveField(p, spec.fq.modulus)
    regular = [c for c in conjugacy_classes(F) if element_order(F, next(iter(c))) % p]
    assert len(regular) == spec.q * (spec.q - 1)
    hits = []
    for c in pregular_classes(spec):
        rep = tuple(c.representative)
        owner = [i for i, cls in enumerate(regular) if rep in cls]
        assert len(owner) == 1
        hits.append(owner[0])
    assert sorted(hits) == list(range(len(regular)))


def _naive_dlog(F2, gen):
    table, x = {}, 1
    for k in range(F2.order - 1):
        table[x] = k
        x = F2.mul(x, gen)
    return table


def brute_character(spec, r, e=0):
    """Eigenvalue multiplicities of each class representative, lifted to Z[ζ]."""
    F2 = NaiveField(spec.p, spec.fq2.modulus)
    log = _naive_dlog(F2, spec.fq2.generator)
    n = spec.q ** 2 - 1
    rows = []
    for c in pregular_classes(spec):
        g = [int(spec.embed(x)) for x in c.representative]
        M = naive_rho(F2, g, r, e)
        mult = eigen_multiplicities(F2, M, range(1, F2.order))
        assert sum(mult.values()) == len(M)
        counts = np.zeros(n, dtype=np.int64)
        for lam, k in mult.items():
            counts[log[lam]] += k
        rows.append(brauer.reduce_counts(counts, n))
    return np.array(rows)


@pytest.mark.parametrize("p,f,r,e", [(3, 1, (4,), 1), (2, 2, (1, 1), 0), (3, 2, (1, 2), 3), (5, 1, (3,), 2)])
def test_weight_char_matches_eigenvalues(p, f, r, e):
    spec = field_build(p, f)
    table = brauer.char_table(TensorTerm.of(r, e=e), spec)
    assert np.array_equal(table, brute_character(spec, r, e))


def test_weight_char_identity_and_central():
    spec = field_build(3, 2)
    classes = pregular_classes(spec)
    t = TensorTerm.of((2, 1), e=5)
    for c in classes:
        val = brauer.weight_char(t, c, spec)
        if c.kind == "central":
            k = c.eigen_exponents[0]
            assert val == CycInt.zeta(80, (2 + 3 + 2 * 5) * k) * t.dim
    ident = next(c for c in classes if c.kind == "central" and c.eigen_exponents[0] == 0)
    assert brauer.weight_char(t, ident, spec) == CycInt.integer(80, 6)


def test_tensor_identity_p5():
    spec = field_build(5, 1)
    lhs = brauer.char_table(TensorTerm.of((1,), (2,)), spec)
    rhs = brauer.char_table(WeightSum.build([TensorTerm.of((3,)), TensorTerm.of((1,), e=1)], 5), spec)
    assert lhs.shape[0] == 20 and np.array_equal(lhs, rhs)


def fixed_point_induced(spec, S, rp):
    """Sum over F_q-lines fixed by g of the lifted B-character on that line."""
    F = NaiveField(spec.p, spec.fq.modulus)
    F2 = NaiveField(spec.p, spec.fq2.modulus)
    log = _naive_dlog(F2, spec.fq2.generator)
    n = spec.q ** 2 - 1
    lines = [(1, t) for t in range(F.order)] + [(0, 1)]
    rows = []
    for c in pregular_classes(spec):
        a, b, cc, d = c.representative
        det = F.sub(F.mul(a, d), F.mul(b, cc))
        counts = np.zeros(n, dtype=np.int64)
        for u, v in lines:
            gu, gv = F.add(F.mul(a, u), F.mul(b, v)), F.add(F.mul(cc, u), F.mul(d, v))
            if F.sub(F.mul(gu, v), F.mul(gv, u)) == 0:
                lam = F.mul(gu, F.inv(u)) if u else F.mul(gv, F.inv(v))
                k = S * log[int(spec.embed(det))] + rp * log[int(spec.embed(lam))]
                counts[k % n] += 1
        rows.append(brauer.reduce_counts(counts, n))
    return np.array(rows)


@pytest.mark.parametrize("p,f,S,rp", [(3, 1, 1, 5), (2, 2, 2, 1), (5, 1, 3, 2), (3, 2, 4, 15 + 3 * 15)])
def test_induced_matches_fixed_points(p, f, S, rp):
    spec = field_build(p, f)
    table = brauer.induced_table(S, rp, spec)
    assert np.array_equal(table, fixed_point_induced(spec, S, rp))
    classes = pregular_classes(spec)
    for c, row in zip(classes, table):
        if c.kind == "nonsplit":
            assert not row.any()
        if c.kind == "central" and c.eigen_exponents[0] == 0:
            assert CycInt(spec.q ** 2 - 1, tuple(int(x) for x in row)) == CycInt.integer(spec.q ** 2 - 1, spec.q + 1)


def test_induced_profile_agrees_with_table():
    for p, f in [(3, 1), (5, 1), (3, 2), (7, 1)]:
        spec = field_build(p, f)
        for S, rp in [(0, 1), (2, 3), (1, 0)]:
            got = brauer.evaluate(brauer.induced_profile(S, rp, spec), pregular_classes(spec), spec)
            assert np.array_equal(got, brauer.induced_table(S, rp, spec))


def _residual(spec, factors, skip):
    total = brauer.induced_table(0, 23, spec)
    for w, e in factors:
        if w != skip:
            total = total - brauer.char_table(TensorTerm.of(w, e=e), spec)
    return total


def test_solve_det_twist_recovers_f2_twists():
    spec = field_build(7, 2)
    factors = [((2, 3), 0), ((1, 2), 28), ((3, 2), 3), ((4, 3), 23)]
    for w, e in factors:
        assert brauer.solve_det_twist(w, _residual(spec, factors, w), spec) == e
    assert brauer.solve_det_twist((3, 2), brauer.char_table(TensorTerm.of((3, 2)), spec), spec) == 0
    assert brauer.solve_det_twist((3, 2), brauer.char_table(TensorTerm.of((3, 3)), spec), spec) is None


def test_char_table_json_shape():
    spec = field_build(3, 1)
    doc = brauer.char_table_json(brauer.induced_table(0, 1, spec), spec)
    assert doc["n"] == 8 and len(doc["rows"]) == 6
    assert set(doc["rows"][0]["class"]) == {"kind", "eigen_exponents", "representative"}
