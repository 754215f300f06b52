import numpy as np
import pytest

from thetarep.gf_core import (
    DivisionByZero, FieldMismatch, FieldTooLarge, NotPrime, ZeroElement, all_elements, arith,
    dlog, field_build, frobenius, is_irreducible, smallest_irreducible,
)

from oracles import NaiveField

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2)]


@pytest.mark.parametrize("p,f", SMALL)
def test_levels_match_naive_tables(p, f):
    spec = field_build(p, f)
    for gf in (spec.fq, spec.fq2):
        F = NaiveField(p, gf.modulus)
        a, b = np.meshgrid(np.arange(gf.order), np.arange(gf.order), indexing="ij")
        assert np.array_equal(gf.mul(a, b), np.array(F._mul))
        assert all(int(gf.add(x, y)) == F.add(x, y) for x in range(gf.order) for y in range(0, gf.order, 3))
        assert all(int(gf.inv(x)) == F.inv(x) for x in range(1, gf.order))


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2)])
def test_field_laws_exhaustive(p, f):
    spec = field_build(p, f)
    for which in ("q", "q2"):
        els = all_elements(spec, which)
        zero, one = els[0], els[1]
        for a in els:
            assert a + zero == a and a * one == a
            assert (a + (-a)).is_zero()
            if not a.is_zero():
                assert a * a.inverse() == one
            for b in els:
                assert a + b == b + a and a * b == b * a
                for c in els[:: max(1, len(els) // 6)]:
                    assert (a + b) + c == a + (b + c)
                    assert (a * b) * c == a * (b * c)
                    assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("p,f", [(5, 2), (3, 3), (7, 2), (2, 4)])
def test_field_laws_random(p, f):
    spec = field_build(p, f)
    rng = np.random.default_rng(7)
    for which in ("q", "q2"):
        gf = spec.level(which)
        a, b, c = (rng.integers(0, gf.order, 1000) for _ in range(3))
        assert np.array_equal(gf.add(a, b), gf.add(b, a))
        assert np.array_equal(gf.mul(a, b), gf.mul(b, a))
        assert np.array_equal(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)))
        assert np.array_equal(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)))
        assert np.array_equal(gf.add(gf.add(a, b), c), gf.add(a, gf.add(b, c)))
        nz = a[a != 0]
        assert np.all(gf.mul(nz, gf.inv(nz)) == 1)
        # Frobenius is additive
        assert np.array_equal(gf.frob(gf.add(a, b)), gf.add(gf.frob(a), gf.frob(b)))


def test_smallest_irreducible_and_cap():
    assert smallest_irreducible(2, 3) == (1, 0, 1)  # t^2 + 1
    assert is_irreducible((1, 0, 1), 3) and not is_irreducible((2, 0, 1), 3)
    with pytest.raises(NotPrime):
        field_build(4, 1)
    with pytest.raises(FieldTooLarge):
        field_build(2, 9)
    field_build(2, 8)  # q^2 = 2^16 is allowed


def test_embedding_is_ring_hom():
    for p, f in [(3, 2), (5, 1), (2, 3)]:
        spec = field_build(p, f)
        fq, fq2, e = spec.fq, spec.fq2, spec.embed
        a, b = np.meshgrid(np.arange(fq.order), np.arange(fq.order), indexing="ij")
        assert np.array_equal(e(fq.mul(a, b)), fq2.mul(e(a), e(b)))
        assert np.array_equal(e(fq.add(a, b)), fq2.add(e(a), e(b)))
        # image is exactly the Frobenius-fixed points of F_{q^2}
        fixed = np.flatnonzero(fq2.power(np.arange(fq2.order), fq.order) == np.arange(fq2.order))
        assert sorted(e(np.arange(fq.order)).tolist()) == fixed.tolist()


def test_dlog_bijection_f81():
    spec = field_build(3, 2)
    logs = [dlog(x) for x in all_elements(spec, "q2")[1:]]
    assert sorted(logs) == list(range(80))
    gen = spec.element(spec.fq2.generator, "q2")
    assert dlog(gen) == 1 and dlog(spec.element(1, "q2")) == 0
    for k in range(80):
        assert dlog(gen ** k) == k
    with pytest.raises(ZeroElement):
        dlog(spec.element(0, "q2"))


def test_frobenius_and_arith():
    spec = field_build(3, 2)
    for a in all_elements(spec, "q"):
        assert frobenius(a, 2) == a
        assert frobenius(a, 1) == arith(a, op="pow", k=3)
    prime = [x for x in all_elements(spec, "q") if x.coeffs[1] == 0]
    assert all(frobenius(x, 1) == x for x in prime)
    rng = np.random.default_rng(3)
    spec4 = field_build(3, 4)
    for v in rng.integers(0, 81, 20):
        a = spec4.element(int(v))
        assert frobenius(a, 1) == a ** 3


def test_element_errors():
    spec = field_build(3, 2)
    zero = spec.element(0)
    with pytest.raises(DivisionByZero):
        zero.inverse()
    with pytest.raises(FieldMismatch):
        spec.element(1, "q") + spec.element(1, "q2")


@pytest.mark.parametrize("p,f,which", [(3, 1, "q"), (3, 2, "q2"), (7, 2, "q2"), (2, 3, "q"), (5, 2, "q")])
def test_matmul_matches_loops(p, f, which):
    gf = field_build(p, f).level(which)
    rng = np.random.default_rng(11)
    A = rng.integers(0, gf.order, (7, 13))
    B = rng.integers(0, gf.order, (13, 5))
    ref = np.zeros((7, 5), dtype=np.int64)
    for k in range(13):
        ref = gf.add(ref, gf.mul(A[:, k:k + 1], B[k:k + 1, :]))
    assert np.array_equal(gf.matmul(A, B), ref)


def test_field_spec_json():
    spec = field_build(3, 2)
    assert spec.to_json() == {"p": 3, "f": 2, "q_modulus": [1, 0, 1], "q2_modulus": [2, 1, 0, 0, 1],
                              "q2_generator": list(spec.fq2.coeffs(spec.fq2.generator))}
