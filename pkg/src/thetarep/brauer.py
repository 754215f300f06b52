"""Exact Brauer characters of GL_2(F_q).

Eigenvalues in F_{q^2} are lifted to powers of a complex primitive ``n``-th root
of unity ``ζ`` (``n = q^2 - 1``) through the discrete log to ``q2_generator``.
Values live in ``Z[ζ]`` and are stored as coefficient vectors reduced modulo the
cyclotomic polynomial, which makes equality exact.

Every character is first computed as a *profile*: multiplicities of torus
weights.  ``split`` counts the diagonal-torus weights ``(K, L)`` mod ``q - 1``;
``nonsplit`` counts the weights ``K + qL`` mod ``n`` of the non-split torus
generated by the companion matrix of ``q2_generator``.  All p-regular classes
are powers of elements of one of these two tori, so a profile determines the
whole character.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf_core import FieldSpec, prime_factors
from .weight_algebra import TensorTerm, Weight, WeightSum

__all__ = [
    "AmbiguousTwist", "cyclotomic_poly", "CycInt", "PRegClass", "pregular_classes",
    "Profile", "weight_profile", "induced_profile", "evaluate", "char_table",
    "weight_char", "induced_char", "induced_table", "solve_det_twist", "char_table_json",
]


class AmbiguousTwist(ValueError):
    def __init__(self, matches: Sequence[int]):
        super().__init__(f"several determinant twists match: {list(matches)}")
        self.matches = list(matches)


# -- cyclotomic integers ---------------------------------------------------

@functools.lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Φ_n, low to high, by dividing x^n - 1 by Φ_d for d | n, d < n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, cyclotomic_poly(d))
    return tuple(num)


def _exact_div(a: list[int], b: Sequence[int]) -> list[int]:
    a = list(a)
    db = len(b) - 1
    out = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] // b[-1]
        out[k - db] = c
        for j, bj in enumerate(b):
            a[k - db + j] -= c * bj
    if any(a):
        raise ArithmeticError("division is not exact")
    return out


def _radical(n: int) -> int:
    r = 1
    for ell in prime_factors(n):
        r *= ell
    return r


@functools.lru_cache(maxsize=None)
def _reduction(n: int) -> tuple[int, int, np.ndarray]:
    """``(rad, s, R)`` with R[a] = x^a mod Φ_rad for a < rad; Φ_n(x) = Φ_rad(x^s)."""
    rad = _radical(n)
    s = n // rad
    phi = list(cyclotomic_poly(rad))
    d = len(phi) - 1
    R = np.zeros((rad, d), dtype=np.int64)
    v = [1] + [0] * (d - 1) if d else []
    for a in range(rad):
        R[a] = v
        # multiply by x and reduce
        top = v[-1] if d else 0
        v = [0] + v[:-1]
        v = [c - top * phi[j] for j, c in enumerate(v)]
    R.setflags(write=False)
    return rad, s, R


def phi_degree(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


def reduce_counts(counts: np.ndarray, n: int) -> np.ndarray:
    """Map multiplicity vectors over Z/n (last axis) to reduced Z[ζ_n] coordinates."""
    counts = np.asarray(counts, dtype=np.int64)
    rad, s, R = _reduction(n)
    lead = counts.shape[:-1]
    c = counts.reshape(-1, rad, s)
    if np.abs(c).sum(axis=(1, 2)).max(initial=0) * max(1, int(np.abs(R).max(initial=0))) < 2 ** 50:
        # exact in float64, and BLAS-backed
        Rf = _float_reduction(n)
        out = np.rint(np.matmul(c.transpose(0, 2, 1).astype(np.float64), Rf)).astype(np.int64)
        out = out.transpose(0, 2, 1)
    else:
        out = np.einsum("bas,aj->bjs", c, R)
    return out.reshape(lead + (R.shape[1] * s,))


@functools.lru_cache(maxsize=None)
def _float_reduction(n: int) -> np.ndarray:
    return _reduction(n)[2].astype(np.float64)


@dataclass(frozen=True)
class CycInt:
    """An element of Z[ζ_n] in the power basis 1, ζ, ..., ζ^{φ(n)-1}."""

    n: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_counts(cls, n: int, counts) -> "CycInt":
        return cls(n, tuple(int(x) for x in reduce_counts(np.asarray(counts), n)))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycInt":
        c = np.zeros(n, dtype=np.int64)
        c[k % n] = 1
        return cls.from_counts(n, c)

    @classmethod
    def integer(cls, n: int, a: int) -> "CycInt":
        return cls.zeta(n, 0) * a if a else cls(n, (0,) * phi_degree(n))

    def _full(self) -> np.ndarray:
        c = np.zeros(self.n, dtype=np.int64)
        c[: len(self.coeffs)] = self.coeffs
        return c

    def _same(self, other: "CycInt") -> None:
        if self.n != other.n:
            raise ValueError("different cyclotomic rings")

    def __add__(self, other: "CycInt") -> "CycInt":
        self._same(other)
        return CycInt(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycInt":
        return CycInt(self.n, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "CycInt") -> "CycInt":
        return self + (-other)

    def __mul__(self, other) -> "CycInt":
        if isinstance(other, int):
            return CycInt(self.n, tuple(a * other for a in self.coeffs))
        self._same(other)
        prod = np.convolve(self._full(), other._full())
        folded = np.zeros(self.n, dtype=np.int64)
        np.add.at(folded, np.arange(prod.size) % self.n, prod)
        return CycInt.from_counts(self.n, folded)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CycInt":
        out = CycInt.integer(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_complex(self) -> complex:
        z = np.exp(2j * np.pi * np.arange(len(self.coeffs)) / self.n)
        return complex(np.dot(self.coeffs, z))


# -- classes ------------------------------------------------------------------

@dataclass(frozen=True)
class PRegClass:
    """A p-regular class of GL_2(F_q); exponents are dlogs in F_{q^2}."""

    kind: str
    eigen_exponents: tuple[int, int]
    representative: tuple[int, int, int, int]

    def to_json(self) -> dict:
        return {"kind": self.kind, "eigen_exponents": list(self.eigen_exponents),
                "representative": list(self.representative)}


def _fq_from_fq2(spec: FieldSpec) -> dict[int, int]:
    return {int(v): a for a, v in enumerate(spec.embedding)}


@functools.lru_cache(maxsize=None)
def pregular_classes(spec: FieldSpec) -> tuple[PRegClass, ...]:
    """Central, split and non-split semisimple classes: q(q-1) in total."""
    q = spec.q
    n = q * q - 1
    G2 = spec.fq2
    back = _fq_from_fq2(spec)
    units = sorted(range(1, q), key=lambda a: int(G2.log[spec.embed(a)]))
    k_of = {a: int(G2.log[spec.embed(a)]) for a in units}
    out = [PRegClass("central", (k_of[a], k_of[a]), (a, 0, 0, a)) for a in units]
    for i, a in enumerate(units):
        for b in units[i + 1:]:
            out.append(PRegClass("split", (k_of[a], k_of[b]), (a, 0, 0, b)))
    for k in range(1, n):
        kq = k * q % n
        if k % (q + 1) == 0 or kq < k:
            continue
        alpha, beta = int(G2.exp[k]), int(G2.exp[kq])
        tr = back[int(G2.add(alpha, beta))]
        nm = back[int(G2.mul(alpha, beta))]
        out.append(PRegClass("nonsplit", (k, kq), (0, int(spec.fq.neg(nm)), 1, tr)))
    return tuple(out)


# -- profiles and evaluation --------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Torus-weight multiplicities; ``split`` is (q-1)x(q-1), ``nonsplit`` has length q^2-1."""

    split: np.ndarray
    nonsplit: np.ndarray

    def __add__(self, other: "Profile") -> "Profile":
        return Profile(self.split + other.split, self.nonsplit + other.nonsplit)

    def __sub__(self, other: "Profile") -> "Profile":
        return Profile(self.split - other.split, self.nonsplit - other.nonsplit)

    @property
    def dim(self) -> int:
        return int(self.nonsplit.sum())

    def twist(self, e: int, q: int) -> "Profile":
        t = e % (q - 1)
        return Profile(np.roll(self.split, (t, t), axis=(0, 1)),
                       np.roll(self.nonsplit, e * (q + 1) % (q * q - 1)))


def profile_from_labels(K: np.ndarray, L: np.ndarray, q: int, weights=None) -> Profile:
    """Profile of a space with a basis of torus eigenvectors of weights (K, L)."""
    n = q * q - 1
    K = np.asarray(K, dtype=np.int64)
    L = np.asarray(L, dtype=np.int64)
    w = None if weights is None else np.asarray(weights, dtype=np.int64)
    split = np.bincount((K % (q - 1)) * (q - 1) + L % (q - 1), weights=w,
                        minlength=(q - 1) ** 2).reshape(q - 1, q - 1)
    ns = np.bincount((K + q * L) % n, weights=w, minlength=n)
    return Profile(np.rint(split).astype(np.int64), np.rint(ns).astype(np.int64))


def weight_labels(blocks: Sequence[tuple[int, int]], p: int) -> tuple[np.ndarray, np.ndarray]:
    """Torus weights (K, L) of the monomial basis of a product of Frobenius-twisted blocks.

    ``blocks`` lists ``(degree, frobenius power)``; the basis is in C order over
    the x-degrees of the blocks.
    """
    K = np.zeros(1, dtype=np.int64)
    L = np.zeros(1, dtype=np.int64)
    for deg, fr in blocks:
        a = np.arange(deg + 1, dtype=np.int64)
        w = p ** fr
        K = (K[:, None] + a[None, :] * w).reshape(-1)
        L = (L[:, None] + (deg - a)[None, :] * w).reshape(-1)
    return K, L


def term_blocks(t: TensorTerm) -> list[tuple[int, int]]:
    return [(d, i) for w in t.factors for i, d in enumerate(w.m)]


def weight_profile(t, spec: FieldSpec) -> Profile:
    """Profile of a TensorTerm, Weight, tuple or WeightSum."""
    q = spec.q
    if isinstance(t, WeightSum):
        total = None
        for term in t.terms:
            pr = weight_profile(term, spec)
            total = pr if total is None else total + pr
        if total is None:
            return Profile(np.zeros((q - 1, q - 1), dtype=np.int64), np.zeros(q * q - 1, dtype=np.int64))
        return total
    if isinstance(t, Weight):
        t = TensorTerm((t,))
    elif not isinstance(t, TensorTerm):
        t = TensorTerm.of(tuple(t))
    K, L = weight_labels(term_blocks(t), spec.p)
    return profile_from_labels(K + t.e, L + t.e, q)


def induced_profile(S: int, r_prime: int, spec: FieldSpec) -> Profile:
    """Torus restrictions of ind_B^G(det^S ⊗ d^{r'}).

    The split torus fixes 0 and ∞ on the projective line, giving the weights
    (S + r', S) and (S, S + r'), and permutes the other q - 1 points freely,
    giving every weight with the central character.  The non-split torus acts
    freely, so its restriction is every weight with the central character.
    """
    q = spec.q
    n = q * q - 1
    c = (r_prime + 2 * S) % (q - 1)
    split = np.zeros((q - 1, q - 1), dtype=np.int64)
    split[(S + r_prime) % (q - 1), S % (q - 1)] += 1
    split[S % (q - 1), (S + r_prime) % (q - 1)] += 1
    K = np.arange(q - 1)
    split[K, (c - K) % (q - 1)] += 1
    w = np.arange(n)
    ns = ((w % (q - 1)) == c).astype(np.int64)
    return Profile(split, ns)


def _class_arrays(classes: Sequence[PRegClass], q: int):
    kinds = np.array([c.kind for c in classes])
    k = np.array([c.eigen_exponents for c in classes], dtype=np.int64).reshape(-1, 2)
    return kinds, k


def _counts(profile: Profile, classes: Sequence[PRegClass], spec: FieldSpec) -> np.ndarray:
    """Unreduced exponent histograms: entry [i, t] counts eigenvalues ζ^t at class i."""
    q = spec.q
    n = q * q - 1
    kinds, k = _class_arrays(classes, q)
    counts = np.zeros((len(classes), n), dtype=np.int64)
    split_idx = np.flatnonzero(kinds == "split")
    if split_idx.size:
        u = k[split_idx] // (q + 1)
        KK, LL = np.meshgrid(np.arange(q - 1), np.arange(q - 1), indexing="ij")
        expo = ((u[:, 0, None] * KK.reshape(1, -1) + u[:, 1, None] * LL.reshape(1, -1)) * (q + 1)) % n
        flat = (np.arange(split_idx.size)[:, None] * n + expo).reshape(-1)
        weights = np.tile(profile.split.reshape(-1), split_idx.size)
        counts[split_idx] = np.bincount(flat, weights, minlength=split_idx.size * n).reshape(-1, n).round().astype(np.int64)
    other = np.flatnonzero(kinds != "split")
    if other.size:
        s = k[other, 0]
        expo = (s[:, None] * np.arange(n)[None, :]) % n
        flat = (np.arange(other.size)[:, None] * n + expo).reshape(-1)
        weights = np.tile(profile.nonsplit, other.size)
        counts[other] = np.bincount(flat, weights, minlength=other.size * n).reshape(-1, n).round().astype(np.int64)
    return counts


def evaluate(profile: Profile, classes: Sequence[PRegClass], spec: FieldSpec) -> np.ndarray:
    """Character values, one reduced Z[ζ] row per class."""
    return reduce_counts(_counts(profile, classes, spec), spec.q ** 2 - 1)


def char_table(t, spec: FieldSpec, classes: Sequence[PRegClass] | None = None) -> np.ndarray:
    classes = pregular_classes(spec) if classes is None else classes
    return evaluate(weight_profile(t, spec), classes, spec)


def weight_char(t, c: PRegClass, spec: FieldSpec) -> CycInt:
    row = evaluate(weight_profile(t, spec), [c], spec)[0]
    return CycInt(spec.q ** 2 - 1, tuple(int(x) for x in row))


def induced_table(S: int, r_prime: int, spec: FieldSpec, classes: Sequence[PRegClass] | None = None) -> np.ndarray:
    """Values of ind(det^S ⊗ d^{r'}) from the fixed-point formula."""
    classes = pregular_classes(spec) if classes is None else classes
    q = spec.q
    n = q * q - 1
    counts = np.zeros((len(classes), n), dtype=np.int64)
    for i, c in enumerate(classes):
        k1, k2 = c.eigen_exponents
        if c.kind == "central":
            counts[i, ((r_prime + 2 * S) * k1) % n] += q + 1
        elif c.kind == "split":
            counts[i, (S * (k1 + k2) + r_prime * k1) % n] += 1
            counts[i, (S * (k1 + k2) + r_prime * k2) % n] += 1
    return reduce_counts(counts, n)


def induced_char(S: int, r_prime: int, c: PRegClass, spec: FieldSpec) -> CycInt:
    row = induced_table(S, r_prime, spec, [c])[0]
    return CycInt(spec.q ** 2 - 1, tuple(int(x) for x in row))


def solve_det_twist(w, residual: np.ndarray, spec: FieldSpec,
                    classes: Sequence[PRegClass] | None = None) -> int | None:
    """The unique ``e`` in [0, q-1) with char(w ⊗ det^e) equal to ``residual`` on every class."""
    classes = pregular_classes(spec) if classes is None else classes
    q = spec.q
    n = q * q - 1
    base = _counts(weight_profile(w, spec), classes, spec)
    residual = np.asarray(residual)
    # twisting by det^e multiplies the value at a class by ζ^{e(k1 + k2)}
    _, k = _class_arrays(classes, q)
    shift = k.sum(axis=1) % n
    idx = np.arange(len(classes))
    sample = idx[:: max(1, len(classes) // 64)]

    def matches(e: int, rows: np.ndarray) -> bool:
        cols = (np.arange(n)[None, :] - e * shift[rows, None]) % n
        return np.array_equal(reduce_counts(base[rows[:, None], cols], n), residual[rows])

    # a cheap screen on a sample of classes, then the full comparison
    hits = [e for e in range(q - 1) if matches(e, sample) and matches(e, idx)]
    if len(hits) > 1:
        raise AmbiguousTwist(hits)
    return hits[0] if hits else None


def char_table_json(table: np.ndarray, spec: FieldSpec, classes: Sequence[PRegClass] | None = None) -> dict:
    classes = pregular_classes(spec) if classes is None else classes
    return {
        "n": spec.q ** 2 - 1,
        "rows": [{"class": c.to_json(), "value": [int(x) for x in row]} for c, row in zip(classes, table)],
    }


def nonsplit_frame(spec: FieldSpec) -> tuple[tuple[int, int, int, int], tuple[int, int, int, int]]:
    """``(g0, h)`` over F_{q^2}: g0 is the companion matrix of q2_generator and
    ``h^{-1} g0 h = diag(α, α^q)``."""
    G2 = spec.fq2
    q = spec.q
    alpha = int(G2.exp[1])
    beta = int(G2.exp[q % (q * q - 1)])
    tr = int(G2.add(alpha, beta))
    nm = int(G2.mul(alpha, beta))
    g0 = (0, int(G2.neg(nm)), 1, tr)
    h = (int(G2.neg(beta)), int(G2.neg(alpha)), 1, 1)
    return g0, h
