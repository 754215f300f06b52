"""Finite fields F_p, F_q = F_{p^f} and F_{q^2}.

Elements are packed as integers: the coefficient vector ``(c_0, ..., c_{d-1})``
relative to the defining polynomial is stored as ``sum(c_j * p**j)``.  Each
field level is a :class:`GF` holding log/antilog tables, which also serve as
the vectorised numpy backend for the linear algebra in :mod:`thetarep.linalg`.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "FieldError", "NotPrime", "FieldTooLarge", "DivisionByZero", "FieldMismatch", "ZeroElement",
    "GF", "FieldSpec", "FieldElement",
    "is_prime", "prime_factors", "field_build", "arith", "frobenius", "dlog",
]

Q2_CAP = 1 << 16


class FieldError(ValueError):
    pass


class NotPrime(FieldError):
    pass


class FieldTooLarge(FieldError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class FieldMismatch(FieldError):
    pass


class ZeroElement(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over F_p as coefficient tuples, low to high ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] * inv_lead % p
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return q, a


def _poly_mulmod(a: Sequence[int], b: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_divmod(prod, mod, p)[1]


def _poly_powmod(a: Sequence[int], k: int, mod: Sequence[int], p: int) -> list[int]:
    result, base = [1], list(a)
    while k:
        if k & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        k >>= 1
    return result


def _monic_polys(deg: int, p: int):
    """Monic polynomials of degree ``deg`` in increasing packed order."""
    for packed in range(p ** deg):
        yield tuple((packed // p ** j) % p for j in range(deg)) + (1,)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg == 1:
        return True
    if poly[0] % p == 0:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(d, p):
            if not _poly_divmod(poly, g, p)[1]:
                return False
    return True


def smallest_irreducible(deg: int, p: int) -> tuple[int, ...]:
    for poly in _monic_polys(deg, p):
        if is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _fmod_int(x: np.ndarray, p: int) -> np.ndarray:
    """``x mod p`` for float arrays holding exact integers (|x| < 2^40)."""
    return x - p * np.floor((x + 0.5) / p)


class GF:
    """One finite field level with vectorised arithmetic on packed integers."""

    def __init__(self, p: int, modulus: Sequence[int], name: str = ""):
        self.p = p
        self.modulus = tuple(int(c) for c in modulus)
        self.deg = len(self.modulus) - 1
        self.order = p ** self.deg
        self.name = name or f"F_{self.order}"
        self._pows = np.array([p ** j for j in range(self.deg)], dtype=np.int64)
        self.generator = self._find_generator()
        self._build_tables()

    # construction ---------------------------------------------------------
    def coeffs(self, x: int) -> tuple[int, ...]:
        return tuple((int(x) // self.p ** j) % self.p for j in range(self.deg))

    def pack(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.deg:
            coeffs = _poly_divmod(coeffs, self.modulus, self.p)[1]
        return sum((int(c) % self.p) * self.p ** j for j, c in enumerate(coeffs))

    def _slow_pow(self, x: int, k: int) -> int:
        return self.pack(_poly_powmod(self.coeffs(x), k, self.modulus, self.p))

    def _find_generator(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        factors = prime_factors(n)
        for x in range(1, self.order):
            if all(self._slow_pow(x, n // ell) != 1 for ell in factors):
                return x
        raise AssertionError("multiplicative group is not cyclic")  # unreachable

    def _build_tables(self) -> None:
        n = self.order - 1
        p, d = self.p, self.deg
        # multiplication by the generator as a d x d matrix over F_p
        step = np.zeros((d, d), dtype=np.int64)
        g = self.coeffs(self.generator)
        for j in range(d):
            basis = [0] * j + [1]
            step[j, :] = self.coeffs(self.pack(_poly_mulmod(basis, g, self.modulus, p)))
        exp = np.empty(2 * n, dtype=np.int64)
        v = np.zeros(d, dtype=np.int64)
        v[0] = 1
        for k in range(n):
            exp[k] = int(v @ self._pows)
            v = (v @ step) % p
        exp[n:] = exp[:n]
        log = np.full(self.order, -1, dtype=np.int64)
        log[exp[:n]] = np.arange(n)
        self.exp, self.log = exp, log
        if d > 1:
            digits = self.to_digits(np.arange(self.order))
            self._digit_table = digits
            neg = (-digits) % p
            self._neg = neg @ self._pows
            if self.order <= 1024:
                a = digits[:, None, :]
                b = digits[None, :, :]
                self._add = ((a + b) % p) @ self._pows
            else:
                self._add = None

    # vectorised arithmetic ----------------------------------------------
    def to_digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        table = getattr(self, "_digit_table", None)
        if table is not None:
            return table[a]
        return (a[..., None] // self._pows) % self.p

    def from_digits(self, digits) -> np.ndarray:
        return np.asarray(digits, dtype=np.int64) @ self._pows

    def add(self, a, b):
        if self.deg == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        if self._add is not None:
            return self._add[a, b]
        return self.from_digits((self.to_digits(a) + self.to_digits(b)) % self.p)

    def neg(self, a):
        if self.deg == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self._neg[a]

    def sub(self, a, b):
        if self.deg == 1:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        return self.add(a, self._neg[b])

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.deg == 1:
            return (a * b) % self.p
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        n = self.order - 1
        return self.exp[(n - self.log[a]) % n]

    def power(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        n = self.order - 1
        if k == 0:
            return np.ones_like(a)
        out = self.exp[(self.log[a] * (k % n)) % n] if n > 0 else a
        if k < 0 and np.any(a == 0):
            raise DivisionByZero("negative power of zero")
        return np.where(a == 0, 0, out)

    def frob(self, a, i: int = 1):
        return self.power(a, self.p ** (i % self.deg) if self.deg else 1)

    def sum(self, a, axis=0):
        """Field sum along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.deg == 1:
            return a.sum(axis=axis) % self.p
        return self.from_digits(self.to_digits(a).sum(axis=axis) % self.p)

    def matmul(self, A, B):
        """Matrix product over the field, exact via float64 BLAS on digit planes."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        p, d = self.p, self.deg
        inner = A.shape[-1]
        if inner == 0:
            return np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
        bound = inner * (p - 1) ** 2 * d * (1 + (p - 1) * d) ** (d - 1)
        if d == 1:
            if bound < 2 ** 40:
                return _fmod_int(A.astype(np.float64) @ B.astype(np.float64), p).astype(np.int64)
            return (A.astype(object) @ B.astype(object) % p).astype(np.int64)
        dtype = np.float64 if bound < 2 ** 40 else object
        Ad = [np.ascontiguousarray(x).astype(dtype) for x in np.moveaxis(self.to_digits(A), -1, 0)]
        Bd = [np.ascontiguousarray(x).astype(dtype) for x in np.moveaxis(self.to_digits(B), -1, 0)]
        acc = [None] * (2 * d - 1)
        for i in range(d):
            for j in range(d):
                term = Ad[i] @ Bd[j]
                acc[i + j] = term if acc[i + j] is None else acc[i + j] + term
        planes = acc
        mod = self.modulus
        for k in range(2 * d - 2, d - 1, -1):
            c = planes[k]
            for j in range(d):
                if mod[j]:
                    planes[k - d + j] = planes[k - d + j] - c * mod[j]
        if dtype is object:
            return self.from_digits(np.stack([(x % p).astype(np.int64) for x in planes[:d]], axis=-1))
        out = np.zeros(planes[0].shape, dtype=np.float64)
        for j in range(d - 1, -1, -1):
            out = out * p + _fmod_int(planes[j], p)
        return out.astype(np.int64)

    def polymul(self, a, b):
        """Product of two coefficient vectors (univariate convolution)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.deg == 1:
            return np.convolve(a, b) % self.p
        A = self.to_digits(a).T
        B = self.to_digits(b).T
        d, p = self.deg, self.p
        planes = [np.zeros(len(a) + len(b) - 1, dtype=np.int64) for _ in range(2 * d - 1)]
        for i in range(d):
            for j in range(d):
                planes[i + j] += np.convolve(A[i], B[j])
        planes = [x % p for x in planes]
        mod = self.modulus
        for k in range(2 * d - 2, d - 1, -1):
            for j in range(d):
                if mod[j]:
                    planes[k - d + j] = (planes[k - d + j] - planes[k] * mod[j]) % p
        return self.from_digits(np.stack(planes[:d], axis=-1))

    def __repr__(self) -> str:
        return f"GF({self.name}, modulus={self.modulus})"


@dataclass(frozen=True)
class FieldSpec:
    """F_p inside F_q inside F_{q^2} with fixed defining polynomials."""

    p: int
    f: int
    q_modulus: tuple[int, ...]
    q2_modulus: tuple[int, ...]
    q2_generator: tuple[int, ...]
    base: GF = field(compare=False, repr=False)
    fq: GF = field(compare=False, repr=False)
    fq2: GF = field(compare=False, repr=False)
    embedding: np.ndarray = field(compare=False, repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.f

    def level(self, which: str) -> GF:
        return {"base": self.base, "q": self.fq, "q2": self.fq2}[which]

    def embed(self, a):
        """Image of packed F_q elements in F_{q^2}."""
        return self.embedding[np.asarray(a, dtype=np.int64)]

    def element(self, value, which: str = "q") -> "FieldElement":
        lvl = self.level(which)
        if isinstance(value, (tuple, list)):
            packed = lvl.pack(value)
        else:
            packed = int(value) % lvl.order if lvl.deg == 1 else int(value)
        return FieldElement(lvl.coeffs(packed), which, self)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "f": self.f,
            "q_modulus": list(self.q_modulus),
            "q2_modulus": list(self.q2_modulus),
            "q2_generator": list(self.q2_generator),
        }


@functools.lru_cache(maxsize=None)
def field_build(p: int, f: int) -> FieldSpec:
    """Build the field tower for ``q = p**f``.

    Defining polynomials are the smallest monic irreducibles in packed order
    (the packed integer ``sum(c_j p^j)`` of the non-leading coefficients).
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if f < 1:
        raise FieldError("extension degree must be >= 1")
    q = p ** f
    if q * q > Q2_CAP:
        raise FieldTooLarge(f"q^2 = {q * q} exceeds the cap {Q2_CAP}")
    base = GF(p, (0, 1), name=f"F_{p}")
    q_mod = smallest_irreducible(f, p)
    q2_mod = smallest_irreducible(2 * f, p)
    fq = GF(p, q_mod, name=f"F_{q}")
    fq2 = GF(p, q2_mod, name=f"F_{q * q}")
    # embed F_q: send the class of t to the root of q_mod with smallest dlog
    roots = []
    for x in range(fq2.order):
        acc = 0
        for c in reversed(q_mod):
            acc = int(fq2.add(fq2.mul(acc, x), c))
        if acc == 0:
            roots.append(x)
    beta = min(roots, key=lambda x: (fq2.log[x] if x else -1))
    powers = [1]
    for _ in range(1, f):
        powers.append(int(fq2.mul(powers[-1], beta)))
    emb = np.zeros(fq.order, dtype=np.int64)
    for a in range(fq.order):
        acc = 0
        for c, bp in zip(fq.coeffs(a), powers):
            acc = int(fq2.add(acc, fq2.mul(c, bp)))
        emb[a] = acc
    emb.setflags(write=False)
    return FieldSpec(p, f, q_mod, q2_mod, fq2.coeffs(fq2.generator), base, fq, fq2, emb)


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, ...]
    which_field: str
    spec: FieldSpec = field(repr=False)

    @property
    def gf(self) -> GF:
        return self.spec.level(self.which_field)

    @property
    def value(self) -> int:
        return self.gf.pack(self.coeffs)

    def _wrap(self, packed) -> "FieldElement":
        return FieldElement(self.gf.coeffs(int(packed)), self.which_field, self.spec)

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"not a field element: {other!r}")
        if other.which_field != self.which_field or other.spec != self.spec:
            raise FieldMismatch(f"{self.which_field} vs {other.which_field}")

    def __add__(self, other):
        self._check(other)
        return self._wrap(self.gf.add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return self._wrap(self.gf.sub(self.value, other.value))

    def __neg__(self):
        return self._wrap(self.gf.neg(self.value))

    def __mul__(self, other):
        self._check(other)
        return self._wrap(self.gf.mul(self.value, other.value))

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return self._wrap(self.gf.inv(self.value))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, k: int):
        """Square-and-multiply."""
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self._wrap(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self) -> str:
        return f"{self.which_field}{list(self.coeffs)}"


def arith(a: FieldElement, b: FieldElement | None = None, op: str = "add", k: int | None = None) -> FieldElement:
    """Dispatch ``op`` in {add, mul, inv, pow, neg}; ``pow`` takes exponent ``k``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if op == "pow":
        if k is None:
            raise ValueError("pow needs an exponent")
        return a ** k
    raise ValueError(f"unknown op {op!r}")


def frobenius(a: FieldElement, i: int = 1) -> FieldElement:
    """``a ** (p ** i)``."""
    gf = a.gf
    return a._wrap(gf.power(a.value, a.spec.p ** (i % gf.deg)))


def dlog(a: FieldElement) -> int:
    """Exponent of ``a`` to the base ``q2_generator``; F_q elements are embedded first."""
    spec = a.spec
    if a.is_zero():
        raise ZeroElement("dlog of zero")
    if a.which_field == "q2":
        v = a.value
    elif a.which_field == "q":
        v = int(spec.embed(a.value))
    else:
        v = int(spec.embed(spec.fq.pack(a.coeffs)))
    return int(spec.fq2.log[v])


def all_elements(spec: FieldSpec, which: str = "q") -> list[FieldElement]:
    lvl = spec.level(which)
    return [FieldElement(lvl.coeffs(x), which, spec) for x in range(lvl.order)]


def monomial_exponents(shape: Sequence[int]) -> np.ndarray:
    """All index tuples of an array with ``shape`` in C order."""
    return np.array(list(itertools.product(*[range(s) for s in shape])), dtype=np.int64).reshape(-1, len(shape))
