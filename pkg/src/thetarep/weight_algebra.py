"""Symbolic weights ``(m_0, ..., m_{f-1}) ⊗ det^e`` and Clebsch–Gordan rewrite rules.

A weight ``m`` stands for the GL_2(F_q) representation on polynomials that are
homogeneous of degree ``m_i`` in each variable pair ``(x_i, y_i)``, where block
``i`` is twisted by the ``i``-th power of Frobenius.  Every rule below returns a
normalised :class:`WeightSum`, so results can be compared as multisets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

__all__ = [
    "WeightError", "OutOfRange", "NotSplit", "PreconditionViolated",
    "Weight", "TensorTerm", "WeightSum", "PartialResult",
    "lucas_test", "split_step", "cg_general", "cg_small", "cg_large", "cg_cross_f2",
    "tensor_projective", "decompose", "weight_sum_from_json",
]


class WeightError(ValueError):
    pass


class OutOfRange(WeightError):
    pass


class NotSplit(WeightError):
    def __init__(self, msg: str, indices: Sequence[int] = ()):
        super().__init__(msg)
        self.indices = tuple(indices)


class PreconditionViolated(WeightError):
    pass


@dataclass(frozen=True, order=True)
class Weight:
    """A tuple of block degrees; ``m is None`` is the zero representation."""

    m: tuple[int, ...] | None

    @classmethod
    def of(cls, m: Iterable[int]) -> "Weight":
        m = tuple(int(x) for x in m)
        return cls(None) if any(x < 0 for x in m) else cls(m)

    @property
    def is_zero(self) -> bool:
        return self.m is None

    @property
    def is_trivial(self) -> bool:
        return self.m is not None and not any(self.m)

    @property
    def dim(self) -> int:
        return 0 if self.m is None else prod(x + 1 for x in self.m)

    def __str__(self) -> str:
        return "0" if self.m is None else "(" + ",".join(map(str, self.m)) + ")"


@dataclass(frozen=True, order=True)
class TensorTerm:
    factors: tuple[Weight, ...]
    e: int = 0

    @classmethod
    def of(cls, *factors, e: int = 0) -> "TensorTerm":
        return cls(tuple(f if isinstance(f, Weight) else Weight.of(f) for f in factors), e)

    @property
    def is_zero(self) -> bool:
        return any(w.is_zero for w in self.factors)

    @property
    def dim(self) -> int:
        return prod(w.dim for w in self.factors)

    @property
    def f(self) -> int:
        return len(self.factors[0].m)

    def normalize(self, q: int) -> "TensorTerm | None":
        """Drop trivial factors, sort the rest, reduce ``e`` mod ``q - 1``; ``None`` if zero."""
        if self.is_zero:
            return None
        f = self.f
        rest = sorted(w for w in self.factors if not w.is_trivial)
        if not rest:
            rest = [Weight((0,) * f)]
        return TensorTerm(tuple(rest), self.e % (q - 1))

    def pretty(self) -> str:
        s = "⊗".join(str(w) for w in self.factors)
        return s if self.e == 0 else f"{s}⊗D^{self.e}"

    def to_json(self) -> dict:
        return {"factors": [list(w.m) for w in self.factors], "det": self.e}


@dataclass(frozen=True)
class WeightSum:
    """Canonical multiset of tensor terms."""

    terms: tuple[TensorTerm, ...]
    q: int

    @classmethod
    def build(cls, terms: Iterable[TensorTerm], q: int) -> "WeightSum":
        out = [t.normalize(q) for t in terms]
        return cls(tuple(sorted(t for t in out if t is not None)), q)

    @property
    def dim(self) -> int:
        return sum(t.dim for t in self.terms)

    def __add__(self, other: "WeightSum") -> "WeightSum":
        return WeightSum.build(self.terms + other.terms, self.q)

    def twist(self, e: int) -> "WeightSum":
        return WeightSum.build((TensorTerm(t.factors, t.e + e) for t in self.terms), self.q)

    def is_reduced(self) -> bool:
        return all(len(t.factors) == 1 for t in self.terms)

    def pretty(self) -> str:
        return " ⊕ ".join(t.pretty() for t in self.terms) if self.terms else "0"

    def to_json(self) -> list[dict]:
        return [t.to_json() for t in self.terms]

    def __str__(self) -> str:
        return self.pretty()


@dataclass(frozen=True)
class PartialResult:
    """What the rules could not reduce: ``done`` is fully reduced, ``residual`` is not."""

    done: WeightSum
    residual: WeightSum
    notes: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.done.dim + self.residual.dim

    def pretty(self) -> str:
        return f"{self.done.pretty()}  [unresolved: {self.residual.pretty()}]"

    def to_json(self) -> dict:
        return {"done": self.done.to_json(), "residual": self.residual.to_json(), "notes": list(self.notes)}


def weight_sum_from_json(data: list[dict], q: int) -> WeightSum:
    return WeightSum.build((TensorTerm.of(*t["factors"], e=t["det"]) for t in data), q)


# -- rules --------------------------------------------------------------

def _digits(n: int, p: int) -> list[int]:
    out = []
    while n:
        out.append(n % p)
        n //= p
    return out


def lucas_test(p: int, n: int, k: int) -> bool:
    """True iff ``p`` does not divide ``C(n, k)``, by comparing base-``p`` digits."""
    if not 0 <= k <= n:
        raise OutOfRange(f"need 0 <= k <= n, got n={n}, k={k}")
    dn, dk = _digits(n, p), _digits(k, p)
    dn += [0] * (len(dk) - len(dn))
    return all(a <= b for a, b in zip(dk, dn))


def _tup(x) -> tuple[int, ...]:
    return tuple(int(v) for v in x)


def _unit(f: int, i: int, v: int = 1) -> tuple[int, ...]:
    return tuple(v if j == i else 0 for j in range(f))


def split_step(m: Sequence[int], i: int, n_i: int, p: int) -> WeightSum:
    """``m ⊗ n_i e_i = ((m - e_i) ⊗ (n_i - 1) e_i ⊗ det^{p^i}) ⊕ (m + n_i e_i)`` when it splits."""
    m = _tup(m)
    f = len(m)
    q = p ** f
    if m[i] < 1 or n_i < 1:
        raise PreconditionViolated("split_step needs m_i, n_i >= 1")
    if not lucas_test(p, m[i] + n_i, m[i]):
        raise NotSplit(f"p divides C({m[i] + n_i}, {m[i]})", [i])
    sub = TensorTerm.of(tuple(a - (j == i) for j, a in enumerate(m)), _unit(f, i, n_i - 1), e=p ** i)
    top = TensorTerm.of(tuple(a + (n_i if j == i else 0) for j, a in enumerate(m)))
    return WeightSum.build([sub, top], q)


def cg_general(m: Sequence[int], n: Sequence[int], p: int) -> WeightSum:
    """Sum over ``l`` in {0,1}^f of ``(m - l + (1-l)n) ⊗ (l n - l) ⊗ det^{Σ l_j p^j}``."""
    m, n = _tup(m), _tup(n)
    f = len(m)
    bad = [i for i in range(f) if not lucas_test(p, m[i] + n[i], n[i])]
    if bad:
        raise NotSplit(f"p divides C(m_i+n_i, n_i) at blocks {bad}", bad)
    terms = []
    for l in itertools.product((0, 1), repeat=f):
        a = [m[i] - l[i] + (1 - l[i]) * n[i] for i in range(f)]
        b = [l[i] * n[i] - l[i] for i in range(f)]
        terms.append(TensorTerm.of(a, b, e=sum(l[j] * p ** j for j in range(f))))
    return WeightSum.build(terms, p ** f)


def _check_sorted(m, n, p):
    if not all(0 <= a <= b <= p - 1 for a, b in zip(m, n)):
        raise PreconditionViolated("need 0 <= m_i <= n_i <= p-1")


def cg_small(m: Sequence[int], n: Sequence[int], p: int) -> WeightSum:
    m, n = _tup(m), _tup(n)
    _check_sorted(m, n, p)
    if any(a + b > p - 1 for a, b in zip(m, n)):
        raise PreconditionViolated("need m_i + n_i <= p-1")
    f = len(m)
    terms = []
    for k in itertools.product(*(range(a + 1) for a in m)):
        w = [m[i] + n[i] - 2 * k[i] for i in range(f)]
        terms.append(TensorTerm.of(w, e=sum(k[i] * p ** i for i in range(f))))
    return WeightSum.build(terms, p ** f)


def cg_large(m: Sequence[int], n: Sequence[int], p: int) -> WeightSum:
    m, n = _tup(m), _tup(n)
    _check_sorted(m, n, p)
    if any(not p - 2 <= a + b <= 2 * p - 2 for a, b in zip(m, n)):
        raise PreconditionViolated("need p-2 <= m_i + n_i <= 2p-2")
    f = len(m)
    terms = []
    for l in itertools.product((0, 1), repeat=f):
        a = [p - 2 - m[i] if l[i] else m[i] + n[i] - (p - 1) for i in range(f)]
        b = [p - 2 - n[i] if l[i] else p - 1 for i in range(f)]
        e = sum(l[i] * (m[i] + n[i] + 2 - p) * p ** i for i in range(f))
        terms.append(TensorTerm.of(a, b, e=e))
    return WeightSum.build(terms, p ** f)


def cg_cross_f2(m: Sequence[int], n: Sequence[int], p: int, mode: str) -> WeightSum:
    """The two mixed f = 2 cases: one block small, the other large."""
    m, n = _tup(m), _tup(n)
    if len(m) != 2:
        raise PreconditionViolated("cross rules are for f = 2")
    _check_sorted(m, n, p)
    m0, m1 = m
    n0, n1 = n
    s0, s1 = m0 + n0, m1 + n1
    if mode == "low-high":
        if not (s0 <= p - 1 and p - 2 <= s1 <= 2 * p - 2):
            raise PreconditionViolated("low-high needs m_0+n_0 <= p-1 and p-2 <= m_1+n_1 <= 2p-2")
        c = p * (s1 + 2 - p)
        terms = [
            TensorTerm.of((m0 - 1, p - m1 - 2), (n0 - 1, p - n1 - 2), e=c + 1),
            TensorTerm.of((s0, p - m1 - 2), (0, p - n1 - 2), e=c),
            TensorTerm.of((m0 - 1, s1 + 1 - p), (n0 - 1, p - 1), e=1),
            TensorTerm.of((s0, s1 + 1 - p), (0, p - 1)),
        ]
    elif mode == "high-low":
        if not (p - 2 <= s0 <= 2 * p - 2 and s1 <= p - 1):
            raise PreconditionViolated("high-low needs p-2 <= m_0+n_0 <= 2p-2 and m_1+n_1 <= p-1")
        c = s0 + 2 - p
        terms = [
            TensorTerm.of((p - m0 - 2, m1 - 1), (p - n0 - 2, n1 - 1), e=c + p),
            TensorTerm.of((p - m0 - 2, s1), (p - n0 - 2, 0), e=c),
            TensorTerm.of((s0 + 1 - p, m1 - 1), (p - 1, n1 - 1), e=p),
            TensorTerm.of((s0 + 1 - p, s1), (p - 1, 0)),
        ]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return WeightSum.build(terms, p * p)


def tensor_projective(m: Sequence[int], k: int, p: int) -> Weight:
    """``m ⊗ (p^k - 1)𝟙_f``: entry ``j`` of the result is ``(m_{j+k} + 1) p^k - 1``."""
    m = _tup(m)
    f = len(m)
    if k < 0:
        raise PreconditionViolated("k must be >= 0")
    return Weight.of((m[(j + k) % f] + 1) * p ** k - 1 for j in range(f))


# -- dispatcher -----------------------------------------------------------

def _projective_k(n: tuple[int, ...], p: int) -> int | None:
    """``k >= 1`` with ``n = (p^k - 1)𝟙``, if any."""
    v = n[0]
    if v < p - 1 or any(x != v for x in n):
        return None
    k, t = 0, v + 1
    while t % p == 0:
        t //= p
        k += 1
    return k if t == 1 and k >= 1 else None


def _pair_rules(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[str, WeightSum] | None:
    """First rule that rewrites ``a ⊗ b``; the result is a WeightSum without outer twist."""
    f = len(a)
    q = p ** f
    for x, y in ((a, b), (b, a)):
        k = _projective_k(y, p)
        if k is not None:
            return "projective", WeightSum.build([TensorTerm((tensor_projective(x, k, p),))], q)
    # fold blocks where one side is trivial into the factor that is larger on the shared blocks
    shared = [i for i in range(f) if min(a[i], b[i]) > 0]
    if [b[i] for i in shared] > [a[i] for i in shared]:
        a, b = b, a
    na = tuple(u + v if min(u, v) == 0 else u for u, v in zip(a, b))
    nb = tuple(0 if min(u, v) == 0 else v for u, v in zip(a, b))
    if sorted((na, nb)) != sorted((a, b)):
        return "trivial-blocks", WeightSum.build([TensorTerm.of(na, nb)], q)
    lo = tuple(min(u, v) for u, v in zip(a, b))
    hi = tuple(max(u, v) for u, v in zip(a, b))
    attempts = [("small", lambda: cg_small(lo, hi, p)), ("large", lambda: cg_large(lo, hi, p))]
    if f == 2:
        attempts += [("cross-low-high", lambda: cg_cross_f2(lo, hi, p, "low-high")),
                     ("cross-high-low", lambda: cg_cross_f2(lo, hi, p, "high-low"))]
    attempts.append(("general", lambda: cg_general(lo, hi, p)))
    same = WeightSum.build([TensorTerm.of(a, b)], q)
    for name, fn in attempts:
        try:
            out = fn()
        except (PreconditionViolated, NotSplit):
            continue
        if out != same:  # a rewrite back to the input is no progress
            return name, out
    for i in range(f):
        if lo[i] >= 1 and sum(1 for x in hi if x) > 1 and lucas_test(p, lo[i] + hi[i], lo[i]):
            rest = tuple(0 if j == i else x for j, x in enumerate(hi))
            step = split_step(lo, i, hi[i], p)
            terms = [TensorTerm(t.factors + (Weight(rest),), t.e) for t in step.terms]
            return f"split-step[{i}]", WeightSum.build(terms, q)
    return None


def _lucas_failures(t: TensorTerm, p: int) -> list[int]:
    fs = t.factors
    return sorted({b for i, j in itertools.combinations(range(len(fs)), 2) for b in range(len(fs[0].m))
                   if min(fs[i].m[b], fs[j].m[b]) > 0
                   and not lucas_test(p, fs[i].m[b] + fs[j].m[b], fs[i].m[b])})


def decompose(m: Sequence[int], n: Sequence[int], p: int, max_steps: int = 10_000) -> WeightSum | PartialResult:
    """Rewrite ``m ⊗ n`` with the first applicable rule, recursing on multi-factor terms."""
    m, n = _tup(m), _tup(n)
    if len(m) != len(n):
        raise PreconditionViolated("weights must have the same length")
    f = len(m)
    q = p ** f
    start = TensorTerm.of(m, n).normalize(q)
    todo = [start] if start is not None else []
    done: list[TensorTerm] = []
    stuck: list[TensorTerm] = []
    notes: list[str] = []
    seen: set[TensorTerm] = set()
    steps = 0
    while todo:
        t = todo.pop()
        if len(t.factors) == 1:
            done.append(t)
            continue
        steps += 1
        if steps > max_steps or t in seen:
            stuck.append(t)
            notes.append(f"rules cycle at {t.pretty()}; Lucas fails at blocks {_lucas_failures(t, p)}")
            continue
        seen.add(t)
        hit = None
        fs = t.factors
        for i, j in itertools.combinations(range(len(fs)), 2):
            hit = _pair_rules(fs[i].m, fs[j].m, p)
            if hit is not None:
                others = fs[:i] + fs[i + 1:j] + fs[j + 1:]
                break
        if hit is None:
            stuck.append(t)
            notes.append(f"no rule for {t.pretty()}; Lucas fails at blocks {_lucas_failures(t, p)}")
            continue
        for s in hit[1].terms:
            nt = TensorTerm(s.factors + others, s.e + t.e).normalize(q)
            if nt is not None:
                todo.append(nt)
    done_sum = WeightSum.build(done, q)
    if stuck:
        return PartialResult(done_sum, WeightSum.build(stuck, q), tuple(notes))
    return done_sum
