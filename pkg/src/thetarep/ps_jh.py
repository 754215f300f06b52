"""Composition factors of principal series and the hypercube pictures around them.

A λ-tuple assigns to each embedding ``i`` one of four affine expressions in
the digit ``x_i``: ``X = x``, ``XM1 = x - 1``, ``PM2 = p - 2 - x`` and
``PM1 = p - 1 - x``.  The tuples allowed by the adjacency rule are in
bijection with subsets of ``{0, ..., f-1}`` through ``S(λ)``, the positions
holding ``XM1`` or ``PM1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import brauer
from .exact_modules import BoundViolated, check_bound, pack_exponent, pseries_params
from .gf_core import FieldSpec, field_build

__all__ = [
    "NonGeneric", "LambdaTuple", "PSeries", "HypercubeGraph", "JHFactor", "JHResult",
    "enumerate_lambda", "lambda_for_subset", "socle_layers", "jh_factors", "hypercube", "is_generic", "lambda_twist",
    "jh_character_matches", "jh_socle_dot", "conjectural_dot",
    "hypercube_vx", "conjectural_f2_grouping", "Diamond", "digits_of", "oracle_twists",
]

SYMBOLS = ("X", "XM1", "PM2", "PM1")
_AFTER_LOW = {"X", "PM2"}   # allowed after X or XM1
_AFTER_HIGH = {"PM1", "XM1"}  # allowed after PM2 or PM1


class NonGeneric(ValueError):
    pass


def _subset_key(s: Iterable[int]) -> tuple:
    s = tuple(sorted(s))
    return (len(s), s)


@dataclass(frozen=True)
class LambdaTuple:
    entries: tuple[str, ...]

    @property
    def f(self) -> int:
        return len(self.entries)

    @property
    def subset(self) -> frozenset[int]:
        return frozenset(i for i, s in enumerate(self.entries) if s in ("PM1", "XM1"))

    @property
    def length(self) -> int:
        return len(self.subset)

    def is_valid(self) -> bool:
        f = self.f
        for i, s in enumerate(self.entries):
            nxt = self.entries[(i + 1) % f]
            if s in ("X", "XM1") and nxt not in _AFTER_LOW:
                return False
            if s in ("PM2", "PM1") and nxt not in _AFTER_HIGH:
                return False
        return True

    def apply(self, a: Sequence[int], p: int) -> tuple[int, ...]:
        val = {"X": lambda x: x, "XM1": lambda x: x - 1, "PM2": lambda x: p - 2 - x, "PM1": lambda x: p - 1 - x}
        return tuple(val[s](x) for s, x in zip(self.entries, a))

    def __str__(self) -> str:
        return "(" + ",".join(self.entries) + ")"


def enumerate_lambda(f: int, p: int | None = None) -> list[LambdaTuple]:
    """All admissible λ-tuples of length ``f``, ordered by their subsets."""
    if f < 1:
        raise ValueError("f must be >= 1")
    out = [LambdaTuple(t) for t in itertools.product(SYMBOLS, repeat=f)]
    out = [lam for lam in out if lam.is_valid()]
    return sorted(out, key=lambda lam: _subset_key(lam.subset))


def lambda_for_subset(X: Iterable[int], f: int) -> LambdaTuple:
    """The unique λ with S(λ) = X."""
    X = set(X)
    if not X <= set(range(f)):
        raise ValueError(f"{sorted(X)} is not a subset of range({f})")
    table = {(0, 0): "X", (0, 1): "PM2", (1, 0): "XM1", (1, 1): "PM1"}
    return LambdaTuple(tuple(table[(int(i in X), int((i + 1) % f in X))] for i in range(f)))


def socle_layers(tau: LambdaTuple, f: int | None = None) -> list[list[tuple[int, ...]]]:
    """Layer ``i`` holds the subsets containing S(τ) with i more elements."""
    f = tau.f if f is None else f
    base = tau.subset
    layers = []
    for i in range(f - len(base) + 1):
        layer = [tuple(sorted(base | set(extra)))
                 for extra in itertools.combinations(sorted(set(range(f)) - base), i)]
        layers.append(sorted(layer))
    return layers


def digits_of(r: int, p: int, f: int) -> tuple[int, ...]:
    a = r % (p ** f - 1)
    return tuple((a // p ** i) % p for i in range(f))


@dataclass(frozen=True)
class PSeries:
    """ind_B^G(det^S ⊗ d^{r'}) with r' kept as a digit tuple."""

    S: int
    r_prime: tuple[int, ...]
    source: str = ""

    def r_prime_int(self, p: int) -> int:
        return pack_exponent(p, self.r_prime)

    def dim(self, q: int) -> int:
        return q + 1

    def pretty(self) -> str:
        return f"ind(det^{self.S} ⊗ d^{self.r_prime})"

    def to_json(self) -> dict:
        return {"S": self.S, "r_prime": list(self.r_prime), "source": self.source}


@dataclass(frozen=True)
class JHFactor:
    weight: tuple[int, ...]
    e: int | None
    lam: LambdaTuple
    provenance: str

    @property
    def dim(self) -> int:
        return int(np.prod([x + 1 for x in self.weight]))

    def pretty(self) -> str:
        w = "(" + ",".join(map(str, self.weight)) + ")"
        if self.e is None:
            return w + "⊗D^?"
        return w if self.e == 0 else f"{w}⊗D^{self.e}"

    def to_json(self) -> dict:
        return {"weight": list(self.weight), "det": self.e, "subset": sorted(self.lam.subset),
                "lambda": list(self.lam.entries), "provenance": self.provenance, "dim": self.dim}


@dataclass
class JHResult:
    p: int
    f: int
    r: int
    a: tuple[int, ...]
    generic: bool
    factors: list[JHFactor]
    notes: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return sum(x.dim for x in self.factors)

    def to_json(self) -> dict:
        return {"p": self.p, "f": self.f, "r": self.r, "a": list(self.a), "generic": self.generic,
                "factors": [x.to_json() for x in self.factors], "dim": self.dim, "notes": list(self.notes)}


def lambda_twist(lam: LambdaTuple, a: Sequence[int], p: int) -> int:
    """Determinant twist attached to λ, reduced mod q - 1.

    Half of sum p^i (x_i - λ_i(x)), plus (q - 1)/2 when the last entry is
    of the form p - c - x.  The numerator is always even.
    """
    q = p ** len(a)
    num = sum(p ** i * (x - y) for i, (x, y) in enumerate(zip(a, lam.apply(a, p))))
    if lam.entries[-1] in ("PM2", "PM1"):
        num += q - 1
    assert num % 2 == 0
    return (num // 2) % (q - 1)


def is_generic(a: Sequence[int], p: int) -> bool:
    f = len(a)
    if not any(a):
        return False
    if f == 1:
        return True
    return all(1 <= x <= p - 2 for x in a)


def oracle_twists(weights: Sequence[tuple[int, ...]], S: int, r_prime: int, spec: FieldSpec,
                  limit: int = 16) -> list[tuple[int, ...]]:
    """Every twist assignment whose characters sum to ind(det^S ⊗ d^{r'}).

    A backtracking search over the split-torus multiplicities prunes the
    candidates; survivors are confirmed on the non-split torus too, which
    together with the split torus meets every p-regular class.
    """
    q = spec.q
    target = brauer.induced_profile(S, r_prime, spec)
    profs = [brauer.weight_profile(tuple(w), spec) for w in weights]
    order = sorted(range(len(weights)), key=lambda i: -profs[i].dim)
    found: list[tuple[int, ...]] = []
    choice = [0] * len(weights)

    def rec(pos: int, resid: np.ndarray) -> None:
        if len(found) >= limit:
            return
        if pos == len(order):
            if not resid.any():
                total = None
                for i, w in enumerate(weights):
                    pr = profs[i].twist(choice[i], q)
                    total = pr if total is None else total + pr
                if np.array_equal(total.nonsplit, target.nonsplit):
                    found.append(tuple(choice))
            return
        i = order[pos]
        for e in range(q - 1):
            sh = np.roll(profs[i].split, (e, e), axis=(0, 1))
            rest = resid - sh
            if (rest >= 0).all():
                choice[i] = e
                rec(pos + 1, rest)

    rec(0, target.split.copy())
    return found


def jh_factors(r: int, p: int, f: int, verify: bool = False) -> JHResult:
    """Composition factors of ind(d^r), one per admissible λ."""
    q = p ** f
    a = digits_of(r, p, f)
    generic = is_generic(a, p)
    notes = [] if generic else ["non-generic: factor list not guaranteed"]
    lams = enumerate_lambda(f, p)
    raw = [(lam, lam.apply(a, p)) for lam in lams]
    kept = [(lam, w) for lam, w in raw if all(x >= 0 for x in w)]
    if len(kept) < len(raw):
        notes.append(f"dropped {len(raw) - len(kept)} weights with negative entries")
    factors = [JHFactor(w, lambda_twist(lam, a, p), lam, "closed-form") for lam, w in kept]
    if f >= 3:
        # the closed form is checked against the induced character; on a
        # mismatch the twists are searched for directly
        trial = JHResult(p, f, r, a, generic, factors)
        if jh_character_matches(trial):
            factors = [JHFactor(x.weight, x.e, x.lam, "oracle-determined") for x in factors]
        else:
            spec = field_build(p, f)
            sols = oracle_twists([w for _, w in kept], 0, pack_exponent(p, a), spec)
            if len(sols) == 1:
                factors = [JHFactor(w, e, lam, "oracle-determined") for (lam, w), e in zip(kept, sols[0])]
            else:
                notes.append(f"{len(sols)} twist assignments match; twists left open"
                             if sols else "no twist assignment matches the induced character")
                factors = [JHFactor(w, None, lam, "undetermined") for lam, w in kept]
    res = JHResult(p, f, r, a, generic, factors, notes)
    if verify:
        res.notes.append("character check: " + ("PASS" if jh_character_matches(res) else "FAIL"))
    return res


def jh_character_matches(res: JHResult) -> bool:
    """Compare torus multiplicities, which pin down the Brauer character."""
    if any(x.e is None for x in res.factors):
        return False
    spec = field_build(res.p, res.f)
    total = None
    for x in res.factors:
        pr = brauer.weight_profile(x.weight, spec).twist(x.e, spec.q)
        total = pr if total is None else total + pr
    target = brauer.induced_profile(0, pack_exponent(res.p, res.a), spec)
    return total is not None and bool(np.array_equal(total.split, target.split)
                                      and np.array_equal(total.nonsplit, target.nonsplit))


def jh_socle_dot(res: JHResult) -> str:
    """DOT of the factors arranged on the subset hypercube."""
    by_subset = {tuple(sorted(x.lam.subset)): x for x in res.factors}
    g = hypercube(res.f)
    lines = [f'digraph "jh_p{res.p}_f{res.f}_r{res.r}" {{']
    for v in g.vertices:
        lab = by_subset[v].pretty() if v in by_subset else "dropped"
        lines.append(f'  {_node(v)} [label="{lab}"];')
    for u, v in g.edges:
        lines.append(f"  {_node(u)} -> {_node(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- hypercube graphs -----------------------------------------------------------

def _node(v: Sequence[int]) -> str:
    return "X_" + ("_".join(map(str, v)) if v else "empty")


@dataclass
class HypercubeGraph:
    f: int
    vertices: list[tuple[int, ...]]
    edges: list[tuple[tuple[int, ...], tuple[int, ...]]]
    labels: dict = field(default_factory=dict)

    def to_dot(self, name: str = "hypercube") -> str:
        lines = [f'digraph "{name}" {{']
        for v in self.vertices:
            lab = self.labels.get(v)
            text = lab.pretty() if hasattr(lab, "pretty") else ("{" + ",".join(map(str, v)) + "}")
            lines.append(f'  {_node(v)} [label="{text}"];')
        for u, v in self.edges:
            lines.append(f"  {_node(u)} -> {_node(v)};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "f": self.f,
            "vertices": [list(v) for v in self.vertices],
            "edges": [[list(u), list(v)] for u, v in self.edges],
            "labels": {_node(v): (lab.to_json() if hasattr(lab, "to_json") else lab)
                       for v, lab in self.labels.items()},
        }


def hypercube(f: int) -> HypercubeGraph:
    verts = sorted((tuple(c) for k in range(f + 1) for c in itertools.combinations(range(f), k)),
                   key=_subset_key)
    edges = [(u, tuple(sorted(u + (i,)))) for u in verts for i in range(f) if i not in u]
    edges.sort(key=lambda e: (_subset_key(e[0]), _subset_key(e[1])))
    return HypercubeGraph(f, verts, edges)


def hypercube_vx(r: Sequence[int], p: int, m_cap: int = 1, force: bool = False) -> HypercubeGraph:
    """Hypercube whose vertex X carries the principal series of the cell j = 1_X."""
    r = tuple(int(x) for x in r)
    f = len(r)
    if not force:
        need = m_cap + m_cap * p ** f + p ** f
        if any(x < need for x in r):
            raise BoundViolated(f"need every r_i >= {need}, got {r}")
    g = hypercube(f)
    for v in g.vertices:
        j = tuple(int(i in v) for i in range(f))
        S, rp = pseries_params(p, r, j)
        g.labels[v] = PSeries(S, rp, source=f"theta cell j={j}")
    return g


# -- conjectural f = 2 arrangement -----------------------------------------------

@dataclass(frozen=True)
class Diamond:
    top: tuple[tuple[int, ...], int]
    left: tuple[tuple[int, ...], int]
    right: tuple[tuple[int, ...], int]
    bottom: tuple[tuple[int, ...], int]

    def nodes(self) -> list[tuple[tuple[int, ...], int]]:
        return [self.top, self.left, self.right, self.bottom]

    def to_json(self) -> dict:
        return {k: {"weight": list(w), "det": e} for k, (w, e) in
                zip(("top", "left", "right", "bottom"), self.nodes())}


def conjectural_f2_grouping(a0: int, a1: int, p: int) -> list[Diamond]:
    """Four diamonds of a possible arrangement of V_r/V_r** for f = 2 (CONJECTURAL)."""
    bad = {0, 1, p - 2, p - 1}
    if a0 in bad or a1 in bad:
        raise NonGeneric(f"need a_0, a_1 outside {{0, 1, p-2, p-1}}, got ({a0}, {a1})")
    q = p * p
    a = a0 + a1 * p
    n = lambda w, e: (tuple(w), e % (q - 1))
    return [
        Diamond(n((p - a0, p - a1), a), n((a0 - 2, p - 1 - a1), (1 + a1) * p + 1),
                n((p - 1 - a0, a1 - 2), 1 + a0 + p), n((a0 - 1, a1 - 1), p + 1)),
        Diamond(n((p - a0, p - 2 - a1), a + p), n((a0 - 2, p - 3 - a1), (2 + a1) * p + 1),
                n((p - 1 - a0, a1), 1 + a0), n((a0 - 1, a1 + 1), 1)),
        Diamond(n((p - 2 - a0, p - a1), a + 1), n((a0, p - 1 - a1), (1 + a1) * p),
                n((p - 3 - a0, a1 - 2), 2 + a0 + p), n((a0 + 1, a1 - 1), p)),
        Diamond(n((p - 2 - a0, p - 2 - a1), a + p + 1), n((a0, p - 3 - a1), (2 + a1) * p),
                n((p - 3 - a0, a1), 2 + a0), n((a0 + 1, a1 + 1), 0)),
    ]


def conjectural_dot(diamonds: list[Diamond], p: int) -> str:
    lines = [f'digraph "conjectural_f2_p{p}" {{', '  label="CONJECTURAL";']
    for k, d in enumerate(diamonds):
        names = [f"d{k}_{pos}" for pos in ("top", "left", "right", "bottom")]
        for nm, (w, e) in zip(names, d.nodes()):
            lines.append(f'  {nm} [label="({w[0]},{w[1]})⊗D^{e}"];')
        lines += [f"  {names[3]} -> {names[1]};", f"  {names[3]} -> {names[2]};",
                  f"  {names[1]} -> {names[0]};", f"  {names[2]} -> {names[0]};"]
    lines.append("}")
    return "\n".join(lines) + "\n"
