"""Dense exact linear algebra over a :class:`~thetarep.gf_core.GF` level.

Vectors are rows.  A :class:`Subspace` keeps its basis in reduced row-echelon
form (leftmost pivots), so two subspaces are equal exactly when their bases
are.  Subspaces may carry a grading: an integer label per ambient coordinate
such that every basis row is supported on a single label.  Torus-stable
subspaces of monomial spaces are graded by torus weight, which splits one
large elimination into many small ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf_core import GF

__all__ = ["AmbientMismatch", "rref", "rank", "solve", "left_nullspace", "Subspace"]


class AmbientMismatch(ValueError):
    pass


def rref(gf: GF, A, with_pivots: bool = True):
    """Reduced row-echelon form of ``A``; zero rows are dropped."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    nrows, ncols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        piv = int(A[r, c])
        if piv != 1:
            A[r, c:] = gf.mul(A[r, c:], int(gf.inv(piv)))
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            sub = A[hit, c:]
            A[hit, c:] = gf.sub(sub, gf.mul(col[hit, None], A[r, c:][None, :]))
        pivots.append(c)
        r += 1
    A = A[:r]
    return (A, pivots) if with_pivots else A


def rank(gf: GF, A) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    # rank of the smaller side is cheaper to eliminate
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref(gf, A)[1])


def solve(gf: GF, M, b):
    """A solution ``x`` of ``M x = b`` or ``None`` when the system is inconsistent."""
    M = np.asarray(M, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    R, piv = rref(gf, np.hstack([M, b]))
    n = M.shape[1]
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = R[row, n]
    return x


def left_nullspace(gf: GF, A) -> np.ndarray:
    """Rows ``v`` with ``v @ A = 0``, in echelon form."""
    A = np.asarray(A, dtype=np.int64)
    k, n = A.shape
    R, piv = rref(gf, np.hstack([A, np.eye(k, dtype=np.int64)]))
    keep = [i for i, c in enumerate(piv) if c >= n]
    if not keep:
        return np.zeros((0, k), dtype=np.int64)
    return rref(gf, R[keep, n:], with_pivots=False)


def _row_labels(rows: np.ndarray, labels: np.ndarray) -> np.ndarray | None:
    """The label of each row, or ``None`` if some row mixes labels."""
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    nz = rows != 0
    first = np.argmax(nz, axis=1)
    lab = labels[first]
    mixed = nz & (labels[None, :] != lab[:, None])
    if mixed.any():
        return None
    return lab


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of ``gf ** n`` in canonical echelon form."""

    gf: GF
    n: int
    rows: np.ndarray
    pivots: tuple[int, ...]
    key: object = None
    labels: np.ndarray | None = None

    @classmethod
    def from_rows(cls, gf: GF, rows, n: int | None = None, key=None, labels=None) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1) if rows.size else rows.reshape(0, n or 0)
        if n is None:
            n = rows.shape[1]
        rows = rows.reshape(-1, n)
        rows = rows[np.any(rows != 0, axis=1)]
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            lab = _row_labels(rows, labels)
            if lab is not None:
                return cls._graded(gf, n, rows, lab, key, labels)
        R, piv = rref(gf, rows)
        return cls(gf, n, R, tuple(piv), key, None)

    @classmethod
    def _graded(cls, gf, n, rows, row_lab, key, labels) -> "Subspace":
        blocks, pivs = [], []
        for lab in np.unique(row_lab):
            cols = np.flatnonzero(labels == lab)
            R, piv = rref(gf, rows[row_lab == lab][:, cols])
            full = np.zeros((R.shape[0], n), dtype=np.int64)
            full[:, cols] = R
            blocks.append(full)
            pivs.extend(int(cols[c]) for c in piv)
        if not blocks:
            return cls(gf, n, np.zeros((0, n), dtype=np.int64), (), key, labels)
        R = np.vstack(blocks)
        order = np.argsort(pivs, kind="stable")
        return cls(gf, n, R[order], tuple(int(pivs[i]) for i in order), key, labels)

    @classmethod
    def zero(cls, gf: GF, n: int, key=None, labels=None) -> "Subspace":
        return cls(gf, n, np.zeros((0, n), dtype=np.int64), (), key, labels)

    @classmethod
    def full(cls, gf: GF, n: int, key=None, labels=None) -> "Subspace":
        return cls(gf, n, np.eye(n, dtype=np.int64), tuple(range(n)), key, labels)

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def _check(self, other: "Subspace") -> None:
        if self.n != other.n or self.gf is not other.gf or self.key != other.key:
            raise AmbientMismatch("subspaces live in different ambient spaces")

    def _labels_with(self, other: "Subspace"):
        if self.labels is not None and other.labels is not None:
            return self.labels
        return None

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace.from_rows(self.gf, np.vstack([self.rows, other.rows]), self.n,
                                  self.key, self._labels_with(other))

    def reduce(self, X) -> np.ndarray:
        """Remainder of each row of ``X`` modulo this subspace (zero iff contained)."""
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.n)
        if self.dim == 0:
            return X
        coeff = X[:, list(self.pivots)]
        return self.gf.sub(X, self.gf.matmul(coeff, self.rows))

    def contains(self, other) -> bool:
        X = other.rows if isinstance(other, Subspace) else other
        if isinstance(other, Subspace):
            self._check(other)
        return not np.any(self.reduce(X))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        self._check(other)
        return self.pivots == other.pivots and np.array_equal(self.rows, other.rows)

    __hash__ = None  # mutable-looking numpy payload; compare with ==

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus intersection, done label by label when both sides are graded."""
        self._check(other)
        labels = self._labels_with(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.gf, self.n, self.key, labels)
        if labels is None:
            return Subspace.from_rows(self.gf, _zassenhaus(self.gf, self.rows, other.rows), self.n, self.key)
        la = _row_labels(self.rows, labels)
        lb = _row_labels(other.rows, labels)
        parts = []
        for lab in np.intersect1d(la, lb):
            cols = np.flatnonzero(labels == lab)
            meet = _zassenhaus(self.gf, self.rows[la == lab][:, cols], other.rows[lb == lab][:, cols])
            full = np.zeros((meet.shape[0], self.n), dtype=np.int64)
            full[:, cols] = meet
            parts.append(full)
        rows = np.vstack(parts) if parts else np.zeros((0, self.n), dtype=np.int64)
        return Subspace.from_rows(self.gf, rows, self.n, self.key, labels)

    def quotient_dim(self, other: "Subspace") -> int:
        """dim(self + other) - dim(other)."""
        return (self + other).dim - other.dim

    def restrict_dims(self) -> dict[int, int]:
        """Dimension of each graded piece."""
        if self.labels is None:
            raise ValueError("subspace is not graded")
        lab = self.labels[list(self.pivots)]
        vals, counts = np.unique(lab, return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, n={self.n}, field={self.gf.name})"


def _zassenhaus(gf: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    n = A.shape[1]
    top = np.hstack([A, A])
    bot = np.hstack([B, np.zeros_like(B)])
    R, piv = rref(gf, np.vstack([top, bot]))
    keep = [i for i, c in enumerate(piv) if c >= n]
    return R[keep, n:]
