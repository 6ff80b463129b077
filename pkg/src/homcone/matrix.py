"""Numeric storage and elementary algebra on homogeneous chordal patterns.

Matrices are stored column-compressed: column j holds the diagonal entry
followed by the entries on the ancestor chain of j, so every kernel reads
exactly the (j, ancestors-of-j) slices it recurses over.  A ``Structure``
compiles a pattern plus a trivially perfect elimination ordering into those
slice tables once; symmetric (:class:`SymSparse`) and lower-triangular
(:class:`LowerSparse`) values share it.

General chordal orderings are rejected at construction: the closure
properties used by every operation here (triangular products and inverses
staying inside the pattern) fail for them.

Values are 64-bit floats.  All objects are immutable in practice: no
operation writes to its inputs, so concurrent use is safe.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from .errors import OrderingError, SingularFactor, StructuralError
from .pattern import (
    EliminationTree,
    Ordering,
    OrderingClass,
    SparsityPattern,
    SupernodePartition,
    build_etree,
    lbfs_order,
    supernode_partition,
    verify_ordering,
)

__all__ = [
    "Structure",
    "SymSparse",
    "LowerSparse",
    "project",
    "inner",
    "norm",
    "tri_mul",
    "tri_inverse",
    "to_dense",
    "from_triplets",
    "identity",
    "zeros",
]


class Structure:
    """Pattern + ordering + elimination tree compiled to column tables.

    Internally everything runs in position space (ordering applied), where
    ancestors of a column sit at strictly larger positions, so ascending
    position order is a topological order of the tree.

    Attributes
    ----------
    bar_ptr, bar_rows : column j occupies ``bar_rows[bar_ptr[j]:bar_ptr[j+1]]``,
        which is ``[j, parent(j), parent^2(j), ...]`` in position space.
    depth : number of ancestors per position (= subdiagonal count).
    weights : 1.0 on diagonal slots, 2.0 on subdiagonal slots; makes the
        trace inner product a plain weighted dot.
    """

    __slots__ = (
        "pattern", "ordering", "etree", "n", "nnz",
        "pos_parent", "pos_children", "depth",
        "bar_ptr", "bar_rows", "weights",
        "_row_vertex", "_col_vertex", "_snodes",
    )

    def __init__(self, pattern: SparsityPattern, ordering: Ordering,
                 etree: Optional[EliminationTree] = None):
        if verify_ordering(pattern, ordering) is not OrderingClass.TRIVIALLY_PERFECT_PEO:
            raise OrderingError(
                "structure requires a trivially perfect elimination ordering; "
                "run lbfs_order or homogeneous_extension first")
        if etree is None:
            etree = build_etree(pattern, ordering)
        n = pattern.n
        sigma = ordering.sigma
        pos = ordering.sigma_inv
        pos_parent = [pos[etree.parent[sigma[q]]] for q in range(n)]
        children: list[list[int]] = [[] for _ in range(n)]
        for q, p in enumerate(pos_parent):
            if p != q:
                if p < q:
                    raise OrderingError("elimination tree points below the diagonal")
                children[p].append(q)
        depth = [0] * n
        for q in range(n - 1, -1, -1):
            p = pos_parent[q]
            if p != q:
                depth[q] = depth[p] + 1
        bar_ptr = np.zeros(n + 1, dtype=np.int64)
        for q in range(n):
            bar_ptr[q + 1] = bar_ptr[q] + 1 + depth[q]
        nnz = int(bar_ptr[n]) - n
        bar_rows = np.empty(n + nnz, dtype=np.int64)
        col_ids = np.empty(n + nnz, dtype=np.int64)
        for q in range(n):
            w = q
            base = bar_ptr[q]
            for t in range(depth[q] + 1):
                bar_rows[base + t] = w
                w = pos_parent[w]
            col_ids[base:bar_ptr[q + 1]] = q
        weights = np.full(n + nnz, 2.0)
        weights[bar_ptr[:-1]] = 1.0
        sig = np.asarray(sigma, dtype=np.int64)
        self.pattern = pattern
        self.ordering = ordering
        self.etree = etree
        self.n = n
        self.nnz = nnz
        self.pos_parent = tuple(pos_parent)
        self.pos_children = tuple(tuple(c) for c in children)
        self.depth = tuple(depth)
        self.bar_ptr = bar_ptr
        self.bar_rows = bar_rows
        self.weights = weights
        self._row_vertex = sig[bar_rows]
        self._col_vertex = sig[col_ids]
        self._snodes = None

    @classmethod
    def from_pattern(cls, pattern: SparsityPattern) -> "Structure":
        """Recognize the pattern and build the structure from the ordering
        the search returns."""
        res = lbfs_order(pattern)
        if not res.accepted:
            raise OrderingError(
                "pattern is not homogeneous chordal "
                f"(recognition failed at pivot {res.pivot}); extend it first")
        return cls(pattern, res.ordering, res.etree)

    @property
    def dim(self) -> int:
        """Dimension of the symmetric matrix space on this pattern."""
        return self.n + self.nnz

    @property
    def supernodes(self) -> SupernodePartition:
        if self._snodes is None:
            self._snodes = supernode_partition(self.pattern, self.ordering, self.etree)
        return self._snodes

    def col(self, q: int) -> slice:
        return slice(int(self.bar_ptr[q]), int(self.bar_ptr[q + 1]))

    def slot(self, i: int, j: int) -> int:
        """Index of vertex pair (i, j) in the value array; diagonal for
        i == j.  Raises StructuralError when (i, j) is outside the pattern."""
        pos = self.ordering.sigma_inv
        qi, qj = pos[i], pos[j]
        if qi == qj:
            return int(self.bar_ptr[qj])
        lo, hi = (qi, qj) if qi < qj else (qj, qi)
        t = self.depth[lo] - self.depth[hi]
        idx = int(self.bar_ptr[lo]) + t
        if t <= 0 or self.bar_rows[idx] != hi:
            raise StructuralError(f"entry ({i},{j}) is not in the pattern")
        return idx

    def __eq__(self, other):
        return (self is other) or (
            isinstance(other, Structure)
            and self.pattern == other.pattern
            and self.ordering.sigma == other.ordering.sigma)

    def __hash__(self):
        return hash((self.pattern, self.ordering.sigma))

    def __repr__(self):
        return f"Structure(n={self.n}, nnz={self.nnz})"


def _check_same(a, b):
    if a.struct is not b.struct and a.struct != b.struct:
        raise StructuralError("operands live on different structures")


class _Values:
    """Shared plumbing for pattern-restricted value arrays."""

    __slots__ = ("struct", "vals")

    def __init__(self, struct: Structure, vals: np.ndarray):
        if vals.shape != (struct.dim,):
            raise StructuralError(
                f"value array has length {vals.shape}, structure needs {struct.dim}")
        self.struct = struct
        self.vals = np.asarray(vals, dtype=np.float64)

    @property
    def diag(self) -> np.ndarray:
        return self.vals[self.struct.bar_ptr[:-1]]

    def copy(self):
        return type(self)(self.struct, self.vals.copy())

    def __neg__(self):
        return type(self)(self.struct, -self.vals)

    def __add__(self, other):
        _check_same(self, other)
        return type(self)(self.struct, self.vals + other.vals)

    def __sub__(self, other):
        _check_same(self, other)
        return type(self)(self.struct, self.vals - other.vals)

    def __mul__(self, a: float):
        return type(self)(self.struct, self.vals * float(a))

    __rmul__ = __mul__

    def __truediv__(self, a: float):
        return type(self)(self.struct, self.vals / float(a))


class SymSparse(_Values):
    """Symmetric matrix restricted to the pattern (lower half stored)."""

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self)))


class LowerSparse(_Values):
    """Lower-triangular matrix (in position space) on the pattern."""

    @property
    def nonsingular(self) -> bool:
        return bool(np.all(self.diag != 0.0))


def identity(struct: Structure) -> SymSparse:
    v = np.zeros(struct.dim)
    v[struct.bar_ptr[:-1]] = 1.0
    return SymSparse(struct, v)


def zeros(struct: Structure, lower: bool = False):
    cls = LowerSparse if lower else SymSparse
    return cls(struct, np.zeros(struct.dim))


def project(dense: np.ndarray, struct: Structure, tol: float = 1e-12) -> SymSparse:
    """Orthogonal projection of a dense symmetric matrix onto the pattern:
    keep the diagonal and the entries on edges, drop everything else."""
    d = np.asarray(dense, dtype=np.float64)
    if d.shape != (struct.n, struct.n):
        raise StructuralError(f"dense matrix is {d.shape}, need ({struct.n},{struct.n})")
    scale = max(1.0, float(np.max(np.abs(d))) if d.size else 1.0)
    if float(np.max(np.abs(d - d.T))) > tol * scale:
        raise StructuralError("matrix is not symmetric within tolerance")
    ds = 0.5 * (d + d.T)
    return SymSparse(struct, ds[struct._row_vertex, struct._col_vertex])


def inner(x: _Values, y: _Values) -> float:
    """Trace inner product: sum of diagonal products plus twice the
    products over edges."""
    _check_same(x, y)
    return float(np.dot(x.struct.weights * x.vals, y.vals))


def norm(x: _Values) -> float:
    return float(np.sqrt(inner(x, x)))


def to_dense(x: _Values) -> np.ndarray:
    """Dense matrix in vertex labels.  SymSparse fills both triangles;
    LowerSparse fills only the (position-space) lower one, so its dense
    form is triangular only under an identity ordering."""
    s = x.struct
    d = np.zeros((s.n, s.n))
    d[s._row_vertex, s._col_vertex] = x.vals
    if isinstance(x, SymSparse):
        d[s._col_vertex, s._row_vertex] = x.vals
    return d


def from_triplets(struct: Structure, entries: Iterable[tuple[int, int, float]],
                  lower: bool = False):
    """Place (i, j, value) vertex triplets; any (i, j) outside the pattern
    raises StructuralError.  Duplicate slots are an error too."""
    v = np.zeros(struct.dim)
    filled = np.zeros(struct.dim, dtype=bool)
    for i, j, val in entries:
        k = struct.slot(i, j)
        if filled[k]:
            raise StructuralError(f"duplicate entry ({i},{j})")
        filled[k] = True
        v[k] = float(val)
    return (LowerSparse if lower else SymSparse)(struct, v)


def tri_mul(L: LowerSparse, Lt: LowerSparse) -> LowerSparse:
    """Exact product of two pattern-restricted lower triangles.  Stays in
    the pattern because each column's ancestor chain contains the chains
    of everything on it."""
    _check_same(L, Lt)
    s = L.struct
    ptr, rows = s.bar_ptr, s.bar_rows
    out = np.zeros(s.dim)
    lv, tv = L.vals, Lt.vals
    for k in range(s.n):
        a, b = int(ptr[k]), int(ptr[k + 1])
        seg = out[a:b]
        for t in range(b - a):
            c = tv[a + t]
            if c != 0.0:
                j = rows[a + t]
                seg[t:] += c * lv[ptr[j]:ptr[j + 1]]
    return LowerSparse(s, out)


def tri_inverse(L: LowerSparse) -> LowerSparse:
    """Inverse of a pattern-restricted lower triangle, column by column by
    substitution along the ancestor chain."""
    s = L.struct
    ptr, rows = s.bar_ptr, s.bar_rows
    out = np.zeros(s.dim)
    lv = L.vals
    for k in range(s.n):
        a, b = int(ptr[k]), int(ptr[k + 1])
        x = out[a:b]
        x[0] = 1.0
        for t in range(b - a):
            j = rows[a + t]
            ja = int(ptr[j])
            d = lv[ja]
            if d == 0.0:
                raise SingularFactor(column=s.ordering.sigma[j])
            x[t] /= d
            if x[t] != 0.0 and t + 1 < b - a:
                x[t + 1:] -= x[t] * lv[ja + 1:ptr[j + 1]]
    return LowerSparse(s, out)
