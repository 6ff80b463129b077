"""Multifrontal kernels on homogeneous chordal structures.

Every operation here is a single sweep over the elimination tree with small
dense frontal blocks: Cholesky factorization, the four triangular-congruence
applications (forward, adjoint, and their inverses), the projected inverse,
the maximum-determinant completion factor, and the log-det barrier values,
gradients, and Hessian applications built from them.

Zero fill is structural: results live on the same column layout as the
inputs, which is what trivially perfect orderings buy.  Factorization
success doubles as the interior membership test for the sparse PSD cone
(`cholesky`) and for the completable cone (`maxdet_factor`).

Kernels never modify their inputs; each call owns a private workspace, so
concurrent calls on shared inputs are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotCompletable, NotPositiveDefinite, SingularFactor, StructuralError
from .matrix import LowerSparse, Structure, SymSparse, _check_same

__all__ = [
    "CholFactor",
    "FrontalWorkspace",
    "cholesky",
    "forward_map",
    "adjoint_map",
    "inverse_forward_map",
    "inverse_adjoint_map",
    "projected_inverse",
    "maxdet_factor",
    "dual_gradient",
    "barrier",
    "dual_barrier",
    "hess_apply",
    "inv_hess_apply",
    "peak_frontal_footprint",
]

#: Pivot threshold separating a boundary matrix from roundoff noise.
PIVOT_EPS = 1e-13


@dataclass(frozen=True)
class CholFactor:
    """Triangular factor X = L L^T with positive diagonal."""

    L: LowerSparse

    @property
    def struct(self) -> Structure:
        return self.L.struct

    def logdet(self) -> float:
        """log det X = 2 sum(log L_ii)."""
        return 2.0 * float(np.sum(np.log(self.L.diag)))


class FrontalWorkspace:
    """Update-matrix store for one multifrontal sweep.

    Each node's block is pushed exactly once and popped exactly once (by
    the parent in a bottom-up sweep, by the children in a top-down one).
    Single-use: not shareable across threads or sweeps.
    """

    __slots__ = ("_pending",)

    def __init__(self):
        self._pending: dict = {}

    def push(self, node: int, block: np.ndarray) -> None:
        if node in self._pending:
            raise StructuralError(f"update block for node {node} pushed twice")
        self._pending[node] = block

    def pop(self, node: int) -> np.ndarray:
        return self._pending.pop(node)

    def drained(self) -> bool:
        return not self._pending


def peak_frontal_footprint(struct: Structure) -> int:
    """Largest number of floats simultaneously live in update blocks plus
    the current frontal block during a bottom-up sweep (symbolic)."""
    live = 0
    peak = 0
    for i in range(struct.n):
        d = struct.depth[i]
        peak = max(peak, live + (d + 1) ** 2)
        for c in struct.pos_children[i]:
            live -= (struct.depth[c]) ** 2
        live += d * d
    return peak


def _chain(struct: Structure, i: int):
    """Ancestor positions of column i (its subdiagonal row indices)."""
    a, b = int(struct.bar_ptr[i]), int(struct.bar_ptr[i + 1])
    return struct.bar_rows[a + 1:b]


def _chain_matvec(struct, lv, i, x):
    """y = L[anc(i), anc(i)] @ x using column slices of L."""
    y = np.zeros_like(x)
    ptr = struct.bar_ptr
    for t, j in enumerate(_chain(struct, i)):
        if x[t] != 0.0:
            y[t:] += x[t] * lv[ptr[j]:ptr[j + 1]]
    return y


def _chain_matvec_t(struct, lv, i, x):
    """y = L[anc(i), anc(i)].T @ x."""
    y = np.empty_like(x)
    ptr = struct.bar_ptr
    for t, j in enumerate(_chain(struct, i)):
        y[t] = np.dot(lv[ptr[j]:ptr[j + 1]], x[t:])
    return y


def _chain_solve(struct, lv, i, b):
    """Solve L[anc(i), anc(i)] y = b by forward substitution."""
    y = b.copy()
    ptr = struct.bar_ptr
    for t, j in enumerate(_chain(struct, i)):
        ja = int(ptr[j])
        d = lv[ja]
        if d == 0.0:
            raise SingularFactor(column=struct.ordering.sigma[j])
        y[t] /= d
        if y[t] != 0.0:
            y[t + 1:] -= y[t] * lv[ja + 1:ptr[j + 1]]
    return y


def _chain_solve_t(struct, lv, i, b):
    """Solve L[anc(i), anc(i)].T y = b by backward substitution."""
    y = b.copy()
    ptr = struct.bar_ptr
    chain = _chain(struct, i)
    for t in range(len(chain) - 1, -1, -1):
        j = chain[t]
        ja = int(ptr[j])
        d = lv[ja]
        if d == 0.0:
            raise SingularFactor(column=struct.ordering.sigma[j])
        y[t] = (y[t] - np.dot(lv[ja + 1:ptr[j + 1]], y[t + 1:])) / d
    return y


def cholesky(X: SymSparse, eps: float = PIVOT_EPS) -> CholFactor:
    """Zero-fill Cholesky factorization X = L L^T by a bottom-up sweep.

    At each node the frontal block is the node's column bordered by the
    children's update blocks; a pivot at or below ``eps * (1 + |X_ii|)``
    raises :class:`NotPositiveDefinite`, which is exactly the test for X
    lying in the interior of the sparse PSD cone.
    """
    s = X.struct
    xv = X.vals
    out = np.zeros(s.dim)
    ws = FrontalWorkspace()
    ptr = s.bar_ptr
    for i in range(s.n):
        d = s.depth[i]
        a = int(ptr[i])
        f = np.zeros((d + 1, d + 1))
        f[0, 0] = xv[a]
        f[1:, 0] = xv[a + 1:a + 1 + d]
        f[0, 1:] = f[1:, 0]
        for c in s.pos_children[i]:
            f += ws.pop(c)
        pivot = f[0, 0]
        if pivot <= eps * (1.0 + abs(xv[a])):
            raise NotPositiveDefinite(node=s.ordering.sigma[i], value=pivot)
        lii = math.sqrt(pivot)
        sub = f[1:, 0] / lii
        out[a] = lii
        out[a + 1:a + 1 + d] = sub
        if s.pos_parent[i] != i:
            ws.push(i, f[1:, 1:] - np.outer(sub, sub))
    return CholFactor(LowerSparse(s, out))


def forward_map(L: LowerSparse, X: SymSparse) -> SymSparse:
    """Y = L X L^T, exactly, staying on the pattern."""
    _check_same(L, X)
    s = L.struct
    lv, xv = L.vals, X.vals
    out = np.zeros(s.dim)
    ws = FrontalWorkspace()
    ptr = s.bar_ptr
    for i in range(s.n):
        d = s.depth[i]
        a = int(ptr[i])
        lii = lv[a]
        lsub = lv[a + 1:a + 1 + d]
        xii = xv[a]
        w = _chain_matvec(s, lv, i, xv[a + 1:a + 1 + d])
        f = np.empty((d + 1, d + 1))
        f[0, 0] = lii * lii * xii
        col = lii * (xii * lsub + w)
        f[1:, 0] = col
        f[0, 1:] = col
        f[1:, 1:] = xii * np.outer(lsub, lsub)
        f[1:, 1:] += np.outer(w, lsub)
        f[1:, 1:] += np.outer(lsub, w)
        for c in s.pos_children[i]:
            f -= ws.pop(c)
        out[a] = f[0, 0]
        out[a + 1:a + 1 + d] = f[1:, 0]
        if s.pos_parent[i] != i:
            ws.push(i, -f[1:, 1:])
    return SymSparse(s, out)


def adjoint_map(L: LowerSparse, S: SymSparse) -> SymSparse:
    """Y = projection of L^T S L onto the pattern (the adjoint of
    forward_map under the trace inner product)."""
    _check_same(L, S)
    st = L.struct
    lv, sv = L.vals, S.vals
    wv = np.zeros(st.dim)
    ws = FrontalWorkspace()
    ptr = st.bar_ptr
    for i in range(st.n - 1, -1, -1):
        d = st.depth[i]
        a = int(ptr[i])
        v = ws.pop(i) if st.pos_parent[i] != i else np.zeros((0, 0))
        lii = lv[a]
        lsub = lv[a + 1:a + 1 + d]
        sii = sv[a]
        ssub = sv[a + 1:a + 1 + d]
        vl = v @ lsub
        wv[a] = lii * lii * sii + 2.0 * lii * np.dot(lsub, ssub) + np.dot(lsub, vl)
        wv[a + 1:a + 1 + d] = lii * ssub + vl
        if st.pos_children[i]:
            vj = np.empty((d + 1, d + 1))
            vj[0, 0] = sii
            vj[1:, 0] = ssub
            vj[0, 1:] = ssub
            vj[1:, 1:] = v
            for c in st.pos_children[i]:
                ws.push(c, vj)
    out = np.zeros(st.dim)
    for i in range(st.n):
        a = int(ptr[i])
        d = st.depth[i]
        out[a] = wv[a]
        out[a + 1:a + 1 + d] = _chain_matvec_t(st, lv, i, wv[a + 1:a + 1 + d])
    return SymSparse(st, out)


def inverse_forward_map(L: LowerSparse, X: SymSparse) -> SymSparse:
    """Y = L^{-1} X L^{-T} without forming the inverse explicitly: the
    update blocks are rescaled so each node only divides by its own pivot
    and solves one chain system at the end."""
    _check_same(L, X)
    s = L.struct
    lv, xv = L.vals, X.vals
    wv = np.zeros(s.dim)
    ws = FrontalWorkspace()
    ptr = s.bar_ptr
    for i in range(s.n):
        d = s.depth[i]
        a = int(ptr[i])
        lii = lv[a]
        if lii == 0.0:
            raise SingularFactor(column=s.ordering.sigma[i])
        lsub = lv[a + 1:a + 1 + d]
        b00 = xv[a]
        b01 = xv[a + 1:a + 1 + d].copy()
        b22 = np.zeros((d, d))
        for c in s.pos_children[i]:
            vc = ws.pop(c)
            b00 -= vc[0, 0]
            b01 -= vc[1:, 0]
            b22 -= vc[1:, 1:]
        g00 = b00 / (lii * lii)
        g10 = (b01 - (b00 / lii) * lsub) / lii
        wv[a] = g00
        wv[a + 1:a + 1 + d] = g10
        if s.pos_parent[i] != i:
            # the d x d update consumed whole by the parent's frontal block
            ws.push(i, np.outer(g10, lsub) + np.outer(lsub, b01) / lii - b22)
    out = np.zeros(s.dim)
    for i in range(s.n):
        a = int(ptr[i])
        d = s.depth[i]
        out[a] = wv[a]
        out[a + 1:a + 1 + d] = _chain_solve(s, lv, i, wv[a + 1:a + 1 + d])
    return SymSparse(s, out)


def _pack_update(g00, g10, v22):
    d = len(g10)
    u = np.empty((d + 1, d + 1))
    u[0, 0] = g00
    u[1:, 0] = g10
    u[0, 1:] = g10
    u[1:, 1:] = v22
    return u


def inverse_adjoint_map(L: LowerSparse, S: SymSparse) -> SymSparse:
    """Y = projection of L^{-T} S L^{-1} onto the pattern."""
    _check_same(L, S)
    st = L.struct
    lv, sv = L.vals, S.vals
    wv = np.zeros(st.dim)
    ptr = st.bar_ptr
    for i in range(st.n):
        a = int(ptr[i])
        d = st.depth[i]
        wv[a] = sv[a]
        wv[a + 1:a + 1 + d] = _chain_solve_t(st, lv, i, sv[a + 1:a + 1 + d])
    out = np.zeros(st.dim)
    ws = FrontalWorkspace()
    for i in range(st.n - 1, -1, -1):
        d = st.depth[i]
        a = int(ptr[i])
        lii = lv[a]
        if lii == 0.0:
            raise SingularFactor(column=st.ordering.sigma[i])
        lsub = lv[a + 1:a + 1 + d]
        v = ws.pop(i) if st.pos_parent[i] != i else np.zeros((0, 0))
        w = wv[a + 1:a + 1 + d]
        vl = v @ lsub
        yii = (wv[a] - 2.0 * np.dot(lsub, w) + np.dot(lsub, vl)) / (lii * lii)
        ysub = (w - vl) / lii
        out[a] = yii
        out[a + 1:a + 1 + d] = ysub
        if st.pos_children[i]:
            vj = _pack_update(yii, ysub, v)
            for c in st.pos_children[i]:
                ws.push(c, vj)
    return SymSparse(st, out)


def projected_inverse(F: CholFactor) -> SymSparse:
    """Y = projection of X^{-1} onto the pattern, from the factor of X.
    This is the negated barrier gradient."""
    st = F.struct
    lv = F.L.vals
    out = np.zeros(st.dim)
    ws = FrontalWorkspace()
    ptr = st.bar_ptr
    for i in range(st.n - 1, -1, -1):
        d = st.depth[i]
        a = int(ptr[i])
        lii = lv[a]
        lsub = lv[a + 1:a + 1 + d]
        v = ws.pop(i) if st.pos_parent[i] != i else np.zeros((0, 0))
        ysub = -(v @ lsub) / lii
        yii = (1.0 / lii - np.dot(lsub, ysub)) / lii
        out[a] = yii
        out[a + 1:a + 1 + d] = ysub
        if st.pos_children[i]:
            vj = _pack_update(yii, ysub, v)
            for c in st.pos_children[i]:
                ws.push(c, vj)
    return SymSparse(st, out)


def maxdet_factor(S: SymSparse, eps: float = PIVOT_EPS) -> CholFactor:
    """Factor L of the inverse of the maximum-determinant positive definite
    completion of S: the projection of (L L^T)^{-1} onto the pattern
    reproduces S.

    Runs top-down, passing the already-computed ancestor block of L to each
    child.  A nonpositive Schur complement raises :class:`NotCompletable`,
    which is exactly the test for S lying in the interior of the
    completable cone.
    """
    st = S.struct
    sv = S.vals
    out = np.zeros(st.dim)
    ws = FrontalWorkspace()
    ptr = st.bar_ptr
    for i in range(st.n - 1, -1, -1):
        d = st.depth[i]
        a = int(ptr[i])
        v = ws.pop(i) if st.pos_parent[i] != i else np.zeros((0, 0))
        sii = sv[a]
        ssub = sv[a + 1:a + 1 + d]
        u = v.T @ ssub
        r = sii - np.dot(u, u)
        if r <= eps * (1.0 + abs(sii)):
            raise NotCompletable(node=st.ordering.sigma[i], value=r)
        lii = 1.0 / math.sqrt(r)
        lsub = -lii * (v @ u)
        out[a] = lii
        out[a + 1:a + 1 + d] = lsub
        if st.pos_children[i]:
            vj = np.zeros((d + 1, d + 1))
            vj[0, 0] = lii
            vj[1:, 0] = lsub
            vj[1:, 1:] = v
            for c in st.pos_children[i]:
                ws.push(c, vj)
    return CholFactor(LowerSparse(st, out))


def dual_gradient(Lhat: CholFactor) -> SymSparse:
    """Y = L L^T from a completion factor: the inverse of the
    maximum-determinant completion, i.e. the negated dual-barrier
    gradient."""
    st = Lhat.struct
    lv = Lhat.L.vals
    out = np.zeros(st.dim)
    ws = FrontalWorkspace()
    ptr = st.bar_ptr
    for i in range(st.n):
        d = st.depth[i]
        a = int(ptr[i])
        ell = lv[a:a + 1 + d]
        f = np.outer(ell, ell)
        for c in st.pos_children[i]:
            f -= ws.pop(c)
        out[a] = f[0, 0]
        out[a + 1:a + 1 + d] = f[1:, 0]
        if st.pos_parent[i] != i:
            ws.push(i, -f[1:, 1:])
    return SymSparse(st, out)


def barrier(F: CholFactor) -> float:
    """Log-det barrier value -ln det X from the factor of X."""
    return -F.logdet()


def dual_barrier(S: SymSparse) -> float:
    """Conjugate barrier value at S: with L the completion factor of S,
    the value is 2 sum(ln L_ii) - N."""
    f = maxdet_factor(S)
    return f.logdet() - S.struct.n


def hess_apply(F: CholFactor, Y: SymSparse) -> SymSparse:
    """Barrier Hessian at X applied to Y: projection of X^{-1} Y X^{-1},
    evaluated through the factored form."""
    return inverse_adjoint_map(F.L, inverse_forward_map(F.L, Y))


def inv_hess_apply(F: CholFactor, Y: SymSparse) -> SymSparse:
    """Inverse barrier Hessian at X applied to Y."""
    return forward_map(F.L, adjoint_map(F.L, Y))
