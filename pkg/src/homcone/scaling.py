"""Primal-dual scalings.

Given interior points x (sparse PSD cone) and s (completable cone), there
is a unique triangular congruence whose inverse maps x to the same v-space
point that its adjoint maps s to.  It is obtained from the Cholesky factor
of the scaling point w, the interior point at which the barrier Hessian
sends x to s.  A rank-one correction in the style of a BFGS update then
also aligns the shadow iterates (the images of the two barrier gradients),
which is what the interior-point search direction consumes.

The corrected operator is not self-adjoint and is not claimed to be a cone
automorphism; only the alignment equations and the adjoint contract are
guaranteed (and tested).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (
    NonpositiveCurvature,
    NotPositiveDefinite,
    ScalingConvergenceError,
)
from .factor import (
    adjoint_map,
    cholesky,
    dual_gradient,
    forward_map,
    hess_apply,
    inverse_adjoint_map,
    inverse_forward_map,
    maxdet_factor,
    projected_inverse,
)
from .matrix import LowerSparse, Structure, SymSparse, inner, norm, to_dense, zeros

__all__ = [
    "ScalingState",
    "ScalingOperator",
    "shadow_state",
    "scaling_point",
    "pd_factor",
    "bfgs_update",
    "apply_scaling",
]


@dataclass(frozen=True)
class ScalingState:
    """Iterate pair with shadow points and displacement directions.

    x_shadow is the point whose projected inverse is s (negated dual
    gradient); s_shadow is the projected inverse of x (negated primal
    gradient).  mu is the normalized duality gap <s,x>/N.  delta_p and
    delta_d vanish exactly on the central path and satisfy
    <s, delta_p> = <delta_d, x> = 0 and <delta_d, delta_p> >= 0.
    """

    x: SymSparse
    s: SymSparse
    x_shadow: SymSparse
    s_shadow: SymSparse
    mu: float
    delta_p: SymSparse
    delta_d: SymSparse


def shadow_state(x: SymSparse, s: SymSparse) -> ScalingState:
    """Build the scaling state, certifying interior membership on the way
    (NotPositiveDefinite names the primal cone, NotCompletable the dual)."""
    x_factor = cholesky(x)
    s_factor = maxdet_factor(s)
    x_shadow = dual_gradient(s_factor)
    s_shadow = projected_inverse(x_factor)
    mu = inner(s, x) / x.struct.n
    return ScalingState(
        x=x, s=s, x_shadow=x_shadow, s_shadow=s_shadow, mu=mu,
        delta_p=x - mu * x_shadow, delta_d=s - mu * s_shadow)


def _newton_system(struct: Structure, w_dense, x_dense):
    """Coefficient matrix of the scaling-point Newton step on the entry
    coordinates of the pattern: the linearization of the map
    W -> projection of W^{-1} x W^{-1}, written with the weighted trace
    inner product so the system is symmetric."""
    p = np.linalg.inv(w_dense)
    q = p @ x_dense @ p
    r = struct._row_vertex
    c = struct._col_vertex
    t1 = q[np.ix_(r, r)] * p[np.ix_(c, c)].T
    t2 = q[np.ix_(r, c)] * p[np.ix_(r, c)].T
    t3 = p[np.ix_(r, r)] * q[np.ix_(c, c)].T
    t4 = p[np.ix_(r, c)] * q[np.ix_(r, c)].T
    half = np.where(r == c, 0.5, 1.0)
    return struct.weights[:, None] * (t1 + t2 + t3 + t4) * half[None, :]


def scaling_point(x: SymSparse, s: SymSparse, tol: float = 1e-9,
                  max_iter: int = 100, warm: Optional[SymSparse] = None,
                  strict: bool = True) -> SymSparse:
    """Interior point w at which the barrier Hessian maps x to s.

    Damped Newton on the convex objective
    phi(W) = <proj(W^{-1}), x> + <s, W>, whose gradient is
    s - hess(W)[x]; steps are backtracked to keep W factorizable.  Inputs
    are rescaled to unit norm internally (an exact change of variables) and
    the default start is x/sqrt(mu), which is exact on the central path.

    Raises ScalingConvergenceError when the budget runs out or the
    iteration hits its numerical floor above ``tol``.  With strict=False
    the best iterate found is returned instead (useful deep inside a
    path-following run, where the floor rises as the iterates approach
    the boundary; the caller can read the achieved residual off
    :func:`pd_factor`).
    """
    st = x.struct
    nx, ns = norm(x), norm(s)
    xb = x / nx
    sb = s / ns
    back = float(np.sqrt(nx / ns))
    if warm is not None:
        w = warm / back
    else:
        mu = inner(sb, xb) / st.n
        w = xb / float(np.sqrt(mu))
    xd = to_dense(xb)
    best_w, best_g = w, np.inf
    no_progress = 0
    for _ in range(max_iter):
        f = cholesky(w)
        g = sb - hess_apply(f, xb)
        gn = norm(g)
        if gn <= tol:
            return back * w
        if gn < 0.99 * best_g:
            no_progress = 0
        else:
            no_progress += 1
        if gn < best_g:
            best_w, best_g = w, gn
        if no_progress >= 8:
            break
        m = _newton_system(st, to_dense(w), xd)
        rhs = -st.weights * g.vals
        try:
            dw = SymSparse(st, np.linalg.solve(m, rhs))
        except np.linalg.LinAlgError:
            break
        # In the quadratic basin the objective decrease is ~|g|^2, beneath
        # evaluation noise, so there accept any feasible full step instead
        # of asking a sufficient-decrease test to certify it.
        basin = gn <= 1e-6
        if not basin:
            phi0 = inner(projected_inverse(f), xb) + inner(sb, w)
            slope = inner(g, dw)
        t = 1.0
        accepted = False
        while t > 1e-12:
            cand = w + t * dw
            try:
                fc = cholesky(cand)
            except NotPositiveDefinite:
                t *= 0.5
                continue
            if basin:
                accepted = True
                break
            phi = inner(projected_inverse(fc), xb) + inner(sb, cand)
            if phi <= phi0 + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break  # line search bottomed out: numerical floor reached
        w = w + t * dw
    if not strict:
        return back * best_w
    raise ScalingConvergenceError(
        f"scaling point stalled at residual {best_g:.3e} (target {tol:g}) "
        f"within {max_iter} steps")


@dataclass(frozen=True)
class ScalingOperator:
    """Triangular congruence with an optional rank-one correction.

    Without the correction the four apply modes delegate to the factor
    kernels for the base factor L.  With it, forward adds
    (<v_hat, .>/|v_hat|^2) u with u = delta_p - L(v_hat), and the other
    modes apply the matching algebraic transposes/inverses.
    """

    base: LowerSparse
    v: Optional[SymSparse] = None        # common v-space image of (x, s)
    residual: float = 0.0                # |L^{-1}(x) - L*(s)|
    v_hat: Optional[SymSparse] = None
    u_corr: Optional[SymSparse] = None   # delta_p - L(v_hat)
    v_hat_inv: Optional[SymSparse] = None  # L^{-*}(v_hat)
    dp_image: Optional[SymSparse] = None   # L^{-1}(delta_p)
    alpha: float = 1.0
    vhat_norm2: float = 0.0              # <delta_p, delta_d>

    @property
    def corrected(self) -> bool:
        return self.v_hat is not None

    def v_hat_or_zero(self) -> SymSparse:
        return self.v_hat if self.corrected else zeros(self.base.struct)

    def to_dict(self) -> dict:
        """Trace-dump form: triplets of the base factor plus the correction
        vectors when present (1-based vertex indices)."""
        st = self.base.struct
        sigma = st.ordering.sigma

        def triplets(v):
            out = []
            for q in range(st.n):
                a, b = int(st.bar_ptr[q]), int(st.bar_ptr[q + 1])
                for t in range(b - a):
                    out.append([sigma[st.bar_rows[a + t]] + 1, sigma[q] + 1,
                                float(v.vals[a + t])])
            return out

        d = {"L": triplets(self.base), "residual": self.residual}
        if self.corrected:
            d["v_hat"] = triplets(self.v_hat)
            d["u_corr"] = triplets(self.u_corr)
            d["alpha"] = self.alpha
        return d


def pd_factor(w: SymSparse, x: Optional[SymSparse] = None,
              s: Optional[SymSparse] = None) -> ScalingOperator:
    """Factor the scaling point into the congruence operator (no rank-one
    correction).  When the pair (x, s) is supplied, the common v-space
    image L^{-1}(x) is stored on the operator along with the achieved
    residual |L^{-1}(x) - L*(s)|."""
    ell = cholesky(w).L
    if x is None or s is None:
        return ScalingOperator(base=ell)
    v = inverse_forward_map(ell, x)
    res = norm(v - adjoint_map(ell, s))
    return ScalingOperator(base=ell, v=v, residual=res)


def apply_scaling(op: ScalingOperator, mode: str, z: SymSparse) -> SymSparse:
    """Apply one of the four modes of the (possibly corrected) operator:
    forward, adjoint, inverse, or inverse_adjoint."""
    ell = op.base
    if mode == "forward":
        out = forward_map(ell, z)
        if op.corrected:
            out = out + (inner(op.v_hat, z) / op.vhat_norm2) * op.u_corr
        return out
    if mode == "adjoint":
        out = adjoint_map(ell, z)
        if op.corrected:
            out = out + (inner(op.u_corr, z) / op.vhat_norm2) * op.v_hat
        return out
    if mode == "inverse":
        out = inverse_forward_map(ell, z)
        if op.corrected:
            coef = op.alpha * inner(op.v_hat_inv, z) / op.vhat_norm2
            out = out + coef * (op.v_hat - op.dp_image)
        return out
    if mode == "inverse_adjoint":
        out = inverse_adjoint_map(ell, z)
        if op.corrected:
            coef = op.alpha * inner(op.v_hat - op.dp_image, z) / op.vhat_norm2
            out = out + coef * op.v_hat_inv
        return out
    raise ValueError(f"unknown mode {mode!r}")


def bfgs_update(op: ScalingOperator, state: ScalingState,
                zero_tol: float = 1e-12) -> ScalingOperator:
    """Rank-one update aligning the shadow iterates.

    On a central pair (both displacements vanish) the operator is returned
    unchanged.  Otherwise the correction direction is the adjoint image of
    delta_d, normalized so its norm squared equals <delta_p, delta_d>, and
    the updated operator satisfies all four equations: inverse(x) =
    adjoint(s) = v and inverse(delta_p) = adjoint(delta_d) = v_hat.
    Nonpositive curvature <delta_d, delta_p> means the inputs are not a
    genuine interior pair.
    """
    dp, dd = state.delta_p, state.delta_d
    mu = state.mu
    # Displacements scale with the iterates, so the vanishing test must
    # too, or roundoff-sized deltas near convergence masquerade as data.
    p_scale = max(mu, norm(state.x))
    d_scale = max(mu, norm(state.s))
    if norm(dp) <= zero_tol * p_scale and norm(dd) <= zero_tol * d_scale:
        return op
    curv = inner(dd, dp)
    if curv <= 0.0:
        raise NonpositiveCurvature(
            f"<delta_d, delta_p> = {curv:.3e} <= 0; iterate pair is corrupted")
    ell = op.base
    ls_dd = adjoint_map(ell, dd)
    alpha = norm(ls_dd) / float(np.sqrt(curv))
    v_hat = ls_dd / alpha
    return replace(
        op,
        v_hat=v_hat,
        u_corr=dp - forward_map(ell, v_hat),
        v_hat_inv=inverse_adjoint_map(ell, v_hat),
        dp_image=inverse_forward_map(ell, dp),
        alpha=alpha,
        vhat_norm2=curv,
    )
