"""Shared instance generators for the test suite.

Interior points of the sparse PSD cone come from triangular products of
random pattern-restricted factors; interior completable points come from
projections of dense positive definite matrices, boosted until their
zero-fill extension stays positive definite so the dense completion oracle
can start.
"""

import numpy as np

from homcone.matrix import LowerSparse, Structure, SymSparse, project, to_dense
from homcone.pattern import random_homogeneous_pattern


def random_structure(n, seed, branching=3.0):
    gen = random_homogeneous_pattern(n, seed, branching)
    return Structure(gen.pattern, gen.ordering, gen.etree)


def random_lower(struct, rng, diag_lo=0.6, diag_hi=1.6, off_scale=0.3):
    v = off_scale * rng.standard_normal(struct.dim)
    v[struct.bar_ptr[:-1]] = rng.uniform(diag_lo, diag_hi, struct.n)
    return LowerSparse(struct, v)


def random_sym(struct, rng, scale=1.0):
    return SymSparse(struct, scale * rng.standard_normal(struct.dim))


def random_spd(struct, rng):
    """Interior point of K as a dense product of a random sparse factor."""
    ld = to_dense(random_lower(struct, rng))
    return project(ld @ ld.T, struct)


def random_completable(struct, rng, zero_fill_pd=True):
    """Interior point of the completable cone.  With zero_fill_pd, keep
    boosting the diagonal until the zero-fill completion is itself positive
    definite (what the dense completion oracle needs to initialize)."""
    n = struct.n
    a = rng.standard_normal((n, n)) / np.sqrt(n)
    y = a @ a.T + 0.2 * np.eye(n)
    s = project(y, struct)
    if zero_fill_pd:
        boost = 0.0
        while True:
            try:
                np.linalg.cholesky(to_dense(s) + boost * np.eye(n))
                break
            except np.linalg.LinAlgError:
                boost = 0.1 if boost == 0.0 else 2.0 * boost
        if boost:
            v = s.vals.copy()
            v[struct.bar_ptr[:-1]] += boost
            s = SymSparse(struct, v)
    return s


def random_interior_pair(struct, rng):
    return random_spd(struct, rng), random_completable(struct, rng)


def random_feasible_problem(struct, m, rng):
    """Conic program with a known interior primal-dual pair, so the optimum
    is bracketed by the certified objectives (weak duality)."""
    from homcone.ipm import ConicProblem
    from homcone.matrix import inner

    x_feas = random_spd(struct, rng)
    s_feas = random_completable(struct, rng, zero_fill_pd=False)
    y_feas = rng.standard_normal(m)
    a_mats = tuple(random_sym(struct, rng) for _ in range(m))
    b = np.array([inner(a, x_feas) for a in a_mats])
    c = s_feas
    for yi, a in zip(y_feas, a_mats):
        c = c + float(yi) * a
    problem = ConicProblem(struct, a_mats, b, c)
    return problem, x_feas, y_feas, s_feas
