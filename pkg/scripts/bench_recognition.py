"""Recognition and factorization timing sweep.

Usage: python scripts/bench_recognition.py [--sizes 1000,10000,100000]
Prints per-size wall times plus the normalized cost per input element,
which should stay roughly flat if the recognition is near-linear.
"""

import argparse
import time

import numpy as np

from homcone.factor import CholFactor, cholesky, dual_gradient
from homcone.matrix import LowerSparse, Structure
from homcone.pattern import lbfs_order, random_homogeneous_pattern


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--branching", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print(f"{'n':>9} {'edges':>10} {'lbfs_ms':>10} {'ns/elem':>9} {'chol_ms':>10}")
    for n in (int(t) for t in args.sizes.split(",")):
        gen = random_homogeneous_pattern(n, seed=args.seed, branching=args.branching)
        size = gen.pattern.n + gen.pattern.n_edges
        best = np.inf
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            res = lbfs_order(gen.pattern)
            best = min(best, time.perf_counter() - t0)
        assert res.accepted
        struct = Structure(gen.pattern, gen.ordering, gen.etree)
        rng = np.random.default_rng(args.seed)
        v = 0.1 * rng.standard_normal(struct.dim)
        v[struct.bar_ptr[:-1]] = rng.uniform(1.0, 2.0, struct.n)
        x = dual_gradient(CholFactor(LowerSparse(struct, v)))
        t0 = time.perf_counter()
        cholesky(x)
        t_chol = time.perf_counter() - t0
        print(f"{n:>9} {gen.pattern.n_edges:>10} {best * 1e3:>10.2f} "
              f"{best / size * 1e9:>9.1f} {t_chol * 1e3:>10.2f}")


if __name__ == "__main__":
    main()
