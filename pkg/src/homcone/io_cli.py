"""File formats and the command-line front end.

Formats (everything 1-based on disk, 0-based in memory):

* pattern (text): first non-comment line ``N M``, then M lines ``i j`` with
  1 <= i < j <= N.  ``#`` starts a comment.  Duplicates and self-loops are
  rejected with the offending line number.
* matrix: the pattern header followed by ``i j value`` triplet lines
  (lower triangle, diagonal included), or the JSON object
  ``{"n", "edges", "entries", "ordering"?}``.
* problem (JSON): ``{"n", "edges", "b", "c", "A", "ordering"?}`` with c and
  each A entry as triplet lists.
* SDPA sparse (``.dat-s``) import: the data (c, F_0, F_i) are read as the
  standard-form program min <-F_0, x> s.t. <F_i, x> = c_i over the sparse
  PSD cone on the (extended) aggregate pattern.  Exactly the SDP dual pair
  of the file's inequality form when the aggregate pattern is block
  diagonal dense; otherwise the sparse-PSD restriction of it, which the
  importer reports.

Exit codes: 0 success, 1 usage, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

import numpy as np

from .densecheck import find_forbidden_subgraph
from .errors import (
    HomconeError,
    NotCompletable,
    NotPositiveDefinite,
    OrderingError,
    ParseError,
    PatternError,
)
from .factor import barrier, cholesky, maxdet_factor
from .ipm import ConicProblem, SolveReport, SolverOptions, SolveStatus, solve
from .matrix import Structure, SymSparse, from_triplets, inner, norm
from .pattern import (
    Ordering,
    OrderingClass,
    SparsityPattern,
    homogeneous_extension,
    lbfs_order,
    random_homogeneous_pattern,
    verify_ordering,
)

__all__ = [
    "parse_pattern",
    "format_pattern",
    "parse_matrix",
    "parse_problem",
    "serialize_problem",
    "parse_sdpa",
    "main",
    "run_cli",
]


# ---------------------------------------------------------------- pattern io

def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_pattern(text: str) -> SparsityPattern:
    """Parse the text pattern format with line-numbered diagnostics."""
    lines = _content_lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise ParseError("empty pattern file") from None
    parts = head.split()
    if len(parts) != 2:
        raise ParseError(f"header must be 'N M', got {head!r}", line=lineno)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"header must be 'N M', got {head!r}", line=lineno) from None
    if n < 1 or m < 0:
        raise ParseError(f"bad sizes N={n} M={m}", line=lineno)
    edges = []
    seen = set()
    count = 0
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"edge line must be 'i j', got {line!r}", line=lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"edge line must be 'i j', got {line!r}",
                             line=lineno) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"vertex out of range in edge ({i},{j})", line=lineno)
        if i == j:
            raise ParseError(f"self-loop at vertex {i}", line=lineno)
        if not i < j:
            raise ParseError(f"edges must satisfy i < j, got ({i},{j})", line=lineno)
        if (i, j) in seen:
            raise ParseError(f"duplicate edge ({i},{j})", line=lineno)
        seen.add((i, j))
        edges.append((i - 1, j - 1))
        count += 1
    if count != m:
        raise ParseError(f"header announced {m} edges, file has {count}")
    return SparsityPattern(n, edges)


def format_pattern(pattern: SparsityPattern) -> str:
    lines = [f"{pattern.n} {pattern.n_edges}"]
    for i, j in sorted(pattern.edges):
        lines.append(f"{i + 1} {j + 1}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------- matrix and problem io

def _structure_for(n, edges_1b, ordering_1b) -> Structure:
    pattern = SparsityPattern(n, [(i - 1, j - 1) for i, j in edges_1b])
    if ordering_1b is not None:
        ordering = Ordering.from_sigma([v - 1 for v in ordering_1b])
        if verify_ordering(pattern, ordering) is not OrderingClass.TRIVIALLY_PERFECT_PEO:
            raise ParseError("supplied ordering is not a trivially perfect "
                             "elimination ordering of the pattern")
        return Structure(pattern, ordering)
    res = lbfs_order(pattern)
    if not res.accepted:
        raise ParseError(
            "pattern is not homogeneous chordal (rejected at pivot "
            f"{res.pivot + 1}); run 'extend' first")
    return Structure(pattern, res.ordering, res.etree)


def _triplets_to_sym(struct: Structure, trips) -> SymSparse:
    try:
        return from_triplets(struct, [(i - 1, j - 1, v) for i, j, v in trips])
    except HomconeError as e:
        raise ParseError(f"bad matrix entry: {e}") from None


def parse_matrix(text: str):
    """Matrix file (text header+triplets, or JSON).  Returns
    (Structure, SymSparse)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        struct = _structure_for(data["n"], data["edges"], data.get("ordering"))
        return struct, _triplets_to_sym(struct, data["entries"])
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty matrix file")
    header_end = None
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 2:
        raise ParseError(f"header must be 'N M', got {head!r}", line=lineno)
    n, m = int(parts[0]), int(parts[1])
    pattern_text = "\n".join([head] + [ln for _, ln in lines[1:m + 1]])
    pattern = parse_pattern(pattern_text)
    res = lbfs_order(pattern)
    if not res.accepted:
        raise ParseError("pattern is not homogeneous chordal; run 'extend' first")
    struct = Structure(pattern, res.ordering, res.etree)
    trips = []
    for lineno, line in lines[m + 1:]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"triplet line must be 'i j value', got {line!r}",
                             line=lineno)
        trips.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return struct, _triplets_to_sym(struct, trips)


def parse_problem(text: str):
    """Native JSON conic problem.  Returns (ConicProblem, info dict)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    for key in ("n", "edges", "b", "c", "A"):
        if key not in data:
            raise ParseError(f"problem file is missing {key!r}")
    struct = _structure_for(data["n"], data["edges"], data.get("ordering"))
    c = _triplets_to_sym(struct, data["c"])
    a_mats = tuple(_triplets_to_sym(struct, trips) for trips in data["A"])
    b = np.asarray(data["b"], dtype=float)
    if len(a_mats) != b.shape[0]:
        raise ParseError(f"{len(a_mats)} constraint matrices but {b.shape[0]} "
                         "right-hand sides")
    return ConicProblem(struct, a_mats, b, c), {"format": "native"}


def _sym_to_triplets(x: SymSparse):
    st = x.struct
    sigma = st.ordering.sigma
    out = []
    for q in range(st.n):
        a, b = int(st.bar_ptr[q]), int(st.bar_ptr[q + 1])
        for t in range(b - a):
            out.append([sigma[st.bar_rows[a + t]] + 1, sigma[q] + 1,
                        float(x.vals[a + t])])
    return out


def serialize_problem(problem: ConicProblem) -> dict:
    st = problem.struct
    return {
        "n": st.n,
        "edges": [[i + 1, j + 1] for i, j in sorted(st.pattern.edges)],
        "ordering": [v + 1 for v in st.ordering.sigma],
        "b": [float(t) for t in problem.b],
        "c": _sym_to_triplets(problem.c),
        "A": [_sym_to_triplets(a) for a in problem.a_mats],
    }


# ------------------------------------------------------------------ sdpa io

def parse_sdpa(text: str):
    """Import SDPA sparse data onto the extended aggregate pattern.
    Returns (ConicProblem, info) with info noting the applied extension
    and whether the import is exact (block-diagonal dense aggregate)."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("*", '"')):
            continue
        lines.append((lineno, line))
    if len(lines) < 4:
        raise ParseError("truncated SDPA file")
    try:
        m = int(lines[0][1].split()[0])
        nblocks = int(lines[1][1].split()[0])
        sizes = [int(t) for t in lines[2][1].replace(",", " ").split()[:nblocks]]
        cvec = [float(t) for t in lines[3][1].replace(",", " ").split()[:m]]
    except (ValueError, IndexError) as e:
        raise ParseError(f"bad SDPA header: {e}") from None
    widths = [abs(t) for t in sizes]
    offsets = np.cumsum([0] + widths[:-1])
    n = int(sum(widths))
    entries: dict = {}
    for lineno, line in lines[4:]:
        parts = line.replace(",", " ").split()
        if len(parts) != 5:
            raise ParseError(f"SDPA entry must have 5 fields, got {line!r}",
                             line=lineno)
        matno, blk, i, j, val = (int(parts[0]), int(parts[1]), int(parts[2]),
                                 int(parts[3]), float(parts[4]))
        if not (0 <= matno <= m and 1 <= blk <= nblocks):
            raise ParseError("matrix or block index out of range", line=lineno)
        if sizes[blk - 1] < 0 and i != j:
            raise ParseError("off-diagonal entry in a diagonal block", line=lineno)
        if not (1 <= i <= widths[blk - 1] and 1 <= j <= widths[blk - 1]):
            raise ParseError("entry index outside its block", line=lineno)
        gi = int(offsets[blk - 1]) + i - 1
        gj = int(offsets[blk - 1]) + j - 1
        lo, hi = min(gi, gj), max(gi, gj)
        entries.setdefault(matno, {})[(hi, lo)] = val
    agg_edges = sorted({(lo, hi) for mat in entries.values()
                        for (hi, lo) in mat if hi != lo})
    aggregate = SparsityPattern(n, agg_edges)
    ext = homogeneous_extension(aggregate)
    struct = Structure(ext.extended, ext.ordering, ext.etree)
    exact = ext.extended.n_edges == aggregate.n_edges and _block_dense(aggregate)

    def build(matno, negate=False):
        trips = [(hi + 1, lo + 1, -v if negate else v)
                 for (hi, lo), v in entries.get(matno, {}).items()]
        return _triplets_to_sym(struct, trips)

    c = build(0, negate=True)
    a_mats = tuple(build(k) for k in range(1, m + 1))
    problem = ConicProblem(struct, a_mats, np.asarray(cvec), c)
    info = {
        "format": "sdpa",
        "aggregate_edges": aggregate.n_edges,
        "extension_edges": ext.extended.n_edges - aggregate.n_edges,
        "exact": bool(exact),
        "note": ("exact SDP dual pair of the inequality-form data"
                 if exact else
                 "sparse-PSD restriction of the SDP dual (aggregate pattern "
                 "is not block diagonal dense)"),
    }
    return problem, info


def _block_dense(pattern: SparsityPattern) -> bool:
    """True when every connected component induces a complete subgraph."""
    n = pattern.n
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = [start]
        while queue:
            v = queue.pop()
            for w in pattern.adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        k = len(comp)
        inside = sum(len(pattern.adjacency[v]) for v in comp) // 2
        if inside != k * (k - 1) // 2:
            return False
    return True


# ------------------------------------------------------------------ helpers

def _is_chordal(pattern: SparsityPattern) -> bool:
    """Maximum cardinality search followed by the elimination-order test."""
    n = pattern.n
    weight = [0] * n
    numbered = [False] * n
    sigma = [0] * n
    for pos in range(n - 1, -1, -1):
        v = max((u for u in range(n) if not numbered[u]),
                key=lambda u: (weight[u], -u))
        sigma[pos] = v
        numbered[v] = True
        for w in pattern.adjacency[v]:
            if not numbered[w]:
                weight[w] += 1
    ordering = Ordering.from_sigma(sigma)
    return verify_ordering(pattern, ordering) is not OrderingClass.NOT_PEO


def _report_text(rep: SolveReport) -> str:
    d = rep.to_dict()
    lines = [f"status: {d['status']}",
             f"iterations: {d['iterations']}",
             f"primal_objective: {d['primal_objective']!r}",
             f"dual_objective: {d['dual_objective']!r}",
             f"gap: {d['gap']!r}",
             f"primal_residual: {d['primal_residual']!r}",
             f"dual_residual: {d['dual_residual']!r}",
             "x:"]
    lines += [f"  {i} {j} {v!r}" for i, j, v in d["x"]]
    lines.append("y:")
    lines += [f"  {v!r}" for v in d["y"]]
    lines.append("s:")
    lines += [f"  {i} {j} {v!r}" for i, j, v in d["s"]]
    lines.append("trace:")
    lines += ["  " + json.dumps(row, sort_keys=True) for row in d["trace"]]
    return "\n".join(lines) + "\n"


def _emit(out_path: Optional[str], text: str, stdout) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _fmt_triplets_text(trips) -> str:
    return "\n".join(f"{i} {j} {v!r}" for i, j, v in trips) + "\n"


# ---------------------------------------------------------------- commands

def _cmd_check_pattern(args, stdout) -> int:
    pattern = parse_pattern(_read(args.file))
    res = lbfs_order(pattern)
    if res.accepted:
        stdout.write("HOMOGENEOUS_CHORDAL\n")
        return 0
    kind = "CHORDAL_ONLY" if _is_chordal(pattern) else "GENERAL"
    if pattern.n <= 64:
        w = find_forbidden_subgraph(pattern)
        witness = f"{w.kind} ({', '.join(str(v + 1) for v in w.vertices)})"
    else:
        witness = "unavailable (witness scan capped at 64 vertices)"
    stdout.write(f"{kind} witness: {witness}\n")
    return 0


def _cmd_order(args, stdout) -> int:
    pattern = parse_pattern(_read(args.file))
    res = lbfs_order(pattern)
    if not res.accepted:
        stdout.write(f"REJECTED pivot={res.pivot + 1} set={res.set_index + 1}\n")
        return 3
    sigma = " ".join(str(v + 1) for v in res.ordering.sigma)
    parent = " ".join(str(res.etree.parent[v] + 1) for v in range(pattern.n))
    if args.format == "json":
        stdout.write(json.dumps({
            "sigma": [v + 1 for v in res.ordering.sigma],
            "parent": [res.etree.parent[v] + 1 for v in range(pattern.n)],
        }) + "\n")
    else:
        stdout.write(f"sigma: {sigma}\nparent: {parent}\n")
    return 0


def _cmd_extend(args, stdout) -> int:
    pattern = parse_pattern(_read(args.file))
    ext = homogeneous_extension(pattern)
    added = ext.extended.n_edges - pattern.n_edges
    _emit(args.out, format_pattern(ext.extended), stdout)
    if args.out:
        stdout.write(f"added {added} edges -> {args.out}\n")
    return 0


def _cmd_factor(args, stdout) -> int:
    struct, x = parse_matrix(_read(args.file))
    try:
        f = cholesky(x)
    except NotPositiveDefinite as e:
        stdout.write(f"NOT_POSITIVE_DEFINITE node={e.node + 1}\n")
        return 3
    trips = _sym_to_triplets(f.L)
    if args.format == "json":
        stdout.write(json.dumps({"L": trips, "barrier": barrier(f)}) + "\n")
    else:
        stdout.write(_fmt_triplets_text(trips))
    return 0


def _cmd_complete(args, stdout) -> int:
    struct, s = parse_matrix(_read(args.file))
    try:
        f = maxdet_factor(s)
    except NotCompletable as e:
        stdout.write(f"NOT_COMPLETABLE node={e.node + 1}\n")
        return 3
    trips = _sym_to_triplets(f.L)
    if args.format == "json":
        stdout.write(json.dumps({"L": trips,
                                 "dual_barrier": f.logdet() - struct.n}) + "\n")
    else:
        stdout.write(_fmt_triplets_text(trips))
    return 0


def _cmd_solve(args, stdout) -> int:
    text = _read(args.file)
    if args.file.endswith(".dat-s") or args.file.endswith(".sdpa"):
        problem, info = parse_sdpa(text)
    else:
        stripped = text.lstrip()
        if not stripped.startswith("{"):
            problem, info = parse_sdpa(text)
        else:
            problem, info = parse_problem(text)
    options = SolverOptions(
        gamma=args.gamma,
        tol_gap=args.tol, tol_feas=args.tol,
        max_iter=args.max_iter,
        step_fraction=args.eta,
    )
    rep = solve(problem, options)
    if args.trace:
        with open(args.trace, "w") as fh:
            for row in rep.trace:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    if info.get("format") == "sdpa":
        stdout.write(f"# sdpa import: {info['note']}; "
                     f"{info['extension_edges']} extension edges\n")
    if args.format == "json":
        stdout.write(json.dumps(rep.to_dict(), sort_keys=True) + "\n")
    else:
        stdout.write(_report_text(rep))
    return 0 if rep.status is SolveStatus.OPTIMAL else 3


def _cmd_gen(args, stdout) -> int:
    if args.kind == "pattern":
        gen = random_homogeneous_pattern(args.n, seed=args.seed,
                                         branching=args.branching)
        _emit(args.out, format_pattern(gen.pattern), stdout)
        return 0
    rng = np.random.default_rng(args.seed)
    gen = random_homogeneous_pattern(args.n, seed=args.seed,
                                     branching=args.branching)
    struct = Structure(gen.pattern, gen.ordering, gen.etree)
    m = min(args.m, struct.dim)
    if m < args.m:
        print(f"homcone: capping m at the space dimension {struct.dim}",
              file=sys.stderr)
    problem = _random_problem(struct, m, rng)
    _emit(args.out, json.dumps(serialize_problem(problem), sort_keys=True) + "\n",
          stdout)
    return 0


def _random_problem(struct: Structure, m: int, rng) -> ConicProblem:
    """Instance with a known interior primal-dual pair (so it is solvable
    and its optimum is bracketed by the certified objectives)."""
    def spd():
        v = 0.3 * rng.standard_normal(struct.dim)
        v[struct.bar_ptr[:-1]] = rng.uniform(0.8, 1.6, struct.n)
        from .matrix import LowerSparse, project, to_dense

        ld = to_dense(LowerSparse(struct, v))
        return project(ld @ ld.T, struct)

    x_feas = spd()
    s_feas = spd()  # interior of K, hence of its superset dual cone
    y_feas = rng.standard_normal(m)
    a_mats = tuple(SymSparse(struct, rng.standard_normal(struct.dim))
                   for _ in range(m))
    b = np.array([inner(a, x_feas) for a in a_mats])
    c = s_feas
    for yi, a in zip(y_feas, a_mats):
        c = c + float(yi) * a
    return ConicProblem(struct, a_mats, b, c)


def _cmd_selftest(args, stdout) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0

    def check(name, fn):
        nonlocal failures
        try:
            fn()
            stdout.write(f"PASS {name}\n")
        except Exception as e:  # report and keep going
            failures += 1
            stdout.write(f"FAIL {name}: {e}\n")

    def recognition():
        import itertools

        from .densecheck import has_forbidden_subgraph

        for _ in range(120):
            n = int(rng.integers(2, 24))
            pairs = list(itertools.combinations(range(n), 2))
            bits = rng.integers(0, 2, size=len(pairs))
            p = SparsityPattern(n, [e for e, b in zip(pairs, bits) if b])
            assert lbfs_order(p).accepted == (not has_forbidden_subgraph(p))
        for t in range(40):
            gen = random_homogeneous_pattern(int(rng.integers(1, 60)),
                                             seed=int(rng.integers(1 << 30)))
            assert lbfs_order(gen.pattern).accepted

    def kernels():
        from .factor import (
            adjoint_map,
            forward_map,
            inverse_adjoint_map,
            inverse_forward_map,
            projected_inverse,
        )
        from .matrix import LowerSparse, project, to_dense

        for t in range(30):
            gen = random_homogeneous_pattern(int(rng.integers(2, 30)),
                                             seed=int(rng.integers(1 << 30)))
            struct = Structure(gen.pattern, gen.ordering, gen.etree)
            v = 0.3 * rng.standard_normal(struct.dim)
            v[struct.bar_ptr[:-1]] = rng.uniform(0.6, 1.6, struct.n)
            ell = LowerSparse(struct, v)
            ld = to_dense(ell)
            x = project(ld @ ld.T, struct)
            f = cholesky(x)
            assert np.allclose(to_dense(f.L), np.linalg.cholesky(to_dense(x)),
                               rtol=1e-10, atol=1e-12)
            got = projected_inverse(f)
            want = project(np.linalg.inv(to_dense(x)), struct)
            assert np.allclose(got.vals, want.vals, rtol=1e-9, atol=1e-10)
            z = SymSparse(struct, rng.standard_normal(struct.dim))
            assert np.allclose(
                inverse_forward_map(ell, forward_map(ell, z)).vals, z.vals,
                rtol=1e-10, atol=1e-10)
            assert np.allclose(
                inverse_adjoint_map(ell, adjoint_map(ell, z)).vals, z.vals,
                rtol=1e-10, atol=1e-10)

    def scaling_eqs():
        from .scaling import apply_scaling, bfgs_update, pd_factor, scaling_point, shadow_state

        for t in range(10):
            gen = random_homogeneous_pattern(int(rng.integers(2, 14)),
                                             seed=int(rng.integers(1 << 30)))
            struct = Structure(gen.pattern, gen.ordering, gen.etree)
            from .matrix import LowerSparse, project, to_dense

            v = 0.3 * rng.standard_normal(struct.dim)
            v[struct.bar_ptr[:-1]] = rng.uniform(0.8, 1.5, struct.n)
            ld = to_dense(LowerSparse(struct, v))
            x = project(ld @ ld.T, struct)
            a = rng.standard_normal((struct.n, struct.n)) / np.sqrt(struct.n)
            s = project(a @ a.T + 0.3 * np.eye(struct.n), struct)
            state = shadow_state(x, s)
            w = scaling_point(x, s, tol=1e-12)
            op = bfgs_update(pd_factor(w, x, s), state)
            scale = max(1.0, norm(x), norm(s))
            vv = apply_scaling(op, "inverse", x)
            assert norm(vv - apply_scaling(op, "adjoint", s)) <= 1e-9 * scale
            if op.corrected:
                assert norm(apply_scaling(op, "inverse", state.delta_p)
                            - op.v_hat) <= 1e-9 * scale
                assert norm(apply_scaling(op, "adjoint", state.delta_d)
                            - op.v_hat) <= 1e-9 * scale

    def ipm_end_to_end():
        for t in range(3):
            gen = random_homogeneous_pattern(int(rng.integers(4, 16)),
                                             seed=int(rng.integers(1 << 30)))
            struct = Structure(gen.pattern, gen.ordering, gen.etree)
            m = int(rng.integers(1, min(6, struct.dim + 1)))
            problem = _random_problem(struct, m, rng)
            rep = solve(problem)
            assert rep.status is SolveStatus.OPTIMAL
            assert rep.gap / struct.n <= 1e-7

    check("recognition-equivalence", recognition)
    check("kernel-oracle-agreement", kernels)
    check("scaling-equations", scaling_eqs)
    check("ipm-end-to-end", ipm_end_to_end)
    return 0 if failures == 0 else 3


def _cmd_bench(args, stdout) -> int:
    sizes = [int(t) for t in args.sizes.split(",")]
    rows = []
    for n in sizes:
        gen = random_homogeneous_pattern(n, seed=args.seed, branching=args.branching)
        t0 = time.perf_counter()
        res = lbfs_order(gen.pattern)
        t_lbfs = time.perf_counter() - t0
        assert res.accepted
        struct = Structure(gen.pattern, gen.ordering, gen.etree)
        rng = np.random.default_rng(args.seed)
        v = 0.1 * rng.standard_normal(struct.dim)
        v[struct.bar_ptr[:-1]] = rng.uniform(1.0, 2.0, struct.n)
        from .factor import CholFactor, dual_gradient
        from .matrix import LowerSparse

        x = dual_gradient(CholFactor(LowerSparse(struct, v)))
        t0 = time.perf_counter()
        cholesky(x)
        t_chol = time.perf_counter() - t0
        rows.append({"n": n, "edges": gen.pattern.n_edges,
                     "lbfs_seconds": t_lbfs, "cholesky_seconds": t_chol})
    if args.format == "json":
        stdout.write(json.dumps(rows) + "\n")
    else:
        stdout.write(f"{'n':>9} {'edges':>10} {'lbfs_s':>10} {'chol_s':>10}\n")
        for r in rows:
            stdout.write(f"{r['n']:>9} {r['edges']:>10} "
                         f"{r['lbfs_seconds']:>10.4f} {r['cholesky_seconds']:>10.4f}\n")
    return 0


# ------------------------------------------------------------------- driver

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None


def _build_parser() -> _Parser:
    p = _Parser(prog="homcone",
                description="homogeneous sparse matrix cones toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("check-pattern", _cmd_check_pattern,
             help="classify a pattern file")
    sp.add_argument("file")

    sp = add("order", _cmd_order, help="recognition ordering and parents")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = add("extend", _cmd_extend, help="homogeneous chordal extension")
    sp.add_argument("file")
    sp.add_argument("--out")

    sp = add("factor", _cmd_factor, help="Cholesky factor of a matrix file")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = add("complete", _cmd_complete,
             help="max-determinant completion factor of a matrix file")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = add("solve", _cmd_solve, help="solve a conic problem file")
    sp.add_argument("file")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--max-iter", type=int, default=100)
    sp.add_argument("--eta", type=float, default=0.99)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--trace", metavar="FILE")

    sp = add("gen", _cmd_gen, help="generate random instances")
    sp.add_argument("kind", choices=("pattern", "problem"))
    sp.add_argument("--n", type=int, default=20)
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--branching", type=float, default=3.0)
    sp.add_argument("--out")

    sp = add("selftest", _cmd_selftest, help="run the property battery")
    sp.add_argument("--seed", type=int, default=0)

    sp = add("bench", _cmd_bench, help="time recognition and factorization")
    sp.add_argument("--sizes", default="1000,10000")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--branching", type=float, default=4.0)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    return p


def run_cli(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args, stdout)
    except (ParseError, PatternError, OrderingError) as e:
        print(f"homcone: input error: {e}", file=sys.stderr)
        return 2
    except HomconeError as e:
        print(f"homcone: {e}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_cli())
