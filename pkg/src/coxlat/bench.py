"""Timing harness for the kernel twins: ``python -m coxlat.bench``.

Each hot kernel ships as a compiled variant and a reference variant (numpy
plus exact arithmetic).  This module times both on realistic inputs - the
Mobius table of the H4 lattice, a full coset scan over D5, and the batched
eliminations the lattice builder performs for B5 and H3 - and confirms the
outputs agree bit for bit.  The active backend for normal library use is
chosen at import time; see :mod:`coxlat.backend`.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import kernels
from .backend import using_numba
from .coxeter import build_root_system, enumerate_group, parse_type
from .lattice import build_lattice


def _time(fn, args, repeat):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def _chi_workload():
    lat = build_lattice(build_root_system(parse_type("H4")))
    indptr, indices = lat._up_csr
    args = (
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(indices, dtype=np.int64),
        np.ascontiguousarray(lat.node_masks, dtype=np.uint64),
        np.ascontiguousarray(lat.node_dims, dtype=np.int64),
        lat.rs.rank + 1,
    )
    label = f"mobius table, H4 lattice ({lat.num_nodes} flats)"
    return label, kernels._chi_table_jit, kernels._chi_table_ref, args, _equal


def _coset_workload():
    rs = build_root_system(parse_type("D5"))
    grp = enumerate_group(rs)
    w_list = np.arange(grp.order, dtype=np.int64)
    args = (
        np.ascontiguousarray(grp.perms),
        np.ascontiguousarray(grp.inv_perms),
        w_list,
        rs.root_supports.astype(np.int64),
        rs.positive_count,
        1 << rs.rank,
    )
    label = f"coset histogram, D5 ({grp.order} elements, full scan)"
    return label, kernels._coset_hist_jit, kernels._coset_hist_ref, args, _equal


def _builder_stacks(name, depth, reps):
    """The elimination batches the lattice builder would issue at one level:
    each codimension-``depth`` flat extended by every hyperplane off it."""
    rs = build_root_system(parse_type(name))
    lat = build_lattice(rs)
    stacks = []
    for i in range(lat.num_nodes):
        if rs.rank - int(lat.node_dims[i]) != depth:
            continue
        ann = lat.node_annihilator_rows(i)
        mask = int(lat.node_masks[i])
        for h in range(rs.positive_count):
            if not (mask >> h) & 1:
                stacks.append(np.concatenate([ann, rs.normals[h][None]], axis=0))
    return np.stack(stacks * reps)


def _nullspace_int_workload():
    batch = _builder_stacks("B5", 2, 4)
    label = f"nullspace batch over Z, B5 shape {tuple(batch.shape)}"
    return label, kernels._nullspace_int_jit, kernels._nullspace_int_ref, (batch,), _equal


def _nullspace_golden_workload():
    batch = _builder_stacks("H3", 1, 30)
    label = f"nullspace batch over Z[phi], H3 shape {tuple(batch.shape[:3])}"
    fns = kernels._nullspace_golden_jit, kernels._nullspace_golden_ref
    return (label, *fns, (batch,), _golden_spans_agree)


WORKLOADS = [
    _chi_workload,
    _coset_workload,
    _nullspace_int_workload,
    _nullspace_golden_workload,
]


def _equal(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def _golden_spans_agree(out_a, out_b) -> bool:
    """Z[phi] rows are primitive only up to units, so the twins may disagree
    byte for byte; check that each kernel lies inside the other's span by
    pairing it against the opposite annihilator."""
    red_a, kern_a = out_a
    red_b, kern_b = out_b
    if red_a.shape != red_b.shape or kern_a.shape != kern_b.shape:
        return False

    def perp(red, kern):
        a0, a1 = red[..., 0], red[..., 1]
        b0, b1 = kern[..., 0], kern[..., 1]
        m00 = np.einsum("ckj,cdj->ckd", a0, b0)
        m11 = np.einsum("ckj,cdj->ckd", a1, b1)
        m01 = np.einsum("ckj,cdj->ckd", a0, b1)
        m10 = np.einsum("ckj,cdj->ckd", a1, b0)
        return bool(((m00 + m11) == 0).all() and ((m01 + m10 + m11) == 0).all())

    return perp(red_a, kern_b) and perp(red_b, kern_a)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m coxlat.bench",
        description="Time the compiled kernels against their reference twins.",
    )
    parser.add_argument("--repeat", type=int, default=3, help="best-of repetitions")
    args = parser.parse_args(argv)

    compiled = using_numba()
    if compiled:
        print("compiled backend: numba; reference: numpy + exact arithmetic")
    else:
        print("numba not active (COXLAT_BACKEND=numpy or not installed); "
              "timing the reference twins only")
    rows = []
    all_equal = True
    for make in WORKLOADS:
        label, jit_fn, ref_fn, work_args, agree = make()
        if compiled:
            jit_fn(*work_args)  # warm the compilation cache before timing
            t_jit, out_jit = _time(jit_fn, work_args, args.repeat)
            t_ref, out_ref = _time(ref_fn, work_args, args.repeat)
            same = agree(out_jit, out_ref)
            all_equal &= same
            speed = t_ref / t_jit if t_jit > 0 else float("inf")
            rows.append((label, f"{t_jit * 1000:.1f}ms", f"{t_ref * 1000:.1f}ms",
                         f"{speed:.1f}x", "yes" if same else "NO"))
        else:
            t_ref, _ = _time(ref_fn, work_args, args.repeat)
            rows.append((label, "-", f"{t_ref * 1000:.1f}ms", "-", "-"))
    header = ("workload", "numba", "reference", "speedup", "agree")
    table = [header] + rows
    widths = [max(len(str(r[i])) for r in table) for i in range(len(header))]
    for r in table:
        print("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip())
    if compiled and not all_equal:
        print("MISMATCH between backends", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
