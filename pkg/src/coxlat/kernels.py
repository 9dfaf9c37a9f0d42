"""Integer kernels with accelerated and reference twins.

Three hot spots live here:

  * Mobius/characteristic-polynomial accumulation over an intersection poset,
  * conjugate-support histograms behind the coset-count identity,
  * batched fraction-free elimination used while building lattices, over Z and
    over Z[phi] (pairs (a, b) meaning a + b*phi).

Each has a numba-compiled variant and a reference variant written against
exact rational arithmetic; dispatch follows :data:`coxlat.backend.BACKEND`.
The reference twins double as test oracles for the compiled ones.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .backend import BACKEND, njit
from .exact import PHI, Scalar, kernel_basis, rref

# ---------------------------------------------------------------------------
# Mobius / characteristic polynomial table
#
# Nodes are assumed to be in a linear extension of the partial order (larger
# index never below a smaller one), indptr/indices give each node's up-set in
# ascending index order (starting with the node itself), masks encode the
# order: x <= y iff masks[x] is a bit-subset of masks[y].


@njit(cache=True)
def _chi_table_jit(indptr, indices, masks, dims, ncols):
    nn = indptr.size - 1
    out = np.zeros((nn, ncols), dtype=np.int64)
    maxk = 0
    for x in range(nn):
        k = indptr[x + 1] - indptr[x]
        if k > maxk:
            maxk = k
    mu = np.empty(maxk, dtype=np.int64)
    for x in range(nn):
        lo = indptr[x]
        k = indptr[x + 1] - lo
        for a in range(k):
            ya = indices[lo + a]
            if a == 0:
                mu[0] = 1
            else:
                ma = masks[ya]
                acc = np.int64(0)
                for b in range(a):
                    if (masks[indices[lo + b]] & ~ma) == np.uint64(0):
                        acc += mu[b]
                mu[a] = -acc
            out[x, dims[ya]] += mu[a]
    return out


def _chi_table_ref(indptr, indices, masks, dims, ncols):
    nn = indptr.size - 1
    out = np.zeros((nn, ncols), dtype=np.int64)
    for x in range(nn):
        sub_nodes = indices[indptr[x]:indptr[x + 1]]
        m = masks[sub_nodes]
        below = ((m[:, None] & ~m[None, :]) == 0).astype(np.int64)
        k = sub_nodes.size
        mu = np.zeros(k, dtype=np.int64)
        mu[0] = 1
        for a in range(1, k):
            mu[a] = -(mu[:a] @ below[:a, a])
        np.add.at(out[x], dims[sub_nodes], mu)
    return out


def chi_table(indptr, indices, masks, dims, ncols):
    """Per-node characteristic polynomial coefficients.

    Returns an (num_nodes, ncols) int64 array whose row x holds the ascending
    coefficients of sum_{y >= x} mu(x, y) t^{dim y}.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    dims = np.ascontiguousarray(dims, dtype=np.int64)
    if BACKEND == "numba":
        return _chi_table_jit(indptr, indices, masks, dims, ncols)
    return _chi_table_ref(indptr, indices, masks, dims, ncols)


# ---------------------------------------------------------------------------
# Conjugate-support histograms
#
# perms[g][r] is the root index g sends root r to; positives sit at indices
# 0..P-1 with the negative of root p at p+P.  For each listed w the kernel
# tallies, over all v, the union of simple supports of the positive roots
# inverted by v^-1 w v.  Entry [wi, S] counts the v whose conjugate has
# support exactly S.


@njit(cache=True)
def _coset_hist_jit(perms, inv_perms, w_list, rsupp, positive_count, nsubsets):
    num_w = w_list.size
    order = perms.shape[0]
    out = np.zeros((num_w, nsubsets), dtype=np.int64)
    for wi in range(num_w):
        pw = perms[w_list[wi]]
        for v in range(order):
            pv = perms[v]
            piv = inv_perms[v]
            acc = np.int64(0)
            for p in range(positive_count):
                if piv[pw[pv[p]]] >= positive_count:
                    acc |= rsupp[p]
            out[wi, acc] += 1
    return out


def _coset_hist_ref(perms, inv_perms, w_list, rsupp, positive_count, nsubsets):
    order = perms.shape[0]
    out = np.empty((w_list.size, nsubsets), dtype=np.int64)
    rows = np.arange(order)[:, None]
    pos_images = perms[:, :positive_count].astype(np.intp)
    for wi, w in enumerate(w_list):
        after_w = perms[w][pos_images]
        conj = inv_perms[rows, after_w]
        inverted = conj >= positive_count
        sup = np.where(inverted, rsupp[None, :], 0)
        acc = np.bitwise_or.reduce(sup, axis=1)
        out[wi] = np.bincount(acc, minlength=nsubsets)[:nsubsets]
    return out


def coset_support_hist(perms, inv_perms, w_list, rsupp, positive_count, nsubsets):
    perms = np.ascontiguousarray(perms)
    inv_perms = np.ascontiguousarray(inv_perms)
    w_list = np.ascontiguousarray(w_list, dtype=np.int64)
    rsupp = np.ascontiguousarray(rsupp, dtype=np.int64)
    if BACKEND == "numba":
        return _coset_hist_jit(perms, inv_perms, w_list, rsupp, positive_count, nsubsets)
    return _coset_hist_ref(perms, inv_perms, w_list, rsupp, positive_count, nsubsets)


# ---------------------------------------------------------------------------
# Batched fraction-free nullspaces over Z
#
# Input: (num, k, n) stacks of integer covector rows, each of full row rank k.
# Output: (reduced, kern) where reduced[i] is the primitive reduced echelon
# basis of stack i's row space and kern[i] the primitive kernel basis, one row
# per free column in ascending column order.  Entries stay well inside int64:
# every intermediate value of the Montante elimination is a minor of the
# input, and callers only pass covectors with single-digit entries at rank at
# most 8.


@njit(cache=True)
def _gcd64(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _nullspace_int_jit(stacks):
    num, k, n = stacks.shape
    red = stacks.copy()
    kern = np.zeros((num, n - k, n), dtype=np.int64)
    piv_cols = np.empty(k, dtype=np.int64)
    for idx in range(num):
        a = red[idx]
        prev = np.int64(1)
        r = 0
        for c in range(n):
            if r == k:
                break
            sel = -1
            for i in range(r, k):
                if a[i, c] != 0:
                    sel = i
                    break
            if sel < 0:
                continue
            if sel != r:
                for j in range(n):
                    tmp = a[r, j]
                    a[r, j] = a[sel, j]
                    a[sel, j] = tmp
            pc = a[r, c]
            for i in range(k):
                if i == r:
                    continue
                f = a[i, c]
                for j in range(n):
                    a[i, j] = (a[i, j] * pc - f * a[r, j]) // prev
            prev = pc
            piv_cols[r] = c
            r += 1
        if r != k:
            raise ValueError("covector stack is not of full row rank")
        d = prev
        fi = 0
        for c in range(n):
            is_piv = False
            for j in range(k):
                if piv_cols[j] == c:
                    is_piv = True
                    break
            if is_piv:
                continue
            kern[idx, fi, c] = d
            for j in range(k):
                kern[idx, fi, piv_cols[j]] = -a[j, c]
            fi += 1
        for block in range(2):
            rows = kern[idx] if block == 0 else red[idx]
            nrows = rows.shape[0]
            for rr in range(nrows):
                g = np.int64(0)
                for c in range(n):
                    x = rows[rr, c]
                    if x < 0:
                        x = -x
                    g = _gcd64(g, x)
                if g > 1:
                    for c in range(n):
                        rows[rr, c] //= g
                for c in range(n):
                    if rows[rr, c] != 0:
                        if rows[rr, c] < 0:
                            for c2 in range(n):
                                rows[rr, c2] = -rows[rr, c2]
                        break
    return red, kern


def _primitive_int_row(fracs):
    """Scale a Fraction row to the primitive integer row with positive lead."""
    mult = lcm(*[f.denominator for f in fracs]) if fracs else 1
    ints = [int(f * mult) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints


def _nullspace_int_ref(stacks):
    num, k, n = stacks.shape
    red = np.zeros((num, k, n), dtype=np.int64)
    kern = np.zeros((num, n - k, n), dtype=np.int64)
    for idx in range(num):
        rows = [[Fraction(int(x)) for x in row] for row in stacks[idx]]
        reduced, pivots = rref(rows, n)
        if len(pivots) != k:
            raise ValueError("covector stack is not of full row rank")
        for j, row in enumerate(reduced):
            red[idx, j] = _primitive_int_row([x.as_fraction() for x in row])
        for j, vec in enumerate(kernel_basis(rows, n)):
            kern[idx, j] = _primitive_int_row([x.as_fraction() for x in vec])
    return red, kern


def batch_nullspace_int(stacks):
    stacks = np.ascontiguousarray(stacks, dtype=np.int64)
    if stacks.shape[0] == 0:
        num, k, n = stacks.shape
        return stacks.copy(), np.zeros((num, n - k, n), dtype=np.int64)
    if BACKEND == "numba":
        return _nullspace_int_jit(stacks)
    return _nullspace_int_ref(stacks)


# ---------------------------------------------------------------------------
# Batched fraction-free nullspaces over Z[phi]
#
# Same contract with entries as (a, b) pairs meaning a + b*phi, array shape
# (num, k, n, 2).  Montante stays exact over any integral domain; division by
# the previous pivot goes through the conjugate (a + b, -b) and the integer
# norm a*a + a*b - b*b.  Rows are normalized by integer content and real sign
# only (canonical up to Z[phi] units, which is all the mask machinery needs).


@njit(cache=True)
def _pair_sign(a, b):
    # sign of a + b*phi = ((2a+b) + b*sqrt5)/2
    u = 2 * a + b
    v = b
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return 1 if v > 0 else -1
    if (u > 0) == (v > 0):
        return 1 if u > 0 else -1
    big = u * u > 5 * v * v
    if u > 0:
        return 1 if big else -1
    return -1 if big else 1


@njit(cache=True)
def _nullspace_golden_jit(stacks):
    num, k, n, _ = stacks.shape
    red = stacks.copy()
    kern = np.zeros((num, n - k, n, 2), dtype=np.int64)
    piv_cols = np.empty(k, dtype=np.int64)
    for idx in range(num):
        a = red[idx]
        prev0 = np.int64(1)
        prev1 = np.int64(0)
        r = 0
        for c in range(n):
            if r == k:
                break
            sel = -1
            for i in range(r, k):
                if a[i, c, 0] != 0 or a[i, c, 1] != 0:
                    sel = i
                    break
            if sel < 0:
                continue
            if sel != r:
                for j in range(n):
                    for z in range(2):
                        tmp = a[r, j, z]
                        a[r, j, z] = a[sel, j, z]
                        a[sel, j, z] = tmp
            pc0 = a[r, c, 0]
            pc1 = a[r, c, 1]
            norm = prev0 * prev0 + prev0 * prev1 - prev1 * prev1
            cj0 = prev0 + prev1
            cj1 = -prev1
            for i in range(k):
                if i == r:
                    continue
                f0 = a[i, c, 0]
                f1 = a[i, c, 1]
                for j in range(n):
                    x0 = a[i, j, 0]
                    x1 = a[i, j, 1]
                    y0 = a[r, j, 0]
                    y1 = a[r, j, 1]
                    # t = x*pc - f*y over Z[phi]
                    t0 = x0 * pc0 + x1 * pc1 - (f0 * y0 + f1 * y1)
                    t1 = x0 * pc1 + x1 * pc0 + x1 * pc1 - (f0 * y1 + f1 * y0 + f1 * y1)
                    # exact division by prev via its conjugate
                    q0 = (t0 * cj0 + t1 * cj1) // norm
                    q1 = (t0 * cj1 + t1 * cj0 + t1 * cj1) // norm
                    a[i, j, 0] = q0
                    a[i, j, 1] = q1
            prev0 = pc0
            prev1 = pc1
            piv_cols[r] = c
            r += 1
        if r != k:
            raise ValueError("covector stack is not of full row rank")
        fi = 0
        for c in range(n):
            is_piv = False
            for j in range(k):
                if piv_cols[j] == c:
                    is_piv = True
                    break
            if is_piv:
                continue
            kern[idx, fi, c, 0] = prev0
            kern[idx, fi, c, 1] = prev1
            for j in range(k):
                kern[idx, fi, piv_cols[j], 0] = -a[j, c, 0]
                kern[idx, fi, piv_cols[j], 1] = -a[j, c, 1]
            fi += 1
        for block in range(2):
            rows = kern[idx] if block == 0 else red[idx]
            nrows = rows.shape[0]
            for rr in range(nrows):
                g = np.int64(0)
                for c in range(n):
                    for z in range(2):
                        x = rows[rr, c, z]
                        if x < 0:
                            x = -x
                        g = _gcd64(g, x)
                if g > 1:
                    for c in range(n):
                        rows[rr, c, 0] //= g
                        rows[rr, c, 1] //= g
                for c in range(n):
                    if rows[rr, c, 0] != 0 or rows[rr, c, 1] != 0:
                        if _pair_sign(rows[rr, c, 0], rows[rr, c, 1]) < 0:
                            for c2 in range(n):
                                rows[rr, c2, 0] = -rows[rr, c2, 0]
                                rows[rr, c2, 1] = -rows[rr, c2, 1]
                        break
    return red, kern


def pair_to_scalar(a, b) -> Scalar:
    return Scalar(a) + Scalar(b) * PHI


def scalar_to_pair(s: Scalar) -> tuple[int, int]:
    """Invert pair_to_scalar for elements of Z[phi]."""
    d = 2 * s.b
    c = s.a - s.b
    if d.denominator != 1 or c.denominator != 1:
        raise ValueError(f"{s!r} is not in Z[phi]")
    return int(c), int(d)


def pairs_to_scalar_rows(arr) -> list[list[Scalar]]:
    return [[pair_to_scalar(int(e[0]), int(e[1])) for e in row] for row in arr]


def _primitive_pair_row(scalars):
    """Scale a row of Q(sqrt5) scalars to integer pairs with content 1 and a
    positive leading value.  Canonical only up to Z[phi] units."""
    pairs_frac = []
    for s in scalars:
        d = 2 * s.b
        c = s.a - s.b
        pairs_frac.append((c, d))
    dens = [f.denominator for cd in pairs_frac for f in cd]
    mult = lcm(*dens) if dens else 1
    ints = [(int(c * mult), int(d * mult)) for c, d in pairs_frac]
    g = 0
    for c, d in ints:
        g = gcd(g, gcd(abs(c), abs(d)))
    if g > 1:
        ints = [(c // g, d // g) for c, d in ints]
    for c, d in ints:
        if c or d:
            if _pair_sign(c, d) < 0:
                ints = [(-c2, -d2) for c2, d2 in ints]
            break
    return ints


def _nullspace_golden_ref(stacks):
    num, k, n, _ = stacks.shape
    red = np.zeros((num, k, n, 2), dtype=np.int64)
    kern = np.zeros((num, n - k, n, 2), dtype=np.int64)
    for idx in range(num):
        rows = pairs_to_scalar_rows(stacks[idx])
        reduced, pivots = rref(rows, n)
        if len(pivots) != k:
            raise ValueError("covector stack is not of full row rank")
        for j, row in enumerate(reduced):
            red[idx, j] = _primitive_pair_row(row)
        for j, vec in enumerate(kernel_basis(rows, n)):
            kern[idx, j] = _primitive_pair_row(vec)
    return red, kern


def batch_nullspace_golden(stacks):
    stacks = np.ascontiguousarray(stacks, dtype=np.int64)
    if stacks.shape[0] == 0:
        num, k, n, _ = stacks.shape
        return stacks.copy(), np.zeros((num, n - k, n, 2), dtype=np.int64)
    if BACKEND == "numba":
        return _nullspace_golden_jit(stacks)
    return _nullspace_golden_ref(stacks)


# ---------------------------------------------------------------------------
# Pairwise products for containment tests (plain numpy on both backends)


def int_products(covectors, basis_rows):
    """products[h, r] = <covectors[h], basis_rows[r]> over Z."""
    return covectors @ basis_rows.T


def golden_products(covectors, basis_rows):
    """Componentwise products over Z[phi]; returns (comp0, comp1) arrays."""
    a0 = covectors[..., 0]
    a1 = covectors[..., 1]
    b0 = basis_rows[..., 0]
    b1 = basis_rows[..., 1]
    m00 = a0 @ b0.T
    m11 = a1 @ b1.T
    m01 = a0 @ b1.T
    m10 = a1 @ b0.T
    return m00 + m11, m01 + m10 + m11
