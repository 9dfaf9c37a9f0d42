"""Intersection lattices of reflection arrangements.

A flat is identified by its hyperplane mask: the bitset of positive-root
hyperplanes containing it.  Since every flat is the intersection of the
hyperplanes through it, the mask is a faithful key, and containment of flats
is bit-subset testing.  Order convention: x <= y iff mask(x) is a subset of
mask(y), i.e. the whole space sits at the bottom and the origin on top.

Construction is level by level: each node of codimension c is cut by every
hyperplane not already containing it, candidate flats are produced by exact
fraction-free elimination (over Z, or over Z[phi] for H3/H4), and duplicates
collapse through their masks.  I2(m) needs no linear algebra at all: the
lattice is the whole plane, m lines, and the origin.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import kernels
from .coxeter import RootSystem, UnsupportedTypeError
from .exact import IntPolynomial, Scalar, Subspace, rref


def _containment_masks(rs: RootSystem, bases: np.ndarray) -> np.ndarray:
    """Mask of hyperplanes vanishing on each spanning basis, batched.

    bases has shape (num, d, n) over Z or (num, d, n, 2) over Z[phi]; a
    zero-dimensional flat (d == 0) lies on every hyperplane.
    """
    num = bases.shape[0]
    p = rs.positive_count
    powers = (np.uint64(1) << np.arange(p, dtype=np.uint64))[None, :]
    if bases.shape[1] == 0:
        return np.full(num, (np.uint64(1) << np.uint64(p)) - np.uint64(1), dtype=np.uint64)
    if rs.model == "golden":
        a0, a1 = rs.normals[..., 0], rs.normals[..., 1]
        b0, b1 = bases[..., 0], bases[..., 1]
        m00 = np.einsum("pj,cdj->cpd", a0, b0)
        m11 = np.einsum("pj,cdj->cpd", a1, b1)
        m01 = np.einsum("pj,cdj->cpd", a0, b1)
        m10 = np.einsum("pj,cdj->cpd", a1, b0)
        contained = ((m00 + m11) == 0) & ((m01 + m10 + m11) == 0)
    else:
        contained = np.einsum("pj,cdj->cpd", rs.normals, bases) == 0
    on_flat = contained.all(axis=2)
    return (on_flat.astype(np.uint64) * powers).sum(axis=1, dtype=np.uint64)


def _identity_basis(rs: RootSystem) -> np.ndarray:
    n = rs.rank
    if rs.model == "golden":
        eye = np.zeros((n, n, 2), dtype=np.int64)
        for i in range(n):
            eye[i, i, 0] = 1
        return eye
    return np.eye(n, dtype=np.int64)


class IntersectionLattice:
    """Flats ordered bottom-up by codimension, masks ascending per level."""

    def __init__(self, rs, masks, dims, anns, bases):
        self.rs = rs
        self.node_masks = masks
        self.node_dims = dims
        self._anns = anns
        self._bases = bases
        self.hyperplane_count = rs.positive_count
        self.mask_index = {int(m): i for i, m in enumerate(masks)}
        tops = np.nonzero(dims == dims.min())[0]
        if dims.min() != 0 or tops.size != 1:
            raise AssertionError("lattice has no unique minimal flat")
        self.top_index = int(tops[0])
        self.bottom_index = 0
        self._mu_rows: dict[int, dict[int, int]] = {}

    @property
    def num_nodes(self) -> int:
        return self.node_masks.size

    def leq(self, i: int, j: int) -> bool:
        return bool((self.node_masks[i] & ~self.node_masks[j]) == 0)

    @cached_property
    def _up_csr(self):
        m = self.node_masks
        below = (m[:, None] & ~m[None, :]) == 0
        indptr = np.zeros(self.num_nodes + 1, dtype=np.int64)
        counts = below.sum(axis=1)
        np.cumsum(counts, out=indptr[1:])
        indices = np.nonzero(below)[1].astype(np.int64)
        return indptr, indices

    @cached_property
    def chi_rows(self) -> np.ndarray:
        """Row x: ascending coefficients of the characteristic polynomial of
        the arrangement restricted to flat x (indexed by dimension)."""
        indptr, indices = self._up_csr
        return kernels.chi_table(
            indptr, indices, self.node_masks, self.node_dims, self.rs.rank + 1
        )

    def char_poly_upper(self, i: int) -> IntPolynomial:
        return IntPolynomial(self.chi_rows[i])

    def mobius(self, i: int, j: int) -> int:
        """Mobius function between two flats (0 when incomparable)."""
        if not self.leq(i, j):
            return 0
        row = self._mu_rows.get(i)
        if row is None:
            indptr, indices = self._up_csr
            ups = indices[indptr[i]:indptr[i + 1]]
            row = {}
            for k, y in enumerate(ups):
                if k == 0:
                    row[int(y)] = 1
                    continue
                acc = 0
                my = self.node_masks[y]
                for z in ups[:k]:
                    if (self.node_masks[z] & ~my) == 0:
                        acc += row[int(z)]
                row[int(y)] = -acc
            self._mu_rows[i] = row
        return row[j]

    def node_subspace(self, i: int) -> Subspace:
        """The flat as an exact subspace of Q(sqrt5)^n."""
        if self._bases is None:
            raise UnsupportedTypeError(
                "the dihedral model has no coordinates; flats are index sets"
            )
        basis = self._bases[i]
        if self.rs.model == "golden":
            rows = kernels.pairs_to_scalar_rows(basis)
        else:
            rows = [[Scalar(int(x)) for x in row] for row in basis]
        return Subspace.from_rows(rows, self.rs.rank)

    def node_annihilator_rows(self, i: int):
        if self._anns is None:
            raise UnsupportedTypeError(
                "the dihedral model has no coordinates; flats are index sets"
            )
        return self._anns[i]

    def flat_mask(self, positive_indices) -> int:
        """Mask of the intersection of the given hyperplanes (which need not
        be independent); the result indexes into mask_index."""
        chosen = sorted(set(int(h) for h in positive_indices))
        rs = self.rs
        if rs.model == "dihedral":
            if not chosen:
                return 0
            if len(chosen) == 1:
                return 1 << chosen[0]
            return (1 << rs.positive_count) - 1
        mask = 0
        ann = np.zeros((0, rs.rank, 2) if rs.model == "golden" else (0, rs.rank), dtype=np.int64)
        nullspace = (
            kernels.batch_nullspace_golden if rs.model == "golden" else kernels.batch_nullspace_int
        )
        for h in chosen:
            if (mask >> h) & 1:
                continue
            stack = np.concatenate([ann, rs.normals[h][None]], axis=0)
            red, kern = nullspace(stack[None])
            ann = red[0]
            mask = int(_containment_masks(rs, kern)[0])
        return mask

    def exponents(self) -> tuple[int, ...]:
        """Roots of the bottom characteristic polynomial, ascending; the
        polynomial of a reflection arrangement always splits over Z."""
        chi = self.char_poly_upper(self.bottom_index)
        roots = chi.integer_roots()
        if len(roots) != chi.degree:
            raise AssertionError("characteristic polynomial did not split over Z")
        return roots

    def sum_identity(self) -> tuple[IntPolynomial, bool]:
        """Sum of restricted characteristic polynomials over every flat, and
        whether it collapses to t^(dim of bottom flat)."""
        total = IntPolynomial(self.chi_rows.sum(axis=0))
        expected = IntPolynomial.t_power(int(self.node_dims[self.bottom_index]))
        return total, total == expected


def build_lattice(rs: RootSystem, seed_hyperplanes=()) -> IntersectionLattice:
    """Intersection lattice of the reflection arrangement, or of the interval
    above the flat cut out by seed_hyperplanes (positive root indices)."""
    if rs.model == "dihedral":
        if seed_hyperplanes:
            raise UnsupportedTypeError("interval lattices are not defined for I2(m) here")
        return _dihedral_lattice(rs)
    n = rs.rank
    p = rs.positive_count
    if p > 63:
        raise UnsupportedTypeError(
            f"{rs.ctype.name} has {p} hyperplanes; mask encoding stops at 63"
        )
    golden = rs.model == "golden"
    nullspace = kernels.batch_nullspace_golden if golden else kernels.batch_nullspace_int

    seed = sorted(set(int(h) for h in seed_hyperplanes))
    if seed:
        stack = rs.normals[seed]
        red, kern = nullspace(stack[None])
        bottom_ann, bottom_basis = red[0], kern[0]
        bottom_mask = int(_containment_masks(rs, kern)[0])
    else:
        bottom_ann = np.zeros((0, n, 2) if golden else (0, n), dtype=np.int64)
        bottom_basis = _identity_basis(rs)
        bottom_mask = 0

    node_masks: list[int] = [bottom_mask]
    node_anns = [bottom_ann]
    node_bases = [bottom_basis]
    known = {bottom_mask}
    level = [0]
    while level:
        next_cands = []
        origins = []
        for i in level:
            if node_anns[i].shape[0] == n:
                continue  # zero-dimensional, nothing below
            mask = node_masks[i]
            ann = node_anns[i]
            for h in range(p):
                if not (mask >> h) & 1:
                    next_cands.append(np.concatenate([ann, rs.normals[h][None]], axis=0))
                    origins.append(i)
        if not next_cands:
            break
        batch = np.stack(next_cands)
        red, kern = nullspace(batch)
        cand_masks = _containment_masks(rs, kern)
        fresh: dict[int, int] = {}
        for c, m in enumerate(cand_masks):
            m = int(m)
            if m not in known and m not in fresh:
                fresh[m] = c
        level = []
        for m in sorted(fresh):
            c = fresh[m]
            known.add(m)
            level.append(len(node_masks))
            node_masks.append(m)
            node_anns.append(red[c])
            node_bases.append(kern[c])
    masks = np.array(node_masks, dtype=np.uint64)
    dims = np.array([n - a.shape[0] for a in node_anns], dtype=np.int64)
    return IntersectionLattice(rs, masks, dims, node_anns, node_bases)


def _dihedral_lattice(rs: RootSystem) -> IntersectionLattice:
    m = rs.positive_count
    masks = np.array([0] + [1 << i for i in range(m)] + [(1 << m) - 1], dtype=np.uint64)
    dims = np.array([2] + [1] * m + [0], dtype=np.int64)
    return IntersectionLattice(rs, masks, dims, None, None)


# Convenience wrappers mirroring the method API.


def char_poly_upper(lat: IntersectionLattice, i: int) -> IntPolynomial:
    return lat.char_poly_upper(i)


def mobius(lat: IntersectionLattice, i: int, j: int) -> int:
    return lat.mobius(i, j)


def exponents(lat: IntersectionLattice) -> tuple[int, ...]:
    return lat.exponents()


def sum_identity_check(lat: IntersectionLattice) -> tuple[IntPolynomial, bool]:
    return lat.sum_identity()


def integer_rank(rows) -> int:
    """Exact rank of an integer matrix via fraction-free elimination on
    Python ints (no overflow concerns, no shared code with the batched path)."""
    work = [[int(x) for x in row] for row in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        sel = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if sel is None:
            continue
        work[rank], work[sel] = work[sel], work[rank]
        pivot = work[rank][c]
        for i in range(len(work)):
            if i != rank:
                f = work[i][c]
                work[i] = [(x * pivot - f * y) // prev for x, y in zip(work[i], work[rank])]
        prev = pivot
        rank += 1
    return rank


def golden_rank(pair_rows) -> int:
    """Exact rank of a matrix of (a, b) pairs meaning a + b*phi."""
    rows = kernels.pairs_to_scalar_rows(pair_rows)
    if not rows:
        return 0
    _, pivots = rref(rows, len(rows[0]))
    return len(pivots)
