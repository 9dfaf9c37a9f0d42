"""Compiled kernels against their rational-arithmetic reference twins.

Every hot kernel ships in two implementations; these tests pin them to each
other on random inputs and on real group data, and check the algebraic
contracts (primitive rows, annihilation, rank errors) directly.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from coxlat import kernels
from coxlat.coxeter import build_root_system, enumerate_group, parse_type
from coxlat.exact import Scalar, Subspace, rref
from coxlat.kernels import (
    _chi_table_jit,
    _chi_table_ref,
    _coset_hist_jit,
    _coset_hist_ref,
    _nullspace_golden_jit,
    _nullspace_golden_ref,
    _nullspace_int_jit,
    _nullspace_int_ref,
    golden_products,
    int_products,
    pair_to_scalar,
)

RNG = np.random.default_rng(20240817)


def _fraction_rank(mat) -> int:
    rows = [[Scalar(int(x)) for x in row] for row in mat]
    if not rows:
        return 0
    return len(rref(rows, len(rows[0]))[1])


def _golden_rank_pairs(mat) -> int:
    rows = [[pair_to_scalar(int(e[0]), int(e[1])) for e in row] for row in mat]
    if not rows:
        return 0
    return len(rref(rows, len(rows[0]))[1])


def _random_int_stacks(num, k, n):
    out = np.empty((num, k, n), dtype=np.int64)
    filled = 0
    while filled < num:
        cand = RNG.integers(-4, 5, size=(k, n))
        if _fraction_rank(cand) == k:
            out[filled] = cand
            filled += 1
    return out


def _random_golden_stacks(num, k, n):
    out = np.empty((num, k, n, 2), dtype=np.int64)
    filled = 0
    while filled < num:
        cand = RNG.integers(-2, 3, size=(k, n, 2))
        if _golden_rank_pairs(cand) == k:
            out[filled] = cand
            filled += 1
    return out


class TestNullspaceInt:
    def test_twins_byte_identical(self):
        for k, n in [(1, 3), (2, 4), (3, 5), (5, 7), (6, 7)]:
            stacks = _random_int_stacks(40, k, n)
            red_j, kern_j = _nullspace_int_jit(stacks.copy())
            red_r, kern_r = _nullspace_int_ref(stacks.copy())
            assert np.array_equal(red_j, red_r)
            assert np.array_equal(kern_j, kern_r)

    def test_kernel_annihilates_and_is_primitive(self):
        stacks = _random_int_stacks(60, 3, 6)
        red, kern = _nullspace_int_jit(stacks.copy())
        prod = np.einsum("ikn,idn->ikd", stacks, kern)
        assert not prod.any()
        for block in (red, kern):
            for mat in block:
                for row in mat:
                    g = 0
                    for x in row:
                        g = gcd(g, abs(int(x)))
                    assert g == 1
                    lead = next(int(x) for x in row if x)
                    assert lead > 0

    def test_row_space_preserved(self):
        stacks = _random_int_stacks(25, 3, 5)
        red, _ = _nullspace_int_jit(stacks.copy())
        for orig, rows in zip(stacks, red):
            s1 = Subspace.from_rows([[Scalar(int(x)) for x in r] for r in orig], 5)
            s2 = Subspace.from_rows([[Scalar(int(x)) for x in r] for r in rows], 5)
            assert s1 == s2

    def test_rank_deficient_raises(self):
        bad = np.array([[[1, 2, 3], [2, 4, 6]]], dtype=np.int64)
        with pytest.raises(ValueError):
            _nullspace_int_jit(bad.copy())
        with pytest.raises(ValueError):
            _nullspace_int_ref(bad.copy())

    def test_empty_batch(self):
        red, kern = kernels.batch_nullspace_int(np.zeros((0, 2, 4), dtype=np.int64))
        assert red.shape == (0, 2, 4)
        assert kern.shape == (0, 2, 4)


class TestNullspaceGolden:
    def test_twins_span_equal(self):
        for k, n in [(1, 3), (2, 4), (3, 4)]:
            stacks = _random_golden_stacks(15, k, n)
            red_j, kern_j = _nullspace_golden_jit(stacks.copy())
            red_r, kern_r = _nullspace_golden_ref(stacks.copy())
            for a, b in [(red_j, red_r), (kern_j, kern_r)]:
                for mj, mr in zip(a, b):
                    sj = Subspace.from_rows(kernels.pairs_to_scalar_rows(mj), n)
                    sr = Subspace.from_rows(kernels.pairs_to_scalar_rows(mr), n)
                    assert sj == sr

    def test_kernel_annihilates(self):
        stacks = _random_golden_stacks(10, 2, 4)
        _, kern = _nullspace_golden_jit(stacks.copy())
        for stack, basis in zip(stacks, kern):
            for covec in kernels.pairs_to_scalar_rows(stack):
                for vec in kernels.pairs_to_scalar_rows(basis):
                    acc = Scalar(0)
                    for c, v in zip(covec, vec):
                        acc = acc + c * v
                    assert acc == Scalar(0)

    def test_rank_deficient_raises(self):
        phi_mult = np.array(
            [[[(0, 1), (1, 1)], [(1, 1), (1, 2)]]], dtype=np.int64
        )  # second row is phi times the first
        with pytest.raises(ValueError):
            _nullspace_golden_jit(phi_mult.copy())
        with pytest.raises(ValueError):
            _nullspace_golden_ref(phi_mult.copy())


class TestChiTable:
    @staticmethod
    def _csr_from_masks(masks):
        masks = np.asarray(masks, dtype=np.uint64)
        up = (masks[:, None] & ~masks[None, :]) == 0
        indptr = np.zeros(masks.size + 1, dtype=np.int64)
        np.cumsum(up.sum(axis=1), out=indptr[1:])
        indices = np.nonzero(up)[1].astype(np.int64)
        return indptr, indices

    def test_boolean_square(self):
        # full subset lattice on two hyperplanes: chi at bottom is (t-1)^2
        masks = [0b00, 0b01, 0b10, 0b11]
        dims = np.array([2, 1, 1, 0], dtype=np.int64)
        indptr, indices = self._csr_from_masks(masks)
        for fn in (_chi_table_jit, _chi_table_ref):
            out = fn(indptr, indices, np.asarray(masks, np.uint64), dims, 3)
            assert list(out[0]) == [1, -2, 1]
            assert list(out[3]) == [1, 0, 0]

    def test_twins_match_on_group_lattice(self):
        from coxlat.lattice import build_lattice

        for name in ["A3", "B3", "H3"]:
            lat = build_lattice(build_root_system(parse_type(name)))
            indptr, indices = lat._up_csr
            a = _chi_table_jit(indptr, indices, lat.node_masks, lat.node_dims, lat.rs.rank + 1)
            b = _chi_table_ref(indptr, indices, lat.node_masks, lat.node_dims, lat.rs.rank + 1)
            assert np.array_equal(a, b)


class TestCosetHist:
    @pytest.mark.parametrize("name", ["A2", "B2", "A1xA1", "B3"])
    def test_twins_match(self, name):
        rs = build_root_system(parse_type(name))
        grp = enumerate_group(rs)
        w_list = np.arange(grp.order, dtype=np.int64)
        rsupp = rs.root_supports.astype(np.int64)
        nsubsets = 1 << rs.rank
        a = _coset_hist_jit(grp.perms, grp.inv_perms, w_list, rsupp, rs.positive_count, nsubsets)
        b = _coset_hist_ref(grp.perms, grp.inv_perms, w_list, rsupp, rs.positive_count, nsubsets)
        assert np.array_equal(a, b)
        # each w contributes |W| cosets worth of group elements
        assert (a.sum(axis=1) == grp.order).all()


class TestProducts:
    def test_int_products(self):
        a = RNG.integers(-9, 10, size=(7, 4))
        b = RNG.integers(-9, 10, size=(5, 4))
        out = int_products(a, b)
        for i in range(7):
            for j in range(5):
                assert out[i, j] == sum(int(x) * int(y) for x, y in zip(a[i], b[j]))

    def test_golden_products(self):
        a = RNG.integers(-3, 4, size=(6, 3, 2))
        b = RNG.integers(-3, 4, size=(4, 3, 2))
        c0, c1 = golden_products(a, b)
        for i in range(6):
            for j in range(4):
                acc = Scalar(0)
                for x, y in zip(a[i], b[j]):
                    acc = acc + pair_to_scalar(int(x[0]), int(x[1])) * pair_to_scalar(
                        int(y[0]), int(y[1])
                    )
                assert acc == pair_to_scalar(int(c0[i, j]), int(c1[i, j]))


class TestBackendDispatch:
    def test_backend_value(self):
        from coxlat.backend import BACKEND

        assert BACKEND in {"numba", "numpy"}

    def test_dispatchers_run(self):
        stacks = _random_int_stacks(3, 2, 4)
        red, kern = kernels.batch_nullspace_int(stacks)
        assert red.shape == (3, 2, 4) and kern.shape == (3, 2, 4)
