"""Intersection lattice tests.

Independent oracles used here:

  * brute force: intersect every subset of hyperplanes with exact rational
    row reduction and collect the distinct flats (tiny ranks only);
  * fixed spaces: every flat of a reflection arrangement is the fixed space
    of some group element, so enumerating Fix(w) over the whole group must
    reproduce the node set exactly;
  * a naive Mobius recursion working straight from the definition;
  * classical exponent tables and Bell numbers computed from their own
    recurrences.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from coxlat.coxeter import build_root_system, enumerate_group, parse_type
from coxlat.exact import IntPolynomial, Scalar, Subspace, kernel_basis, rref
from coxlat.kernels import pair_to_scalar, pairs_to_scalar_rows
from coxlat.lattice import (
    IntersectionLattice,
    build_lattice,
    char_poly_upper,
    exponents,
    golden_rank,
    integer_rank,
    mobius,
    sum_identity_check,
)

_CACHE: dict[str, object] = {}


def system(name):
    if name not in _CACHE:
        _CACHE[name] = build_root_system(parse_type(name))
    return _CACHE[name]


def lattice(name):
    key = "L:" + name
    if key not in _CACHE:
        _CACHE[key] = build_lattice(system(name))
    return _CACHE[key]


def _normal_scalars(rs, h):
    if rs.model == "golden":
        return [pair_to_scalar(int(a), int(b)) for a, b in rs.normals[h]]
    return [Scalar(int(x)) for x in rs.normals[h]]


def _mask_of_vectors(rs, vectors):
    """Hyperplanes vanishing on every vector of an exact spanning set."""
    mask = 0
    for h in range(rs.positive_count):
        normal = _normal_scalars(rs, h)
        if all(
            sum((c * v for c, v in zip(normal, vec)), Scalar(0)) == Scalar(0)
            for vec in vectors
        ):
            mask |= 1 << h
    return mask


def brute_force_masks(rs):
    """Distinct flats as masks, from all hyperplane subsets.  Exponential."""
    p = rs.positive_count
    n = rs.rank
    found = set()
    for r in range(p + 1):
        for subset in combinations(range(p), r):
            rows = [_normal_scalars(rs, h) for h in subset]
            vectors = kernel_basis(rows, n) if rows else [
                [Scalar(1 if i == j else 0) for j in range(n)] for i in range(n)
            ]
            found.add(_mask_of_vectors(rs, vectors))
    return found


def fixed_space_masks(rs, grp):
    """Masks of Fix(w) for every group element w."""
    n = rs.rank
    masks = set()
    for w in range(grp.order):
        perm = grp.perms[w]
        cols = []
        for i in range(n):
            image = int(perm[rs.simple_index[i]])
            if rs.model == "golden":
                cols.append([pair_to_scalar(int(a), int(b)) for a, b in rs.coords[image]])
            else:
                cols.append([Scalar(int(x)) for x in rs.coords[image]])
        rows = []
        for r in range(n):
            row = [cols[c][r] - (Scalar(1) if r == c else Scalar(0)) for c in range(n)]
            rows.append(row)
        vectors = kernel_basis(rows, n)
        masks.add(_mask_of_vectors(rs, vectors))
    return masks


def naive_mobius(masks, cache, x, y):
    """mu(x, y) from the defining recursion, on mask-encoded flats."""
    if masks[x] == masks[y]:
        return 1
    if (masks[x] & ~masks[y]) != 0:
        return 0
    key = (x, y)
    if key not in cache:
        acc = 0
        for z in range(len(masks)):
            if (masks[x] & ~masks[z]) == 0 and (masks[z] & ~masks[y]) == 0 and masks[z] != masks[y]:
                acc += naive_mobius(masks, cache, x, z)
        cache[key] = -acc
    return cache[key]


def bell_numbers(count):
    """Bell triangle recurrence; bell[k] counts set partitions of k points."""
    bells = [1]
    row = [1]
    for _ in range(count):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
        bells.append(row[0])
    return bells


EXPONENTS = {
    "A1": (1,),
    "A2": (1, 2),
    "A3": (1, 2, 3),
    "A4": (1, 2, 3, 4),
    "A5": (1, 2, 3, 4, 5),
    "A6": (1, 2, 3, 4, 5, 6),
    "B2": (1, 3),
    "B3": (1, 3, 5),
    "B4": (1, 3, 5, 7),
    "B5": (1, 3, 5, 7, 9),
    "B6": (1, 3, 5, 7, 9, 11),
    "D4": (1, 3, 3, 5),
    "D5": (1, 3, 4, 5, 7),
    "D6": (1, 3, 5, 5, 7, 9),
    "E6": (1, 4, 5, 7, 8, 11),
    "F4": (1, 5, 7, 11),
    "G2": (1, 5),
    "H3": (1, 5, 9),
    "H4": (1, 11, 19, 29),
    "I2(5)": (1, 4),
    "I2(7)": (1, 6),
    "I2(12)": (1, 11),
    "A2xA1": (1, 1, 2),
    "A1xB2": (1, 1, 3),
}

NODE_COUNTS = {
    "B2": 6,
    "B3": 24,
    "B4": 116,
    "B5": 648,
    "D4": 72,
    "D5": 403,
    "F4": 268,
    "G2": 8,
    "H3": 48,
    "H4": 2104,
}


class TestConstruction:
    @pytest.mark.parametrize("name", ["A2", "B2", "G2", "A3", "B3"])
    def test_brute_force_closure(self, name):
        lat = lattice(name)
        assert set(int(m) for m in lat.node_masks) == brute_force_masks(lat.rs)

    @pytest.mark.parametrize("name", ["A3", "B3", "B4", "D4", "F4", "G2", "H3", "A1xB2"])
    def test_fixed_space_enumeration(self, name):
        rs = system(name)
        grp = enumerate_group(rs)
        assert set(int(m) for m in lattice(name).node_masks) == fixed_space_masks(rs, grp)

    def test_partition_lattice_sizes(self):
        bells = bell_numbers(7)
        for n in range(2, 7):
            assert lattice(f"A{n}").num_nodes == bells[n + 1]

    @pytest.mark.parametrize("name,count", sorted(NODE_COUNTS.items()))
    def test_node_counts(self, name, count):
        assert lattice(name).num_nodes == count

    @pytest.mark.parametrize("name", ["A3", "B3", "D4", "H3", "H4", "F4", "E6"])
    def test_structural_invariants(self, name):
        lat = lattice(name)
        rs = lat.rs
        p = rs.positive_count
        n = rs.rank
        masks = lat.node_masks
        dims = lat.node_dims
        assert int(masks[0]) == 0 and dims[0] == n
        assert int(masks[lat.top_index]) == (1 << p) - 1 and dims[lat.top_index] == 0
        # one node per hyperplane at codimension one, single-bit masks
        cod1 = np.nonzero(dims == n - 1)[0]
        assert sorted(int(masks[i]) for i in cod1) == [1 << h for h in range(p)]
        # every unordered pair of hyperplanes meets in exactly one codim-2 flat
        cod2 = np.nonzero(dims == n - 2)[0]
        pair_total = sum(
            bin(int(masks[i])).count("1") * (bin(int(masks[i])).count("1") - 1) // 2
            for i in cod2
        )
        assert pair_total == p * (p - 1) // 2
        # construction order: dimension never increases, masks ascend per level
        assert (np.diff(dims) <= 0).all()
        for d in range(n + 1):
            level = masks[dims == d]
            assert (np.diff(level.astype(np.uint64).view(np.int64)) > 0).all() or level.size <= 1

    @pytest.mark.parametrize("name", ["A3", "B3", "G2", "H3"])
    def test_codim_equals_normal_rank(self, name):
        lat = lattice(name)
        rs = lat.rs
        for i in range(lat.num_nodes):
            bits = [h for h in range(rs.positive_count) if (int(lat.node_masks[i]) >> h) & 1]
            if rs.model == "golden":
                rank = golden_rank(rs.normals[bits]) if bits else 0
            else:
                rank = integer_rank(rs.normals[bits]) if bits else 0
            assert rank == rs.rank - int(lat.node_dims[i])

    def test_dims_histogram_a3(self):
        # partitions of 4 points by block count: 1, 6, 7, 1
        lat = lattice("A3")
        counts = [int((lat.node_dims == d).sum()) for d in (3, 2, 1, 0)]
        assert counts == [1, 6, 7, 1]


class TestMobiusAndChi:
    @pytest.mark.parametrize("name", ["B2", "A3", "B3", "G2", "D4"])
    def test_naive_mobius_agreement(self, name):
        lat = lattice(name)
        masks = [int(m) for m in lat.node_masks]
        cache: dict = {}
        for x in range(lat.num_nodes):
            for y in range(lat.num_nodes):
                assert lat.mobius(x, y) == naive_mobius(masks, cache, x, y)

    @pytest.mark.parametrize("name", ["B2", "A3", "B3", "G2"])
    def test_chi_rows_from_definition(self, name):
        lat = lattice(name)
        masks = [int(m) for m in lat.node_masks]
        cache: dict = {}
        for x in range(lat.num_nodes):
            coeffs = [0] * (lat.rs.rank + 1)
            for y in range(lat.num_nodes):
                if (masks[x] & ~masks[y]) == 0:
                    coeffs[int(lat.node_dims[y])] += naive_mobius(masks, cache, x, y)
            assert char_poly_upper(lat, x) == IntPolynomial(coeffs)

    def test_mobius_bottom_to_top(self):
        assert mobius(lattice("A3"), 0, lattice("A3").top_index) == -6
        assert mobius(lattice("B2"), 0, lattice("B2").top_index) == 3
        assert mobius(lattice("G2"), 0, lattice("G2").top_index) == 5

    def test_mobius_incomparable_is_zero(self):
        lat = lattice("B2")
        lines = np.nonzero(lat.node_dims == 1)[0]
        assert mobius(lat, int(lines[0]), int(lines[1])) == 0

    @pytest.mark.parametrize(
        "name", ["A4", "B4", "D4", "F4", "H3", "H4", "E6", "I2(7)", "A2xA1"]
    )
    def test_chi_at_one_vanishes(self, name):
        lat = lattice(name)
        for x in range(lat.num_nodes):
            value = char_poly_upper(lat, x).evaluate(1)
            assert value == (1 if x == lat.top_index else 0)

    def test_b2_sum_identity_by_hand(self):
        lat = lattice("B2")
        total, ok = sum_identity_check(lat)
        assert ok
        assert char_poly_upper(lat, 0) == IntPolynomial.from_int_roots([1, 3])
        line_polys = [char_poly_upper(lat, int(i)) for i in np.nonzero(lat.node_dims == 1)[0]]
        assert all(p == IntPolynomial((-1, 1)) for p in line_polys)
        assert char_poly_upper(lat, lat.top_index) == IntPolynomial.one()

    @pytest.mark.parametrize(
        "name",
        ["A2", "A3", "A4", "A5", "B2", "B3", "B4", "B5", "D4", "D5", "F4", "G2",
         "H3", "H4", "E6", "I2(5)", "I2(8)", "A2xA1", "A1xB2"],
    )
    def test_sum_identity(self, name):
        total, ok = sum_identity_check(lattice(name))
        assert ok
        assert total == IntPolynomial.t_power(system(name).rank)


class TestExponents:
    @pytest.mark.parametrize("name,exps", sorted(EXPONENTS.items()))
    def test_exponent_tables(self, name, exps):
        assert exponents(lattice(name)) == exps

    @pytest.mark.parametrize("name", sorted(EXPONENTS))
    def test_exponent_product_is_group_order(self, name):
        rs = system(name)
        prod = 1
        for e in exponents(lattice(name)):
            prod *= e + 1
        assert prod == rs.ctype.order


class TestDihedral:
    def test_shape(self):
        lat = lattice("I2(7)")
        assert lat.num_nodes == 9
        assert [int(m) for m in lat.node_masks] == [0] + [1 << i for i in range(7)] + [127]
        assert list(lat.node_dims) == [2] + [1] * 7 + [0]

    def test_no_coordinates(self):
        from coxlat.coxeter import UnsupportedTypeError

        lat = lattice("I2(7)")
        with pytest.raises(UnsupportedTypeError):
            lat.node_subspace(0)
        with pytest.raises(UnsupportedTypeError):
            lat.node_annihilator_rows(0)

    def test_flat_mask(self):
        lat = lattice("I2(7)")
        assert lat.flat_mask([]) == 0
        assert lat.flat_mask([3]) == 8
        assert lat.flat_mask([0, 5]) == 127
        assert lat.flat_mask([2, 2]) == 4

    def test_no_interval_lattice(self):
        from coxlat.coxeter import UnsupportedTypeError

        with pytest.raises(UnsupportedTypeError):
            build_lattice(system("I2(7)"), seed_hyperplanes=[0])


class TestFlatMask:
    @pytest.mark.parametrize("name", ["A3", "B3", "H3"])
    def test_round_trip(self, name):
        lat = lattice(name)
        for i in range(lat.num_nodes):
            bits = [h for h in range(lat.hyperplane_count) if (int(lat.node_masks[i]) >> h) & 1]
            assert lat.flat_mask(bits) == int(lat.node_masks[i])

    def test_dependent_sets(self):
        lat = lattice("B2")
        # two distinct lines in the plane already cut down to the origin
        assert lat.flat_mask([0, 1]) == (1 << 4) - 1
        lat3 = lattice("A3")
        rs = lat3.rs
        # a sum of two simple roots is dependent on them
        i, j = rs.simple_index[0], rs.simple_index[1]
        combined = rs.coords[i] + rs.coords[j]
        k = next(
            p for p in range(rs.positive_count) if np.array_equal(rs.coords[p], combined)
        )
        small = lat3.flat_mask([i, j])
        assert lat3.flat_mask([i, j, k]) == small
        assert (small >> k) & 1

    @pytest.mark.parametrize("name", ["A3", "B3"])
    def test_single_hyperplanes(self, name):
        lat = lattice(name)
        for h in range(lat.hyperplane_count):
            m = lat.flat_mask([h])
            assert m == 1 << h
            assert m in lat.mask_index


class TestSubspaces:
    @pytest.mark.parametrize("name", ["A3", "B3", "H3"])
    def test_node_subspaces(self, name):
        lat = lattice(name)
        rs = lat.rs
        for i in range(lat.num_nodes):
            sub = lat.node_subspace(i)
            assert sub.dim == int(lat.node_dims[i])
            for h in range(rs.positive_count):
                normal = _normal_scalars(rs, h)
                on_flat = all(
                    sum((c * v for c, v in zip(normal, vec)), Scalar(0)) == Scalar(0)
                    for vec in sub.basis
                )
                assert on_flat == bool((int(lat.node_masks[i]) >> h) & 1)

    def test_lattice_order_matches_inclusion(self):
        lat = lattice("B3")
        idx = list(range(lat.num_nodes))
        for i in idx:
            si = lat.node_subspace(i)
            for j in idx:
                assert lat.leq(i, j) == lat.node_subspace(j).is_subspace_of(si)


class TestIntervalLattices:
    @pytest.mark.parametrize("name", ["A3", "B3", "D4"])
    def test_single_seed_matches_upper_interval(self, name):
        full = lattice(name)
        rs = full.rs
        for h in [0, rs.positive_count - 1]:
            part = build_lattice(rs, seed_hyperplanes=[h])
            want = {int(m) for m in full.node_masks if (int(m) >> h) & 1}
            assert {int(m) for m in part.node_masks} == want
            node = full.mask_index[1 << h]
            assert char_poly_upper(part, 0) == char_poly_upper(full, node)
            total, ok = sum_identity_check(part)
            assert ok

    def test_two_seed_interval_a3(self):
        full = lattice("A3")
        rs = full.rs
        seed = [rs.simple_index[0], rs.simple_index[2]]
        part = build_lattice(rs, seed_hyperplanes=seed)
        bottom = int(part.node_masks[0])
        assert {int(m) for m in part.node_masks} == {
            int(m) for m in full.node_masks if (int(m) & bottom) == bottom
        }
        assert part.node_dims[0] == 1

    def test_e7_interval_above_orthogonal_pair(self):
        rs = system("E7")
        seed = [rs.simple_index[0], rs.simple_index[1]]
        part = build_lattice(rs, seed_hyperplanes=seed)
        assert part.num_nodes == 1480
        assert part.node_dims[0] == 5
        chi = char_poly_upper(part, 0)
        assert chi.integer_roots() == (1, 5, 7, 9, 11)
        assert chi.evaluate(-1) == -11520
        total, ok = sum_identity_check(part)
        assert ok


class TestExactRanks:
    def test_integer_rank_against_rational_rre(self):
        rng = np.random.default_rng(77)
        for _ in range(60):
            k = int(rng.integers(1, 5))
            n = int(rng.integers(k, 7))
            mat = rng.integers(-6, 7, size=(k, n))
            if rng.integers(2):
                mat[k - 1] = mat[0] * int(rng.integers(-2, 3))
            rows = [[Scalar(int(x)) for x in row] for row in mat]
            assert integer_rank(mat) == len(rref(rows, n)[1])

    def test_golden_rank_cases(self):
        one = (1, 0)
        phi = (0, 1)
        zero = (0, 0)
        assert golden_rank(np.array([[one, phi], [phi, (1, 1)]], dtype=np.int64)) == 1
        assert golden_rank(np.array([[one, zero], [zero, phi]], dtype=np.int64)) == 2
        assert golden_rank(np.zeros((0, 3), dtype=np.int64)) == 0
