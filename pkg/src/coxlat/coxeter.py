"""Finite Coxeter groups acting as permutations of their root systems.

Roots live in the simple-root basis: crystallographic types use integer
coordinates, H3/H4 use pairs (a, b) meaning a + b*phi, and I2(m) is handled
as pure index combinatorics on 2m roots (angle k*pi/m).  Group elements are
stored as uint8 permutations of the root list, with the positive roots at
indices 0..P-1 and the negative of root p at p + P.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from math import factorial

import numpy as np

from .exact import Scalar, Subspace, kernel_basis
from .kernels import pair_to_scalar

DEFAULT_CAP = 2_000_000

_FAMILIES = "ABCDEFGHI"


class UnsupportedTypeError(ValueError):
    """Raised for type strings outside the supported finite families."""


class EnumerationCapError(RuntimeError):
    """Raised when a group order exceeds the enumeration cap."""


@dataclass(frozen=True)
class CoxeterFactor:
    """One irreducible factor, e.g. A3, H4, or I2(7) (bond = 7)."""

    family: str
    rank: int
    bond: int | None = None

    def __post_init__(self):
        fam, n = self.family, self.rank
        ok = (
            (fam == "A" and n >= 1)
            or (fam in ("B", "C") and n >= 2)
            or (fam == "D" and n >= 4)
            or (fam == "E" and n in (6, 7, 8))
            or (fam == "F" and n == 4)
            or (fam == "G" and n == 2)
            or (fam == "H" and n in (3, 4))
            or (fam == "I" and n == 2 and self.bond is not None and self.bond >= 3)
        )
        if not ok:
            raise UnsupportedTypeError(f"no finite Coxeter type {self._spelling()}")
        if fam != "I" and self.bond is not None:
            raise UnsupportedTypeError("bond parameter only makes sense for I2(m)")

    def _spelling(self) -> str:
        if self.family == "I":
            return f"I2({self.bond})"
        return f"{self.family}{self.rank}"

    @property
    def name(self) -> str:
        return self._spelling()

    @property
    def order(self) -> int:
        fam, n = self.family, self.rank
        if fam == "A":
            return factorial(n + 1)
        if fam in ("B", "C"):
            return 2**n * factorial(n)
        if fam == "D":
            return 2 ** (n - 1) * factorial(n)
        if fam == "E":
            return {6: 51840, 7: 2903040, 8: 696729600}[n]
        if fam == "F":
            return 1152
        if fam == "G":
            return 12
        if fam == "H":
            return {3: 120, 4: 14400}[n]
        return 2 * self.bond

    @property
    def positive_count(self) -> int:
        fam, n = self.family, self.rank
        if fam == "A":
            return n * (n + 1) // 2
        if fam in ("B", "C"):
            return n * n
        if fam == "D":
            return n * (n - 1)
        if fam == "E":
            return {6: 36, 7: 63, 8: 120}[n]
        if fam == "F":
            return 24
        if fam == "G":
            return 6
        if fam == "H":
            return {3: 15, 4: 60}[n]
        return self.bond


@dataclass(frozen=True)
class CoxeterType:
    """A finite Coxeter type, possibly reducible (product of factors)."""

    factors: tuple[CoxeterFactor, ...]

    def __post_init__(self):
        if not self.factors:
            raise UnsupportedTypeError("empty type")

    @property
    def name(self) -> str:
        return "x".join(f.name for f in self.factors)

    @property
    def rank(self) -> int:
        return sum(f.rank for f in self.factors)

    @property
    def order(self) -> int:
        total = 1
        for f in self.factors:
            total *= f.order
        return total

    @property
    def positive_count(self) -> int:
        return sum(f.positive_count for f in self.factors)

    @property
    def is_irreducible(self) -> bool:
        return len(self.factors) == 1

    def __str__(self):
        return self.name


# ---------------------------------------------------------------------------
# Cartan, Gram, and Coxeter-bond data per factor.
#
# Conventions: cartan[i][j] = 2(a_i, a_j)/(a_i, a_i), so the reflection s_i
# acts on coordinates by v[i] -= cartan[i] . v.  The Gram matrix is scaled to
# integers per factor (factor 2 for F4); scaling a factor's hyperplane
# normals changes nothing downstream.


def _chain_edges(n):
    return [(i, i + 1) for i in range(n - 1)]


def _factor_edges(f: CoxeterFactor):
    """Edges of the Coxeter diagram with their bond labels, 0-based."""
    fam, n = f.family, f.rank
    if fam == "A":
        return [(i, j, 3) for i, j in _chain_edges(n)]
    if fam in ("B", "C"):
        edges = [(i, j, 3) for i, j in _chain_edges(n - 1)]
        edges.append((n - 2, n - 1, 4))
        return edges
    if fam == "D":
        edges = [(i, j, 3) for i, j in _chain_edges(n - 1)]
        edges.append((n - 3, n - 1, 3))
        return edges
    if fam == "E":
        edges = [(0, 2, 3), (1, 3, 3)]
        edges += [(i, i + 1, 3) for i in range(2, n - 1)]
        return edges
    if fam == "F":
        return [(0, 1, 3), (1, 2, 4), (2, 3, 3)]
    if fam == "G":
        return [(0, 1, 6)]
    if fam == "H":
        return [(0, 1, 5)] + [(i, i + 1, 3) for i in range(1, n - 1)]
    return [(0, 1, f.bond)]


def _factor_tables(f: CoxeterFactor):
    """(cartan, gram, coxeter_bonds, golden) for one coordinate factor.

    cartan and gram are (n, n) int arrays for crystallographic factors and
    (n, n, 2) phi-pair arrays for H3/H4.
    """
    fam, n = f.family, f.rank
    bonds = np.full((n, n), 2, dtype=np.int64)
    np.fill_diagonal(bonds, 1)
    for i, j, m in _factor_edges(f):
        bonds[i, j] = bonds[j, i] = m

    if fam == "H":
        cartan = np.zeros((n, n, 2), dtype=np.int64)
        for i in range(n):
            cartan[i, i] = (2, 0)
        for i, j, m in _factor_edges(f):
            entry = (0, -1) if m == 5 else (-1, 0)
            cartan[i, j] = cartan[j, i] = entry
        return cartan, cartan.copy(), bonds, True

    if fam in ("A", "D", "E"):
        gram = 2 * np.eye(n, dtype=np.int64)
        for i, j, _ in _factor_edges(f):
            gram[i, j] = gram[j, i] = -1
        return gram.copy(), gram, bonds, False

    if fam in ("B", "C"):
        gram = 2 * np.eye(n, dtype=np.int64)
        gram[n - 1, n - 1] = 1
        for i, j, _ in _factor_edges(f):
            gram[i, j] = gram[j, i] = -1
        cartan = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                cartan[i, j] = 2 * gram[i, j] // gram[i, i]
        return cartan, gram, bonds, False

    if fam == "F":
        gram = np.array(
            [[4, -2, 0, 0], [-2, 4, -2, 0], [0, -2, 2, -1], [0, 0, -1, 2]],
            dtype=np.int64,
        )
        cartan = np.zeros((4, 4), dtype=np.int64)
        for i in range(4):
            for j in range(4):
                cartan[i, j] = 2 * gram[i, j] // gram[i, i]
        return cartan, gram, bonds, False

    if fam == "G":
        gram = np.array([[2, -3], [-3, 6]], dtype=np.int64)
        cartan = np.array([[2, -3], [-1, 2]], dtype=np.int64)
        return cartan, gram, bonds, False

    raise UnsupportedTypeError(f"no coordinate model for {f.name}")


_PRODUCT_ALIASES = {3: ("A", 2), 4: ("B", 2), 6: ("G", 2)}


def _coordinate_factors(ctype: CoxeterType) -> list[CoxeterFactor]:
    """Factors rewritten so every one has a coordinate model; only crystal
    bonds are allowed for I2 inside products."""
    out = []
    for f in ctype.factors:
        if f.family == "I":
            alias = _PRODUCT_ALIASES.get(f.bond)
            if alias is None:
                raise UnsupportedTypeError(
                    f"I2({f.bond}) is only supported as a standalone type, not in products"
                )
            out.append(CoxeterFactor(alias[0], alias[1]))
        else:
            out.append(f)
    return out


class RootSystem:
    """Root data of a finite Coxeter type.

    Attributes of interest: ``positive_count`` (P), ``coords`` with positives
    at 0..P-1 sorted by (height, coordinates) and negatives mirrored at
    p + P, ``normals`` (integer or phi-pair hyperplane covectors, positives
    only), ``gen_perms`` (simple reflections as root permutations),
    ``root_supports`` (bitmask of simple coordinates per positive root), and
    ``simple_index`` (root index of each simple root).
    """

    def __init__(self, ctype: CoxeterType):
        for f in ctype.factors:
            if f.family == "E" and f.rank == 8:
                raise UnsupportedTypeError(
                    "E8 is not supported: 696729600 elements is past the design envelope"
                )
        self.ctype = ctype
        self.rank = ctype.rank
        self.positive_count = ctype.positive_count
        self.num_roots = 2 * self.positive_count
        if len(ctype.factors) == 1 and ctype.factors[0].family == "I":
            self._build_dihedral(ctype.factors[0].bond)
        else:
            self._build_coordinates(_coordinate_factors(ctype))
        self.gen_perms.flags.writeable = False
        self.root_supports.flags.writeable = False
        self._parabolic_orders: dict[frozenset, int] = {}

    # -- construction -------------------------------------------------

    def _build_dihedral(self, m: int):
        self.model = "dihedral"
        self.dihedral_bond = m
        self.coords = None
        self.normals = None
        n_roots = 2 * m
        idx = np.arange(n_roots, dtype=np.int64)
        gens = np.empty((2, n_roots), dtype=np.uint8)
        gens[0] = (m - idx) % n_roots           # reflection in root 0
        gens[1] = (3 * m - 2 - idx) % n_roots   # reflection in root m-1
        self.gen_perms = gens
        self.simple_index = np.array([0, m - 1], dtype=np.int64)
        sup = np.full(m, 3, dtype=np.int64)
        sup[0] = 1
        sup[m - 1] = 2
        if m == 2:  # unreachable (bond >= 3) but keeps the formula honest
            sup[0], sup[1] = 1, 2
        self.root_supports = sup
        self.coxeter_bonds = np.array([[1, m], [m, 1]], dtype=np.int64)

    def _build_coordinates(self, factors: list[CoxeterFactor]):
        n = self.rank
        tables = [_factor_tables(f) for f in factors]
        golden = any(t[3] for t in tables)
        self.model = "golden" if golden else "int"
        self.dihedral_bond = None

        shape = (n, n, 2) if golden else (n, n)
        cartan = np.zeros(shape, dtype=np.int64)
        gram = np.zeros(shape, dtype=np.int64)
        bonds = np.full((n, n), 2, dtype=np.int64)
        np.fill_diagonal(bonds, 1)
        at = 0
        for (c, g, b, fac_golden), f in zip(tables, factors):
            k = f.rank
            sl = slice(at, at + k)
            if golden and not fac_golden:
                cartan[sl, sl, 0] = c
                gram[sl, sl, 0] = g
            else:
                cartan[sl, sl] = c
                gram[sl, sl] = g
            bonds[sl, sl] = b
            at += k
        self.coxeter_bonds = bonds

        # close the simple roots under all simple reflections
        if golden:
            vecs = np.zeros((n, n, 2), dtype=np.int64)
            for i in range(n):
                vecs[i, i, 0] = 1
        else:
            vecs = np.eye(n, dtype=np.int64)
        seen = {v.tobytes() for v in vecs}
        frontier = vecs
        all_rows = [vecs]
        while frontier.shape[0]:
            images = []
            for i in range(n):
                images.append(self._apply_simple(cartan, frontier, i))
            cand = np.concatenate(images, axis=0)
            fresh = []
            for row in cand:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    fresh.append(row)
            frontier = np.array(fresh, dtype=np.int64).reshape((len(fresh),) + vecs.shape[1:])
            if frontier.shape[0]:
                all_rows.append(frontier)
        roots = np.concatenate(all_rows, axis=0)
        if roots.shape[0] != self.num_roots:
            raise AssertionError(
                f"{self.ctype.name}: closed on {roots.shape[0]} roots, expected {self.num_roots}"
            )

        # split by sign and sort positives by (height, coordinates)
        def value(pair_or_int):
            if golden:
                return pair_to_scalar(int(pair_or_int[0]), int(pair_or_int[1]))
            return Scalar(int(pair_or_int))

        positives = []
        for row in roots:
            vals = [value(e) for e in row]
            signs = {v._sign() for v in vals if v}
            if signs == {1}:
                height = Scalar(0)
                for v in vals:
                    height = height + v
                positives.append((height, tuple(vals), row))
            elif signs != {-1}:
                raise AssertionError("root with mixed coordinate signs")
        if len(positives) != self.positive_count:
            raise AssertionError("positive root count mismatch")
        positives.sort(key=lambda item: (item[0], item[1]))
        pos_arr = np.array([item[2] for item in positives], dtype=np.int64)
        self.coords = np.concatenate([pos_arr, -pos_arr], axis=0)
        self.coords.flags.writeable = False

        index = {row.tobytes(): i for i, row in enumerate(self.coords)}
        gens = np.empty((n, self.num_roots), dtype=np.uint8)
        for i in range(n):
            images = self._apply_simple(cartan, self.coords, i)
            gens[i] = [index[row.tobytes()] for row in images]
        self.gen_perms = gens

        simple = np.empty(n, dtype=np.int64)
        for j in range(n):
            if golden:
                e = np.zeros((n, 2), dtype=np.int64)
                e[j, 0] = 1
            else:
                e = np.zeros(n, dtype=np.int64)
                e[j] = 1
            simple[j] = index[e.tobytes()]
        self.simple_index = simple

        if golden:
            a0, a1 = pos_arr[..., 0], pos_arr[..., 1]
            g0, g1 = gram[..., 0], gram[..., 1]
            n0 = a0 @ g0 + a1 @ g1
            n1 = a0 @ g1 + a1 @ (g0 + g1)
            self.normals = np.stack([n0, n1], axis=-1)
            nonzero = (pos_arr != 0).any(axis=2)
        else:
            self.normals = pos_arr @ gram
            nonzero = pos_arr != 0
        self.normals.flags.writeable = False
        weights = (1 << np.arange(n, dtype=np.int64))[None, :]
        self.root_supports = (nonzero * weights).sum(axis=1)
        self.cartan = cartan
        self.gram = gram

    @staticmethod
    def _apply_simple(cartan, vecs, i):
        """Images of coordinate rows under the i-th simple reflection."""
        out = vecs.copy()
        if vecs.ndim == 3:
            c0, c1 = cartan[i, :, 0], cartan[i, :, 1]
            v0, v1 = vecs[..., 0], vecs[..., 1]
            coef0 = v0 @ c0 + v1 @ c1
            coef1 = v0 @ c1 + v1 @ (c0 + c1)
            out[:, i, 0] -= coef0
            out[:, i, 1] -= coef1
        else:
            out[:, i] -= vecs @ cartan[i]
        return out

    # -- basic queries -------------------------------------------------

    def neg(self, root_index: int) -> int:
        p = self.positive_count
        return root_index + p if root_index < p else root_index - p

    @cached_property
    def simple_position(self) -> np.ndarray:
        """Map root index -> simple position, -1 elsewhere."""
        table = np.full(self.num_roots, -1, dtype=np.int64)
        for j, r in enumerate(self.simple_index):
            table[r] = j
        return table

    @cached_property
    def positive_of(self) -> np.ndarray:
        """Map root index -> index of the same root up to sign."""
        p = self.positive_count
        table = np.arange(self.num_roots, dtype=np.int64)
        table[p:] -= p
        return table

    @property
    def roots(self) -> list[tuple[Scalar, ...]]:
        if self.coords is None:
            raise UnsupportedTypeError(
                f"I2({self.dihedral_bond}) uses the index model; no coordinates exist"
            )
        out = []
        for row in self.coords:
            if self.model == "golden":
                out.append(tuple(pair_to_scalar(int(e[0]), int(e[1])) for e in row))
            else:
                out.append(tuple(Scalar(int(x)) for x in row))
        return out

    def reflection_perm(self, positive_index: int) -> np.ndarray:
        """The reflection in the hyperplane of the given positive root, as a
        root permutation."""
        if not 0 <= positive_index < self.positive_count:
            raise ValueError("expected a positive root index")
        if self.model == "dihedral":
            m = self.dihedral_bond
            idx = np.arange(2 * m, dtype=np.int64)
            return ((2 * positive_index + m - idx) % (2 * m)).astype(np.uint8)
        word = self._reflection_word(positive_index)
        perm = np.arange(self.num_roots, dtype=np.uint8)
        for g in word:
            perm = self.gen_perms[g][perm]
        return perm

    def _reflection_word(self, positive_index: int) -> list[int]:
        """A word s_{i1}..s_{ik} whose product is the reflection, via
        conjugating a simple reflection down the root's orbit."""
        pos = self.simple_position
        target = positive_index
        prefix: list[int] = []
        while pos[target] < 0:
            # push the root down by any simple reflection lowering its height
            for g in range(self.rank):
                image = int(self.gen_perms[g][target])
                if image < target:
                    prefix.append(g)
                    target = image
                    break
            else:
                raise AssertionError("positive root with no lowering reflection")
        core = int(pos[target])
        return prefix + [core] + prefix[::-1]


def build_root_system(ctype: CoxeterType) -> RootSystem:
    return RootSystem(ctype)


_DIHEDRAL_NAME = re.compile(r"^I2\((\d+)\)$", re.IGNORECASE)
_FACTOR_NAME = re.compile(r"^([A-Ha-h])(\d+)$")


def parse_type(text: str) -> CoxeterType:
    """Parse "A3", "I2(7)", or a product like "A2xA1" into a CoxeterType."""
    factors = []
    for token in text.replace("*", "x").split("x"):
        token = token.strip()
        if not token:
            raise UnsupportedTypeError(f"empty factor in type name {text!r}")
        m = _DIHEDRAL_NAME.match(token)
        if m:
            factors.append(CoxeterFactor("I", 2, bond=int(m.group(1))))
            continue
        m = _FACTOR_NAME.match(token)
        if m:
            factors.append(CoxeterFactor(m.group(1).upper(), int(m.group(2))))
            continue
        raise UnsupportedTypeError(f"cannot parse factor {token!r} in {text!r}")
    return CoxeterType(tuple(factors))


# ---------------------------------------------------------------------------
# Group enumeration


@dataclass(frozen=True)
class GroupElement:
    index: int
    perm: np.ndarray
    det_sign: int
    length: int


class Group:
    """A finite reflection group as uint8 root permutations.

    Elements are enumerated breadth-first by word length, identity first, so
    ``index == 0`` is the identity and the first element of any left coset
    encountered in index order has minimal length in that coset.
    """

    def __init__(self, rs: RootSystem, perms: np.ndarray, lengths: np.ndarray):
        self.rs = rs
        self.perms = perms
        self.lengths = lengths
        self.order = perms.shape[0]
        self.det_signs = np.where(lengths % 2 == 0, 1, -1).astype(np.int8)
        perms.flags.writeable = False
        lengths.flags.writeable = False
        self.det_signs.flags.writeable = False

    @cached_property
    def index_of(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self.perms)}

    @cached_property
    def inv_perms(self) -> np.ndarray:
        n, width = self.perms.shape
        inv = np.empty_like(self.perms)
        cols = np.arange(width, dtype=np.uint8)[None, :]
        np.put_along_axis(inv, self.perms.astype(np.intp), np.broadcast_to(cols, self.perms.shape), axis=1)
        inv.flags.writeable = False
        return inv

    def element(self, index: int) -> GroupElement:
        return GroupElement(
            index=index,
            perm=self.perms[index],
            det_sign=int(self.det_signs[index]),
            length=int(self.lengths[index]),
        )

    def compose(self, i: int, j: int) -> int:
        """Index of the product: element i applied after element j."""
        return self.index_of[self.perms[i][self.perms[j].astype(np.intp)].tobytes()]

    def inverse_index(self, i: int) -> int:
        return self.index_of[self.inv_perms[i].tobytes()]


def _bfs_dict(gens: np.ndarray):
    width = gens.shape[1]
    ident = np.arange(width, dtype=np.uint8)
    seen = {ident.tobytes(): 0}
    chunks = [ident[None, :]]
    lengths = [np.zeros(1, dtype=np.int64)]
    frontier = ident[None, :]
    depth = 0
    while frontier.shape[0]:
        depth += 1
        cand = np.concatenate([frontier[:, g] for g in gens], axis=0)
        fresh = []
        base = sum(c.shape[0] for c in chunks)
        for row in cand:
            key = row.tobytes()
            if key not in seen:
                seen[key] = base + len(fresh)
                fresh.append(row)
        if fresh:
            block = np.array(fresh, dtype=np.uint8)
            chunks.append(block)
            lengths.append(np.full(block.shape[0], depth, dtype=np.int64))
            frontier = block
        else:
            frontier = np.empty((0, width), dtype=np.uint8)
    return np.concatenate(chunks, axis=0), np.concatenate(lengths)


def _bfs_hashed(gens: np.ndarray, expected: int):
    width = gens.shape[1]
    rng = np.random.default_rng(0xC0C0A7)
    weights = rng.integers(1, np.iinfo(np.int64).max, size=width).astype(np.uint64)

    def hashes(arr):
        return (arr.astype(np.uint64) * weights[None, :]).sum(axis=1)

    ident = np.arange(width, dtype=np.uint8)
    chunks = [ident[None, :]]
    lengths = [np.zeros(1, dtype=np.int64)]
    known = np.sort(hashes(ident[None, :]))
    frontier = ident[None, :]
    depth = 0
    while frontier.shape[0]:
        depth += 1
        cand = np.concatenate([frontier[:, g] for g in gens], axis=0)
        h = hashes(cand)
        _, first = np.unique(h, return_index=True)
        first.sort()
        cand, h = cand[first], h[first]
        fresh = ~np.isin(h, known)
        cand, h = cand[fresh], h[fresh]
        if cand.shape[0]:
            chunks.append(cand)
            lengths.append(np.full(cand.shape[0], depth, dtype=np.int64))
            known = np.sort(np.concatenate([known, h]))
        frontier = cand
    perms = np.concatenate(chunks, axis=0)
    if perms.shape[0] != expected:
        raise AssertionError(
            f"hashed enumeration found {perms.shape[0]} elements, expected {expected}"
        )
    return perms, np.concatenate(lengths)


_DICT_BFS_LIMIT = 300_000


def enumerate_group(rs: RootSystem, cap: int = DEFAULT_CAP) -> Group:
    """Enumerate the full group by breadth-first closure of the simple
    reflections.  Raises EnumerationCapError when the known order exceeds cap."""
    expected = rs.ctype.order
    if expected > cap:
        raise EnumerationCapError(
            f"{rs.ctype.name} has order {expected}, beyond the cap of {cap}"
        )
    if expected <= _DICT_BFS_LIMIT:
        perms, lengths = _bfs_dict(rs.gen_perms)
    else:
        perms, lengths = _bfs_hashed(rs.gen_perms, expected)
    if perms.shape[0] != expected:
        raise AssertionError(
            f"enumeration found {perms.shape[0]} elements, expected {expected}"
        )
    top = int(lengths.max())
    if top != rs.positive_count or int((lengths == top).sum()) != 1:
        raise AssertionError("length statistics do not match the positive root count")
    return Group(rs, perms, lengths)


# ---------------------------------------------------------------------------
# Parabolic subgroups and subset combinatorics


def _as_subset(K) -> tuple[int, ...]:
    subset = tuple(sorted(set(int(k) for k in K)))
    return subset


def parabolic_order(rs: RootSystem, K) -> int:
    """Order of the standard parabolic generated by the simple reflections in
    K, by breadth-first closure (no type formulas involved)."""
    subset = _as_subset(K)
    key = frozenset(subset)
    cached = rs._parabolic_orders.get(key)
    if cached is not None:
        return cached
    if not subset:
        order = 1
    else:
        gens = rs.gen_perms[list(subset)]
        perms, _ = _bfs_dict(gens)
        order = perms.shape[0]
    rs._parabolic_orders[key] = order
    return order


def parabolic(group: Group, K) -> np.ndarray:
    """Sorted global element indices of the standard parabolic subgroup."""
    subset = _as_subset(K)
    found = {0}
    frontier = [0]
    perms = group.perms
    index_of = group.index_of
    gen_rows = {k: group.rs.gen_perms[k].astype(np.intp) for k in subset}
    while frontier:
        nxt = []
        for i in frontier:
            base = perms[i]
            for k in subset:
                j = index_of[base[gen_rows[k]].tobytes()]
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return np.array(sorted(found), dtype=np.int64)


@dataclass(frozen=True)
class SubsetOrbit:
    """Orbit of a subset of simple-root positions under the full group."""

    representative: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.members)


def orbit_of_subset(group: Group, K) -> SubsetOrbit:
    """All subsets of simple positions of the form w(K), for w ranging over
    the whole group; the representative is the lex-smallest member."""
    subset = _as_subset(K)
    if not subset:
        return SubsetOrbit(representative=(), members=((),))
    rs = group.rs
    cols = rs.simple_index[list(subset)].astype(np.intp)
    images = group.perms[:, cols].astype(np.intp)
    pos = rs.simple_position[images]
    good = (pos >= 0).all(axis=1)
    members = np.unique(np.sort(pos[good], axis=1), axis=0)
    tuples = tuple(tuple(int(x) for x in row) for row in members)
    return SubsetOrbit(representative=tuples[0], members=tuples)


def subset_orbits(group: Group) -> list[SubsetOrbit]:
    """Partition of all 2^n subsets of simple positions into group orbits,
    ordered by (size of subset, lex) of the representatives."""
    cached = getattr(group, "_subset_orbit_cache", None)
    if cached is not None:
        return cached
    n = group.rs.rank
    todo = sorted(
        (tuple(j for j in range(n) if mask & (1 << j)) for mask in range(1 << n)),
        key=lambda s: (len(s), s),
    )
    seen: set[tuple[int, ...]] = set()
    out = []
    for subset in todo:
        if subset in seen:
            continue
        orbit = orbit_of_subset(group, subset)
        seen.update(orbit.members)
        out.append(orbit)
    group._subset_orbit_cache = out
    return out


def _phi_plus_indices(rs: RootSystem, K) -> np.ndarray:
    """Positive roots lying in the span of the simple roots in K; with
    simple-root coordinates this is exactly a support condition."""
    subset = _as_subset(K)
    kmask = 0
    for k in subset:
        kmask |= 1 << k
    return np.nonzero((rs.root_supports & ~kmask) == 0)[0]


def conjugate_parabolics(group: Group, J, K) -> bool:
    """Whether the standard parabolics W_J and W_K are conjugate in the full
    group, by scanning every element for w(Phi_J) = Phi_K."""
    rs = group.rs
    pj = _phi_plus_indices(rs, J)
    pk = _phi_plus_indices(rs, K)
    if pj.size != pk.size:
        return False
    if pj.size == 0:
        return True
    member = np.zeros(rs.positive_count, dtype=bool)
    member[pk] = True
    images = group.perms[:, pj].astype(np.intp)
    up_to_sign = rs.positive_of[images]
    hits = member[up_to_sign].all(axis=1)
    return bool(hits.any())


def normalizer_index(group: Group, K) -> int:
    """|W| / |N_W(W_K)|; the normalizer of a standard parabolic is the
    setwise stabilizer of its root subsystem."""
    rs = group.rs
    pk = _phi_plus_indices(rs, K)
    if pk.size == 0:
        return 1
    member = np.zeros(rs.positive_count, dtype=bool)
    member[pk] = True
    images = group.perms[:, pk].astype(np.intp)
    up_to_sign = rs.positive_of[images]
    stab = int(member[up_to_sign].all(axis=1).sum())
    if group.order % stab:
        raise AssertionError("stabilizer size does not divide the group order")
    return group.order // stab


def fixed_space(rs: RootSystem, K) -> Subspace:
    """The pointwise-fixed subspace of the standard parabolic W_K: the common
    kernel of the reflection normals of K's simple roots."""
    if rs.model == "dihedral":
        raise UnsupportedTypeError(
            f"I2({rs.dihedral_bond}) uses the index model; fixed subspaces are not "
            "represented in coordinates"
        )
    subset = _as_subset(K)
    if not subset:
        return Subspace.full(rs.rank)
    rows = []
    for k in subset:
        # simple root k sits at root index simple_index[k], which is positive
        normal = rs.normals[rs.simple_index[k]]
        if rs.model == "golden":
            rows.append([pair_to_scalar(int(e[0]), int(e[1])) for e in normal])
        else:
            rows.append([Scalar(int(x)) for x in normal])
    return Subspace.from_rows(kernel_basis(rows, rs.rank), rs.rank)


def classify_subset_type(rs: RootSystem, K) -> str:
    """Coxeter type label of the sub-diagram on K, components joined by '+',
    families alphabetical and ranks descending; 'e' for the empty set."""
    subset = _as_subset(K)
    if not subset:
        return "e"
    bonds = rs.coxeter_bonds
    remaining = set(subset)
    labels = []
    while remaining:
        start = min(remaining)
        comp = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in list(remaining - comp):
                if bonds[a, b] >= 3:
                    comp.add(b)
                    stack.append(b)
        remaining -= comp
        labels.append(_component_label(bonds, sorted(comp)))
    labels.sort(key=_label_sort_key)
    return "+".join(labels)


def _label_sort_key(label: str):
    if label.startswith("I2("):
        return ("I", -int(label[3:-1]))
    return (label[0], -int(label[1:]))


def _component_label(bonds, nodes: list[int]) -> str:
    k = len(nodes)
    if k == 1:
        return "A1"
    adj = {a: [b for b in nodes if b != a and bonds[a, b] >= 3] for a in nodes}
    edge_count = sum(len(v) for v in adj.values()) // 2
    if edge_count != k - 1:
        raise ValueError("subset diagram is not a tree")
    degrees = sorted(len(v) for v in adj.values())
    if degrees[-1] <= 2:
        ends = [a for a in nodes if len(adj[a]) == 1]
        walk = [min(ends)]
        while len(walk) < k:
            nxt = [b for b in adj[walk[-1]] if len(walk) < 2 or b != walk[-2]]
            walk.append(nxt[0])
        seq = [int(bonds[walk[i], walk[i + 1]]) for i in range(k - 1)]
        special = [(i, m) for i, m in enumerate(seq) if m != 3]
        if not special:
            return f"A{k}"
        if len(special) > 1:
            raise ValueError("more than one marked bond in a component")
        pos, m = special[0]
        at_end = pos in (0, k - 2)
        if m == 4:
            if at_end:
                return f"B{k}"
            if k == 4 and pos == 1:
                return "F4"
        elif m == 5:
            if k == 2:
                return "I2(5)"
            if at_end and k in (3, 4):
                return f"H{k}"
        elif k == 2:
            return "G2" if m == 6 else f"I2({m})"
        raise ValueError(f"no finite type with bond {m} in that position")
    if degrees[-1] > 3 or degrees.count(3) > 1:
        raise ValueError("subset diagram branches too much for a finite type")
    if any(bonds[a, b] > 3 for a in nodes for b in adj[a]):
        raise ValueError("marked bond on a branched diagram")
    center = next(a for a in nodes if len(adj[a]) == 3)
    arms = []
    for first in adj[center]:
        length = 1
        prev, cur = center, first
        while len(adj[cur]) == 2:
            nxt = next(b for b in adj[cur] if b != prev)
            prev, cur = cur, nxt
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{arms[2] + 3}"
    if arms == [1, 2, 2]:
        return "E6"
    if arms == [1, 2, 3]:
        return "E7"
    if arms == [1, 2, 4]:
        return "E8"
    raise ValueError("branched diagram is not of finite type")


def coset_fixed_count(group: Group, K, w_index: int) -> int:
    """Number of left cosets vW_K whose minimal representative v satisfies
    v^-1 w v in W_K (equivalently, the number of cosets fixed by left
    multiplication with w)."""
    sub = parabolic(group, K)
    in_sub = np.zeros(group.order, dtype=bool)
    in_sub[sub] = True
    assigned = np.zeros(group.order, dtype=bool)
    perms = group.perms
    index_of = group.index_of
    count = 0
    for v in range(group.order):
        if assigned[v]:
            continue
        pv = perms[v]
        for u in sub:
            member = index_of[pv[perms[u].astype(np.intp)].tobytes()]
            assigned[member] = True
        vi = group.inverse_index(v)
        after_wv = perms[w_index][pv.astype(np.intp)]
        conj = index_of[perms[vi][after_wv.astype(np.intp)].tobytes()]
        if in_sub[conj]:
            count += 1
    return count
