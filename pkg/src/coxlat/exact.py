"""Exact arithmetic: scalars in Q(sqrt5), row reduction, integer polynomials.

No floating point enters any computation here; floats appear only in the
optional ``__float__`` conversions used for display.
"""

from __future__ import annotations

import operator
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Union[int, Fraction]


def _frac(x) -> Fraction:
    """Coerce to Fraction, accepting ints (including numpy integers)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    try:
        return Fraction(operator.index(x))
    except TypeError:
        raise TypeError(f"expected an integer or Fraction, got {type(x).__name__}") from None


class Scalar:
    """Element a + b*sqrt(5) of the real quadratic field Q(sqrt5).

    Components are Fractions, so arithmetic is exact.  Comparisons follow the
    real order and are decided without floating point: sqrt(5) is irrational,
    so a + b*sqrt(5) = 0 only when a = b = 0, and otherwise the sign can be
    read off by comparing a*a with 5*b*b.

    >>> phi = Scalar.phi()
    >>> phi * phi == phi + 1
    True
    >>> Scalar(2) < Scalar.sqrt5() < Scalar(3)
    True
    """

    __slots__ = ("a", "b")

    def __init__(self, a: Rat = 0, b: Rat = 0):
        self.a = _frac(a)
        self.b = _frac(b)

    @classmethod
    def phi(cls) -> "Scalar":
        """The golden ratio (1 + sqrt5)/2, a root of t*t - t - 1."""
        return cls(Fraction(1, 2), Fraction(1, 2))

    @classmethod
    def sqrt5(cls) -> "Scalar":
        return cls(0, 1)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self!r} is irrational")
        return self.a

    def as_int(self) -> int:
        f = self.as_fraction()
        if f.denominator != 1:
            raise ValueError(f"{self!r} is not an integer")
        return f.numerator

    def _coerce(self, other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(o.a - self.a, o.b - self.b)

    def __neg__(self):
        return Scalar(-self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        # 1/(a + b s) = (a - b s) / (a^2 - 5 b^2); the norm vanishes only at 0
        norm = self.a * self.a - 5 * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return Scalar(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # components disagree in sign: |a| vs |b|*sqrt5 decides
        if a * a == 5 * b * b:  # impossible for b != 0, guard anyway
            raise ArithmeticError("sqrt5 comparison degenerated")
        big_rational = a * a > 5 * b * b
        return (1 if big_rational else -1) if a > 0 else (-1 if big_rational else 1)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        # rational values must hash like their Fraction so mixed keys behave
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * 5.0 ** 0.5

    def __repr__(self):
        if self.b == 0:
            return f"Scalar({self.a})"
        return f"Scalar({self.a}, {self.b})"


PHI = Scalar.phi()
SQRT5 = Scalar.sqrt5()


def _scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Scalar(x)


def rref(rows: Iterable[Sequence], ncols: int | None = None):
    """Reduced row echelon form over Q(sqrt5).

    Returns ``(reduced_rows, pivot_columns)`` where the reduced rows have unit
    pivots, zeros above and below each pivot, and no zero rows.  The output is
    the canonical representative of the input's row space.
    """
    work = [[_scalar(x) for x in row] for row in rows]
    if ncols is None:
        if not work:
            raise ValueError("ncols is required for an empty row list")
        ncols = len(work[0])
    for row in work:
        if len(row) != ncols:
            raise ValueError("ragged rows")
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        hit = next((i for i in range(r, len(work)) if work[i][c]), None)
        if hit is None:
            continue
        work[r], work[hit] = work[hit], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work[:r], tuple(pivots)


def kernel_basis(rows: Iterable[Sequence], ncols: int) -> list[list[Scalar]]:
    """Basis of the right kernel {v : M v = 0}, one vector per free column."""
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [Scalar(0)] * ncols
        v[f] = Scalar(1)
        for j, p in enumerate(pivots):
            v[p] = -reduced[j][f]
        basis.append(v)
    return basis


class Subspace:
    """Linear subspace of Q(sqrt5)^n with a canonical (RREF) spanning basis.

    Equality of Subspace objects is equality of subspaces, because the stored
    basis is the unique reduced echelon basis of the row space.
    """

    __slots__ = ("n", "basis", "pivots")

    def __init__(self, n: int, basis, pivots):
        self.n = n
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], n: int) -> "Subspace":
        reduced, pivots = rref(rows, n)
        return cls(n, tuple(tuple(row) for row in reduced), pivots)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        eye = [[Scalar(1 if i == j else 0) for j in range(n)] for i in range(n)]
        return cls(n, tuple(tuple(r) for r in eye), tuple(range(n)))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, (), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vector: Sequence) -> bool:
        v = [_scalar(x) for x in vector]
        if len(v) != self.n:
            raise ValueError("dimension mismatch")
        for row, p in zip(self.basis, self.pivots):
            if v[p]:
                c = v[p]
                v = [x - c * y for x, y in zip(v, row)]
        return not any(v)

    def is_subspace_of(self, other: "Subspace") -> bool:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return all(other.contains(row) for row in self.basis)

    def annihilator(self) -> "Subspace":
        """The space of covectors vanishing on self (standard bilinear form)."""
        return Subspace.from_rows(kernel_basis(self.basis, self.n), self.n)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        ann = list(self.annihilator().basis) + list(other.annihilator().basis)
        return Subspace.from_rows(kernel_basis(ann, self.n), self.n)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim})"


def _int_coeff(c) -> int:
    return operator.index(c)


class IntPolynomial:
    """Univariate polynomial with integer coefficients.

    Coefficients are stored ascending with no trailing zeros; the zero
    polynomial is the empty tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_int_coeff(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "IntPolynomial":
        return cls(())

    @classmethod
    def one(cls) -> "IntPolynomial":
        return cls((1,))

    @classmethod
    def t_power(cls, n: int) -> "IntPolynomial":
        return cls((0,) * n + (1,))

    @classmethod
    def from_int_roots(cls, roots: Iterable[int]) -> "IntPolynomial":
        """The monic polynomial with the given integer roots, multiplicity included."""
        coeffs = [1]
        for r in roots:
            r = _int_coeff(r)
            coeffs = [0] + coeffs
            for i in range(len(coeffs) - 1):
                coeffs[i] -= r * coeffs[i + 1]
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPolynomial((other,))
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPolynomial((other,))
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(tuple(other * c for c in self.coeffs))
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return IntPolynomial.zero()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def evaluate(self, x):
        """Horner evaluation; exact for int, Fraction, and Scalar arguments."""
        result = x * 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def divide_exact(self, divisor: "IntPolynomial") -> "IntPolynomial":
        """Quotient self/divisor, raising ValueError unless the division is
        exact with integer coefficients."""
        if not divisor.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = [Fraction(c) for c in self.coeffs]
        div = [Fraction(c) for c in divisor.coeffs]
        if len(rem) < len(div):
            if any(rem):
                raise ValueError("division is not exact")
            return IntPolynomial.zero()
        quot = [Fraction(0)] * (len(rem) - len(div) + 1)
        for k in range(len(quot) - 1, -1, -1):
            q = rem[k + len(div) - 1] / div[-1]
            quot[k] = q
            if q:
                for j, d in enumerate(div):
                    rem[k + j] -= q * d
        if any(rem):
            raise ValueError("division is not exact")
        if any(q.denominator != 1 for q in quot):
            raise ValueError("quotient is not integral")
        return IntPolynomial(tuple(q.numerator for q in quot))

    def integer_roots(self) -> tuple[int, ...]:
        """All integer roots with multiplicity, ascending.

        Found by trial division of the constant term followed by repeated
        synthetic division, so the result is exact.
        """
        if not self.coeffs:
            raise ValueError("the zero polynomial has every root")
        coeffs = list(self.coeffs)
        roots = []
        while len(coeffs) > 1 and coeffs[0] == 0:
            roots.append(0)
            coeffs = coeffs[1:]
        if len(coeffs) > 1:
            c0 = abs(coeffs[0])
            candidates = sorted(d for d in range(1, c0 + 1) if c0 % d == 0)
            for base in candidates:
                for r in (base, -base):
                    while len(coeffs) > 1:
                        quot, remainder = _synthetic_division(coeffs, r)
                        if remainder != 0:
                            break
                        roots.append(r)
                        coeffs = quot
        return tuple(sorted(roots))

    def factored_str(self) -> str:
        """Display as a product of (t - r) factors when the integer roots
        account for the whole polynomial, else as an ascending coefficient list."""
        if not self.coeffs:
            return "0"
        roots = self.integer_roots()
        if len(roots) == self.degree:
            lead = self.coeffs[-1]
            parts = [] if lead == 1 else [str(lead)]
            for r in roots:
                if r == 0:
                    parts.append("t")
                elif r > 0:
                    parts.append(f"(t-{r})")
                else:
                    parts.append(f"(t+{-r})")
            return "".join(parts) if parts else "1"
        return str(list(self.coeffs))

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolynomial((other,))
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"


def _synthetic_division(coeffs: Sequence[int], r: int):
    """Divide the ascending-coefficient polynomial by (t - r)."""
    n = len(coeffs)
    quot = [0] * (n - 1)
    acc = 0
    for i in range(n - 1, 0, -1):
        acc = coeffs[i] + acc * r
        quot[i - 1] = acc
    remainder = coeffs[0] + acc * r
    return quot, remainder


def poly_eval(p: IntPolynomial, x):
    """Evaluate p at x exactly; x may be an int, Fraction, or Scalar."""
    return p.evaluate(x)
