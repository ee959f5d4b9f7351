"""Exact arithmetic in Q(i) and deterministic Gauss-Jordan elimination."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence


class MalformedScalarError(ValueError):
    """Raised for unparsable scalar text or a zero denominator."""


class GaussianRational:
    """An element (a + b*i)/d of Q(i).

    Stored with a single positive denominator and gcd(a, b, d) = 1, which
    makes the representation canonical.  The component view (``re``, ``im``)
    returns individually reduced fractions.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, re_part=0, im_part=0):
        re_f = Fraction(re_part)
        im_f = Fraction(im_part)
        d = re_f.denominator * im_f.denominator // gcd(re_f.denominator, im_f.denominator)
        a = re_f.numerator * (d // re_f.denominator)
        b = im_f.numerator * (d // im_f.denominator)
        self.a, self.b, self.d = a, b, d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        # d > 0 is assumed; reduce by the common gcd
        g = gcd(gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        obj = object.__new__(cls)
        obj.a, obj.b, obj.d = a, b, d
        return obj

    @property
    def re(self) -> Fraction:
        return Fraction(self.a, self.d)

    @property
    def im(self) -> Fraction:
        return Fraction(self.b, self.d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.a, -self.b, self.d)

    def norm2(self) -> Fraction:
        """|z|^2 as a Fraction."""
        return Fraction(self.a * self.a + self.b * self.b, self.d * self.d)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = other if other.__class__ is GaussianRational else _coerce(other)
        if o is None:
            return NotImplemented
        if self.d == o.d:
            if self.d == 1:
                return _gi(self.a + o.a, self.b + o.b)
            return GaussianRational._raw(self.a + o.a, self.b + o.b, self.d)
        return GaussianRational._raw(self.a * o.d + o.a * self.d,
                                     self.b * o.d + o.b * self.d, self.d * o.d)

    __radd__ = __add__

    def __neg__(self):
        obj = object.__new__(GaussianRational)
        obj.a, obj.b, obj.d = -self.a, -self.b, self.d
        return obj

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = other if other.__class__ is GaussianRational else _coerce(other)
        if o is None:
            return NotImplemented
        a = self.a * o.a - self.b * o.b
        b = self.a * o.b + self.b * o.a
        d = self.d * o.d
        if d == 1:
            return _gi(a, b)
        return GaussianRational._raw(a, b, d)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.a * self.a + self.b * self.b
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        # d / (a + b i) = d (a - b i) / n
        a, b, d = self.d * self.a, -self.d * self.b, n
        return GaussianRational._raw(a, b, d)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.d))
        return hash((self.a, self.b, self.d))

    # text -----------------------------------------------------------------
    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"GaussianRational('{format_scalar(self)}')"

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))




def _gi(a: int, b: int) -> GaussianRational:
    obj = object.__new__(GaussianRational)
    obj.a, obj.b, obj.d = a, b, 1
    return obj


def _coerce(x) -> Optional[GaussianRational]:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return _gi(x, 0)
    if isinstance(x, Fraction):
        return GaussianRational._raw(x.numerator, 0, x.denominator)
    return None


ZERO = _gi(0, 0)
ONE = _gi(1, 0)
I = _gi(0, 1)


def gq(x) -> GaussianRational:
    """Coerce int, Fraction, GaussianRational or scalar text to GaussianRational."""
    if isinstance(x, str):
        return parse_scalar(x)
    c = _coerce(x)
    if c is None:
        raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")
    return c


def gq_normalize(re_num: int, re_den: int, im_num: int, im_den: int) -> GaussianRational:
    """Build the canonical value re_num/re_den + (im_num/im_den) i."""
    if re_den == 0 or im_den == 0:
        raise MalformedScalarError("zero denominator")
    return GaussianRational(Fraction(re_num, re_den), Fraction(im_num, im_den))


def _fmt_fraction(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def format_scalar(z: GaussianRational) -> str:
    """Canonical text: "p/q", "p/q*i" or "p/q+r/s*i"; a unit denominator is omitted."""
    re_f, im_f = z.re, z.im
    if im_f == 0:
        return _fmt_fraction(re_f)
    if im_f == 1:
        im_txt = "i"
    elif im_f == -1:
        im_txt = "-i"
    else:
        im_txt = _fmt_fraction(im_f) + "*i"
    if re_f == 0:
        return im_txt
    sep = "" if im_f < 0 else "+"
    return _fmt_fraction(re_f) + sep + im_txt


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?:(?P<re>{_RAT})(?:(?P<im>[+-](?:\d+(?:/\d+)?\*)?)i)?|(?P<imonly>[+-]?(?:\d+(?:/\d+)?\*)?)i)$"
)


def _parse_rational(txt: str) -> Fraction:
    if "/" in txt:
        num, den = txt.split("/")
        if int(den) == 0:
            raise MalformedScalarError(f"zero denominator in {txt!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(txt))


def _parse_imag(prefix: str) -> Fraction:
    # prefix looks like "", "+", "-", "3/4*", "-2*"
    body = prefix.rstrip("*")
    if body in ("", "+"):
        return Fraction(1)
    if body == "-":
        return Fraction(-1)
    return _parse_rational(body)


def parse_scalar(text: str) -> GaussianRational:
    """Parse "p/q", "p/q+r/s*i", "i", "-3*i" and similar forms."""
    s = text.strip().replace(" ", "")
    m = _SCALAR_RE.match(s)
    if not m or s == "":
        raise MalformedScalarError(f"malformed scalar {text!r}")
    if m.group("imonly") is not None:
        return GaussianRational(0, _parse_imag(m.group("imonly")))
    re_part = _parse_rational(m.group("re"))
    im_part = _parse_imag(m.group("im")) if m.group("im") is not None else Fraction(0)
    return GaussianRational(re_part, im_part)


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

class Matrix:
    """Dense matrix of GaussianRational entries, stored row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[list] = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            data = [[ZERO] * cols for _ in range(rows)]
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("matrix data does not match its dimensions")
        self.data = [[gq(x) for x in r] for r in data]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        data = [[ZERO] * len(columns) for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, x in enumerate(col):
                data[i][j] = x
        return cls(nrows, len(columns), data)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def apply(self, vec: Sequence[GaussianRational]) -> list:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        for row in self.data:
            acc = ZERO
            for a, x in zip(row, vec):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = [other.column(j) for j in range(other.cols)]
        return Matrix.from_columns([self.apply(c) for c in cols], self.rows)

    def column(self, j: int) -> list:
        return [r[j] for r in self.data]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.data == other.data

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class SolveResult:
    rank: int
    pivots: tuple
    kernel: tuple                     # tuple of kernel basis vectors (tuples)
    solution: Optional[tuple] = None  # particular solution when b is given and consistent
    consistent: bool = True


def _rref_rows(rows: list, ncols: int):
    """In-place Gauss-Jordan on a list of row lists; returns pivot columns.

    Columns are scanned left to right and the first nonzero row (top to
    bottom) among the unused ones is taken as pivot row.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r >= nrows:
            break
        pr = None
        for i in range(r, nrows):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        prow = rows[r]
        inv = prow[c].inverse()
        if inv != ONE:
            prow = [x * inv if x else x for x in prow]
            rows[r] = prow
        nz = [j for j in range(c, len(prow)) if prow[j]]
        for i in range(nrows):
            if i == r:
                continue
            f = rows[i][c]
            if f:
                row = rows[i]
                for j in nz:
                    row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return pivots


def rref(A: Matrix) -> tuple:
    """Return (reduced rows, pivot columns)."""
    rows = [list(r) for r in A.data]
    piv = _rref_rows(rows, A.cols)
    return rows, tuple(piv)


def rref_solve(A: Matrix, b: Optional[Sequence] = None) -> SolveResult:
    """Solve A x = b (or only analyse A when b is None) exactly."""
    ncols = A.cols
    rows = [list(r) for r in A.data]
    if b is not None:
        if len(b) != A.rows:
            raise ValueError("right-hand side length mismatch")
        for row, bi in zip(rows, b):
            row.append(gq(bi))
    pivots = _rref_rows(rows, ncols)
    rank = len(pivots)
    pivset = set(pivots)
    kernel = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [ZERO] * ncols
        v[f] = ONE
        for r, pc in enumerate(pivots):
            x = rows[r][f]
            if x:
                v[pc] = -x
        kernel.append(tuple(v))
    solution = None
    consistent = True
    if b is not None:
        for r in range(rank, len(rows)):
            if rows[r][ncols]:
                consistent = False
                break
        if consistent:
            x = [ZERO] * ncols
            for r, pc in enumerate(pivots):
                x[pc] = rows[r][ncols]
            solution = tuple(x)
    return SolveResult(rank, tuple(pivots), tuple(kernel), solution, consistent)


def rank_of(vectors: Iterable[Sequence], dim: int) -> int:
    rows = [list(v) for v in vectors]
    if not rows:
        return 0
    return len(_rref_rows(rows, dim))


def row_space_basis(vectors: Iterable[Sequence], dim: int) -> list:
    """RREF-canonical basis of the span of the given vectors."""
    rows = [list(v) for v in vectors]
    if not rows:
        return []
    piv = _rref_rows(rows, dim)
    return [tuple(rows[i]) for i in range(len(piv))]


def solve_columns(columns: Sequence[Sequence], nrows: int, b: Sequence) -> Optional[tuple]:
    """Particular solution of sum_j x_j columns[j] = b, or None."""
    if not columns:
        return () if all(not x for x in b) else None
    res = rref_solve(Matrix.from_columns(columns, nrows), b)
    return res.solution if res.consistent else None


def kernel_of_columns(columns: Sequence[Sequence], nrows: int) -> tuple:
    if not columns:
        return ()
    return rref_solve(Matrix.from_columns(columns, nrows)).kernel


def complement_basis(sub: Sequence[Sequence], vectors: Sequence[Sequence], dim: int) -> list:
    """Vectors from ``vectors`` (in order) extending span(sub), chosen greedily.

    Used to pick deterministic class representatives of a quotient.
    """
    chosen = []
    current = [list(v) for v in sub]
    r = rank_of(current, dim) if current else 0
    for v in vectors:
        trial = current + [list(v)]
        rr = rank_of(trial, dim)
        if rr > r:
            chosen.append(tuple(v))
            current = trial
            r = rr
    return chosen


def matrix_inverse(A: Matrix) -> Matrix:
    """Exact inverse of a square matrix; raises ZeroDivisionError if singular."""
    if A.rows != A.cols:
        raise ValueError("matrix is not square")
    n = A.rows
    rows = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(A.data)]
    piv = _rref_rows(rows, n)
    if len(piv) != n:
        raise ZeroDivisionError("matrix is singular")
    return Matrix(n, n, [r[n:] for r in rows])
