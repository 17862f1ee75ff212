"""Exact rational arithmetic: Bernoulli numbers, small dense matrices and affine forms.

Rationals are plain :class:`fractions.Fraction` values.  Matrices are kept
deliberately small and dense (at most a few dozen rows), so everything is
done with Python integers and fractions; determinants use Bareiss
elimination so that integer input never produces intermediate fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from .errors import InputError

__all__ = [
    "Fraction",
    "QMatrix",
    "AffineForm",
    "bernoulli_plus",
    "det",
    "solve",
    "affine_eval",
    "format_rational",
    "parse_rational",
    "factorial",
]

RationalLike = Union[int, Fraction, str]


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    return Fraction(x)


def format_rational(x: Fraction) -> str:
    """Serialise as ``"p/q"``, or ``"p"`` when the denominator is one."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


# ---------------------------------------------------------------------------
# Bernoulli numbers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_plus_tuple(k_max: int) -> tuple[Fraction, ...]:
    # sum_{j=0}^{k} C(k+1, j) B_j^+ = k + 1
    out: list[Fraction] = [Fraction(1)]
    for k in range(1, k_max + 1):
        s = sum((comb(k + 1, j) * out[j] for j in range(k)), Fraction(0))
        out.append((Fraction(k + 1) - s) / (k + 1))
    return tuple(out)


def bernoulli_plus(k_max: int) -> list[Fraction]:
    """Bernoulli numbers B_0..B_{k_max} with the ``B_1 = +1/2`` convention.

    These are the Taylor coefficients of ``x / (1 - exp(-x)) = sum B_k x^k / k!``.
    """
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    return list(_bernoulli_plus_tuple(k_max))


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QMatrix:
    """Immutable dense matrix of rationals, stored row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RationalLike]]) -> "QMatrix":
        data = [[as_fraction(x) for x in row] for row in rows]
        if not data:
            raise ValueError("empty matrix")
        ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged rows")
        return cls(len(data), ncols, tuple(x for r in data for x in r))

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[RationalLike]]) -> "QMatrix":
        return cls.from_rows(zip(*[list(c) for c in columns]))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> "QMatrix":
        return QMatrix.from_rows(self.column(j) for j in range(self.cols))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = [other.column(j) for j in range(other.cols)]
        return QMatrix.from_rows(
            [sum((a * b for a, b in zip(self.row(i), c)), Fraction(0)) for c in cols]
            for i in range(self.rows)
        )

    def apply(self, vec: Sequence[RationalLike]) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        v = [as_fraction(x) for x in vec]
        return [sum((a * b for a, b in zip(self.row(i), v)), Fraction(0))
                for i in range(self.rows)]

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.entries)


def _integer_rows(m: QMatrix) -> tuple[list[list[int]], int]:
    """Scale every row to integers; returns the rows and the product of scales."""
    rows = []
    scale = 1
    for i in range(m.rows):
        r = m.row(i)
        d = 1
        for x in r:
            d = d * x.denominator // _gcd(d, x.denominator)
        rows.append([int(x * d) for x in r])
        scale *= d
    return rows, scale


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def bareiss_det(rows: list[list[int]]) -> int:
    """Fraction-free determinant of a square integer matrix (rows are copied)."""
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ri = a[i]
            rk = a[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(m: QMatrix) -> Fraction:
    """Exact determinant via Bareiss elimination on the row-scaled integer matrix."""
    if not m.is_square:
        raise ValueError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    rows, scale = _integer_rows(m)
    return Fraction(bareiss_det(rows), scale)


def solve(a: QMatrix, b: Sequence[RationalLike]) -> list[Fraction]:
    """Solve ``a @ x = b`` exactly.  Raises :class:`ZeroDivisionError` if singular."""
    if not a.is_square:
        raise ValueError("solve needs a square matrix")
    n = a.rows
    if len(b) != n:
        raise ValueError("right-hand side has wrong length")
    aug = [list(a.row(i)) + [as_fraction(b[i])] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[k], aug[piv] = aug[piv], aug[k]
        pk = aug[k]
        inv = 1 / pk[k]
        for i in range(n):
            if i == k or aug[i][k] == 0:
                continue
            f = aug[i][k] * inv
            ri = aug[i]
            for j in range(k, n + 1):
                ri[j] -= f * pk[j]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def inverse(a: QMatrix) -> QMatrix:
    n = a.rows
    cols = [solve(a, [int(i == j) for i in range(n)]) for j in range(n)]
    return QMatrix.from_columns(cols)


def rank(rows: Sequence[Sequence[RationalLike]]) -> int:
    """Rank of a (possibly non-square) rational matrix given by its rows."""
    m = [[as_fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    r = 0
    ncols = len(m[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


# ---------------------------------------------------------------------------
# Affine forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineForm:
    """``constant + sum(coeff * parameter)`` with exact rational coefficients.

    Zero coefficients are never stored, so two forms are equal iff they are
    equal as functions.
    """

    constant: Fraction = Fraction(0)
    coeffs: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned = {k: as_fraction(v) for k, v in self.coeffs.items() if as_fraction(v) != 0}
        object.__setattr__(self, "constant", as_fraction(self.constant))
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(cleaned.items()))))

    @classmethod
    def const(cls, c: RationalLike) -> "AffineForm":
        return cls(as_fraction(c))

    @classmethod
    def var(cls, name: str, coeff: RationalLike = 1) -> "AffineForm":
        return cls(Fraction(0), {name: as_fraction(coeff)})

    @property
    def parameters(self) -> frozenset[str]:
        return frozenset(self.coeffs)

    def is_zero(self) -> bool:
        return self.constant == 0 and not self.coeffs

    def is_homogeneous(self) -> bool:
        return self.constant == 0

    def coefficient(self, name: str) -> Fraction:
        return self.coeffs.get(name, Fraction(0))

    def check_params(self, params: Iterable[str]) -> None:
        unknown = self.parameters - set(params)
        if unknown:
            raise InputError(f"undeclared parameter(s): {', '.join(sorted(unknown))}")

    def __add__(self, other: "AffineForm | RationalLike") -> "AffineForm":
        if not isinstance(other, AffineForm):
            return AffineForm(self.constant + as_fraction(other), self.coeffs)
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs.get(k, Fraction(0)) + v
        return AffineForm(self.constant + other.constant, coeffs)

    __radd__ = __add__

    def __neg__(self) -> "AffineForm":
        return AffineForm(-self.constant, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "AffineForm | RationalLike") -> "AffineForm":
        return self + (-other if isinstance(other, AffineForm) else -as_fraction(other))

    def __rsub__(self, other: RationalLike) -> "AffineForm":
        return (-self) + other

    def __mul__(self, c: RationalLike) -> "AffineForm":
        if isinstance(c, AffineForm):
            raise TypeError("product of two affine forms is not affine")
        c = as_fraction(c)
        return AffineForm(self.constant * c, {k: v * c for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: RationalLike) -> "AffineForm":
        return self * (1 / as_fraction(c))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AffineForm):
            return self.constant == other.constant and dict(self.coeffs) == dict(other.coeffs)
        if isinstance(other, (int, Fraction)):
            return not self.coeffs and self.constant == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.constant, tuple(self.coeffs.items())))

    def evaluate(self, point: Mapping[str, RationalLike]) -> Fraction:
        total = self.constant
        for k, v in self.coeffs.items():
            if k not in point:
                raise InputError(f"no value bound for parameter {k!r}")
            total += v * as_fraction(point[k])
        return total

    def ratio_to(self, other: "AffineForm") -> Fraction | None:
        """Return ``c`` with ``self == c * other``, or ``None`` if not proportional."""
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        if other.constant:
            c = self.constant / other.constant
        else:
            name, v = next(iter(other.coeffs.items()))
            c = self.coefficient(name) / v
        return c if self == other * c else None

    def to_json(self, order: Sequence[str] | None = None) -> dict:
        names = list(order) if order is not None else sorted(self.coeffs)
        extra = sorted(set(self.coeffs) - set(names))
        return {
            "const": format_rational(self.constant),
            "coeffs": {k: format_rational(self.coeffs[k]) for k in names + extra if k in self.coeffs},
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "AffineForm":
        return cls(parse_rational(str(obj.get("const", "0"))),
                   {k: parse_rational(str(v)) for k, v in obj.get("coeffs", {}).items()})

    def format(self, order: Sequence[str] | None = None) -> str:
        names = list(order) if order is not None else sorted(self.coeffs)
        parts: list[str] = []
        for k in names:
            v = self.coeffs.get(k)
            if not v:
                continue
            sign = "-" if v < 0 else "+"
            mag = abs(v)
            term = k if mag == 1 else f"{format_rational(mag)}*{k}"
            parts.append(f"{sign} {term}")
        if self.constant or not parts:
            sign = "-" if self.constant < 0 else "+"
            parts.append(f"{sign} {format_rational(abs(self.constant))}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __str__(self) -> str:
        return self.format()


def affine_eval(f: AffineForm, point: Mapping[str, RationalLike]) -> Fraction:
    """Evaluate ``f`` at ``point``; every parameter used by ``f`` must be bound."""
    return f.evaluate(point)


def dot_forms(vec: Sequence[RationalLike], forms: Sequence[AffineForm]) -> AffineForm:
    total = AffineForm()
    for c, f in zip(vec, forms):
        if c:
            total = total + f * c
    return total
