"""Dense complex matrices at a declared binary precision and their eigenvalues.

Precision is always an explicit argument.  Arithmetic runs inside a local
``gmpy2.context``; gmpy2 contexts are thread-local, so nothing leaks between
calls or threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import gmpy2

from . import _kernels
from .errors import PrecisionError, ValidationError
from .exact import IntMatrix

__all__ = [
    "DEFAULT_PRECISION",
    "MIN_PRECISION",
    "MPMatrix",
    "Spectrum",
    "check_precision",
    "machine_eps",
    "sort_key",
    "to_hessenberg",
    "eigvals",
    "decimal_digits",
    "format_real",
]

DEFAULT_PRECISION = 256
MIN_PRECISION = 53


def check_precision(precision) -> int:
    if not isinstance(precision, int) or isinstance(precision, bool):
        raise ValidationError(f"precision must be an integer number of bits, got {precision!r}")
    if precision < MIN_PRECISION:
        raise ValidationError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")
    return precision


def machine_eps(precision: int):
    """``2**(1 - p)`` as an exact mpfr."""
    with gmpy2.context(precision=precision):
        return gmpy2.mul_2exp(gmpy2.mpfr(1), 1 - precision)


def decimal_digits(precision: int) -> int:
    """Significant digits that make a decimal dump of a p-bit value lossless."""
    return math.ceil(precision * math.log10(2)) + 2


def format_real(x, precision: int) -> str:
    """Scientific decimal string with :func:`decimal_digits` significant digits.

    Exact zero prints as ``"0"``.  Built from ``mpfr.digits`` because the
    ``'e'`` format spec is unreliable across gmpy2 releases.
    """
    with gmpy2.context(precision=precision):
        x = gmpy2.mpfr(x)
    if x == 0:
        return "0"
    if not gmpy2.is_finite(x):
        return str(x)
    mant, exp, _ = x.digits(10, decimal_digits(precision))
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1:+03d}"


def _phase(z):
    if z == 0:
        return gmpy2.mpfr(0)
    ph = gmpy2.phase(gmpy2.mpc(z))
    if ph < 0:
        ph += 2 * gmpy2.const_pi()
    return ph


def sort_key(z):
    """Global eigenvalue order: modulus, then phase in ``[0, 2*pi)``."""
    return abs(z), _phase(z)


@dataclass(frozen=True)
class Spectrum:
    """Multiset of complex values at one precision, held in sort-key order.

    ``flags`` carries diagnostics raised while the values were produced
    (clamped or off-axis B eigenvalues); an empty tuple means a clean run.
    """

    values: tuple
    precision: int
    order: int
    flags: tuple = field(default=())

    def __post_init__(self):
        if len(self.values) != self.order:
            raise ValidationError(f"spectrum holds {len(self.values)} values, expected {self.order}")
        with gmpy2.context(precision=self.precision):
            vals = [gmpy2.mpc(v) for v in self.values]
            vals.sort(key=sort_key)
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "flags", tuple(self.flags))

    @classmethod
    def from_values(cls, values: Iterable, precision: int, flags=()) -> Spectrum:
        vals = list(values)
        return cls(tuple(vals), precision, len(vals), tuple(flags))

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def moduli(self) -> list:
        with gmpy2.context(precision=self.precision):
            return [abs(z) for z in self.values]

    def count_zeros(self) -> int:
        return sum(1 for z in self.values if z == 0)

    def to_complex(self) -> list[complex]:
        return [complex(z) for z in self.values]

    def to_records(self) -> list[dict]:
        """``[{"re": str, "im": str}, ...]`` with lossless decimal strings."""
        p = self.precision
        return [{"re": format_real(z.real, p), "im": format_real(z.imag, p)} for z in self.values]

    @classmethod
    def from_records(cls, records: Sequence[dict], precision: int) -> Spectrum:
        with gmpy2.context(precision=precision):
            vals = [gmpy2.mpc(gmpy2.mpfr(r["re"]), gmpy2.mpfr(r["im"])) for r in records]
        return cls.from_values(vals, precision)


class MPMatrix:
    """Dense complex matrix; every entry is a ``gmpy2.mpc`` at ``precision`` bits."""

    __slots__ = ("rows", "cols", "precision", "_flat")

    def __init__(self, rows: int, cols: int, flat: Iterable, precision: int):
        check_precision(precision)
        with gmpy2.context(precision=precision):
            data = tuple(gmpy2.mpc(z) for z in flat)
        if len(data) != rows * cols:
            raise ValidationError(f"expected {rows * cols} entries, got {len(data)}")
        self.rows = rows
        self.cols = cols
        self.precision = precision
        self._flat = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], precision: int) -> MPMatrix:
        """Build from nested sequences of numbers or numeric strings (rounded to precision)."""
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        if any(len(r) != ncols for r in rows):
            raise ValidationError("ragged rows")
        with gmpy2.context(precision=check_precision(precision)):
            flat = [z if isinstance(z, gmpy2.mpc) else gmpy2.mpc(z) for row in rows for z in row]
        return cls(nrows, ncols, flat, precision)

    @classmethod
    def from_int_matrix(cls, a: IntMatrix, precision: int) -> MPMatrix:
        """Exact conversion; raises :class:`PrecisionError` rather than round an entry."""
        check_precision(precision)
        for row in a:
            for x in row:
                if x and _significant_bits(x) > precision:
                    raise PrecisionError(
                        f"integer entry with {_significant_bits(x)} significant bits "
                        f"does not fit a {precision}-bit mantissa"
                    )
        with gmpy2.context(precision=precision):
            flat = [gmpy2.mpc(x) for row in a for x in row]
        return cls(a.rows, a.cols, flat, precision)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._flat[i * self.cols + j]

    def flat(self) -> list:
        return list(self._flat)

    def to_rows(self) -> list[list]:
        c = self.cols
        return [list(self._flat[i * c:(i + 1) * c]) for i in range(self.rows)]

    def is_upper_hessenberg(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(max(0, i - 1)))

    def trace(self):
        with gmpy2.context(precision=self.precision):
            return sum((self[i, i] for i in range(min(self.shape))), gmpy2.mpc(0))

    def norm_inf(self):
        with gmpy2.context(precision=self.precision):
            return max(
                (sum((abs(z) for z in row), gmpy2.mpfr(0)) for row in self.to_rows()),
                default=gmpy2.mpfr(0),
            )

    def __repr__(self):
        return f"MPMatrix({self.rows}x{self.cols}, precision={self.precision})"


def _significant_bits(x: int) -> int:
    x = abs(x)
    return x.bit_length() - ((x & -x).bit_length() - 1)


def _require_square(a: MPMatrix):
    if not a.is_square:
        raise ValidationError(f"square matrix required, got {a.rows}x{a.cols}")


def to_hessenberg(a: MPMatrix, *, backend: str | None = None) -> MPMatrix:
    """Unitarily similar upper Hessenberg matrix (Householder reflections)."""
    _require_square(a)
    kern = _kernels.get_backend(backend)
    h = kern.hessenberg(a.flat(), a.rows, a.precision)
    n = a.rows
    for i in range(n):
        for j in range(i - 1):
            h[i * n + j] = gmpy2.mpc(0)
    return MPMatrix(n, n, h, a.precision)


def eigvals(a: MPMatrix | IntMatrix, precision: int | None = None, *,
            backend: str | None = None) -> Spectrum:
    """All eigenvalues with multiplicity, sorted by (modulus, phase).

    ``precision`` defaults to the matrix's own; a different value converts the
    entries first (exactly, for integer input).  Raises
    :class:`~toeplitz_spectra.errors.ConvergenceError` when the QR iteration
    exceeds its budget of 30 sweeps per eigenvalue.
    """
    if isinstance(a, IntMatrix):
        a = MPMatrix.from_int_matrix(a, precision or DEFAULT_PRECISION)
    elif precision is not None and precision != a.precision:
        a = MPMatrix(a.rows, a.cols, a.flat(), precision)
    _require_square(a)
    if a.rows == 0:
        return Spectrum((), a.precision, 0)
    kern = _kernels.get_backend(backend)
    vals = kern.eigvals(a.flat(), a.rows, a.precision)
    return Spectrum(tuple(vals), a.precision, a.rows)
