"""Exact integer matrices, the B-matrix construction and characteristic polynomials.

Everything here works on Python ``int`` so entries never overflow; the
3x3 matrix for ``(n, r, s) = (231, 38, 39)`` already has entries beyond
2**64.
"""
from __future__ import annotations

import json
import threading
from math import comb, gcd
from typing import Iterable, Sequence

from .errors import RestrictionError, ValidationError
from .params import compute_params

__all__ = [
    "IntMatrix",
    "IntPolynomial",
    "build_Tng",
    "shifted_c_power",
    "construct_M_P",
    "construct_M_P_shift_arrays",
    "construct_B",
    "corner_perturbation",
    "b_restricted",
    "char_poly",
    "poly_compose_power",
]


def _sparse_rows(rows):
    return [[(j, v) for j, v in enumerate(row) if v] for row in rows]


def _matmul(a, b, ncols):
    # Row-combination kernel: cost is sum over nonzeros a[i][k] of nnz(b[k]),
    # so banded and permutation-like operands stay cheap.
    sb = _sparse_rows(b)
    out = []
    for row in a:
        acc = [0] * ncols
        for k, aik in enumerate(row):
            if aik:
                for j, bkj in sb[k]:
                    acc[j] += aik * bkj
        out.append(acc)
    return out


class IntMatrix:
    """Dense matrix of arbitrary-precision integers (immutable)."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, entries: Iterable[Sequence[int]]):
        data = tuple(tuple(int(x) for x in row) for row in entries)
        cols = len(data[0]) if data else 0
        if any(len(row) != cols for row in data):
            raise ValidationError("ragged rows")
        self.rows = len(data)
        self.cols = cols
        self._data = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def to_list(self) -> list[list[int]]:
        return [list(row) for row in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def __iter__(self):
        return iter(self._data)

    def __eq__(self, other):
        if isinstance(other, IntMatrix):
            return self._data == other._data and self.shape == other.shape
        if isinstance(other, (list, tuple)):
            return self._data == tuple(tuple(r) for r in other)
        return NotImplemented

    def __hash__(self):
        return hash(self._data)

    def __repr__(self):
        return f"IntMatrix({self.to_list()!r})"

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(zip(*self._data)) if self.rows else IntMatrix.zeros(self.cols, 0)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValidationError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntMatrix(_matmul(self._data, other._data, other.cols))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValidationError("shape mismatch")
        return IntMatrix(
            [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self._data, other._data)]
        )

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValidationError("shape mismatch")
        return IntMatrix(
            [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self._data, other._data)]
        )

    def __neg__(self) -> IntMatrix:
        return IntMatrix([[-x for x in row] for row in self._data])

    def trace(self) -> int:
        return sum(self._data[i][i] for i in range(min(self.rows, self.cols)))

    def max_abs(self) -> int:
        return max((abs(x) for row in self._data for x in row), default=0)

    def norm_inf(self) -> int:
        return max((sum(abs(x) for x in row) for row in self._data), default=0)

    def to_json(self) -> dict:
        """Lossless dump: ``{"rows", "cols", "entries"}`` with row-major decimal strings."""
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [str(x) for row in self._data for x in row],
        }

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_json(), **kwargs)

    @classmethod
    def from_json(cls, obj) -> IntMatrix:
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows, cols = int(obj["rows"]), int(obj["cols"])
        flat = [int(x) for x in obj["entries"]]
        if len(flat) != rows * cols:
            raise ValidationError("entry count does not match rows*cols")
        return cls([flat[i * cols:(i + 1) * cols] for i in range(rows)])


class IntPolynomial:
    """Integer polynomial stored by ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        c = [int(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c) if c else (0,)

    @classmethod
    def monomial(cls, k: int) -> IntPolynomial:
        return cls([0] * k + [1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs != (0,) else -1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __eq__(self, other):
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (list, tuple)):
            return self == IntPolynomial(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __mul__(self, other: IntPolynomial) -> IntPolynomial:
        if isinstance(other, int):
            return IntPolynomial([other * c for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> IntPolynomial:
        result = IntPolynomial([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_power(self, k: int) -> IntPolynomial:
        return poly_compose_power(self, k)

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)!r})"

    def __str__(self):
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                xs = "x" if k == 1 else f"x^{k}"
                body = xs if mag == 1 else f"{mag}*{xs}"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def build_Tng(n: int, r: int, s: int) -> IntMatrix:
    """``T_n(g_{r,s})``: ones where ``i - j == r`` or ``j - i == s``."""
    if n < 1:
        raise ValidationError("n must be positive")
    return IntMatrix(
        [[1 if (i - j == r or j - i == s) else 0 for j in range(n)] for i in range(n)]
    )


def shifted_c_power(n: int, m: int) -> IntMatrix:
    """Toeplitz matrix of ``exp(-it) * (1 + exp(it))**m``.

    Entry ``(i, j)`` is ``binomial(m, i - j + 1)``: a single one on the first
    superdiagonal and the binomial row running down from the main diagonal.
    """
    if n < 1 or m < 0:
        raise ValidationError("need n >= 1 and m >= 0")
    return IntMatrix(
        [[comb(m, i - j + 1) if -1 <= i - j <= m - 1 else 0 for j in range(n)]
         for i in range(n)]
    )


def _column_permutation(r: int, s: int) -> list[int]:
    tau = s % r
    perm = [(tau * k) % r for k in range(1, r + 1)]
    perm[-1] = r
    return perm


def construct_M_P(r: int, s: int) -> tuple[IntMatrix, IntMatrix]:
    """Exponent tables (sigma x r) selecting the factors of each B matrix.

    Row ``beta + 1`` gives ``(m_k, p_k)`` for orders with ``n mod sigma == beta``.
    Built from the row recurrences, then column-permuted when ``r > 1``.
    """
    if r < 1 or s < 1:
        raise ValidationError("r and s must be positive")
    if r > s:
        raise ValidationError("require r <= s")
    if gcd(r, s) != 1:
        raise ValidationError(f"construct_M_P needs coprime offsets, got gcd({r}, {s}) = {gcd(r, s)}")
    sigma = r + s
    tau = s % r
    M = [[1] * r]
    q = (s - tau) // r
    P = [[q if j <= r - tau else q + 1 for j in range(1, r + 1)]]
    m_hit = (-1) % r
    p_hit = (r - tau - 1) % r
    for i in range(2, sigma + 1):
        prev_m, prev_p = M[-1], P[-1]
        M.append([prev_m[j - 1] + ((j - i) % r == m_hit) for j in range(1, r + 1)])
        P.append([prev_p[j - 1] - ((j - i) % r == p_hit) for j in range(1, r + 1)])
    if r > 1:
        perm = _column_permutation(r, s)
        M = [[row[p - 1] for p in perm] for row in M]
        P = [[row[p - 1] for p in perm] for row in P]
    return IntMatrix(M), IntMatrix(P)


def _toeplitz_rect(rows, cols, first_col, first_row):
    return [
        [first_col[i - j] if i >= j else first_row[j - i] for j in range(cols)]
        for i in range(rows)
    ]


def construct_M_P_shift_arrays(r: int, s: int) -> tuple[IntMatrix, IntMatrix]:
    """Same tables as :func:`construct_M_P`, built from repeated index arrays.

    Kept as an independent route; the two constructions are cross-checked in
    the test suite.
    """
    if gcd(r, s) != 1 or r > s:
        raise ValidationError("need coprime r <= s")
    sigma = r + s
    m_array = [v for v in range(1, sigma + 1) for _ in range(r)]
    p_array = [v for v in range(-1, s + 1) for _ in range(r)]
    M = _toeplitz_rect(sigma, r, m_array[r - 1:r - 1 + sigma], [1] * r)
    P = _toeplitz_rect(sigma, r, p_array[1:sigma + 1][::-1], p_array[sigma:sigma + r])
    if r > 1:
        perm = _column_permutation(r, s)
        M = [[row[p - 1] for p in perm] for row in M]
        P = [[row[p - 1] for p in perm] for row in P]
    return IntMatrix(M), IntMatrix(P)


def _times_bidiag_power(x, p):
    # X @ (I + N)**p with N the upper shift; p < 0 applies the exact inverse
    # by forward substitution along each row.
    n = len(x)
    out = [list(row) for row in x]
    if p >= 0:
        for _ in range(p):
            for row in out:
                for j in range(n - 1, 0, -1):
                    row[j] += row[j - 1]
    else:
        for _ in range(-p):
            for row in out:
                for j in range(1, n):
                    row[j] -= row[j - 1]
    return out


def b_restricted(n: int, r: int, s: int) -> bool:
    """True when the corner perturbation would cross the diagonal."""
    sigma = r + s
    return n % sigma > s and n <= (r - 1) * sigma


def _raw_B(n_sigma, m_row, p_row):
    B = None
    for m, p in zip(m_row, p_row):
        factor = shifted_c_power(n_sigma, m).T.to_list()
        B = factor if B is None else _matmul(B, factor, n_sigma)
        B = _times_bidiag_power(B, p)
    return B


_corner_cache: dict = {}
_corner_lock = threading.Lock()


def corner_perturbation(r: int, s: int, beta_sigma: int) -> IntMatrix:
    """Absolute top-right ``(r-1) x (r-1)`` block of the uncorrected reference build.

    The reference order is ``sigma**3 + beta_sigma``, far enough from the band
    that the block holds only the spurious entries.  Cached per
    ``(r, s, beta_sigma)``.
    """
    key = (r, s, beta_sigma)
    cached = _corner_cache.get(key)
    if cached is not None:
        return cached
    sigma = r + s
    M, P = construct_M_P(r, s)
    n_ref = sigma ** 2
    big = _raw_B(n_ref, M.row(beta_sigma), P.row(beta_sigma))
    k = r - 1
    block = IntMatrix([[abs(x) for x in row[n_ref - k:]] for row in big[:k]])
    with _corner_lock:
        _corner_cache[key] = block
    return block


def construct_B(n: int, r: int, s: int, remove_corner: bool = True) -> IntMatrix:
    """The ``n_sigma x n_sigma`` integer matrix whose eigenvalues give the positive real spectrum.

    ``gcd(r, s)`` must be 1.  When ``n mod sigma > s`` the raw product carries
    an integer perturbation in its top-right corner; it is read off a large
    reference build and removed (subtracted for odd ``n_sigma``, added for
    even).
    """
    params = compute_params(n, r, s)
    if params.gamma != 1:
        raise ValidationError(f"construct_B needs coprime offsets, got gcd = {params.gamma}")
    n_sigma, beta = params.n_sigma, params.beta_sigma
    if n_sigma < 1:
        raise ValidationError(f"n={n} < sigma={params.sigma}: B would be empty")
    needs_corner = beta > s and remove_corner
    if needs_corner and n <= (r - 1) * params.sigma:
        raise RestrictionError(
            f"n={n} <= (r-1)*sigma={(r - 1) * params.sigma} with beta_sigma={beta} > s={s}: "
            "the corner perturbation crosses the diagonal (manual-construction regime)"
        )
    M, P = construct_M_P(r, s)
    B = _raw_B(n_sigma, M.row(beta), P.row(beta))
    if needs_corner:
        k = min(r - 1, n_sigma)
        corner = corner_perturbation(r, s, beta)
        sign = -1 if n_sigma % 2 else 1
        for i in range(k):
            for j in range(k):
                B[i][n_sigma - k + j] += sign * corner[i, r - 1 - k + j]
    return IntMatrix(B)


def char_poly(a: IntMatrix) -> IntPolynomial:
    """Exact ``det(xI - A)`` by the Faddeev-LeVerrier recurrence.

    For integer ``A`` every division ``trace/k`` is exact; this is asserted.
    """
    if not a.is_square:
        raise ValidationError(f"char_poly needs a square matrix, got {a.shape}")
    n = a.rows
    if n == 0:
        return IntPolynomial([1])
    A = a.to_list()
    sparse_a = _sparse_rows(A)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    M = [[0] * n for _ in range(n)]
    c = 1
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        M = _matmul(A, M, n) if k > 1 else M
        for i in range(n):
            M[i][i] += c
        trace = 0
        for i, row in enumerate(sparse_a):
            for j, v in row:
                trace += v * M[j][i]
        c, rem = divmod(-trace, k)
        if rem:
            raise ArithmeticError(f"inexact Faddeev-LeVerrier division at step {k}")
        coeffs[n - k] = c
    return IntPolynomial(coeffs)


def poly_compose_power(q: IntPolynomial, k: int) -> IntPolynomial:
    """``q(x**k)``."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    out = [0] * ((len(q.coeffs) - 1) * k + 1)
    for i, c in enumerate(q.coeffs):
        out[i * k] = c
    return IntPolynomial(out)
