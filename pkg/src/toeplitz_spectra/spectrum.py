"""Full spectra of two-off-diagonal Toeplitz matrices from small B matrices.

The positive real eigenvalues of ``T_n(g_{r,s})`` are omega-th roots of the
eigenvalues of one or two integer matrices of order about ``n / sigma``;
every other nonzero eigenvalue is a rotation of one of them by an omega-th
root of unity, and the rest are exact zeros.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import gmpy2

from .errors import ValidationError
from .exact import IntMatrix, construct_B
from .mplinalg import (
    DEFAULT_PRECISION,
    MPMatrix,
    Spectrum,
    check_precision,
    eigvals,
    machine_eps,
)
from .params import ParamSet, SymbolSpec, compute_params, reduce_symbol

__all__ = [
    "Spectrum",
    "BBlock",
    "b_blocks",
    "positive_real_spectrum",
    "full_spectrum_g",
    "full_spectrum_f",
    "upper_bound_R",
    "eval_frak_b",
    "CLAMP_FACTOR",
]

CLAMP_FACTOR = 2 ** 16


@dataclass(frozen=True)
class BBlock:
    """One B matrix and how many times its root-eigenvalues repeat."""

    n: int
    r: int
    s: int
    multiplicity: int
    matrix: IntMatrix


def b_blocks(params: ParamSet) -> list[BBlock]:
    """The (at most two) B matrices behind ``T_n(g_{r,s})``.

    With the reduced triple ``(n_gamma, r_gamma, s_gamma)`` the block for
    ``n_gamma`` counts ``gamma - beta_gamma`` times and the block for
    ``n_gamma + 1`` counts ``beta_gamma`` times.  A block whose order is below
    ``sigma_gamma`` has no positive eigenvalues and is skipped on its own; the
    other block may still contribute (e.g. ``T_5(g_{2,4})``).
    """
    rg, sg, sig = params.r_gamma, params.s_gamma, params.sigma_gamma
    out = []
    for order, mult in (
        (params.n_gamma, params.gamma - params.beta_gamma),
        (params.n_gamma + 1, params.beta_gamma),
    ):
        if mult and order >= sig:
            out.append(BBlock(order, rg, sg, mult, construct_B(order, rg, sg)))
    return out


def _omega_root(lam, omega, tol):
    # principal omega-th root then real part; tiny values near the negative
    # axis are clamped to zero, anything else suspicious is flagged
    flag = None
    if lam.real < 0 or abs(lam.imag) > tol:
        if abs(lam) <= tol:
            return gmpy2.mpfr(0), f"clamped {complex(lam):.3g} to 0"
        flag = f"B eigenvalue {complex(lam):.6g} is not positive real"
    if lam.imag == 0 and lam.real >= 0:
        return gmpy2.root(lam.real, omega), flag
    return gmpy2.exp(gmpy2.log(lam) / omega).real, flag


def _solve_block(block: BBlock, omega: int, precision: int, backend):
    spec = eigvals(MPMatrix.from_int_matrix(block.matrix, precision), backend=backend)
    flags = []
    with gmpy2.context(precision=precision):
        tol = CLAMP_FACTOR * machine_eps(precision) * max(block.matrix.norm_inf(), 1)
        roots = []
        for lam in spec:
            x, flag = _omega_root(lam, omega, tol)
            roots.append(x)
            if flag:
                flags.append(f"n={block.n}: {flag}")
    return roots, flags


def _positive_real(params: ParamSet, precision: int, backend, parallel: bool):
    blocks = b_blocks(params)
    omega = params.omega
    if parallel and len(blocks) == 2:
        # the compiled kernel releases the GIL, so the two solves overlap
        with ThreadPoolExecutor(max_workers=2) as pool:
            results = list(pool.map(lambda b: _solve_block(b, omega, precision, backend), blocks))
    else:
        results = [_solve_block(b, omega, precision, backend) for b in blocks]
    values, flags = [], []
    for block, (roots, fl) in zip(blocks, results):
        values.extend(roots * block.multiplicity)
        flags.extend(fl)
    return values, flags


def positive_real_spectrum(n: int, r: int, s: int, precision: int = DEFAULT_PRECISION, *,
                           backend: str | None = None, parallel: bool = True) -> Spectrum:
    """Positive real eigenvalues of ``T_n(g_{r,s})`` with multiplicity, ascending.

    Values are real (zero imaginary part).  The result's ``flags`` lists any B
    eigenvalue that was clamped or found off the positive axis.
    """
    check_precision(precision)
    params = compute_params(n, r, s)
    values, flags = _positive_real(params, precision, backend, parallel)
    return Spectrum.from_values(values, precision, flags)


def _rotations(omega: int, precision: int):
    with gmpy2.context(precision=precision):
        two_pi = 2 * gmpy2.const_pi()
        rots = [gmpy2.mpc(1)]
        for alpha in range(1, omega):
            if 4 * alpha == omega:
                rots.append(gmpy2.mpc(0, 1))
            elif 2 * alpha == omega:
                rots.append(gmpy2.mpc(-1))
            elif 4 * alpha == 3 * omega:
                rots.append(gmpy2.mpc(0, -1))
            else:
                t = two_pi * alpha / omega
                rots.append(gmpy2.mpc(gmpy2.cos(t), gmpy2.sin(t)))
        return rots


def full_spectrum_g(n: int, r: int, s: int, precision: int = DEFAULT_PRECISION, *,
                    backend: str | None = None, parallel: bool = True) -> Spectrum:
    """All ``n`` eigenvalues of ``T_n(g_{r,s})``: rotations of the positive reals plus zeros."""
    check_precision(precision)
    params = compute_params(n, r, s)
    pos, flags = _positive_real(params, precision, backend, parallel)
    with gmpy2.context(precision=precision):
        rots = _rotations(params.omega, precision)
        values = [gmpy2.mpc(0)] * params.n_zero
        values += [x * rot for x in pos for rot in rots]
    if len(values) != n:
        raise AssertionError(f"eigenvalue count {len(values)} != n={n} for {params}")
    return Spectrum(tuple(values), precision, n, tuple(flags))


def full_spectrum_f(n: int, spec: SymbolSpec, precision: int = DEFAULT_PRECISION, *,
                    backend: str | None = None, parallel: bool = True) -> Spectrum:
    """Eigenvalues of ``T_n(f)`` for a three-term symbol.

    Triangular cases (both off-diagonals on one side, or a zero coefficient)
    return ``n`` copies of ``f0``.
    """
    check_precision(precision)
    if n < 1:
        raise ValidationError("n must be a positive integer")
    if spec.triangular:
        with gmpy2.context(precision=precision):
            f0 = gmpy2.mpc(spec.f0)
        return Spectrum((f0,) * n, precision, n)
    shift, scale, (r, s) = reduce_symbol(spec, precision)
    g = full_spectrum_g(n, r, s, precision, backend=backend, parallel=parallel)
    with gmpy2.context(precision=precision):
        values = tuple(shift + scale * z for z in g)
    return Spectrum(values, precision, n, g.flags)


def _bound_power(r: int, s: int) -> Fraction:
    sigma = r + s
    return Fraction(sigma ** sigma, r ** r * s ** s)


def upper_bound_R(r: int, s: int, precision: int = DEFAULT_PRECISION):
    """``sigma / (r**(r/sigma) * s**(s/sigma))``, the supremum of the positive real eigenvalues."""
    check_precision(precision)
    if r < 1 or s < 1:
        raise ValidationError("r and s must be positive")
    rs = _bound_power(r, s)
    with gmpy2.context(precision=precision + 32):
        q = gmpy2.mpfr(gmpy2.mpq(rs.numerator, rs.denominator))
        root = gmpy2.root(q, r + s)
    with gmpy2.context(precision=precision):
        return gmpy2.mpfr(root)


def eval_frak_b(r: int, s: int, theta, precision: int = DEFAULT_PRECISION):
    """``sin(t)**sigma / (sin(r t/sigma)**r * sin(s t/sigma)**s)``; the limit ``R**sigma`` at 0."""
    check_precision(precision)
    if r < 1 or s < 1 or gcd(r, s) != 1:
        raise ValidationError("need coprime positive r, s")
    sigma = r + s
    with gmpy2.context(precision=precision):
        t = gmpy2.mpfr(theta)
        if abs(t) >= gmpy2.const_pi():
            raise ValidationError("theta must lie in (-pi, pi)")
        if t == 0:
            rs = _bound_power(r, s)
            return gmpy2.mpfr(gmpy2.mpq(rs.numerator, rs.denominator))
        num = gmpy2.sin(t) ** sigma
        den = gmpy2.sin(r * t / sigma) ** r * gmpy2.sin(s * t / sigma) ** s
        return num / den
