"""Symbol normalisation and the integer parameters of the reduction.

A symbol ``f(t) = f0 + fr*exp(i*r*t) + fms*exp(-i*s*t)`` generates a Toeplitz
matrix with ``fr`` on the r-th subdiagonal and ``fms`` on the s-th
superdiagonal.  Its spectrum is an affine image of the spectrum generated by
``g(t) = exp(i*r*t) + exp(-i*s*t)``, and everything about the latter is
governed by the integers collected in :class:`ParamSet`.
"""
from __future__ import annotations

import cmath
from dataclasses import asdict, dataclass
from math import gcd

import gmpy2

from .errors import DegenerateSymbolError, ValidationError

__all__ = [
    "SymbolSpec",
    "ParamSet",
    "compute_params",
    "reduce_symbol",
    "zero_count",
]


@dataclass(frozen=True)
class SymbolSpec:
    """Three-term symbol with offsets ``r`` (below) and ``s`` (above).

    A negative ``r`` or ``s`` means both off-diagonals sit on the same side
    of the main diagonal; such matrices are triangular.
    """

    r: int
    s: int
    f0: complex = 0
    fr: complex = 1
    fms: complex = 1

    def __post_init__(self):
        if self.r == 0 or self.s == 0:
            raise ValidationError("offsets r and s must be nonzero")

    @property
    def same_side(self) -> bool:
        return self.r < 0 or self.s < 0

    @property
    def triangular(self) -> bool:
        """True when every eigenvalue equals ``f0``."""
        return self.same_side or self.fr == 0 or self.fms == 0

    def transposed(self) -> SymbolSpec:
        return SymbolSpec(r=self.s, s=self.r, f0=self.f0, fr=self.fms, fms=self.fr)


@dataclass(frozen=True)
class ParamSet:
    n: int
    r: int
    s: int
    gamma: int
    sigma: int
    omega: int
    beta_sigma: int
    n_sigma: int
    beta_gamma: int
    n_gamma: int
    r_gamma: int
    s_gamma: int
    sigma_gamma: int
    beta_gamma_sigma: int
    n_gamma_sigma: int
    n_zero: int

    @property
    def n_positive(self) -> int:
        """Number of positive real eigenvalues, counted with multiplicity."""
        return (self.gamma - self.beta_gamma) * self.n_gamma_sigma + (
            self.beta_gamma * ((self.n_gamma + 1) // self.sigma_gamma)
        )

    def as_dict(self) -> dict:
        return asdict(self)


def zero_count(n: int, gamma: int, omega: int) -> int:
    beta_gamma = n % gamma
    n_gamma = (n - beta_gamma) // gamma
    return (gamma - beta_gamma) * (n_gamma % omega) + beta_gamma * ((n_gamma + 1) % omega)


def compute_params(n: int, r: int, s: int) -> ParamSet:
    """All integer parameters for ``T_n(g_{r,s})`` with ``1 <= r <= s``."""
    for name, value in (("n", n), ("r", r), ("s", s)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    if r > s:
        raise ValidationError(
            f"r={r} > s={s}: transpose the matrix (swap r and s) before reducing"
        )
    gamma = gcd(r, s)
    sigma = r + s
    omega = sigma // gamma
    beta_sigma = n % sigma
    beta_gamma = n % gamma
    n_gamma = (n - beta_gamma) // gamma
    beta_gamma_sigma = n_gamma % omega
    return ParamSet(
        n=n,
        r=r,
        s=s,
        gamma=gamma,
        sigma=sigma,
        omega=omega,
        beta_sigma=beta_sigma,
        n_sigma=(n - beta_sigma) // sigma,
        beta_gamma=beta_gamma,
        n_gamma=n_gamma,
        r_gamma=r // gamma,
        s_gamma=s // gamma,
        sigma_gamma=omega,
        beta_gamma_sigma=beta_gamma_sigma,
        n_gamma_sigma=(n_gamma - beta_gamma_sigma) // omega,
        n_zero=zero_count(n, gamma, omega),
    )


def reduce_symbol(spec: SymbolSpec, precision: int | None = None):
    """Return ``(shift, scale, (r, s))`` with ``lambda(T_n(f)) = shift + scale*lambda(T_n(g))``.

    The scale is ``fr**(s/sigma) * fms**(r/sigma)`` with principal branches.
    Writing the diagonal similarity ``D = diag(d**i)`` with
    ``d = exp((Log fms - Log fr)/sigma)`` shows that this branch is always
    attained, so no branch search is needed.

    With ``precision=None`` the result is built from Python complex numbers,
    otherwise from ``gmpy2.mpc`` values at that many mantissa bits.
    """
    if spec.same_side:
        raise DegenerateSymbolError(
            "off-diagonals on the same side: all eigenvalues equal f0"
        )
    if spec.r > spec.s:
        raise ValidationError(
            f"r={spec.r} > s={spec.s}: use spec.transposed() first"
        )
    if spec.fr == 0 or spec.fms == 0:
        raise DegenerateSymbolError(
            "zero off-diagonal coefficient: the matrix is triangular, all eigenvalues equal f0"
        )
    sigma = spec.r + spec.s
    if precision is None:
        scale = cmath.exp(
            (spec.s * cmath.log(spec.fr) + spec.r * cmath.log(spec.fms)) / sigma
        )
        return complex(spec.f0), scale, (spec.r, spec.s)
    with gmpy2.context(precision=precision):
        fr = gmpy2.mpc(spec.fr)
        fms = gmpy2.mpc(spec.fms)
        scale = gmpy2.exp((spec.s * gmpy2.log(fr) + spec.r * gmpy2.log(fms)) / sigma)
        return gmpy2.mpc(spec.f0), scale, (spec.r, spec.s)
