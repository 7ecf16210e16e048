"""Checks of the B-matrix reduction: exact, numeric, and timing.

The exact check compares integer characteristic polynomials and involves no
floating point at all.  The numeric check compares the reduced spectrum with
a dense eigensolve of the full matrix (the *oracle*).
"""
from __future__ import annotations

import datetime as _dt
import functools
import json
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import gmpy2

from .errors import RestrictionError, ValidationError
from .exact import IntMatrix, IntPolynomial, build_Tng, char_poly, poly_compose_power
from .mplinalg import (
    DEFAULT_PRECISION,
    MPMatrix,
    Spectrum,
    check_precision,
    eigvals,
    format_real,
    machine_eps,
)
from .params import ParamSet, compute_params
from .spectrum import b_blocks, full_spectrum_g

__all__ = [
    "ExactIdentity",
    "VerificationReport",
    "spectral_error",
    "verify_exact_identity",
    "oracle_spectrum",
    "condition_number",
    "verify_point",
    "bench",
    "sweep",
    "build_id",
    "write_reports",
]

SINGULAR_FACTOR = 2 ** 16


def _as_spectrum(x, precision=None) -> Spectrum:
    if isinstance(x, Spectrum):
        return x
    return Spectrum.from_values(list(x), precision or DEFAULT_PRECISION)


def spectral_error(a, b, nonzero_only: bool = False):
    """Largest gap between the sorted moduli of two spectra.

    With ``nonzero_only`` the k smallest moduli are dropped from both sides,
    where k is the larger count of exact zeros in either spectrum.  This
    removes the zero cluster, which a dense solver only resolves to about
    ``eps**(1/m)`` for a Jordan block of size m.
    """
    a, b = _as_spectrum(a), _as_spectrum(b)
    if len(a) != len(b):
        raise ValidationError(f"spectra differ in size: {len(a)} vs {len(b)}")
    prec = max(a.precision, b.precision)
    with gmpy2.context(precision=prec):
        ma = sorted(abs(gmpy2.mpc(z)) for z in a)
        mb = sorted(abs(gmpy2.mpc(z)) for z in b)
        if nonzero_only:
            k = max(a.count_zeros(), b.count_zeros())
            ma, mb = ma[k:], mb[k:]
        return max((abs(x - y) for x, y in zip(ma, mb)), default=gmpy2.mpfr(0))


@dataclass(frozen=True)
class ExactIdentity:
    """``char_poly(T_n) == x**n_zero * prod q_k(x**omega)**mult_k`` as integer polynomials.

    ``factors`` holds ``(order, multiplicity, q)`` for each B block.
    """

    holds: bool
    p: IntPolynomial
    product: IntPolynomial
    n_zero: int
    omega: int
    factors: tuple

    def __bool__(self):
        return self.holds


def verify_exact_identity(n: int, r: int, s: int) -> ExactIdentity:
    params = compute_params(n, r, s)
    p = char_poly(build_Tng(n, r, s))
    product = IntPolynomial.monomial(params.n_zero)
    factors = []
    for block in b_blocks(params):
        q = char_poly(block.matrix)
        factors.append((block.n, block.multiplicity, q))
        product = product * poly_compose_power(q, params.omega) ** block.multiplicity
    return ExactIdentity(p == product, p, product, params.n_zero, params.omega, tuple(factors))


def oracle_spectrum(n: int, r: int, s: int, precision: int = DEFAULT_PRECISION, *,
                    backend: str | None = None) -> Spectrum:
    """Dense eigensolve of the full ``T_n(g_{r,s})``."""
    check_precision(precision)
    compute_params(n, r, s)
    return eigvals(MPMatrix.from_int_matrix(build_Tng(n, r, s), precision), backend=backend)


def condition_number(a: IntMatrix, precision: int = DEFAULT_PRECISION, *,
                     backend: str | None = None):
    """``sigma_max / sigma_min`` from the extreme eigenvalues of ``A^T A``.

    Returns ``inf`` when the smallest Gram eigenvalue is below
    ``2**16 * eps * ||A||_inf**2``.
    """
    if not a.is_square:
        raise ValidationError(f"condition_number needs a square matrix, got {a.shape}")
    check_precision(precision)
    gram = a.T @ a
    lams = eigvals(MPMatrix.from_int_matrix(gram, precision), backend=backend)
    with gmpy2.context(precision=precision):
        re = [z.real for z in lams]
        lo, hi = min(re), max(re)
        tol = SINGULAR_FACTOR * machine_eps(precision) * a.norm_inf() ** 2
        if lo <= tol:
            return gmpy2.inf()
        return gmpy2.sqrt(hi / lo)


@dataclass(frozen=True)
class VerificationReport:
    params: ParamSet
    exact_identity_holds: bool | None
    numeric_error: object | None
    precision: int
    oracle_runtime: float | None
    algorithm_runtime: float | None
    condition_numbers: tuple = field(default=())

    def to_dict(self) -> dict:
        p = self.precision
        return {
            "params": self.params.as_dict(),
            "exact_identity_holds": self.exact_identity_holds,
            "numeric_error": None if self.numeric_error is None else format_real(self.numeric_error, p),
            "precision": p,
            "oracle_runtime": self.oracle_runtime,
            "algorithm_runtime": self.algorithm_runtime,
            "condition_numbers": [format_real(c, p) for c in self.condition_numbers],
        }

    def to_json_line(self, timestamp: str | None = None, build: str | None = None) -> str:
        rec = self.to_dict()
        rec["timestamp"] = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat()
        rec["build"] = build or build_id()
        return json.dumps(rec)


@functools.lru_cache(maxsize=1)
def build_id() -> str:
    """``git describe`` of the source tree, or the package version outside a checkout."""
    from . import __version__

    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=here, capture_output=True, text=True, timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        out = None
    if out is not None and out.returncode == 0 and out.stdout.strip():
        return out.stdout.strip()
    return f"v{__version__}"


def _timed_min(fn, repetitions):
    best, result = None, None
    for _ in range(max(1, repetitions)):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def _block_conditions(params: ParamSet, precision: int, backend):
    return tuple(condition_number(b.matrix, precision, backend=backend) for b in b_blocks(params))


def bench(n: int, r: int, s: int, precisions: Sequence[int] = (DEFAULT_PRECISION,),
          repetitions: int = 3, *, nonzero_only: bool = False, oracle: bool = True,
          exact: bool | None = None, conditions: bool = True,
          backend: str | None = None) -> list[VerificationReport]:
    """Minimal wall time over ``repetitions`` for the reduction and the oracle, per precision.

    The exact identity is checked once (by default only for ``n <= 200``);
    ``oracle=False`` skips the dense solve and leaves its fields ``None``.
    """
    params = compute_params(n, r, s)
    if exact is None:
        exact = n <= 200
    holds = verify_exact_identity(n, r, s).holds if exact else None
    reports = []
    for prec in precisions:
        check_precision(prec)
        full_spectrum_g(n, r, s, prec, backend=backend)  # warm the corner cache
        algo_t, g = _timed_min(lambda: full_spectrum_g(n, r, s, prec, backend=backend), repetitions)
        oracle_t = err = None
        if oracle:
            oracle_t, o = _timed_min(lambda: oracle_spectrum(n, r, s, prec, backend=backend),
                                     repetitions)
            err = spectral_error(g, o, nonzero_only)
        conds = _block_conditions(params, prec, backend) if conditions else ()
        reports.append(VerificationReport(params, holds, err, prec, oracle_t, algo_t, conds))
    return reports


def verify_point(n: int, r: int, s: int, precision: int = DEFAULT_PRECISION, *,
                 nonzero_only: bool = False, backend: str | None = None) -> VerificationReport:
    """Exact identity plus one timed numeric cross-check against the oracle."""
    return bench(n, r, s, (precision,), 1, nonzero_only=nonzero_only, exact=True,
                 backend=backend)[0]


def _sweep_point(args):
    n, r, s, precisions, repetitions, nonzero_only, oracle = args
    try:
        return bench(n, r, s, precisions, repetitions, nonzero_only=nonzero_only, oracle=oracle)
    except RestrictionError:
        return []


def sweep(points: Iterable[tuple[int, int, int]], precisions: Sequence[int] = (DEFAULT_PRECISION,),
          repetitions: int = 1, *, jobs: int = 1, nonzero_only: bool = False,
          oracle: bool = True) -> list[VerificationReport]:
    """:func:`bench` over many ``(n, r, s)`` points, optionally in worker processes.

    Points inside the restricted regime are skipped.  The result is sorted by
    ``(n, r, s, precision)`` so it does not depend on completion order.
    """
    tasks = [(n, r, s, tuple(precisions), repetitions, nonzero_only, oracle) for n, r, s in points]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_point, tasks))
    else:
        chunks = [_sweep_point(t) for t in tasks]
    reports = [rep for chunk in chunks for rep in chunk]
    reports.sort(key=lambda rep: (rep.params.n, rep.params.r, rep.params.s, rep.precision))
    return reports


def write_reports(reports: Iterable[VerificationReport], stream) -> None:
    """One JSON object per line, all sharing a timestamp and build id."""
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
    build = build_id()
    for rep in reports:
        stream.write(rep.to_json_line(stamp, build) + "\n")
