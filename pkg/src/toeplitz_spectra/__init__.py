"""Spectra of Toeplitz matrices with two nonzero off-diagonals.

``T_n(g_{r,s})`` has ones on the r-th subdiagonal and the s-th
superdiagonal.  Its spectrum follows from the eigenvalues of one or two small
integer matrices (the B matrices), so an ``n x n`` nonsymmetric eigenproblem
shrinks to problems of order about ``n / (r + s)``.

Quick start::

    >>> from toeplitz_spectra import full_spectrum_g, verify_exact_identity
    >>> spec = full_spectrum_g(15, 1, 2, precision=256)
    >>> len(spec)
    15
    >>> bool(verify_exact_identity(15, 1, 2))
    True
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (
    ConvergenceError,
    DegenerateSymbolError,
    PrecisionError,
    RestrictionError,
    ToeplitzSpectraError,
    ValidationError,
)
from .exact import (
    IntMatrix,
    IntPolynomial,
    b_restricted,
    build_Tng,
    char_poly,
    construct_B,
    construct_M_P,
    construct_M_P_shift_arrays,
    corner_perturbation,
    poly_compose_power,
    shifted_c_power,
)
from .mplinalg import DEFAULT_PRECISION, MPMatrix, Spectrum, eigvals, machine_eps, to_hessenberg
from .params import ParamSet, SymbolSpec, compute_params, reduce_symbol
from .spectrum import (
    eval_frak_b,
    full_spectrum_f,
    full_spectrum_g,
    positive_real_spectrum,
    upper_bound_R,
)
from .verify import (
    VerificationReport,
    bench,
    condition_number,
    oracle_spectrum,
    spectral_error,
    verify_exact_identity,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "ConvergenceError",
    "DegenerateSymbolError",
    "PrecisionError",
    "RestrictionError",
    "ToeplitzSpectraError",
    "ValidationError",
    "IntMatrix",
    "IntPolynomial",
    "b_restricted",
    "build_Tng",
    "char_poly",
    "construct_B",
    "construct_M_P",
    "construct_M_P_shift_arrays",
    "corner_perturbation",
    "poly_compose_power",
    "shifted_c_power",
    "DEFAULT_PRECISION",
    "MPMatrix",
    "Spectrum",
    "eigvals",
    "machine_eps",
    "to_hessenberg",
    "ParamSet",
    "SymbolSpec",
    "compute_params",
    "reduce_symbol",
    "eval_frak_b",
    "full_spectrum_f",
    "full_spectrum_g",
    "positive_real_spectrum",
    "upper_bound_R",
    "VerificationReport",
    "bench",
    "condition_number",
    "oracle_spectrum",
    "spectral_error",
    "verify_exact_identity",
]
