"""Eigen kernels: compiled MPFR backend with a pure-Python fallback.

The compiled module is used when it imports; set ``TOEPLITZ_SPECTRA_PURE=1``
to force the fallback.  ``BACKEND`` names the active choice and
:func:`get_backend` returns either implementation explicitly.
"""
import os

from . import _qr_py

try:
    from . import _qr_c
except ImportError:  # extension not built
    _qr_c = None


def get_backend(name=None):
    if name is None:
        name = BACKEND
    if name == "c":
        if _qr_c is None:
            raise ImportError("compiled kernel toeplitz_spectra._kernels._qr_c is not available")
        return _qr_c
    if name == "python":
        return _qr_py
    raise ValueError(f"unknown kernel backend {name!r}")


if _qr_c is not None and os.environ.get("TOEPLITZ_SPECTRA_PURE", "") in ("", "0"):
    BACKEND = "c"
else:
    BACKEND = "python"

_impl = get_backend(BACKEND)
hessenberg = _impl.hessenberg
hqr_eigvals = _impl.hqr_eigvals
eigvals = _impl.eigvals

__all__ = ["BACKEND", "get_backend", "hessenberg", "hqr_eigvals", "eigvals"]
