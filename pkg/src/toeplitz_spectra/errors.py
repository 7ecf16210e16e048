"""Exception hierarchy shared by all modules."""


class ToeplitzSpectraError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(ToeplitzSpectraError, ValueError):
    """Invalid input parameters (bad offsets, shapes, literals...)."""


class DegenerateSymbolError(ValidationError):
    """The symbol has a vanishing off-diagonal coefficient.

    Such matrices are triangular and every eigenvalue equals the diagonal
    coefficient; use :func:`toeplitz_spectra.spectrum.full_spectrum_f`, which
    handles this case directly.
    """


class RestrictionError(ToeplitzSpectraError):
    """The B-matrix construction is not available for this order.

    Raised when corner perturbations would cross the main diagonal, i.e.
    ``beta_sigma > s`` and ``n <= (r - 1) * sigma``.
    """


class PrecisionError(ToeplitzSpectraError):
    """An exact integer does not fit the requested mantissa."""


class ConvergenceError(ToeplitzSpectraError):
    """Shifted QR iteration exhausted its iteration budget."""

    def __init__(self, index, iterations):
        self.index = index
        self.iterations = iterations
        super().__init__(
            f"QR iteration did not converge: subdiagonal entry "
            f"({index}, {index - 1}) still active after {iterations} iterations"
        )
