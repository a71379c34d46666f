"""Exception and warning types shared across the package."""


class ShiftBtError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ShiftBtError):
    """Matrix dimensions do not conform."""


class NotStable(ShiftBtError):
    """A matrix that must be asymptotically stable has spectral abscissa >= 0."""


class SingularPencil(ShiftBtError):
    """Sylvester solve failed because the spectra of the coefficient matrices overlap."""


class NotPsd(ShiftBtError):
    """Symmetric matrix has an eigenvalue below the admissible negative tolerance."""


class GridMisaligned(ShiftBtError):
    """An input breakpoint does not coincide with a simulation grid point."""


class UnboundedInput(ShiftBtError):
    """Piecewise-constant input is not square integrable (nonzero trailing value)."""


class RankDeficient(ShiftBtError):
    """Requested reduced order exceeds the numerical rank of the Gramian product."""


class NotBiorthogonal(ShiftBtError):
    """Projection matrices fail the W^T V = I check."""


class AlphaResonance(ShiftBtError):
    """Shift rate collides with an eigenvalue of the reduced state matrix."""


class ZeroX0(ShiftBtError):
    """Heuristic needs a nonzero initial-value basis."""


class ZeroZ0(ShiftBtError):
    """Heuristic needs a nonzero initial-value coefficient norm."""


class DimensionTooSmall(ShiftBtError):
    """System too small for the requested example construction."""


class ShiftBtWarning(UserWarning):
    """Base class for warnings emitted by this package."""


class TiedSingularValues(ShiftBtWarning):
    """Truncation index falls on a singular-value tie; ROM stability not guaranteed."""


class AlphaResonanceWarning(ShiftBtWarning):
    """Shift rate was perturbed to step off an eigenvalue of the reduced state matrix."""


class NotMinimalWarning(ShiftBtWarning):
    """Realization is numerically non-minimal; computation restricted to the minimal part."""


class NegativeUnderRoot(ShiftBtWarning):
    """Weighted tail sum under the square root came out negative; bound clamped at 0."""


class SingularityWarning(ShiftBtWarning):
    """Singular-value multiplicity detected; gradient used a one-sided difference."""
