"""Exception hierarchy."""


class RabiError(Exception):
    """Base class for all errors raised by multirabi."""


class ModelInvalid(RabiError, ValueError):
    """A ladder model or coupling vector violates its invariants."""


class NotResonant(RabiError):
    """The drive frequencies do not match the level spacings."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"drives are off resonance (max |detuning| = {report.max_detuning:.3e} "
            f"> tol = {report.tol:.3e})"
        )


class DegenerateSpectrum(RabiError, ArithmeticError):
    """The closed-form normalizers are singular for these couplings."""


class AllZeroCouplings(DegenerateSpectrum):
    """Every coupling is zero; no closed-form eigenbasis exists."""


class ConvergenceFailure(RabiError, ArithmeticError):
    """The tridiagonal eigensolver exceeded its sweep budget."""


class NotUnitary(RabiError, ValueError):
    """A matrix expected to be unitary is not, within tolerance."""


class IndexOutOfRange(RabiError, IndexError):
    """A level index lies outside 0..n-1."""
