class EnergyClockError(Exception):
    """Base error. ``exit_code`` is what the CLI returns when it escapes a command."""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigInvalidError(EnergyClockError):
    exit_code = 2


class VerificationFailedError(EnergyClockError):
    exit_code = 3


class NumericalError(EnergyClockError):
    exit_code = 4


class DomainTooSmallError(NumericalError):
    pass


class TruncationMassError(NumericalError):
    pass


class RepresentationError(NumericalError):
    pass


class NormalizationError(NumericalError):
    pass


class GridMismatchError(NumericalError):
    pass


class AliasingError(NumericalError):
    """Momentum content reaches the Nyquist edge of the lattice."""


class SingularCouplingError(NumericalError):
    """1 + g(x) q <= 0 somewhere along the integration path."""


class SupportError(NumericalError):
    """Pointer value outside the support the model is defined on."""


class UnsupportedPowerError(NumericalError):
    pass


class GridTooCoarseError(NumericalError):
    pass


class InsufficientPaddingError(NumericalError):
    pass
