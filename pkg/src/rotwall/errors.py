"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line front end can map
physics-contract violations onto distinct process exit statuses.
"""


class RotwallError(Exception):
    exit_code = 1


class ConfigError(RotwallError, ValueError):
    exit_code = 2


class InvalidBasisError(RotwallError, ValueError):
    exit_code = 3


class UnitarityError(RotwallError):
    """Operator handed to a routine that requires a unitary is not unitary."""

    exit_code = 4


class TruncationLeakError(RotwallError):
    """Probability reached the top of the truncated J basis."""

    exit_code = 5

    def __init__(self, message, pulse_index=None, initial=None):
        super().__init__(message)
        self.pulse_index = pulse_index
        self.initial = initial


class HamiltonianDriftError(RotwallError):
    exit_code = 6


class NumericalQualityError(RotwallError):
    exit_code = 7


class NoWallError(RotwallError):
    exit_code = 8


class UnknownMoleculeError(RotwallError, KeyError):
    exit_code = 9

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DegenerateConfigurationError(RotwallError, ValueError):
    exit_code = 10


class ParameterMismatchError(RotwallError, ValueError):
    exit_code = 11


EXIT_CODES = {
    cls.__name__: cls.exit_code
    for cls in (
        RotwallError,
        ConfigError,
        InvalidBasisError,
        UnitarityError,
        TruncationLeakError,
        HamiltonianDriftError,
        NumericalQualityError,
        NoWallError,
        UnknownMoleculeError,
        DegenerateConfigurationError,
        ParameterMismatchError,
    )
}
