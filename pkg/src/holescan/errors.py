"""Exception types shared across holescan modules."""


class HoleScanError(Exception):
    """Base class for all holescan errors."""


class ConfigError(HoleScanError, ValueError):
    """Invalid configuration or parameter value."""


class OutOfRange(ConfigError):
    pass


class EmptyInput(ConfigError):
    pass


class DomainError(HoleScanError, ValueError):
    """Closed-form expression evaluated outside its domain (ln/sqrt argument)."""


class ParseError(HoleScanError, ValueError):
    def __init__(self, message, line=None, token=None):
        self.line = line
        self.token = token
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class NonConvergence(HoleScanError, RuntimeError):
    pass


class OrderCapExceeded(HoleScanError, RuntimeError):
    pass


class InfeasibleSubSpec(HoleScanError, ValueError):
    pass


class InconsistentBand(HoleScanError):
    """Full-band fine-sensing test disagrees with the coarse decision."""
