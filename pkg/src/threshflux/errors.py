"""Exception hierarchy shared by every module of the package."""


class ThreshfluxError(Exception):
    """Base class for all errors raised by threshflux."""


class ProfileError(ThreshfluxError, ValueError):
    """Malformed segment list (gaps, overlaps, non-constant unbounded tails...)."""


class NonFiniteBound(ThreshfluxError, ValueError):
    pass


class CrossingViolation(ThreshfluxError, ValueError):
    """A sample point violates the regime condition of the requested crossing."""

    def __init__(self, x: float, value: float, reason: str = ""):
        self.x = float(x)
        self.value = float(value)
        msg = f"regime condition violated at x={self.x!r} (u0={self.value!r})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class MultipleCrossings(ThreshfluxError, ValueError):
    pass


class DegenerateJump(ThreshfluxError, ValueError):
    pass


class NegativeTime(ThreshfluxError, ValueError):
    pass


class DomainError(ThreshfluxError, ValueError):
    pass


class BeyondExhaustion(DomainError):
    """The right surplus exceeds the total left deficit: y(x) is undefined."""


class TailNotConstant(ThreshfluxError, ValueError):
    pass


class CflViolation(ThreshfluxError, ValueError):
    pass


class UnresolvedDiscontinuity(ThreshfluxError, RuntimeError):
    pass


class ConfigError(ThreshfluxError, ValueError):
    """Scenario file problem; ``field`` names the offending key path."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
