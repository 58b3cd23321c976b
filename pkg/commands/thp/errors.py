"""
error types raised by the simulator library
all of them are ValueError subclasses so callers that only know ValueError keep working
"""


class DegenerateChannelError(ValueError):
    """channel (or quantized channel) matrix is numerically rank deficient"""


class DomainError(ValueError):
    """argument outside the domain of a function, or an infeasible parameter set"""


class ConfigError(ValueError):
    """invalid experiment configuration"""


class InsufficientSamplesError(ValueError):
    """too few samples for a goodness-of-fit statistic"""
