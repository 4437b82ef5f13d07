"""Exception hierarchy shared by all coilnet modules."""


class CoilnetError(Exception):
    """Base class for all coilnet errors."""


class DomainError(CoilnetError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class GeometryError(CoilnetError, ValueError):
    """A winding or profile is geometrically invalid (e.g. colliding turns)."""


class AccuracyError(CoilnetError, RuntimeError):
    """A quadrature or refinement loop failed to reach its tolerance."""


class SingularNetworkError(CoilnetError, RuntimeError):
    """The circuit matrix is singular (disconnected or degenerate network)."""

    def __init__(self, message: str, nodes: tuple = ()):
        super().__init__(message)
        self.nodes = tuple(nodes)


class TopologyError(CoilnetError, ValueError):
    """A requested circuit topology is inapplicable (e.g. mixed-sign coupling
    with a capacitive decoupling scheme)."""


class ConfigError(CoilnetError, ValueError):
    """A run configuration is malformed (unknown key, missing field, bad unit)."""
