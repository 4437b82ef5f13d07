"""coilnet: air-core resonant coupling transformer design and verification."""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    CoilnetError,
    ConfigError,
    DomainError,
    GeometryError,
    SingularNetworkError,
    TopologyError,
)
from .geometry import (
    MU_0,
    CrossSectionProfile,
    ToroidSpec,
    circular_profile,
    dshape_profile,
    dshape_slope,
    optimal_circular_toroid,
    optimal_dshape_toroid,
    toroid_inductance_approx,
    toroid_inductance_ideal,
)
