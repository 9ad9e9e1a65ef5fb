"""Complex-time integration and numerical checks of the exact results."""

from .integrator import (
    IntegrationError,
    IntegratorConfig,
    PathSegment,
    Trajectory,
    compile_system,
    deviation,
    integrate,
    rk4,
    segments,
)
from .verify import *  # noqa: F401,F403
from .verify import __all__ as _verify_all

__all__ = ["IntegrationError", "IntegratorConfig", "PathSegment", "Trajectory", "compile_system",
           "deviation", "integrate", "rk4", "segments"] + list(_verify_all)
