"""Chart atlases, accessible singularities, local indices and the alpha-test."""

from .atlas import (
    Atlas,
    AtlasError,
    Chart,
    Divisor,
    DivisorComponent,
    builtin_atlas,
    parse_atlas,
    to_chart,
)
from .singular import *  # noqa: F401,F403
from .singular import __all__ as _singular_all

__all__ = ["Atlas", "AtlasError", "Chart", "Divisor", "DivisorComponent", "builtin_atlas",
           "parse_atlas", "to_chart"] + list(_singular_all)

from .alpha import AlphaTestReport, alpha_reduce, alpha_test, reduced_residual_zero, solve_reduced
from .blowup import blow_up, resolution_script

__all__ += ["AlphaTestReport", "alpha_reduce", "alpha_test", "reduced_residual_zero",
            "solve_reduced", "blow_up", "resolution_script"]
