"""Laurent series, the formal Painleve test and series transport."""

from .laurent import LaurentSeries, SeriesError, from_terms, tau_series, time_series
from .painleve import (
    Balance,
    PainleveBranch,
    ScalarODE,
    UnsupportedBalance,
    dominant_balances,
    expand_branch,
    indicial_polynomial,
    painleve_test,
    residual,
    resonances,
)
from .transport import SeriesEvaluator, change_of_unknown, map_series

__all__ = [
    "LaurentSeries", "SeriesError", "from_terms", "tau_series", "time_series", "Balance",
    "PainleveBranch", "ScalarODE", "UnsupportedBalance", "dominant_balances", "expand_branch",
    "indicial_polynomial", "painleve_test", "residual", "resonances", "SeriesEvaluator",
    "change_of_unknown", "map_series",
]
