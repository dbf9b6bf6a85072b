"""Exact and parameterized solvers for optimal seat arrangement problems.

Agents with cardinal preferences are seated on the vertices of a seat graph.
Four problems are covered: maximum welfare (mwa), maximin utility (mua),
envy-free arrangement (efa) and exchange-stable arrangement (esa).
"""

from .model import (
    Arrangement,
    ArgumentError,
    Instance,
    PreferenceProfile,
    SeatGraph,
    SeatplanError,
    analyze_preferences,
    analyze_seats,
    check_envy_free,
    check_exchange_stable,
    egalitarian,
    envies,
    swap,
    utilities,
    utility,
    welfare,
)
from .oracle import (
    DispatchError,
    OracleTooLarge,
    ResourceError,
    SolveOutcome,
    SolverConfig,
    UnsupportedScale,
    oracle_solve,
)
from .solve import select, solve

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "ArgumentError",
    "DispatchError",
    "Instance",
    "OracleTooLarge",
    "PreferenceProfile",
    "ResourceError",
    "SeatGraph",
    "SeatplanError",
    "SolveOutcome",
    "SolverConfig",
    "UnsupportedScale",
    "analyze_preferences",
    "analyze_seats",
    "check_envy_free",
    "check_exchange_stable",
    "egalitarian",
    "envies",
    "oracle_solve",
    "select",
    "solve",
    "swap",
    "utilities",
    "utility",
    "welfare",
]
