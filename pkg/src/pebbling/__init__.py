"""Pebble-game toolkit.

Single-sink DAGs, standard and reversible pebblings, exact price search,
graph families with known prices, certified strategy emitters, and the
QBF-to-DAG reduction with its space ledger.
"""

from pebbling.dag import Dag, CycleError, ValidationReport, validate
from pebbling.engine import (
    REVERSIBLE,
    STANDARD,
    IllegalMoveError,
    Trace,
    replay,
    reverse_trace,
    validate_trace,
)
from pebbling.families import GadgetHandle, build_family
from pebbling.qbf import Qbf, gamma, parse_qdimacs
from pebbling.reduction import qbf_reduction
from pebbling.solver import (
    CapExceededError,
    PriceQuery,
    PriceResult,
    dt_play,
    dt_price,
    price,
    solve,
)
from pebbling.strategies import (
    StrategyBudgetError,
    dt_challenger_optimal,
    dt_challenger_road,
    dt_pebbler_bisection,
    dt_pebbler_optimal,
    strat_christmas,
    strat_mold,
    strat_path_reversible,
    strat_product_reversible,
    strat_product_standard,
    strat_pyramid_reversible,
    strat_pyramid_standard,
    strat_qbf,
    strat_tree_reversible,
)

__all__ = [
    "Dag",
    "CycleError",
    "ValidationReport",
    "validate",
    "REVERSIBLE",
    "STANDARD",
    "Trace",
    "IllegalMoveError",
    "replay",
    "reverse_trace",
    "validate_trace",
    "GadgetHandle",
    "build_family",
    "Qbf",
    "gamma",
    "parse_qdimacs",
    "qbf_reduction",
    "CapExceededError",
    "PriceQuery",
    "PriceResult",
    "dt_play",
    "dt_price",
    "price",
    "solve",
    "StrategyBudgetError",
    "dt_challenger_optimal",
    "dt_challenger_road",
    "dt_pebbler_bisection",
    "dt_pebbler_optimal",
    "strat_christmas",
    "strat_mold",
    "strat_path_reversible",
    "strat_product_reversible",
    "strat_product_standard",
    "strat_pyramid_reversible",
    "strat_pyramid_standard",
    "strat_qbf",
    "strat_tree_reversible",
]
