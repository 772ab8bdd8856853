"""Self-adaptive (1,lambda) EA on OneMax with exact and Monte-Carlo analysis tools."""
from .algorithms import AlgorithmConfig, RunRecord, run
from .core import RateLadder, SearchPoint, build_ladder, standard_bit_mutation

__all__ = [
    "AlgorithmConfig",
    "RateLadder",
    "RunRecord",
    "SearchPoint",
    "build_ladder",
    "run",
    "standard_bit_mutation",
]
__version__ = "0.1.0"
