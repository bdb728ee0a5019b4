"""Extreme-value analysis of k-th best user selection in underlay cognitive radio.

Closed-form large-N metrics (average and effective throughput, BER, outage)
and a reproducible Monte Carlo simulator of the exact finite-N system.
"""

from .asymptotics import AsymptoticResult, evaluate
from .model import (
    UNLIMITED,
    AvgBer,
    AvgThroughput,
    CsiParams,
    EffThroughput,
    LimitingDistribution,
    Outage,
    SystemParams,
)
from .montecarlo import EstimateResult, estimate, estimate_many
from .specfun import DomainError, QuadratureError, QuadratureSpec

__all__ = [
    "UNLIMITED",
    "AsymptoticResult",
    "AvgBer",
    "AvgThroughput",
    "CsiParams",
    "DomainError",
    "EffThroughput",
    "EstimateResult",
    "LimitingDistribution",
    "Outage",
    "QuadratureError",
    "QuadratureSpec",
    "SystemParams",
    "estimate",
    "estimate_many",
    "evaluate",
]

__version__ = "0.1.0"
