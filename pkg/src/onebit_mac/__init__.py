"""Capacity-region tools for the two-user Gaussian MAC with a one-bit receiver."""

from .dist import MassPointDistribution, PowerBudget
from .info import ChannelParams, ProductInput, i_lambda, rate_tuple
from .solver import SolverConfig, alternate_maximize

__all__ = [
    "ChannelParams",
    "MassPointDistribution",
    "PowerBudget",
    "ProductInput",
    "SolverConfig",
    "alternate_maximize",
    "i_lambda",
    "rate_tuple",
]
