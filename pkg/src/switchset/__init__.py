"""Simulation and inference for finite sets whose elements switch type."""

from switchset.model import Interval, Outcome, SetConfig, epoch_mean, make_config, probability_bounds

__all__ = [
    "Interval",
    "Outcome",
    "SetConfig",
    "epoch_mean",
    "make_config",
    "probability_bounds",
]

__version__ = "0.1.0"
