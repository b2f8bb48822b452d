"""Weighted distribution dynamics for panel data."""

from .conditioning import (ConditionedSeries, joint_distribution, ratio_condition,
                           spatial_condition)
from .density import (DensityGrid, Grid1D, JointDensityGrid, default_grid, kde_1d, kde_2d,
                      marginal_of_joint, silverman_bandwidth)
from .dynamics import (ConditionalKernel, ErgodicResult, NTPCurve, conditional_kernel,
                       ergodic_distribution, net_transition_probability)
from .emissions import FuelFactors, deflate, estimate_co2, intensity
from .panel import (PanelDataset, RelativeSeries, TransitionPairs, coefficient_of_variation,
                    regional_ratio, relative_series, transition_pairs)

__version__ = "0.1.0"

__all__ = [
    "ConditionedSeries",
    "joint_distribution",
    "ratio_condition",
    "spatial_condition",
    "DensityGrid",
    "Grid1D",
    "JointDensityGrid",
    "default_grid",
    "kde_1d",
    "kde_2d",
    "marginal_of_joint",
    "silverman_bandwidth",
    "ConditionalKernel",
    "ErgodicResult",
    "NTPCurve",
    "conditional_kernel",
    "ergodic_distribution",
    "net_transition_probability",
    "FuelFactors",
    "deflate",
    "estimate_co2",
    "intensity",
    "PanelDataset",
    "RelativeSeries",
    "TransitionPairs",
    "coefficient_of_variation",
    "regional_ratio",
    "relative_series",
    "transition_pairs",
]

