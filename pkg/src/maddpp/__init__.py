"""MADD fairness metric and model-free probability post-processing."""

__version__ = "0.1.0"

from .densities import (
    DensityVector,
    ScoredRecord,
    build_density_vector,
    kde_plot_curve,
    madd,
    pool_density_vectors,
)
from .objective import (
    ObjectiveConfig,
    SweepResult,
    accuracy_loss,
    apply_threshold,
    fairness_loss,
    sweep,
    total_loss,
)
from .simulate import SimulationSpec, sample
from .transport import FipMap, PiecewiseLinearCdf, build_cdf, fip, generalized_inverse

__all__ = [
    "DensityVector",
    "FipMap",
    "ObjectiveConfig",
    "PiecewiseLinearCdf",
    "ScoredRecord",
    "SimulationSpec",
    "SweepResult",
    "accuracy_loss",
    "apply_threshold",
    "build_cdf",
    "build_density_vector",
    "fairness_loss",
    "fip",
    "generalized_inverse",
    "kde_plot_curve",
    "madd",
    "pool_density_vectors",
    "sample",
    "sweep",
    "total_loss",
]
