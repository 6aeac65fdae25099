"""
Two-population Kuramoto networks with adaptively evolving coupling.

Network simulation, Ott-Antonsen mean-field reductions, critical-manifold
stability analysis and pattern classification.
"""

from .analysis import (OscillationMetrics, Pattern, PatternClass, PatternThresholds, classify_pattern,
                       dominant_period, oscillation_metrics, savitzky_golay)
from .config import PRESETS, RunConfig
from .core import (ConfigError, CouplingConfig, DeterministicQuantiles, OrderParameter, PopulationSpec,
                   SeededRandom, SystemParams, cauchy_quantile, order_parameter, sample_frequencies,
                   sample_phases, validate_config)
from .gspt import (Branch, ChimeraEquilibrium, ManifoldKind, ManifoldSample, NoRealBranch, Stability,
                   StabilityReport, chimera_equilibrium, connectivity_check, fold_points,
                   hyperbolicity_condition, inter_jacobian, inter_manifold, intra_jacobian,
                   intra_manifold, stability_report, sync_coefficient)
from .laws import (AdaptiveLawSpec, Constant, LinearFeedback, PeriodicDrive, PhaseFeedback, Target,
                   eval_law, nullcline)
from .meanfield import (MeanFieldState, MeanFieldSystem, full_two_pop_rhs, general_meanfield_rhs,
                        integrate_meanfield, reduced_inter_rhs, reduced_intra_rhs)
from .network import NetworkState, initial_network_state, integrate_network, network_rhs
from .trajectory import NumericalError, Trajectory

__all__ = [
    "OscillationMetrics", "Pattern", "PatternClass", "PatternThresholds", "classify_pattern",
    "dominant_period", "oscillation_metrics", "savitzky_golay", "PRESETS", "RunConfig", "ConfigError",
    "CouplingConfig", "DeterministicQuantiles", "OrderParameter", "PopulationSpec", "SeededRandom",
    "SystemParams", "cauchy_quantile", "order_parameter", "sample_frequencies", "sample_phases",
    "validate_config", "Branch", "ChimeraEquilibrium", "ManifoldKind", "ManifoldSample", "NoRealBranch",
    "Stability", "StabilityReport", "chimera_equilibrium", "connectivity_check", "fold_points",
    "hyperbolicity_condition", "inter_jacobian", "inter_manifold", "intra_jacobian", "intra_manifold",
    "stability_report", "sync_coefficient", "AdaptiveLawSpec", "Constant", "LinearFeedback",
    "PeriodicDrive", "PhaseFeedback", "Target", "eval_law", "nullcline", "MeanFieldState",
    "MeanFieldSystem", "full_two_pop_rhs", "general_meanfield_rhs", "integrate_meanfield",
    "reduced_inter_rhs", "reduced_intra_rhs", "NetworkState", "initial_network_state",
    "integrate_network", "network_rhs", "NumericalError", "Trajectory",
]

__version__ = "0.1.0"
