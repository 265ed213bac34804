"""Finite-time ruin probabilities of a two-line insurance surplus process.

Monte Carlo estimation of the four ruin events (simultaneous, at least
one, total, both eventually) for a compound-Poisson surplus pair perturbed
by correlated Brownian motions under constant interest force, together
with the matching large-capital asymptotic formulas and empirical probes
of the dependence inequalities behind them.
"""

from .asymptotics import (
    AsymptoticResult,
    QuadratureError,
    psi_and_upper,
    psi_max_asym,
    psi_min_asym,
    psi_sum_asym,
    psi_uni_asym,
    tail_integral,
)
from .distributions import (
    ClaimDistribution,
    Exponential,
    Lognormal,
    Pareto,
    Weibull,
    mixture_tail,
)
from .montecarlo import (
    RUIN_TYPES,
    DependenceProbe,
    Estimate,
    EstimateSet,
    StudyRow,
    SumReductionProbe,
    convergence_study,
    dependence_probe,
    dependence_probe_grid,
    estimate_ruin,
    sum_reduction_probe,
    wilson_interval,
)
from .process import (
    DiscountedPath,
    ModelConfig,
    discounted_diffusion_cov,
    draw_arrivals,
    joint_diffusion_increment,
    refine_path,
    simulate_path,
)
from .ruin import RuinOutcome, bridge_crossing_prob, detect
from .streams import substream, substream_key

__all__ = [
    "AsymptoticResult",
    "ClaimDistribution",
    "DependenceProbe",
    "DiscountedPath",
    "Estimate",
    "EstimateSet",
    "Exponential",
    "Lognormal",
    "ModelConfig",
    "Pareto",
    "QuadratureError",
    "RUIN_TYPES",
    "RuinOutcome",
    "StudyRow",
    "SumReductionProbe",
    "Weibull",
    "bridge_crossing_prob",
    "convergence_study",
    "dependence_probe",
    "dependence_probe_grid",
    "detect",
    "discounted_diffusion_cov",
    "draw_arrivals",
    "estimate_ruin",
    "joint_diffusion_increment",
    "mixture_tail",
    "psi_and_upper",
    "psi_max_asym",
    "psi_min_asym",
    "psi_sum_asym",
    "psi_uni_asym",
    "refine_path",
    "simulate_path",
    "substream",
    "substream_key",
    "sum_reduction_probe",
    "tail_integral",
    "wilson_interval",
]
