"""Multilocus Moran model with assortative mating and its diffusion limit.

The package has three layers: the exact finite-population chain
(:mod:`moran_assort.moran`), the limiting diffusion and its integrator
(:mod:`moran_assort.diffusion`), and the analysis of the reversible
stationary measure (:mod:`moran_assort.stationary`).  They share the
assortment-scheme algebra of :mod:`moran_assort.assortment` and the
subset-function toolbox of :mod:`moran_assort.combinatorics`.
"""

from .assortment import (
    AssortmentScheme,
    MeanAssortTable,
    alpha_coeffs,
    drift_polynomial,
    independence_check,
    mean_assortment,
    realize_from_alpha,
)
from .diffusion import (
    DiffusionSpec,
    SdeConfig,
    boundary_classification,
    drift,
    drift_general_one_locus,
    reversibility_residual,
    sde_simulate,
    wf_two_locus_drift,
)
from .moran import (
    CoordinateView,
    ModelParams,
    PopulationState,
    coordinates,
    exact_transition,
    invert_coordinates,
    linkage_decay_ode,
    simulate,
    step,
)
from .recombination import RecombinationDistribution, make_recombination
from .stationary import (
    CriticalPointReport,
    StationaryDensity,
    critical_points,
    quadratic_asymptotics,
    solve_lambda,
    v_n,
)

__version__ = "0.1.0"

__all__ = [
    "AssortmentScheme", "MeanAssortTable", "alpha_coeffs", "drift_polynomial",
    "independence_check", "mean_assortment", "realize_from_alpha",
    "DiffusionSpec", "SdeConfig", "boundary_classification", "drift",
    "drift_general_one_locus", "reversibility_residual", "sde_simulate",
    "wf_two_locus_drift",
    "CoordinateView", "ModelParams", "PopulationState", "coordinates",
    "exact_transition", "invert_coordinates", "linkage_decay_ode", "simulate",
    "step",
    "RecombinationDistribution", "make_recombination",
    "CriticalPointReport", "StationaryDensity", "critical_points",
    "quadratic_asymptotics", "solve_lambda", "v_n",
    "__version__",
]
