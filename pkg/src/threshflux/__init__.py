"""Scalar conservation law with a two-slope threshold flux.

Closed-form and semi-analytic entropy solutions, a Godunov finite-volume
oracle and a Kruzhkov entropy certifier.
"""

from ._backend import BACKEND
from .advection import AdvectionSolution, DownCrossSolution, advect
from .entropy import BumpTestFn, KruzhkovReport, certify, kruzhkov_functional
from .errors import (
    BeyondExhaustion,
    CflViolation,
    ConfigError,
    CrossingViolation,
    DegenerateJump,
    DomainError,
    MultipleCrossings,
    NegativeTime,
    NonFiniteBound,
    ProfileError,
    TailNotConstant,
    ThreshfluxError,
    UnresolvedDiscontinuity,
)
from .flux import FluxParams, flux, flux_slope, godunov_flux, rankine_hugoniot_speed
from .fv import FvRun, GridField, l1_distance, project, solve
from .profiles import Direction, Profile, validate_crossing
from .scenario import Scenario, convergence_study, load_scenario, run_scenario
from .upcross import FrontMaps, UncoupledUpCross, UpCrossSolution

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AdvectionSolution",
    "BeyondExhaustion",
    "BumpTestFn",
    "CflViolation",
    "ConfigError",
    "CrossingViolation",
    "DegenerateJump",
    "Direction",
    "DomainError",
    "DownCrossSolution",
    "FluxParams",
    "FrontMaps",
    "FvRun",
    "GridField",
    "KruzhkovReport",
    "MultipleCrossings",
    "NegativeTime",
    "NonFiniteBound",
    "Profile",
    "ProfileError",
    "Scenario",
    "TailNotConstant",
    "ThreshfluxError",
    "UncoupledUpCross",
    "UnresolvedDiscontinuity",
    "UpCrossSolution",
    "advect",
    "certify",
    "convergence_study",
    "flux",
    "flux_slope",
    "godunov_flux",
    "kruzhkov_functional",
    "l1_distance",
    "load_scenario",
    "project",
    "rankine_hugoniot_speed",
    "run_scenario",
    "solve",
    "validate_crossing",
]
