"""Numerical laboratory for Hardy, singular and maximal operators in Morrey spaces."""

from .curves import DiscretizedCurve, diagnostics, generate, load_curve
from .errors import MorreyLabError
from .experiments import (
    ExperimentReport,
    TestFamily,
    bounded_window,
    probe_hardy,
    probe_weighted_singular,
    threshold_sweep,
    verify_alvarez_perez,
    verify_fefferman_stein,
    verify_morrey_boundedness_maximal,
)
from .morrey import MorreyParams, diagnose_membership, morrey_norm, weighted_morrey_norm
from .numerics import Grid1D, SampledFunction, fit_growth, make_grid, sample
from .weights import NodeWeight, WeightSpec, check_admissible, estimate_indices, power, power_log

__all__ = [
    "DiscretizedCurve",
    "ExperimentReport",
    "Grid1D",
    "MorreyLabError",
    "MorreyParams",
    "NodeWeight",
    "SampledFunction",
    "TestFamily",
    "WeightSpec",
    "bounded_window",
    "check_admissible",
    "diagnose_membership",
    "diagnostics",
    "estimate_indices",
    "fit_growth",
    "generate",
    "load_curve",
    "make_grid",
    "morrey_norm",
    "power",
    "power_log",
    "probe_hardy",
    "probe_weighted_singular",
    "sample",
    "threshold_sweep",
    "verify_alvarez_perez",
    "verify_fefferman_stein",
    "verify_morrey_boundedness_maximal",
    "weighted_morrey_norm",
]
__version__ = "0.1.0"
