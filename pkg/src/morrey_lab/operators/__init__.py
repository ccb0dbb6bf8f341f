"""Hardy, singular, maximal and kernel operators on grids and curves."""

from .hardy import (
    HardyParams,
    hardy_apply,
    hardy_bound,
    homogeneous_apply,
    homogeneous_constant,
    kernel_on_grid,
)
from .kernels import (
    KernelBoundReport,
    domination_ratio,
    hardy_majorant,
    kernel,
    kernel_bound,
    kernel_domination_report,
)
from .maximal import arc_indicator, maximal_apply, maximal_radii, sharp_maximal_apply
from .singular import (
    cauchy_apply,
    difference_apply,
    hilbert_apply,
    hilbert_at,
    weighted_singular_apply,
)

__all__ = [
    "HardyParams",
    "KernelBoundReport",
    "arc_indicator",
    "cauchy_apply",
    "difference_apply",
    "domination_ratio",
    "hardy_apply",
    "hardy_bound",
    "hardy_majorant",
    "hilbert_apply",
    "hilbert_at",
    "homogeneous_apply",
    "homogeneous_constant",
    "kernel",
    "kernel_bound",
    "kernel_domination_report",
    "kernel_on_grid",
    "maximal_apply",
    "maximal_radii",
    "sharp_maximal_apply",
    "weighted_singular_apply",
]
