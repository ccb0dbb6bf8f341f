"""Grids, sampled functions, midpoint quadrature and power-law fitting.

Every grid in the package is a midpoint (cell-centred) grid: data live at
cell centres and singular kernels are evaluated at cell edges, so a
quadrature node never coincides with a kernel singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import (
    DegenerateInputError,
    InvalidCountError,
    InvalidRangeError,
    MisalignedFunctionError,
    NonIntegrableInputError,
)

# Growth-fit thresholds used for every divergence verdict.
EXPONENT_TOL = 0.02
RESIDUAL_MAX = 0.1


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform midpoint grid on ``[a, b]`` with ``n`` cells."""

    a: float
    b: float
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def size(self) -> int:
        return self.n

    def edges(self) -> np.ndarray:
        """All ``n + 1`` cell edges, endpoints included."""
        return self.a + self.h * np.arange(self.n + 1)

    def staggered(self) -> "Grid1D":
        """Grid whose nodes are the interior edges of this one.

        The interior edges ``a + k h`` (``k = 1..n-1``) are exactly the
        midpoints of the ``n - 1`` cell grid on ``[a + h/2, b - h/2]``.
        """
        if self.n < 2:
            raise InvalidCountError("staggered grid needs n >= 2")
        h = self.h
        return make_grid(self.a + 0.5 * h, self.b - 0.5 * h, self.n - 1)


def make_grid(a: float, b: float, n: int) -> Grid1D:
    """Midpoint grid with ``n`` equal cells on ``[a, b]``.

    Raises
    ------
    InvalidRangeError
        If ``b <= a``.
    InvalidCountError
        If ``n < 1``.
    """
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise InvalidRangeError(f"need a < b, got a={a}, b={b}")
    if int(n) != n or n < 1:
        raise InvalidCountError(f"need a positive integer cell count, got {n}")
    n = int(n)
    h = (b - a) / n
    nodes = a + (np.arange(n) + 0.5) * h
    return Grid1D(float(a), float(b), n, _frozen(nodes), _frozen(np.full(n, h)))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Samples of a function at the nodes of a grid or curve.

    ``domain`` is a :class:`Grid1D` or a :class:`~morrey_lab.curves.DiscretizedCurve`;
    both expose ``weights`` and ``size``.
    """

    domain: Any
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.dtype.kind not in "fc":
            vals = vals.astype(float)
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.shape[0] != self.domain.size:
            raise MisalignedFunctionError(
                f"{vals.shape} values for a domain with {self.domain.size} nodes"
            )

    @property
    def weights(self) -> np.ndarray:
        return self.domain.weights

    def abs(self) -> "SampledFunction":
        return SampledFunction(self.domain, np.abs(self.values))

    def scaled(self, c) -> "SampledFunction":
        return SampledFunction(self.domain, c * self.values)

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.domain, values)


def sample(domain, func) -> SampledFunction:
    """Evaluate ``func`` at the nodes of a :class:`Grid1D` (real abscissae)."""
    return SampledFunction(domain, func(np.asarray(domain.nodes)))


_GL16 = np.polynomial.legendre.leggauss(16)
_GL8 = np.polynomial.legendre.leggauss(8)


def _gauss(func, lo, hi):
    x, w = _GL16
    lo = np.asarray(lo, dtype=float)[:, None]
    hi = np.asarray(hi, dtype=float)[:, None]
    t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    return 0.5 * (hi - lo)[:, 0] * (func(t) @ w)


def singular_integral(func, s: float, length: float, side: int = 1, depth: float = 700.0):
    """``int_s^{s + length} func`` (``side=1``) or ``int_{s - length}^s`` (``side=-1``).

    ``func`` may blow up at ``s``. The substitution ``t = s + side * exp(u)``
    turns the integral into a tail over ``u``, summed on Gauss panels of
    width 1/4 down to ``depth`` below ``log(length)`` or to the smallest
    offset from ``s`` that floating point can represent. The remaining tail
    is added as a geometric series fitted to the deepest panels.

    Raises
    ------
    NonIntegrableInputError
        When the deepest panels do not decay (integrand at least as
        singular as ``1/|t - s|``) or are not finite.
    """
    x, w = _GL8
    floor = np.log(max(abs(s), 1.0) * 1e-10) if s != 0 else np.log(length) - depth
    count = max(8, int(4 * (np.log(length) - floor)))
    edges = np.log(length) - np.arange(count, -1, -1) / 4.0
    a, b = edges[:-1, None], edges[1:, None]
    u = 0.5 * (b - a) * x + 0.5 * (a + b)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        vals = func(s + side * np.exp(u)) * np.exp(u) * (0.5 * (b - a) * w)
    panel = vals.sum(axis=1)
    mass = np.abs(panel)
    total = mass.sum()
    if not np.isfinite(total):
        raise NonIntegrableInputError(f"integrand is not finite near {s}")
    if total == 0 or mass[: max(1, count // 10)].sum() <= 1e-12 * total:
        return panel.sum()
    # geometric tail: deep panels shrink by r per step when the integrand is integrable
    r1, r2 = mass[0] / mass[1], mass[1] / mass[2]
    if not (0 < r1 < 1 - 2.5e-4 and abs(r1 - r2) <= 0.1 * (1 - r1) + 1e-12):
        raise NonIntegrableInputError(f"integrand is not integrable at {s}")
    return panel.sum() + panel[0] * r1 / (1.0 - r1)


def interval_integrals(func, lo, hi, singular_at=None) -> np.ndarray:
    """``int_{lo_k}^{hi_k} func`` for arrays of intervals.

    Intervals are integrated by 16-point Gauss-Legendre. An interval that
    contains one of the ``singular_at`` points (on its boundary or inside)
    is split there and each piece is integrated in the logarithmic
    variable, which resolves integrable power and logarithmic singularities.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    probe = func(np.array([[0.5 * (lo[0] + hi[0])]]))
    out = _gauss(func, lo, hi).astype(np.result_type(probe, float))
    if singular_at is None:
        return out
    points = sorted(float(p) for p in np.atleast_1d(singular_at))
    for k in np.flatnonzero([any(a <= p <= b for p in points) for a, b in zip(lo, hi)]):
        cuts = [lo[k]] + [p for p in points if lo[k] < p < hi[k]] + [hi[k]]
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            left = any(p == a for p in points)
            right = any(p == b for p in points)
            if left and right:
                mid = 0.5 * (a + b)
                total += singular_integral(func, a, mid - a, 1) + singular_integral(func, b, b - mid, -1)
            elif left:
                total += singular_integral(func, a, b - a, 1)
            elif right:
                total += singular_integral(func, b, b - a, -1)
            else:
                total += _gauss(func, [a], [b])[0]
        out[k] = total
    return out


def cell_integrals(domain: Grid1D, func, singular_at=None) -> np.ndarray:
    """``int func`` over every cell of ``domain``; see :func:`interval_integrals`."""
    e = domain.edges()
    return interval_integrals(func, e[:-1], e[1:], singular_at)


def cell_averages(domain: Grid1D, func, singular_at=None) -> SampledFunction:
    """Cell averages of ``func``; the natural data for product-type quadrature."""
    return SampledFunction(domain, cell_integrals(domain, func, singular_at) / np.asarray(domain.weights))


def integrate(f: SampledFunction) -> complex | float:
    """Midpoint-rule integral ``sum(values * weights)``."""
    vals = np.asarray(f.values)
    w = np.asarray(f.domain.weights)
    if vals.shape != w.shape:
        raise MisalignedFunctionError(f"{vals.shape} values vs {w.shape} weights")
    return np.sum(vals * w)


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares fit ``log y = exponent * log x + log_constant``."""

    exponent: float
    log_constant: float
    residual: float


def fit_growth(xs: Sequence[float], ys: Sequence[float]) -> GrowthFit:
    """Fit a power law to positive data in log-log coordinates.

    ``residual`` is the RMS of the log-log residuals.

    Raises
    ------
    DegenerateInputError
        Fewer than three points, nonpositive entries, or repeated ``xs``.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise DegenerateInputError("fit_growth needs at least 3 paired points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateInputError("fit_growth needs finite data")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DegenerateInputError("fit_growth needs positive data")
    if np.unique(x).size != x.size:
        raise DegenerateInputError("fit_growth needs distinct abscissae")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    return GrowthFit(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2))))


def log_growth_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Relative slope ``b / mean(y)`` of the fit ``y = a + b log x``.

    A power-law fit underestimates logarithmic divergence; this slope is the
    companion statistic for boundary exponents.
    """
    x = np.log(np.asarray(xs, dtype=float))
    y = np.asarray(ys, dtype=float)
    b, _ = np.polyfit(x, y, 1)
    return float(b / np.mean(y))


def classify_growth(fit: GrowthFit, increasing_is_divergent: bool = True) -> str:
    """Map a growth fit to ``"bounded"``, ``"unbounded"`` or ``"inconclusive"``.

    With ``increasing_is_divergent`` the abscissa is a refinement count, so
    divergence shows as a positive exponent; otherwise (abscissa is a scale
    that shrinks under refinement) divergence shows as a negative exponent.
    """
    if fit.residual >= RESIDUAL_MAX:
        return "inconclusive"
    e = fit.exponent if increasing_is_divergent else -fit.exponent
    if e > EXPONENT_TOL:
        return "unbounded"
    if abs(e) <= EXPONENT_TOL:
        return "bounded"
    return "inconclusive"


def observed_order(errors: Sequence[float], ns: Sequence[int]) -> float:
    """Convergence order ``-d log(err) / d log(n)`` from a log-log fit."""
    return -fit_growth(ns, errors).exponent
