"""Finite Hilbert transform, weighted singular operator and Cauchy operator on curves.

Principal values are handled by staggered evaluation: data sit at cell
midpoints, the transform is evaluated at cell edges, so no quadrature node
ever meets the kernel singularity and the odd part cancels by symmetry.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..curves import DiscretizedCurve
from ..errors import (
    DegenerateCurveError,
    EvaluationAtEndpointError,
    InvalidParamsError,
    MisalignedFunctionError,
)
from ..numerics import Grid1D, SampledFunction, cell_averages, make_grid
from ..weights import NodeWeight, WeightSpec

_CHUNK = 512

_NORMALIZATIONS = {"pi": 1.0 / np.pi, "pi_i": 1.0 / (np.pi * 1j)}


def _staggered_sum(targets, sources, coef):
    """``sum_k coef_k / (sources_k - targets_e)`` for every target, chunked."""
    out = np.empty(targets.size, dtype=np.result_type(coef, targets, sources, float))
    for start in range(0, targets.size, _CHUNK):
        d = sources[None, :] - targets[start : start + _CHUNK, None]
        out[start : start + _CHUNK] = (1.0 / d) @ coef
    return out


def hilbert_at(f: SampledFunction, x) -> np.ndarray:
    """``(1/pi) sum_k f_k w_k / (t_k - x)`` at arbitrary points strictly inside the interval.

    Raises
    ------
    EvaluationAtEndpointError
        If a point lies at or outside an endpoint.
    """
    g = f.domain
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= g.a) or np.any(x >= g.b):
        raise EvaluationAtEndpointError(f"Hilbert transform needs points inside ({g.a}, {g.b})")
    coef = np.asarray(f.values) * np.asarray(g.weights)
    return _staggered_sum(x, np.asarray(g.nodes), coef) / np.pi


def hilbert_apply(
    f: SampledFunction,
    richardson: bool = False,
    source: Callable | None = None,
) -> SampledFunction:
    """Finite Hilbert transform of midpoint samples, evaluated at interior edges.

    Parameters
    ----------
    f : SampledFunction
        Samples on a :class:`Grid1D`.
    richardson : bool
        Combine this grid with the half-resolution grid,
        ``(4 H_fine - H_coarse) / 3``, cancelling the ``O(h**2)`` endpoint
        error. The result lives on the interior edges of the coarse grid
        and needs an even cell count.
    source : callable, optional
        Exact function used to sample the coarse level. Without it the
        coarse samples are pair averages of ``f``.
    """
    g = f.domain
    if not isinstance(g, Grid1D):
        raise InvalidParamsError("hilbert_apply needs an interval grid")
    out_dom = g.staggered()
    fine = hilbert_at(f, out_dom.nodes)
    if not richardson:
        return SampledFunction(out_dom, fine)
    if g.n % 2 or g.n < 4:
        raise InvalidParamsError("Richardson step needs an even cell count >= 4")
    cg = make_grid(g.a, g.b, g.n // 2)
    vals = np.asarray(f.values)
    coarse_vals = source(np.asarray(cg.nodes)) if source is not None else 0.5 * (vals[0::2] + vals[1::2])
    cf = SampledFunction(cg, coarse_vals)
    c_dom = cg.staggered()
    coarse = hilbert_at(cf, c_dom.nodes)
    return SampledFunction(c_dom, (4.0 * fine[1::2] - coarse) / 3.0)


def _as_node_weight(w, x0) -> NodeWeight:
    if isinstance(w, NodeWeight):
        return w
    if isinstance(w, WeightSpec):
        return NodeWeight.single(w, x0)
    raise InvalidParamsError("weight must be a WeightSpec or NodeWeight")


def weighted_singular_apply(w, x0: float, f: SampledFunction, source=None) -> SampledFunction:
    """``rho(x) * H(f / rho)(x)`` at the interior edges, ``rho(x) = phi(|x - x0|)``.

    ``w`` is a :class:`WeightSpec` (single node ``x0``) or a
    :class:`NodeWeight` (``x0`` ignored).

    With a callable ``source`` (the function ``f`` samples) the data fed
    to the transform are exact cell averages of ``source / rho`` rather
    than midpoint values, which resolves the singularity at the weight
    nodes.

    Raises
    ------
    NonIntegrableInputError
        With ``source``, when ``source / rho`` is not integrable at a node.
    """
    rho = _as_node_weight(w, x0)
    g = f.domain
    if source is not None:
        inside = [t for t in rho.nodes if g.a <= t <= g.b]
        data = cell_averages(g, lambda t: source(t) / rho(t), inside or None)
    else:
        r_src = rho(np.asarray(g.nodes))
        if np.any(~np.isfinite(r_src)) or np.any(r_src <= 0):
            raise InvalidParamsError("weight vanishes or blows up at a sample node")
        data = f.with_values(np.asarray(f.values) / r_src)
    inner = hilbert_apply(data)
    r_out = rho(np.asarray(inner.domain.nodes))
    return inner.with_values(r_out * np.asarray(inner.values))


def difference_apply(w, x0: float, f: SampledFunction) -> SampledFunction:
    """The commutator-type operator ``K f = rho H(f/rho) - H f`` at the interior edges."""
    weighted = weighted_singular_apply(w, x0, f)
    plain = hilbert_apply(f)
    return weighted.with_values(np.asarray(weighted.values) - np.asarray(plain.values))


def cauchy_apply(c: DiscretizedCurve, f: SampledFunction, normalization: str = "pi") -> SampledFunction:
    """Cauchy singular integral ``(1/pi) p.v. int f(tau) dtau / (tau - t)`` on a curve.

    The complex arc element of cell ``k`` is the difference of its edge
    points; the transform is evaluated at the edges (the staggered curve).
    ``normalization="pi_i"`` divides by ``pi i`` instead, which makes the
    operator an involution on closed curves.

    Raises
    ------
    DegenerateCurveError
        If two consecutive edge points coincide.
    """
    if f.domain is not c and f.domain.size != c.size:
        raise MisalignedFunctionError("function is not sampled on this curve")
    if normalization not in _NORMALIZATIONS:
        raise InvalidParamsError(f"normalization must be one of {sorted(_NORMALIZATIONS)}")
    dtau = np.diff(c.edges)
    if np.any(np.abs(dtau) <= 1e-14 * c.total_length):
        raise DegenerateCurveError("consecutive edge points coincide")
    dual = c.staggered()
    coef = np.asarray(f.values) * dtau
    vals = _staggered_sum(np.asarray(dual.points), np.asarray(c.points), coef)
    return SampledFunction(dual, _NORMALIZATIONS[normalization] * vals)
