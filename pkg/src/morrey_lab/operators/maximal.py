"""Averaged maximal and sharp maximal operators on curves and intervals."""

from __future__ import annotations

import numpy as np

from ..curves import DiscretizedCurve, default_radii
from ..errors import EmptyRadiiError, InvalidParamsError
from ..numerics import Grid1D, SampledFunction

_OPEN = 1.0 - 1e-12


def _points(domain) -> np.ndarray:
    if isinstance(domain, Grid1D):
        return np.asarray(domain.nodes, dtype=complex)
    return np.asarray(domain.points)


def maximal_radii(domain, count: int = 16) -> np.ndarray:
    """Shared log-spaced radii from one cell width to the diameter (at least 12)."""
    if count < 12:
        raise InvalidParamsError("need at least 12 radii")
    h = float(np.max(domain.weights))
    diam = domain.length if isinstance(domain, Grid1D) else domain.diameter
    return np.geomspace(h, max(diam, h) * (1.0 + 1e-9), count)


def _check_radii(domain, radii):
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise EmptyRadiiError("radii list is empty")
    if np.any(radii <= 0):
        raise InvalidParamsError("radii must be positive")
    return radii


def _distances(domain, centers):
    pts = _points(domain)
    c = pts if centers is None else np.asarray(centers, dtype=complex)
    return np.abs(c[:, None] - pts[None, :])


def maximal_apply(c, f: SampledFunction, radii=None, centers=None) -> np.ndarray | SampledFunction:
    """``Mf(t) = max_r (1/mu B(t, r)) sum_{k in B(t, r)} |f_k| w_k``.

    Without ``centers`` the result is a :class:`SampledFunction` on the
    data nodes. With ``centers`` (complex points) it is a plain array of
    values there; a ball that catches no node is skipped.
    """
    radii = _check_radii(c, maximal_radii(c) if radii is None else radii)
    w = np.asarray(c.weights)
    a = np.abs(np.asarray(f.values)) * w
    dist = _distances(c, centers)
    best = np.zeros(dist.shape[0])
    for r in radii:
        mask = dist < r * _OPEN
        mu = mask @ w
        ok = mu > 0
        avg = np.where(ok, (mask @ a) / np.where(ok, mu, 1.0), 0.0)
        best = np.maximum(best, avg)
    return SampledFunction(c, best) if centers is None else best


def sharp_maximal_apply(c, f: SampledFunction, radii=None) -> SampledFunction:
    """``M#f(t) = max_r (1/mu B) sum_{k in B} |f_k - f_B| w_k`` with ``f_B`` the ball mean."""
    radii = _check_radii(c, maximal_radii(c) if radii is None else radii)
    w = np.asarray(c.weights)
    vals = np.asarray(f.values)
    dist = _distances(c, None)
    best = np.zeros(dist.shape[0])
    for r in radii:
        mask = dist < r * _OPEN
        mu = mask @ w
        mean = (mask @ (vals * w)) / mu
        dev = np.abs(vals[None, :] - mean[:, None])
        osc = np.einsum("ij,ij->i", mask, dev * w[None, :]) / mu
        best = np.maximum(best, osc)
    return SampledFunction(c, best)


def arc_indicator(c: DiscretizedCurve, start: float, stop: float) -> SampledFunction:
    """Indicator of the arc with parameter in ``[start, stop)`` (arc length)."""
    s = np.asarray(c.arc_nodes)
    return SampledFunction(c, ((s >= start) & (s < stop)).astype(float))
