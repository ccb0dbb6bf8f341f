"""Kernel of ``rho H (1/rho) - H`` and its domination by weighted Hardy kernels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParamsError
from ..numerics import SampledFunction
from ..weights import WeightSpec, _sample_pairs, require_class
from .singular import difference_apply

DOMINATION_CLASSES = ("V++", "V-+")


@dataclass(frozen=True)
class KernelBoundReport:
    """Smallest constant seen in the kernel bound, where it was attained, and stability."""

    min_constant: float
    worst_pair: tuple
    stable: bool


def kernel(w: WeightSpec, x, t):
    """``K(x, t) = (phi(x) - phi(t)) / (phi(t) (t - x))`` for the node at the origin."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    fx, ft = w(x), w(t)
    return (fx - ft) / (ft * (t - x))


def kernel_bound(w: WeightSpec, cls: str, x, t):
    """Right-hand side of the kernel estimate with unit constant.

    For ``V++``: ``phi(x)/(x phi(t))`` when ``t < x`` and ``1/t`` when ``t > x``.
    For ``V-+``: ``1/x`` when ``t < x`` and ``phi(x)/(t phi(t))`` when ``t > x``.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    ratio = w(x) / w(t)
    below = t < x
    if cls == "V++":
        return np.where(below, ratio / x, 1.0 / t)
    if cls == "V-+":
        return np.where(below, 1.0 / x, ratio / t)
    raise InvalidParamsError(f"class must be one of {DOMINATION_CLASSES}, got {cls!r}")


def _worst(w, cls, samples):
    hi, lo = _sample_pairs(w.ell, samples, 1e-6 * w.ell)
    x = np.concatenate([hi, lo])
    t = np.concatenate([lo, hi])
    q = np.abs(kernel(w, x, t)) / kernel_bound(w, cls, x, t)
    k = int(np.argmax(q))
    return float(q[k]), (float(x[k]), float(t[k]))


def kernel_domination_report(w: WeightSpec, cls: str, samples: int = 1000) -> KernelBoundReport:
    """Estimate the constant in the kernel bound for ``w`` in ``cls``.

    Raises
    ------
    ClassMismatchError
        If ``w`` fails the class check first.
    """
    if cls not in DOMINATION_CLASSES:
        raise InvalidParamsError(f"class must be one of {DOMINATION_CLASSES}, got {cls!r}")
    require_class(w, cls, samples)
    c1, _ = _worst(w, cls, samples)
    c2, pair = _worst(w, cls, 2 * samples)
    return KernelBoundReport(c2, pair, bool(abs(c2 - c1) <= 0.05 * c2))


def hardy_majorant(w: WeightSpec, cls: str, f: SampledFunction) -> SampledFunction:
    """Discrete right-hand side of the pointwise domination at the interior edges.

    ``V++``: ``phi(x)/x sum_{t<x} |f| w/phi(t) + sum_{t>x} |f| w / t``;
    ``V-+``: ``1/x sum_{t<x} |f| w + phi(x) sum_{t>x} |f| w / (t phi(t))``,
    each divided by ``pi`` to match the normalization of the transform.
    """
    g = f.domain
    t = np.asarray(g.nodes)
    a = np.abs(np.asarray(f.values)) * np.asarray(g.weights)
    dom = g.staggered()
    x = np.asarray(dom.nodes)
    phi_t, phi_x = w(t), w(x)
    if cls == "V++":
        lower, upper = a / phi_t, a / t
        lo_scale, up_scale = phi_x / x, np.ones_like(x)
    elif cls == "V-+":
        lower, upper = a, a / (t * phi_t)
        lo_scale, up_scale = 1.0 / x, phi_x
    else:
        raise InvalidParamsError(f"class must be one of {DOMINATION_CLASSES}, got {cls!r}")
    # interior edge e sits between nodes e-1 and e
    cum_lo = np.cumsum(lower)[:-1]
    cum_up = np.cumsum(upper[::-1])[::-1][1:]
    return SampledFunction(dom, (lo_scale * cum_lo + up_scale * cum_up) / np.pi)


def domination_ratio(w: WeightSpec, cls: str, f: SampledFunction, constant: float) -> float:
    """``max |K f| / (constant * majorant)`` over the interior edges; at most 1 when domination holds."""
    kf = np.abs(np.asarray(difference_apply(w, 0.0, f).values))
    rhs = constant * np.asarray(hardy_majorant(w, cls, f).values)
    keep = rhs > 0
    return float(np.max(kf[keep] / rhs[keep]))
