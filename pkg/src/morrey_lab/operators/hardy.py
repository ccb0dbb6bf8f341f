"""Power and weighted Hardy operators, and homogeneous-kernel operators on [0, ell].

Discretization is by product integration: ``f`` is piecewise constant on the
cells of a midpoint grid and the weight factor ``1/phi(t)`` (lower operator)
or ``1/(t phi(t))`` (upper operator) is integrated over each cell exactly
for powers and by Gauss-Legendre quadrature otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParamsError, NonIntegrableInputError
from ..numerics import Grid1D, SampledFunction, interval_integrals, make_grid
from ..weights import WeightSpec, power

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class HardyParams:
    """Either a power ``beta`` or a general ``weight``, plus the direction.

    ``direction="lower"`` is ``H``: ``phi(x)/x * int_0^x f/phi``;
    ``direction="upper"`` is the upper operator: ``phi(x) * int_x^ell f/(t phi)``.
    With ``beta`` the weight is ``x**beta``.
    """

    beta: float | None = None
    weight: WeightSpec | None = None
    direction: str = "lower"

    def __post_init__(self):
        if (self.beta is None) == (self.weight is None):
            raise InvalidParamsError("set exactly one of beta and weight")
        if self.direction not in ("lower", "upper"):
            raise InvalidParamsError(f"direction must be 'lower' or 'upper', got {self.direction!r}")

    def weight_spec(self, ell: float) -> WeightSpec:
        if self.weight is not None:
            return self.weight
        return power(self.beta, ell=ell)


def _gl_integral(func, a, b):
    """Vectorized 16-point Gauss-Legendre integral over each ``[a_i, b_i]``."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    t = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
    return (0.5 * (b - a)[..., 0]) * np.sum(_GL_WEIGHTS * func(t), axis=-1)


def _log_tail_integral(log_integrand, hi, depth=700.0, panels_per_unit=4):
    """``int_{-inf}^{hi} exp(log_integrand(u)) du`` truncated ``depth`` below ``hi``.

    Returns ``(value, converged)``; convergence means the deepest tenth of the
    range carries less than ``1e-10`` of the mass.
    """
    g, gw = np.polynomial.legendre.leggauss(8)
    count = int(depth * panels_per_unit)
    edges = hi - np.arange(count, -1, -1) / panels_per_unit
    a, b = edges[:-1, None], edges[1:, None]
    u = 0.5 * (b - a) * g + 0.5 * (a + b)
    terms = log_integrand(u) + np.log(0.5 * (b - a) * gw)
    top = terms.max()
    panel = np.exp(terms - top).sum(axis=1)
    total = panel.sum()
    tail = panel[: count // 10].sum()
    return float(np.exp(top) * total), bool(tail < 1e-10 * total)


def _lower_pieces(w: WeightSpec, lo, hi):
    """``int_lo^hi dt / phi(t)`` for arrays of cells; ``lo == 0`` allowed."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    out = np.empty(np.broadcast(lo, hi).shape)
    if w.kind == "power":
        e = 1.0 - w.alpha
        at_zero = lo == 0.0
        if np.any(at_zero) and e <= 0:
            raise NonIntegrableInputError(f"1/x**{w.alpha} is not integrable at 0")
        if e == 0:
            return np.log(hi / lo)
        return (hi**e - np.where(at_zero, 0.0, lo) ** e) / e
    at_zero = lo == 0.0
    out[~at_zero] = _gl_integral(lambda t: 1.0 / w(t), lo[~at_zero], hi[~at_zero])
    for i in np.flatnonzero(at_zero):
        val, ok = _log_tail_integral(lambda u: u - w.log_eval(u), np.log(hi[i]))
        if not ok:
            raise NonIntegrableInputError("1/phi is not integrable at 0")
        out[i] = val
    return out


def _upper_pieces(w: WeightSpec, lo, hi):
    """``int_lo^hi dt / (t phi(t))`` for arrays of cells with ``lo > 0``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo <= 0):
        raise NonIntegrableInputError("upper Hardy operator evaluated at x = 0")
    if w.kind == "power":
        if w.alpha == 0:
            return np.log(hi / lo)
        return (lo ** -w.alpha - hi ** -w.alpha) / w.alpha
    return _gl_integral(lambda t: 1.0 / (t * w(t)), lo, hi)


def hardy_apply(hp: HardyParams, f: SampledFunction, at: str = "nodes", source=None) -> SampledFunction:
    """Apply the lower or upper Hardy operator to ``f`` on a grid over ``[0, ell]``.

    ``at="nodes"`` evaluates at the cell midpoints (same grid as ``f``);
    ``at="edges"`` evaluates at the interior cell edges and returns a
    function on the staggered grid.

    With a callable ``source`` (the function ``f`` samples) the products
    ``f/phi`` and ``f/(t phi)`` are integrated exactly over every cell
    instead of holding ``f`` constant, which keeps the error local when
    ``f`` is singular at the origin.

    Raises
    ------
    NonIntegrableInputError
        When the weight factor is not integrable at the origin (lower
        operator with ``1/phi`` non-integrable).
    """
    g = f.domain
    if not isinstance(g, Grid1D) or g.a != 0.0:
        raise InvalidParamsError("Hardy operators act on a grid over [0, ell]")
    w = hp.weight_spec(g.b)
    vals = np.asarray(f.values)
    edges = g.edges()
    if at == "nodes":
        x = np.asarray(g.nodes)
        out_dom = g
    elif at == "edges":
        x = edges[1:-1]
        out_dom = g.staggered()
    else:
        raise InvalidParamsError(f"at must be 'nodes' or 'edges', got {at!r}")
    phi_x = w(x)

    if source is not None:
        return SampledFunction(out_dom, _hardy_exact(hp.direction, w, source, edges, x, at, phi_x))

    if hp.direction == "lower":
        cells = _lower_pieces(w, edges[:-1], edges[1:])
        cum = np.concatenate([[0.0], np.cumsum(vals * cells)])
        if at == "nodes":
            part = _lower_pieces(w, edges[:-1], x)
            integral = cum[:-1] + vals * part
        else:
            integral = cum[1:-1]
        return SampledFunction(out_dom, phi_x / x * integral)

    cells = _upper_pieces(w, np.maximum(edges[:-1], 0.5 * g.h), edges[1:])
    tail = np.concatenate([np.cumsum((vals * cells)[::-1])[::-1], [0.0]])
    if at == "nodes":
        part = _upper_pieces(w, x, edges[1:])
        integral = tail[1:] + vals * part
    else:
        integral = tail[1:-1]
    return SampledFunction(out_dom, phi_x * integral)


def _hardy_exact(direction, w, source, edges, x, at, phi_x):
    if direction == "lower":
        cells = interval_integrals(lambda t: source(t) / w(t), edges[:-1], edges[1:], 0.0)
        cum = np.concatenate([[0.0], np.cumsum(cells)])
        if at == "nodes":
            part = interval_integrals(lambda t: source(t) / w(t), edges[:-1], x, 0.0)
            return phi_x / x * (cum[:-1] + part)
        return phi_x / x * cum[1:-1]
    lo = edges[:-1].copy()
    lo[0] = 0.5 * (edges[0] + edges[1])
    cells = interval_integrals(lambda t: source(t) / (t * w(t)), lo, edges[1:])
    tail = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
    if at == "nodes":
        part = interval_integrals(lambda t: source(t) / (t * w(t)), x, edges[1:])
        return phi_x * (tail[1:] + part)
    return phi_x * tail[1:-1]


def hardy_bound(p: float, lam: float, beta: float, direction: str = "lower") -> float:
    """Norm bound for the power Hardy operators in the Morrey space.

    ``1/(lam/p + 1/p' - beta)`` for the lower operator and
    ``1/(beta + (1 - lam)/p)`` for the upper one; ``inf`` outside the
    boundedness window.
    """
    if direction == "lower":
        denom = lam / p + 1.0 - 1.0 / p - beta
    else:
        denom = beta + (1.0 - lam) / p
    return 1.0 / denom if denom > 0 else float("inf")


def homogeneous_apply(a: SampledFunction, f: SampledFunction) -> SampledFunction:
    """``Af(x) = int_0^T a(t) f(x t) dt`` with ``f`` extended by zero beyond ``ell``.

    ``a`` lives on a midpoint grid over ``[0, T]``; ``f(x t)`` is linearly
    interpolated between the nodes of ``f`` (held constant between 0 and
    the first node).
    """
    ga, gf = a.domain, f.domain
    if not isinstance(ga, Grid1D) or not isinstance(gf, Grid1D):
        raise InvalidParamsError("homogeneous_apply needs interval grids")
    x = np.asarray(gf.nodes)
    t = np.asarray(ga.nodes)
    coef = np.asarray(a.values) * np.asarray(ga.weights)
    xs = np.asarray(gf.nodes)
    vals = np.asarray(f.values)
    out = np.empty(x.size, dtype=np.result_type(vals, coef))
    for start in range(0, x.size, 256):
        y = x[start : start + 256, None] * t[None, :]
        fy = np.interp(y, xs, vals.real, left=vals.real[0], right=vals.real[-1])
        if np.iscomplexobj(vals):
            fy = fy + 1j * np.interp(y, xs, vals.imag, left=vals.imag[0], right=vals.imag[-1])
        fy = np.where(y > gf.b, 0.0, fy)
        out[start : start + 256] = fy @ coef
    return SampledFunction(gf, out)


def homogeneous_constant(a: SampledFunction, p: float, lam: float) -> float:
    """``C = int_0^T t**((lam-1)/p) |a(t)| dt`` with ``a`` piecewise constant per cell."""
    g = a.domain
    e = (lam - 1.0) / p + 1.0
    edges = g.edges()
    if e <= 0 and edges[0] == 0.0 and abs(a.values[0]) > 0:
        return float("inf")
    pieces = (edges[1:] ** e - edges[:-1] ** e) / e
    return float(np.sum(np.abs(a.values) * pieces))


def kernel_on_grid(kind: str, T: float, n: int) -> SampledFunction:
    """Standard kernels: ``"lower"`` is the indicator of [0, 1], ``"upper"`` is ``1/t`` on [1, T]."""
    g = make_grid(0.0, T, n)
    t = np.asarray(g.nodes)
    if kind == "lower":
        vals = (t < 1.0).astype(float)
    elif kind == "upper":
        vals = np.where(t > 1.0, 1.0 / t, 0.0)
    else:
        raise InvalidParamsError(f"unknown kernel {kind!r}")
    return SampledFunction(g, vals)
