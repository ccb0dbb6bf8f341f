"""Discrete Morrey norms on intervals and curves, and membership diagnosis.

The norm is

    max over centres t and radii r of ( r**-lambda * sum_{k in B(t, r)} |f_k|**p w_k )**(1/p)

with centres at the data nodes and dyadic radii ``ell * 2**-j`` down to one
cell width. Balls are open: a node exactly on the sphere is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curves import DiscretizedCurve
from .errors import (
    InvalidParamsError,
    MisalignedFunctionError,
    UnsupportedVariantError,
    WeightSingularAtNodeError,
)
from .numerics import GrowthFit, Grid1D, SampledFunction, classify_growth, fit_growth

_OPEN = 1.0 - 1e-12  # shrink radii slightly so nodes on the sphere are excluded


@dataclass(frozen=True)
class MorreyParams:
    """Exponent ``p``, Morrey parameter ``lam`` and the discrete sup controls.

    ``radii_levels=None`` uses dyadic radii down to one cell width.
    ``centers`` is ``"all_nodes"`` or ``("subsample", k)`` for every k-th node.
    """

    p: float
    lam: float
    radii_levels: int | None = None
    centers: object = "all_nodes"

    def __post_init__(self):
        if not (1.0 <= self.p < np.inf):
            raise InvalidParamsError(f"need 1 <= p < inf, got {self.p}")
        if not (0.0 <= self.lam < 1.0):
            raise InvalidParamsError(f"need 0 <= lambda < 1, got {self.lam}")
        if self.radii_levels is not None and self.radii_levels < 0:
            raise InvalidParamsError("radii_levels must be nonnegative")
        if self.centers != "all_nodes":
            kind, k = self.centers
            if kind != "subsample" or int(k) < 1:
                raise InvalidParamsError(f"bad centers spec {self.centers!r}")


def _length(domain) -> float:
    return domain.length if isinstance(domain, Grid1D) else domain.total_length


def morrey_radii(domain, radii_levels: int | None = None) -> np.ndarray:
    """Dyadic radii ``ell * 2**-j`` for ``j = 0..radii_levels``."""
    ell = _length(domain)
    if radii_levels is None:
        h = float(np.max(domain.weights))
        radii_levels = max(0, int(np.floor(np.log2(ell / h) + 1e-9)))
    return ell * 2.0 ** -np.arange(radii_levels + 1)


def _center_index(n, centers):
    if centers == "all_nodes":
        return np.arange(n)
    return np.arange(0, n, int(centers[1]))


def ball_sums(domain, values, radii, variant="euclid_ball", centers="all_nodes") -> np.ndarray:
    """Sums of ``values`` over balls, shape ``(len(centres), len(radii))``."""
    values = np.asarray(values, dtype=float)
    idx = _center_index(domain.size, centers)
    radii = np.asarray(radii, dtype=float)
    if isinstance(domain, Grid1D):
        if variant not in ("euclid_ball", "arc_ball"):
            raise UnsupportedVariantError(f"unknown variant {variant!r}")
        x = np.asarray(domain.nodes)
        prefix = np.concatenate([[0.0], np.cumsum(values)])
        out = np.empty((idx.size, radii.size))
        for m, r in enumerate(radii):
            rr = r * _OPEN
            lo = np.searchsorted(x, x[idx] - rr, side="right")
            hi = np.searchsorted(x, x[idx] + rr, side="left")
            out[:, m] = prefix[hi] - prefix[lo]
        return out
    if variant == "euclid_ball":
        dist = domain.chord_matrix
    elif variant == "arc_ball":
        dist = domain.arc_matrix
    else:
        raise UnsupportedVariantError(f"unknown variant {variant!r}")
    dist = dist[idx]
    out = np.empty((idx.size, radii.size))
    for m, r in enumerate(radii):
        out[:, m] = (dist < r * _OPEN) @ values
    return out


def morrey_norm(f: SampledFunction, mp: MorreyParams, variant: str = "euclid_ball") -> float:
    """Discrete Morrey norm of ``f``.

    ``arc_ball`` measures balls by arc distance and needs a curve; on a
    plain :class:`Grid1D` only ``euclid_ball`` is accepted.
    """
    dom = f.domain
    if isinstance(dom, Grid1D) and variant == "arc_ball":
        raise UnsupportedVariantError("arc_ball needs a curve; use euclid_ball on an interval")
    vals = np.asarray(f.values)
    if vals.shape[0] != dom.size:
        raise MisalignedFunctionError("function and domain sizes differ")
    radii = morrey_radii(dom, mp.radii_levels)
    # factor out the largest value so |f|**p neither overflows nor underflows
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale == 0.0 or not np.isfinite(scale):
        return scale
    mass = np.abs(vals / scale) ** mp.p * np.asarray(dom.weights)
    sums = ball_sums(dom, mass, radii, variant, mp.centers)
    return scale * float(np.max(sums * radii[None, :] ** -mp.lam) ** (1.0 / mp.p))


def lp_norm(f: SampledFunction, p: float) -> float:
    vals = np.abs(np.asarray(f.values))
    scale = float(np.max(vals)) if vals.size else 0.0
    if scale == 0.0 or not np.isfinite(scale):
        return scale
    return scale * float(np.sum((vals / scale) ** p * f.domain.weights) ** (1.0 / p))


@dataclass(frozen=True)
class MembershipVerdict:
    member: str
    norm_estimates: list
    growth: GrowthFit
    min_radii: list


def diagnose_membership(
    f_family: Callable[[int], SampledFunction],
    mp: MorreyParams,
    levels: int = 5,
    n0: int = 128,
    variant: str = "euclid_ball",
) -> MembershipVerdict:
    """Decide Morrey membership from norms under dyadic refinement.

    ``f_family(n)`` must sample the same function on ``n`` cells. Norms at
    ``n0 * 2**k`` are fitted against the smallest radius used; a negative
    exponent (norm blowing up as the radius shrinks) below ``-0.02`` with
    a good fit means ``member="no"``.
    """
    if levels < 4:
        raise InvalidParamsError("levels must be >= 4")
    norms, min_r = [], []
    for k in range(levels):
        f = f_family(n0 * 2**k)
        norms.append(morrey_norm(f, mp, variant))
        min_r.append(float(morrey_radii(f.domain, mp.radii_levels)[-1]))
    fit = fit_growth(min_r, norms)
    verdict = classify_growth(fit, increasing_is_divergent=False)
    member = {"bounded": "yes", "unbounded": "no"}.get(verdict, "inconclusive")
    return MembershipVerdict(member, norms, fit, min_r)


def _node_values(domain):
    if isinstance(domain, Grid1D):
        return np.asarray(domain.nodes)
    return np.asarray(domain.points)


def weight_at_nodes(w, domain) -> np.ndarray:
    """Evaluate a :class:`~morrey_lab.weights.NodeWeight` at the nodes of ``domain``."""
    t = _node_values(domain)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rho = w(t)
    bad = ~np.isfinite(rho) | (rho <= 0)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise WeightSingularAtNodeError(f"weight is {rho[k]} at node {k} ({t[k]})")
    return rho


def weighted_morrey_norm(f: SampledFunction, w, mp: MorreyParams, variant: str = "euclid_ball") -> float:
    """Morrey norm of ``rho * f`` for a product weight ``rho``."""
    rho = weight_at_nodes(w, f.domain)
    return morrey_norm(f.with_values(rho * np.asarray(f.values)), mp, variant)
