"""Plane curves discretized at arc-length midpoints, and their geometry.

A :class:`DiscretizedCurve` stores the curve point ``t(s_k)`` at the
midpoint ``s_k`` of each arc-length cell together with the cell edges, so
the Cauchy operator can use complex arc elements ``t(s_{k+1/2}) - t(s_{k-1/2})``
and be evaluated at the edges without ever hitting a data node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    CurveFileError,
    DegenerateCurveError,
    EmptyRadiiError,
    IndexOutOfRangeError,
    InvalidCountError,
    InvalidParamsError,
    UnknownFamilyError,
)
from .numerics import fit_growth

FAMILIES = ("segment", "circle", "lipschitz_graph", "log_spiral_arc", "cusp")


@dataclass(frozen=True, eq=False)
class DiscretizedCurve:
    """Arc-length midpoint discretization of a bounded rectifiable curve.

    Attributes
    ----------
    points : complex ndarray
        ``t(s_k)`` at the cell midpoints.
    arc_nodes : ndarray
        Arc abscissae ``s_k``, strictly increasing.
    weights : ndarray
        Arc-length cell widths.
    total_length : float
        Length of the discretized curve; equals ``weights.sum()``.
    closed : bool
        Whether the curve closes on itself (arc distance wraps).
    edges : complex ndarray
        Cell edge points, one more than the cells. For closed curves the
        last edge repeats the first.
    """

    points: np.ndarray = field(repr=False)
    arc_nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    total_length: float
    closed: bool
    edges: np.ndarray = field(repr=False)
    edge_arc: np.ndarray = field(repr=False)
    family: str = "custom"

    def __post_init__(self):
        for name, dtype in (
            ("points", complex),
            ("arc_nodes", float),
            ("weights", float),
            ("edges", complex),
            ("edge_arc", float),
        ):
            arr = np.array(getattr(self, name), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.points.size
        if n < 2 or self.arc_nodes.size != n or self.weights.size != n:
            raise DegenerateCurveError("curve arrays must share a length >= 2")
        if self.edges.size != n + 1 or self.edge_arc.size != n + 1:
            raise DegenerateCurveError("a curve needs n + 1 edge points")
        if np.any(np.diff(self.arc_nodes) <= 0):
            raise DegenerateCurveError("arc abscissae must increase strictly")
        tol = 1e-9 * self.total_length
        chords = np.abs(np.diff(self.points))
        if np.any(chords > np.diff(self.arc_nodes) + tol):
            raise DegenerateCurveError("chord exceeds arc between consecutive nodes")
        if abs(self.weights.sum() - self.total_length) > 1e-9 * self.total_length:
            raise DegenerateCurveError("cell widths do not sum to the curve length")

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def h(self) -> float:
        """Largest cell width."""
        return float(self.weights.max())

    @cached_property
    def chord_matrix(self) -> np.ndarray:
        d = np.abs(self.points[:, None] - self.points[None, :])
        d.setflags(write=False)
        return d

    @cached_property
    def arc_matrix(self) -> np.ndarray:
        d = np.abs(self.arc_nodes[:, None] - self.arc_nodes[None, :])
        if self.closed:
            d = np.minimum(d, self.total_length - d)
        d.setflags(write=False)
        return d

    @cached_property
    def diameter(self) -> float:
        return float(self.chord_matrix.max())

    def staggered(self) -> "DiscretizedCurve":
        """The dual curve whose nodes are this curve's cell edges.

        Closed curves keep all ``n`` edges; open curves keep the ``n - 1``
        interior edges (the endpoints are excluded).
        """
        n = self.size
        if self.closed:
            pts = self.edges[:-1]
            s = self.edge_arc[:-1]
            nxt = np.roll(self.arc_nodes, 1)
            nxt[0] -= self.total_length
            w = self.arc_nodes - nxt
            edges = np.concatenate([self.points[-1:], self.points])
            edge_arc = np.concatenate([[self.arc_nodes[-1] - self.total_length], self.arc_nodes])
            total = self.total_length
        else:
            if n < 3:
                raise DegenerateCurveError("open curve too short to stagger")
            pts = self.edges[1:-1]
            s = self.edge_arc[1:-1]
            w = np.diff(self.arc_nodes)
            edges = self.points
            edge_arc = self.arc_nodes
            total = float(w.sum())
        return DiscretizedCurve(pts, s, w, total, self.closed, edges, edge_arc, self.family)


# ---------------------------------------------------------------------------
# generators


def _require(params, key, default, check, message):
    value = float(params.get(key, default))
    if not np.isfinite(value) or not check(value):
        raise InvalidParamsError(f"{key}={value}: {message}")
    return value


def _arc_grid(length, n):
    h = length / n
    return (np.arange(n) + 0.5) * h, np.arange(n + 1) * h


def _build(family, pos, length, n, closed):
    s, se = _arc_grid(length, n)
    pts = pos(s)
    edges = pos(se)
    if closed:
        edges[-1] = edges[0]
    w = np.full(n, length / n)
    return DiscretizedCurve(pts, s, w, length, closed, edges, se, family)


def _cusp_branch_inverse(a, half_length):
    """Return ``x(sigma)`` for the branch ``y = x**a`` parametrized by arc length."""
    from scipy.integrate import cumulative_trapezoid
    from scipy.optimize import brentq

    speed = lambda x: np.sqrt(1.0 + (a * x ** (a - 1.0)) ** 2)
    # coarse bracket for the x-extent with the requested arc length
    xs = np.linspace(0.0, half_length, 20001)
    arc = cumulative_trapezoid(speed(xs), xs, initial=0.0)
    x_end = brentq(lambda x: np.interp(x, xs, arc) - half_length, 0.0, half_length)
    # dense table, geometric near the cusp
    xs = np.unique(
        np.concatenate(
            [[0.0], np.geomspace(1e-9 * x_end, x_end, 200001), np.linspace(0.0, x_end, 200001)]
        )
    )
    arc = cumulative_trapezoid(speed(xs), xs, initial=0.0)
    arc *= half_length / arc[-1]
    return lambda sigma: np.interp(sigma, arc, xs)


def generate(kind: str, params: Mapping[str, float] | None, n: int) -> DiscretizedCurve:
    """Discretize a built-in curve family at ``n`` arc-length midpoints.

    Families and their parameters (defaults in brackets):

    * ``segment``: ``length`` [1].
    * ``circle``: ``radius`` [1]; the only closed family.
    * ``lipschitz_graph``: zigzag graph ``y = slope * tri(x)`` over
      ``width`` [1] with ``teeth`` [4] teeth and ``slope`` [1].
    * ``log_spiral_arc``: ``r = r0 exp(b theta)`` for ``theta`` in
      ``[0, 2 pi turns]``; ``b`` [0.2], ``turns`` [1], ``r0`` [1].
    * ``cusp``: branches ``y = +-x**a`` meeting tangentially at the origin,
      total arc ``length`` [1], ``a >= 1`` [2]. Near the cusp the chord
      between points at equal arc distance scales like arc**a.
    """
    params = dict(params or {})
    if kind not in FAMILIES:
        raise UnknownFamilyError(f"unknown curve family {kind!r}; expected one of {FAMILIES}")
    if int(n) != n or n < 8:
        raise InvalidCountError(f"need n >= 8 cells, got {n}")
    n = int(n)

    if kind == "segment":
        length = _require(params, "length", 1.0, lambda v: v > 0, "must be positive")
        return _build(kind, lambda s: s.astype(complex), length, n, False)

    if kind == "circle":
        radius = _require(params, "radius", 1.0, lambda v: v > 0, "must be positive")
        return _build(kind, lambda s: radius * np.exp(1j * s / radius), 2 * np.pi * radius, n, True)

    if kind == "lipschitz_graph":
        width = _require(params, "width", 1.0, lambda v: v > 0, "must be positive")
        slope = _require(params, "slope", 1.0, lambda v: v >= 0, "must be nonnegative")
        teeth = _require(params, "teeth", 4, lambda v: v >= 1 and v == int(v), "positive integer")
        period = width / teeth
        stretch = np.sqrt(1.0 + slope**2)

        def pos(s):
            x = s / stretch
            y = slope * (0.5 * period - np.abs(np.mod(x, period) - 0.5 * period))
            return x + 1j * y

        return _build(kind, pos, width * stretch, n, False)

    if kind == "log_spiral_arc":
        b = _require(params, "b", 0.2, lambda v: v > 0, "must be positive")
        turns = _require(params, "turns", 1.0, lambda v: v > 0, "must be positive")
        r0 = _require(params, "r0", 1.0, lambda v: v > 0, "must be positive")
        k = np.sqrt(1.0 + b * b) / b
        theta_end = 2 * np.pi * turns
        length = k * r0 * np.expm1(b * theta_end)

        def pos(s):
            theta = np.log1p(s / (k * r0)) / b
            return r0 * np.exp((b + 1j) * theta)

        return _build(kind, pos, length, n, False)

    # cusp
    a = _require(params, "a", 2.0, lambda v: v >= 1, "cusp exponent must be >= 1")
    length = _require(params, "length", 1.0, lambda v: v > 0, "must be positive")
    inverse = _cusp_branch_inverse(a, 0.5 * length)

    def pos(s):
        u = s - 0.5 * length
        x = inverse(np.abs(u))
        return x + 1j * np.sign(u) * x**a

    return _build(kind, pos, length, n, False)


def load_curve(path: str | Path) -> DiscretizedCurve:
    """Read an open curve from a ``s x y`` text file.

    Cell widths come from the midpoints between consecutive abscissae;
    edge points are placed on the polyline through the samples.

    Raises
    ------
    CurveFileError
        Malformed lines, non-increasing ``s``, or a chord longer than the
        arc between consecutive samples.
    """
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise CurveFileError(f"line {lineno}: expected 's x y', got {raw!r}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise CurveFileError(f"line {lineno}: {exc}") from None
    if len(rows) < 3:
        raise CurveFileError("need at least 3 samples")
    data = np.array(rows)
    s, pts = data[:, 0], data[:, 1] + 1j * data[:, 2]
    ds = np.diff(s)
    if np.any(ds <= 0):
        raise CurveFileError("arc abscissae must increase strictly")
    span = s[-1] - s[0]
    if np.any(np.abs(np.diff(pts)) > ds + 1e-9 * span):
        bad = int(np.argmax(np.abs(np.diff(pts)) - ds))
        raise CurveFileError(f"chord exceeds arc between samples {bad} and {bad + 1}")
    se = np.concatenate([[s[0] - 0.5 * ds[0]], 0.5 * (s[1:] + s[:-1]), [s[-1] + 0.5 * ds[-1]]])
    # polyline extension past the end samples
    ext = np.concatenate([[s[0] - ds[0]], s, [s[-1] + ds[-1]]])
    ext_pts = np.concatenate([[2 * pts[0] - pts[1]], pts, [2 * pts[-1] - pts[-2]]])
    edges = np.interp(se, ext, ext_pts.real) + 1j * np.interp(se, ext, ext_pts.imag)
    w = np.diff(se)
    return DiscretizedCurve(pts, s, w, float(w.sum()), False, edges, se, "custom")


# ---------------------------------------------------------------------------
# balls and diagnostics


def _check_index(c, t_index):
    if int(t_index) != t_index or not 0 <= t_index < c.size:
        raise IndexOutOfRangeError(f"node index {t_index} outside 0..{c.size - 1}")
    return int(t_index)


def ball(c: DiscretizedCurve, t_index: int, r: float) -> np.ndarray:
    """Indices of nodes at chord distance ``< r`` from node ``t_index``."""
    i = _check_index(c, t_index)
    return np.flatnonzero(np.abs(c.points - c.points[i]) < r)


def arc_ball(c: DiscretizedCurve, t_index: int, r: float) -> np.ndarray:
    """Indices of nodes at arc distance ``< r`` (shorter arc when closed)."""
    i = _check_index(c, t_index)
    d = np.abs(c.arc_nodes - c.arc_nodes[i])
    if c.closed:
        d = np.minimum(d, c.total_length - d)
    return np.flatnonzero(d < r)


def default_radii(c: DiscretizedCurve, per_octave: int = 4, min_cells: float = 32.0) -> np.ndarray:
    """Radii ``diameter * 2**(-k / per_octave)`` down to ``min_cells`` cells.

    Anchoring at the diameter keeps the radius set nested under refinement:
    doubling ``n`` only adds smaller radii. At least 16 radii are returned.
    """
    hi = c.diameter
    lo = min(min_cells * c.h, hi * 2.0 ** (-15.0 / per_octave))
    count = int(np.floor(per_octave * np.log2(hi / lo))) + 1
    return hi * 2.0 ** (-np.arange(count) / per_octave)


@dataclass(frozen=True)
class CurveDiagnostics:
    carleson_constant: float
    arc_chord_constant: float
    cusp_order_estimate: float
    worst_pair: tuple[int, int]


def _cusp_order(c, i, j, max_steps=64):
    """Fit ``chord ~ arc**a`` along pairs spreading symmetrically from (i, j)."""
    arcs, chords = [], []
    n = c.size
    for m in range(max_steps):
        a_idx, b_idx = i - m, j + m
        if c.closed:
            a_idx, b_idx = a_idx % n, b_idx % n
        elif a_idx < 0 or b_idx >= n:
            break
        arc = c.arc_matrix[a_idx, b_idx]
        chord = c.chord_matrix[a_idx, b_idx]
        if arc <= 0 or chord <= 0 or (arcs and arc <= arcs[-1]):
            break
        arcs.append(arc)
        chords.append(chord)
    if len(arcs) < 3:
        return float("nan")
    return fit_growth(arcs, chords).exponent


def diagnostics(c: DiscretizedCurve, radii=None) -> CurveDiagnostics:
    """Carleson and arc-chord constants by exhaustive search over nodes.

    ``mu(t, r)`` is the sum of cell widths of nodes with chord distance
    ``< r`` from ``t``; no partial-cell correction is applied.
    """
    if radii is None:
        radii = default_radii(c)
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise EmptyRadiiError("diagnostics needs at least one radius")
    if np.any(radii <= 0):
        raise EmptyRadiiError("radii must be positive")
    chord = c.chord_matrix
    carleson = 0.0
    for r in radii:
        mu = (chord < r).astype(float) @ c.weights
        carleson = max(carleson, float(mu.max() / r))

    arc = c.arc_matrix
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(chord > 0, arc / chord, 0.0)
    np.fill_diagonal(ratio, 0.0)
    flat = int(np.argmax(ratio))
    i, j = sorted(divmod(flat, c.size))
    arc_chord = max(1.0, float(ratio[i, j]))
    return CurveDiagnostics(carleson, arc_chord, _cusp_order(c, i, j), (i, j))


def arc_chord_trend(kind: str, params, ns) -> tuple[list[float], "object"]:
    """Arc-chord constants across refinements and their growth fit in ``n``."""
    values = [diagnostics(generate(kind, params, n), radii=[1.0]).arc_chord_constant for n in ns]
    return values, fit_growth(ns, values)
