"""Radial weight functions, their indices, and class-membership checks.

Weights are functions ``phi`` on ``(0, ell]``. Index and Zygmund estimates
work on ``log phi`` as a function of ``log x`` so that scales far below
double-precision ``x`` resolution (down to ``1e-290``) remain usable; that
depth is what makes logarithmic factors visible as slowly vanishing
corrections rather than as bias.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    ClassMismatchError,
    InvalidParamsError,
    OutOfDomainError,
    TableTooCoarseError,
    WeightTableError,
)
from .numerics import EXPONENT_TOL, fit_growth

V_CLASSES = ("V++", "V--", "V+-", "V-+")
_LOG4 = np.log(4.0)


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """A weight ``phi`` on ``(0, ell]``.

    ``power``: ``x**alpha``; ``power_log``: ``x**alpha * ln(A/x)**beta``
    with ``A > ell``; ``custom_table``: log-log interpolation of positive
    samples ``table = (xs, values)``, optionally multiplied by ``x**alpha``.
    """

    kind: str
    alpha: float = 0.0
    beta: float = 0.0
    A: float = np.e
    ell: float = 1.0
    table: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("power", "power_log", "custom_table"):
            raise InvalidParamsError(f"unknown weight kind {self.kind!r}")
        if not self.ell > 0:
            raise InvalidParamsError("ell must be positive")
        if self.kind == "power_log" and not self.A > self.ell:
            raise InvalidParamsError(f"need A > ell for ln(A/x) > 0, got A={self.A}, ell={self.ell}")
        if self.kind == "custom_table":
            if self.table is None:
                raise InvalidParamsError("custom_table weight needs a table")
            xs, vals = (np.asarray(v, dtype=float) for v in self.table)
            if xs.ndim != 1 or xs.shape != vals.shape or xs.size < 2:
                raise WeightTableError("table needs two equal-length columns of >= 2 rows")
            if np.any(np.diff(xs) <= 0) or xs[0] <= 0:
                raise WeightTableError("table abscissae must be positive and increasing")
            if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
                raise WeightTableError("table values must be positive and finite")
            if xs[-1] < self.ell * (1 - 1e-12):
                raise WeightTableError("table must reach x = ell")
            object.__setattr__(self, "table", (np.log(xs), np.log(vals)))

    # -- evaluation ---------------------------------------------------------

    def log_eval(self, log_x):
        """``log phi(exp(log_x))``; no domain check, closed forms extend freely."""
        u = np.asarray(log_x, dtype=float)
        if self.kind == "power":
            return self.alpha * u
        if self.kind == "power_log":
            return self.alpha * u + self.beta * np.log(np.log(self.A) - u)
        lx, lv = self.table
        if np.any(u < lx[0] - 1e-12):
            raise TableTooCoarseError(
                f"weight table starts at x={np.exp(lx[0]):.3g}; smaller scales requested"
            )
        return self.alpha * u + np.interp(u, lx, lv)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0) or np.any(x > self.ell * (1 + 1e-12)):
            raise OutOfDomainError(f"weight evaluated outside (0, {self.ell}]")
        with np.errstate(divide="ignore"):
            return np.exp(self.log_eval(np.log(x)))

    def shifted(self, lam: float) -> "WeightSpec":
        """The weight ``x**lam * phi(x)``."""
        return replace(self, alpha=self.alpha + lam, table=self._raw_table())

    def with_ell(self, ell: float) -> "WeightSpec":
        return replace(self, ell=ell, table=self._raw_table())

    def _raw_table(self):
        if self.table is None:
            return None
        lx, lv = self.table
        return (np.exp(lx), np.exp(lv))

    def min_scale(self) -> float:
        """Smallest ``x`` where the weight can be evaluated (0 for closed forms)."""
        return 0.0 if self.table is None else float(np.exp(self.table[0][0]))


def eval(w: WeightSpec, x):
    """Evaluate ``w`` at ``x`` in ``(0, ell]``; raises ``OutOfDomainError`` otherwise."""
    return w(x)


def power(alpha: float, ell: float = 1.0) -> WeightSpec:
    return WeightSpec("power", alpha=alpha, ell=ell)


def power_log(alpha: float, beta: float, A: float | None = None, ell: float = 1.0) -> WeightSpec:
    return WeightSpec("power_log", alpha=alpha, beta=beta, A=np.e * ell if A is None else A, ell=ell)


def load_weight_table(path: str | Path, ell: float | None = None) -> WeightSpec:
    """Read a ``x value`` table; ``ell`` defaults to the last abscissa."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise WeightTableError(f"line {lineno}: expected 'x value', got {raw!r}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise WeightTableError(f"line {lineno}: {exc}") from None
    if len(rows) < 2:
        raise WeightTableError("weight table needs at least two rows")
    xs, vals = np.array(rows).T
    return WeightSpec("custom_table", ell=float(xs[-1] if ell is None else ell), table=(xs, vals))


@dataclass(frozen=True, eq=False)
class NodeWeight:
    """Product weight ``rho(t) = prod_k phi_k(|t - t_k|)``."""

    specs: tuple
    nodes: tuple

    def __post_init__(self):
        specs, nodes = tuple(self.specs), tuple(self.nodes)
        if len(specs) != len(nodes) or not specs:
            raise InvalidParamsError("need one weight per node, at least one node")
        if len(set(nodes)) != len(nodes):
            raise InvalidParamsError("weight nodes must be distinct")
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "nodes", nodes)

    def __call__(self, t):
        t = np.asarray(t)
        out = np.ones(t.shape)
        for spec, node in zip(self.specs, self.nodes):
            d = np.abs(t - node)
            with np.errstate(divide="ignore"):
                out = out * np.exp(spec.log_eval(np.log(d)))
        return out

    @classmethod
    def single(cls, spec: WeightSpec, node=0.0) -> "NodeWeight":
        return cls((spec,), (node,))

    @classmethod
    def identity(cls) -> "NodeWeight":
        return cls((power(0.0),), (0.0,))


# ---------------------------------------------------------------------------
# Matuszewska-Orlicz indices


@dataclass(frozen=True)
class IndexEstimate:
    m_lower: float
    M_upper: float
    h_min: float
    x_grid: np.ndarray = field(repr=False)


def _scale_logs(w, h_levels):
    j = np.arange(2, h_levels + 2)
    log_h = np.log(w.ell) - j * _LOG4
    if w.table is not None and log_h[-1] < w.table[0][0] - 1e-12:
        raise TableTooCoarseError(
            f"weight table starts at {w.min_scale():.3g} but h_min is {np.exp(log_h[-1]):.3g}"
        )
    return log_h


def estimate_indices(w: WeightSpec, h_levels: int = 480, x_points: int = 64) -> IndexEstimate:
    """Estimate the lower and upper indices ``m(phi)``, ``M(phi)``.

    The limsup over ``h -> 0`` of ``phi(h x) / phi(h)`` is replaced by the
    maximum over the deeper half of ``h = ell * 4**-j`` (``j = 2 ..
    h_levels + 1``). Each index is the supremum of ``log(ratio) / log(x)``
    over the far tail of its ``x`` grid (``x -> 0`` for ``m``, ``x -> inf``
    for ``M``), which is where the defining limits are approached.
    """
    if h_levels < 4:
        raise InvalidParamsError("h_levels must be >= 4")
    if x_points < 8:
        raise InvalidParamsError("x_points must be >= 8")
    log_h = _scale_logs(w, h_levels)
    depth = np.log(w.ell) - log_h[-1]
    deep = log_h[len(log_h) // 2 :]
    span = np.log(w.ell) - deep[0]

    # x < 1: log x in [-span, 0); x > 1: log x in (0, span/2] so h x <= ell
    lower_u = np.linspace(span / x_points, span, x_points)
    upper_v = np.linspace(0.5 * span / x_points, 0.5 * span, x_points)
    floor = w.table[0][0] if w.table is not None else -np.inf

    def q(log_x):
        lh = deep[:, None]
        lhx = lh + log_x[None, :]
        valid = lhx >= floor - 1e-12
        if not np.all(valid.any(axis=0)):
            raise TableTooCoarseError("weight table too coarse for the requested x grid")
        safe = np.where(valid, lhx, lh)
        ratio = np.where(valid, w.log_eval(safe) - w.log_eval(lh), -np.inf)
        return ratio.max(axis=0) / log_x

    q_low = q(-lower_u)
    q_up = q(upper_v)
    tail = x_points // 2
    m = float(np.max(q_low[tail:]))
    M = float(np.max(q_up[tail:]))
    if m > M:
        m = M = 0.5 * (m + M)
    x_grid = np.concatenate([np.exp(-lower_u[::-1]), np.exp(upper_v)])
    return IndexEstimate(m, M, float(np.exp(np.log(w.ell) - depth)), x_grid)


# ---------------------------------------------------------------------------
# V classes and almost monotonicity


def _bound(cls, phi_lo, phi_hi, lo, hi):
    if cls == "V++":
        return phi_hi / hi
    if cls == "V--":
        return phi_lo / lo
    if cls == "V+-":
        return phi_hi / lo
    if cls == "V-+":
        return phi_lo / hi
    raise InvalidParamsError(f"unknown class {cls!r}; expected one of {V_CLASSES}")


def _sample_pairs(ell, samples, min_gap):
    """Log-spaced pairs ``0 < y < x <= ell`` plus near-diagonal pairs."""
    k = max(8, int(np.ceil(np.sqrt(2.0 * samples))))
    z = ell * 2.0 ** -np.arange(k, dtype=float)
    xi, yi = np.triu_indices(k, 1)
    x, y = z[xi], z[yi]
    rel = 10.0 ** -np.arange(1, 7)
    xd = np.repeat(z, rel.size)
    yd = xd * (1.0 - np.tile(rel, z.size))
    keep = (xd - yd) >= min_gap
    x = np.concatenate([x, xd[keep]])
    y = np.concatenate([y, yd[keep]])
    return x, y


def _v_constant(w, cls, samples):
    x, y = _sample_pairs(w.ell, samples, 1e-6 * w.ell)
    fx, fy = w(x), w(y)
    quotient = np.abs(fx - fy) / (x - y)
    return float(np.max(quotient / _bound(cls, fy, fx, y, x)))


def check_v_class(w: WeightSpec, cls: str, samples: int = 1000) -> tuple[bool, float]:
    """Empirical membership of ``w`` in ``V++``, ``V--``, ``V+-`` or ``V-+``.

    The constant is the largest ratio of the difference quotient to the
    class bound over sampled pairs. Doubling the sample count pushes the
    pairs deeper towards the origin; the verdict is true when the constant
    changes by less than 5%.
    """
    if cls not in V_CLASSES:
        raise InvalidParamsError(f"unknown class {cls!r}; expected one of {V_CLASSES}")
    if samples < 1000:
        raise InvalidParamsError("check_v_class needs at least 1000 sample pairs")
    c1 = _v_constant(w, cls, samples)
    c2 = _v_constant(w, cls, 2 * samples)
    stable = abs(c2 - c1) <= 0.05 * max(c1, 1e-300) or c2 == c1
    return bool(stable), c2


def almost_monotone_constant(w: WeightSpec, increasing: bool = True, samples: int = 1000) -> tuple[bool, float]:
    """Constant ``C`` with ``phi(y) <= C phi(x)`` for ``y < x`` (or the reverse).

    Returns ``(stable, C)``; stability is judged under sample doubling.
    """

    def const(n):
        x, y = _sample_pairs(w.ell, n, 0.0)
        fx, fy = w(x), w(y)
        r = fy / fx if increasing else fx / fy
        return float(max(1.0, r.max()))

    c1, c2 = const(samples), const(2 * samples)
    return abs(c2 - c1) <= 0.05 * c1, c2


def check_w_class(w: WeightSpec, cls: str, samples: int = 1000) -> bool:
    """Membership in ``W0`` (almost increasing, tends to 0), ``W1``
    (``phi(x)/x`` almost decreasing) or ``W~`` (``x**a phi`` in ``W0`` for some ``a > 0``)."""
    if cls == "W":
        return True
    if cls == "W0":
        stable, _ = almost_monotone_constant(w, True, samples)
        tiny = float(np.exp(w.log_eval(np.log(w.ell) - 200.0)))
        return stable and tiny < 1e-6 * float(w(w.ell))
    if cls == "W1":
        stable, _ = almost_monotone_constant(w.shifted(-1.0), False, samples)
        return stable
    if cls == "W~":
        m = estimate_indices(w).m_lower
        return check_w_class(w.shifted(max(0.0, -m) + 0.5), "W0", samples)
    raise InvalidParamsError(f"unknown class {cls!r}")


# ---------------------------------------------------------------------------
# Zygmund classes


def _log_panel_grid(hi, panels, width, order=8):
    """Gauss-Legendre nodes/log-weights on ``panels`` equal panels ending at ``hi``."""
    g, gw = np.polynomial.legendre.leggauss(order)
    edges = hi - width * np.arange(panels, -1, -1)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * g[None, :] + 0.5 * (a + b)
    logw = np.log(0.5 * (b - a) * gw[None, :])
    return edges, nodes, logw


def _panel_logsum(values):
    m = values.max(axis=1, keepdims=True)
    return (m + np.log(np.exp(values - m).sum(axis=1, keepdims=True)))[:, 0]


def zygmund_constants(w: WeightSpec, beta: float, gamma: float, h_levels: int = 480, depth: float = 1000.0):
    """Required constants ``c(h)`` for both Zygmund conditions at ``h = ell 4**-j``.

    Returns ``(log_h, c_lower, c_upper, lower_converges)``. The lower
    integral is truncated ``depth`` log-units below each ``h``; it is
    flagged divergent when that truncation still carries more than
    ``1e-10`` of the mass.
    """
    log_h = _scale_logs(w, h_levels)
    log_ell = np.log(w.ell)
    width = _LOG4 / 4.0  # panel edges land on every log h
    panels = int(np.ceil((log_ell - log_h[-1] + depth) / width))
    edges, nodes, logw = _log_panel_grid(log_ell, panels, width)
    lo = edges[0]
    # integrals in u = log x: phi(x) x**-s dx / x -> exp(log phi(e^u) - s u) du
    g = w.log_eval(nodes)
    low_terms = _panel_logsum(g - beta * nodes + logw)
    up_terms = _panel_logsum(g - gamma * nodes + logw)
    cum_low = np.logaddexp.accumulate(low_terms)
    cum_up = np.logaddexp.accumulate(up_terms[::-1])[::-1]
    idx = np.clip(np.searchsorted(edges, log_h - 1e-9), 0, len(edges) - 1)
    gh = w.log_eval(log_h)

    log_int_low = cum_low[idx - 1]
    log_c_low = log_int_low - (gh - beta * log_h)
    cut = int(np.searchsorted(edges, lo + 0.1 * depth))
    tail = np.logaddexp.accumulate(low_terms[:cut])[-1]
    converges = bool(np.all(tail - log_int_low < np.log(1e-10)))

    log_int_up = np.where(idx < len(up_terms), cum_up[np.minimum(idx, len(up_terms) - 1)], -np.inf)
    log_c_up = log_int_up - (gh - gamma * log_h)
    return log_h, np.exp(log_c_low), np.exp(log_c_up), converges


def _stable_in_h(log_h, c):
    """True when the required constant does not grow as ``h -> 0``."""
    tail = slice(len(log_h) // 2, None)
    hs, cs = np.exp(log_h[tail]), c[tail]
    if not np.all(np.isfinite(cs)) or np.any(cs <= 0):
        return False
    fit = fit_growth(hs, cs)
    return fit.exponent >= -EXPONENT_TOL


def check_zygmund(w: WeightSpec, beta: float, gamma: float, h_levels: int = 480):
    """Zygmund-class verdicts for ``Z^beta`` and ``Z_gamma``.

    ``Z^beta`` requires ``int_0^h phi(x) x**(-1-beta) dx <= c phi(h) h**-beta``
    and ``Z_gamma`` requires ``int_h^ell phi(x) x**(-1-gamma) dx <= c phi(h) h**-gamma``.
    A condition holds when its required constant stays bounded as ``h -> 0``
    (growth-fit exponent above ``-0.02``). A divergent lower integral means
    ``phi`` is not in ``Z^beta``; its constant is reported as ``inf``.

    Returns
    -------
    (in_Z_beta, in_Z_gamma, (c_beta, c_gamma))
    """
    if h_levels < 4:
        raise InvalidParamsError("h_levels must be >= 4")
    log_h, c_low, c_up, converges = zygmund_constants(w, beta, gamma, h_levels)
    in_beta = converges and _stable_in_h(log_h, c_low)
    in_gamma = _stable_in_h(log_h, c_up)
    c_beta = float(np.max(c_low)) if converges else float("inf")
    return bool(in_beta), bool(in_gamma), (c_beta, float(np.max(c_up)))


# ---------------------------------------------------------------------------
# admissibility for the weighted singular operator

STRICT_TOL = 1e-9
INDEX_TOL = 0.02  # accuracy of estimated indices for non-power weights


def admissible_window(p: float, lam: float) -> tuple[float, float]:
    """Open window ``((lam - 1)/p, lam/p + 1/p')`` for the weight indices."""
    return (lam - 1.0) / p, lam / p + 1.0 - 1.0 / p


def check_admissible(w: WeightSpec, p: float, lam: float, estimate: IndexEstimate | None = None):
    """Whether both indices lie strictly inside the admissible window.

    ``margin`` is the distance to the nearer window edge (negative when
    outside). Margins within ``1e-9`` of zero count as boundary cases and
    fail the strict inequality.
    """
    if not 1.0 < p < np.inf:
        raise InvalidParamsError("need 1 < p < inf")
    if not 0.0 <= lam < 1.0:
        raise InvalidParamsError("need 0 <= lambda < 1")
    est = estimate if estimate is not None else estimate_indices(w)
    lo, hi = admissible_window(p, lam)
    margin = min(est.m_lower - lo, hi - est.M_upper)
    return bool(margin > STRICT_TOL), float(margin)


def hardy_prediction(w: WeightSpec, p: float, lam: float, direction: str, estimate: IndexEstimate | None = None) -> str:
    """Boundedness prediction for the weighted Hardy operators from the indices.

    ``lower``: bounded if ``M < lam/p + 1/p'``, unbounded if ``m > lam/p + 1/p'``.
    ``upper``: bounded if ``m > (lam - 1)/p``, unbounded if ``M < (lam - 1)/p``.
    For pure powers the boundary exponent itself is unbounded. Everything
    else, including the gap between the sufficient and necessary index
    conditions, is ``"undetermined"``. Other weights whose indices fall
    within ``INDEX_TOL`` of a threshold are also undetermined, since the
    estimates are not more accurate than that.
    """
    est = estimate if estimate is not None else estimate_indices(w)
    lo, hi = admissible_window(p, lam)
    pure_power = w.kind == "power"
    tol = STRICT_TOL if pure_power else INDEX_TOL
    if direction == "lower":
        if est.M_upper < hi - tol:
            return "bounded"
        if est.m_lower > hi + tol:
            return "unbounded"
        if pure_power and abs(w.alpha - hi) <= STRICT_TOL:
            return "unbounded"
        return "undetermined"
    if direction != "upper":
        raise InvalidParamsError(f"direction must be 'lower' or 'upper', got {direction!r}")
    if est.m_lower > lo + tol:
        return "bounded"
    if est.M_upper < lo - tol:
        return "unbounded"
    if pure_power and abs(w.alpha - lo) <= STRICT_TOL:
        return "unbounded"
    return "undetermined"


def require_class(w: WeightSpec, cls: str, samples: int = 1000) -> float:
    ok, const = check_v_class(w, cls, samples)
    if not ok:
        raise ClassMismatchError(f"weight {w} is not in {cls} (constant drifts to {const:.3g})")
    return const
