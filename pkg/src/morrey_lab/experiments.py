"""Refinement experiments: operator-norm probes, threshold sweeps and inequality checks.

Every experiment evaluates a norm ratio on a sequence of dyadically refined
grids (``n0 * 2**k`` cells) and classifies the sequence of ratios with a
power-law growth fit. Unboundedness is witnessed on the extremal member
``x**((lam - 1)/p)`` which every interval family contains.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curves import DiscretizedCurve, generate
from .errors import InvalidParamsError, NonIntegrableInputError
from .morrey import MorreyParams, lp_norm, morrey_norm
from .numerics import (
    EXPONENT_TOL,
    RESIDUAL_MAX,
    GrowthFit,
    Grid1D,
    SampledFunction,
    classify_growth,
    fit_growth,
    make_grid,
)
from .operators import (
    HardyParams,
    cauchy_apply,
    hardy_apply,
    hardy_bound,
    maximal_apply,
    maximal_radii,
    sharp_maximal_apply,
    weighted_singular_apply,
)
from .weights import STRICT_TOL, NodeWeight, WeightSpec, check_admissible, hardy_prediction, power

DEFAULT_SEED = 20240229

# A doubling step may raise a pointwise-estimate ratio by at most this factor.
DOUBLING_GROWTH_MAX = 1.10

# Increasing ratio sequences whose increments shrink by less than this factor
# per doubling are not converging: log growth has constant increments, power
# growth has increments that grow.
RHO_DIVERGENT = 0.99
RHO_LOG_MAX = 2.0**EXPONENT_TOL  # increments of n**0.02 grow by this factor per doubling
TAIL_LEVELS = 4

# Relative size below which level-to-level changes count as rounding.
FLAT_TOL = 1e-9


# ---------------------------------------------------------------------------
# test families


@dataclass(frozen=True)
class Member:
    """A named function generator evaluated on any grid or curve.

    ``func`` receives the node abscissae measured from the start of the
    domain (for curves: arc length) and the domain itself.
    """

    name: str
    func: Callable
    divergent_probe: bool = False

    def source(self, domain) -> Callable:
        """The member as a function of the absolute abscissa on an interval grid."""
        return lambda t: self.func(np.asarray(t) - domain.a, domain)

    def sample(self, domain) -> SampledFunction:
        if isinstance(domain, Grid1D):
            s = np.asarray(domain.nodes) - domain.a
        else:
            s = np.asarray(domain.arc_nodes) - float(domain.edge_arc[0])
        return SampledFunction(domain, self.func(s, domain))


@dataclass(frozen=True)
class TestFamily:
    __test__ = False  # not a pytest class

    members: tuple
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not self.members:
            raise InvalidParamsError("a test family needs at least one member")

    def names(self) -> list[str]:
        return [m.name for m in self.members]

    def regular(self) -> tuple:
        return tuple(m for m in self.members if not m.divergent_probe)

    def extremal(self) -> Member | None:
        for m in self.members:
            if m.name.startswith("extremal"):
                return m
        return None


def _length(domain) -> float:
    return domain.length if isinstance(domain, Grid1D) else domain.total_length


def power_member(gamma: float, divergent_probe: bool = False) -> Member:
    return Member(f"power({gamma:g})", lambda s, d: s**gamma, divergent_probe)


def extremal_member(p: float, lam: float) -> Member:
    """``x**((lam - 1)/p)``, truncated by the grid at the first cell."""
    e = (lam - 1.0) / p
    return Member(f"extremal({p:g},{lam:g})", lambda s, d: s**e)


def bump_member() -> Member:
    """Smooth bump supported in the middle three fifths of the domain."""

    def func(s, d):
        u = s / _length(d)
        z = (u - 0.5) / 0.3
        out = np.zeros_like(u)
        inside = np.abs(z) < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
        return out

    return Member("bump", func)


def random_piecewise_member(seed: int = DEFAULT_SEED, pieces: int = 16) -> Member:
    """Piecewise constant with ``pieces`` values drawn once from ``seed``.

    The breakpoints are fixed fractions of the length, so every refinement
    level samples the same function.
    """
    vals = np.random.default_rng(seed).uniform(0.1, 1.0, pieces)

    def func(s, d):
        k = np.minimum((s / _length(d) * pieces).astype(int), pieces - 1)
        return vals[k]

    return Member(f"random_piecewise({seed})", func)


def harmonic_member(k: int) -> Member:
    """``exp(2 pi i k u)`` in the normalized arc parameter; ``tau**k`` on the unit circle."""
    return Member(f"harmonic({k})", lambda s, d: np.exp(2j * np.pi * k * s / _length(d)))


def jump_member(start: float, stop: float, name: str | None = None) -> Member:
    """Indicator of the normalized arc parameter range ``[start, stop)``."""

    def func(s, d):
        u = s / _length(d)
        return ((u >= start) & (u < stop)).astype(float)

    return Member(name or f"jump({start:g},{stop:g})", func)


def constant_member(value: float = 1.0) -> Member:
    return Member("constant", lambda s, d: np.full(s.shape, float(value)))


def interval_family(p: float, lam: float, gammas=(), seed: int = DEFAULT_SEED) -> TestFamily:
    """Extremal, bump and random piecewise members, plus ``x**gamma`` for each gamma.

    Powers below ``(lam - 1)/p`` are flagged ``divergent_probe``.
    """
    members = [extremal_member(p, lam), bump_member(), random_piecewise_member(seed)]
    floor = (lam - 1.0) / p
    members += [power_member(g, divergent_probe=g < floor) for g in gammas]
    return TestFamily(tuple(members), seed)


def circle_harmonics(n_max: int = 4, seed: int = DEFAULT_SEED) -> TestFamily:
    """Harmonics ``-n_max..n_max`` plus a random piecewise member."""
    members = [harmonic_member(k) for k in range(-n_max, n_max + 1)]
    members.append(random_piecewise_member(seed))
    return TestFamily(tuple(members), seed)


def jump_family(seed: int = DEFAULT_SEED) -> TestFamily:
    members = (
        jump_member(0.0, 0.5, "half"),
        jump_member(0.25, 0.4),
        jump_member(0.1, 0.9),
        random_piecewise_member(seed),
        bump_member(),
    )
    return TestFamily(members, seed)


# ---------------------------------------------------------------------------
# reports and verdicts


@dataclass(frozen=True)
class ExperimentReport:
    """Outcome of one refinement experiment.

    ``per_level`` pairs the cell count with the ratio observed there.
    ``prediction`` is ``"bounded"``, ``"unbounded"``, ``"undetermined"``
    or ``None`` when no prediction applies.
    """

    name: str
    params: dict
    per_level: list
    growth: GrowthFit
    verdict: str
    constant_estimate: float
    paper_bound: float | None = None
    prediction: str | None = None
    notes: str = ""
    seed: int | None = None

    @property
    def matches_prediction(self) -> bool | None:
        if self.prediction in (None, "undetermined"):
            return None
        return self.verdict == self.prediction


def _increment_rate(ratios) -> float | None:
    """Mean ratio of consecutive increments over the last four levels.

    The coarsest levels are often pre-asymptotic, so only the tail counts.
    ``None`` when the tail is flat to rounding or not increasing.
    """
    r = np.asarray(ratios, dtype=float)[-TAIL_LEVELS:]
    inc = np.diff(r)
    if np.max(np.abs(inc)) <= FLAT_TOL * np.max(np.abs(r)) or np.any(inc <= 0):
        return None
    return float((inc[-1] / inc[0]) ** (1.0 / (inc.size - 1)))


def classify_levels(ns, ratios) -> tuple[str, GrowthFit, str]:
    """Verdict for ratios observed at cell counts ``ns``.

    Sequences whose last four levels are flat or not monotonically
    increasing are judged by the power fit against ``n`` alone. Otherwise
    the mean increment ratio ``rho`` over those levels decides: ``rho >= RHO_DIVERGENT`` means no
    convergence (power growth has ``rho > 1``, logarithmic growth
    ``rho = 1``) and the verdict is ``unbounded``. Increments growing
    slower than ``RHO_LOG_MAX`` per doubling (a power below the
    ``EXPONENT_TOL`` resolution) are fitted against ``log n`` and reported
    as logarithmic growth; faster growth is fitted against ``n``. A smaller ``rho`` is a convergent sequence of order
    ``-log2(rho)``; its Richardson-extrapolated limits are fitted instead
    and must be flat for a ``bounded`` verdict.
    """
    fit = fit_growth(ns, ratios)
    rho = _increment_rate(ratios)
    if rho is None:
        return classify_growth(fit), fit, ""
    if rho >= RHO_DIVERGENT:
        note = f"no convergence (increment ratio {rho:.4f})"
        lfit = fit_growth(np.log(np.asarray(ns, dtype=float)), ratios)
        log_like = lfit.exponent > EXPONENT_TOL and lfit.residual < RESIDUAL_MAX
        if rho <= RHO_LOG_MAX and log_like:
            return "unbounded", lfit, note + "; logarithmic growth, fitted against log n"
        if fit.exponent > EXPONENT_TOL and fit.residual < RESIDUAL_MAX:
            return "unbounded", fit, note
        if log_like:
            return "unbounded", lfit, note + "; logarithmic growth, fitted against log n"
        return "inconclusive", fit, note
    r = np.asarray(ratios, dtype=float)[-TAIL_LEVELS:]
    limits = r[1:] + np.diff(r) * rho / (1.0 - rho)
    efit = fit_growth(ns[-TAIL_LEVELS + 1 :], limits)
    note = f"converging at order {-np.log2(rho):.3f}; extrapolated limit {limits[-1]:.6g}"
    return classify_growth(efit), efit, note


def _levels(n0: int, levels: int) -> list[int]:
    if levels < 4:
        raise InvalidParamsError("need at least 4 refinement levels")
    return [n0 * 2**k for k in range(levels)]


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else float("nan")


def _sweep(apply, family, mp, ns, ell):
    """Max ratio per level, the witness's own ratios, and non-integrability notes.

    ``apply(f, source)`` applies the operator; when exact cell integration
    finds the input non-integrable the midpoint samples are used instead,
    so the report still shows the growth.
    """
    witness = family.extremal() or family.members[0]
    per_level, witness_ratios, notes = [], [], []
    diverged = False
    for n in ns:
        g = make_grid(0.0, ell, n)
        best = 0.0
        for m in family.regular():
            f = m.sample(g)
            try:
                out = apply(f, m.source(g))
            except NonIntegrableInputError as exc:
                diverged = True
                note = f"{m.name}: non-integrable input ({exc})"
                if note not in notes:
                    notes.append(note)
                out = apply(f, None)
            r = _ratio(morrey_norm(out, mp), morrey_norm(f, mp))
            best = max(best, r)
            if m is witness:
                witness_ratios.append(r)
        per_level.append((n, best))
    return per_level, witness, witness_ratios, notes, diverged


def _verdict(ns, per_level, witness, witness_ratios, notes, diverged):
    ratios = [r for _, r in per_level]
    verdict, fit, note = classify_levels(ns, ratios)
    if note:
        notes.append(note)
    wv, wfit, wnote = classify_levels(ns, witness_ratios)
    if wv == "unbounded" and verdict != "unbounded":
        verdict, fit = wv, wfit
        notes.append(f"{witness.name} grows: {wnote}")
    if diverged and verdict != "unbounded":
        verdict = "unbounded"
        if fit.exponent <= EXPONENT_TOL:
            fit = GrowthFit(float("inf"), fit.log_constant, 0.0)
    return verdict, fit, float(max(ratios))


# ---------------------------------------------------------------------------
# Hardy operators


def _hardy_prediction(p, lam, hp: HardyParams):
    if hp.beta is not None:
        w = power(hp.beta)
        bound = hardy_bound(p, lam, hp.beta, hp.direction)
        return hardy_prediction(w, p, lam, hp.direction), (bound if np.isfinite(bound) else None)
    return hardy_prediction(hp.weight, p, lam, hp.direction), None


def probe_hardy(
    p: float,
    lam: float,
    hp: HardyParams,
    family: TestFamily | None = None,
    levels: int = 5,
    n0: int = 256,
    ell: float = 1.0,
) -> ExperimentReport:
    """Sup of ``||H f|| / ||f||`` over the family at each level, with a growth verdict.

    ``paper_bound`` is the closed-form norm bound in the power case.
    Weights whose indices fall in the gap between the necessary and the
    sufficient conditions carry the prediction ``"undetermined"``.
    """
    mp = MorreyParams(p, lam)
    family = family or interval_family(p, lam)
    ns = _levels(n0, levels)
    per_level, witness, wr, notes, diverged = _sweep(
        lambda f, src: hardy_apply(hp, f, source=src), family, mp, ns, ell
    )
    verdict, fit, constant = _verdict(ns, per_level, witness, wr, notes, diverged)
    prediction, bound = _hardy_prediction(p, lam, hp)
    if prediction == "undetermined":
        notes.append("paper-undetermined: index conditions leave this weight in the gap")
    params = {"p": p, "lambda": lam, "upper": float(hp.direction == "upper")}
    if hp.beta is not None:
        params["beta"] = hp.beta
    else:
        params.update(alpha=hp.weight.alpha, log_power=hp.weight.beta)
    return ExperimentReport(
        name=f"hardy_{hp.direction}",
        params=params,
        per_level=per_level,
        growth=fit,
        verdict=verdict,
        constant_estimate=constant,
        paper_bound=bound,
        prediction=prediction,
        notes="; ".join(notes),
        seed=family.seed,
    )


# ---------------------------------------------------------------------------
# weighted singular operator


def _rho(w, x0):
    return w if isinstance(w, NodeWeight) else NodeWeight.single(w, x0)


def _singular_prediction(w, p, lam):
    specs = w.specs if isinstance(w, NodeWeight) else (w,)
    margin = min(check_admissible(spec, p, lam)[1] for spec in specs)
    return ("bounded" if margin > STRICT_TOL else "unbounded"), margin


def probe_weighted_singular(
    p: float,
    lam: float,
    w,
    x0: float = 0.0,
    family: TestFamily | None = None,
    levels: int = 5,
    n0: int = 256,
    ell: float = 1.0,
) -> ExperimentReport:
    """Ratios ``||rho H(f/rho)|| / ||f||`` under refinement on ``[0, ell]``.

    ``w`` is a :class:`WeightSpec` centred at ``x0`` or a :class:`NodeWeight`
    (``x0`` ignored). A member for which ``f/rho`` is not integrable makes
    the verdict ``unbounded`` and is named in the notes.
    """
    mp = MorreyParams(p, lam)
    family = family or interval_family(p, lam)
    rho = _rho(w, x0)
    ns = _levels(n0, levels)
    per_level, witness, wr, notes, diverged = _sweep(
        lambda f, src: weighted_singular_apply(rho, x0, f, source=src), family, mp, ns, ell
    )
    verdict, fit, constant = _verdict(ns, per_level, witness, wr, notes, diverged)
    prediction, margin = _singular_prediction(w, p, lam)
    params = {"p": p, "lambda": lam}
    if isinstance(w, WeightSpec):
        params.update(alpha=w.alpha, x0=x0)
    else:
        for k, (spec, node) in enumerate(zip(w.specs, w.nodes), 1):
            params.update({f"alpha{k}": spec.alpha, f"x{k}": node})
    params["margin"] = margin
    return ExperimentReport(
        name="weighted_singular",
        params=params,
        per_level=per_level,
        growth=fit,
        verdict=verdict,
        constant_estimate=constant,
        prediction=prediction,
        notes="; ".join(notes),
        seed=family.seed,
    )


def threshold_sweep(
    p: float,
    lam: float,
    alphas,
    levels: int = 5,
    n0: int = 256,
    workers: int = 1,
) -> list[ExperimentReport]:
    """One weighted-singular report per power exponent, sorted by ``alpha``.

    The exponents should straddle both ends of the window
    ``((lam - 1)/p, lam/p + 1 - 1/p)``.
    """
    alphas = sorted(float(a) for a in alphas)

    def run(a):
        rep = probe_weighted_singular(p, lam, power(a), 0.0, None, levels, n0)
        return ExperimentReport(**{**rep.__dict__, "name": f"threshold_alpha={a:+.3f}"})

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, alphas))
    return [run(a) for a in alphas]


def bounded_window(reports) -> list[float]:
    """Exponents whose sweep verdict is ``bounded``."""
    return [r.params["alpha"] for r in reports if r.verdict == "bounded"]


# ---------------------------------------------------------------------------
# curves: maximal, sharp maximal, Cauchy


def _curve_levels(kind, params, ns):
    return [generate(kind, params, n) for n in ns]


def _doubling_verdict(ns, ratios):
    """``bounded`` when no doubling raises the ratio by more than 10%."""
    r = np.asarray(ratios, dtype=float)
    steps = r[1:] / r[:-1]
    fit = fit_growth(ns, ratios) if len(ns) >= 3 else GrowthFit(
        float(np.log(r[-1] / r[0]) / np.log(ns[-1] / ns[0])), float(np.log(r[0])), 0.0
    )
    return ("bounded" if np.all(steps < DOUBLING_GROWTH_MAX) else "unbounded"), fit, steps


def verify_alvarez_perez(
    curve: str | DiscretizedCurve,
    s: float = 0.5,
    family: TestFamily | None = None,
    levels=(256, 512, 1024),
    params: dict | None = None,
) -> ExperimentReport:
    """Per-level ``max_t M#(|S f|**s)(t) / (M f(t))**s`` over the family.

    ``M#`` acts on the staggered curve where ``S f`` lives; ``M f`` is
    evaluated at the same points from the original samples with the same
    radii. Verdict ``bounded`` when each doubling raises the ratio by less
    than 10%.
    """
    if not 0.0 < s < 1.0:
        raise InvalidParamsError(f"need 0 < s < 1, got {s}")
    kind = curve if isinstance(curve, str) else curve.family
    family = family or circle_harmonics()
    ns = list(levels)
    per_level = []
    for n in ns:
        c = generate(kind, params, n)
        radii = maximal_radii(c)
        best = 0.0
        for m in family.regular():
            f = m.sample(c)
            sf = cauchy_apply(c, f)
            g = sf.with_values(np.abs(np.asarray(sf.values)) ** s)
            sharp = np.asarray(sharp_maximal_apply(sf.domain, g, radii).values)
            mf = maximal_apply(c, f, radii, centers=sf.domain.points)
            keep = mf > 0
            best = max(best, float(np.max(sharp[keep] / mf[keep] ** s)))
        per_level.append((n, best))
    ratios = [r for _, r in per_level]
    verdict, fit, steps = _doubling_verdict(ns, ratios)
    notes = "doubling factors " + ", ".join(f"{x:.4f}" for x in steps)
    if s >= 0.9:
        notes += "; s near 1: reported only"
    return ExperimentReport(
        name=f"alvarez_perez_{kind}",
        params={"s": s},
        per_level=per_level,
        growth=fit,
        verdict=verdict,
        constant_estimate=float(max(ratios)),
        prediction=None if s >= 0.9 else "bounded",
        notes=notes,
        seed=family.seed,
    )


def fefferman_stein_lp(c: DiscretizedCurve, f: SampledFunction, w: SampledFunction, p: float, radii=None) -> float:
    """``int (Mf)**p w / int f**p Mw``; the weighted inequality asserts at most a constant."""
    radii = maximal_radii(c) if radii is None else radii
    mf = np.asarray(maximal_apply(c, f, radii).values)
    mw = np.asarray(maximal_apply(c, w, radii).values)
    wt = np.asarray(c.weights)
    lhs = np.sum(mf**p * np.abs(w.values) * wt)
    rhs = np.sum(np.abs(f.values) ** p * mw * wt)
    return float(lhs / rhs)


def verify_fefferman_stein(
    curve: str | DiscretizedCurve,
    p: float,
    lam: float,
    family: TestFamily | None = None,
    levels=(256, 512, 1024),
    params: dict | None = None,
) -> ExperimentReport:
    """``max_f ||Mf||_{p,lam} / ||M#f||_{p,lam}`` per level.

    Members with ``M#f = 0`` (constants) are excluded and named in the
    notes. The weighted L^p form ``int (Mf)^p w <= int f^p Mw`` is checked
    with ``w = Mg`` for every pair of members; its worst ratio is noted.
    """
    kind = curve if isinstance(curve, str) else curve.family
    family = family or jump_family()
    mp = MorreyParams(p, lam)
    ns = list(levels)
    per_level, excluded = [], set()
    worst_lp = 0.0
    for n in ns:
        c = generate(kind, params, n)
        radii = maximal_radii(c)
        best = 0.0
        samples = [(m, m.sample(c)) for m in family.regular()]
        for m, f in samples:
            sharp = sharp_maximal_apply(c, f, radii)
            den = morrey_norm(sharp, mp)
            if den <= 1e-12 * max(1.0, lp_norm(f, p)):
                excluded.add(m.name)
                continue
            best = max(best, morrey_norm(maximal_apply(c, f, radii), mp) / den)
        if n == ns[0]:
            for _, f in samples:
                for _, g in samples:
                    w = maximal_apply(c, g, radii)
                    worst_lp = max(worst_lp, fefferman_stein_lp(c, f.abs(), w, p, radii))
        per_level.append((n, best))
    ratios = [r for _, r in per_level]
    verdict, fit, steps = _doubling_verdict(ns, ratios)
    notes = [f"weighted L^p ratio max {worst_lp:.4g}"]
    if excluded:
        notes.append("excluded (zero sharp maximal function): " + ", ".join(sorted(excluded)))
    return ExperimentReport(
        name=f"fefferman_stein_{kind}",
        params={"p": p, "lambda": lam},
        per_level=per_level,
        growth=fit,
        verdict=verdict,
        constant_estimate=float(max(ratios)),
        prediction="bounded",
        notes="; ".join(notes),
        seed=family.seed,
    )


def verify_morrey_boundedness_maximal(
    curve: str | DiscretizedCurve,
    p: float,
    lam: float,
    family: TestFamily | None = None,
    levels=(256, 512, 1024),
    params: dict | None = None,
) -> list[ExperimentReport]:
    """Ratio sweeps for ``M`` and ``S`` on a curve; one report per operator."""
    if not p > 1.0:
        raise InvalidParamsError(f"maximal and singular operators need p > 1, got {p}")
    kind = curve if isinstance(curve, str) else curve.family
    family = family or jump_family()
    mp = MorreyParams(p, lam)
    ns = list(levels)
    rows = {"maximal": [], "cauchy": []}
    for n in ns:
        c = generate(kind, params, n)
        radii = maximal_radii(c)
        best_m = best_s = 0.0
        for m in family.regular():
            f = m.sample(c)
            nf = morrey_norm(f, mp)
            best_m = max(best_m, morrey_norm(maximal_apply(c, f, radii), mp) / nf)
            best_s = max(best_s, morrey_norm(cauchy_apply(c, f), mp) / nf)
        rows["maximal"].append((n, best_m))
        rows["cauchy"].append((n, best_s))
    out = []
    for op, per_level in rows.items():
        ratios = [r for _, r in per_level]
        verdict, fit, steps = _doubling_verdict(ns, ratios)
        out.append(
            ExperimentReport(
                name=f"{op}_morrey_{kind}",
                params={"p": p, "lambda": lam},
                per_level=per_level,
                growth=fit,
                verdict=verdict,
                constant_estimate=float(max(ratios)),
                prediction="bounded",
                notes="doubling factors " + ", ".join(f"{x:.4f}" for x in steps),
                seed=family.seed,
            )
        )
    return out
