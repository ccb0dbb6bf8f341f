"""Acceptance criteria 1-9, one pass/fail line each at the stated tolerance."""

import time

import numpy as np
import pytest

from morrey_lab.curves import arc_chord_trend, diagnostics, generate
from morrey_lab.experiments import (
    bounded_window,
    circle_harmonics,
    jump_family,
    probe_hardy,
    threshold_sweep,
    verify_alvarez_perez,
    verify_fefferman_stein,
)
from morrey_lab.morrey import MorreyParams, diagnose_membership, morrey_norm
from morrey_lab.numerics import SampledFunction, classify_growth, make_grid, sample
from morrey_lab.operators import HardyParams, cauchy_apply, hardy_apply, hardy_bound, hilbert_apply, kernel_domination_report
from morrey_lab.weights import check_zygmund, estimate_indices, power, power_log


def _extremal_ratio(p, lam, beta, n=8192):
    e = (lam - 1.0) / p
    g = make_grid(0.0, 1.0, n)
    f = sample(g, lambda x: x**e)
    out = hardy_apply(HardyParams(beta=beta), f, source=lambda t: t**e)
    mp = MorreyParams(p, lam)
    return morrey_norm(out, mp) / morrey_norm(f, mp)


HARDY_TRIPLES = [(2, 0.0, 0.0), (2, 0.0, 0.3), (2, 0.5, 0.0), (2, 0.5, 0.3), (2, 0.5, 0.5)]


def test_criterion_1_hardy_constant(record):
    ok, parts = True, []
    for p, lam, beta in HARDY_TRIPLES:
        t0 = time.perf_counter()
        bound = hardy_bound(p, lam, beta)
        rep = probe_hardy(p, lam, HardyParams(beta=beta), levels=5, n0=512)
        ext = _extremal_ratio(p, lam, beta)
        dt = time.perf_counter() - t0
        good = rep.constant_estimate <= 1.05 * bound and ext >= 0.5 * bound and dt < 30
        ok &= good
        parts.append(f"(lam={lam:g},beta={beta:g}) est {rep.constant_estimate:.4f} ext {ext:.4f} bound {bound:.4f} {dt:.1f}s")
    record(1, ok, "; ".join(parts))
    assert ok


def test_criterion_2_threshold_window(record):
    t0 = time.perf_counter()
    alphas = [round(a, 10) for a in np.arange(-0.4, 0.8001, 0.1)] + [-0.25]
    reports = threshold_sweep(2, 0.5, alphas)
    dt = time.perf_counter() - t0
    window = bounded_window(reports)
    want = [a for a in sorted(alphas) if -0.25 < a < 0.75]
    boundary = next(r for r in reports if abs(r.params["alpha"] + 0.25) < 1e-12)
    log_growth = boundary.verdict == "unbounded" and "logarithmic growth" in boundary.notes
    ok = np.allclose(window, want) and log_growth and dt < 300
    record(
        2,
        ok,
        f"bounded set {[round(a, 2) + 0.0 for a in window]}; alpha=-0.25 {boundary.verdict} "
        f"({'log growth' if log_growth else boundary.notes}); {dt:.1f}s",
    )
    assert ok


def test_criterion_3_power_membership(record):
    mp = MorreyParams(2, 0.5)
    cases = [
        ("x^-0.3", lambda x: x**-0.3, "no"),
        ("x^-0.25 ln(4/x)", lambda x: x**-0.25 * np.log(4 / x), "no"),
        ("x^-0.2", lambda x: x**-0.2, "yes"),
        ("x^0.1", lambda x: x**0.1, "yes"),
    ]
    ok, parts = True, []
    for name, func, want in cases:
        v = diagnose_membership(lambda n, func=func: sample(make_grid(0, 1, n), func), mp, levels=5)
        good = v.member == want
        if name == "x^-0.3":
            good &= abs(v.growth.exponent - (-0.05)) <= 0.02
            parts.append(f"{name} {v.member} (exponent {v.growth.exponent:.4f})")
        else:
            parts.append(f"{name} {v.member}")
        ok &= good
    record(3, ok, "; ".join(parts))
    assert ok


def test_criterion_4_hilbert_oracle(record):
    out = hilbert_apply(sample(make_grid(0, 1, 4096), np.ones_like), richardson=True)
    x = np.asarray(out.domain.nodes)
    err = float(np.max(np.abs(out.values - np.log((1 - x) / x) / np.pi)))
    ok = err < 1e-3
    record(4, ok, f"max interior error {err:.2e} at n=4096 with one Richardson step")
    assert ok


def test_criterion_5_circle_cauchy(record):
    c = generate("circle", {"radius": 1}, 1024)
    tau = np.asarray(c.staggered().points)

    def on(func):
        return SampledFunction(c, func(np.asarray(c.points)))

    # (1/pi) normalization: S1 = i, S tau^n = i sign(n) tau^n
    err_pi = float(np.max(np.abs(cauchy_apply(c, on(np.ones_like)).values - 1j)))
    # (1/(pi i)) normalization: S tau^n = sign(n) tau^n, S^2 = I
    err_pi_i = 0.0
    for n in [k for k in range(-8, 9) if k != 0]:
        f = on(lambda z, n=n: z**n)
        err_pi = max(err_pi, float(np.max(np.abs(cauchy_apply(c, f).values - 1j * np.sign(n) * tau**n))))
        got = cauchy_apply(c, f, normalization="pi_i").values
        err_pi_i = max(err_pi_i, float(np.max(np.abs(got - np.sign(n) * tau**n))))
    ok = err_pi < 2e-2 and err_pi_i < 2e-2
    record(
        5,
        ok,
        f"S(1)=i and S(tau^n)=i sign(n) tau^n with 1/pi: max error {err_pi:.2e}; "
        f"S(tau^n)=sign(n) tau^n with 1/(pi i): max error {err_pi_i:.2e}",
    )
    assert ok


def test_criterion_6_curve_diagnostics(record):
    seg = diagnostics(generate("segment", {"length": 1}, 512))
    circ = diagnostics(generate("circle", {"radius": 1}, 512))
    cusp = diagnostics(generate("cusp", {"a": 2, "length": 1}, 512))
    consts, fit = arc_chord_trend("cusp", {"a": 2, "length": 1}, [64, 128, 256, 512])
    checks = [
        abs(seg.carleson_constant - 2) <= 0.05 * 2,
        abs(circ.carleson_constant - np.pi) <= 0.05 * np.pi,
        abs(circ.arc_chord_constant - np.pi / 2) <= 0.05 * np.pi / 2,
        classify_growth(fit) == "unbounded",
        abs(cusp.cusp_order_estimate - 2) <= 0.2,
    ]
    ok = all(checks)
    record(
        6,
        ok,
        f"segment Carleson {seg.carleson_constant:.4f}; circle Carleson {circ.carleson_constant:.4f}, "
        f"arc-chord {circ.arc_chord_constant:.4f}; cusp arc-chord {consts[0]:.1f}->{consts[-1]:.1f} "
        f"(exponent {fit.exponent:.2f}), order {cusp.cusp_order_estimate:.3f}",
    )
    assert ok


def test_criterion_7_index_machinery(record):
    worst, disagreements, checked = 0.0, 0, 0
    for alpha in (-0.5, 0.0, 0.3, 0.5):
        for beta in (-1.0, 0.0, 2.0):
            w = power(alpha) if beta == 0.0 else power_log(alpha, beta, A=np.e)
            est = estimate_indices(w)
            worst = max(worst, abs(est.m_lower - alpha), abs(est.M_upper - alpha))
            for d in (0.05, 0.1, 0.3):
                for zb, zg in ((alpha - d, alpha + d), (alpha + d, alpha - d)):
                    in_b, in_g, _ = check_zygmund(w, zb, zg)
                    disagreements += (in_b != (alpha > zb)) + (in_g != (alpha < zg))
                    checked += 2
    ok = worst <= 0.02 and disagreements == 0
    record(7, ok, f"max index error {worst:.4f}; Zygmund disagreements {disagreements}/{checked} at margins >= 0.05")
    assert ok


def test_criterion_8_pointwise_estimates(record):
    t0 = time.perf_counter()
    parts, ok = [], True
    for name, w, cls in (("x^0.5", power(0.5), "V++"), ("x^-0.5", power(-0.5), "V-+"), ("ln(e/x)", power_log(0.0, 1.0), "V-+")):
        rep = kernel_domination_report(w, cls)
        ok &= rep.stable
        parts.append(f"{name} C={rep.min_constant:.4f} {'stable' if rep.stable else 'drifts'}")
    for kind in ("circle", "lipschitz_graph"):
        fam = circle_harmonics() if kind == "circle" else jump_family()
        ap = verify_alvarez_perez(kind, 0.5, fam, levels=(256, 512, 1024))
        fs = verify_fefferman_stein(kind, 2, 0.5, jump_family(), levels=(256, 512, 1024))
        for label, rep in (("AP", ap), ("FS", fs)):
            growth = rep.per_level[-1][1] / rep.per_level[-2][1]
            ok &= growth < 1.10
            parts.append(f"{label} {kind} x{growth:.4f} (512->1024)")
    dt = time.perf_counter() - t0
    ok &= dt < 600
    record(8, ok, "; ".join(parts) + f"; {dt:.1f}s")
    assert ok


def test_criterion_9_property_suite(record):
    rng = np.random.default_rng(20240229)
    kinds = ["segment", "circle", "lipschitz_graph", "log_spiral_arc", "cusp"]
    failures = {"homogeneity": 0, "monotone": 0, "power identity": 0, "inclusion": 0, "index shift": 0}
    for _ in range(100):
        p, lam, n = rng.uniform(1, 4), rng.uniform(0, 0.95), int(rng.integers(8, 97))
        mp = MorreyParams(p, lam)
        g = make_grid(0, 1, n)
        f = SampledFunction(g, rng.normal(size=n))
        c = rng.uniform(-10, 10)
        failures["homogeneity"] += not np.isclose(morrey_norm(f.scaled(c), mp), abs(c) * morrey_norm(f, mp), rtol=1e-12)
        bigger = f.with_values(np.abs(f.values) + rng.uniform(0, 1, n))
        failures["monotone"] += not morrey_norm(f, mp) <= morrey_norm(bigger, mp) + 1e-12
        pos = f.with_values(np.abs(f.values) + 0.01)
        lhs = morrey_norm(pos, mp)
        rhs = morrey_norm(pos.with_values(pos.values**0.5), MorreyParams(2 * p, lam)) ** 2
        failures["power identity"] += not abs(lhs - rhs) <= 1e-9 * lhs
        curve = generate(kinds[int(rng.integers(len(kinds)))], None, max(n, 16))
        fc = SampledFunction(curve, rng.normal(size=curve.size))
        failures["inclusion"] += not morrey_norm(fc, mp, "arc_ball") <= morrey_norm(fc, mp, "euclid_ball") * (1 + 1e-12)
        a = rng.uniform(-1, 1)
        w = power(a) if rng.uniform() < 0.5 else power_log(a, rng.uniform(-2, 2), A=rng.uniform(1.5, 10))
        shift = rng.uniform(-1, 1)
        base, moved = estimate_indices(w), estimate_indices(w.shifted(shift))
        failures["index shift"] += not (
            abs(moved.m_lower - shift - base.m_lower) <= 2e-2 and abs(moved.M_upper - shift - base.M_upper) <= 2e-2
        )
    ok = not any(failures.values())
    record(9, ok, "100 cases (seed 20240229); failures " + ", ".join(f"{k} {v}" for k, v in failures.items()))
    assert ok
