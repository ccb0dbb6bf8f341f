import numpy as np
import pytest

from morrey_lab.curves import generate
from morrey_lab.errors import InvalidParamsError
from morrey_lab.experiments import (
    DEFAULT_SEED,
    TestFamily,
    bounded_window,
    bump_member,
    circle_harmonics,
    classify_levels,
    constant_member,
    fefferman_stein_lp,
    interval_family,
    jump_family,
    jump_member,
    probe_hardy,
    probe_weighted_singular,
    threshold_sweep,
    verify_alvarez_perez,
    verify_fefferman_stein,
    verify_morrey_boundedness_maximal,
)
from morrey_lab.numerics import EXPONENT_TOL, RESIDUAL_MAX
from morrey_lab.operators import HardyParams, arc_indicator
from morrey_lab.weights import NodeWeight, check_admissible, power


def assert_verdict_invariant(rep):
    if rep.verdict == "unbounded":
        assert rep.growth.exponent > EXPONENT_TOL and rep.growth.residual < RESIDUAL_MAX
    if rep.verdict == "bounded":
        assert abs(rep.growth.exponent) <= EXPONENT_TOL


def test_family_members_and_seed():
    fam = interval_family(2, 0.5, gammas=(-0.3, 0.1))
    assert fam.seed == DEFAULT_SEED
    assert fam.extremal().name == "extremal(2,0.5)"
    flagged = [m.name for m in fam.members if m.divergent_probe]
    assert flagged == ["power(-0.3)"]
    with pytest.raises(InvalidParamsError):
        TestFamily(())


def test_classify_levels_cases():
    ns = [256, 512, 1024, 2048, 4096]
    assert classify_levels(ns, [2.0] * 5)[0] == "bounded"
    assert classify_levels(ns, [1.0, 1.5, 1.75, 1.875, 1.9375])[0] == "bounded"
    assert classify_levels(ns, [np.log(n) for n in ns])[0] == "unbounded"
    assert classify_levels(ns, [n**0.3 for n in ns])[0] == "unbounded"


def test_probe_hardy_bounded_with_bound():
    rep = probe_hardy(2, 0.5, HardyParams(beta=0.3))
    assert rep.verdict == "bounded" and rep.matches_prediction
    assert rep.paper_bound == pytest.approx(1 / 0.45)
    assert rep.constant_estimate <= rep.paper_bound * 1.05
    assert_verdict_invariant(rep)


def test_probe_hardy_outside_window():
    rep = probe_hardy(2, 0.5, HardyParams(beta=0.8))
    assert rep.verdict == "unbounded" and rep.prediction == "unbounded"
    assert_verdict_invariant(rep)


def test_probe_upper_hardy_boundary():
    rep = probe_hardy(2, 0.5, HardyParams(beta=-0.25, direction="upper"))
    assert rep.verdict == "unbounded" and rep.matches_prediction
    assert_verdict_invariant(rep)


def test_probe_hardy_levels():
    with pytest.raises(InvalidParamsError):
        probe_hardy(2, 0.5, HardyParams(beta=0.3), levels=3)


def test_probe_singular_inside_window():
    rep = probe_weighted_singular(2, 0.5, power(0.5))
    assert rep.verdict == "bounded"
    assert check_admissible(power(0.5), 2, 0.5)[0]
    assert rep.matches_prediction
    assert_verdict_invariant(rep)


@pytest.mark.parametrize("alpha", [-0.3, -0.25])
def test_probe_singular_lower_side(alpha):
    rep = probe_weighted_singular(2, 0.5, power(alpha))
    assert rep.verdict == "unbounded" and rep.matches_prediction
    assert_verdict_invariant(rep)


def test_probe_singular_boundary_is_log_growth():
    rep = probe_weighted_singular(2, 0.5, power(-0.25), levels=6)
    ratios = [r for _, r in rep.per_level]
    steps = np.diff(ratios)
    # increments stay roughly constant: growth linear in log n
    assert np.all(steps > 0)
    assert steps[-1] / steps[0] > 0.8


def test_threshold_sweep_example():
    alphas = [-0.4, -0.3, -0.2, 0.0, 0.5, 0.7, 0.8]
    reports = threshold_sweep(2, 0.5, alphas)
    assert bounded_window(reports) == [-0.2, 0.0, 0.5, 0.7]
    assert all(r.matches_prediction for r in reports)


def test_threshold_sweep_lambda_zero():
    reports = threshold_sweep(2, 0.0, [-0.6, 0.0, 0.6])
    assert bounded_window(reports) == [0.0]


def test_two_node_weight():
    w = NodeWeight((power(0.5), power(-0.2)), (1 / 3, 2 / 3))
    rep = probe_weighted_singular(2, 0.5, w)
    assert rep.verdict == "bounded" and rep.matches_prediction


def test_reports_deterministic():
    a = probe_hardy(2, 0.5, HardyParams(beta=0.3), levels=4)
    b = probe_hardy(2, 0.5, HardyParams(beta=0.3), levels=4)
    assert a.per_level == b.per_level and a.seed == b.seed


def test_alvarez_perez_circle():
    rep = verify_alvarez_perez("circle", 0.5, circle_harmonics())
    assert rep.verdict == "bounded"
    ratios = [r for _, r in rep.per_level]
    assert all(b / a < 1.10 for a, b in zip(ratios, ratios[1:]))


def test_alvarez_perez_segment_bump():
    rep = verify_alvarez_perez("segment", 0.5, TestFamily((bump_member(),)))
    assert rep.verdict == "bounded"


def test_alvarez_perez_near_one_is_report_only():
    rep = verify_alvarez_perez("circle", 0.9, circle_harmonics(2), levels=(128, 256, 512))
    assert rep.prediction is None and rep.matches_prediction is None


def test_alvarez_perez_bad_s():
    with pytest.raises(InvalidParamsError):
        verify_alvarez_perez("circle", 1.0)


def test_fefferman_stein_circle():
    rep = verify_fefferman_stein("circle", 2, 0.5, jump_family())
    assert rep.verdict == "bounded" and np.isfinite(rep.constant_estimate)


def test_fefferman_stein_excludes_constants():
    fam = TestFamily((jump_member(0.0, 0.5, "half"), constant_member()))
    rep = verify_fefferman_stein("circle", 2, 0.5, fam, levels=(128, 256, 512))
    assert "constant" in rep.notes and "excluded" in rep.notes


def test_fefferman_stein_weighted_lp_for_arc_indicator():
    c = generate("circle", None, 512)
    chi = arc_indicator(c, 0.5, 2.0)
    assert fefferman_stein_lp(c, chi, chi, 2) <= 1.0 + 1e-12


def test_maximal_and_cauchy_circle():
    reports = verify_morrey_boundedness_maximal("circle", 2, 0.5)
    assert {r.name for r in reports} == {"maximal_morrey_circle", "cauchy_morrey_circle"}
    assert all(r.verdict == "bounded" for r in reports)


def test_cauchy_segment_l2():
    reports = verify_morrey_boundedness_maximal("segment", 2, 0.0, jump_family())
    cauchy = next(r for r in reports if r.name.startswith("cauchy"))
    ratios = [r for _, r in cauchy.per_level]
    assert cauchy.verdict == "bounded" and ratios[-1] / ratios[-2] < 1.10


def test_maximal_rejects_p_one():
    with pytest.raises(InvalidParamsError):
        verify_morrey_boundedness_maximal("circle", 1.0, 0.5)
