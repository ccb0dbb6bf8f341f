import numpy as np
import pytest

from morrey_lab.curves import generate
from morrey_lab.errors import (
    InvalidParamsError,
    MisalignedFunctionError,
    UnsupportedVariantError,
    WeightSingularAtNodeError,
)
from morrey_lab.morrey import MorreyParams, diagnose_membership, lp_norm, morrey_norm, weighted_morrey_norm
from morrey_lab.numerics import SampledFunction, make_grid, sample
from morrey_lab.weights import NodeWeight, power


def on_unit(n, func):
    return sample(make_grid(0.0, 1.0, n), func)


def test_constant_lambda_zero():
    f = on_unit(256, np.ones_like)
    assert morrey_norm(f, MorreyParams(1, 0.0)) == pytest.approx(1.0, abs=1e-6)


def test_constant_lambda_half():
    f = on_unit(256, np.ones_like)
    assert morrey_norm(f, MorreyParams(1, 0.5)) == pytest.approx(np.sqrt(2), rel=0.02)


def test_lambda_zero_full_radius_is_lp():
    f = on_unit(200, lambda x: 1 + np.sin(7 * x))
    assert morrey_norm(f, MorreyParams(3, 0.0)) == pytest.approx(lp_norm(f, 3), rel=1e-12)


def test_member_power_stable():
    mp = MorreyParams(2, 0.5)
    norms = [morrey_norm(on_unit(n, lambda x: x**-0.2), mp) for n in (256, 512, 1024, 2048)]
    assert np.all(np.isfinite(norms))
    assert norms[-1] / norms[-2] < 1.01


def test_params_validation():
    with pytest.raises(InvalidParamsError):
        MorreyParams(0.5, 0.2)
    with pytest.raises(InvalidParamsError):
        MorreyParams(2, 1.0)


def test_arc_variant_on_grid_rejected():
    with pytest.raises(UnsupportedVariantError):
        morrey_norm(on_unit(16, np.ones_like), MorreyParams(2, 0.5), variant="arc_ball")


def test_weight_singular_at_node():
    f = on_unit(5, np.ones_like)  # 0.5 is a node
    with pytest.raises(WeightSingularAtNodeError):
        weighted_morrey_norm(f, NodeWeight.single(power(-0.5), 0.5), MorreyParams(2, 0.5))


def test_misaligned_function():
    with pytest.raises(MisalignedFunctionError):
        SampledFunction(make_grid(0, 1, 16), np.ones(15))


def test_diagnose_nonmember_rate():
    v = diagnose_membership(lambda n: on_unit(n, lambda x: x**-0.3), MorreyParams(2, 0.5), levels=5)
    assert v.member == "no"
    assert abs(v.growth.exponent - (-0.3 * 2 + 1 - 0.5) / 2) < 0.02


def test_diagnose_log_boundary():
    v = diagnose_membership(lambda n: on_unit(n, lambda x: x**-0.25 * np.log(4 / x)), MorreyParams(2, 0.5), levels=5)
    assert v.member == "no"


def test_diagnose_member():
    v = diagnose_membership(lambda n: on_unit(n, lambda x: x**0.1), MorreyParams(2, 0.5), levels=4)
    assert v.member == "yes"
    assert v.growth.exponent < -0.02 or v.member != "no"


def test_diagnose_levels():
    with pytest.raises(InvalidParamsError):
        diagnose_membership(lambda n: on_unit(n, np.ones_like), MorreyParams(2, 0.5), levels=3)


def test_weighted_identity():
    f = on_unit(128, lambda x: np.cos(3 * x))
    mp = MorreyParams(2, 0.3)
    assert weighted_morrey_norm(f, NodeWeight.identity(), mp) == pytest.approx(morrey_norm(f, mp), rel=1e-14)


def test_weighted_cancellation():
    f = on_unit(512, lambda x: x**-0.5)
    got = weighted_morrey_norm(f, NodeWeight.single(power(0.5)), MorreyParams(2, 0.0))
    assert got == pytest.approx(1.0, abs=1e-3)


def test_weighted_extremal_finite():
    mp = MorreyParams(2, 0.5)
    rho = NodeWeight.single(power(0.3))
    vals = [weighted_morrey_norm(on_unit(n, lambda x: x**-0.25), rho, mp) for n in (256, 512, 1024)]
    assert vals[-1] / vals[-2] < 1.01


def test_homogeneity_and_monotonicity(rng):
    g = make_grid(0, 1, 97)
    mp = MorreyParams(2.5, 0.4)
    f = SampledFunction(g, rng.normal(size=97))
    c = -3.7
    assert morrey_norm(f.scaled(c), mp) == pytest.approx(abs(c) * morrey_norm(f, mp), rel=1e-13)
    bigger = SampledFunction(g, np.abs(f.values) + rng.uniform(0, 1, 97))
    assert morrey_norm(f, mp) <= morrey_norm(bigger, mp) + 1e-12


def test_power_identity(rng):
    g = make_grid(0, 1, 80)
    f = SampledFunction(g, rng.uniform(0.1, 2.0, 80))
    lhs = morrey_norm(f, MorreyParams(3.0, 0.3))
    rhs = morrey_norm(f.with_values(np.abs(f.values) ** 0.5), MorreyParams(6.0, 0.3)) ** 2
    assert abs(lhs - rhs) <= 1e-9 * lhs


@pytest.mark.parametrize("kind", ["circle", "lipschitz_graph", "cusp"])
def test_variant_inclusion(kind, rng):
    c = generate(kind, None, 128)
    f = SampledFunction(c, rng.uniform(0, 1, 128))
    mp = MorreyParams(2, 0.5)
    assert morrey_norm(f, mp, "arc_ball") <= morrey_norm(f, mp, "euclid_ball") + 1e-12


def test_variant_equality_on_segment():
    c = generate("segment", None, 256)
    f = SampledFunction(c, 1.0 + 0.5 * np.cos(np.asarray(c.arc_nodes)))
    mp = MorreyParams(2, 0.5)
    assert morrey_norm(f, mp, "arc_ball") == pytest.approx(morrey_norm(f, mp, "euclid_ball"), rel=1e-12)


@pytest.mark.parametrize("kind", ["circle", "lipschitz_graph"])
def test_variants_equivalent_on_arc_chord_curves(kind):
    # a chord ball of radius r sits inside the arc ball of radius k r
    from morrey_lab.curves import diagnostics

    c = generate(kind, None, 256)
    k = diagnostics(c).arc_chord_constant
    f = SampledFunction(c, 1.0 + 0.5 * np.cos(np.asarray(c.arc_nodes)))
    mp = MorreyParams(2, 0.5)
    a, e = morrey_norm(f, mp, "arc_ball"), morrey_norm(f, mp, "euclid_ball")
    assert a <= e + 1e-12
    assert e <= k ** (mp.lam / mp.p) * a * 1.02
