import numpy as np
import pytest

from morrey_lab.curves import arc_ball, arc_chord_trend, ball, diagnostics, generate, load_curve
from morrey_lab.errors import (
    CurveFileError,
    EmptyRadiiError,
    IndexOutOfRangeError,
    InvalidCountError,
    InvalidParamsError,
    UnknownFamilyError,
)
from morrey_lab.numerics import classify_growth


def test_segment_points():
    c = generate("segment", {"length": 1}, 16)
    assert c.size == 16
    assert np.allclose(np.imag(c.points), 0)
    assert c.total_length == pytest.approx(1.0)
    assert not c.closed


def test_circle_length():
    c = generate("circle", {"radius": 1}, 256)
    assert abs(c.total_length - 2 * np.pi) < 1e-9
    assert c.closed


@pytest.mark.parametrize("kind", ["segment", "circle", "lipschitz_graph", "log_spiral_arc", "cusp"])
def test_curve_invariants(kind):
    c = generate(kind, None, 200)
    chords = np.abs(np.diff(c.points))
    arcs = np.diff(c.arc_nodes)
    assert np.all(chords <= arcs + 1e-9 * c.total_length)
    assert abs(np.sum(c.weights) - c.total_length) <= 1e-9 * c.total_length
    assert np.all(np.diff(c.arc_nodes) > 0)


def test_generate_errors():
    with pytest.raises(UnknownFamilyError):
        generate("ellipse", None, 32)
    with pytest.raises(InvalidParamsError):
        generate("circle", {"radius": -1}, 32)
    with pytest.raises(InvalidParamsError):
        generate("cusp", {"a": 0.5}, 32)
    with pytest.raises(InvalidCountError):
        generate("segment", None, 4)


def test_cusp_arc_chord_diverges():
    consts, fit = arc_chord_trend("cusp", {"a": 2, "length": 1}, [64, 128, 256, 512])
    assert consts[-1] > 4 * consts[0]
    assert classify_growth(fit) == "unbounded"


def test_segment_carleson():
    d = diagnostics(generate("segment", {"length": 1}, 256))
    assert abs(d.carleson_constant - 2) <= 0.05 * 2
    assert d.arc_chord_constant == pytest.approx(1.0, abs=1e-9)


def test_circle_constants():
    d = diagnostics(generate("circle", {"radius": 1}, 256))
    assert abs(d.carleson_constant - np.pi) <= 0.05 * np.pi
    assert abs(d.arc_chord_constant - np.pi / 2) <= 0.05 * np.pi / 2


def test_cusp_order():
    d = diagnostics(generate("cusp", {"a": 2, "length": 1}, 512))
    assert abs(d.cusp_order_estimate - 2) <= 0.2


@pytest.mark.parametrize("n", [128, 256, 512])
def test_circle_segment_constants_across_n(n):
    seg = diagnostics(generate("segment", None, n))
    circ = diagnostics(generate("circle", None, n))
    assert abs(seg.carleson_constant - 2) <= 0.1
    assert abs(circ.carleson_constant - np.pi) <= 0.05 * np.pi
    assert abs(circ.arc_chord_constant - np.pi / 2) <= 0.05 * np.pi / 2


@pytest.mark.parametrize("kind", ["segment", "circle", "lipschitz_graph", "log_spiral_arc"])
def test_constants_stabilize(kind):
    a = diagnostics(generate(kind, None, 256))
    b = diagnostics(generate(kind, None, 512))
    assert abs(b.carleson_constant - a.carleson_constant) <= 0.02 * a.carleson_constant
    assert abs(b.arc_chord_constant - a.arc_chord_constant) <= 0.02 * a.arc_chord_constant


def test_diagnostic_lower_bounds():
    for kind in ("segment", "circle", "lipschitz_graph", "cusp"):
        d = diagnostics(generate(kind, None, 128))
        assert d.carleson_constant >= 1
        assert d.arc_chord_constant >= 1


def test_empty_radii():
    with pytest.raises(EmptyRadiiError):
        diagnostics(generate("circle", None, 64), radii=[])


def test_ball_examples():
    c = generate("circle", {"radius": 1}, 128)
    assert len(ball(c, 5, 3.0)) == 128
    s = generate("segment", {"length": 1}, 64)
    assert list(ball(s, 10, 1e-6)) == [10]
    s = generate("segment", {"length": 1}, 100)
    idx = ball(s, 50, 0.25)
    measure = np.sum(s.weights[idx])
    assert abs(measure - 0.5) <= s.weights[0] + 1e-12


def test_ball_index_error():
    with pytest.raises(IndexOutOfRangeError):
        ball(generate("segment", None, 16), 16, 0.1)


def test_arc_ball_inclusions():
    s = generate("segment", None, 64)
    for r in (0.01, 0.1, 0.4):
        assert set(arc_ball(s, 20, r)) == set(ball(s, 20, r))
    for kind in ("circle", "lipschitz_graph", "cusp"):
        c = generate(kind, None, 128)
        for t in (0, 31, 64, 100):
            for r in (0.05, 0.3, 1.0):
                assert set(arc_ball(c, t, r)) <= set(ball(c, t, r))


def test_cusp_strict_inclusion():
    c = generate("cusp", {"a": 2, "length": 1}, 256)
    t = 127  # just beside the cusp point
    r = 0.05
    assert set(arc_ball(c, t, r)) < set(ball(c, t, r))


def test_ball_monotone_in_r():
    c = generate("lipschitz_graph", None, 128)
    radii = [0.01, 0.05, 0.2, 0.5, 2.0]
    for fn in (ball, arc_ball):
        sets = [set(fn(c, 40, r)) for r in radii]
        assert all(a <= b for a, b in zip(sets, sets[1:]))


def test_load_curve(tmp_path):
    s = np.linspace(0, 1, 33)
    path = tmp_path / "curve.txt"
    path.write_text("# s x y\n" + "\n".join(f"{a} {a} 0" for a in s))
    c = load_curve(path)
    # samples are cell midpoints, so half a cell is added at each end
    assert c.total_length == pytest.approx(1.0 + 1 / 32)
    np.testing.assert_allclose(c.arc_nodes, s)
    bad = tmp_path / "bad.txt"
    bad.write_text("0 0 0\n0.1 1 0\n0.2 1.1 0\n")
    with pytest.raises(CurveFileError):
        load_curve(bad)
