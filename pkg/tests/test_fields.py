import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from z2graze import (NumericalError, SmoothField, eval_side, lie_derivatives, symmetrize,
                     thompson_hunt)
from z2graze._poly import Poly

from conftest import THETA

coord = st.floats(-2.0, 2.0, allow_nan=False)
par = st.floats(-0.1, 0.1, allow_nan=False)


def test_parabola_eval(parabola):
    assert np.array_equal(eval_side(parabola, (0.5, 0.0), "upper"), [1.0, 1.0])
    assert np.array_equal(eval_side(parabola, (0.5, 0.0), "lower"), [-1.0, 1.0])


def test_circle_eval_at_origin(circle):
    assert np.allclose(eval_side(circle, (0.0, 0.0), "upper"), [1.0, 0.0], atol=1e-15)


def test_symmetrize_examples():
    x, y, _, _ = Poly.variables()
    s = symmetrize(SmoothField(Poly.const(1.0), 2 * x))
    for p in [(0.3, -0.2), (-1.1, 0.7)]:
        assert np.allclose(s.lower(*p), [-1.0, 2 * p[0]])
    c = symmetrize(SmoothField(Poly.const(1.0), Poly.const(0.0)))
    assert np.allclose(c.lower(0.4, 0.4), [-1.0, 0.0])
    assert s.symmetric


def test_oscillator_lower_branch(oscillator):
    # reflected g picks up the sign pattern -1 - y in f
    for x, y in [(0.2, -0.3), (-0.5, -0.1)]:
        f, g = oscillator.lower(x, y)
        assert f == pytest.approx(-1 - y)
        assert g == pytest.approx(x - (-1.0) * y - THETA * y**3)


def test_lie_derivative_examples(parabola, circle):
    assert lie_derivatives(parabola, 0.0, "upper") == (0.0, 2.0)
    assert lie_derivatives(parabola, 0.0, "lower") == (0.0, -2.0)
    zh, z2h = lie_derivatives(circle, 0.0, "upper")
    assert zh == pytest.approx(0.0, abs=1e-15)
    assert z2h == pytest.approx(1.0)


def test_oscillator_origin_data(oscillator):
    j = oscillator.upper.jet(0.0, 0.0)
    assert j[0, 0] == 1.0            # f
    assert j[1, 3] == 1.0            # g_alpha1
    assert j[1, 4] == 0.0            # g_alpha2
    assert lie_derivatives(oscillator, 0.0, "upper") == (0.0, 1.0)


@pytest.mark.parametrize("name", ["circle", "parabola", "oscillator"])
def test_symmetry_defect(name, request):
    sys = request.getfixturevalue(name)
    for alpha in [(0.0, 0.0), (0.03, -0.02)]:
        assert sys.symmetry_defect(alpha, radius=1.5, n=9) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(coord, coord, par, par)
def test_partials_match_finite_differences(x, y, a1, a2):
    sys = thompson_hunt(-1.0, THETA)
    for side in ("upper", "lower"):
        fld = sys.side(side)
        exact = fld.partials(x, y, (a1, a2))
        fd = fld.partials_fd(x, y, (a1, a2))
        scale = np.maximum(np.abs(exact), 1.0)
        assert np.all(np.abs(exact - fd) <= 1e-6 * scale)


@settings(max_examples=40, deadline=None)
@given(coord, coord, par, par)
def test_circle_lower_partials_by_chain_rule(x, y, a1, a2):
    from z2graze import circle_system
    sys = circle_system()
    lo = sys.lower.partials(x, y, (a1, a2))
    up = sys.upper.partials(-x, -y, (a1, a2))
    # d/dx and d/dy keep their sign after two flips, parameter partials flip once
    assert np.allclose(lo[:, :2], up[:, :2], rtol=0, atol=1e-12)
    assert np.allclose(lo[:, 2:], -up[:, 2:], rtol=0, atol=1e-12)
    assert np.all(np.abs(lo - sys.lower.partials_fd(x, y, (a1, a2))) <= 1e-6 * np.maximum(np.abs(lo), 1))


def test_eval_deterministic(oscillator, rng):
    pts = rng.uniform(-1, 1, size=(20, 2))
    a = [oscillator.upper(*p, (0.01, 0.02)).tobytes() for p in pts]
    b = [oscillator.upper(*p, (0.01, 0.02)).tobytes() for p in pts]
    assert a == b


def test_nonfinite_raises(parabola):
    with pytest.raises(NumericalError):
        eval_side(parabola, (np.nan, 0.0), "upper")
    x, _, _, _ = Poly.variables()
    big = symmetrize(SmoothField(x**2, Poly.const(0.0)))
    with pytest.raises(NumericalError):
        big.upper(1e200, 0.0)


def test_from_terms_and_translation():
    fld = SmoothField.from_terms([[0, 0, 1.0]], [[1, 0, 2.0], [0, 0, 1, 0, 1.0]])
    assert np.allclose(fld(0.5, 0.0, (0.25, 0.0)), [1.0, 1.25])
    moved = fld.translated(0.5)
    assert np.allclose(moved(0.0, 0.0), fld(0.5, 0.0))
