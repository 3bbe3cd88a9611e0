import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from z2graze import (AmbiguousClassification, DivisionDegenerate, FilippovSystem, SmoothField,
                     classify_point, find_tangencies, fold_offset, pseudo_equilibria,
                     sliding_field, sliding_segments, sliding_velocity, thompson_hunt)
from z2graze._poly import Poly

from conftest import THETA

X, Y, A1, A2 = Poly.variables()


def pair(fu, gu, fl, gl):
    c = lambda v: v if isinstance(v, Poly) else Poly.const(float(v))  # noqa: E731
    return FilippovSystem(SmoothField(c(fu), c(gu)), SmoothField(c(fl), c(gl)))


CONST = pair(1, -1, 1, 1)


def beta_form(b1):
    """Oscillator at alpha1 = -b1, shifted so the upper fold is at 0."""
    sys = thompson_hunt(-1.0, THETA)
    alpha = (-b1, 0.0)
    return sys.translated(fold_offset(sys, alpha)), alpha


def test_constant_system_slides():
    for x0 in (-3.0, 0.0, 2.5):
        assert classify_point(CONST, x0).kind == "SlidingStable"


def test_parabola_crossing_and_fold_fold(parabola):
    assert classify_point(parabola, 0.5).kind == "Crossing"
    c = classify_point(parabola, 0.0)
    assert c.kind == "Tangency"
    t = c.tangency
    assert t.side == "both" and t.fold_fold
    assert t.visible == {"upper": True, "lower": True}


def test_sliding_velocity_examples():
    assert sliding_velocity(CONST, 0.0) == 1.0
    assert sliding_velocity(pair(2, -1, 0, 1), 0.0) == 1.0


def test_division_degenerate():
    with pytest.raises(DivisionDegenerate):
        sliding_velocity(pair(1, 1, 1, 1), 0.0)


def test_degenerate_tangency_is_ambiguous():
    # g = x^2 has a double zero at the origin: |Zh| = 0 and Z^2 h = 0
    sys = pair(1, X**2, -1, X**2)
    with pytest.raises(AmbiguousClassification):
        classify_point(sys, 0.0)


def test_boundary_equilibrium():
    sys = pair(X, X, -X, X)
    assert classify_point(sys, 0.0).kind == "BoundaryEquilibrium"


def test_tangencies(parabola, oscillator):
    recs = find_tangencies(parabola, (-1, 1))
    assert len(recs) == 1 and recs[0].x == 0.0 and recs[0].fold_fold
    recs = find_tangencies(oscillator, (-1, 1))
    assert len(recs) == 1 and abs(recs[0].x) <= 1e-12 and recs[0].fold_fold
    assert recs[0].visible == {"upper": True, "lower": True}


@pytest.mark.parametrize("b1", [0.01, -0.01])
def test_beta_form_regular_folds(b1):
    sys, alpha = beta_form(b1)
    recs = find_tangencies(sys, (-1, 1), alpha)
    assert len(recs) == 2
    got = sorted((r.x, r.side) for r in recs)
    want = sorted([(0.0, "upper"), (-2 * b1, "lower")])
    for (x, s), (xe, se) in zip(got, want):
        assert s == se and x == pytest.approx(xe, abs=1e-12)
        assert not recs[0].fold_fold
    for r in recs:
        g = sys.side(r.side)(r.x, 0.0, alpha)[1]
        assert abs(g) <= 1e-12


@pytest.mark.parametrize("b1", [0.02, -0.02])
def test_midpoint_pseudo_saddle(b1):
    sys, alpha = beta_form(b1)
    assert sliding_velocity(sys, -b1, alpha) == pytest.approx(0.0, abs=1e-14)
    segs = sliding_segments(sys, (-1, 1), alpha)
    assert len(segs) == 1
    lo, hi, stable = segs[0]
    assert stable == (b1 > 0)
    peq = pseudo_equilibria(sys, (lo, hi), alpha)
    assert len(peq) == 1
    assert peq[0].x == pytest.approx(-b1, abs=1e-12)
    assert peq[0].stability == "PseudoSaddle"


def test_pseudo_equilibria_simple():
    assert pseudo_equilibria(CONST, (-1, 1)) == []
    sys = pair(-X, -1, -X, 1)
    peq = pseudo_equilibria(sys, (-1, 1))
    assert len(peq) == 1 and abs(peq[0].x) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(st.floats(-0.5, 0.5, allow_nan=False), st.floats(-0.05, 0.05, allow_nan=False))
def test_partition_and_sliding_tangency(x0, b1):
    sys, alpha = beta_form(b1)
    folds = [0.0, -2 * b1]
    if min(abs(x0 - f) for f in folds) < 1e-8:
        return
    c = classify_point(sys, x0, alpha)
    gp, gm = c.zh_upper, c.zh_lower
    flags = [gp * gm > 0, gp < 0 < gm, gm < 0 < gp]
    assert sum(flags) == 1
    assert c.kind == ("Crossing", "SlidingStable", "SlidingUnstable")[flags.index(True)]
    if c.kind != "Crossing":
        assert abs(sliding_field(sys, x0, alpha)[1]) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.5, 0.5, allow_nan=False), st.floats(-0.05, 0.05, allow_nan=False))
def test_z2_covariance(d, b1):
    sys, alpha = beta_form(b1)
    c = -fold_offset(thompson_hunt(-1.0, THETA), alpha)
    if min(abs(c + d - f) for f in (0.0, -2 * b1)) < 1e-8:
        return
    a = classify_point(sys, c + d, alpha)
    r = classify_point(sys, c - d, alpha)
    assert a.kind == r.kind
    # Z-(c - d) = -Z+(c + d) about the symmetry centre
    assert a.zh_upper == pytest.approx(-r.zh_lower, abs=1e-12)
    assert a.zh_lower == pytest.approx(-r.zh_upper, abs=1e-12)


def test_serialization(parabola):
    d = find_tangencies(parabola, (-1, 1))[0].to_dict()
    assert d["description"] == "fold-fold (visible-visible)"
