import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from z2graze import (DEFAULT, FilippovSystem, NoHit, Section, SmoothField, flow, fold_offset,
                     poincare_map, thompson_hunt)
from z2graze.hybrid import hit_section
from z2graze._poly import Poly

from conftest import THETA

X, Y, _, _ = Poly.variables()
ONE = Poly.const(1.0)
CONST = FilippovSystem(SmoothField(ONE, -ONE), SmoothField(ONE, ONE))
EPS = DEFAULT.eps_int


def test_parabola_single_upper_arc(parabola):
    tr = flow(parabola, (-1.0, 1.0), "upper", 0.9)
    assert tr.kinds() == ["Upper"]
    xy = tr.arcs[0].xy
    assert np.max(np.abs(xy[:, 1] - xy[:, 0] ** 2)) <= 1e-9
    assert tr.arcs[0].exit_event == "TimeOut"


def test_parabola_grazes_and_continues(parabola):
    tr = flow(parabola, (-1.0, 1.0), None, 2.5)
    graze = tr.events_of("Grazing")
    assert len(graze) == 1
    assert graze[0].t == pytest.approx(1.0, abs=1e-9)
    assert abs(graze[0].x) <= 1e-9 and abs(graze[0].y) <= 1e-9
    assert set(tr.kinds()) == {"Upper"}
    assert not tr.events_of("SlidingEntry") and not tr.events_of("BoundaryHit")
    assert tr.total_time == pytest.approx(2.5)
    assert tr.end[1] == pytest.approx(1.5**2, abs=1e-8)


def test_sliding_entry():
    tr = flow(CONST, (0.0, 0.5), None, 2.0)
    assert tr.kinds() == ["Upper", "Sliding"]
    hit = tr.events_of("SlidingEntry")[0]
    assert hit.x == pytest.approx(0.5, abs=1e-12) and hit.t == pytest.approx(0.5, abs=1e-12)
    sl = tr.arcs[1]
    assert np.all(sl.xy[:, 1] == 0.0)
    slope = np.diff(sl.xy[:, 0]) / np.diff(sl.t)
    assert np.allclose(slope, 1.0)


def test_shared_endpoints_and_monotone_time(oscillator):
    sysb = oscillator.translated(fold_offset(oscillator, (-0.02, 0.0)))
    tr = flow(sysb, (0.3, 0.0), "upper", 20.0, (-0.02, 0.0))
    assert len(tr.arcs) > 3
    for a, b in zip(tr.arcs[:-1], tr.arcs[1:]):
        assert np.max(np.abs(a.end - b.start)) <= EPS
        assert b.t[0] == pytest.approx(a.t[-1], abs=1e-14)
    t = tr.samples()[:, 0]
    assert np.all(np.diff(t) >= 0)
    for arc in tr.arcs:
        if arc.kind == "Upper":
            assert arc.xy[:, 1].min() >= -EPS
        elif arc.kind == "Lower":
            assert arc.xy[:, 1].max() <= EPS
        else:
            assert np.max(np.abs(arc.xy[:, 1])) <= EPS


@pytest.mark.parametrize("depth", [1e-2, 1e-4, 1e-6, 1e-8])
def test_shallow_dip_crosses_twice(depth):
    # continuous field: the orbit y = x^2 - depth dips below the boundary
    # for a time much shorter than one step
    sys = FilippovSystem(SmoothField(ONE, 2 * X), SmoothField(ONE, 2 * X))
    tr = flow(sys, (-1.0, 1.0 - depth), None, 2.0)
    hits = tr.events_of("BoundaryHit")
    assert tr.kinds() == ["Upper", "Lower", "Upper"]
    r = np.sqrt(depth)
    assert [h.x for h in hits] == pytest.approx([-r, r], abs=1e-10)


def test_circle_period(circle):
    sec = Section("vertical", 0.0, 1.0, 3.0, -1)
    t, p = hit_section(circle, (0.0, 2.0), "upper", sec)
    assert t == pytest.approx(2 * np.pi, abs=1e-8)
    assert p == pytest.approx([0.0, 2.0], abs=1e-8)


def test_section_examples(circle, parabola):
    t, p = hit_section(parabola, (-1.0, 1.0), "upper", Section("vertical", 0.0))
    assert t == pytest.approx(1.0, abs=1e-10) and p == pytest.approx([0.0, 0.0], abs=1e-10)
    # the top of the cycle is tangent to y = 2, so use the transversal x = 0 there
    t, p = hit_section(circle, (0.0, 0.0), "upper", Section("vertical", 0.0, 1.0, 3.0))
    assert t == pytest.approx(np.pi, abs=1e-8) and p == pytest.approx([0.0, 2.0], abs=1e-8)
    t, p = hit_section(circle, (0.0, 2.0), "upper", Section("horizontal", 0.0 + 1e-3, -0.5, 0.5),
                       direction="backward")
    assert t < 0
    with pytest.raises(NoHit):
        hit_section(circle, (0.0, 2.0), "upper", Section("horizontal", 5.0), t_budget=20.0)


def test_poincare_map_circle(circle):
    sec = Section("vertical", 0.0, 1.0, 3.0)
    y1, d = poincare_map(circle, sec, 2.0)
    assert y1 == pytest.approx(2.0, abs=1e-9)
    lam = np.exp(-4 * np.pi)
    assert d == pytest.approx(lam, rel=1e-3)
    y1, dq = poincare_map(circle, sec, 2.0, derivative="divergence")
    assert dq == pytest.approx(lam, rel=1e-6)
    up, _ = poincare_map(circle, sec, 2.1, derivative="none")
    lo, _ = poincare_map(circle, sec, 1.9, derivative="none")
    assert 2.0 < up < 2.1 and 1.9 < lo < 2.0


def test_first_integral_drift(parabola, circle):
    tr = flow(parabola, (-0.5, 0.7), "upper", 1.0)
    xy = tr.samples()[:, 1:]
    inv = xy[:, 1] - xy[:, 0] ** 2
    assert np.ptp(inv) <= 1e-9
    # the unit circle about (0, 1) is invariant
    tr = flow(circle, (1.0, 1.0), "upper", 1.0)
    xy = tr.samples()[:, 1:]
    r = np.hypot(xy[:, 0], xy[:, 1] - 1.0)
    assert np.max(np.abs(r - 1.0)) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(0.05, 0.9), st.floats(-0.03, 0.03))
def test_z2_flow_symmetry(x0, y0, a1):
    sys = thompson_hunt(-1.0, THETA)
    alpha = (a1, 0.0)
    fwd = flow(sys, (x0, y0), None, 8.0, alpha)
    mir = flow(sys, (-x0, -y0), None, 8.0, alpha)
    swap = {"Upper": "Lower", "Lower": "Upper", "Sliding": "Sliding"}
    assert [swap[k] for k in fwd.kinds()] == mir.kinds()
    for a, b in zip(fwd.events, mir.events):
        assert a.kind == b.kind
        assert abs(a.t - b.t) <= 10 * EPS
        assert abs(a.x + b.x) <= 10 * EPS and abs(a.y + b.y) <= 10 * EPS
    assert np.max(np.abs(fwd.end + mir.end)) <= 10 * EPS


def test_event_idempotence(oscillator):
    sysb = oscillator.translated(fold_offset(oscillator, (0.02, 0.0)))
    alpha = (0.02, 0.0)
    tr = flow(sysb, (0.3, 0.0), "upper", 20.0, alpha)
    for ev in tr.events[:6]:
        if ev.kind not in ("BoundaryHit", "SlidingEntry"):
            continue
        again = flow(sysb, (ev.x, ev.y), None, 1e-3, alpha)
        assert not again.events or again.events[0].t > 2 * DEFAULT.event_tol


def test_pseudo_equilibrium_stop():
    # sliding velocity -x on a stable segment: converges to the origin
    sys = FilippovSystem(SmoothField(-X, -ONE), SmoothField(-X, ONE))
    tr = flow(sys, (0.5, 0.0), "sliding", 100.0)
    assert tr.stopped == "PseudoEquilibrium"
    assert abs(tr.end[0]) < 1e-10


def test_csv_format(parabola):
    tr = flow(parabola, (-1.0, 1.0), None, 1.5)
    text = tr.to_csv()
    assert text.startswith("t,x,y,arc_kind,event\r\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert all(len(r) == 5 for r in rows)
    assert "Grazing" in {r[4] for r in rows}
    assert rows[-1][4] == "TimeOut"
    assert float(rows[-1][0]) == pytest.approx(1.5)
