import numpy as np
import pytest

from z2graze import (ConfigError, NoBracket, circle_system, find_theta, flow, grazing_cycle,
                     lie_derivatives, thompson_hunt)


def test_find_theta_golden(baselines):
    r = find_theta(-1.0)
    assert r.b == pytest.approx(baselines["thompson_hunt"]["theta"], abs=1e-11)
    assert abs(r.offset) <= 1e-9
    assert float(r) == r.b


def test_theta_orbit_closes(baselines):
    # independent check: the hybrid flow from the origin returns to it
    sys = thompson_hunt(-1.0, baselines["thompson_hunt"]["theta"])
    T = baselines["thompson_hunt"]["period"]
    tr = flow(sys, (0.0, 0.0), "upper", T)
    assert np.hypot(*tr.end) <= 1e-8


def test_find_theta_errors():
    with pytest.raises(ConfigError):
        find_theta(0.5)
    with pytest.raises(NoBracket) as exc:
        find_theta(-1.0, b_range=(2.0, 3.0), n_scan=5)
    assert len(exc.value.details["scan"]) >= 5


def test_find_theta_parallel_scan():
    assert find_theta(-1.0, jobs=2).b == pytest.approx(find_theta(-1.0).b, abs=1e-12)


def test_oscillator_fold_data():
    sys = thompson_hunt(-0.8, 0.3)
    assert lie_derivatives(sys, 0.0, "upper") == (0.0, 1.0)
    assert sys.upper(0.0, 0.0)[0] == 1.0
    for x, y in [(0.3, -0.2), (-0.1, -0.7)]:
        assert sys.lower(x, y)[0] == pytest.approx(-1 - y)


def test_circle_h1_data():
    j = circle_system().upper.jet(0.0, 0.0)
    assert j[0, 0] == 1.0 and j[1, 0] == 0.0 and j[1, 1] == 1.0
    assert grazing_cycle(circle_system()).period == pytest.approx(2 * np.pi, abs=1e-8)


@pytest.mark.parametrize("a", [-1.5, -1.0, -0.5])
def test_theta_derivative_stable_under_refinement(a):
    b0 = find_theta(a).b

    def theta(x):
        return find_theta(x, b_range=(b0 - 0.08, b0 + 0.08), n_scan=9).b

    d = [(theta(a + h) - theta(a - h)) / (2 * h) for h in (0.02, 0.01)]
    assert d[1] == pytest.approx(d[0], rel=0.01)
    assert d[1] < 0   # the locus moves to larger b as a decreases
