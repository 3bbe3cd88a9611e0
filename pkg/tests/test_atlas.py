import numpy as np
import pytest

from z2graze import (BoundaryCurve, IllConditioned, beta_to_alpha, crossing_cycles,
                     fit_quadratic, predicted_coefficients, to_beta_form, trace_boundary)
from z2graze.atlas import (EXPECTED, KINDS, check_ordering, default_grid, event_value,
                           sample_region)
from z2graze.quantities import IntrinsicQuantities


def fake_q(lam, gx=1.0, f=1.0):
    z = (0.0, 0.0)
    return IntrinsicQuantities(lam, 0, 0, 0, z, (z, z), z, z, z, z, f, gx, z, 1.0, z, 1.0, 0.0)


def test_predicted_sign_pattern():
    for lam in (1e-6, 0.2, 0.7, 0.999):
        c = predicted_coefficients(fake_q(lam))
        assert c["psi1"] > 0 and c["psi2"] > 0 and c["psi3"] < 0 and c["psi4"] > 0 and c["psi5"] < 0
        assert c["psi1"] > c["psi2"] > c["psi4"]
        assert c["psi3"] < c["psi5"]


def test_predicted_limits():
    c = predicted_coefficients(fake_q(0.0, gx=3.0, f=2.0))
    assert c["psi1"] == 0.0
    assert c["psi3"] == pytest.approx(-2 * 3.0 / 2.0)
    c = predicted_coefficients(fake_q(np.exp(-4 * np.pi)))
    assert c["psi3"] == pytest.approx(2 / (np.exp(-4 * np.pi) - 1))
    assert c["psi3"] == pytest.approx(-2.0000070, abs=1e-7)


def test_fit_quadratic_synthetic():
    b1 = -np.geomspace(1e-3, 1e-2, 8)
    assert fit_quadratic(np.column_stack([b1, 3 * b1**2])).coeff == pytest.approx(3.0, rel=1e-12)
    fit = fit_quadratic(np.column_stack([b1, 3 * b1**2 + b1**3]))
    assert abs(fit.coeff - 3.0) <= 1e-2
    assert abs(fit.linear) <= 1e-10


def test_fit_quadratic_ill_conditioned():
    b1 = np.geomspace(1e-3, 5e-3, 8)
    with pytest.raises(IllConditioned):
        fit_quadratic(np.column_stack([b1, b1**2]))
    with pytest.raises(IllConditioned):
        fit_quadratic([(1e-3, 1e-6), (1e-2, 1e-4)])


def test_beta_to_alpha(oscillator_unfolding):
    u = oscillator_unfolding
    assert np.allclose(beta_to_alpha(u.system, (0.0, 0.0), u), 0.0, atol=1e-12)
    for beta in [(-2e-3, 3e-6), (4e-3, -5e-6)]:
        alpha = beta_to_alpha(u.system, beta, u)
        bs = to_beta_form(u.system, alpha, u, seed=beta[1])
        assert bs.beta == pytest.approx(beta, abs=1e-8)
    # linear consistency with the inverse Jacobian
    h = 1e-6
    fd = np.column_stack([(beta_to_alpha(u.system, e, u) - beta_to_alpha(u.system, -e, u)) / (2 * h)
                          for e in (np.array([h, 0.0]), np.array([0.0, h]))])
    assert np.allclose(fd, np.linalg.inv(u.jacobian), rtol=1e-4, atol=1e-6)


def test_to_beta_form_translation(oscillator_unfolding):
    u = oscillator_unfolding
    bs = to_beta_form(u.system, (1e-3, 0.0), u)
    assert bs.beta1 == pytest.approx(-1e-3, rel=1e-6)
    assert abs(bs.system.upper(0.0, 0.0, bs.alpha)[1]) <= 1e-12
    assert abs(bs.system.lower(-2 * bs.beta1, 0.0, bs.alpha)[1]) <= 1e-12
    bs0 = to_beta_form(u.system, (0.0, 0.0), u)
    assert bs0.beta == pytest.approx((0.0, 0.0), abs=1e-9)


@pytest.fixture(scope="module")
def traced(oscillator_unfolding):
    grid = np.geomspace(2e-3, 4e-3, 2)
    out = {}
    for k in KINDS:
        g = -grid if k in ("psi1", "psi2", "psi4") else grid
        out[k] = trace_boundary(oscillator_unfolding, k, g)
    return out


def test_traced_points_satisfy_events(traced, oscillator_unfolding):
    u = oscillator_unfolding
    pred = predicted_coefficients(u.quantities)
    for k, c in traced.items():
        assert len(c.samples) == 2 and not c.skipped
        for (b1, b2), alpha in zip(c.samples, c.alphas):
            assert (b1 < 0) == (k in ("psi1", "psi2", "psi4"))
            assert b2 / b1**2 == pytest.approx(pred[k], rel=0.15)
            bs = to_beta_form(u.system, alpha, u, seed=b2)
            assert bs.beta == pytest.approx((b1, b2), abs=1e-12)
            assert abs(event_value(bs, k)) <= bs.band


def test_traced_ordering(traced):
    assert check_ordering(traced) == []


def test_psi1_has_double_root(traced, oscillator_unfolding):
    u = oscillator_unfolding
    c = traced["psi1"]
    bs = to_beta_form(u.system, c.alphas[0], u, seed=c.samples[0][1])
    roots = crossing_cycles(bs)
    assert len(roots) == 1 and roots[0].multiplicity == 2


def test_curve_serialization(traced):
    c = traced["psi3"]
    text = c.to_csv()
    lines = text.split("\r\n")
    assert lines[0] == "kind,beta1,beta2" and lines[1].startswith("psi3,")
    assert c.value_at(c.samples[0][0]) == c.samples[0][1]
    assert c.to_dict()["kind"] == "psi3"


def test_check_ordering_flags_violations():
    mk = lambda k, v: BoundaryCurve(k, [(-1e-3, v)])  # noqa: E731
    curves = {"psi1": mk("psi1", 1.0), "psi2": mk("psi2", 2.0), "psi4": mk("psi4", 0.5)}
    assert len(check_ordering(curves)) == 1


def test_default_grid(oscillator_unfolding, circle_unfolding):
    g = default_grid(oscillator_unfolding)
    d = oscillator_unfolding.cycle.diameter
    assert len(g) == 12 and g[-1] <= 5e-2 * d and g[-1] / g[0] == pytest.approx(50)
    # the strongly contracting circle cycle is capped far below the nominal top
    gc = default_grid(circle_unfolding)
    assert gc[-1] < 1e-2 * 5e-2 * circle_unfolding.cycle.diameter


@pytest.mark.parametrize("label,c", [("3g", 2.0), ("2a", None), ("4e", None)])
def test_region_examples(oscillator_unfolding, label, c):
    u = oscillator_unfolding
    p = predicted_coefficients(u.quantities)
    if label == "3g":
        beta = (3e-3, 2 * p["psi3"] * 9e-6)
    elif label == "2a":
        beta = (0.0, 1e-6)
    else:
        beta = (-3e-3, np.sqrt(p["psi2"] * p["psi4"]) * 9e-6)
    r = sample_region(u, label, beta)
    assert r.matches, r.note
    assert r.inventory.signature() == EXPECTED[label]
    if label == "2a":
        folds = [t for t in r.inventory.boundary["tangencies"] if abs(t["x"]) < 1e-9]
        assert folds and folds[0]["side"] == "both"
