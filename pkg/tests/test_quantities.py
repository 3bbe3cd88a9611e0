import numpy as np
import pytest

from z2graze import (PRECISE, FilippovSystem, HyperbolicityViolated, NotGrazing, beta_jacobian,
                     floquet, fold_offset, grazing_cycle, intrinsic_quantities, melnikov_kappas,
                     symmetrize, SmoothField)
from z2graze.cycles import cycle_offset
from z2graze.quantities import transversality
from z2graze._poly import Poly

LAM_CIRCLE = np.exp(-4 * np.pi)


@pytest.fixture(scope="module")
def circle_cycle(circle):
    return grazing_cycle(circle)


@pytest.fixture(scope="module")
def osc_cycle(oscillator):
    return grazing_cycle(oscillator)


@pytest.fixture(scope="module")
def circle_q(circle, circle_cycle):
    return intrinsic_quantities(circle_cycle, circle)


@pytest.fixture(scope="module")
def osc_q(oscillator, osc_cycle):
    return intrinsic_quantities(osc_cycle, oscillator, error_estimate=True)


def test_circle_cycle_data(circle_cycle):
    c = circle_cycle
    assert c.period == pytest.approx(2 * np.pi, abs=1e-8)
    assert np.hypot(*c.gamma[0]) <= 1e-10
    assert c.closure <= 1e-9
    assert c.tau_plus == pytest.approx(c.tau_minus + c.period, abs=1e-9)
    assert c.tau_plus > 0 > c.tau_minus
    # phase T0/4 after the origin is the rightmost point (1, 1)
    assert c.section == pytest.approx((1.0, 1.0), abs=1e-8)


def test_section_has_positive_g(oscillator, osc_cycle):
    a, b = osc_cycle.section
    assert oscillator.upper(a, b)[1] > 0
    assert osc_cycle.tau_plus == pytest.approx(osc_cycle.tau_minus + osc_cycle.period, abs=1e-9)


def test_parabola_not_grazing(parabola):
    with pytest.raises(NotGrazing):
        grazing_cycle(parabola)


def test_floquet_circle(circle_cycle):
    lam0, lam_t = floquet(circle_cycle)
    assert lam0 == pytest.approx(LAM_CIRCLE, rel=1e-6)
    assert lam_t[-1] == 1.0
    # divergence -2 on the cycle: lambda(t) = exp(-2 (T0 - t))
    t = circle_cycle.t
    assert np.allclose(lam_t, np.exp(-2 * (circle_cycle.period - t)), rtol=1e-7)


def test_golden_values(osc_cycle, osc_q, circle_q, baselines):
    th = baselines["thompson_hunt"]
    assert osc_cycle.period == pytest.approx(th["period"], rel=1e-8)
    assert osc_q.lambda0 == pytest.approx(th["lambda0"], rel=1e-8)
    assert osc_q.kappa2 == pytest.approx(th["kappa2"], rel=1e-8)
    assert circle_q.lambda0 == pytest.approx(baselines["circle"]["lambda0"], rel=1e-8)


def test_oscillator_claims(osc_q, oscillator):
    assert osc_q.lambda0 < 1
    assert osc_q.kappa2 > 0
    assert osc_q.transversality == pytest.approx(-osc_q.kappa2)
    assert transversality(0.0, 0.0, oscillator) == 0.0


def test_zero_family_has_zero_kappas():
    x, y, _, _ = Poly.variables()
    u, v = x, y - 1
    q = 1 - u**2 - v**2
    sys = symmetrize(SmoothField(-v + u * q, u + v * q))
    gcd = grazing_cycle(sys)
    k1, k2, nu = melnikov_kappas(gcd)
    assert k1 == 0.0 and k2 == 0.0
    from z2graze import circle_system
    _, _, nu_c = melnikov_kappas(grazing_cycle(circle_system()))
    assert nu == pytest.approx(nu_c, rel=1e-12)


@pytest.mark.parametrize("name", ["circle_q", "osc_q"])
def test_identity_suite(name, request):
    q = request.getfixturevalue(name)
    r = q.identity_residuals()
    assert r["A1_difference"] <= 1e-8
    for key in ("lambda_ratio", "A2_difference_rel", "B_difference_rel", "kappa1_minus_rel",
                "kappa2_minus_rel", "nu_minus_rel"):
        if key.startswith("kappa1") and name == "circle_q":
            continue  # both sides vanish identically
        assert r[key] <= 1e-8, key
    assert all(q.sign_checks().values())


def test_richardson_convergence(osc_q, oscillator):
    # a tighter run must agree with the default one to within the estimate
    tight = PRECISE.with_(rel_tol=1e-13, abs_tol=1e-15)
    qt = intrinsic_quantities(grazing_cycle(oscillator, opts=tight), oscillator)
    for name in ("lambda0", "kappa1", "kappa2", "nu"):
        assert abs(getattr(qt, name) - getattr(osc_q, name)) <= osc_q.errors[name], name


def test_beta_jacobian(osc_q, oscillator):
    J = beta_jacobian(osc_q)
    assert J[0] == pytest.approx([-1.0, 0.0])
    det = np.linalg.det(J)
    want = osc_q.transversality / (osc_q.f0 * osc_q.g_x * (1 - osc_q.lambda0))
    assert det == pytest.approx(want, rel=1e-12)
    # finite-difference oracle on the offset maps
    h = 1e-5
    fd = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        p = np.array([fold_offset(oscillator, e), cycle_offset(oscillator, e)])
        m = np.array([fold_offset(oscillator, -e), cycle_offset(oscillator, -e)])
        fd[:, j] = (p - m) / (2 * h)
    assert np.allclose(fd, J, rtol=1e-4, atol=1e-4 * np.max(np.abs(J)))


def test_hyperbolicity_guard(osc_q):
    from dataclasses import replace
    with pytest.raises(HyperbolicityViolated):
        beta_jacobian(replace(osc_q, lambda0=1.0 + 1e-7))


def test_predicted_coefficients_section_invariant(oscillator):
    from z2graze import predicted_coefficients
    a = intrinsic_quantities(grazing_cycle(oscillator, section_phase=0.25), oscillator)
    b = intrinsic_quantities(grazing_cycle(oscillator, section_phase=0.4), oscillator)
    assert a.section != pytest.approx(b.section)
    pa, pb = predicted_coefficients(a), predicted_coefficients(b)
    for k in pa:
        assert pa[k] == pytest.approx(pb[k], rel=1e-10)
    assert b.identity_residuals()["A1_difference"] <= 1e-8


def test_to_dict_is_json_ready(osc_q):
    import json
    d = osc_q.to_dict()
    json.dumps(d)
    assert isinstance(d["kappa_pm"][0], list)
