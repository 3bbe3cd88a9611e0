"""Quantities integrated along the unperturbed grazing cycle.

All weighted integrals are carried as augmented states of the cycle
integration. With ``L' = sgn * div`` along the run, the weight
``exp(int_t^T div)`` equals ``exp(L(T) - L(t))`` in both time directions, so
every weighted integral is ``exp(L(T)) * K(T)`` where ``K' = exp(-L) * I``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels as K
from .errors import HyperbolicityViolated, NotGrazing
from .fields import FilippovSystem
from .hybrid import Section, run_kernel
from .options import PRECISE, IntegratorOptions

ORIGIN_TOL = 1e-10
CLOSURE_TOL = 1e-9


@dataclass(frozen=True)
class GrazingCycleData:
    """Sampled grazing cycle of the upper field through the origin.

    ``quad_full``, ``quad_plus`` and ``quad_minus`` hold the augmented
    quadrature states ``(L, K1, K2, Kn)`` at the end of the full period, the
    forward run to the section, and the backward run to the section.
    """

    t: np.ndarray
    gamma: np.ndarray
    log_weight: np.ndarray
    period: float
    section: tuple
    section_window: float
    tau_plus: float
    tau_minus: float
    closure: float
    diameter: float
    quad_full: np.ndarray
    quad_plus: np.ndarray
    quad_minus: np.ndarray
    opts: IntegratorOptions = field(default=PRECISE)

    @property
    def section_line(self) -> Section:
        """Horizontal section through ``(a, b)`` limited to a window around ``a``."""
        a, b = self.section
        return Section("horizontal", b, a - self.section_window, a + self.section_window, 1)

    def summary(self) -> dict:
        return {"period": self.period, "section": list(self.section),
                "tau_plus": self.tau_plus, "tau_minus": self.tau_minus,
                "closure": self.closure, "diameter": self.diameter,
                "n_samples": int(len(self.t))}


def _check_h1(sys, alpha):
    j = sys.upper.jet(0.0, 0.0, alpha)
    f0, g0, gx = j[0, 0], j[1, 0], j[1, 1]
    if not (f0 > 0 and abs(g0) <= ORIGIN_TOL and gx > 0):
        raise NotGrazing("origin is not a visible fold with f > 0 and g_x > 0",
                         f=float(f0), g=float(g0), g_x=float(gx))


def grazing_cycle(sys: FilippovSystem, alpha=(0.0, 0.0), opts: IntegratorOptions = PRECISE,
                  t_budget: float = 200.0, section_phase: float = 0.25) -> GrazingCycleData:
    """Integrate the upper field from the origin once around its cycle.

    The section point is the cycle point at phase ``section_phase * T0``
    after the origin, provided ``g+ > 0`` there; otherwise the sample with
    the largest ``g+`` is used.

    Raises
    ------
    NotGrazing
        If the origin is not a suitable fold or the orbit does not close.
    """
    _check_h1(sys, alpha)
    ret = [K.EV_VLINE, 0.0, 1.0, -np.inf, np.inf, 0.0]
    res = run_kernel(sys, K.MODE_QUAD, 0, [0, 0, 0, 0, 0, 0], t_budget, alpha, opts, [ret],
                     record=True)
    if res.status != K.STATUS_EVENT:
        raise NotGrazing("orbit from the origin does not return", t_budget=t_budget)
    closure = float(np.hypot(res.state[0], res.state[1]))
    if closure > CLOSURE_TOL:
        raise NotGrazing("orbit through the origin is not closed", closure=closure)
    T0 = float(res.t)
    t, S = res.times, res.states
    gamma = S[:, :2]
    diameter = float(max(np.ptp(gamma[:, 0]), np.ptp(gamma[:, 1])))

    mid = run_kernel(sys, K.MODE_PLANAR, 0, [0.0, 0.0], section_phase * T0, alpha, opts)
    a, b = map(float, mid.state[:2])
    if not sys.upper(a, b, alpha)[1] > 1e-6:
        gs = np.array([sys.upper(p[0], p[1], alpha)[1] for p in gamma])
        k = int(np.argmax(gs))
        a, b = map(float, gamma[k])
    window = 0.25 * diameter
    row = [K.EV_HLINE, b, 1.0, a - window, a + window, 0.0]
    plus = run_kernel(sys, K.MODE_QUAD, 0, [0, 0, 0, 0, 0, 0], t_budget, alpha, opts, [row])
    row[2] = -1.0
    minus = run_kernel(sys, K.MODE_QUAD, 0, [0, 0, 0, 0, 0, 0], t_budget, alpha, opts, [row], sgn=-1.0)
    if plus.status != K.STATUS_EVENT or minus.status != K.STATUS_EVENT:
        raise NotGrazing("section is not reached from the origin")
    return GrazingCycleData(
        t=t, gamma=gamma, log_weight=S[:, 2], period=T0, section=(a, b), section_window=window,
        tau_plus=float(plus.t), tau_minus=-float(minus.t), closure=closure, diameter=diameter,
        quad_full=res.state[2:].copy(), quad_plus=plus.state[2:].copy(),
        quad_minus=minus.state[2:].copy(), opts=opts)


def floquet(gcd: GrazingCycleData, sys: FilippovSystem | None = None):
    """``lambda(0)`` and ``lambda(t)`` on the sample grid.

    Returns
    -------
    (float, ndarray)
    """
    L_T = gcd.quad_full[0]
    lam_t = np.exp(L_T - gcd.log_weight)
    lam_t[-1] = 1.0
    return float(np.exp(L_T)), lam_t


def melnikov_kappas(gcd: GrazingCycleData, sys: FilippovSystem | None = None):
    """``(kappa1, kappa2, nu)`` over one period with the ``lambda(t)`` weight."""
    w = np.exp(gcd.quad_full[0])
    k1, k2, nu = w * gcd.quad_full[1:]
    return float(k1), float(k2), float(nu)


@dataclass(frozen=True)
class OriginData:
    f: float
    g_x: float
    g_alpha: tuple
    g_section: float


def origin_data(gcd: GrazingCycleData, sys: FilippovSystem) -> OriginData:
    j = sys.upper.jet(0.0, 0.0, (0.0, 0.0))
    a, b = gcd.section
    return OriginData(float(j[0, 0]), float(j[1, 1]), (float(j[1, 3]), float(j[1, 4])),
                      float(sys.upper(a, b, (0.0, 0.0))[1]))


def transversality(kappa1: float, kappa2: float, sys: FilippovSystem) -> float:
    """``kappa1 g_a2 - kappa2 g_a1`` with the parameter partials at the origin."""
    j = sys.upper.jet(0.0, 0.0, (0.0, 0.0))
    return float(kappa1 * j[1, 4] - kappa2 * j[1, 3])


@dataclass(frozen=True)
class PartialCoefficients:
    lambda_pm0: tuple
    kappa_pm: tuple
    nu_pm: tuple
    A1_pm: tuple
    A2_pm: tuple
    B_pm: tuple


def partial_coefficients(gcd: GrazingCycleData, sys: FilippovSystem) -> PartialCoefficients:
    """One-sided quantities between the origin and the section.

    ``kappa_pm`` is ``((k1+, k2+), (k1-, k2-))``. The backward integrals run
    from 0 down to ``tau_minus < 0``, which contributes the sign of ``dt``.
    """
    od = origin_data(gcd, sys)
    lam0, _ = floquet(gcd)
    k1, k2, nu = melnikov_kappas(gcd)
    ga1, ga2 = od.g_alpha
    gx, f0, gab = od.g_x, od.f, od.g_section
    lam, kap, nus = [], [], []
    for q, sgn in ((gcd.quad_plus, 1.0), (gcd.quad_minus, -1.0)):
        w = np.exp(q[0])
        lam.append(float(w))
        kap.append((float(sgn * w * q[1]), float(sgn * w * q[2])))
        nus.append(float(sgn * w * q[3]))
    T = k1 * ga2 - k2 * ga1
    A1, A2, B = [], [], []
    for s in range(2):
        k1s, k2s = kap[s]
        if T != 0.0:
            a1 = nus[s] / gab - (k1s * (nu * ga2 + k2 * gx) - k2s * (nu * ga1 + k1 * gx)) / (gab * T)
            a2 = (k2s * ga1 - k1s * ga2) * f0 * (1.0 - lam0) / (gab * T)
        else:
            a1 = a2 = float("nan")
        A1.append(float(a1))
        A2.append(float(a2))
        B.append(float(gx * lam[s] / (2.0 * gab)))
    return PartialCoefficients(tuple(lam), tuple(kap), tuple(nus), tuple(A1), tuple(A2), tuple(B))


def beta_jacobian(q: "IntrinsicQuantities", sys: FilippovSystem | None = None) -> np.ndarray:
    """Jacobian of ``alpha -> (phi1, phi2)`` at ``alpha = 0``.

    Raises
    ------
    HyperbolicityViolated
        If ``|lambda(0) - 1| < 1e-6``.
    """
    if abs(q.lambda0 - 1.0) < 1e-6:
        raise HyperbolicityViolated("lambda(0) is too close to 1", lambda0=q.lambda0)
    ga1, ga2 = q.g_alpha
    gx, f0 = q.g_x, q.f0
    den = f0 * (1.0 - q.lambda0)
    return np.array([
        [-ga1 / gx, -ga2 / gx],
        [(q.nu * ga1 / gx + q.kappa1) / den, (q.nu * ga2 / gx + q.kappa2) / den],
    ])


@dataclass(frozen=True)
class IntrinsicQuantities:
    """Every scalar of the unfolding analysis plus origin and section data.

    ``errors`` holds tolerance-comparison error estimates keyed by field
    name when they were requested.
    """

    lambda0: float
    kappa1: float
    kappa2: float
    nu: float
    lambda_pm0: tuple
    kappa_pm: tuple
    nu_pm: tuple
    A1_pm: tuple
    A2_pm: tuple
    B_pm: tuple
    f0: float
    g_x: float
    g_alpha: tuple
    g_section: float
    section: tuple
    period: float
    transversality: float
    errors: dict = field(default_factory=dict)

    def identity_residuals(self) -> dict:
        """Residuals of the exact relations between one-sided quantities."""
        lp, lm = self.lambda_pm0
        lam = self.lambda0
        (k1p, k2p), (k1m, k2m) = self.kappa_pm
        nup, num = self.nu_pm
        dA2 = lm * (lam - 1) * self.f0 / self.g_section
        dB = lm * (lam - 1) * self.g_x / (2 * self.g_section)

        def rel(a, b):
            return abs(a - b) / max(abs(b), 1e-300)

        return {
            "A1_difference": abs(self.A1_pm[0] - self.A1_pm[1]),
            "lambda_ratio": abs(lm * lam / lp - 1.0),
            "A2_difference_rel": rel(self.A2_pm[0] - self.A2_pm[1], dA2),
            "B_difference_rel": rel(self.B_pm[0] - self.B_pm[1], dB),
            "kappa1_minus_rel": rel(k1m, k1p - self.kappa1 * lm),
            "kappa2_minus_rel": rel(k2m, k2p - self.kappa2 * lm),
            "nu_minus_rel": rel(num, nup - self.nu * lm),
        }

    def sign_checks(self) -> dict:
        """Sign relations that hold for a stable cycle."""
        return {
            "B_plus_positive": self.B_pm[0] > 0,
            "B_minus_positive": self.B_pm[1] > 0,
            "A2_difference_negative": self.A2_pm[0] - self.A2_pm[1] < 0,
            "B_difference_negative": self.B_pm[0] - self.B_pm[1] < 0,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = [list(x) if isinstance(x, tuple) else x for x in v]
        return d


_ERROR_FIELDS = ("lambda0", "kappa1", "kappa2", "nu")


def _assemble(gcd, sys):
    lam0, _ = floquet(gcd)
    k1, k2, nu = melnikov_kappas(gcd)
    pc = partial_coefficients(gcd, sys)
    od = origin_data(gcd, sys)
    return IntrinsicQuantities(
        lambda0=lam0, kappa1=k1, kappa2=k2, nu=nu, lambda_pm0=pc.lambda_pm0,
        kappa_pm=pc.kappa_pm, nu_pm=pc.nu_pm, A1_pm=pc.A1_pm, A2_pm=pc.A2_pm, B_pm=pc.B_pm,
        f0=od.f, g_x=od.g_x, g_alpha=od.g_alpha, g_section=od.g_section, section=gcd.section,
        period=gcd.period, transversality=transversality(k1, k2, sys))


def intrinsic_quantities(gcd: GrazingCycleData, sys: FilippovSystem, error_estimate: bool = False,
                         coarse_factor: float = 10.0) -> IntrinsicQuantities:
    """Collect all quantities from a grazing cycle.

    With ``error_estimate`` the cycle is recomputed at tolerances
    ``coarse_factor`` times looser and the differences, floored at a few
    ulps, are reported in ``errors``.
    """
    q = _assemble(gcd, sys)
    if not error_estimate:
        return q
    o = gcd.opts
    coarse = o.with_(rel_tol=o.rel_tol * coarse_factor, abs_tol=o.abs_tol * coarse_factor)
    qc = _assemble(grazing_cycle(sys, (0.0, 0.0), coarse), sys)
    errs = {}
    for name in _ERROR_FIELDS:
        a, b = getattr(q, name), getattr(qc, name)
        errs[name] = max(abs(a - b), 64 * np.finfo(float).eps * abs(a), 1e-15)
    for name in ("kappa_pm", "nu_pm", "lambda_pm0", "A1_pm", "A2_pm", "B_pm"):
        a = np.ravel(getattr(q, name))
        b = np.ravel(getattr(qc, name))
        errs[name] = np.maximum(np.abs(a - b), np.maximum(64 * np.finfo(float).eps * np.abs(a), 1e-15)).tolist()
    return IntrinsicQuantities(**{**{k: getattr(q, k) for k in q.__dataclass_fields__}, "errors": errs})
