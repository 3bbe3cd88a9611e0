"""Reparameterization, boundary tracing and the two-parameter diagram.

An :class:`Unfolding` bundles the unperturbed grazing cycle, its intrinsic
quantities and the Jacobian of ``alpha -> beta``; every operation below
works relative to one.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .cycles import (BetaSystem, PortraitInventory, boundary_functions, classify_portrait,
                     cycle_offset, displacement_value, fold_offset, make_beta_system)
from .errors import (EventNotBracketed, HyperbolicityViolated, IllConditioned, NoConvergence,
                     NumericalError, RegionMismatch)
from .fields import FilippovSystem
from .options import PRECISE, IntegratorOptions
from .quantities import beta_jacobian, grazing_cycle, intrinsic_quantities

KINDS = ("psi1", "psi2", "psi3", "psi4", "psi5")
NEGATIVE_SIDE = ("psi1", "psi2", "psi4")


class Unfolding:
    """Analysis context for a system satisfying the grazing hypotheses.

    Parameters
    ----------
    sys : FilippovSystem
    opts : IntegratorOptions
        Tolerances for cycles, offsets and maps.
    eps1 : float, optional
        Displacement-domain radius; defaults to ``0.3 * diameter``.
    """

    def __init__(self, sys: FilippovSystem, opts: IntegratorOptions = PRECISE, eps1=None,
                 require_stable: bool = True):
        self.system = sys
        self.opts = opts
        self.cycle = grazing_cycle(sys, (0.0, 0.0), opts)
        self.quantities = intrinsic_quantities(self.cycle, sys)
        self.jacobian = beta_jacobian(self.quantities)
        if require_stable and not self.quantities.lambda0 < 1:
            raise HyperbolicityViolated("the diagram is built for a stable cycle (lambda(0) < 1)",
                                        lambda0=self.quantities.lambda0)
        if abs(np.linalg.det(self.jacobian)) < 1e-12:
            raise NumericalError("transversality fails: singular beta Jacobian")
        self.eps1 = 0.3 * self.cycle.diameter if eps1 is None else float(eps1)
        self._jinv = np.linalg.inv(self.jacobian)

    def __getstate__(self):
        return {"system": self.system, "opts": self.opts, "cycle": self.cycle,
                "quantities": self.quantities, "jacobian": self.jacobian, "eps1": self.eps1,
                "_jinv": self._jinv}

    def __setstate__(self, state):
        self.__dict__.update(state)

    # -- maps ------------------------------------------------------------

    def phi(self, alpha, seed: float = 0.0):
        return (fold_offset(self.system, alpha),
                cycle_offset(self.system, alpha, self.opts, seed))

    def beta_system(self, alpha, beta2=None, beta1=None) -> BetaSystem:
        return make_beta_system(self.system, alpha, self.cycle, beta2, self.opts, self.eps1, beta1)

    def alpha_on_fold_level(self, beta1: float, s: float) -> np.ndarray:
        """Point of the level set ``phi1 = beta1`` with linearized ``beta2 = s``.

        The linear preimage of ``(beta1, s)`` is corrected along the
        gradient of ``phi1`` so that the fold offset is exactly ``beta1``.
        """
        a = self._jinv @ np.array([beta1, s])
        m = self.jacobian[0] / float(self.jacobian[0] @ self.jacobian[0])
        t = 0.0
        for _ in range(30):
            r = fold_offset(self.system, a + t * m) - beta1
            if abs(r) <= 1e-15 + 1e-13 * abs(beta1):
                return a + t * m
            t -= r  # d phi1 / dt = 1 to first order
        raise NoConvergence("could not reach the fold level set", beta1=beta1, s=s)


def to_beta_form(sys, alpha, unfolding: Unfolding | None = None, seed: float = 0.0) -> BetaSystem:
    """Translated system and ``beta = (phi1(alpha), phi2(alpha))``."""
    u = unfolding or Unfolding(sys)
    alpha = np.ravel(np.asarray(alpha, dtype=float))
    b1 = fold_offset(u.system, alpha)
    b2 = cycle_offset(u.system, alpha, u.opts, seed)
    return u.beta_system(alpha, b2, b1)


def beta_to_alpha(sys, beta_target, unfolding: Unfolding | None = None, tol: float = 1e-10,
                  max_iter: int = 50, alpha0=None) -> np.ndarray:
    """Invert ``alpha -> beta`` by a chord iteration with the Jacobian at 0.

    Raises
    ------
    NoConvergence
    """
    u = unfolding or Unfolding(sys)
    target = np.asarray(beta_target, dtype=float)
    alpha = u._jinv @ target if alpha0 is None else np.asarray(alpha0, dtype=float)
    seed = float(target[1])
    for _ in range(max_iter):
        b = np.array(u.phi(alpha, seed))
        seed = b[1]
        r = b - target
        if np.max(np.abs(r)) <= tol:
            return alpha
        alpha = alpha - u._jinv @ r
    raise NoConvergence("beta_to_alpha did not converge", beta=target.tolist(), residual=r.tolist())


# -- coefficients and fits -------------------------------------------------

def predicted_coefficients(q) -> dict:
    """Quadratic coefficients ``c`` in ``beta2 ~ c beta1^2`` for the five curves."""
    lam, gx, f = q.lambda0, q.g_x, q.f0
    return {
        "psi1": 2 * lam * gx / ((lam - 1) ** 2 * f),
        "psi2": -2 * lam * gx / ((lam - 1) * f),
        "psi3": 2 * gx / ((lam - 1) * f),
        "psi4": -lam * gx / (2 * (lam - 1) * f),
        "psi5": gx / (2 * (lam - 1) * f),
    }


@dataclass
class FitResult:
    coeff: float
    residual: float
    n_used: int
    linear: float = float("nan")
    quad_with_linear: float = float("nan")


def fit_quadratic(samples, n_inner: int = 6, min_span: float = 10.0) -> FitResult:
    """Least-squares ``beta2 = c beta1^2`` on the innermost samples.

    Also reports the linear coefficient of a cubic fit over all samples,
    which measures departure from quadratic tangency.

    Raises
    ------
    IllConditioned
        If fewer than ``n_inner`` samples exist or ``|beta1|`` spans less
        than ``min_span``.
    """
    if isinstance(samples, BoundaryCurve):
        samples = samples.samples
    s = np.asarray(samples, dtype=float).reshape(-1, 2)
    if len(s) < n_inner:
        raise IllConditioned("too few samples for the fit", n=len(s))
    mag = np.abs(s[:, 0])
    if mag.min() <= 0 or mag.max() / mag.min() < min_span * (1 - 1e-9):
        raise IllConditioned("beta1 samples span too small a range",
                             span=float(mag.max() / max(mag.min(), 1e-300)))
    order = np.argsort(mag)
    inner = s[order[:n_inner]]
    x2 = inner[:, 0] ** 2
    c = float(x2 @ inner[:, 1] / (x2 @ x2))
    res = float(np.sqrt(np.mean((inner[:, 1] - c * x2) ** 2)))
    A = np.column_stack([s[:, 0], s[:, 0] ** 2, s[:, 0] ** 3])
    coef, *_ = np.linalg.lstsq(A, s[:, 1], rcond=None)
    return FitResult(c, res, n_inner, float(coef[0]), float(coef[1]))


# -- boundary tracing ------------------------------------------------------

@dataclass
class BoundaryCurve:
    kind: str
    samples: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    fitted_coeff: float = float("nan")
    predicted_coeff: float = float("nan")
    fit_residual: float = float("nan")
    linear_term: float = float("nan")

    @property
    def beta1(self):
        return np.array([p[0] for p in self.samples])

    @property
    def beta2(self):
        return np.array([p[1] for p in self.samples])

    def value_at(self, beta1: float) -> float:
        for b1, b2 in self.samples:
            if b1 == beta1:
                return b2
        raise KeyError(beta1)

    def to_dict(self):
        return {"kind": self.kind, "samples": [list(p) for p in self.samples],
                "alphas": [list(a) for a in self.alphas], "residuals": list(self.residuals),
                "skipped": list(self.skipped), "fitted_coeff": self.fitted_coeff,
                "predicted_coeff": self.predicted_coeff, "fit_residual": self.fit_residual,
                "linear_term": self.linear_term}

    def to_csv(self) -> str:
        lines = ["kind,beta1,beta2"]
        lines += [f"{self.kind},{b1!r},{b2!r}" for b1, b2 in self.samples]
        return "\r\n".join(lines) + "\r\n"


def _max_displacement(bs: BetaSystem, x_hint=None):
    """Maximum of ``D`` over the domain and its location."""
    lo = bs.x_left
    if x_hint is None:
        xs = lo + bs.eps1 * np.geomspace(1e-6, 1.0, 60)
        vals = []
        for x in xs:
            try:
                vals.append(displacement_value(bs, float(x)))
            except NumericalError:
                break
        k = int(np.argmax(vals))
        a = xs[max(k - 1, 0)]
        b = xs[min(k + 1, len(vals) - 1)]
    else:
        a, b = lo + 0.3 * (x_hint - lo), lo + 3.0 * (x_hint - lo)
    res = optimize.minimize_scalar(lambda u: -displacement_value(bs, u), bounds=(a, b),
                                   method="bounded", options={"xatol": 1e-10 * max(bs.scale_x, 1e-6)})
    if res.x - a < 1e-3 * (b - a) or b - res.x < 1e-3 * (b - a):
        if x_hint is not None:
            return _max_displacement(bs, None)
    return float(-res.fun), float(res.x)


def event_value(bs: BetaSystem, kind: str, cache=None) -> float:
    """Scalar whose zero defines the boundary ``kind`` at fixed ``beta1``."""
    if kind == "psi1":
        hint = cache.get("xmax") if cache is not None else None
        v, x = _max_displacement(bs, hint)
        if cache is not None:
            cache["xmax"] = x
        return v
    if kind == "psi2":
        return displacement_value(bs, -2.0 * bs.beta1)
    if kind == "psi3":
        return displacement_value(bs, 0.0)
    P, Q, _ = boundary_functions(bs)
    return P if kind == "psi4" else Q


def _trace_point(u: Unfolding, kind: str, b1: float, c_pred: float, xtol: float):
    cache = {}

    def alpha(s):
        return u.alpha_on_fold_level(b1, s)

    def beta2(s, seed=0.0):
        return cycle_offset(u.system, alpha(s), u.opts, seed)

    # axis point beta2 = 0 by secant in s
    s0, s1 = 0.0, c_pred * b1 * b1
    f0, f1 = beta2(s0), beta2(s1)
    for _ in range(30):
        if abs(f1) <= 1e-14 or f1 == f0:
            break
        s0, s1, f0 = s1, s1 - f1 * (s1 - s0) / (f1 - f0), f1
        f1 = beta2(s1)
    s_axis = s1

    def E(s):
        a = alpha(s)
        return event_value(u.beta_system(a, None, b1), kind, cache)

    e_axis = E(s_axis)
    step = c_pred * b1 * b1
    lo, elo = s_axis, e_axis
    hi = s_axis + 2.0 * step
    ehi = E(hi)
    for _ in range(8):
        if np.sign(ehi) != np.sign(elo):
            break
        lo, elo = hi, ehi
        hi = s_axis + 2.0 * (hi - s_axis)
        ehi = E(hi)
    else:
        raise EventNotBracketed(f"{kind} not bracketed", beta1=b1)
    if np.sign(ehi) == np.sign(elo):
        raise EventNotBracketed(f"{kind} not bracketed", beta1=b1)
    s_star = optimize.brentq(E, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
    a = alpha(s_star)
    b2 = cycle_offset(u.system, a, u.opts, s_star)
    resid = E(s_star)
    return (b1, float(b2)), [float(v) for v in a], float(resid)


def _trace_worker(args):
    u, kind, b1, c_pred, xtol = args
    try:
        return ("ok", _trace_point(u, kind, b1, c_pred, xtol))
    except NumericalError as exc:
        return ("skip", {"beta1": b1, "error": exc.code, "message": str(exc)})


def trace_boundary(sys_or_unfolding, kind: str, beta1_grid, jobs: int = 1, xtol: float = 1e-13) -> BoundaryCurve:
    """Trace one bifurcation boundary over a grid of ``beta1`` values.

    At each ``beta1`` the parameter moves along the level set of the fold
    offset; the defining scalar event is bracketed starting from the
    ``beta2 = 0`` axis, where its sign is known, and refined by Brent's
    method. Grid points that cannot be bracketed are skipped and listed.
    """
    u = sys_or_unfolding if isinstance(sys_or_unfolding, Unfolding) else Unfolding(sys_or_unfolding)
    if kind not in KINDS:
        raise ValueError(f"unknown boundary kind {kind!r}")
    grid = [float(b) for b in beta1_grid]
    want_neg = kind in NEGATIVE_SIDE
    for b in grid:
        if (b < 0) != want_neg or b == 0:
            raise ValueError(f"{kind} requires beta1 {'<' if want_neg else '>'} 0")
    c_pred = predicted_coefficients(u.quantities)[kind]
    tasks = [(u, kind, b, c_pred, xtol) for b in grid]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_trace_worker, tasks))
    else:
        results = [_trace_worker(t) for t in tasks]
    curve = BoundaryCurve(kind, predicted_coeff=c_pred)
    for status, payload in results:
        if status == "ok":
            pt, a, r = payload
            curve.samples.append(pt)
            curve.alphas.append(a)
            curve.residuals.append(r)
        else:
            curve.skipped.append(payload)
    if len(curve.samples) >= 6:
        try:
            fit = fit_quadratic(curve.samples)
            curve.fitted_coeff, curve.fit_residual, curve.linear_term = fit.coeff, fit.residual, fit.linear
        except IllConditioned:
            pass
    return curve


# -- regions ---------------------------------------------------------------

def _obj(t, stab, n=1, mult=1):
    return [(t, stab, mult)] * n


EXPECTED = {
    "1": _obj("grazing", "stable", 2),
    "2a": _obj("standard", "stable", 2),
    "2b": _obj("crossing", "stable"),
    "3a": _obj("standard", "stable", 2),
    "3b": _obj("grazing", "internally-stable", 2),
    "3c": _obj("sliding_one_zonal", "stable", 2),
    "3d": _obj("sliding_homoclinic", "", 2),
    "3e": _obj("sliding_two_zonal", "stable"),
    "3f": _obj("critical_crossing", "externally-stable"),
    "3g": _obj("crossing", "stable"),
    "4a": _obj("standard", "stable", 2),
    "4b": _obj("standard", "stable", 2) + _obj("crossing", "externally-stable", 1, 2),
    "4c": _obj("standard", "stable", 2) + _obj("crossing", "stable") + _obj("crossing", "unstable"),
    "4d": _obj("standard", "stable", 2) + _obj("critical_crossing", "externally-unstable")
    + _obj("crossing", "stable"),
    "4e": _obj("standard", "stable", 2) + _obj("sliding_two_zonal", "unstable") + _obj("crossing", "stable"),
    "4f": _obj("standard", "stable", 2) + _obj("sliding_homoclinic", "", 2) + _obj("crossing", "stable"),
    "4g": _obj("standard", "stable", 2) + _obj("sliding_one_zonal", "unstable", 2)
    + _obj("crossing", "stable"),
    "4h": _obj("grazing", "internally-stable", 2) + _obj("crossing", "stable"),
    "4i": _obj("crossing", "stable"),
}
EXPECTED = {k: sorted(v) for k, v in EXPECTED.items()}

OPEN_REGIONS = ("3a", "3c", "3e", "3g", "4a", "4c", "4e", "4g", "4i")
CURVE_CASES = ("1", "2a", "2b", "3b", "3d", "3f", "4b", "4d", "4f", "4h")
CURVE_OF = {"4b": "psi1", "4d": "psi2", "4f": "psi4", "3f": "psi3", "3d": "psi5"}


@dataclass
class RegionSample:
    label: str
    beta: tuple
    alpha: tuple
    inventory: PortraitInventory | None = None
    expected: list = field(default_factory=list)
    matches: bool | None = None
    note: str = ""

    def to_dict(self):
        return {"label": self.label, "beta": list(self.beta), "alpha": list(self.alpha),
                "inventory": self.inventory.to_dict() if self.inventory else None,
                "expected": [list(e) for e in self.expected], "matches": self.matches,
                "note": self.note}


def region_targets(curves: dict, b_neg: float, b_pos: float, b_axis_scale: float):
    """Target ``(beta, alpha or None)`` for each region and curve case.

    Open-region samples use the geometric mean of the bounding curves; a
    region bounded by the axis takes half the nearer curve, an unbounded
    region twice the outer one. Curve cases reuse the traced point.
    """
    def on(kind, b1):
        c = curves[kind]
        for (x, y), a in zip(c.samples, c.alphas):
            if x == b1:
                return y, a
        raise KeyError(f"{kind} was not traced at beta1={b1}")

    p1, a1 = on("psi1", b_neg)
    p2, a2 = on("psi2", b_neg)
    p4, a4 = on("psi4", b_neg)
    p3, a3 = on("psi3", b_pos)
    p5, a5 = on("psi5", b_pos)
    scale = b_axis_scale
    return {
        "1": ((0.0, 0.0), [0.0, 0.0]),
        "2a": ((0.0, scale), None),
        "2b": ((0.0, -scale), None),
        "3a": ((b_pos, abs(p3)), None),
        "3b": ((b_pos, 0.0), None),
        "3c": ((b_pos, 0.5 * p5), None),
        "3d": ((b_pos, p5), a5),
        "3e": ((b_pos, -np.sqrt(p3 * p5)), None),
        "3f": ((b_pos, p3), a3),
        "3g": ((b_pos, 2.0 * p3), None),
        "4a": ((b_neg, 2.0 * p1), None),
        "4b": ((b_neg, p1), a1),
        "4c": ((b_neg, np.sqrt(p1 * p2)), None),
        "4d": ((b_neg, p2), a2),
        "4e": ((b_neg, np.sqrt(p2 * p4)), None),
        "4f": ((b_neg, p4), a4),
        "4g": ((b_neg, 0.5 * p4), None),
        "4h": ((b_neg, 0.0), None),
        "4i": ((b_neg, -p1), None),
    }


def sample_region(u: Unfolding, label: str, beta, alpha=None, certify: bool = True) -> RegionSample:
    """Classify the portrait at one region sample and compare with the expectation."""
    beta = tuple(float(b) for b in beta)
    if alpha is None:
        alpha = beta_to_alpha(u.system, beta, u)
    alpha = np.asarray(alpha, dtype=float)
    bs = to_beta_form(u.system, alpha, u, seed=beta[1])
    if label in CURVE_OF or label in ("1",):
        # on a traced curve the event fixes the point; keep the computed beta
        pass
    inv = classify_portrait(bs, certify=certify)
    exp = EXPECTED[label]
    sig = inv.signature()
    ok = sig == exp and (inv.all_certified or not certify)
    return RegionSample(label, bs.beta, tuple(float(a) for a in alpha), inv, exp, ok,
                        "" if sig == exp else f"got {sig}")


def _region_worker(args):
    u, label, beta, alpha, certify = args
    try:
        return sample_region(u, label, beta, alpha, certify)
    except NumericalError as exc:
        return RegionSample(label, tuple(beta), tuple(alpha or (np.nan, np.nan)), None,
                            EXPECTED[label], False, f"{exc.code}: {exc}")


# -- diagram ---------------------------------------------------------------

@dataclass
class BifurcationDiagram:
    curves: dict
    regions: list
    comparison: dict
    quantities: object
    mismatches: list = field(default_factory=list)
    ordering_violations: list = field(default_factory=list)

    def to_dict(self):
        return {"curves": {k: c.to_dict() for k, c in self.curves.items()},
                "regions": [r.to_dict() for r in self.regions],
                "comparison": self.comparison,
                "quantities": self.quantities.to_dict(),
                "mismatches": list(self.mismatches),
                "ordering_violations": list(self.ordering_violations)}


def default_grid(u: Unfolding, n: int = 12, lo: float = 1e-3, hi: float = 5e-2) -> np.ndarray:
    """Log-spaced ``|beta1|`` magnitudes.

    The upper end is capped so that an orbit started ``~2 beta1^2`` off the
    cycle stays within a percent of its diameter when flowed backwards for
    most of a period, which matters for strongly contracting cycles.
    """
    d = u.cycle.diameter
    cap = np.sqrt(0.005 * d * u.quantities.lambda0 ** 0.75)
    top = min(hi * d, cap)
    return np.geomspace(top * lo / hi, top, n)


def check_ordering(curves: dict) -> list:
    """Grid points where the strict curve ordering fails."""
    bad = []
    neg = {k: dict(curves[k].samples) for k in NEGATIVE_SIDE if k in curves}
    pos = {k: dict(curves[k].samples) for k in ("psi3", "psi5") if k in curves}
    if len(neg) == 3:
        for b1 in sorted(set(neg["psi1"]) & set(neg["psi2"]) & set(neg["psi4"])):
            p1, p2, p4 = neg["psi1"][b1], neg["psi2"][b1], neg["psi4"][b1]
            if not (p1 > p2 > p4 > 0):
                bad.append({"beta1": b1, "psi1": p1, "psi2": p2, "psi4": p4})
    if len(pos) == 2:
        for b1 in sorted(set(pos["psi3"]) & set(pos["psi5"])):
            p3, p5 = pos["psi3"][b1], pos["psi5"][b1]
            if not (p3 < p5 < 0):
                bad.append({"beta1": b1, "psi3": p3, "psi5": p5})
    return bad


def _region_beta1(curves, kinds, sign, preferred):
    """Signed ``beta1`` at which every curve in ``kinds`` was traced, nearest ``preferred``."""
    common = None
    for k in kinds:
        got = {abs(b1) for b1, _ in curves[k].samples}
        common = got if common is None else common & got
    if not common:
        return None
    m = min(common, key=lambda v: abs(np.log(v / preferred)))
    return sign * m


def build_diagram(sys_or_unfolding, grid=None, jobs: int = 1, certify: bool = True,
                  strict: bool = False, region_beta1: float | None = None) -> BifurcationDiagram:
    """Trace all five boundaries, sample every region and compare inventories.

    Parameters
    ----------
    grid : array_like, optional
        Positive ``|beta1|`` magnitudes; default :func:`default_grid`.
    region_beta1 : float, optional
        ``|beta1|`` used for region samples; defaults to the grid point
        nearest the logarithmic midpoint.

    Raises
    ------
    RegionMismatch
        With ``strict=True`` if any sample disagrees with its expectation.
    """
    u = sys_or_unfolding if isinstance(sys_or_unfolding, Unfolding) else Unfolding(sys_or_unfolding)
    mags = np.asarray(default_grid(u) if grid is None else grid, dtype=float)
    mags = np.sort(np.abs(mags))
    if region_beta1 is None:
        mid = np.exp(np.mean(np.log(mags)))
        region_beta1 = float(mags[np.argmin(np.abs(np.log(mags / mid)))])
    region_beta1 = float(region_beta1)
    if not np.any(mags == region_beta1):
        mags = np.sort(np.append(mags, region_beta1))
    curves = {}
    for kind in KINDS:
        g = -mags if kind in NEGATIVE_SIDE else mags
        curves[kind] = trace_boundary(u, kind, g, jobs=jobs)
    pred = predicted_coefficients(u.quantities)
    comparison = {}
    for kind, c in curves.items():
        rel = abs(c.fitted_coeff - pred[kind]) / abs(pred[kind])
        comparison[kind] = {"predicted": pred[kind], "fitted": c.fitted_coeff,
                            "relative_error": rel, "linear_term": c.linear_term,
                            "n_samples": len(c.samples), "n_skipped": len(c.skipped)}
    b_neg = _region_beta1(curves, NEGATIVE_SIDE, -1.0, region_beta1)
    b_pos = _region_beta1(curves, ("psi3", "psi5"), 1.0, region_beta1)
    placement = {k: curves[k] for k in KINDS}
    notes = {}
    for kinds, b in ((NEGATIVE_SIDE, b_neg), (("psi3", "psi5"), b_pos)):
        if b is None:
            b = -region_beta1 if kinds is NEGATIVE_SIDE else region_beta1
            for k in kinds:
                placement[k] = BoundaryCurve(k, [(b, pred[k] * b * b)], [None])
                notes[k] = "curve not traced here; placed on the predicted curve"
        if kinds is NEGATIVE_SIDE:
            b_neg = b
        else:
            b_pos = b
    targets = region_targets(placement, b_neg, b_pos, abs(pred["psi3"]) * region_beta1**2)
    regions = []
    tasks = [(u, lab, beta, alpha, certify) for lab, (beta, alpha) in targets.items()]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            regions += list(ex.map(_region_worker, tasks))
    else:
        regions += [_region_worker(t) for t in tasks]
    if notes:
        for r in regions:
            if r.label.startswith("4") and any(k in notes for k in NEGATIVE_SIDE) or \
                    r.label.startswith("3") and any(k in notes for k in ("psi3", "psi5")):
                r.note = (r.note + "; " if r.note else "") + "placement from predicted curves"
    mismatches = [{"label": r.label, "expected": r.expected, "note": r.note}
                  for r in regions if not r.matches]
    diagram = BifurcationDiagram(curves, regions, comparison, u.quantities, mismatches,
                                 check_ordering(curves))
    if strict and mismatches:
        raise RegionMismatch("region inventories disagree with the expected table",
                             mismatches=mismatches)
    return diagram
