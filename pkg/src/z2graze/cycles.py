"""Offsets, transition and displacement maps, and portrait classification.

Coordinates follow the translated ("beta") form: the upper fold sits at the
origin, the lower fold at ``-2 beta1`` and the pseudo-equilibrium (when
there is a sliding segment) at ``-beta1``. Transition maps run the smooth
upper flow from ``(x, 0)`` to the horizontal section through ``(a, b)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from . import _kernels as K
from .boundary import find_tangencies, pseudo_equilibria, sliding_segments
from .errors import HyperbolicityViolated, InconsistentDetection, NoConvergence, NoCycle, NoHit, NumericalError
from .fields import FilippovSystem
from .hybrid import Section, flow, run_kernel
from .options import DEFAULT, PRECISE, IntegratorOptions
from .quantities import GrazingCycleData

# -- offsets ---------------------------------------------------------------


def fold_offset(sys: FilippovSystem, alpha=None, x0: float = 0.0, tol: float = 1e-12,
                max_iter: int = 50) -> float:
    """Root of ``g+(x, 0; alpha)`` near ``x0`` by Newton's method.

    Raises
    ------
    NoConvergence
    """
    x = float(x0)
    for _ in range(max_iter):
        j = sys.upper.jet(x, 0.0, alpha)
        g, gx = j[1, 0], j[1, 1]
        if abs(g) <= tol:
            return x
        if gx == 0.0:
            break
        x -= g / gx
    j = sys.upper.jet(x, 0.0, alpha)
    if abs(j[1, 0]) <= tol:
        return x
    raise NoConvergence("fold offset Newton iteration failed", alpha=list(np.ravel(alpha or (0, 0))))


@dataclass(frozen=True)
class OffsetPair:
    beta1: float
    beta2: float


def _return_map(sys, xf, alpha, opts, t_budget):
    row = [K.EV_VLINE, xf, 1.0, -np.inf, np.inf, 0.0]

    def P(y):
        res = run_kernel(sys, K.MODE_PLANAR, 0, [xf, y], t_budget, alpha, opts, [row])
        if res.status != K.STATUS_EVENT:
            raise NoHit("no return to the fold section", y=y)
        return float(res.state[1])

    return P


def cycle_offset(sys: FilippovSystem, alpha=None, opts: IntegratorOptions = PRECISE,
                 seed: float = 0.0, tol: float = 1e-13, max_iter: int = 50,
                 t_budget: float = 200.0) -> float:
    """Signed height of the upper limit cycle above the fold abscissa.

    Damped Newton iteration on ``P(y) - y`` for the return map to the
    vertical section through the fold, with a central-difference ``P'``.

    Raises
    ------
    NoCycle
    """
    xf = fold_offset(sys, alpha)
    P = _return_map(sys, xf, alpha, opts, t_budget)
    y = float(seed)
    try:
        r = P(y) - y
    except NoHit as exc:
        raise NoCycle("no return from the seed", seed=seed) from exc
    for _ in range(max_iter):
        h = 1e-6 * max(1.0, abs(y))
        try:
            d = (P(y + h) - P(y - h)) / (2 * h)
        except NoHit as exc:
            raise NoCycle("return map undefined near iterate", y=y) from exc
        if abs(d - 1.0) < 1e-8:
            raise NoCycle("return map derivative is 1 (non-hyperbolic)", y=y)
        step = -r / (d - 1.0)
        cap = 0.5 * max(1.0, abs(y))
        if abs(step) > cap:
            step = np.sign(step) * cap
        accepted = False
        for _ in range(20):
            yn = y + step
            try:
                rn = P(yn) - yn
            except NoHit:
                step *= 0.5
                continue
            if abs(rn) < abs(r) or abs(step) <= tol * max(1.0, abs(y)):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            raise NoCycle("damped Newton stalled", y=y, residual=r)
        y, r = yn, rn
        if abs(step) <= tol * max(1.0, abs(y)) or r == 0.0:
            return y
    raise NoCycle("cycle offset did not converge", y=y, residual=r)


def offsets(sys: FilippovSystem, alpha=None, opts: IntegratorOptions = PRECISE, seed: float = 0.0) -> OffsetPair:
    return OffsetPair(fold_offset(sys, alpha), cycle_offset(sys, alpha, opts, seed))


# -- translated system -----------------------------------------------------

@dataclass(frozen=True)
class BetaSystem:
    """System at parameter ``alpha`` expressed in translated coordinates.

    Attributes
    ----------
    base : FilippovSystem
        Original system.
    alpha : tuple
    beta1, beta2 : float
        Fold offset and cycle offset; ``beta2`` may be NaN when only the
        maps are needed.
    system : FilippovSystem
        ``base`` shifted by ``beta1`` so that the upper fold is at 0.
    cycle : GrazingCycleData
        Unperturbed cycle supplying the section and the time scale.
    eps1 : float
        Radius of the displacement domain.
    """

    base: FilippovSystem
    alpha: tuple
    beta1: float
    beta2: float
    system: FilippovSystem
    cycle: GrazingCycleData
    eps1: float
    opts: IntegratorOptions = PRECISE
    band_abs: float = 1e-10
    band_rel: float = 1e-4

    @property
    def beta(self):
        return (self.beta1, self.beta2)

    @property
    def x_left(self) -> float:
        return max(-2.0 * self.beta1, 0.0)

    @property
    def band(self) -> float:
        """Width of the zero band for event and displacement values."""
        b2 = 0.0 if np.isnan(self.beta2) else abs(self.beta2)
        return max(self.band_abs, self.band_rel * (self.beta1**2 + b2))

    @property
    def scale_x(self) -> float:
        b2 = 0.0 if np.isnan(self.beta2) else abs(self.beta2)
        return max(abs(self.beta1), np.sqrt(b2), 1e-6)


def make_beta_system(sys: FilippovSystem, alpha, cycle: GrazingCycleData, beta2: float | None = None,
                     opts: IntegratorOptions = PRECISE, eps1: float | None = None,
                     beta1: float | None = None) -> BetaSystem:
    alpha = tuple(float(a) for a in np.ravel(alpha))
    b1 = fold_offset(sys, alpha) if beta1 is None else float(beta1)
    b2 = float("nan") if beta2 is None else float(beta2)
    eps1 = 0.3 * cycle.diameter if eps1 is None else float(eps1)
    return BetaSystem(sys, alpha, b1, b2, sys.translated(b1), cycle, eps1, opts)


def transition_map(bs: BetaSystem, x: float, side: str) -> float:
    """Abscissa of the first hit of the section from ``(x, 0)``.

    ``side='plus'`` follows the upper flow forward, ``'minus'`` backward.

    Raises
    ------
    NoHit
    """
    a, b = bs.cycle.section
    w = bs.cycle.section_window
    sgn = 1.0 if side == "plus" else -1.0
    row = [K.EV_HLINE, b, sgn, a - w, a + w, 0.0]
    try:
        res = run_kernel(bs.system, K.MODE_PLANAR, 0, [x, 0.0], 2.0 * bs.cycle.period, bs.alpha,
                         bs.opts, [row], sgn)
    except NumericalError as exc:  # orbit escapes to infinity
        raise NoHit("orbit escaped before reaching the section", x=x, side=side,
                    cause=exc.code) from exc
    if res.status != K.STATUS_EVENT:
        raise NoHit("section not reached", x=x, side=side)
    return float(res.state[0])


@dataclass(frozen=True)
class DisplacementSample:
    x: float
    value: float
    derivative: float


def displacement_value(bs: BetaSystem, x: float) -> float:
    return transition_map(bs, x, "plus") - transition_map(bs, -2.0 * bs.beta1 - x, "minus")


def displacement_derivative(bs: BetaSystem, x: float, h: float | None = None) -> float:
    h = 1e-3 * bs.scale_x if h is None else h
    D = lambda u: displacement_value(bs, u)  # noqa: E731
    if x - h < bs.x_left:
        return (-3 * D(x) + 4 * D(x + h) - D(x + 2 * h)) / (2 * h)
    return (D(x + h) - D(x - h)) / (2 * h)


def displacement(bs: BetaSystem, x: float, derivative: bool = True) -> DisplacementSample:
    """``D(x) = D+(x) - D-(-2 beta1 - x)`` with a finite-difference slope."""
    if x < bs.x_left - 1e-14:
        raise ValueError("x lies left of the displacement domain")
    v = displacement_value(bs, x)
    d = displacement_derivative(bs, x) if derivative else float("nan")
    return DisplacementSample(float(x), float(v), float(d))


# -- crossing cycles -------------------------------------------------------

@dataclass(frozen=True)
class CrossingRoot:
    x: float
    multiplicity: int
    stability: str
    derivative: float
    flags: tuple = ()


def _scan_grid(bs, n):
    lo = bs.x_left
    return lo + bs.eps1 * np.geomspace(1e-7, 1.0, n)


def _scan(bs, n):
    xs, vs = [], []
    for x in _scan_grid(bs, n):
        try:
            v = displacement_value(bs, float(x))
        except NoHit:
            break
        xs.append(float(x))
        vs.append(v)
    return np.array(xs), np.array(vs)


def _max_between(bs, a, b):
    res = optimize.minimize_scalar(lambda u: -displacement_value(bs, u), bounds=(a, b),
                                   method="bounded", options={"xatol": 1e-9 * max(bs.scale_x, 1e-6)})
    return float(res.x), float(-res.fun)


def crossing_cycles(bs: BetaSystem, n_scan: int = 400) -> list[CrossingRoot]:
    """Zeros of the displacement map in the open domain.

    A log-spaced scan from the left endpoint locates sign changes, which are
    refined by Brent's method. Interior local maxima of ``D`` are refined
    as well so that close root pairs are not missed; a maximum within the
    zero band is reported as a single root of multiplicity two. Stability
    is read from the sign of ``D'`` (negative means stable).
    """
    xs, vs = _scan(bs, n_scan)
    if len(xs) < 3:
        return []
    band = bs.band
    D = lambda u: displacement_value(bs, u)  # noqa: E731
    # while D has not left the zero band next to the endpoint its sign is
    # noise; those zeros belong to the endpoint itself
    start = 0
    if abs(vs[0]) <= band:
        out_of_band = np.nonzero(np.abs(vs) > band)[0]
        start = int(out_of_band[0]) if len(out_of_band) else len(xs)
    roots = []
    for i in range(start, len(xs) - 1):
        if vs[i] * vs[i + 1] < 0:
            r = optimize.brentq(D, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-14)
            roots.append(r)
    # local maxima with no sign change nearby may hide a pair of roots
    for i in range(max(1, start + 1), len(xs) - 1):
        if vs[i] >= vs[i - 1] and vs[i] >= vs[i + 1] and vs[i] < 0 and vs[i - 1] < 0 and vs[i + 1] < 0:
            xm, dm = _max_between(bs, xs[i - 1], xs[i + 1])
            if dm > band:
                roots.append(optimize.brentq(D, xs[i - 1], xm, xtol=1e-15, rtol=1e-14))
                roots.append(optimize.brentq(D, xm, xs[i + 1], xtol=1e-15, rtol=1e-14))
            elif dm >= -band:
                roots.append(("double", xm, dm))
    singles = sorted(r for r in roots if not isinstance(r, tuple))
    doubles = [r for r in roots if isinstance(r, tuple)]
    out = []
    # merge adjacent simple roots whose intermediate maximum lies in the band
    i = 0
    while i < len(singles):
        r = singles[i]
        if i + 1 < len(singles):
            r2 = singles[i + 1]
            xm, dm = _max_between(bs, r, r2)
            if dm <= band:
                doubles.append(("double", xm, dm))
                i += 2
                continue
        out.append(r)
        i += 1
    # drop roots indistinguishable from the left endpoint
    left = bs.x_left
    d_end = None
    result = []
    for r in out:
        if r - left <= 1e-7 * bs.eps1:
            continue
        d = displacement_derivative(bs, r)
        if d_end is None and abs(D(left)) <= band and abs(d) > 0 and r - left <= 10 * band / abs(d):
            continue
        result.append(CrossingRoot(float(r), 1, "stable" if d < 0 else "unstable", float(d)))
    for _, xm, dm in doubles:
        h = max(1e-2 * bs.scale_x, 1e-6)
        outer = D(xm + h)
        ext = "externally-stable" if outer < 0 else "externally-unstable"
        flags = ("within-band",) if abs(dm) <= band else ()
        result.append(CrossingRoot(float(xm), 2, ext, 0.0, flags))
    return sorted(result, key=lambda c: c.x)


def boundary_functions(bs: BetaSystem):
    """``(P, Q, D_left)``.

    ``P = D+(-beta1) - D-(0)`` is defined for ``beta1 <= 0`` and
    ``Q = D+(0) - D-(-beta1)`` for ``beta1 >= 0``; the other one is NaN.
    """
    b1 = bs.beta1
    P = Q = float("nan")
    if b1 <= 0:
        P = transition_map(bs, -b1, "plus") - transition_map(bs, 0.0, "minus")
    if b1 >= 0:
        Q = transition_map(bs, 0.0, "plus") - transition_map(bs, -b1, "minus")
    return P, Q, displacement_value(bs, bs.x_left)


# -- portrait classification -----------------------------------------------

@dataclass
class CycleObject:
    type: str
    stability: str
    point: tuple
    multiplicity: int = 1
    zone: str = "upper"
    certified: bool | None = None
    closure: float | None = None
    note: str = ""

    def key(self):
        return (self.type, self.stability, self.multiplicity)


TYPES = ("standard", "grazing", "crossing", "critical_crossing", "sliding_one_zonal",
         "sliding_two_zonal", "sliding_homoclinic")


@dataclass
class PortraitInventory:
    beta: tuple
    alpha: tuple
    objects: list = field(default_factory=list)
    boundary: dict = field(default_factory=dict)
    event_values: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def of_type(self, t):
        return [o for o in self.objects if o.type == t]

    @property
    def standard_cycles(self):
        return self.of_type("standard")

    @property
    def crossing_cycles(self):
        return self.of_type("crossing")

    @property
    def critical_crossing(self):
        return self.of_type("critical_crossing")

    @property
    def sliding_cycles_one_zonal(self):
        return self.of_type("sliding_one_zonal")

    @property
    def sliding_cycles_two_zonal(self):
        return self.of_type("sliding_two_zonal")

    @property
    def sliding_homoclinics(self):
        return self.of_type("sliding_homoclinic")

    @property
    def grazing_cycles(self):
        return self.of_type("grazing")

    def signature(self):
        """Sorted ``(type, stability, multiplicity)`` triples."""
        return sorted(o.key() for o in self.objects)

    def counts(self):
        return {t: len(self.of_type(t)) for t in TYPES}

    @property
    def all_certified(self) -> bool:
        return all(o.certified for o in self.objects)

    def to_dict(self):
        return {"beta": list(self.beta), "alpha": list(self.alpha),
                "counts": self.counts(),
                "objects": [asdict(o) for o in self.objects],
                "boundary": self.boundary, "event_values": self.event_values,
                "flags": list(self.flags)}


def _sign(v, band):
    if np.isnan(v):
        return 0
    return 0 if abs(v) <= band else (1 if v > 0 else -1)


def beta_bands(bs: BetaSystem):
    b1band = 1e-10
    b2band = max(1e-10, 1e-4 * bs.beta1**2)
    return b1band, b2band


def classify_portrait(bs: BetaSystem, certify: bool = True, strict: bool = False,
                      n_scan: int = 400) -> PortraitInventory:
    """Inventory of the cycles, sliding cycles and homoclinic orbits near the loop.

    Raises
    ------
    InconsistentDetection
        With ``strict=True`` when a detected object fails the direct
        integration check; otherwise the failure is listed in ``flags``.
    """
    b1, b2 = bs.beta1, bs.beta2
    if np.isnan(b2):
        raise ValueError("classify_portrait needs beta2")
    b1band, b2band = beta_bands(bs)
    s1 = _sign(b1, b1band)
    s2 = _sign(b2, b2band)
    band = bs.band
    inv = PortraitInventory(beta=(b1, b2), alpha=bs.alpha)
    stable_cycle = bs.cycle.quad_full[0] < 0  # lambda(0) < 1
    cyc_label = "stable" if stable_cycle else "unstable"
    lo_fold = -2.0 * b1

    # boundary structure
    span = max(4 * abs(b1), 1e-3)
    tang = find_tangencies(bs.system, (-span - abs(b1), span + abs(b1)), bs.alpha, n_scan=201)
    segs = sliding_segments(bs.system, (min(0.0, lo_fold), max(0.0, lo_fold)), bs.alpha) if s1 != 0 else []
    peqs = []
    for lo, hi, _ in segs:
        peqs.extend(pseudo_equilibria(bs.system, (lo, hi), bs.alpha, n_scan=101))
    inv.boundary = {"tangencies": [t.to_dict() for t in tang],
                    "sliding_segments": [{"lo": lo, "hi": hi, "stable": st} for lo, hi, st in segs],
                    "pseudo_equilibria": [p.to_dict() for p in peqs]}

    P, Q, D_left = boundary_functions(bs)
    inv.event_values = {"P": P, "Q": Q, "D_left": D_left, "band": band,
                        "beta_bands": [b1band, b2band]}

    # standard and grazing cycles
    if s2 > 0:
        inv.objects.append(CycleObject("standard", cyc_label, (0.0, b2)))
        inv.objects.append(CycleObject("standard", cyc_label, (lo_fold, -b2), zone="lower"))
    elif s2 == 0:
        lab = cyc_label if s1 == 0 else "internally-" + cyc_label
        inv.objects.append(CycleObject("grazing", lab, (0.0, 0.0)))
        inv.objects.append(CycleObject("grazing", lab, (lo_fold, 0.0), zone="lower"))

    near = 0.0
    if s2 == 0:
        near = 10.0 * np.sqrt(b2band)
        if s1 != 0:
            near = min(near, 0.1 * abs(b1))
    for r in crossing_cycles(bs, n_scan):
        if r.x - bs.x_left < near:
            # with beta2 in its zero band this root is the grazing cycle itself
            inv.flags.append(f"crossing root at {r.x:.6e} absorbed by the grazing cycle")
            continue
        obj = CycleObject("crossing", r.stability, (r.x, 0.0), r.multiplicity)
        if r.flags:
            inv.flags.append(f"crossing root at {r.x:.6e} {', '.join(r.flags)}")
        inv.objects.append(obj)

    if s1 != 0 and abs(D_left) <= band:
        d = displacement_derivative(bs, bs.x_left)
        ext = "externally-stable" if d < 0 else "externally-unstable"
        inv.objects.append(CycleObject("critical_crossing", ext, (bs.x_left, 0.0)))
        if abs(D_left) > 0.1 * band:
            inv.flags.append("critical crossing detected within the zero band")

    sl = "stable" if s1 > 0 else "unstable"
    if s1 > 0 and s2 < 0:
        sq = _sign(Q, band)
        if sq < 0:
            kind = "sliding_one_zonal"
        elif sq == 0:
            kind = "sliding_homoclinic"
        else:
            kind = "sliding_two_zonal" if _sign(D_left, band) < 0 else None
    elif s1 < 0 and s2 > 0:
        sp = _sign(P, band)
        if sp > 0:
            kind = "sliding_one_zonal"
        elif sp == 0:
            kind = "sliding_homoclinic"
        else:
            kind = "sliding_two_zonal" if _sign(D_left, band) > 0 else None
    else:
        kind = None
    if kind == "sliding_two_zonal":
        inv.objects.append(CycleObject(kind, sl, (0.0, 0.0)))
    elif kind == "sliding_homoclinic":
        inv.objects.append(CycleObject(kind, "", (0.0, 0.0)))
        inv.objects.append(CycleObject(kind, "", (lo_fold, 0.0), zone="lower"))
    elif kind is not None:
        inv.objects.append(CycleObject(kind, sl, (0.0, 0.0)))
        inv.objects.append(CycleObject(kind, sl, (lo_fold, 0.0), zone="lower"))

    if certify:
        for obj in inv.objects:
            certify_object(bs, obj)
            if not obj.certified:
                msg = f"{obj.type} at {obj.point} failed certification: {obj.note}"
                if strict:
                    raise InconsistentDetection(msg, beta=[b1, b2])
                inv.flags.append(msg)
    return inv


# -- certification ---------------------------------------------------------

def _sections(bs):
    a, b = bs.cycle.section
    w = bs.cycle.section_window
    upper = Section("horizontal", b, a - w, a + w, 1)
    # reflection about (-beta1, 0)
    ar = -2.0 * bs.beta1 - a
    lower = Section("horizontal", -b, ar - w, ar + w, -1)
    return upper, lower


def _two_hits(sys, start, side, section, bs, opts):
    tr = flow(sys, start, side, t_max=4.0 * bs.cycle.period, alpha=bs.alpha, opts=opts,
              section=section, max_section_hits=2, record=False)
    hits = tr.section_hits
    if len(hits) < 2:
        return None, tr
    h1, h2 = hits[0], hits[1]
    return float(np.hypot(h2.x - h1.x, h2.y - h1.y)), tr


def certify_object(bs: BetaSystem, obj: CycleObject, opts: IntegratorOptions | None = None) -> CycleObject:
    """Check an inventory entry by direct hybrid integration.

    Closed objects must return to the section to within ``10 * eps_int``
    after one turn; homoclinic orbits are checked by matching the forward
    orbit of the fold with the backward orbit of the pseudo-saddle at the
    section. Unstable objects are integrated in reversed time.
    """
    opts = opts or bs.opts
    tol = 10 * DEFAULT.eps_int
    up, low = _sections(bs)
    x0, y0 = obj.point
    lower_partner = obj.zone == "lower"
    sys = bs.system
    reverse = obj.stability.endswith("unstable") and obj.multiplicity == 1
    if obj.type in ("sliding_one_zonal", "sliding_two_zonal", "sliding_homoclinic", "critical_crossing") \
            and bs.beta1 < 0:
        reverse = True
    sec = low if lower_partner else up
    if reverse:
        sys = sys.time_reversed()
        sec = sec.reversed()
    side = "lower" if lower_partner else "upper"
    if obj.type == "critical_crossing" and reverse:
        # backwards in time the orbit leaves x_left along the arc that ends there
        side = "lower"
    try:
        if obj.type == "sliding_homoclinic":
            closure = _homoclinic_gap(bs, lower_partner, opts)
            expect = None
        else:
            closure, tr = _two_hits(sys, (x0, y0), side, sec, bs, opts)
            expect = _expected_structure(obj.type)
            if closure is not None and expect is not None:
                kinds = set(tr.kinds())
                if not expect(kinds, tr):
                    obj.certified = False
                    obj.closure = closure
                    obj.note = f"arc structure {sorted(kinds)} does not match {obj.type}"
                    return obj
    except NumericalError as exc:
        obj.certified = False
        obj.note = f"integration failed: {exc}"
        return obj
    if closure is None:
        obj.certified = False
        obj.note = "orbit did not return to the section"
        return obj
    obj.closure = closure
    obj.certified = closure <= tol
    if not obj.certified:
        obj.note = f"closure {closure:.3e} exceeds {tol:.1e}"
    return obj


def object_trajectory(bs: BetaSystem, obj: CycleObject, opts: IntegratorOptions | None = None):
    """One recorded turn of an inventory object, integrated as in :func:`certify_object`.

    Unstable objects are returned in the time-reversed system, so their
    arcs run backwards along the orbit.
    """
    opts = opts or bs.opts
    up, low = _sections(bs)
    lower_partner = obj.zone == "lower"
    sec = low if lower_partner else up
    side = "lower" if lower_partner else "upper"
    x0, y0 = obj.point
    if obj.type == "sliding_homoclinic":
        b1 = bs.beta1
        fold = -2.0 * b1 if lower_partner else 0.0
        start = fold if b1 > 0 else -b1
        return flow(bs.system, (start, 0.0), side, 2.0 * bs.cycle.period, bs.alpha, opts,
                    sec, 2, record=True)
    sys = bs.system
    reverse = obj.stability.endswith("unstable") and obj.multiplicity == 1
    if obj.type in ("sliding_one_zonal", "sliding_two_zonal", "critical_crossing") and bs.beta1 < 0:
        reverse = True
    if reverse:
        sys = sys.time_reversed()
        sec = sec.reversed()
        if obj.type == "critical_crossing":
            side = "lower"
    return flow(sys, (x0, y0), side, 4.0 * bs.cycle.period, bs.alpha, opts, sec, 2, record=True)


def _expected_structure(t):
    if t in ("standard", "grazing"):
        return lambda kinds, tr: len(kinds) == 1 and "Sliding" not in kinds
    if t in ("crossing", "critical_crossing"):
        return lambda kinds, tr: {"Upper", "Lower"} <= kinds
    if t == "sliding_one_zonal":
        return lambda kinds, tr: "Sliding" in kinds and len(kinds) == 2
    if t == "sliding_two_zonal":
        return lambda kinds, tr: {"Upper", "Lower", "Sliding"} <= kinds
    return None


def _homoclinic_gap(bs, lower_partner, opts):
    """Gap at the section between the orbit leaving the fold and the one reaching the saddle.

    Both orbits are integrated with the hybrid flow: the one leaving the
    sliding segment forward in time and the one arriving there in reversed
    time, so that each starts with a standard arc.
    """
    up, low = _sections(bs)
    b1 = bs.beta1
    fold = -2.0 * b1 if lower_partner else 0.0
    side = "lower" if lower_partner else "upper"
    sec = low if lower_partner else up
    if b1 > 0:
        fwd_start, bwd_start = fold, -b1
    else:
        fwd_start, bwd_start = -b1, fold
    T = 2.0 * bs.cycle.period
    fwd = flow(bs.system, (fwd_start, 0.0), side, T, bs.alpha, opts, sec, 1, record=False)
    bwd = flow(bs.system.time_reversed(), (bwd_start, 0.0), side, T, bs.alpha, opts,
               sec.reversed(), 1, record=False)
    if not fwd.section_hits or not bwd.section_hits:
        return None
    hf, hb = fwd.section_hits[0], bwd.section_hits[0]
    return float(np.hypot(hf.x - hb.x, hf.y - hb.y))
