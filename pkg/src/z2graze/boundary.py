"""Boundary classification, sliding dynamics, tangencies and pseudo-equilibria."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import AmbiguousClassification, DivisionDegenerate, NoConvergence
from .fields import FilippovSystem, lie_derivatives

TANGENCY_TOL = 1e-10
DEGENERATE_TOL = 1e-8

CROSSING = "Crossing"
SLIDING_STABLE = "SlidingStable"
SLIDING_UNSTABLE = "SlidingUnstable"
TANGENCY = "Tangency"
BOUNDARY_EQUILIBRIUM = "BoundaryEquilibrium"


@dataclass(frozen=True)
class TangencyRecord:
    """Tangency on one or both sides at ``(x, 0)``.

    ``is_fold``, ``visible`` and ``z2h`` are keyed by the tangent sides only.
    """

    x: float
    side: str
    is_fold: dict = field(default_factory=dict)
    visible: dict = field(default_factory=dict)
    z2h: dict = field(default_factory=dict)
    degenerate: bool = False

    @property
    def fold_fold(self) -> bool:
        return self.side == "both" and all(self.is_fold.values())

    @property
    def description(self) -> str:
        if self.side == "both":
            kind = "fold-fold" if self.fold_fold else "degenerate"
        else:
            kind = "regular-fold" if self.is_fold.get(self.side) else "degenerate"
        vis = "-".join("visible" if self.visible.get(s) else "invisible"
                       for s in ("upper", "lower") if s in self.visible)
        return f"{kind} ({vis})"

    def to_dict(self):
        return {"x": self.x, "side": self.side, "is_fold": dict(self.is_fold),
                "visible": dict(self.visible), "z2h": dict(self.z2h),
                "degenerate": self.degenerate, "description": self.description}


@dataclass(frozen=True)
class BoundaryClass:
    kind: str
    x: float
    zh_upper: float
    zh_lower: float
    tangency: TangencyRecord | None = None


@dataclass(frozen=True)
class PseudoEquilibrium:
    """Zero of the sliding velocity.

    ``stability`` is ``"PseudoSaddle"`` when the motion along the boundary
    opposes the transverse dynamics (repelling along a stable segment or
    attracting along an unstable one) and ``"PseudoNode"`` otherwise.
    """

    x: float
    stability: str
    slope: float
    segment_stable: bool

    def to_dict(self):
        return {"x": self.x, "stability": self.stability, "slope": self.slope,
                "segment_stable": self.segment_stable}


def _visible(side, z2h):
    return z2h > 0 if side == "upper" else z2h < 0


def _tangency_record(sys, x, sides, alpha, strict=True):
    is_fold, visible, z2 = {}, {}, {}
    degenerate = False
    for s in sides:
        _, z2h = lie_derivatives(sys, x, s, alpha)
        if abs(z2h) < DEGENERATE_TOL:
            if strict:
                raise AmbiguousClassification("degenerate tangency", x=x, side=s, z2h=z2h)
            degenerate = True
        is_fold[s] = abs(z2h) >= DEGENERATE_TOL
        visible[s] = _visible(s, z2h)
        z2[s] = z2h
    side = sides[0] if len(sides) == 1 else "both"
    return TangencyRecord(float(x), side, is_fold, visible, z2, degenerate)


def classify_point(sys: FilippovSystem, x0: float, alpha=None, tol: float = TANGENCY_TOL) -> BoundaryClass:
    """Filippov classification of the boundary point ``(x0, 0)``.

    Raises
    ------
    AmbiguousClassification
        If a side has ``|Zh| <= tol`` and ``|Z^2 h| < 1e-8``.
    """
    x0 = float(x0)
    zp = sys.upper(x0, 0.0, alpha)
    zm = sys.lower(x0, 0.0, alpha)
    gp, gm = float(zp[1]), float(zm[1])
    if np.all(np.abs(zp) <= tol) or np.all(np.abs(zm) <= tol):
        return BoundaryClass(BOUNDARY_EQUILIBRIUM, x0, gp, gm)
    sides = [s for s, g in (("upper", gp), ("lower", gm)) if abs(g) <= tol]
    if sides:
        return BoundaryClass(TANGENCY, x0, gp, gm, _tangency_record(sys, x0, sides, alpha))
    if gp * gm > 0:
        kind = CROSSING
    elif gp < 0 < gm:
        kind = SLIDING_STABLE
    else:
        kind = SLIDING_UNSTABLE
    return BoundaryClass(kind, x0, gp, gm)


def sliding_field(sys: FilippovSystem, x0: float, alpha=None) -> np.ndarray:
    """Filippov convex combination ``mu Z- + (1 - mu) Z+`` at ``(x0, 0)``."""
    zp = sys.upper(x0, 0.0, alpha)
    zm = sys.lower(x0, 0.0, alpha)
    den = zp[1] - zm[1]
    if abs(den) < 1e-14:
        raise DivisionDegenerate("Z+h - Z-h vanishes", x=float(x0))
    mu = zp[1] / den
    return mu * zm + (1.0 - mu) * zp


def sliding_velocity(sys: FilippovSystem, x0: float, alpha=None) -> float:
    """x-component of the sliding field at ``(x0, 0)``."""
    return float(sliding_field(sys, x0, alpha)[0])


def _roots_on_grid(fun, lo, hi, n, dfun=None, tol=1e-12):
    xs = np.linspace(lo, hi, n)
    vs = np.array([fun(x) for x in xs])
    roots = []
    for i in range(n - 1):
        a, b, fa, fb = xs[i], xs[i + 1], vs[i], vs[i + 1]
        if fa == 0.0:
            roots.append((a, False))
            continue
        if fa * fb < 0:
            r = optimize.brentq(fun, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            if dfun is not None:
                for _ in range(5):
                    v = fun(r)
                    if abs(v) <= tol * 1e-2:
                        break
                    d = dfun(r)
                    if d == 0:
                        break
                    r2 = r - v / d
                    if not (a <= r2 <= b) or abs(fun(r2)) >= abs(v):
                        break
                    r = r2
            roots.append((r, False))
    if vs[-1] == 0.0:
        roots.append((xs[-1], False))
    # near-zero interior minima of |fun| without a sign change (double roots)
    av = np.abs(vs)
    scale = max(float(np.max(av)), 1e-300)
    for i in range(1, n - 1):
        if av[i] <= av[i - 1] and av[i] <= av[i + 1] and vs[i - 1] * vs[i + 1] > 0 and vs[i] * vs[i - 1] > 0:
            if av[i] > 1e-3 * scale:
                continue
            res = optimize.minimize_scalar(lambda x: abs(fun(x)), bounds=(xs[i - 1], xs[i + 1]),
                                           method="bounded", options={"xatol": 1e-13})
            if abs(fun(res.x)) <= 1e2 * tol:
                roots.append((float(res.x), True))
    return sorted(roots)


def find_tangencies(sys: FilippovSystem, interval, alpha=None, n_scan: int = 401,
                    tol: float = 1e-12) -> list[TangencyRecord]:
    """All zeros of ``g+(x, 0)`` and ``g-(x, 0)`` in ``interval`` with fold data.

    Zeros within ``1e-9`` of each other on opposite sides are merged into a
    single record with ``side == 'both'``. Near-zero minima without a sign
    change are returned flagged as degenerate.
    """
    lo, hi = map(float, interval)
    found = []
    for side in ("upper", "lower"):
        fld = sys.side(side)

        def g(x, fld=fld):
            return float(fld(x, 0.0, alpha)[1])

        def gx(x, fld=fld):
            return float(fld.jet(x, 0.0, alpha)[1, 1])

        for r, double in _roots_on_grid(g, lo, hi, n_scan, gx, tol):
            found.append((r, side, double))
    found.sort()
    out = []
    used = [False] * len(found)
    for i, (x, side, dbl) in enumerate(found):
        if used[i]:
            continue
        sides = [side]
        degenerate = dbl
        for j in range(i + 1, len(found)):
            if not used[j] and found[j][1] != side and abs(found[j][0] - x) <= 1e-9:
                used[j] = True
                sides.append(found[j][1])
                degenerate |= found[j][2]
                break
        sides.sort(key=("upper", "lower").index)
        rec = _tangency_record(sys, x, sides, alpha, strict=False)
        if degenerate and not rec.degenerate:
            rec = TangencyRecord(rec.x, rec.side, rec.is_fold, rec.visible, rec.z2h, True)
        out.append(rec)
    return out


def sliding_segments(sys: FilippovSystem, interval, alpha=None, n_scan: int = 401):
    """Maximal sliding segments inside ``interval`` as ``(lo, hi, stable)``."""
    lo, hi = map(float, interval)
    cuts = [lo] + [t.x for t in find_tangencies(sys, (lo, hi), alpha, n_scan)] + [hi]
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 0:
            continue
        m = 0.5 * (a + b)
        c = classify_point(sys, m, alpha)
        if c.kind in (SLIDING_STABLE, SLIDING_UNSTABLE):
            out.append((a, b, c.kind == SLIDING_STABLE))
    return out


def pseudo_equilibria(sys: FilippovSystem, segment, alpha=None, n_scan: int = 401) -> list[PseudoEquilibrium]:
    """Zeros of the sliding velocity strictly inside ``segment``."""
    lo, hi = map(float, segment)
    width = hi - lo
    if width <= 0:
        return []
    pad = 1e-9 * max(1.0, width)
    a, b = lo + pad, hi - pad

    def v(x):
        return sliding_velocity(sys, x, alpha)

    out = []
    try:
        roots = _roots_on_grid(v, a, b, n_scan)
    except ValueError as exc:  # pragma: no cover - brentq bracket failures
        raise NoConvergence(str(exc)) from exc
    for x, _ in roots:
        h = 1e-6 * max(width, 1e-12)
        slope = (v(x + h) - v(x - h)) / (2 * h)
        stable = classify_point(sys, x, alpha).kind == SLIDING_STABLE
        saddle = (slope > 0) == stable
        out.append(PseudoEquilibrium(float(x), "PseudoSaddle" if saddle else "PseudoNode",
                                     float(slope), stable))
    return out
