"""Builtin systems: the oscillator family, the circle and the parabola.

Also contains :func:`find_theta`, which locates the parameter ``b`` at which
the oscillator's upper cycle grazes the boundary at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ._poly import Poly
from .errors import ConfigError, NoBracket, NoCycle, NumericalError
from .fields import FilippovSystem, SmoothField, symmetrize

_X, _Y, _A1, _A2 = Poly.variables()


@dataclass(frozen=True)
class ThompsonHuntParams:
    """Parameters of the oscillator family; ``alpha`` enters at evaluation."""

    a: float
    b: float
    alpha: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ConfigError("a and b must be finite")


def thompson_hunt(a: float, b: float) -> FilippovSystem:
    """Oscillator with upper field ``(1 - y, x - a y - b y^3 + a1 + a2 (y - y^2))``.

    At ``alpha = 0`` the origin is a visible fold-fold. The family has
    ``g_a1(0, 0) = 1`` and ``g_a2(0, 0) = 0``.
    """
    ThompsonHuntParams(a, b)
    f = 1 - _Y
    g = _X - a * _Y - b * _Y**3 + _A1 + _A2 * (_Y - _Y**2)
    return symmetrize(SmoothField(f, g, f"thompson_hunt(a={a!r}, b={b!r})"))


def circle_system() -> FilippovSystem:
    """Unit attracting cycle centred at ``(0, 1)`` grazing the boundary at the origin.

    In polar coordinates about the centre the upper field is
    ``r' = r (1 - r^2)``, ``theta' = 1``, so the period is ``2 pi`` and the
    divergence on the cycle is ``-2``. The unfolding adds ``alpha1`` to ``g``
    and lifts the whole field vertically by ``alpha2``.
    """
    u = _X
    v = _Y - 1 - _A2
    q = 1 - u**2 - v**2
    f = -v + u * q
    g = u + v * q + _A1
    return symmetrize(SmoothField(f, g, "circle"))


def parabola_system() -> FilippovSystem:
    """Upper field ``(1, 2x)``: orbits ``y = x^2 + c``, visible fold-fold at the origin."""
    return symmetrize(SmoothField(Poly.const(1.0), 2 * _X, "parabola"))


BUILTINS = {
    "thompson_hunt": thompson_hunt,
    "circle": circle_system,
    "parabola": parabola_system,
}


@dataclass
class ThetaResult:
    """Outcome of :func:`find_theta`."""

    a: float
    b: float
    offset: float
    scan: list = field(default_factory=list)
    iterations: int = 0

    def __float__(self):
        return self.b


def _scan_offset(args):
    from .cycles import cycle_offset

    a, b, opts = args
    try:
        return float(cycle_offset(thompson_hunt(a, b), (0.0, 0.0), opts))
    except (NoCycle, NumericalError):
        return None


def _refine_edge(a, opts, p, q, scan, depth=4, n=10):
    """Look for a sign change between a defined and an undefined scan point."""
    for _ in range(depth):
        pts = np.linspace(p[0], q[0], n + 2)[1:-1]
        if p[1] is None:
            pts = pts[::-1]
            p, q = q, p
        edge = None
        prev = p
        for b in pts:
            v = _scan_offset((a, float(b), opts))
            scan.append((float(b), v))
            if v is None:
                edge = (prev, (float(b), v))
                break
            if np.sign(v) != np.sign(prev[1]):
                return tuple(sorted((prev[0], float(b))))
            prev = (float(b), v)
        if edge is None:
            return None
        p, q = edge
    return None


def find_theta(a: float, b_range=(0.1, 5.0), n_scan: int = 50, tol: float = 1e-12,
               opts=None, jobs: int = 1) -> ThetaResult:
    """Find ``b`` with a grazing upper cycle through the origin.

    The cycle offset is scanned over ``b_range``; points where no cycle
    exists are skipped. Where the offset becomes undefined between two scan
    points the interval is subdivided, since the root can sit right next to
    the end of the cycle branch. The first sign change is refined with
    Brent's method.

    Parameters
    ----------
    jobs : int
        Worker processes for the scan; ``1`` scans serially and stops at
        the first sign change.

    Raises
    ------
    NoBracket
        When no sign change is found; the scan table is attached.
    """
    from .cycles import cycle_offset
    from .options import PRECISE

    opts = opts or PRECISE
    if not a < 0:
        raise ConfigError("the grazing locus requires a < 0", a=a)

    def offset(b):
        return cycle_offset(thompson_hunt(a, b), (0.0, 0.0), opts)

    bs = [float(b) for b in np.linspace(b_range[0], b_range[1], n_scan)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as ex:
            values = list(ex.map(_scan_offset, [(a, b, opts) for b in bs]))
    else:
        values = None
    scan = []
    edges = []
    bracket = None
    last = None
    for i, b in enumerate(bs):
        v = values[i] if values is not None else _scan_offset((a, b, opts))
        scan.append((b, v))
        if v == 0.0:
            return ThetaResult(a, b, 0.0, scan, 0)
        if last is not None and (last[1] is None) != (v is None):
            edges.append((last, (b, v)))
        if v is not None and last is not None and last[1] is not None and np.sign(last[1]) != np.sign(v):
            bracket = (last[0], b)
            break
        last = (b, v)
    # the cycle may stop reaching the fold line (or disappear) close to the
    # root, which hides the sign change between coarse scan points
    while bracket is None and edges:
        bracket = _refine_edge(a, opts, *edges.pop(0), scan)
    if bracket is None:
        raise NoBracket("cycle offset does not change sign over the scan", a=a, scan=scan)
    b_star, info = optimize.brentq(offset, *bracket, xtol=tol, rtol=4 * np.finfo(float).eps,
                                   full_output=True)
    return ThetaResult(a, float(b_star), float(offset(b_star)), scan, info.iterations)
