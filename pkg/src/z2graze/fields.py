"""Parameterized planar vector fields and piecewise-smooth systems.

The discontinuity boundary is always ``h(x, y) = y``.  Fields are sparse
polynomials in ``(x, y, alpha1, alpha2)`` so that values and first partials
are exact and cheap to evaluate inside compiled kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from ._poly import Poly, term_table
from .errors import ConfigError, NumericalError

SIDES = ("upper", "lower")
# column order of SmoothField.jet
PARTIAL_NAMES = ("value", "x", "y", "alpha1", "alpha2")


def _alpha(alpha) -> tuple[float, float]:
    if alpha is None:
        return 0.0, 0.0
    a = tuple(float(v) for v in np.ravel(alpha))
    if len(a) == 1:
        return a[0], 0.0
    if len(a) != 2:
        raise ValueError("alpha must have two components")
    return a


class SmoothField:
    """Planar field ``Z(x, y; alpha) = (f, g)`` with polynomial components.

    Parameters
    ----------
    f, g : Poly
        Components as polynomials in ``(x, y, alpha1, alpha2)``.
    name : str, optional
        Label used in reports.
    """

    def __init__(self, f: Poly, g: Poly, name: str = ""):
        self.f = f
        self.g = g
        self.name = name
        self.exps, self.coef = term_table(f, g)
        self.exps.setflags(write=False)
        self.coef.setflags(write=False)
        self._buf = np.empty(10)

    @classmethod
    def from_terms(cls, f_terms, g_terms, name=""):
        """Build from term lists ``[(i, j, k, l, c), ...]`` for ``c x^i y^j a1^k a2^l``."""
        def mk(terms):
            p = Poly()
            for t in terms:
                t = list(t)
                if len(t) == 3:
                    t = [t[0], t[1], 0, 0, t[2]]
                if len(t) != 5:
                    raise ConfigError(f"term {t!r} must be (i, j, c) or (i, j, k, l, c)")
                p = p + Poly({tuple(int(e) for e in t[:4]): float(t[4])})
            return p
        return cls(mk(f_terms), mk(g_terms), name)

    def __call__(self, x, y, alpha=None) -> np.ndarray:
        a1, a2 = _alpha(alpha)
        f, g = K.poly_fg(self.exps, self.coef, float(x), float(y), a1, a2)
        out = np.array([f, g])
        if not np.all(np.isfinite(out)):
            raise NumericalError("non-finite field value", x=float(x), y=float(y))
        return out

    def jet(self, x, y, alpha=None) -> np.ndarray:
        """Values and first partials.

        Returns
        -------
        ndarray, shape (2, 5)
            Row 0 is f, row 1 is g; columns follow :data:`PARTIAL_NAMES`.
        """
        a1, a2 = _alpha(alpha)
        buf = np.empty(10)
        K.poly_eval(self.exps, self.coef, float(x), float(y), a1, a2, buf)
        if not np.all(np.isfinite(buf)):
            raise NumericalError("non-finite partials", x=float(x), y=float(y))
        return buf.reshape(2, 5)

    def partials(self, x, y, alpha=None) -> np.ndarray:
        """Analytic partials, shape (2, 4), columns ``d/dx, d/dy, d/da1, d/da2``."""
        return self.jet(x, y, alpha)[:, 1:]

    def partials_fd(self, x, y, alpha=None) -> np.ndarray:
        """Central finite-difference partials with step ``1e-6*max(1, |coord|)``."""
        a1, a2 = _alpha(alpha)
        base = np.array([x, y, a1, a2], dtype=float)
        out = np.empty((2, 4))
        for i in range(4):
            h = 1e-6 * max(1.0, abs(base[i]))
            p = base.copy()
            m = base.copy()
            p[i] += h
            m[i] -= h
            out[:, i] = (self(p[0], p[1], p[2:]) - self(m[0], m[1], m[2:])) / (2 * h)
        return out

    # -- exact transformations ------------------------------------------

    def reflected(self) -> "SmoothField":
        """The partner ``-Z(-x, -y; alpha)``."""
        return SmoothField(-self.f.substitute_sign(-1, -1), -self.g.substitute_sign(-1, -1),
                           self.name + "~")

    def negated(self) -> "SmoothField":
        return SmoothField(-self.f, -self.g, self.name)

    def translated(self, dx: float) -> "SmoothField":
        """The field in coordinates shifted by ``(x, y) -> (x + dx, y)``."""
        return SmoothField(self.f.shift_x(dx), self.g.shift_x(dx), self.name)

    def __eq__(self, other):
        return isinstance(other, SmoothField) and self.f == other.f and self.g == other.g

    def __repr__(self):
        return f"SmoothField({self.name or 'anonymous'}, {len(self.exps)} terms)"


@dataclass(frozen=True)
class FilippovSystem:
    """Pair of fields split by the boundary ``y = 0``.

    Attributes
    ----------
    upper, lower : SmoothField
        Fields on ``y > 0`` and ``y < 0``.
    symmetric : bool
        True when ``lower`` is the reflection partner of ``upper``.
    name : str
    """

    upper: SmoothField
    lower: SmoothField
    symmetric: bool = False
    name: str = ""

    def side(self, side: str) -> SmoothField:
        if side == "upper":
            return self.upper
        if side == "lower":
            return self.lower
        raise ValueError(f"unknown side {side!r}")

    def tables(self):
        """Kernel term tables ``(exu, cfu, exl, cfl)``."""
        return self.upper.exps, self.upper.coef, self.lower.exps, self.lower.coef

    def time_reversed(self) -> "FilippovSystem":
        """Both fields negated; folds keep visibility, sliding stability flips."""
        return FilippovSystem(self.upper.negated(), self.lower.negated(), self.symmetric,
                              self.name + "[reversed]")

    def translated(self, dx: float) -> "FilippovSystem":
        """Shift coordinates by ``(x, y) -> (x + dx, y)`` in both fields."""
        return FilippovSystem(self.upper.translated(dx), self.lower.translated(dx),
                              False, self.name)

    def symmetry_defect(self, alpha=None, radius=1.0, n=7) -> float:
        """Largest ``|Z-(p) + Z+(-p)|`` over a probe grid."""
        g = np.linspace(-radius, radius, n)
        worst = 0.0
        for x in g:
            for y in g:
                d = self.lower(x, y, alpha) + self.upper(-x, -y, alpha)
                worst = max(worst, float(np.max(np.abs(d))))
        return worst


def symmetrize(upper: SmoothField, name: str = "") -> FilippovSystem:
    """Filippov system whose lower field is ``-Z+(-x, -y; alpha)``.

    The partner is built by exact sign flips of the polynomial coefficients,
    so its partials follow the chain rule without any re-differencing.
    """
    return FilippovSystem(upper, upper.reflected(), True, name or upper.name)


def eval_side(sys: FilippovSystem, p, side: str, alpha=None) -> np.ndarray:
    """Evaluate ``Z+`` or ``Z-`` at ``p`` regardless of which zone ``p`` is in."""
    x, y = float(p[0]), float(p[1])
    if not (np.isfinite(x) and np.isfinite(y)):
        raise NumericalError("non-finite point")
    return sys.side(side)(x, y, alpha)


def lie_derivatives(sys: FilippovSystem, x0: float, side: str, alpha=None) -> tuple[float, float]:
    """``(Zh, Z^2 h)`` at ``(x0, 0)`` for ``h = y``.

    ``Zh = g`` and ``Z^2 h = f g_x + g g_y``.
    """
    j = sys.side(side).jet(x0, 0.0, alpha)
    f, g, gx, gy = j[0, 0], j[1, 0], j[1, 1], j[1, 2]
    return float(g), float(f * gx + g * gy)
