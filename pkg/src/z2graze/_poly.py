"""Minimal sparse polynomials in the four variables (x, y, alpha1, alpha2).

Every builtin system and every config-defined system is polynomial in the
state and the parameters, which lets the integrator kernels evaluate fields
and their first partials exactly from a flat term table.
"""

from __future__ import annotations

from math import comb

import numpy as np

NVARS = 4
_ZERO = (0, 0, 0, 0)


class Poly:
    """Sparse polynomial ``sum c * x**i * y**j * a1**k * a2**l``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != NVARS or min(exps) < 0:
                raise ValueError(f"bad exponent tuple {exps!r}")
            c = float(c)
            if c != 0.0:
                self.terms[exps] = self.terms.get(exps, 0.0) + c

    @classmethod
    def const(cls, c):
        return cls({_ZERO: c})

    @classmethod
    def variables(cls):
        """Return the generators ``x, y, a1, a2``."""
        out = []
        for i in range(NVARS):
            e = [0] * NVARS
            e[i] = 1
            out.append(cls({tuple(e): 1.0}))
        return tuple(out)

    @staticmethod
    def _coerce(other):
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0.0) + c
        return Poly({e: c for e, c in t.items() if c != 0.0})

    __radd__ = __add__

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0.0) + c1 * c2
        return Poly({e: c for e, c in t.items() if c != 0.0})

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Poly.const(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __repr__(self):
        return f"Poly({self.terms!r})"

    # -- transformations -------------------------------------------------

    def substitute_sign(self, sx, sy):
        """Return ``p(sx*x, sy*y, a1, a2)`` for signs ``sx, sy`` in {+1, -1}."""
        return Poly({e: c * (sx ** e[0]) * (sy ** e[1]) for e, c in self.terms.items()})

    def shift_x(self, dx):
        """Return ``p(x + dx, y, a1, a2)`` by binomial re-expansion."""
        t = {}
        for (i, j, k, l), c in self.terms.items():
            for m in range(i + 1):
                e = (m, j, k, l)
                t[e] = t.get(e, 0.0) + c * comb(i, m) * dx ** (i - m)
        return Poly({e: c for e, c in t.items() if c != 0.0})

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def evaluate(self, x, y, a1=0.0, a2=0.0):
        return sum(c * x**i * y**j * a1**k * a2**l for (i, j, k, l), c in self.terms.items())


def term_table(f: Poly, g: Poly):
    """Pack a pair of polynomials into ``(exps, coef)`` arrays for the kernels.

    ``exps`` has shape ``(n, 4)`` and ``coef`` shape ``(n, 2)``; column 0 of
    ``coef`` holds the f coefficient, column 1 the g coefficient.
    """
    keys = sorted(set(f.terms) | set(g.terms))
    if not keys:
        keys = [_ZERO]
    exps = np.array(keys, dtype=np.int64).reshape(-1, NVARS)
    coef = np.array([[f.terms.get(k, 0.0), g.terms.get(k, 0.0)] for k in keys], dtype=np.float64)
    return exps, coef
