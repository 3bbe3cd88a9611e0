"""Integrator options shared by every module."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class IntegratorOptions:
    """Tolerances and limits for trajectory integration.

    Parameters
    ----------
    rel_tol, abs_tol : float
        Local error tolerances of the Runge-Kutta controller.
    event_tol : float
        Target magnitude of an event function at a located event.
    max_step : float
        Upper bound on the step size.
    max_events : int
        Maximum number of boundary events in one hybrid trajectory.
    max_steps : int
        Maximum number of accepted steps per arc.
    tangency_tol : float
        Threshold on ``|Zh|`` below which a boundary point is a tangency.
    graze_depth : float
        Largest excursion across the boundary, predicted from the local
        quadratic model, that a visible-fold touch may have and still be
        treated as a graze rather than a genuine crossing.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    event_tol: float = 1e-12
    max_step: float = 0.1
    max_events: int = 10_000
    max_steps: int = 1_000_000
    tangency_tol: float = 1e-10
    graze_depth: float = 1e-10

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "event_tol", "max_step", "tangency_tol", "graze_depth"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_events < 1 or self.max_steps < 1:
            raise ValueError("max_events and max_steps must be positive")

    @property
    def eps_int(self) -> float:
        """Nominal integration accuracy used in closure certificates."""
        return self.rel_tol

    def with_(self, **kw) -> "IntegratorOptions":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = IntegratorOptions()
#: tolerances used for cycle and quantity computations
PRECISE = IntegratorOptions(rel_tol=1e-12, abs_tol=1e-14)
