"""Event-driven integration of Filippov trajectories.

Standard arcs are integrated in one zone until they reach the boundary; the
Filippov convention then decides whether the trajectory crosses, slides, or
(at a visible fold touched from its own side) simply grazes and continues.
Sliding arcs follow the scalar sliding velocity until a fold endpoint, where
the trajectory is ejected into the zone whose fold is visible.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import MaxEventsExceeded, NoHit, NoReturn, NumericalError, StepSizeUnderflow
from .fields import FilippovSystem, _alpha, lie_derivatives
from .options import DEFAULT, IntegratorOptions

UPPER, LOWER, SLIDING = "Upper", "Lower", "Sliding"
_ZONE = {UPPER: 0, LOWER: 1}


@dataclass(frozen=True)
class Section:
    """Line ``y = value`` (horizontal) or ``x = value`` (vertical).

    Only crossings whose other coordinate lies in ``[lo, hi]`` count. A
    nonzero ``direction`` restricts to crossings where the section function
    (``y - value`` or ``x - value``) increases (+1) or decreases (-1) along
    the integration time.
    """

    kind: str
    value: float
    lo: float = -np.inf
    hi: float = np.inf
    direction: int = 0

    def __post_init__(self):
        if self.kind not in ("horizontal", "vertical"):
            raise ValueError("section kind must be 'horizontal' or 'vertical'")

    def row(self):
        kind = K.EV_HLINE if self.kind == "horizontal" else K.EV_VLINE
        return [kind, self.value, self.direction, self.lo, self.hi, 0.0]

    def reversed(self) -> "Section":
        return Section(self.kind, self.value, self.lo, self.hi, -self.direction)


# -- thin kernel wrapper ---------------------------------------------------

@dataclass
class KernelRun:
    status: int
    t: float
    state: np.ndarray
    event: int
    touched: bool
    times: np.ndarray | None
    states: np.ndarray | None
    h: float
    steps: int


_EMPTY_T = np.empty(0)
_EMPTY_S = np.empty((0, 1))
_NO_EVENTS = np.empty((0, 6))


def run_kernel(sys: FilippovSystem, mode: int, zone: int, s0, t_max: float, alpha,
               opts: IntegratorOptions, events=(), sgn: float = 1.0, record: bool = False,
               h_init: float = 0.0, capacity: int = 200_000) -> KernelRun:
    """Call the compiled integrator and convert failures into exceptions."""
    a1, a2 = _alpha(alpha)
    s0 = np.asarray(s0, dtype=float)
    evs = np.array(events, dtype=float).reshape(-1, 6) if len(events) else _NO_EVENTS
    if record:
        rec_t = np.empty(capacity)
        rec_s = np.empty((capacity, s0.size))
    else:
        rec_t, rec_s = _EMPTY_T, _EMPTY_S
    exu, cfu, exl, cfl = sys.tables()
    status, t, s, ev, touched, nrec, h, steps = K.integrate(
        mode, zone, exu, cfu, exl, cfl, a1, a2, float(sgn), s0, float(t_max),
        opts.rel_tol, opts.abs_tol, opts.max_step, float(h_init), evs, opts.event_tol,
        opts.graze_depth, opts.max_steps, rec_t, rec_s)
    if status == K.STATUS_UNDERFLOW:
        raise StepSizeUnderflow("step size underflow", t=t, state=s.tolist())
    if status == K.STATUS_NONFINITE:
        raise NumericalError("non-finite state during integration", t=t)
    return KernelRun(status, t, s, ev, touched, rec_t[:nrec].copy() if record else None,
                     rec_s[:nrec].copy() if record else None, h, steps)


# -- trajectories ----------------------------------------------------------

@dataclass
class EventRecord:
    kind: str
    t: float
    x: float
    y: float


@dataclass
class Arc:
    """One smooth piece of a hybrid trajectory."""

    kind: str
    t: np.ndarray
    xy: np.ndarray
    entry_event: str
    exit_event: str = ""

    @property
    def start(self):
        return self.xy[0]

    @property
    def end(self):
        return self.xy[-1]


@dataclass
class HybridTrajectory:
    arcs: list = field(default_factory=list)
    events: list = field(default_factory=list)
    total_time: float = 0.0
    stopped: str = ""

    @property
    def end(self):
        return self.arcs[-1].end

    def events_of(self, kind):
        return [e for e in self.events if e.kind == kind]

    @property
    def section_hits(self):
        return self.events_of("SectionHit")

    def kinds(self):
        return [a.kind for a in self.arcs]

    def samples(self):
        """Concatenated ``(t, x, y)`` rows."""
        return np.vstack([np.column_stack([a.t, a.xy]) for a in self.arcs])

    def to_csv(self, path=None) -> str:
        """Write ``t,x,y,arc_kind,event`` rows; the event is tagged on the arc's last sample."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["t", "x", "y", "arc_kind", "event"])
        for arc in self.arcs:
            n = len(arc.t)
            for i in range(n):
                ev = ""
                if i == 0 and arc.entry_event and arc is self.arcs[0]:
                    ev = arc.entry_event
                if i == n - 1:
                    ev = arc.exit_event
                w.writerow([repr(float(arc.t[i])), repr(float(arc.xy[i, 0])),
                            repr(float(arc.xy[i, 1])), arc.kind, ev])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _boundary_g(sys, x, alpha):
    gp = sys.upper(x, 0.0, alpha)[1]
    gm = sys.lower(x, 0.0, alpha)[1]
    return float(gp), float(gm)


def _initial_kind(sys, x, y, side_hint, alpha, opts):
    if y > 0:
        return UPPER
    if y < 0:
        return LOWER
    gp, gm = _boundary_g(sys, x, alpha)
    tau = opts.tangency_tol
    hint = {"upper": UPPER, "lower": LOWER, UPPER: UPPER, LOWER: LOWER,
            "sliding": SLIDING, SLIDING: SLIDING}.get(side_hint)
    if abs(gp) <= tau or abs(gm) <= tau:
        if hint is not None:
            return hint
        if abs(gp) <= tau and lie_derivatives(sys, x, "upper", alpha)[1] > 0:
            return UPPER
        if abs(gm) <= tau and lie_derivatives(sys, x, "lower", alpha)[1] < 0:
            return LOWER
        return UPPER if gp > 0 else LOWER
    if gp > 0 and gm > 0:
        return UPPER
    if gp < 0 and gm < 0:
        return LOWER
    if gp < 0 < gm:
        return SLIDING
    # unstable sliding: forward motion is not unique, honour the hint
    return hint if hint is not None else SLIDING


def _is_graze(sys, x, kind, alpha, opts):
    """Touch of a visible fold from its own side within integration noise."""
    side = "upper" if kind == UPPER else "lower"
    zh, z2h = lie_derivatives(sys, x, side, alpha)
    visible = z2h > 0 if kind == UPPER else z2h < 0
    if not visible:
        return False
    if abs(zh) <= opts.tangency_tol:
        return True
    # excursion across the boundary of the local quadratic model
    depth = zh * zh / (2.0 * abs(z2h))
    return depth <= opts.graze_depth


def flow(sys: FilippovSystem, start, side_hint=None, t_max: float = 10.0, alpha=None,
         opts: IntegratorOptions = DEFAULT, section: Section | None = None,
         max_section_hits: int | None = None, record: bool = True) -> HybridTrajectory:
    """Integrate a Filippov trajectory.

    Parameters
    ----------
    sys : FilippovSystem
    start : sequence of two floats
    side_hint : {'upper', 'lower', 'sliding'}, optional
        Initial arc when ``start`` lies on the boundary and the
        classification alone does not decide it.
    t_max : float
        Time budget.
    section : Section, optional
        Non-terminal section whose crossings are recorded as ``SectionHit``.
    max_section_hits : int, optional
        Stop after this many section hits.

    Returns
    -------
    HybridTrajectory
    """
    x, y = float(start[0]), float(start[1])
    if not (np.isfinite(x) and np.isfinite(y)):
        raise NumericalError("non-finite start point")
    traj = HybridTrajectory()
    kind = _initial_kind(sys, x, y, side_hint, alpha, opts)
    entry = "Start"
    t = 0.0
    n_events = 0
    h_init = 0.0
    cap = 200_000 if record else 0
    sec_rows = [section.row()] if section is not None else []

    def push(arc_kind, times, states, entry_event):
        if states.shape[1] == 1:
            xy = np.column_stack([states[:, 0], np.zeros(len(states))])
        else:
            xy = states[:, :2].copy()
        arc = Arc(arc_kind, t + times, xy, entry_event)
        traj.arcs.append(arc)
        return arc

    def count():
        nonlocal n_events
        n_events += 1
        if n_events > opts.max_events:
            raise MaxEventsExceeded("too many events", max_events=opts.max_events, t=t)

    while True:
        remaining = t_max - t
        if remaining <= 0:
            traj.stopped = "TimeOut"
            if traj.arcs:
                traj.arcs[-1].exit_event = "TimeOut"
            break
        if kind in (UPPER, LOWER):
            zone = _ZONE[kind]
            rows = [[K.EV_HLINE, 0.0, -1.0 if kind == UPPER else 1.0, -np.inf, np.inf, 1.0]] + sec_rows
            res = run_kernel(sys, K.MODE_PLANAR, zone, [x, y], remaining, alpha, opts,
                             rows, 1.0, True, h_init, max(cap, 2))
        else:
            rows = [[K.EV_SLIDE_EXIT, 0.0, 1.0, -np.inf, np.inf, 0.0]]
            res = run_kernel(sys, K.MODE_SLIDE, 0, [x], remaining, alpha, opts,
                             rows, 1.0, True, h_init, max(cap, 2))
        if not record:
            res.times = res.times[[0, -1]] if len(res.times) > 1 else res.times
            res.states = res.states[[0, -1]] if len(res.states) > 1 else res.states
        arc = push(kind, res.times, res.states, entry)
        t_end = t + res.t
        if res.status == K.STATUS_MAXSTEPS:
            raise NumericalError("maximum number of steps exceeded", t=t_end)
        if res.status == K.STATUS_TMAX:
            arc.exit_event = "TimeOut"
            traj.stopped = "TimeOut"
            t = t_end
            break
        if res.status == K.STATUS_PSEUDO:
            arc.exit_event = "PseudoEquilibrium"
            traj.events.append(EventRecord("PseudoEquilibrium", t_end, float(res.state[0]), 0.0))
            traj.stopped = "PseudoEquilibrium"
            t = t_end
            break
        h_init = res.h
        t = t_end
        count()
        if kind == SLIDING:
            x = float(res.state[0])
            y = 0.0
            arc.xy[-1] = (x, 0.0)
            gp, gm = _boundary_g(sys, x, alpha)
            if abs(gp) <= abs(gm):
                nxt = UPPER
                vis = lie_derivatives(sys, x, "upper", alpha)[1] > 0
            else:
                nxt = LOWER
                vis = lie_derivatives(sys, x, "lower", alpha)[1] < 0
            if not vis:
                traj.events.append(EventRecord("InvisibleFoldExit", t, x, 0.0))
            arc.exit_event = "FoldExit"
            traj.events.append(EventRecord("FoldExit", t, x, 0.0))
            kind, entry = nxt, "FoldExit"
            h_init = 0.0
            continue
        x, y = float(res.state[0]), float(res.state[1])
        if res.event == 1:
            arc.exit_event = "SectionHit"
            traj.events.append(EventRecord("SectionHit", t, x, y))
            entry = "SectionHit"
            if max_section_hits is not None and len(traj.section_hits) >= max_section_hits:
                traj.stopped = "SectionHit"
                break
            continue
        if res.touched:
            arc.exit_event = "Grazing"
            traj.events.append(EventRecord("Grazing", t, x, y))
            entry = "Grazing"
            continue
        # boundary hit
        y = 0.0
        arc.xy[-1] = (x, 0.0)
        if _is_graze(sys, x, kind, alpha, opts):
            arc.exit_event = "Grazing"
            traj.events.append(EventRecord("Grazing", t, x, 0.0))
            entry = "Grazing"
            continue
        gp, gm = _boundary_g(sys, x, alpha)
        if kind == UPPER:
            other = gm
            cross = other <= 0.0
        else:
            other = gp
            cross = other >= 0.0
        if not cross and abs(other) <= opts.tangency_tol:
            # landing on a visible fold of the other side: the orbit leaves along it
            oside = "lower" if kind == UPPER else "upper"
            z2h = lie_derivatives(sys, x, oside, alpha)[1]
            cross = z2h < 0 if kind == UPPER else z2h > 0
        if cross:
            arc.exit_event = "BoundaryHit"
            traj.events.append(EventRecord("BoundaryHit", t, x, 0.0))
            kind = LOWER if kind == UPPER else UPPER
            entry = "BoundaryHit"
        else:
            arc.exit_event = "SlidingEntry"
            traj.events.append(EventRecord("SlidingEntry", t, x, 0.0))
            kind = SLIDING
            entry = "SlidingEntry"
            h_init = 0.0
    traj.total_time = t
    return traj


# -- sections and maps -----------------------------------------------------

def hit_section(sys: FilippovSystem, start, side: str, section: Section, direction: str = "forward",
                alpha=None, opts: IntegratorOptions = DEFAULT, t_budget: float = 100.0):
    """First crossing of ``section`` by the smooth flow of one side.

    The section's ``direction`` is interpreted along the integration time.

    Returns
    -------
    (t_hit, p_hit)
        ``t_hit`` is negative for backward integration.

    Raises
    ------
    NoHit
    """
    sgn = 1.0 if direction == "forward" else -1.0
    zone = 0 if side in ("upper", UPPER) else 1
    res = run_kernel(sys, K.MODE_PLANAR, zone, [start[0], start[1]], t_budget, alpha, opts,
                     [section.row()], sgn)
    if res.status != K.STATUS_EVENT:
        raise NoHit("section not reached", t_budget=t_budget)
    return sgn * res.t, res.state[:2].copy()


def poincare_map(sys: FilippovSystem, section: Section, y0: float, alpha=None,
                 opts: IntegratorOptions = DEFAULT, derivative: str = "fd",
                 side: str = "upper", t_budget: float = 100.0):
    """First-return map on a vertical section ``x = c`` of one side's flow.

    The crossing direction is taken from the field at the starting point
    unless the section fixes one.

    Parameters
    ----------
    derivative : {'fd', 'divergence', 'none'}
        ``'fd'`` uses a central difference with step ``1e-6*max(1, |y0|)``;
        ``'divergence'`` uses ``exp(int div) * f(p0) / f(p1)``.

    Returns
    -------
    (y1, dy1_dy0)
    """
    if section.kind != "vertical":
        raise ValueError("poincare_map needs a vertical section")
    zone = 0 if side == "upper" else 1
    fld = sys.side(side)
    c = section.value
    direction = section.direction or int(np.sign(fld(c, y0, alpha)[0]))
    if direction == 0:
        raise NoReturn("flow is tangent to the section at the start point")
    row = [K.EV_VLINE, c, direction, section.lo, section.hi, 0.0]

    def ret(y, quad=False):
        if quad:
            res = run_kernel(sys, K.MODE_QUAD, zone, [c, y, 0, 0, 0, 0], t_budget, alpha, opts, [row])
        else:
            res = run_kernel(sys, K.MODE_PLANAR, zone, [c, y], t_budget, alpha, opts, [row])
        if res.status != K.STATUS_EVENT:
            raise NoReturn("no return to the section", y0=y)
        return res

    if derivative == "divergence":
        res = ret(y0, quad=True)
        y1 = float(res.state[1])
        d = np.exp(res.state[2]) * fld(c, y0, alpha)[0] / fld(c, y1, alpha)[0]
        return y1, float(d)
    y1 = float(ret(y0).state[1])
    if derivative == "none":
        return y1, float("nan")
    h = 1e-6 * max(1.0, abs(y0))
    d = (ret(y0 + h).state[1] - ret(y0 - h).state[1]) / (2 * h)
    return y1, float(d)
