"""Compiled integration kernels.

A Dormand-Prince 5(4) integrator specialised to polynomial planar fields,
with terminal event location and three right-hand-side modes:

``MODE_PLANAR``
    state ``(x, y)`` driven by one smooth field.
``MODE_QUAD``
    state ``(x, y, L, K1, K2, Kn)``; ``L`` integrates ``sgn * div`` and the
    ``K`` components integrate ``exp(-L)`` times the Melnikov-type integrands
    ``f g_a1 - g f_a1``, ``f g_a2 - g f_a2`` and ``g f_x - f g_x``.
``MODE_SLIDE``
    scalar state ``x`` on the boundary ``y = 0`` driven by the sliding
    velocity of the Filippov convex combination.

Events are located on the continuous extension first and then polished by
taking genuine Runge-Kutta sub-steps from the start of the accepted step.
Line events can also report a *touch*: an extremum of the event function
inside a step whose value stays within ``touch_tol`` of zero without
changing sign (a graze that never numerically crosses).
"""

import numpy as np
from numba import njit

MODE_PLANAR = 0
MODE_QUAD = 1
MODE_SLIDE = 2

EV_HLINE = 0  # y - c, window on x
EV_VLINE = 1  # x - c, window on y
EV_SLIDE_EXIT = 2  # g+(x,0) * g-(x,0)

STATUS_TMAX = 0
STATUS_EVENT = 1
STATUS_MAXSTEPS = 2
STATUS_UNDERFLOW = 3
STATUS_NONFINITE = 4
STATUS_PSEUDO = 5

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40


@njit(cache=True)
def poly_eval(exps, coef, x, y, a1, a2, out):
    """Fill ``out`` with ``f, f_x, f_y, f_a1, f_a2, g, g_x, g_y, g_a1, g_a2``."""
    for m in range(10):
        out[m] = 0.0
    v0 = x
    v1 = y
    v2 = a1
    v3 = a2
    for r in range(exps.shape[0]):
        i = exps[r, 0]
        j = exps[r, 1]
        k = exps[r, 2]
        l = exps[r, 3]
        pi = v0**i
        pj = v1**j
        pk = v2**k
        pl = v3**l
        base = pi * pj * pk * pl
        dx = i * v0 ** (i - 1) * pj * pk * pl if i > 0 else 0.0
        dy = j * pi * v1 ** (j - 1) * pk * pl if j > 0 else 0.0
        dk = k * pi * pj * v2 ** (k - 1) * pl if k > 0 else 0.0
        dl = l * pi * pj * pk * v3 ** (l - 1) if l > 0 else 0.0
        for c in range(2):
            w = coef[r, c]
            if w != 0.0:
                o = 5 * c
                out[o] += w * base
                out[o + 1] += w * dx
                out[o + 2] += w * dy
                out[o + 3] += w * dk
                out[o + 4] += w * dl


@njit(cache=True)
def poly_fg(exps, coef, x, y, a1, a2):
    f = 0.0
    g = 0.0
    for r in range(exps.shape[0]):
        base = x ** exps[r, 0] * y ** exps[r, 1] * a1 ** exps[r, 2] * a2 ** exps[r, 3]
        f += coef[r, 0] * base
        g += coef[r, 1] * base
    return f, g


@njit(cache=True)
def rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, ds, work):
    if mode == MODE_SLIDE:
        fp, gp = poly_fg(exu, cfu, s[0], 0.0, a1, a2)
        fm, gm = poly_fg(exl, cfl, s[0], 0.0, a1, a2)
        den = gp - gm
        if den == 0.0:
            ds[0] = np.nan
            return
        mu = gp / den
        ds[0] = sgn * (mu * fm + (1.0 - mu) * fp)
        return
    if zone == 0:
        ex = exu
        cf = cfu
    else:
        ex = exl
        cf = cfl
    if mode == MODE_PLANAR:
        f, g = poly_fg(ex, cf, s[0], s[1], a1, a2)
        ds[0] = sgn * f
        ds[1] = sgn * g
        return
    poly_eval(ex, cf, s[0], s[1], a1, a2, work)
    f = work[0]
    g = work[5]
    ds[0] = sgn * f
    ds[1] = sgn * g
    ds[2] = sgn * (work[1] + work[7])
    w = np.exp(-s[2])
    ds[3] = w * (f * work[8] - g * work[3])
    ds[4] = w * (f * work[9] - g * work[4])
    ds[5] = w * (g * work[1] - f * work[6])


@njit(cache=True)
def event_value(kind, c, s, exu, cfu, exl, cfl, a1, a2):
    if kind == EV_HLINE:
        return s[1] - c
    if kind == EV_VLINE:
        return s[0] - c
    _, gp = poly_fg(exu, cfu, s[0], 0.0, a1, a2)
    _, gm = poly_fg(exl, cfl, s[0], 0.0, a1, a2)
    return gp * gm


@njit(cache=True)
def in_window(kind, s, lo, hi):
    if kind == EV_HLINE:
        return lo <= s[0] <= hi
    if kind == EV_VLINE:
        return lo <= s[1] <= hi
    return True


@njit(cache=True)
def crossed(v0, v1, d):
    up = v0 < 0.0 and v1 >= 0.0
    down = v0 > 0.0 and v1 <= 0.0
    if d > 0:
        return up
    if d < 0:
        return down
    return up or down


@njit(cache=True)
def dp_step(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, h, K, ynew, err, tmp, work):
    """One DP5 step of size ``h``; ``K[0]`` must hold ``rhs(s)`` on entry."""
    n = s.shape[0]
    for i in range(n):
        tmp[i] = s[i] + h * A21 * K[0, i]
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, tmp, K[1], work)
    for i in range(n):
        tmp[i] = s[i] + h * (A31 * K[0, i] + A32 * K[1, i])
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, tmp, K[2], work)
    for i in range(n):
        tmp[i] = s[i] + h * (A41 * K[0, i] + A42 * K[1, i] + A43 * K[2, i])
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, tmp, K[3], work)
    for i in range(n):
        tmp[i] = s[i] + h * (A51 * K[0, i] + A52 * K[1, i] + A53 * K[2, i] + A54 * K[3, i])
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, tmp, K[4], work)
    for i in range(n):
        tmp[i] = s[i] + h * (A61 * K[0, i] + A62 * K[1, i] + A63 * K[2, i] + A64 * K[3, i] + A65 * K[4, i])
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, tmp, K[5], work)
    for i in range(n):
        ynew[i] = s[i] + h * (B1 * K[0, i] + B3 * K[2, i] + B4 * K[3, i] + B5 * K[4, i] + B6 * K[5, i])
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, ynew, K[6], work)
    for i in range(n):
        err[i] = h * (E1 * K[0, i] + E3 * K[2, i] + E4 * K[3, i] + E5 * K[4, i] + E6 * K[5, i] + E7 * K[6, i])


@njit(cache=True)
def hermite(s0, k0, s1, k1, h, theta, out):
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    for i in range(s0.shape[0]):
        out[i] = h00 * s0[i] + h10 * h * k0[i] + h01 * s1[i] + h11 * h * k1[i]


@njit(cache=True)
def hermite_slope(s0, k0, s1, k1, h, theta, i):
    t2 = theta * theta
    return ((6 * t2 - 6 * theta) * s0[i] + (3 * t2 - 4 * theta + 1) * h * k0[i]
            + (-6 * t2 + 6 * theta) * s1[i] + (3 * t2 - 2 * theta) * h * k1[i])


@njit(cache=True)
def initial_step(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, f0, rtol, atol, work):
    n = s.shape[0]
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(s[i])
        d0 += (s[i] / sc) ** 2
        d1 += (f0[i] / sc) ** 2
    d0 = np.sqrt(d0 / n)
    d1 = np.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    s1 = np.empty(n)
    f1 = np.empty(n)
    for i in range(n):
        s1[i] = s[i] + h0 * f0[i]
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s1, f1, work)
    d2 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(s[i])
        d2 += ((f1[i] - f0[i]) / sc) ** 2
    d2 = np.sqrt(d2 / n) / h0
    m = max(d1, d2)
    if m <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / m) ** 0.2
    return min(100 * h0, h1)


@njit(cache=True)
def polish(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, K, Ks, hh, kind, c, a, fa, b, fb,
           theta, ev_tol, trial, err, tmp, work):
    """Refine an event root in ``[a, b]`` (step fractions) with true RK sub-steps.

    Illinois-safeguarded regula falsi started from ``theta``; ``trial``
    holds the state at the returned fraction.
    """
    side = 0
    for it in range(60):
        if it > 0:
            theta = (a * fb - b * fa) / (fb - fa)
            if not (a < theta < b):
                theta = 0.5 * (a + b)
        Ks[0, :] = K[0, :]
        dp_step(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, theta * hh, Ks, trial, err, tmp, work)
        ft = event_value(kind, c, trial, exu, cfu, exl, cfl, a1, a2)
        if abs(ft) <= ev_tol or (b - a) < 1e-15:
            break
        if (ft < 0.0) == (fa < 0.0):
            a = theta
            fa = ft
            if side == -1:
                fb *= 0.5
            side = -1
        else:
            b = theta
            fb = ft
            if side == 1:
                fa *= 0.5
            side = 1
    return theta


@njit(cache=True)
def integrate(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s0, t_max, rtol, atol,
              h_max, h_init, evs, ev_tol, touch_tol, max_steps, rec_t, rec_s):
    """Integrate until ``t_max``, the first accepted event, or a failure.

    ``evs`` has one row ``(kind, c, direction, lo, hi, touch)`` per terminal
    event. An event is armed only once its value has left the band
    ``2 * ev_tol`` so that a trajectory started on an event surface does not
    re-trigger; the sliding exit is armed from the start. Touch detection (rows with ``touch != 0``) is skipped on the
    first step so that a restart from a touch point cannot re-fire.

    Returns ``(status, t, state, event_index, touched, n_recorded, h_last,
    n_steps)``.
    """
    n = s0.shape[0]
    s = s0.copy()
    K = np.empty((7, n))
    Ks = np.empty((7, n))
    ynew = np.empty(n)
    err = np.empty(n)
    tmp = np.empty(n)
    trial = np.empty(n)
    herm = np.empty(n)
    work = np.empty(10)
    rhs(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, K[0], work)

    nev = evs.shape[0]
    vprev = np.empty(nev)
    vnew = np.empty(nev)
    armed = np.zeros(nev, dtype=np.bool_)
    for e in range(nev):
        vprev[e] = event_value(int(evs[e, 0]), evs[e, 1], s, exu, cfu, exl, cfl, a1, a2)
        armed[e] = abs(vprev[e]) > 2.0 * ev_tol
        if int(evs[e, 0]) == EV_SLIDE_EXIT:
            # sliding starts strictly inside a segment, so exits next to an
            # endpoint fold must be caught from the first step
            armed[e] = True

    cap = rec_t.shape[0]
    nrec = 0
    if cap > 0:
        rec_t[0] = 0.0
        for i in range(n):
            rec_s[0, i] = s[i]
        nrec = 1

    t = 0.0
    if h_init > 0.0:
        h = h_init
    else:
        h = initial_step(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, K[0], rtol, atol, work)
    h = min(h, h_max)
    status = STATUS_TMAX
    ev_idx = -1
    touched = False
    steps = 0

    for i in range(n):
        if not np.isfinite(K[0, i]):
            return STATUS_NONFINITE, t, s, ev_idx, False, nrec, h, steps

    while True:
        if t >= t_max:
            status = STATUS_TMAX
            break
        if steps >= max_steps:
            status = STATUS_MAXSTEPS
            break
        hh = min(h, h_max, t_max - t)
        dp_step(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, hh, K, ynew, err, tmp, work)
        en = 0.0
        for i in range(n):
            sc = atol + rtol * max(abs(s[i]), abs(ynew[i]))
            en += (err[i] / sc) ** 2
        en = np.sqrt(en / n)
        if not np.isfinite(en):
            h = 0.25 * hh
            if h < 1e-14 * max(1.0, abs(t)):
                status = STATUS_NONFINITE
                break
            continue
        if en > 1.0:
            h = hh * max(0.2, 0.9 * en ** -0.2)
            if h < 1e-14 * max(1.0, abs(t)):
                status = STATUS_UNDERFLOW
                break
            continue
        steps += 1

        # event detection on the accepted step
        best_e = -1
        best_theta = 2.0
        for e in range(nev):
            kind = int(evs[e, 0])
            vnew[e] = event_value(kind, evs[e, 1], ynew, exu, cfu, exl, cfl, a1, a2)
            if not armed[e] and kind != EV_SLIDE_EXIT:
                # started on the surface: the orbit may leave the band and
                # come back across it within this very step
                comp = 1 if kind == EV_HLINE else 0
                if K[0, comp] * K[6, comp] >= 0.0:
                    continue
                lo = 0.0
                hi = 1.0
                slo = K[0, comp]
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    sm = hermite_slope(s, K[0], ynew, K[6], hh, mid, comp)
                    if (sm < 0.0) == (slo < 0.0):
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-14:
                        break
                tm = 0.5 * (lo + hi)
                hermite(s, K[0], ynew, K[6], hh, tm, herm)
                vm = event_value(kind, evs[e, 1], herm, exu, cfu, exl, cfl, a1, a2)
                if abs(vm) <= 2.0 * ev_tol or not crossed(vm, vnew[e], evs[e, 2]):
                    continue
                lo = tm
                hi = 1.0
                vlo = vm
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    hermite(s, K[0], ynew, K[6], hh, mid, herm)
                    vmid = event_value(kind, evs[e, 1], herm, exu, cfu, exl, cfl, a1, a2)
                    if (vmid < 0.0) == (vlo < 0.0) and vmid != 0.0:
                        lo = mid
                        vlo = vmid
                    else:
                        hi = mid
                    if hi - lo < 1e-14:
                        break
                theta = polish(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, K, Ks, hh, kind,
                               evs[e, 1], tm, vm, 1.0, vnew[e], 0.5 * (lo + hi), ev_tol, trial,
                               err, tmp, work)
                if in_window(kind, trial, evs[e, 3], evs[e, 4]) and theta < best_theta:
                    best_theta = theta
                    best_e = e
                continue
            if not crossed(vprev[e], vnew[e], evs[e, 2]):
                continue
            # root of the event function along the Hermite extension
            lo = 0.0
            hi = 1.0
            vlo = vprev[e]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                hermite(s, K[0], ynew, K[6], hh, mid, herm)
                vm = event_value(kind, evs[e, 1], herm, exu, cfu, exl, cfl, a1, a2)
                if (vm < 0.0) == (vlo < 0.0) and vm != 0.0:
                    lo = mid
                    vlo = vm
                else:
                    hi = mid
                if hi - lo < 1e-14:
                    break
            theta = 0.5 * (lo + hi)
            theta = polish(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, K, Ks, hh, kind,
                           evs[e, 1], 0.0, vprev[e], 1.0, vnew[e], theta, ev_tol, trial, err, tmp, work)
            if in_window(kind, trial, evs[e, 3], evs[e, 4]) and theta < best_theta:
                best_theta = theta
                best_e = e

        if best_e < 0 and steps > 1:
            for e in range(nev):
                kind = int(evs[e, 0])
                if evs[e, 5] == 0.0 or kind == EV_SLIDE_EXIT:
                    continue
                comp = 1 if kind == EV_HLINE else 0
                v0 = vprev[e]
                v1 = vnew[e]
                d0 = K[0, comp]
                d1 = K[6, comp]
                if not (v0 * d0 < 0.0 and v1 * d1 > 0.0 and v0 * v1 > 0.0):
                    continue
                lo = 0.0
                hi = 1.0
                slo = hermite_slope(s, K[0], ynew, K[6], hh, 0.0, comp)
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    sm = hermite_slope(s, K[0], ynew, K[6], hh, mid, comp)
                    if (sm < 0.0) == (slo < 0.0):
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-14:
                        break
                theta = 0.5 * (lo + hi)
                hermite(s, K[0], ynew, K[6], hh, theta, herm)
                vm = event_value(kind, evs[e, 1], herm, exu, cfu, exl, cfl, a1, a2)
                if vm * v0 < 0.0 and abs(vm) > touch_tol:
                    # two crossings inside one step: take the first
                    if not (armed[e] and crossed(v0, vm, evs[e, 2])):
                        continue
                    lo = 0.0
                    hi = theta
                    vlo = v0
                    for _ in range(60):
                        mid = 0.5 * (lo + hi)
                        hermite(s, K[0], ynew, K[6], hh, mid, herm)
                        vmid = event_value(kind, evs[e, 1], herm, exu, cfu, exl, cfl, a1, a2)
                        if (vmid < 0.0) == (vlo < 0.0) and vmid != 0.0:
                            lo = mid
                            vlo = vmid
                        else:
                            hi = mid
                        if hi - lo < 1e-14:
                            break
                    th = polish(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, K, Ks, hh, kind,
                                evs[e, 1], 0.0, v0, theta, vm, 0.5 * (lo + hi), ev_tol, trial, err, tmp, work)
                    if in_window(kind, trial, evs[e, 3], evs[e, 4]) and th < best_theta:
                        best_theta = th
                        best_e = e
                        touched = False
                    continue
                if abs(vm) <= touch_tol and in_window(kind, herm, evs[e, 3], evs[e, 4]) \
                        and theta < best_theta:
                    best_theta = theta
                    best_e = e
                    touched = True

        if best_e >= 0:
            Ks[0, :] = K[0, :]
            dp_step(mode, zone, exu, cfu, exl, cfl, a1, a2, sgn, s, best_theta * hh, Ks, trial, err, tmp, work)
            s[:] = trial
            t += best_theta * hh
            if cap > 0 and nrec < cap:
                rec_t[nrec] = t
                rec_s[nrec, :] = s
                nrec += 1
            status = STATUS_EVENT
            ev_idx = best_e
            h = hh
            break

        for e in range(nev):
            vprev[e] = vnew[e]
            if not armed[e] and abs(vnew[e]) > 2.0 * ev_tol:
                armed[e] = True
        t += hh
        s[:] = ynew
        K[0, :] = K[6, :]
        if cap > 0 and nrec < cap:
            rec_t[nrec] = t
            rec_s[nrec, :] = s
            nrec += 1
        ok = True
        for i in range(n):
            if not np.isfinite(s[i]):
                ok = False
        if not ok:
            status = STATUS_NONFINITE
            break
        if mode == MODE_SLIDE and abs(K[0, 0]) < 1e-12:
            status = STATUS_PSEUDO
            break
        if en == 0.0:
            fac = 5.0
        else:
            fac = min(5.0, max(0.2, 0.9 * en ** -0.2))
        h = hh * fac
    return status, t, s, ev_idx, touched, nrec, h, steps
