"""Compiled integration kernels for the secular pseudospin dynamics.

The public classical API lives in classical.py; this module holds the
numba-compiled Dormand-Prince 5(4) stepper and the bulk drivers (surface of
section sweeps, Benettin exponent) whose Python-level overhead would
otherwise dominate.  The state vector is y = (I1, I2) flattened to six
components; the Hamiltonian is the quadratic form

    H(y) = const + b1.I1 + b2.I2 + I1.C I2 + (I1.D I1 + I2.D I2)/2

and the equations of motion are I_i' = grad_i H x I_i, which conserve both
norms and H exactly.
"""

import numba as nb
import numpy as np

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@nb.njit(cache=True)
def rhs(y, b1, b2, cmat, dmat, out):
    g1x = b1[0] + cmat[0, 0] * y[3] + cmat[0, 1] * y[4] + cmat[0, 2] * y[5] \
        + dmat[0, 0] * y[0] + dmat[0, 1] * y[1] + dmat[0, 2] * y[2]
    g1y = b1[1] + cmat[1, 0] * y[3] + cmat[1, 1] * y[4] + cmat[1, 2] * y[5] \
        + dmat[1, 0] * y[0] + dmat[1, 1] * y[1] + dmat[1, 2] * y[2]
    g1z = b1[2] + cmat[2, 0] * y[3] + cmat[2, 1] * y[4] + cmat[2, 2] * y[5] \
        + dmat[2, 0] * y[0] + dmat[2, 1] * y[1] + dmat[2, 2] * y[2]
    g2x = b2[0] + cmat[0, 0] * y[0] + cmat[1, 0] * y[1] + cmat[2, 0] * y[2] \
        + dmat[0, 0] * y[3] + dmat[0, 1] * y[4] + dmat[0, 2] * y[5]
    g2y = b2[1] + cmat[0, 1] * y[0] + cmat[1, 1] * y[1] + cmat[2, 1] * y[2] \
        + dmat[1, 0] * y[3] + dmat[1, 1] * y[4] + dmat[1, 2] * y[5]
    g2z = b2[2] + cmat[0, 2] * y[0] + cmat[1, 2] * y[1] + cmat[2, 2] * y[2] \
        + dmat[2, 0] * y[3] + dmat[2, 1] * y[4] + dmat[2, 2] * y[5]
    out[0] = g1y * y[2] - g1z * y[1]
    out[1] = g1z * y[0] - g1x * y[2]
    out[2] = g1x * y[1] - g1y * y[0]
    out[3] = g2y * y[5] - g2z * y[4]
    out[4] = g2z * y[3] - g2x * y[5]
    out[5] = g2x * y[4] - g2y * y[3]


@nb.njit(cache=True)
def energy(y, const, b1, b2, cmat, dmat):
    val = const
    for i in range(3):
        val += b1[i] * y[i] + b2[i] * y[3 + i]
        for k in range(3):
            val += y[i] * cmat[i, k] * y[3 + k]
            val += 0.5 * (y[i] * dmat[i, k] * y[k] + y[3 + i] * dmat[i, k] * y[3 + k])
    return val


# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_A71, _A73, _A74, _A75, _A76 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


@nb.njit(cache=True)
def _attempt_step(y, f0, h, b1, b2, cmat, dmat, rtol, atol, ynew, fnew):
    """One trial step; returns the scaled error norm.  f0 = rhs(y) on entry,
    fnew = rhs(ynew) on exit (FSAL stage)."""
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    k5 = np.empty(6)
    k6 = np.empty(6)
    tmp = np.empty(6)

    for i in range(6):
        tmp[i] = y[i] + h * _A21 * f0[i]
    rhs(tmp, b1, b2, cmat, dmat, k2)
    for i in range(6):
        tmp[i] = y[i] + h * (_A31 * f0[i] + _A32 * k2[i])
    rhs(tmp, b1, b2, cmat, dmat, k3)
    for i in range(6):
        tmp[i] = y[i] + h * (_A41 * f0[i] + _A42 * k2[i] + _A43 * k3[i])
    rhs(tmp, b1, b2, cmat, dmat, k4)
    for i in range(6):
        tmp[i] = y[i] + h * (_A51 * f0[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
    rhs(tmp, b1, b2, cmat, dmat, k5)
    for i in range(6):
        tmp[i] = y[i] + h * (
            _A61 * f0[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
        )
    rhs(tmp, b1, b2, cmat, dmat, k6)
    for i in range(6):
        ynew[i] = y[i] + h * (
            _A71 * f0[i] + _A73 * k3[i] + _A74 * k4[i] + _A75 * k5[i] + _A76 * k6[i]
        )
    rhs(ynew, b1, b2, cmat, dmat, fnew)

    err = 0.0
    for i in range(6):
        ei = h * (
            _E1 * f0[i]
            + _E3 * k3[i]
            + _E4 * k4[i]
            + _E5 * k5[i]
            + _E6 * k6[i]
            + _E7 * fnew[i]
        )
        ay = abs(y[i])
        an = abs(ynew[i])
        scale = atol + rtol * (ay if ay > an else an)
        err += (ei / scale) ** 2
    return np.sqrt(err / 6.0)


@nb.njit(cache=True)
def integrate_to(y, f0, t0, t1, h, b1, b2, cmat, dmat, rtol, atol):
    """Advance y from t0 to exactly t1 in place; returns the suggested next h.

    f0 must hold rhs(y) on entry and holds rhs at the endpoint on exit.
    """
    t = t0
    ynew = np.empty(6)
    fnew = np.empty(6)
    while t < t1:
        if h > t1 - t:
            h_use = t1 - t
        else:
            h_use = h
        err = _attempt_step(y, f0, h_use, b1, b2, cmat, dmat, rtol, atol, ynew, fnew)
        if err <= 1.0:
            t += h_use
            for i in range(6):
                y[i] = ynew[i]
                f0[i] = fnew[i]
            factor = _MAX_FACTOR if err == 0.0 else _SAFETY * err ** -0.2
            if factor > _MAX_FACTOR:
                factor = _MAX_FACTOR
            h = h_use * factor
        else:
            factor = _SAFETY * err ** -0.2
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h = h_use * factor
        if h < 1e-14:
            h = 1e-14
    return h


@nb.njit(cache=True)
def _hermite(y, ynew, f0, fnew, h, theta, out):
    """Cubic Hermite interpolant on one step, theta in [0, 1]."""
    for i in range(6):
        d = ynew[i] - y[i]
        out[i] = (
            (1.0 - theta) * y[i]
            + theta * ynew[i]
            + theta * (theta - 1.0)
            * ((1.0 - 2.0 * theta) * d + (theta - 1.0) * h * f0[i] + theta * h * fnew[i])
        )


@nb.njit(cache=True)
def psos_run(
    y0,
    const,
    b1,
    b2,
    cmat,
    dmat,
    e1_1,
    e2_1,
    e3_1,
    e1_2,
    e2_2,
    e3_2,
    max_cross,
    t_max,
    h0,
    rtol,
    atol,
):
    """Collect surface-of-section crossings of one trajectory.

    A crossing is an upward sign change of g = I2.e2 (second frame) at a
    point with I2.e1 > 0, i.e. the angle of I2 about its precession axis
    passing through zero with positive rate.  Returns the crossing times,
    (phi1, J1z) coordinates, the achieved crossing count, and the largest
    norm and energy deviations seen at accepted steps.
    """
    y = y0.copy()
    f0 = np.empty(6)
    rhs(y, b1, b2, cmat, dmat, f0)
    ynew = np.empty(6)
    fnew = np.empty(6)
    ycr = np.empty(6)

    t_out = np.empty(max_cross)
    phi1_out = np.empty(max_cross)
    j1z_out = np.empty(max_cross)
    resid_out = np.empty(max_cross)

    e_ref = energy(y, const, b1, b2, cmat, dmat)
    n1_ref = np.sqrt(y[0] ** 2 + y[1] ** 2 + y[2] ** 2)
    n2_ref = np.sqrt(y[3] ** 2 + y[4] ** 2 + y[5] ** 2)
    max_norm_dev = 0.0
    max_energy_dev = 0.0

    g_prev = y[3] * e2_2[0] + y[4] * e2_2[1] + y[5] * e2_2[2]
    t = 0.0
    h = h0
    count = 0
    while t < t_max and count < max_cross:
        h_use = h if h <= t_max - t else t_max - t
        err = _attempt_step(y, f0, h_use, b1, b2, cmat, dmat, rtol, atol, ynew, fnew)
        if err > 1.0:
            factor = _SAFETY * err ** -0.2
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h = h_use * factor
            if h < 1e-14:
                h = 1e-14
            continue

        g_new = ynew[3] * e2_2[0] + ynew[4] * e2_2[1] + ynew[5] * e2_2[2]
        if g_prev < 0.0 and g_new >= 0.0:
            lo, hi = 0.0, 1.0
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                _hermite(y, ynew, f0, fnew, h_use, mid, ycr)
                g_mid = ycr[3] * e2_2[0] + ycr[4] * e2_2[1] + ycr[5] * e2_2[2]
                if g_mid < 0.0:
                    lo = mid
                else:
                    hi = mid
            _hermite(y, ynew, f0, fnew, h_use, hi, ycr)
            c1 = ycr[3] * e1_2[0] + ycr[4] * e1_2[1] + ycr[5] * e1_2[2]
            if c1 > 0.0:
                t_out[count] = t + hi * h_use
                j1z_out[count] = ycr[0] * e3_1[0] + ycr[1] * e3_1[1] + ycr[2] * e3_1[2]
                a = ycr[0] * e1_1[0] + ycr[1] * e1_1[1] + ycr[2] * e1_1[2]
                b = ycr[0] * e2_1[0] + ycr[1] * e2_1[1] + ycr[2] * e2_1[2]
                phi1_out[count] = np.arctan2(b, a)
                g_at = ycr[3] * e2_2[0] + ycr[4] * e2_2[1] + ycr[5] * e2_2[2]
                resid_out[count] = np.arctan2(g_at, c1)
                count += 1

        t += h_use
        for i in range(6):
            y[i] = ynew[i]
            f0[i] = fnew[i]
        g_prev = g_new

        dev = abs(energy(y, const, b1, b2, cmat, dmat) - e_ref)
        if dev > max_energy_dev:
            max_energy_dev = dev
        n1 = np.sqrt(y[0] ** 2 + y[1] ** 2 + y[2] ** 2)
        n2 = np.sqrt(y[3] ** 2 + y[4] ** 2 + y[5] ** 2)
        dn = abs(n1 - n1_ref)
        if abs(n2 - n2_ref) > dn:
            dn = abs(n2 - n2_ref)
        if dn > max_norm_dev:
            max_norm_dev = dn

        factor = _MAX_FACTOR if err == 0.0 else _SAFETY * err ** -0.2
        if factor > _MAX_FACTOR:
            factor = _MAX_FACTOR
        h = h_use * factor

    return (
        t_out[:count],
        phi1_out[:count],
        j1z_out[:count],
        resid_out[:count],
        t,
        max_norm_dev,
        max_energy_dev,
    )


@nb.njit(cache=True)
def benettin_run(y0, z0, const, b1, b2, cmat, dmat, tau, nwin, rtol, atol, h0):
    """Benettin finite-time Lyapunov estimate from a reference and companion.

    Both trajectories are advanced in windows of length tau; after each
    window the log of the separation growth is accumulated and the companion
    is pulled back to the initial distance along the current separation.
    Returns the running estimate after each window.
    """
    y = y0.copy()
    z = z0.copy()
    fy = np.empty(6)
    fz = np.empty(6)
    rhs(y, b1, b2, cmat, dmat, fy)
    rhs(z, b1, b2, cmat, dmat, fz)
    d0 = 0.0
    for i in range(6):
        d0 += (z[i] - y[i]) ** 2
    d0 = np.sqrt(d0)
    hist = np.empty(nwin)
    acc = 0.0
    hy = h0
    hz = h0
    for k in range(nwin):
        hy = integrate_to(y, fy, 0.0, tau, hy, b1, b2, cmat, dmat, rtol, atol)
        hz = integrate_to(z, fz, 0.0, tau, hz, b1, b2, cmat, dmat, rtol, atol)
        d = 0.0
        for i in range(6):
            d += (z[i] - y[i]) ** 2
        d = np.sqrt(d)
        acc += np.log(d / d0)
        hist[k] = acc / ((k + 1) * tau)
        scale = d0 / d
        for i in range(6):
            z[i] = y[i] + (z[i] - y[i]) * scale
        rhs(z, b1, b2, cmat, dmat, fz)
    return hist
