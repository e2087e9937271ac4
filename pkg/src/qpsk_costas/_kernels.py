"""Numba kernels for fixed-step RK4 integration of the loop models.

One kernel per model fidelity.  Each steps the flat state vector with
classical RK4 at a fixed dt and records decimated samples of
(theta_delta, omega_vco, g, Q, I) into preallocated arrays.  All math
here mirrors the reference right-hand sides in dynamics.py; keep the
two in sync.

Kernels return 0 on success, 1 when the state goes non-finite.
"""

import numpy as np
from numba import njit

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def _sgn(v):
    return 1.0 if v >= 0.0 else -1.0


@njit(**_OPTS)
def _data(kind, value, omega_m, t):
    if kind == 0:
        return value
    return _sgn(np.sin(omega_m * t))


@njit(**_OPTS)
def _pd_piecewise(theta):
    q = np.pi / 4
    th = np.mod(theta + q, 2.0 * np.pi) - q
    if th < q:
        return -np.sin(th)
    if th < 3 * q:
        return np.cos(th)
    if th < 5 * q:
        return np.sin(th)
    return -np.cos(th)


@njit(**_OPTS)
def _rhs_ss(t, y, dy, a1, b1, c1, a2, b2, c2, a, b, c, hv, pol,
            om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o):
    n1 = b1.shape[0]
    n2 = b2.shape[0]
    n = b.shape[0]
    theta_vco = y[n1 + n2 + n]
    m1 = _data(m1k, m1v, m1o, t)
    m2 = _data(m2k, m2v, m2o, t)
    carrier = m1 * np.cos(om_ref * t) + m2 * np.sin(om_ref * t)
    u1 = np.cos(theta_vco) * carrier
    u2 = np.sin(theta_vco) * carrier
    q = 0.0
    for j in range(n1):
        q += c1[j] * y[j]
    i = 0.0
    for j in range(n2):
        i += c2[j] * y[n1 + j]
    phi = pol * (i * _sgn(q) - q * _sgn(i))
    for r in range(n1):
        acc = b1[r] * u1
        for j in range(n1):
            acc += a1[r, j] * y[j]
        dy[r] = acc
    for r in range(n2):
        acc = b2[r] * u2
        for j in range(n2):
            acc += a2[r, j] * y[n1 + j]
        dy[n1 + r] = acc
    g = hv * phi
    for r in range(n):
        acc = b[r] * phi
        for j in range(n):
            acc += a[r, j] * y[n1 + n2 + j]
        dy[n1 + n2 + r] = acc
        g += c[r] * y[n1 + n2 + r]
    dy[n1 + n2 + n] = om_free + kv * g


@njit(**_OPTS)
def _rhs_bb(t, y, dy, a1, b1, c1, a2, b2, c2, a, b, c, hv, pol,
            om_delta_free, kv, m1k, m1v, m1o, m2k, m2v, m2o):
    n1 = b1.shape[0]
    n2 = b2.shape[0]
    n = b.shape[0]
    theta = y[n1 + n2 + n]
    m1 = _data(m1k, m1v, m1o, t)
    m2 = _data(m2k, m2v, m2o, t)
    ct = np.cos(theta)
    st = np.sin(theta)
    u1 = 0.5 * (m1 * ct + m2 * st)
    u2 = 0.5 * (-m1 * st + m2 * ct)
    q = 0.0
    for j in range(n1):
        q += c1[j] * y[j]
    i = 0.0
    for j in range(n2):
        i += c2[j] * y[n1 + j]
    phi = pol * (i * _sgn(q) - q * _sgn(i))
    for r in range(n1):
        acc = b1[r] * u1
        for j in range(n1):
            acc += a1[r, j] * y[j]
        dy[r] = acc
    for r in range(n2):
        acc = b2[r] * u2
        for j in range(n2):
            acc += a2[r, j] * y[n1 + j]
        dy[n1 + r] = acc
    cx = 0.0
    for r in range(n):
        acc = b[r] * phi
        for j in range(n):
            acc += a[r, j] * y[n1 + n2 + j]
        dy[n1 + n2 + r] = acc
        cx += c[r] * y[n1 + n2 + r]
    dy[n1 + n2 + n] = om_delta_free - kv * cx - kv * hv * phi


@njit(**_OPTS)
def _rhs_avg(y, dy, a, b, c, hv, pol, om_delta_free, kv):
    n = b.shape[0]
    theta = y[n]
    phi = pol * _pd_piecewise(theta)
    cx = 0.0
    for r in range(n):
        acc = b[r] * phi
        for j in range(n):
            acc += a[r, j] * y[j]
        dy[r] = acc
        cx += c[r] * y[r]
    dy[n] = om_delta_free - kv * cx - kv * hv * phi


@njit(**_OPTS)
def _record(kind, t, y, a1, b1, c1, a2, b2, c2, a, b, c, hv, pol,
            om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o,
            idx, t_rec, th_rec, om_rec, g_rec, q_rec, i_rec):
    # kind: 0 signal space (tail = theta_vco), 1 baseband (tail = theta_delta),
    #       2 averaged (state = [x, theta_delta])
    n = b.shape[0]
    if kind == 2:
        theta = y[n]
        q, i = 0.0, 0.0
        m1 = _data(m1k, m1v, m1o, t)
        m2 = _data(m2k, m2v, m2o, t)
        ct = np.cos(theta)
        st = np.sin(theta)
        q = 0.5 * (m1 * ct + m2 * st)
        i = 0.5 * (-m1 * st + m2 * ct)
        phi = pol * _pd_piecewise(theta)
        g = hv * phi
        for r in range(n):
            g += c[r] * y[r]
        th_delta = theta
    else:
        n1 = b1.shape[0]
        n2 = b2.shape[0]
        q = 0.0
        for j in range(n1):
            q += c1[j] * y[j]
        i = 0.0
        for j in range(n2):
            i += c2[j] * y[n1 + j]
        phi = pol * (i * _sgn(q) - q * _sgn(i))
        g = hv * phi
        for r in range(n):
            g += c[r] * y[n1 + n2 + r]
        tail = y[n1 + n2 + n]
        th_delta = om_ref * t - tail if kind == 0 else tail
    t_rec[idx] = t
    th_rec[idx] = th_delta
    om_rec[idx] = om_free + kv * g
    g_rec[idx] = g
    q_rec[idx] = q
    i_rec[idx] = i


@njit(**_OPTS)
def run(kind, y0, dt, n_steps, dec,
        a1, b1, c1, a2, b2, c2, a, b, c, hv, pol,
        om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o,
        t_rec, th_rec, om_rec, g_rec, q_rec, i_rec):
    om_delta_free = om_ref - om_free
    m = y0.shape[0]
    y = y0.copy()
    k1 = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    ytmp = np.empty(m)
    _record(kind, 0.0, y, a1, b1, c1, a2, b2, c2, a, b, c, hv, pol,
            om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o,
            0, t_rec, th_rec, om_rec, g_rec, q_rec, i_rec)
    idx = 1
    for step in range(n_steps):
        t = step * dt
        if kind == 0:
            _rhs_ss(t, y, k1, a1, b1, c1, a2, b2, c2, a, b, c, hv, pol,
                    om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
            for j in range(m):
                ytmp[j] = y[j] + 0.5 * dt * k1[j]
            _rhs_ss(t + 0.5 * dt, ytmp, k2, a1, b1, c1, a2, b2, c2, a, b, c,
                    hv, pol, om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
            for j in range(m):
                ytmp[j] = y[j] + 0.5 * dt * k2[j]
            _rhs_ss(t + 0.5 * dt, ytmp, k3, a1, b1, c1, a2, b2, c2, a, b, c,
                    hv, pol, om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
            for j in range(m):
                ytmp[j] = y[j] + dt * k3[j]
            _rhs_ss(t + dt, ytmp, k4, a1, b1, c1, a2, b2, c2, a, b, c,
                    hv, pol, om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
        elif kind == 1:
            _rhs_bb(t, y, k1, a1, b1, c1, a2, b2, c2, a, b, c, hv, pol,
                    om_delta_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
            for j in range(m):
                ytmp[j] = y[j] + 0.5 * dt * k1[j]
            _rhs_bb(t + 0.5 * dt, ytmp, k2, a1, b1, c1, a2, b2, c2, a, b, c,
                    hv, pol, om_delta_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
            for j in range(m):
                ytmp[j] = y[j] + 0.5 * dt * k2[j]
            _rhs_bb(t + 0.5 * dt, ytmp, k3, a1, b1, c1, a2, b2, c2, a, b, c,
                    hv, pol, om_delta_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
            for j in range(m):
                ytmp[j] = y[j] + dt * k3[j]
            _rhs_bb(t + dt, ytmp, k4, a1, b1, c1, a2, b2, c2, a, b, c,
                    hv, pol, om_delta_free, kv, m1k, m1v, m1o, m2k, m2v, m2o)
        else:
            _rhs_avg(y, k1, a, b, c, hv, pol, om_delta_free, kv)
            for j in range(m):
                ytmp[j] = y[j] + 0.5 * dt * k1[j]
            _rhs_avg(ytmp, k2, a, b, c, hv, pol, om_delta_free, kv)
            for j in range(m):
                ytmp[j] = y[j] + 0.5 * dt * k2[j]
            _rhs_avg(ytmp, k3, a, b, c, hv, pol, om_delta_free, kv)
            for j in range(m):
                ytmp[j] = y[j] + dt * k3[j]
            _rhs_avg(ytmp, k4, a, b, c, hv, pol, om_delta_free, kv)
        for j in range(m):
            y[j] += (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        if (step + 1) % dec == 0:
            for j in range(m):
                if not np.isfinite(y[j]):
                    return 1
            _record(kind, (step + 1) * dt, y, a1, b1, c1, a2, b2, c2, a, b, c,
                    hv, pol, om_ref, om_free, kv, m1k, m1v, m1o, m2k, m2v, m2o,
                    idx, t_rec, th_rec, om_rec, g_rec, q_rec, i_rec)
            idx += 1
    return 0
