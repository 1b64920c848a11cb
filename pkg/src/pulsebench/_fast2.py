"""JIT-compiled two-level sweep kernels (optional, used when numba imports).

These reproduce the update arithmetic of ``_AmplitudeSweeps2`` exactly: the
same closed-form SU(2) interval exponential, the same update order.  The
numpy fallback differs only in floating-point op ordering (sub-1e-12 on the
shipped scenarios).
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _block_unitary(a, v1, v2, v3, dt):
    w = math.sqrt(v1 * v1 + v2 * v2 + v3 * v3)
    wd = w * dt
    c = math.cos(wd)
    if w > 1e-300:
        sw = math.sin(wd) / w
    else:
        sw = dt
    phase = complex(math.cos(a * dt), -math.sin(a * dt))
    isw = complex(0.0, -sw)
    u00 = phase * (c + isw * v3)
    u11 = phase * (c - isw * v3)
    u01 = phase * (isw * complex(v1, -v2))
    u10 = phase * (isw * complex(v1, v2))
    return u00, u01, u10, u11


@njit(cache=True)
def _kernel_at(h1e, chi, p0_arr, p1_arr, m):
    b_count = p0_arr.shape[0]
    z_im = 0.0
    for b in range(b_count):
        p0 = p0_arr[b]
        p1 = p1_arr[b]
        hp0 = h1e[m, b, 0] * p0 + h1e[m, b, 1] * p1
        hp1 = h1e[m, b, 2] * p0 + h1e[m, b, 3] * p1
        z = np.conj(chi[b, 0]) * hp0 + np.conj(chi[b, 1]) * hp1
        z_im += z.imag
    return z_im


@njit(cache=True)
def forward_fixed(samples, dt, comps0, comps1, psi, st):
    """Plain forward propagation with a fixed field (no updates)."""
    steps = samples.shape[1]
    m_count = samples.shape[0]
    b_count = psi.shape[0]
    for b in range(b_count):
        st[0, b, 0] = psi[b, 0]
        st[0, b, 1] = psi[b, 1]
    for k in range(steps):
        for b in range(b_count):
            a = comps0[0, b]
            v1 = comps0[1, b]
            v2 = comps0[2, b]
            v3 = comps0[3, b]
            for m in range(m_count):
                fm = samples[m, k]
                a += fm * comps1[m, 0, b]
                v1 += fm * comps1[m, 1, b]
                v2 += fm * comps1[m, 2, b]
                v3 += fm * comps1[m, 3, b]
            u00, u01, u10, u11 = _block_unitary(a, v1, v2, v3, dt)
            p0 = psi[b, 0]
            p1 = psi[b, 1]
            psi[b, 0] = u00 * p0 + u01 * p1
            psi[b, 1] = u10 * p0 + u11 * p1
            st[k + 1, b, 0] = psi[b, 0]
            st[k + 1, b, 1] = psi[b, 1]


@njit(cache=True)
def backward_update(f_old, f_tilde, beta, lam, dt, comps0, comps1, h1e, chi, st, ct):
    steps = f_old.shape[1]
    m_count = f_old.shape[0]
    b_count = chi.shape[0]
    for b in range(b_count):
        ct[steps, b, 0] = chi[b, 0]
        ct[steps, b, 1] = chi[b, 1]
    for k in range(steps - 1, -1, -1):
        for m in range(m_count):
            g = _kernel_at(h1e, chi, st[k + 1, :, 0], st[k + 1, :, 1], m)
            f_tilde[m, k] = (1.0 - beta) * f_old[m, k] + (beta / lam) * g
        for b in range(b_count):
            a = comps0[0, b]
            v1 = comps0[1, b]
            v2 = comps0[2, b]
            v3 = comps0[3, b]
            for m in range(m_count):
                fm = f_tilde[m, k]
                a += fm * comps1[m, 0, b]
                v1 += fm * comps1[m, 1, b]
                v2 += fm * comps1[m, 2, b]
                v3 += fm * comps1[m, 3, b]
            u00, u01, u10, u11 = _block_unitary(a, v1, v2, v3, dt)
            c0 = np.conj(u00) * chi[b, 0] + np.conj(u10) * chi[b, 1]
            c1 = np.conj(u01) * chi[b, 0] + np.conj(u11) * chi[b, 1]
            chi[b, 0] = c0
            chi[b, 1] = c1
            ct[k, b, 0] = c0
            ct[k, b, 1] = c1


@njit(cache=True)
def forward_update(f_tilde, f_new, alpha, lam, dt, comps0, comps1, h1e, psi, st, ct):
    steps = f_tilde.shape[1]
    m_count = f_tilde.shape[0]
    b_count = psi.shape[0]
    for b in range(b_count):
        st[0, b, 0] = psi[b, 0]
        st[0, b, 1] = psi[b, 1]
    for k in range(steps):
        for m in range(m_count):
            g = _kernel_at(h1e, ct[k], psi[:, 0], psi[:, 1], m)
            f_new[m, k] = (1.0 - alpha) * f_tilde[m, k] + (alpha / lam) * g
        for b in range(b_count):
            a = comps0[0, b]
            v1 = comps0[1, b]
            v2 = comps0[2, b]
            v3 = comps0[3, b]
            for m in range(m_count):
                fm = f_new[m, k]
                a += fm * comps1[m, 0, b]
                v1 += fm * comps1[m, 1, b]
                v2 += fm * comps1[m, 2, b]
                v3 += fm * comps1[m, 3, b]
            u00, u01, u10, u11 = _block_unitary(a, v1, v2, v3, dt)
            p0 = psi[b, 0]
            p1 = psi[b, 1]
            psi[b, 0] = u00 * p0 + u01 * p1
            psi[b, 1] = u10 * p0 + u11 * p1
            st[k + 1, b, 0] = psi[b, 0]
            st[k + 1, b, 1] = psi[b, 1]
