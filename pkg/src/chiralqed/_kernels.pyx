# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled fixed-step RK4 kernel for the five single-excitation amplitudes.

Mirrors chiralqed._reference.integrate_fixed step for step (same update
order, same trapezoid quadrature) so both backends can be compared
directly; see tests/test_backends.py and benchmarks/bench_integrator.py.
"""

import numpy as np

BACKEND_NAME = "compiled"


def sample_count(n_steps, stride):
    count = n_steps // stride + 1
    if n_steps % stride:
        count += 1
    return count


def integrate_fixed(
    double g_q,
    double g_a,
    double g_b,
    double kappa,
    double gamma_q,
    double gamma_a,
    double gamma_b,
    double delta_q,
    double delta_a,
    double delta_b,
    object y0,
    double dt,
    long long n_steps,
    long long stride,
):
    cdef long long m = sample_count(n_steps, stride)
    ts_arr = np.empty(m, dtype=np.float64)
    ys_arr = np.empty((m, 5), dtype=np.complex128)
    cdef double[::1] ts = ts_arr
    cdef double complex[:, ::1] ys = ys_arr

    y0_arr = np.asarray(y0, dtype=np.complex128)
    if y0_arr.shape != (5,):
        raise ValueError("y0 must hold five complex amplitudes")

    cdef double complex q = y0_arr[0]
    cdef double complex a = y0_arr[1]
    cdef double complex b = y0_arr[2]
    cdef double complex al = y0_arr[3]
    cdef double complex be = y0_arr[4]

    cdef double complex cq = -(0.5 * gamma_q + 1j * delta_q)
    cdef double complex ca = -(0.5 * gamma_a + 1j * delta_a)
    cdef double complex cb = -(0.5 * gamma_b + 1j * delta_b)
    cdef double complex igq = 1j * g_q
    cdef double complex iga = 1j * g_a
    cdef double complex igb = 1j * g_b
    cdef double two_kappa = 2.0 * kappa
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0

    cdef double complex k1q, k1a, k1b, k1al, k1be
    cdef double complex k2q, k2a, k2b, k2al, k2be
    cdef double complex k3q, k3a, k3b, k3al, k3be
    cdef double complex k4q, k4a, k4b, k4al, k4be
    cdef double complex tq, ta, tb, tal, tbe

    cdef double p_a = 0.0
    cdef double p_b = 0.0
    cdef double fa = two_kappa * (al.real * al.real + al.imag * al.imag)
    cdef double fb = two_kappa * (be.real * be.real + be.imag * be.imag)
    cdef double fa_new, fb_new

    ts[0] = 0.0
    ys[0, 0] = q
    ys[0, 1] = a
    ys[0, 2] = b
    ys[0, 3] = al
    ys[0, 4] = be
    cdef long long idx = 1
    cdef long long k

    for k in range(1, n_steps + 1):
        k1q = cq * q - igq * (al + be)
        k1a = ca * a - iga * al
        k1b = cb * b - igb * be
        k1al = -kappa * al - (igq * q + iga * a)
        k1be = -kappa * be - (igq * q + igb * b)

        tq = q + half * k1q
        ta = a + half * k1a
        tb = b + half * k1b
        tal = al + half * k1al
        tbe = be + half * k1be
        k2q = cq * tq - igq * (tal + tbe)
        k2a = ca * ta - iga * tal
        k2b = cb * tb - igb * tbe
        k2al = -kappa * tal - (igq * tq + iga * ta)
        k2be = -kappa * tbe - (igq * tq + igb * tb)

        tq = q + half * k2q
        ta = a + half * k2a
        tb = b + half * k2b
        tal = al + half * k2al
        tbe = be + half * k2be
        k3q = cq * tq - igq * (tal + tbe)
        k3a = ca * ta - iga * tal
        k3b = cb * tb - igb * tbe
        k3al = -kappa * tal - (igq * tq + iga * ta)
        k3be = -kappa * tbe - (igq * tq + igb * tb)

        tq = q + dt * k3q
        ta = a + dt * k3a
        tb = b + dt * k3b
        tal = al + dt * k3al
        tbe = be + dt * k3be
        k4q = cq * tq - igq * (tal + tbe)
        k4a = ca * ta - iga * tal
        k4b = cb * tb - igb * tbe
        k4al = -kappa * tal - (igq * tq + iga * ta)
        k4be = -kappa * tbe - (igq * tq + igb * tb)

        q = q + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        a = a + sixth * (k1a + 2.0 * (k2a + k3a) + k4a)
        b = b + sixth * (k1b + 2.0 * (k2b + k3b) + k4b)
        al = al + sixth * (k1al + 2.0 * (k2al + k3al) + k4al)
        be = be + sixth * (k1be + 2.0 * (k2be + k3be) + k4be)

        fa_new = two_kappa * (al.real * al.real + al.imag * al.imag)
        fb_new = two_kappa * (be.real * be.real + be.imag * be.imag)
        p_a += 0.5 * (fa + fa_new) * dt
        p_b += 0.5 * (fb + fb_new) * dt
        fa = fa_new
        fb = fb_new

        if k % stride == 0 or k == n_steps:
            ts[idx] = k * dt
            ys[idx, 0] = q
            ys[idx, 1] = a
            ys[idx, 2] = b
            ys[idx, 3] = al
            ys[idx, 4] = be
            idx += 1

    return ts_arr, ys_arr, p_a, p_b
