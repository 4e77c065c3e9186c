"""Pure-Python fallback for the fixed-step integration kernel.

Implements exactly the same classical RK4 recursion as the compiled
extension in ``_kernels.pyx``, including the running trapezoid quadrature
of the two photon-emission integrands 2*kappa*|alpha|^2 and
2*kappa*|beta|^2. It is selected automatically when the extension is not
available; expect it to be two to three orders of magnitude slower (see
benchmarks/bench_integrator.py).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "reference"


def sample_count(n_steps: int, stride: int) -> int:
    """Number of recorded samples for a run of n_steps with the given stride."""
    count = n_steps // stride + 1
    if n_steps % stride:
        count += 1
    return count


def integrate_fixed(
    g_q: float,
    g_a: float,
    g_b: float,
    kappa: float,
    gamma_q: float,
    gamma_a: float,
    gamma_b: float,
    delta_q: float,
    delta_a: float,
    delta_b: float,
    y0,
    dt: float,
    n_steps: int,
    stride: int,
):
    """Fixed-step RK4 for the five single-excitation amplitudes.

    Returns (ts, ys, p_a, p_b) where ts/ys hold the strided samples
    (always including step 0 and the final step) and p_a/p_b are the
    trapezoid-accumulated emission quadratures over the full run.
    """
    m = sample_count(n_steps, stride)
    ts = np.empty(m, dtype=np.float64)
    ys = np.empty((m, 5), dtype=np.complex128)

    q, a, b, al, be = (complex(v) for v in y0)
    cq = -(0.5 * gamma_q + 1j * delta_q)
    ca = -(0.5 * gamma_a + 1j * delta_a)
    cb = -(0.5 * gamma_b + 1j * delta_b)
    igq = 1j * g_q
    iga = 1j * g_a
    igb = 1j * g_b
    two_kappa = 2.0 * kappa

    def rhs(q, a, b, al, be):
        return (
            cq * q - igq * (al + be),
            ca * a - iga * al,
            cb * b - igb * be,
            -kappa * al - (igq * q + iga * a),
            -kappa * be - (igq * q + igb * b),
        )

    ts[0] = 0.0
    ys[0] = (q, a, b, al, be)
    idx = 1
    fa = two_kappa * (al.real * al.real + al.imag * al.imag)
    fb = two_kappa * (be.real * be.real + be.imag * be.imag)
    p_a = 0.0
    p_b = 0.0
    half = 0.5 * dt
    sixth = dt / 6.0

    for k in range(1, n_steps + 1):
        k1 = rhs(q, a, b, al, be)
        k2 = rhs(
            q + half * k1[0],
            a + half * k1[1],
            b + half * k1[2],
            al + half * k1[3],
            be + half * k1[4],
        )
        k3 = rhs(
            q + half * k2[0],
            a + half * k2[1],
            b + half * k2[2],
            al + half * k2[3],
            be + half * k2[4],
        )
        k4 = rhs(
            q + dt * k3[0],
            a + dt * k3[1],
            b + dt * k3[2],
            al + dt * k3[3],
            be + dt * k3[4],
        )
        q = q + sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        a = a + sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        b = b + sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        al = al + sixth * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
        be = be + sixth * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4])

        fa_new = two_kappa * (al.real * al.real + al.imag * al.imag)
        fb_new = two_kappa * (be.real * be.real + be.imag * be.imag)
        p_a += 0.5 * (fa + fa_new) * dt
        p_b += 0.5 * (fb + fb_new) * dt
        fa = fa_new
        fb = fb_new

        if k % stride == 0 or k == n_steps:
            ts[idx] = k * dt
            ys[idx] = (q, a, b, al, be)
            idx += 1

    return ts, ys, p_a, p_b
