"""Single-excitation amplitude dynamics.

Four routes are provided for the same physics, deliberately kept side by
side so they can be audited against each other:

* ``integrate_full``      -- RK4 integration of the five coupled amplitude
                             equations (dot, two atomic states, two cavity
                             modes), valid for any decay rates and detunings.
* ``reduced_propagate``   -- exact eigendecomposition propagator of the
                             three slow amplitudes after the fast cavity
                             modes are slaved to them (lossless, resonant).
* ``closed_form_qab_audit`` -- the two-decaying-exponential closed form for
                             the slow amplitudes, kept verbatim for audit;
                             it omits the stationary dark component and is
                             NOT the trusted propagator (see its docstring).
* ``closed_form_cavity``  -- closed form for the slaved cavity amplitudes;
                             consistent with ``reduced_propagate``.

All times are in units of 1/kappa and all rates in units of kappa;
parameters are normalized internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import BACKEND_NAME, integrate_fixed, sample_count
from .errors import IntegrationError, ParameterError, UnsupportedRegimeError
from .model import SystemParams, derive_effective_rates

__all__ = [
    "AmplitudeState",
    "StepControl",
    "Trajectory",
    "ReducedGenerator",
    "full_rhs",
    "integrate_full",
    "reduced_propagate",
    "closed_form_qab_audit",
    "closed_form_cavity",
    "default_horizon",
    "BACKEND_NAME",
]

#: tolerated outward norm leak before a state is rejected as unphysical
NORM_SLACK = 1e-9


@dataclass(frozen=True)
class AmplitudeState:
    """The five single-excitation amplitudes at one instant.

    ``q`` is the excited-dot amplitude, ``a``/``b`` the two atomic excited
    amplitudes and ``alpha``/``beta`` the photon amplitudes of the
    counterclockwise/clockwise cavity modes. The squared norm may only
    shrink under the evolution (photon loss and spontaneous emission), so
    construction rejects states with norm established above 1.
    """

    t: float
    q: complex
    a: complex
    b: complex
    alpha: complex
    beta: complex

    def __post_init__(self):
        values = (self.t, self.q, self.a, self.b, self.alpha, self.beta)
        if not all(math.isfinite(abs(v)) for v in values):
            raise ParameterError("amplitude state contains non-finite entries")
        if self.norm2 > 1.0 + NORM_SLACK:
            raise ParameterError(f"squared norm {self.norm2} exceeds 1 (+{NORM_SLACK:g} slack)")

    @property
    def norm2(self) -> float:
        return (
            abs(self.q) ** 2
            + abs(self.a) ** 2
            + abs(self.b) ** 2
            + abs(self.alpha) ** 2
            + abs(self.beta) ** 2
        )

    def as_vector(self) -> np.ndarray:
        return np.array([self.q, self.a, self.b, self.alpha, self.beta], dtype=np.complex128)

    @classmethod
    def qd_excited(cls) -> "AmplitudeState":
        """Initial condition of the protocol: dot excited, everything else empty."""
        return cls(t=0.0, q=1.0 + 0.0j, a=0.0j, b=0.0j, alpha=0.0j, beta=0.0j)

    @classmethod
    def from_qab(cls, q: complex, a: complex, b: complex, t: float = 0.0) -> "AmplitudeState":
        """Embed emitter-only amplitudes with empty cavity modes."""
        return cls(t=t, q=complex(q), a=complex(a), b=complex(b), alpha=0.0j, beta=0.0j)


@dataclass(frozen=True)
class StepControl:
    """Integrator settings.

    ``mode`` is "fixed" (default; compiled RK4 kernel when available) or
    "adaptive" (DOP853 with local error control). ``tolerance`` is the
    local-error tolerance in adaptive mode and the advertised accuracy
    scale of the default fixed step in fixed mode. ``max_samples`` caps
    how many states are recorded along a trajectory.
    """

    dt: float = 0.01
    mode: str = "fixed"
    tolerance: float = 1e-9
    max_samples: int = 2001

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ParameterError(f"mode must be 'fixed' or 'adaptive', got {self.mode!r}")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ParameterError(f"dt must be positive and finite, got {self.dt}")
        if not (self.tolerance > 0.0):
            raise ParameterError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_samples < 2:
            raise ParameterError(f"max_samples must be at least 2, got {self.max_samples}")


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered amplitude samples plus the emission quadratures.

    ``p_a_quadrature``/``p_b_quadrature`` are the running integrals of
    2*kappa*|alpha|^2 and 2*kappa*|beta|^2 over the whole run (not just the
    recorded samples), i.e. the probabilities of having emitted through
    each mode up to the final time.
    """

    params: SystemParams
    step_control: StepControl
    ts: np.ndarray
    ys: np.ndarray
    p_a_quadrature: float
    p_b_quadrature: float
    backend: str = field(default=BACKEND_NAME)

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.complex128)
        if ts.ndim != 1 or ys.shape != (ts.size, 5):
            raise ParameterError("trajectory arrays have inconsistent shapes")
        if ts.size < 1:
            raise ParameterError("trajectory must contain at least the initial sample")
        if not np.all(np.diff(ts) > 0.0) and ts.size > 1:
            raise ParameterError("sample times must be strictly increasing")
        norms = np.sum(np.abs(ys) ** 2, axis=1)
        if np.max(norms) > 1.0 + NORM_SLACK:
            raise ParameterError("trajectory contains states with squared norm above 1")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return self.ts.size

    @property
    def samples(self) -> tuple[AmplitudeState, ...]:
        return tuple(self.state_at(i) for i in range(self.ts.size))

    def state_at(self, index: int) -> AmplitudeState:
        q, a, b, alpha, beta = self.ys[index]
        return AmplitudeState(t=float(self.ts[index]), q=q, a=a, b=b, alpha=alpha, beta=beta)

    @property
    def initial(self) -> AmplitudeState:
        return self.state_at(0)

    @property
    def final(self) -> AmplitudeState:
        return self.state_at(len(self) - 1)

    @property
    def norm2(self) -> np.ndarray:
        return np.sum(np.abs(self.ys) ** 2, axis=1)


@dataclass(frozen=True)
class ReducedGenerator:
    """Symmetric 3x3 generator of the slow (dot, |+>, |->) dynamics.

    Obtained by slaving the cavity amplitudes to the emitters. Its
    spectrum is {0, lambda_+, lambda_-}; the null eigenvector is the
    cavity dark state.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_params(cls, params: SystemParams) -> "ReducedGenerator":
        p = params.normalized()
        rates = derive_effective_rates(p)
        # off-diagonals sqrt(Gamma_q Gamma_{a,b} / 2) written as products of
        # couplings: identical in exact arithmetic, fewer roundings
        c_a = p.g_q * p.g_a
        c_b = p.g_q * p.g_b
        m = -np.array(
            [
                [rates.Gamma_q, c_a, c_b],
                [c_a, rates.Gamma_a, 0.0],
                [c_b, 0.0, rates.Gamma_b],
            ]
        )
        w, v = np.linalg.eigh(m)
        return cls(matrix=m, eigenvalues=w, eigenvectors=v)

    @property
    def null_eigenvector(self) -> np.ndarray:
        """Eigenvector of the (numerically) zero eigenvalue."""
        return self.eigenvectors[:, np.argmax(self.eigenvalues)]

    def propagate(self, t) -> np.ndarray:
        """exp(M t) applied to the initial condition (1, 0, 0)."""
        t = np.asarray(t, dtype=np.float64)
        weights = self.eigenvectors[0, :]  # <e1|v_k>
        modes = np.exp(np.multiply.outer(t, self.eigenvalues)) * weights
        return modes @ self.eigenvectors.T


def full_rhs(state: AmplitudeState, params: SystemParams):
    """Time derivatives of the five amplitudes (units of kappa).

    Includes spontaneous emission (gamma/2 terms), detunings and cavity
    decay; this is the right-hand side integrated by ``integrate_full``.
    """
    p = params.normalized()
    cq = -(0.5 * p.gamma_q + 1j * p.delta_q)
    ca = -(0.5 * p.gamma_a + 1j * p.delta_a)
    cb = -(0.5 * p.gamma_b + 1j * p.delta_b)
    dq = cq * state.q - 1j * p.g_q * (state.alpha + state.beta)
    da = ca * state.a - 1j * p.g_a * state.alpha
    db = cb * state.b - 1j * p.g_b * state.beta
    dalpha = -p.kappa * state.alpha - 1j * (p.g_q * state.q + p.g_a * state.a)
    dbeta = -p.kappa * state.beta - 1j * (p.g_q * state.q + p.g_b * state.b)
    return (dq, da, db, dalpha, dbeta)


def default_horizon(params: SystemParams) -> float:
    """Horizon standing in for t -> infinity: 40 / |lambda_+|.

    The residual transient is then below exp(-40). Undefined when
    lambda_+ = 0 (no decaying slow mode); pass an explicit horizon then.
    """
    rates = derive_effective_rates(params)
    if rates.lambda_plus == 0.0:
        raise ParameterError(
            "default horizon undefined: slowest decay rate vanishes "
            "(lambda_+ = 0); pass horizon explicitly"
        )
    return 40.0 / abs(rates.lambda_plus)


def integrate_full(
    params: SystemParams,
    initial: AmplitudeState | None = None,
    horizon: float | None = None,
    control: StepControl | None = None,
) -> Trajectory:
    """Integrate the five amplitude equations up to at least ``horizon``.

    Fixed mode (default) uses the classical RK4 kernel with the step from
    ``control.dt``; adaptive mode uses DOP853 with local error control and
    raises IntegrationError (carrying the last good state) on failure.
    The emission quadratures accumulate over every internal step.
    """
    control = control or StepControl()
    initial = initial or AmplitudeState.qd_excited()
    if initial.t != 0.0:
        raise ParameterError("initial state must be at t = 0")
    if horizon is None:
        horizon = default_horizon(params)
    if not (horizon > 0.0 and math.isfinite(horizon)):
        raise ParameterError(f"horizon must be positive and finite, got {horizon}")
    p = params.normalized()

    if control.mode == "fixed":
        n_steps = max(1, math.ceil(horizon / control.dt))
        stride = max(1, -(-n_steps // (control.max_samples - 1)))
        ts, ys, p_a, p_b = integrate_fixed(
            p.g_q,
            p.g_a,
            p.g_b,
            p.kappa,
            p.gamma_q,
            p.gamma_a,
            p.gamma_b,
            p.delta_q,
            p.delta_a,
            p.delta_b,
            initial.as_vector(),
            control.dt,
            n_steps,
            stride,
        )
        return Trajectory(
            params=params,
            step_control=control,
            ts=ts,
            ys=ys,
            p_a_quadrature=p_a,
            p_b_quadrature=p_b,
        )

    return _integrate_adaptive(params, p, initial, horizon, control)


def _integrate_adaptive(params, p, initial, horizon, control) -> Trajectory:
    from scipy.integrate import solve_ivp

    cq_r, cq_i = -0.5 * p.gamma_q, -p.delta_q
    ca_r, ca_i = -0.5 * p.gamma_a, -p.delta_a
    cb_r, cb_i = -0.5 * p.gamma_b, -p.delta_b

    def rhs(_t, y):
        q = y[0] + 1j * y[1]
        a = y[2] + 1j * y[3]
        b = y[4] + 1j * y[5]
        al = y[6] + 1j * y[7]
        be = y[8] + 1j * y[9]
        dq = (cq_r + 1j * cq_i) * q - 1j * p.g_q * (al + be)
        da = (ca_r + 1j * ca_i) * a - 1j * p.g_a * al
        db = (cb_r + 1j * cb_i) * b - 1j * p.g_b * be
        dal = -p.kappa * al - 1j * (p.g_q * q + p.g_a * a)
        dbe = -p.kappa * be - 1j * (p.g_q * q + p.g_b * b)
        return [
            dq.real, dq.imag, da.real, da.imag, db.real, db.imag,
            dal.real, dal.imag, dbe.real, dbe.imag,
            2.0 * p.kappa * (al.real * al.real + al.imag * al.imag),
            2.0 * p.kappa * (be.real * be.real + be.imag * be.imag),
        ]

    vec = initial.as_vector()
    y0 = np.zeros(12)
    y0[0:10:2] = vec.real
    y0[1:10:2] = vec.imag
    t_eval = np.linspace(0.0, horizon, control.max_samples)
    sol = solve_ivp(
        rhs,
        (0.0, horizon),
        y0,
        method="DOP853",
        rtol=control.tolerance,
        atol=control.tolerance * 1e-2,
        t_eval=t_eval,
    )
    if not sol.success:
        last = None
        if sol.t.size:
            y = sol.y[:, -1]
            last = AmplitudeState(
                t=float(sol.t[-1]),
                q=y[0] + 1j * y[1],
                a=y[2] + 1j * y[3],
                b=y[4] + 1j * y[5],
                alpha=y[6] + 1j * y[7],
                beta=y[8] + 1j * y[9],
            )
        raise IntegrationError(f"adaptive integration failed: {sol.message}", last_state=last)
    ys = (sol.y[0:10:2] + 1j * sol.y[1:10:2]).T.copy()
    return Trajectory(
        params=params,
        step_control=control,
        ts=sol.t,
        ys=ys,
        p_a_quadrature=float(sol.y[10, -1]),
        p_b_quadrature=float(sol.y[11, -1]),
    )


def _require_lossless_resonant(params: SystemParams, what: str) -> SystemParams:
    p = params.normalized()
    if not p.is_lossless_resonant:
        raise UnsupportedRegimeError(
            f"{what} requires all spontaneous-emission rates and detunings "
            "to vanish; use integrate_full for the general case"
        )
    return p


def reduced_propagate(params: SystemParams, t):
    """Slow amplitudes (Q, A, B) at time(s) t from the eliminated dynamics.

    Exact propagator exp(M t) (1, 0, 0) of the reduced generator, computed
    by eigendecomposition. This is the trusted route for the slow
    amplitudes; as t -> infinity it converges to the dark component of the
    initial state instead of decaying to zero. Lossless resonant regime
    only; the initial condition is the excited dot.
    """
    _require_lossless_resonant(params, "reduced_propagate")
    return ReducedGenerator.from_params(params).propagate(t)


def closed_form_qab_audit(params: SystemParams, t):
    """Two-decaying-exponential closed form for (Q, A, B), audit only.

    Evaluates the closed-form solution as published: a superposition of
    the two decaying eigenmodes only. Because the conserved dark component
    is absent, this expression tends to zero at long times whenever the
    couplings admit a dark state, while the trusted ``reduced_propagate``
    retains the stationary part. The discrepancy is asserted in the test
    suite; do not use this route except to audit it. (The published second
    coefficient mixes one symbol; it is read as the dot rate here, which
    restores Q(0) = 1.)

    Singular when both the dot coupling vanishes and the two atomic
    couplings coincide (zero eigenvalue gap).
    """
    p = _require_lossless_resonant(params, "closed_form_qab_audit")
    rates = derive_effective_rates(p)
    if rates.R == 0.0:
        raise ParameterError(
            "closed-form amplitudes are singular for g_q = 0 with g_a = g_b "
            "(vanishing eigenvalue gap)"
        )
    t = np.asarray(t, dtype=np.float64)
    ratio = (rates.Gamma_a + rates.Gamma_b - rates.Gamma_q) / rates.R
    e_plus = np.exp(rates.lambda_plus * t)
    e_minus = np.exp(rates.lambda_minus * t)
    q = 0.5 * (1.0 + ratio) * e_plus + 0.5 * (1.0 - ratio) * e_minus
    amp_a = math.sqrt(rates.Gamma_a * rates.Gamma_q / (2.0 * rates.R * rates.R))
    amp_b = math.sqrt(rates.Gamma_b * rates.Gamma_q / (2.0 * rates.R * rates.R))
    a = amp_a * (e_minus - e_plus)
    b = amp_b * (e_minus - e_plus)
    return np.stack(np.broadcast_arrays(q, a, b), axis=-1)


def cavity_mode_coefficients(params: SystemParams):
    """Coefficients (c1, c2, d1, d2) of the two-exponential slaved cavity
    amplitudes, plus the common prefactor -i g_q / (2 kappa).

    alpha(t) = pref * (c1 e^{lambda_+ t} + c2 e^{lambda_- t}) and likewise
    beta with (d1, d2). Differences of the form 1 -+ w/S are rationalized
    through S^2 - w^2 = -+ 4 g_q^2 (g_a^2 - g_b^2), exact rewrites that
    stay accurate when one coupling dominates.
    """
    p = _require_lossless_resonant(params, "closed_form_cavity")
    gq2 = p.g_q * p.g_q
    x = p.g_a * p.g_a - p.g_b * p.g_b
    s = math.hypot(x, 2.0 * gq2)
    if s == 0.0:
        # g_q = 0 and g_a = g_b: prefactor vanishes, coefficients moot
        return 0.0, 0.0, 0.0, 0.0, 0.0j
    w1 = x + 2.0 * gq2
    w2 = x - 2.0 * gq2
    four_qx = 4.0 * gq2 * x
    c1 = -four_qx / (s * (s + w1)) if w1 > 0.0 else (s - w1) / s
    c2 = -four_qx / (s * (s - w1)) if w1 < 0.0 else (s + w1) / s
    d1 = four_qx / (s * (s - w2)) if w2 < 0.0 else (s + w2) / s
    d2 = four_qx / (s * (s + w2)) if w2 > 0.0 else (s - w2) / s
    pref = -0.5j * p.g_q / p.kappa
    return c1, c2, d1, d2, pref


def closed_form_cavity(params: SystemParams, t):
    """Slaved cavity amplitudes (alpha, beta) at time(s) t.

    Closed form of the adiabatically eliminated cavity modes; satisfies
    alpha = -i (g_q Q + g_a A) / kappa and beta = -i (g_q Q + g_b B) / kappa
    with (Q, A, B) from ``reduced_propagate``. Note alpha(0) is the slaved
    value -i g_q / kappa, not the true initial value 0: the elimination
    attaches the cavity amplitudes to the emitters instantaneously.
    """
    c1, c2, d1, d2, pref = cavity_mode_coefficients(params)
    rates = derive_effective_rates(params.normalized())
    t = np.asarray(t, dtype=np.float64)
    e_plus = np.exp(rates.lambda_plus * t)
    e_minus = np.exp(rates.lambda_minus * t)
    alpha = pref * (c1 * e_plus + c2 * e_minus)
    beta = pref * (d1 * e_plus + d2 * e_minus)
    return alpha, beta
