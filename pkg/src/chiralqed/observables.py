"""Emission probabilities, directionality, the cavity dark state and its
entanglement, and the invertible map between directionality and
concurrence on which the measurement protocol rests.

The trusted emission probabilities come from exact time integration of
the two-exponential slaved cavity amplitudes; the unnormalized closed
form published for them is retained behind ``emission_probabilities_audit``
because its overall prefactor violates the sum rule while its a:b ratio
is correct. Concurrence is always computed through two independent
routes (reduced-density purity and the normalized closed form) with
agreement asserted internally.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import cavity_mode_coefficients
from .errors import DomainError, NoDarkStateError, ParameterError, UnsupportedRegimeError
from .model import CouplingRatios, SystemParams, derive_effective_rates, ratios_of

__all__ = [
    "EmissionProbabilities",
    "DarkState",
    "ReducedDensityReport",
    "emission_probabilities_analytic",
    "emission_probabilities_audit",
    "directionality",
    "dark_state",
    "dark_state_probability",
    "concurrence_of_state",
    "concurrence_general",
    "concurrence_closed_form",
    "reduced_density",
    "concurrence_from_couplings",
    "ratio_from_directionality",
    "concurrence_vs_directionality",
    "d_max",
    "peak_directionality",
    "peak_coupling_ratio",
]

#: internal agreement required between the two concurrence routes
_ROUTE_AGREEMENT = 1e-12


@dataclass(frozen=True)
class EmissionProbabilities:
    """Probabilities of emitting through mode a, mode b, or never emitting
    (trapping in the cavity dark state).

    ``audit=True`` marks values produced by the unnormalized published
    closed form; those skip range validation and carry no sum-rule
    guarantee (p_cd is NaN there).
    """

    p_a: float
    p_b: float
    p_cd: float
    audit: bool = False

    def __post_init__(self):
        if self.audit:
            return
        for name in ("p_a", "p_b", "p_cd"):
            value = getattr(self, name)
            if not (math.isfinite(value) and -1e-12 <= value <= 1.0 + 1e-12):
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")

    @property
    def total(self) -> float:
        return self.p_a + self.p_b + self.p_cd

    @property
    def p_emit(self) -> float:
        return self.p_a + self.p_b


@dataclass(frozen=True)
class DarkState:
    """Normalized cavity dark state in the basis (|E,g>, |G,+>, |G,->).

    Proportional to (-g_a g_b, g_q g_b, g_q g_a); decoupled from both
    cavity modes, hence stationary under the lossless dynamics.
    """

    q: float
    a: float
    b: float
    norm_constant: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.q, self.a, self.b, self.norm_constant)):
            raise ParameterError("dark state contains non-finite entries")
        if abs(self.q * self.q + self.a * self.a + self.b * self.b - 1.0) > 1e-12:
            raise ParameterError("dark state amplitudes are not normalized")

    def as_vector(self) -> np.ndarray:
        return np.array([self.q, self.a, self.b])


@dataclass(frozen=True, eq=False)
class ReducedDensityReport:
    """Reduced density matrix of the dot and the purities of both reductions.

    For a pure bipartite state the two complementary reductions have equal
    purity; both are computed so the identity can be checked instead of
    assumed.
    """

    rho_qd: np.ndarray
    purity_qd: float
    purity_atom: float


def _lossless(params: SystemParams, what: str) -> SystemParams:
    p = params.normalized()
    if not p.is_lossless_resonant:
        raise UnsupportedRegimeError(
            f"{what} assumes vanishing spontaneous emission and detunings"
        )
    return p


def emission_probabilities_analytic(params: SystemParams) -> EmissionProbabilities:
    """Exact emission probabilities from the slaved cavity amplitudes.

    P_a = 2 kappa * int_0^inf |alpha(t)|^2 dt evaluated in closed form from
    the two-exponential structure (and likewise P_b); the trapping
    probability is the squared overlap of the initial state with the dark
    state. Satisfies P_a + P_b + P_cd = 1 at machine precision.
    """
    p = _lossless(params, "emission_probabilities_analytic")
    if p.g_q == 0.0 and p.g_a == 0.0 and p.g_b == 0.0:
        raise DomainError("emission probabilities undefined: all couplings vanish")
    if p.g_q == 0.0:
        # the excited dot never couples out; it is trapped with certainty
        # provided a dark state exists to name that trapping
        if p.g_a == 0.0 or p.g_b == 0.0:
            raise DomainError(
                "emission probabilities undefined for g_q = 0 with a single "
                "atomic coupling"
            )
        return EmissionProbabilities(p_a=0.0, p_b=0.0, p_cd=1.0)

    rates = derive_effective_rates(p)
    c1, c2, d1, d2, _pref = cavity_mode_coefficients(p)
    lam_p = abs(rates.lambda_plus)
    lam_m = abs(rates.lambda_minus)

    def integral(u1: float, u2: float) -> float:
        total = 0.0
        if u1 != 0.0:
            total += u1 * u1 / (2.0 * lam_p)
        if u2 != 0.0:
            total += u2 * u2 / (2.0 * lam_m)
        if u1 != 0.0 and u2 != 0.0:
            total += 2.0 * u1 * u2 / (lam_p + lam_m)
        return total

    p_a = 0.25 * rates.Gamma_q * integral(c1, c2)
    p_b = 0.25 * rates.Gamma_q * integral(d1, d2)

    t1 = p.g_a * p.g_b
    t2 = p.g_q * p.g_b
    t3 = p.g_q * p.g_a
    denom = t1 * t1 + t2 * t2 + t3 * t3
    # denom = 0 with g_q > 0 means g_a = g_b = 0: no dark state overlaps the
    # initial state, so the trapping probability is zero
    p_cd = (t1 * t1) / denom if denom > 0.0 else 0.0
    return EmissionProbabilities(p_a=p_a, p_b=p_b, p_cd=p_cd)


def emission_probabilities_audit(params: SystemParams) -> EmissionProbabilities:
    """Published closed form for (P_a, P_b), evaluated verbatim, audit only.

    The overall prefactor 4 / (lambda_+ lambda_-) makes the values
    unnormalized (at equal couplings P_a = 16/3), but the ratio between the
    two modes is correct and reproduces the directionality. Kept verbatim
    so the discrepancy stays visible; use the analytic route for anything
    quantitative. p_cd is NaN by construction.
    """
    p = _lossless(params, "emission_probabilities_audit")
    rates = derive_effective_rates(p)
    product = rates.lambda_plus * rates.lambda_minus
    total = rates.Gamma_q + rates.Gamma_a + rates.Gamma_b
    with np.errstate(divide="ignore", invalid="ignore"):
        common = np.float64(4.0 * rates.Gamma_q * (rates.Gamma_a + rates.Gamma_b)) / (
            np.float64(product) * total
        )
        p_a = float(common * (rates.Gamma_q + 2.0 * rates.Gamma_b))
        p_b = float(common * (rates.Gamma_q + 2.0 * rates.Gamma_a))
    return EmissionProbabilities(p_a=p_a, p_b=p_b, p_cd=float("nan"), audit=True)


def directionality(params: SystemParams) -> float:
    """Normalized asymmetry (P_b - P_a) / (P_b + P_a) of the two emission
    channels, in closed form: (g_a^2 - g_b^2) / (g_a^2 + g_b^2 + 2 g_q^2)."""
    p = params.normalized()
    denominator = p.g_a * p.g_a + p.g_b * p.g_b + 2.0 * p.g_q * p.g_q
    if denominator == 0.0:
        raise DomainError("directionality undefined: all couplings vanish")
    return (p.g_a * p.g_a - p.g_b * p.g_b) / denominator


def dark_state(params: SystemParams) -> DarkState:
    """The normalized cavity dark state; all three couplings must be nonzero."""
    p = params.normalized()
    vanishing = tuple(
        name for name, g in zip(("g_q", "g_a", "g_b"), p.couplings) if g == 0.0
    )
    if vanishing:
        raise NoDarkStateError(
            f"no cavity dark state: {', '.join(vanishing)} = 0", vanishing=vanishing
        )
    t1 = p.g_a * p.g_b
    t2 = p.g_q * p.g_b
    t3 = p.g_q * p.g_a
    norm_constant = 1.0 / math.sqrt(t1 * t1 + t2 * t2 + t3 * t3)
    return DarkState(
        q=-t1 * norm_constant,
        a=t2 * norm_constant,
        b=t3 * norm_constant,
        norm_constant=norm_constant,
    )


def dark_state_probability(params: SystemParams) -> float:
    """Probability that the initial excited-dot state is trapped without
    ever emitting: (g_a g_b)^2 / ((g_a g_b)^2 + (g_q g_b)^2 + (g_q g_a)^2)."""
    p = params.normalized()
    t1 = p.g_a * p.g_b
    t2 = p.g_q * p.g_b
    t3 = p.g_q * p.g_a
    denom = t1 * t1 + t2 * t2 + t3 * t3
    if denom == 0.0:
        raise DomainError(
            "dark-state probability undefined: all pairwise coupling products vanish"
        )
    return (t1 * t1) / denom


def reduced_density(state: DarkState) -> ReducedDensityReport:
    """Trace out each subsystem of the dark state and report the purities.

    The dot reduction is diag(A^2 + B^2, Q^2); the 3x3 atomic reduction has
    the same squared-trace. Both are computed explicitly.
    """
    s = state.a * state.a + state.b * state.b
    q2 = state.q * state.q
    rho_qd = np.diag([s, q2])
    rho_atom = np.array(
        [
            [q2, 0.0, 0.0],
            [0.0, state.a * state.a, state.a * state.b],
            [0.0, state.a * state.b, state.b * state.b],
        ]
    )
    purity_qd = float(np.trace(rho_qd @ rho_qd))
    purity_atom = float(np.trace(rho_atom @ rho_atom))
    return ReducedDensityReport(rho_qd=rho_qd, purity_qd=purity_qd, purity_atom=purity_atom)


def concurrence_general(state: DarkState) -> float:
    """Concurrence from the general mixedness route sqrt(2 (1 - tr rho_M^2))."""
    report = reduced_density(state)
    return math.sqrt(max(0.0, 2.0 * (1.0 - report.purity_qd)))


def concurrence_closed_form(state: DarkState) -> float:
    """Concurrence of the normalized dark state, 2 |Q| sqrt(A^2 + B^2)."""
    return 2.0 * abs(state.q) * math.sqrt(state.a * state.a + state.b * state.b)


def concurrence_of_state(state: DarkState) -> float:
    """Concurrence of the dark state, cross-checked through both routes.

    Evaluates the general definition and the closed form and asserts they
    agree to 1e-12 before returning the closed-form value; a disagreement
    would indicate a transcription error in one of the formulas.
    """
    general = concurrence_general(state)
    closed = concurrence_closed_form(state)
    if abs(general - closed) > _ROUTE_AGREEMENT:
        raise AssertionError(
            f"concurrence routes disagree: general {general!r} vs closed {closed!r}"
        )
    return closed


def concurrence_from_couplings(params_or_ratios) -> float:
    """Concurrence of the dark state directly from the couplings.

    C = 2 g_q g_a g_b sqrt(g_a^2 + g_b^2) / ((g_a g_b)^2 + (g_q g_a)^2
    + (g_q g_b)^2), or equivalently 2 sqrt(1 + r_a^2) / (r/r_a + r r_a
    + r_a/r) in terms of the ratios. Returns 0 (with a warning) when
    g_b = 0, where no dark state exists.
    """
    if isinstance(params_or_ratios, CouplingRatios):
        ratios = params_or_ratios
        if ratios.r_a == 0.0:
            warnings.warn(
                "g_b = 0: no dark state exists, concurrence is 0", stacklevel=2
            )
            return 0.0
        r, r_a = ratios.r, ratios.r_a
        return 2.0 * math.sqrt(1.0 + r_a * r_a) / (r / r_a + r * r_a + r_a / r)
    if not isinstance(params_or_ratios, SystemParams):
        raise ParameterError(
            f"expected SystemParams or CouplingRatios, got {type(params_or_ratios).__name__}"
        )
    p = params_or_ratios.normalized()
    if p.g_b == 0.0:
        warnings.warn("g_b = 0: no dark state exists, concurrence is 0", stacklevel=2)
        return 0.0
    if p.g_q == 0.0 or p.g_a == 0.0:
        return 0.0
    t1 = p.g_a * p.g_b
    t2 = p.g_q * p.g_b
    t3 = p.g_q * p.g_a
    denom = t1 * t1 + t2 * t2 + t3 * t3
    return 2.0 * p.g_q * t1 * math.hypot(p.g_a, p.g_b) / denom


def d_max(r_a: float) -> float:
    """Largest attainable directionality for a given atomic ratio,
    (1 - r_a^2) / (1 + r_a^2), reached only in the r -> 0 limit."""
    _validate_atomic_ratio(r_a)
    return float((1.0 - r_a * r_a) / (1.0 + r_a * r_a))


def peak_coupling_ratio(r_a: float) -> float:
    """The ratio r at which the concurrence reaches 1: r_a / sqrt(1 + r_a^2)."""
    _validate_atomic_ratio(r_a)
    return float(r_a / math.sqrt(1.0 + r_a * r_a))


def peak_directionality(r_a: float) -> float:
    """Directionality at the concurrence peak: (1 - r_a^4) / (1 + 4 r_a^2 + r_a^4)."""
    _validate_atomic_ratio(r_a)
    ra2 = r_a * r_a
    return float((1.0 - ra2 * ra2) / (1.0 + 4.0 * ra2 + ra2 * ra2))


def _validate_atomic_ratio(r_a: float) -> None:
    if not (math.isfinite(r_a) and 0.0 < r_a < 1.0):
        raise DomainError(
            f"atomic ratio r_a must lie in (0, 1) for an invertible "
            f"directionality map, got {r_a}"
        )


def ratio_from_directionality(d: float, r_a: float) -> float:
    """Invert the directionality map for the dot/atom coupling ratio.

    r(D, r_a) = sqrt(((1 - r_a^2) - (1 + r_a^2) D) / (2 D)), defined for
    0 < D <= d_max(r_a); the boundary D = d_max maps to r = 0. r_a >= 1
    makes D <= 0 for every r and is rejected as non-invertible.
    """
    _validate_atomic_ratio(r_a)
    if not math.isfinite(d) or d <= 0.0:
        raise DomainError(f"directionality {d} outside the invertible range (0, d_max]")
    limit = d_max(r_a)
    if d > limit:
        raise DomainError(
            f"directionality {d} exceeds the maximum {limit} attainable for r_a = {r_a}"
        )
    radicand = ((1.0 - r_a * r_a) - (1.0 + r_a * r_a) * d) / (2.0 * d)
    return math.sqrt(max(0.0, float(radicand)))


def concurrence_vs_directionality(d: float, r_a: float) -> float:
    """Concurrence as a function of the measured directionality.

    Chains the ratio inversion with the ratio form of the concurrence; for
    fixed r_a the map is single-valued on (0, d_max], rising to 1 at
    ``peak_directionality(r_a)`` and falling to 0 at ``d_max(r_a)``.
    """
    r = ratio_from_directionality(d, r_a)
    if r == 0.0:
        return 0.0
    return float(2.0 * math.sqrt(1.0 + r_a * r_a) / (r / r_a + r * r_a + r_a / r))
