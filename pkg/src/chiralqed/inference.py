"""Measurement protocol: simulate photon-count statistics, estimate the
directionality and its standard error, propagate to a concurrence
estimate, and study how the concurrence uncertainty scales with the
number of runs.

Sampling uses the counter-based Philox generator keyed by the user seed,
so a record is a pure function of (probabilities, n_runs, seed); the
uniform consumed by run i is the i-th element of the keyed stream, which
makes the result independent of any chunking or work partitioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientCountsError, ParameterError
from .model import SystemParams, ratios_of
from .observables import (
    EmissionProbabilities,
    concurrence_vs_directionality,
    d_max,
    emission_probabilities_analytic,
    peak_directionality,
)

__all__ = [
    "MeasurementRecord",
    "EstimateDiagnostics",
    "ConcurrenceEstimate",
    "ScalingPoint",
    "ScalingResult",
    "sample_outcomes",
    "estimate_directionality",
    "estimate_concurrence",
    "estimate_from_record",
    "error_scaling_study",
]

#: chunk size for streaming uniform draws (keeps the working set in cache;
#: has no effect on the sampled values)
_CHUNK = 1 << 22


@dataclass(frozen=True)
class MeasurementRecord:
    """Photon-count tallies of a batch of identically prepared runs.

    ``n_dark`` counts runs in which no photon was detected (trapping in the
    dark state); those are excluded from the directionality sample but kept
    because n_dark / n_runs independently estimates the trapping
    probability.
    """

    n_a: int
    n_b: int
    n_dark: int
    n_runs: int
    seed: int | None = None

    def __post_init__(self):
        for name in ("n_a", "n_b", "n_dark", "n_runs"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative, got {value}")
        if self.n_a + self.n_b + self.n_dark != self.n_runs:
            raise ParameterError(
                f"counts do not add up: {self.n_a} + {self.n_b} + {self.n_dark} "
                f"!= {self.n_runs}"
            )

    @property
    def n_emitting(self) -> int:
        return self.n_a + self.n_b

    @property
    def dark_fraction(self) -> float:
        """Fraction of dark runs; an independent estimate of the trapping
        probability."""
        return self.n_dark / self.n_runs if self.n_runs else float("nan")


@dataclass(frozen=True)
class EstimateDiagnostics:
    """Flags describing how the concurrence interval was formed."""

    clipped_low: bool
    clipped_high: bool
    covers_fold: bool
    sigma_c_delta: float


@dataclass(frozen=True)
class ConcurrenceEstimate:
    """Directionality estimate with its standard error and the propagated
    concurrence estimate with an interval."""

    d_hat: float
    sigma_d: float
    c_hat: float
    c_interval: tuple[float, float]
    n_emitting: int
    diagnostics: EstimateDiagnostics

    def __post_init__(self):
        low, high = self.c_interval
        if not (-1.0 <= self.d_hat <= 1.0):
            raise ParameterError(f"d_hat must lie in [-1, 1], got {self.d_hat}")
        if not (0.0 <= low <= high <= 1.0):
            raise ParameterError(f"concurrence interval {self.c_interval} is not ordered in [0, 1]")


@dataclass(frozen=True)
class ScalingPoint:
    n_runs: int
    sigma_c: float
    repetitions: int
    n_failures: int


@dataclass(frozen=True)
class ScalingResult:
    """sigma_C versus n_runs together with the fitted power law
    sigma_C = coefficient * n_runs ** exponent."""

    points: tuple[ScalingPoint, ...]
    exponent: float
    coefficient: float
    residual: float

    def __post_init__(self):
        ns = [p.n_runs for p in self.points]
        if ns != sorted(set(ns)):
            raise ParameterError("scaling grid must be strictly increasing")
        if any(p.sigma_c < 0 for p in self.points if math.isfinite(p.sigma_c)):
            raise ParameterError("sigma_c must be non-negative")


def _philox_key(seed) -> object:
    if isinstance(seed, np.random.SeedSequence):
        state = seed.generate_state(2, np.uint64)
        return int(state[0]) | (int(state[1]) << 64)
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    return int(seed)


def sample_outcomes(probs: EmissionProbabilities, n_runs: int, seed) -> MeasurementRecord:
    """Simulate n_runs independent emission outcomes {a, b, dark}.

    Run i consumes the i-th uniform of the Philox stream keyed by ``seed``
    and lands in a / b / dark according to (p_a, p_b, p_cd). Identical
    (probs, n_runs, seed) give bit-identical records.
    """
    if probs.audit:
        raise ParameterError("cannot sample from audit-flagged (unnormalized) probabilities")
    if abs(probs.total - 1.0) > 1e-9:
        raise ParameterError(f"probabilities must satisfy the sum rule, total = {probs.total}")
    if not isinstance(n_runs, (int, np.integer)) or isinstance(n_runs, bool) or n_runs < 1:
        raise ParameterError(f"n_runs must be a positive integer, got {n_runs!r}")

    key = _philox_key(seed)
    gen = np.random.Generator(np.random.Philox(key=key))
    threshold_a = probs.p_a
    threshold_ab = probs.p_a + probs.p_b
    n_a = 0
    n_ab = 0
    remaining = int(n_runs)
    buffer = np.empty(min(remaining, _CHUNK), dtype=np.float64)
    while remaining:
        m = min(remaining, _CHUNK)
        view = buffer[:m]
        gen.random(out=view)
        n_a += int(np.count_nonzero(view < threshold_a))
        n_ab += int(np.count_nonzero(view < threshold_ab))
        remaining -= m
    n_b = n_ab - n_a
    record_seed = key if isinstance(seed, (int, np.integer)) else None
    return MeasurementRecord(
        n_a=n_a,
        n_b=n_b,
        n_dark=int(n_runs) - n_ab,
        n_runs=int(n_runs),
        seed=record_seed,
    )


def estimate_directionality(record: MeasurementRecord) -> tuple[float, float]:
    """Directionality estimate and its standard error from count tallies.

    d_hat = (n_b - n_a) / (n_b + n_a). The uncertainty is the sample
    standard deviation (Bessel-corrected) of the +-1 emission outcomes
    divided by sqrt(n_emitting), which for counts reduces to
    sqrt((1 - d_hat^2) / (n_emitting - 1)). Dark runs carry no
    directionality information and are excluded.
    """
    n = record.n_emitting
    if n < 2:
        raise InsufficientCountsError(
            f"need at least 2 emission events to estimate the directionality, got {n}"
        )
    d_hat = (record.n_b - record.n_a) / n
    sigma_d = math.sqrt(max(0.0, 1.0 - d_hat * d_hat) / (n - 1))
    return d_hat, sigma_d


def estimate_concurrence(
    d_hat: float,
    sigma_d: float,
    r_a: float,
    n_emitting: int = 0,
) -> ConcurrenceEstimate:
    """Propagate a directionality estimate to a concurrence estimate.

    The central value is C(d_hat). The interval evaluates C at
    d_hat +- sigma_d with each endpoint clipped into the invertible domain
    (0, d_max]; when the interval straddles the concurrence peak the upper
    bound is widened to the peak value so both branches of the folded map
    are covered. Interval propagation is used instead of the delta method
    because dC/dD vanishes at the peak and steepens toward d_max; the
    delta-method value is still reported as a diagnostic for cross-checks
    away from the peak.
    """
    if not (sigma_d >= 0.0 and math.isfinite(sigma_d)):
        raise ParameterError(f"sigma_d must be non-negative and finite, got {sigma_d}")
    limit = d_max(r_a)
    if not (0.0 < d_hat <= limit):
        raise DomainError(
            f"directionality estimate {d_hat} outside the invertible domain "
            f"(0, {limit}] for r_a = {r_a}"
        )
    d_hat = float(d_hat)
    sigma_d = float(sigma_d)
    r_a = float(r_a)
    c_hat = concurrence_vs_directionality(d_hat, r_a)

    d_low_raw = d_hat - sigma_d
    d_high_raw = d_hat + sigma_d
    clipped_low = d_low_raw <= 0.0
    clipped_high = d_high_raw > limit
    # both clipped endpoints evaluate to the boundary concurrence 0
    c_low_end = 0.0 if clipped_low else concurrence_vs_directionality(d_low_raw, r_a)
    c_high_end = 0.0 if clipped_high else concurrence_vs_directionality(d_high_raw, r_a)
    candidates = [c_hat, c_low_end, c_high_end]
    fold = peak_directionality(r_a)
    covers_fold = d_low_raw <= fold <= d_high_raw
    if covers_fold:
        candidates.append(1.0)
    low = min(candidates)
    high = max(candidates)

    sigma_c_delta = _delta_method_sigma(d_hat, sigma_d, r_a, limit)
    return ConcurrenceEstimate(
        d_hat=d_hat,
        sigma_d=sigma_d,
        c_hat=float(c_hat),
        c_interval=(float(max(0.0, low)), float(min(1.0, high))),
        n_emitting=int(n_emitting),
        diagnostics=EstimateDiagnostics(
            clipped_low=bool(clipped_low),
            clipped_high=bool(clipped_high),
            covers_fold=bool(covers_fold),
            sigma_c_delta=float(sigma_c_delta),
        ),
    )


def _delta_method_sigma(d_hat: float, sigma_d: float, r_a: float, limit: float) -> float:
    """|dC/dD| * sigma_d via a central difference inside the domain."""
    if sigma_d == 0.0:
        return 0.0
    h = min(1e-6, 0.5 * d_hat, 0.5 * (limit - d_hat) + 1e-300)
    if h <= 0.0:
        h = 1e-9
    lo = max(d_hat - h, 1e-12)
    hi = min(d_hat + h, limit)
    if hi <= lo:
        return 0.0
    slope = (
        concurrence_vs_directionality(hi, r_a) - concurrence_vs_directionality(lo, r_a)
    ) / (hi - lo)
    return abs(slope) * sigma_d


def estimate_from_record(record: MeasurementRecord, r_a: float) -> ConcurrenceEstimate:
    """Full pipeline: counts -> (d_hat, sigma_d) -> concurrence estimate."""
    d_hat, sigma_d = estimate_directionality(record)
    return estimate_concurrence(d_hat, sigma_d, r_a, n_emitting=record.n_emitting)


def error_scaling_study(
    params: SystemParams,
    n_grid,
    repetitions,
    seed: int = 0,
) -> ScalingResult:
    """Spread of the concurrence estimate versus the number of runs.

    For each n in ``n_grid`` the sample->estimate pipeline runs
    ``repetitions`` times (an int applied to every grid point, or one count
    per point) on independent Philox substreams derived from
    (seed, point index, repetition index); sigma_C is the sample standard
    deviation of the central estimates. A least-squares fit of
    log sigma_C = p log n + const gives the reported exponent. Pipeline
    failures (estimates falling outside the invertible domain) are counted
    per point rather than aborting the study.
    """
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise ParameterError("n_grid must not be empty")
    if any(n < 100 for n in n_grid):
        raise ParameterError("each n_runs in the grid must be at least 100")
    if n_grid != sorted(set(n_grid)):
        raise ParameterError("n_grid must be strictly increasing")
    if isinstance(repetitions, (int, np.integer)):
        reps_per_point = [int(repetitions)] * len(n_grid)
    else:
        reps_per_point = [int(r) for r in repetitions]
        if len(reps_per_point) != len(n_grid):
            raise ParameterError("repetitions must be an int or match n_grid in length")
    if any(r < 1 for r in reps_per_point):
        raise ParameterError("repetitions must be at least 1")

    probs = emission_probabilities_analytic(params)
    r_a = ratios_of(params).r_a
    points = []
    for i, (n, reps) in enumerate(zip(n_grid, reps_per_point)):
        estimates = []
        failures = 0
        for j in range(reps):
            child = np.random.SeedSequence(seed, spawn_key=(i, j))
            record = sample_outcomes(probs, n, child)
            try:
                estimates.append(estimate_from_record(record, r_a).c_hat)
            except (DomainError, InsufficientCountsError):
                failures += 1
        sigma_c = float(np.std(estimates, ddof=1)) if len(estimates) >= 2 else float("nan")
        points.append(
            ScalingPoint(n_runs=n, sigma_c=sigma_c, repetitions=reps, n_failures=failures)
        )

    usable = [(p.n_runs, p.sigma_c) for p in points if math.isfinite(p.sigma_c) and p.sigma_c > 0]
    if len(usable) >= 2:
        log_n = np.log([n for n, _ in usable])
        log_s = np.log([s for _, s in usable])
        slope, intercept = np.polyfit(log_n, log_s, 1)
        fitted = slope * log_n + intercept
        residual = float(np.sqrt(np.mean((log_s - fitted) ** 2)))
        exponent, coefficient = float(slope), float(np.exp(intercept))
    else:
        exponent = coefficient = residual = float("nan")
    return ScalingResult(
        points=tuple(points),
        exponent=exponent,
        coefficient=coefficient,
        residual=residual,
    )
