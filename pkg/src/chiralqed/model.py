"""Physical parameters of the emitter-pair/ring-cavity system and the
effective rates that govern the slow dynamics after the cavity is
adiabatically eliminated.

Unit convention: the cavity field decay rate ``kappa`` sets the scale.
All rates are expressed in units of kappa and all times in units of
1/kappa; ``SystemParams.normalized()`` rescales an arbitrary parameter
set to kappa = 1, and every derived quantity in this package is computed
from the normalized set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError, ParameterError

#: default margin interpreting "much less than" as one order of magnitude
DEFAULT_REGIME_MARGIN = 10.0

#: config keys accepted by parameter files, with their default values
#: (couplings have no default and must be supplied)
PARAM_KEYS = (
    "g_q",
    "g_a",
    "g_b",
    "kappa",
    "gamma_q",
    "gamma_a",
    "gamma_b",
    "delta_q",
    "delta_a",
    "delta_b",
)


@dataclass(frozen=True)
class SystemParams:
    """Coupling, decay and detuning rates defining one experiment.

    Attributes
    ----------
    g_q : float
        Coupling of the unpolarized dot to each of the two cavity modes.
    g_a, g_b : float
        Coupling of the atomic |+> (|->) transition to the counterclockwise
        (clockwise) cavity mode.
    kappa : float
        Cavity field decay rate into the waveguide; the unit of all rates.
    gamma_q, gamma_a, gamma_b : float
        Free-space spontaneous emission rates of the three transitions.
    delta_q, delta_a, delta_b : float
        Detunings of the three transitions from the rotating frame.
    """

    g_q: float
    g_a: float
    g_b: float
    kappa: float = 1.0
    gamma_q: float = 0.0
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    delta_q: float = 0.0
    delta_a: float = 0.0
    delta_b: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ParameterError(f"{f.name} must be a real number, got {value!r}")
            object.__setattr__(self, f.name, float(value))
            if not math.isfinite(getattr(self, f.name)):
                raise ParameterError(f"{f.name} must be finite, got {value!r}")
        if self.kappa <= 0.0:
            raise ParameterError(f"kappa must be positive, got {self.kappa}")
        for name in ("g_q", "g_a", "g_b", "gamma_q", "gamma_a", "gamma_b"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be non-negative, got {getattr(self, name)}")

    def normalized(self) -> "SystemParams":
        """Return the equivalent parameter set in units of kappa (kappa = 1)."""
        if self.kappa == 1.0:
            return self
        k = self.kappa
        return SystemParams(
            g_q=self.g_q / k,
            g_a=self.g_a / k,
            g_b=self.g_b / k,
            kappa=1.0,
            gamma_q=self.gamma_q / k,
            gamma_a=self.gamma_a / k,
            gamma_b=self.gamma_b / k,
            delta_q=self.delta_q / k,
            delta_a=self.delta_a / k,
            delta_b=self.delta_b / k,
        )

    @property
    def couplings(self) -> tuple[float, float, float]:
        return (self.g_q, self.g_a, self.g_b)

    @property
    def is_lossless_resonant(self) -> bool:
        """True when all spontaneous-emission rates and detunings vanish."""
        return (
            self.gamma_q == 0.0
            and self.gamma_a == 0.0
            and self.gamma_b == 0.0
            and self.delta_q == 0.0
            and self.delta_a == 0.0
            and self.delta_b == 0.0
        )

    def with_couplings(self, g_q: float, g_a: float, g_b: float) -> "SystemParams":
        return replace(self, g_q=g_q, g_a=g_a, g_b=g_b)


@dataclass(frozen=True)
class CouplingRatios:
    """Dimensionless coupling ratios r = g_q/g_a and r_a = g_b/g_a.

    r_a = 0 is representable (it flags the limit in which no dark state
    exists); r must be strictly positive.
    """

    r: float
    r_a: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.r_a)):
            raise ParameterError(f"ratios must be finite, got r={self.r}, r_a={self.r_a}")
        if self.r <= 0.0:
            raise ParameterError(f"r = g_q/g_a must be positive, got {self.r}")
        if self.r_a < 0.0:
            raise ParameterError(f"r_a = g_b/g_a must be non-negative, got {self.r_a}")


@dataclass(frozen=True)
class EffectiveRates:
    """Cavity-enhanced decay rates of the emitters and the eigen-decay rates
    of the reduced three-amplitude dynamics (all in units of kappa)."""

    Gamma_q: float
    Gamma_a: float
    Gamma_b: float
    R: float
    lambda_plus: float
    lambda_minus: float


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of checking the bad-cavity / Purcell hierarchy gamma << g << kappa."""

    bad_cavity_ok: bool
    purcell_ok: bool
    worst_ratio: float
    messages: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.bad_cavity_ok and self.purcell_ok


def derive_effective_rates(params: SystemParams) -> EffectiveRates:
    """Compute the effective decay rates of the cavity-mediated dynamics.

    Gamma_q = 2 g_q^2 / kappa (the dot couples to both modes),
    Gamma_a = g_a^2 / kappa, Gamma_b = g_b^2 / kappa, and the two nonzero
    decay eigenvalues

        lambda_+- = ( -(Gamma_a + Gamma_b + Gamma_q) +- R ) / 2,
        R = sqrt((Gamma_a - Gamma_b)^2 + Gamma_q^2).

    The rates are returned in the same units as the inputs (so they are
    invariant under g -> s g, kappa -> s^2 kappa); for normalized
    parameters (kappa = 1) that is units of kappa. lambda_+ is evaluated
    through the rationalized form -2 P / (T + R) with T the total rate and
    P = Gamma_a Gamma_b + Gamma_q (Gamma_a + Gamma_b) / 2, which is
    algebraically identical but avoids cancellation when one coupling
    dominates.
    """
    p = params
    gamma_q_eff = 2.0 * p.g_q * p.g_q / p.kappa
    gamma_a_eff = p.g_a * p.g_a / p.kappa
    gamma_b_eff = p.g_b * p.g_b / p.kappa
    total = gamma_a_eff + gamma_b_eff + gamma_q_eff
    gap = math.hypot(gamma_a_eff - gamma_b_eff, gamma_q_eff)
    product = gamma_a_eff * gamma_b_eff + 0.5 * gamma_q_eff * (gamma_a_eff + gamma_b_eff)
    if total == 0.0:
        lam_plus = lam_minus = 0.0
    else:
        lam_plus = -2.0 * product / (total + gap)
        lam_minus = -0.5 * (total + gap)
    return EffectiveRates(
        Gamma_q=gamma_q_eff,
        Gamma_a=gamma_a_eff,
        Gamma_b=gamma_b_eff,
        R=gap,
        lambda_plus=lam_plus,
        lambda_minus=lam_minus,
    )


def ratios_of(params: SystemParams) -> CouplingRatios:
    """Dimensionless ratios of the couplings; requires g_a > 0."""
    if params.g_a == 0.0:
        raise ParameterError("coupling ratios are undefined for g_a = 0")
    return CouplingRatios(r=params.g_q / params.g_a, r_a=params.g_b / params.g_a)


def check_regime(params: SystemParams, margin: float = DEFAULT_REGIME_MARGIN) -> RegimeReport:
    """Check the rate hierarchy gamma << g << kappa with a configurable margin.

    Each "much less than" is interpreted as "smaller by at least `margin`":
    the bad-cavity flag requires max(g) * margin <= kappa and the Purcell
    flag requires max(gamma) * margin <= min of the nonzero couplings.
    """
    if not margin > 1.0:
        raise ParameterError(f"margin must exceed 1, got {margin}")
    p = params.normalized()
    g_max = max(p.couplings)
    gamma_max = max(p.gamma_q, p.gamma_a, p.gamma_b)
    nonzero_g = [g for g in p.couplings if g > 0.0]
    g_min = min(nonzero_g) if nonzero_g else 0.0

    messages = []
    cavity_ratio = g_max * margin / p.kappa
    bad_cavity_ok = cavity_ratio <= 1.0
    if not bad_cavity_ok:
        messages.append(
            f"bad-cavity condition violated: max coupling {g_max:g} is not "
            f"{margin:g}x below kappa"
        )
    if gamma_max == 0.0:
        purcell_ratio = 0.0
        purcell_ok = True
    elif g_min == 0.0:
        purcell_ratio = math.inf
        purcell_ok = False
        messages.append("Purcell condition violated: spontaneous emission present but no coupling")
    else:
        purcell_ratio = gamma_max * margin / g_min
        purcell_ok = purcell_ratio <= 1.0
        if not purcell_ok:
            messages.append(
                f"Purcell condition violated: max gamma {gamma_max:g} is not "
                f"{margin:g}x below the smallest nonzero coupling {g_min:g}"
            )
    return RegimeReport(
        bad_cavity_ok=bad_cavity_ok,
        purcell_ok=purcell_ok,
        worst_ratio=max(cavity_ratio, purcell_ratio),
        messages=tuple(messages),
    )


def load_params_file(path) -> dict[str, float]:
    """Parse a plain key=value parameter file.

    Blank lines and lines starting with '#' are ignored. Unknown keys and
    malformed lines are errors (reported with their line number).
    """
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, text = line.partition("=")
            key = key.strip()
            if key not in PARAM_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown parameter key {key!r}")
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = float(text.strip())
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: value for {key!r} is not a number: {text.strip()!r}"
                ) from None
    return values


def params_from_mapping(values: dict[str, float]) -> SystemParams:
    """Build SystemParams from a key/value mapping.

    The three couplings are required; kappa defaults to 1 and the decay and
    detuning rates default to 0.
    """
    unknown = sorted(set(values) - set(PARAM_KEYS))
    if unknown:
        raise ConfigError(f"unknown parameter keys: {', '.join(unknown)}")
    missing = [key for key in ("g_q", "g_a", "g_b") if key not in values]
    if missing:
        raise ConfigError(f"missing required parameter keys: {', '.join(missing)}")
    try:
        return SystemParams(**values)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
