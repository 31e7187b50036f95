"""GLRT detection: test statistic, threshold and error probabilities."""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special, stats

from irsdetect.exceptions import ParameterError
from irsdetect.services.channel import RadioConfig

TAIL_TOLERANCE = 1e-14
_SERIES_CHUNK = 4096
_WINDOW_SIGMAS = 40.0


@dataclass(frozen=True)
class DetectorConfig:
    """Target false-alarm rate and known noise power."""

    target_false_alarm: float = 0.1
    noise_power: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.target_false_alarm < 1.0:
            raise ParameterError(
                f"target_false_alarm must lie in (0, 1), got {self.target_false_alarm}"
            )
        if not self.noise_power > 0:
            raise ParameterError("noise_power must be strictly positive")

    @property
    def threshold(self) -> float:
        return threshold_for(self.target_false_alarm)


@dataclass(frozen=True)
class DetectionStats:
    """False-alarm and misdetection probabilities of one evaluation."""

    false_alarm: float
    misdetection: float
    noncentrality: float
    kind: Literal["analytical", "empirical"] = "analytical"
    trials: int | None = None
    half_width: float | None = None

    def __post_init__(self) -> None:
        for name in ("false_alarm", "misdetection"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be a probability, got {value}")
        if self.noncentrality < 0:
            raise ParameterError("noncentrality must be nonnegative")
        if self.kind == "empirical" and (self.trials is None or self.trials < 1):
            raise ParameterError("empirical statistics need at least one trial")


def glrt_statistic(y: np.ndarray, s: np.ndarray, noise_power: float) -> np.ndarray | float:
    """GLRT statistic ``2 |s^H y|^2 / (sigma^2 ||s||^2)``.

    ``y`` may carry leading batch dimensions; the last axis is the symbol axis.

    Raises:
        ParameterError: If the reference signal is zero or too short.
    """
    s = np.asarray(s, dtype=complex)
    y = np.asarray(y, dtype=complex)
    energy = float(np.real(np.vdot(s, s)))
    if energy == 0.0:
        raise ParameterError("reference signal must be nonzero")
    if s.size < 2:
        raise ParameterError("the GLRT statistic needs more than one symbol")
    correlation = y @ s.conj()
    statistic = 2.0 * np.abs(correlation) ** 2 / (noise_power * energy)
    if np.ndim(statistic) == 0:
        return float(statistic)
    return statistic


def threshold_for(false_alarm: float) -> float:
    """Threshold of the central chi-squared (2 dof) test for a false-alarm rate.

    Raises:
        ParameterError: If ``false_alarm`` is not in ``(0, 1)``.
    """
    if not 0.0 < false_alarm < 1.0:
        raise ParameterError(f"false_alarm must lie in (0, 1), got {false_alarm}")
    return -2.0 * math.log(false_alarm)


def noncentrality(h: complex | np.ndarray, radio: RadioConfig) -> float | np.ndarray:
    """Noncentrality ``2 S M |h|^2 P_x / sigma_n^2``."""
    value = radio.snr_scale * np.abs(h) ** 2
    return float(value) if np.ndim(value) == 0 else value


def _noncentral_cdf(gamma: float, t: float) -> float:
    x = t / 2.0
    lam = gamma / 2.0
    if x <= 0.0:
        return 0.0
    if lam == 0.0:
        return float(-math.expm1(-x))

    # Poisson mixture of central chi-squared CDFs. Poisson mass outside
    # lam +- _WINDOW_SIGMAS * sqrt(lam) is below 1e-300, so only that window
    # is summed; past k the remainder is bounded by P(K > k) * P(k + 2, x).
    span = int(_WINDOW_SIGMAS * math.sqrt(lam)) + 64
    start = max(0, int(lam) - span)
    stop = int(lam) + span
    total = 0.0
    while start <= stop:
        ks = np.arange(start, min(start + _SERIES_CHUNK, stop + 1))
        total += float(np.sum(stats.poisson.pmf(ks, lam) * special.gammainc(ks + 1, x)))
        last = ks[-1]
        bound = stats.poisson.sf(last, lam) * special.gammainc(last + 2, x)
        if bound <= TAIL_TOLERANCE * total or bound < 1e-300:
            break
        start = last + 1
    return min(max(total, 0.0), 1.0)


def misdetection_probability(gamma: float, t: float) -> float:
    """Misdetection probability ``F_{chi2_2(gamma)}(t) = 1 - Q_1(sqrt(gamma), sqrt(t))``.

    Args:
        gamma: Noncentrality parameter.
        t: Detection threshold.

    Returns:
        Probability that the statistic stays at or below ``t`` under activity.
    """
    if gamma < 0 or t < 0:
        raise ParameterError("gamma and t must be nonnegative")
    if math.isinf(gamma):
        return 0.0
    return _noncentral_cdf(float(gamma), float(t))


def marcum_q1(a: float, b: float) -> float:
    """First-order Marcum Q-function."""
    return 1.0 - misdetection_probability(a * a, b * b)


def decide(y: np.ndarray, s: np.ndarray, config: DetectorConfig) -> bool | np.ndarray:
    """Declare the device active when the statistic strictly exceeds the threshold."""
    decision = np.asarray(glrt_statistic(y, s, config.noise_power)) > config.threshold
    return bool(decision) if decision.ndim == 0 else decision


def analytical_stats(gamma: float, config: DetectorConfig) -> DetectionStats:
    """Closed-form error probabilities for a known noncentrality."""
    return DetectionStats(
        false_alarm=config.target_false_alarm,
        misdetection=misdetection_probability(gamma, config.threshold),
        noncentrality=gamma,
    )
