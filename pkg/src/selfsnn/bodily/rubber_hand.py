"""Rubber-hand illusion: proprioceptive drift as a function of visual deflection."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RubberHandConfig:
    """Integration model parameters.

    ``sigma_vision`` and ``sigma_proprio`` set the reliability-weighted visual
    weight; ``small_angle`` / ``max_angle`` bound the regimes; ``medium_gain``
    is the visual capture slope just past ``small_angle`` and ``saturation``
    the angular scale over which capture flattens; ``async_binding`` scales
    capture when visuo-tactile stimulation is asynchronous.
    """

    sigma_vision: float = 1.0
    sigma_proprio: float = 2.0
    small_angle: float = 20.0
    max_angle: float = 60.0
    medium_gain: float = 0.5
    saturation: float = 10.0
    async_binding: float = 0.2

    def __post_init__(self):
        if not 0 < self.small_angle < self.max_angle:
            raise ValueError("need 0 < small_angle < max_angle")
        if not (self.sigma_vision > 0 and self.sigma_proprio > 0 and self.saturation > 0):
            raise ValueError("scales must be > 0")
        if not (0 <= self.medium_gain <= 1 and 0 <= self.async_binding <= 1):
            raise ValueError("gains must lie in [0, 1]")

    @property
    def visual_weight(self) -> float:
        sv, sp = self.sigma_vision**2, self.sigma_proprio**2
        return sp / (sv + sp)


@dataclass(frozen=True)
class DriftResult:
    deflection_angle: float
    proprioceptive_drift: float
    dominant_modality: str


def congruent_offset(angle: float, cfg: RubberHandConfig) -> float:
    """Part of the visual offset the congruence kernel lets through (degrees).

    Fully passed below ``small_angle``, saturating beyond it, and rejected
    outright past ``max_angle`` (the seen hand is no longer bound to the body).
    """
    if angle <= cfg.small_angle:
        return angle
    if angle > cfg.max_angle:
        return 0.0
    s = cfg.saturation
    return cfg.small_angle + cfg.medium_gain * s * (1.0 - math.exp(-(angle - cfg.small_angle) / s))


def _capture_slope(angle: float, cfg: RubberHandConfig) -> float:
    if angle <= cfg.small_angle:
        return 1.0
    if angle > cfg.max_angle:
        return 0.0
    return cfg.medium_gain * math.exp(-(angle - cfg.small_angle) / cfg.saturation)


def run_rubber_hand(angle: float, synchronous: bool = True,
                    model_cfg: RubberHandConfig | None = None) -> DriftResult:
    """Felt-hand drift toward a rubber hand deflected by ``angle`` degrees.

    Dominance is decided by the marginal visual weight (how much one more
    degree of deflection moves the felt hand): vision dominates while it
    exceeds one half.
    """
    if not math.isfinite(angle) or angle < 0:
        raise ValueError("angle must be a finite value >= 0")
    cfg = model_cfg or RubberHandConfig()
    binding = 1.0 if synchronous else cfg.async_binding
    w = cfg.visual_weight * binding
    drift = w * congruent_offset(angle, cfg)
    marginal = w * _capture_slope(angle, cfg)
    dominant = "vision" if marginal > 0.5 else "proprioception"
    return DriftResult(float(angle), float(drift), dominant)


def drift_profile(angles, synchronous: bool = True, model_cfg: RubberHandConfig | None = None) -> list[DriftResult]:
    return [run_rubber_hand(a, synchronous, model_cfg) for a in angles]
