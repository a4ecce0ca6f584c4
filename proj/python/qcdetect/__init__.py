"""Sequential change detection: GLR/GSR statistics, thresholds, bounds and Monte Carlo latency."""

from ._qcd import (
    Detector,
    NumericError,
    StepOutcome,
    ValidationError,
    bounds,
    estimate_false_alarm,
    estimate_latency,
    generate_series,
    glr_both_stat,
    glr_post_stat,
    gsr_both_logstat,
    gsr_post_logstat,
    kl_gauss,
    threshold,
)

__all__ = [
    "Detector",
    "NumericError",
    "StepOutcome",
    "ValidationError",
    "bounds",
    "estimate_false_alarm",
    "estimate_latency",
    "generate_series",
    "glr_both_stat",
    "glr_post_stat",
    "gsr_both_logstat",
    "gsr_post_logstat",
    "kl_gauss",
    "threshold",
]
