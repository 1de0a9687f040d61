"""Motivated-reasoning protocol simulator and estimator.

Thin re-export of the compiled core: belief distributions, the protocol's
scoring and classification rules, the structural-estimation helpers, and
the simulate/estimate/report pipeline entry points.
"""

from moreas._core import (  # noqa: F401
    BeliefDist,
    MessageDirection,
    SourceKind,
    __version__,
    clamp_logit,
    classify_follow,
    classify_polarizing,
    conditional_range_factor,
    estimate,
    grid_round,
    points_to_bonus_prob,
    report,
    run_bdm,
    score_assessment,
    score_bounds,
    score_guess,
    simulate,
    winsorize,
)

__all__ = [
    "BeliefDist",
    "MessageDirection",
    "SourceKind",
    "__version__",
    "clamp_logit",
    "classify_follow",
    "classify_polarizing",
    "conditional_range_factor",
    "estimate",
    "grid_round",
    "points_to_bonus_prob",
    "report",
    "run_bdm",
    "score_assessment",
    "score_bounds",
    "score_guess",
    "simulate",
    "winsorize",
]
