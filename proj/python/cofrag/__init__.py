from _cofrag import (
    admissible_m0_interval,
    compute_kappa,
    daughter_partial_moment,
    eval_frag_rate,
    eval_kernel,
    run,
    serialize_config,
    two_run,
    verify_hypotheses,
    weight_deriv,
    weight_gap,
    weight_second,
    weight_value,
)

__all__ = [
    "admissible_m0_interval",
    "compute_kappa",
    "daughter_partial_moment",
    "eval_frag_rate",
    "eval_kernel",
    "run",
    "serialize_config",
    "two_run",
    "verify_hypotheses",
    "weight_deriv",
    "weight_gap",
    "weight_second",
    "weight_value",
]
