"""Expected signature matching for linear signature SDEs."""

from ._core import (
    ConfigError,
    Experiment,
    Poly,
    Tensor,
    bundled_experiment,
    concat_mul,
    enumerate_words,
    expected_signature_bm_time,
    load_config,
    mc_expected_signature,
    moment_polys,
    nonident_demo,
    parse_config,
    q_bound,
    run_experiment,
    segment_signature,
    shuffle,
    signature,
    simulate,
    solve_system,
    trunc_exp,
)

__all__ = [
    "ConfigError",
    "Experiment",
    "Poly",
    "Tensor",
    "bundled_experiment",
    "concat_mul",
    "enumerate_words",
    "expected_signature_bm_time",
    "load_config",
    "mc_expected_signature",
    "moment_polys",
    "nonident_demo",
    "parse_config",
    "q_bound",
    "run_experiment",
    "segment_signature",
    "shuffle",
    "signature",
    "simulate",
    "solve_system",
    "trunc_exp",
]
