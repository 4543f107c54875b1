"""Python bindings for the asynchronous-iteration rate and simulation library."""

from ._ail import (
    Error,
    arock_gamma,
    arock_rate,
    corollary1_bound,
    corollary1_eta,
    execute_config,
    lemma1_rate,
    parse_config,
    piag_gamma_max,
    piag_theorem2_rate,
    run_config,
    sgd_gamma,
    verify_eq3,
    worst_case_trace,
)

__all__ = [
    "Error",
    "arock_gamma",
    "arock_rate",
    "corollary1_bound",
    "corollary1_eta",
    "execute_config",
    "lemma1_rate",
    "parse_config",
    "piag_gamma_max",
    "piag_theorem2_rate",
    "run_config",
    "sgd_gamma",
    "verify_eq3",
    "worst_case_trace",
]
