"""Adaptive Kalman filtering for partially observed linear SDEs with unknown
initial values: simulation, filters, estimator processes and the Monte Carlo
check suite. The heavy lifting lives in the compiled ``_akf`` module."""

try:
    # installed layout: the extension sits inside the package
    from ._akf import (
        adaptive_filter,
        available_checks,
        discrete_oracle,
        estimate,
        gamma_star_limit,
        kb_filter,
        riccati_closed_form,
        run_experiment,
        simulate,
        validate,
    )
except ImportError:  # development layout: extension on PYTHONPATH
    from _akf import (
        adaptive_filter,
        available_checks,
        discrete_oracle,
        estimate,
        gamma_star_limit,
        kb_filter,
        riccati_closed_form,
        run_experiment,
        simulate,
        validate,
    )

__all__ = [
    "adaptive_filter",
    "available_checks",
    "discrete_oracle",
    "estimate",
    "gamma_star_limit",
    "kb_filter",
    "riccati_closed_form",
    "run_experiment",
    "simulate",
    "validate",
]
