"""Tail-balance solvers, ability-indexed signals and a sequential jury simulator."""

from ._tailbalance import (
    AlphaSpec,
    DegenerateAbility,
    DegenerateAlpha,
    EvenJury,
    InvalidBoundary,
    SingularCoefficients,
    SizeLimit,
    SolvedCdf,
    SolverError,
    ZeroAbility,
    alt_decomposition_solver,
    cdf,
    closed_form_linear,
    closed_form_linear_odds,
    condorcet_curve,
    condorcet_exact,
    exact_verdict,
    monte_carlo_verdict,
    order_scan,
    pdf,
    posterior,
    posterior_tail,
    quantile,
    residual_check,
    sample,
    solve_affine_pair,
    solve_balanced,
    solve_odds,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
