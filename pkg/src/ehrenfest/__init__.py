"""Bounded mean-reverting short-rate model on a finite birth-death chain.

The rate process is an affinely rescaled continuous-time Ehrenfest chain on
{0, ..., N}: it stays inside user-chosen bounds [r_min, r_max], reverts to
p * r_max + (1 - p) * r_min, and admits explicit zero-coupon bond prices
built from Krawtchouk polynomials and confluent hypergeometric functions of
matrix argument.  A Vasicek benchmark pricer and two independent pricing
oracles (Feynman-Kac matrix exponential, exact-path Monte Carlo) round out
the library; `ehrenfest.experiments` reproduces the convergence and low-rate
scenario studies, and `ehrenfest.cli` exposes everything on the command line.
"""

from .chain import (
    BirthDeathRates,
    EhrenfestParams,
    PathSample,
    binary_semigroup,
    birth_death_rates,
    conditional_mean,
    conditional_variance,
    generator_matrix,
    simulate_path,
    simulate_state_integrals,
    stationary_pmf,
    transition_matrix,
    transition_prob,
)
from .pricing import (
    PriceResult,
    Truncation,
    VasicekParams,
    price_fk_oracle,
    price_general,
    price_mc_oracle,
    price_symmetric,
    price_vasicek,
    vasicek_to_ehrenfest,
)
from .shortrate import (
    OffGridRateError,
    ShortRateModel,
    mean_reversion_level,
    rate_mean,
    rate_to_state,
    rate_variance,
    snap_rate,
    stationary_rate_variance,
)
from .specfun import (
    KrawtchoukContext,
    Partition,
    gen_pochhammer,
    hyp1f1_matrix,
    hyp1f1_matrix_err,
    krawtchouk,
    krawtchouk_B,
    krawtchouk_hyp,
    partitions,
    pochhammer,
    schur_normalized,
)

__version__ = "0.1.0"

__all__ = [
    "BirthDeathRates",
    "EhrenfestParams",
    "KrawtchoukContext",
    "OffGridRateError",
    "Partition",
    "PathSample",
    "PriceResult",
    "ShortRateModel",
    "Truncation",
    "VasicekParams",
    "binary_semigroup",
    "birth_death_rates",
    "conditional_mean",
    "conditional_variance",
    "gen_pochhammer",
    "generator_matrix",
    "hyp1f1_matrix",
    "hyp1f1_matrix_err",
    "krawtchouk",
    "krawtchouk_B",
    "krawtchouk_hyp",
    "mean_reversion_level",
    "partitions",
    "pochhammer",
    "price_fk_oracle",
    "price_general",
    "price_mc_oracle",
    "price_symmetric",
    "price_vasicek",
    "rate_mean",
    "rate_to_state",
    "rate_variance",
    "schur_normalized",
    "simulate_path",
    "simulate_state_integrals",
    "snap_rate",
    "stationary_pmf",
    "stationary_rate_variance",
    "transition_matrix",
    "transition_prob",
    "vasicek_to_ehrenfest",
]
