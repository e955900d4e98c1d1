"""Continuous-time Ehrenfest chain on {0, ..., N}.

N balls fluctuate independently between two urns: each ball carries a Poisson
clock of intensity `lam`, and at a clock tick moves according to the 2x2
transition matrix [[1-alpha, alpha], [beta, 1-beta]].  The urn-I occupation
count is a birth-and-death chain with rates

    birth_i = lam * alpha * (N - i),      death_i = lam * beta * i,

stationary law binomial(N, p) with p = alpha / (alpha + beta), and relaxation
speed lam * (alpha + beta).  Transition probabilities expand in Krawtchouk
polynomials with exponentially decaying mode weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .specfun import KrawtchoukContext

__all__ = [
    "EhrenfestParams",
    "BirthDeathRates",
    "PathSample",
    "birth_death_rates",
    "generator_matrix",
    "binary_semigroup",
    "transition_prob",
    "transition_matrix",
    "conditional_mean",
    "conditional_variance",
    "stationary_pmf",
    "simulate_path",
    "simulate_state_integrals",
]

# Negative round-off from the alternating Krawtchouk sums is clamped to zero
# below this magnitude.
_NEG_CLAMP = 1e-9


@dataclass(frozen=True)
class EhrenfestParams:
    """Chain parameters: ball count N, per-ball intensity lam, flip probabilities."""

    N: int
    lam: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")

    @property
    def p(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def speed(self) -> float:
        """Relaxation speed lam * (alpha + beta) of every non-stationary mode."""
        return self.lam * (self.alpha + self.beta)

    @cached_property
    def krawtchouk(self) -> KrawtchoukContext:
        return KrawtchoukContext(self.N, self.p)


@dataclass(frozen=True)
class BirthDeathRates:
    """Per-state birth and death rates (arrays over states 0..N)."""

    birth: np.ndarray
    death: np.ndarray


@dataclass(frozen=True)
class PathSample:
    """One chain trajectory: event times (starting at 0) and visited states."""

    times: np.ndarray
    states: np.ndarray
    horizon: float


def birth_death_rates(params: EhrenfestParams) -> BirthDeathRates:
    i = np.arange(params.N + 1, dtype=float)
    birth = params.lam * params.alpha * (params.N - i)
    death = params.lam * params.beta * i
    birth.flags.writeable = False
    death.flags.writeable = False
    return BirthDeathRates(birth, death)


def generator_matrix(params: EhrenfestParams) -> np.ndarray:
    """Tridiagonal generator Q of the chain."""
    rates = birth_death_rates(params)
    N = params.N
    Q = np.zeros((N + 1, N + 1))
    for i in range(N + 1):
        if i < N:
            Q[i, i + 1] = rates.birth[i]
        if i > 0:
            Q[i, i - 1] = rates.death[i]
        Q[i, i] = -(rates.birth[i] + rates.death[i])
    return Q


def _check_time(t: float) -> None:
    if t < 0.0:
        raise ValueError(f"time must be non-negative, got {t}")


def _check_state(i: int, N: int, name: str = "i") -> None:
    if not isinstance(i, (int, np.integer)) or not 0 <= i <= N:
        raise ValueError(f"state {name}={i} out of range 0..{N}")


def binary_semigroup(t: float, params: EhrenfestParams) -> np.ndarray:
    """Transition matrix at time t of a single ball (two-state chain)."""
    _check_time(t)
    p, q = params.p, params.q
    e = math.exp(-params.speed * t)
    return np.array([[q + p * e, p - p * e], [q - q * e, p + q * e]])


def _clamp_tiny_negative(x: np.ndarray) -> np.ndarray:
    x[(x < 0.0) & (x > -_NEG_CLAMP)] = 0.0
    return x


def transition_prob(i: int, j: int, t: float, params: EhrenfestParams) -> float:
    """P(X_{s+t} = j | X_s = i)."""
    N = params.N
    _check_state(i, N, "i")
    _check_state(j, N, "j")
    _check_time(t)
    ctx = params.krawtchouk
    decay = np.exp(-params.speed * t * np.arange(N + 1))
    val = float(ctx.pi[j] * np.sum(ctx.omega * decay * ctx.table[i] * ctx.table[j]))
    if -_NEG_CLAMP < val < 0.0:
        val = 0.0
    return val


def transition_matrix(t: float, params: EhrenfestParams) -> np.ndarray:
    """Full transition matrix P(t) over states 0..N."""
    _check_time(t)
    ctx = params.krawtchouk
    decay = np.exp(-params.speed * t * np.arange(params.N + 1))
    K = ctx.table
    P = (K * (ctx.omega * decay)) @ K.T
    P *= ctx.pi[np.newaxis, :]
    return _clamp_tiny_negative(P)


def conditional_mean(i: int, t: float, params: EhrenfestParams) -> float:
    """E[X_t | X_0 = i] = N p - (N p - i) exp(-speed t)."""
    _check_state(i, params.N, "i")
    _check_time(t)
    np_ = params.N * params.p
    return np_ - (np_ - i) * math.exp(-params.speed * t)


def conditional_variance(i: int, t: float, params: EhrenfestParams) -> float:
    """Var[X_t | X_0 = i], from the per-ball Bernoulli decomposition:

        Var = N p q (1 - E^2) + (N p - i)(2p - 1)(E - E^2),   E = exp(-speed t).

    Vanishes at t = 0 and tends to N p q.
    """
    _check_state(i, params.N, "i")
    _check_time(t)
    N, p, q = params.N, params.p, params.q
    E = math.exp(-params.speed * t)
    return N * p * q * (1.0 - E * E) + (N * p - i) * (2.0 * p - 1.0) * (E - E * E)


def stationary_pmf(params: EhrenfestParams) -> np.ndarray:
    """Binomial(N, p) stationary (and limiting) distribution."""
    return params.krawtchouk.omega.copy()


def simulate_path(
    i0: int, horizon: float, params: EhrenfestParams, seed: int | np.random.SeedSequence
) -> PathSample:
    """Exact event-driven simulation of one trajectory on [0, horizon].

    In state i the holding time is exponential with rate birth_i + death_i and
    the jump goes up with probability birth_i / (birth_i + death_i).  Driven by
    numpy's default generator (PCG64), so results are reproducible for a fixed
    seed across platforms.
    """
    _check_state(i0, params.N, "i0")
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    rates = birth_death_rates(params)
    rng = np.random.default_rng(seed)
    times = [0.0]
    states = [int(i0)]
    t = 0.0
    i = int(i0)
    while True:
        total = rates.birth[i] + rates.death[i]
        t += rng.exponential(1.0 / total)
        if t > horizon:
            break
        i += 1 if rng.random() < rates.birth[i] / total else -1
        times.append(t)
        states.append(i)
    return PathSample(np.asarray(times), np.asarray(states, dtype=np.int64), float(horizon))


def simulate_state_integrals(
    i0: int,
    horizon: float,
    params: EhrenfestParams,
    n_paths: int,
    seed: int | np.random.SeedSequence,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact simulation of `n_paths` trajectories, advanced event-synchronously.

    Returns (integral of the state over [0, horizon], state at the horizon)
    per path.  The occupation integral is exact (piecewise constant between
    events, no time grid).  Deterministic for fixed (n_paths, seed).
    """
    _check_state(i0, params.N, "i0")
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    rates = birth_death_rates(params)
    rng = np.random.default_rng(seed)
    state = np.full(n_paths, int(i0), dtype=np.int64)
    t = np.zeros(n_paths)
    occ = np.zeros(n_paths)
    active = np.ones(n_paths, dtype=bool)
    while active.any():
        b = rates.birth[state]
        total = b + rates.death[state]
        wait = rng.exponential(1.0, n_paths) / total
        u = rng.random(n_paths)
        dt = np.minimum(wait, horizon - t)
        occ[active] += state[active] * dt[active]
        t = t + wait
        still = active & (t <= horizon)
        up = still & (u < b / total)
        state[up] += 1
        state[still & ~up] -= 1
        active = still
    return occ, state
