"""Special-function kernels used by the bond pricers.

Four ingredients live here:

* integer partitions and the generalized (partition-indexed) Pochhammer symbol,
* normalized Schur functions Z_m(z) = f_m * s_m(z), where f_m counts standard
  Young tableaux of shape m and s_m is the classical Schur polynomial,
* the confluent hypergeometric series of matrix argument
  1F1(a; b; z) = sum_j (1/j!) sum_{|m|=j} [a]_m / [b]_m * Z_m(z),
  truncated at partition weight H,
* Krawtchouk polynomials K_l(x; N, p), orthogonal for the binomial(N, p)
  weight, together with their first-moment coefficients B_{m,l}.

All arithmetic is double precision.  Schur polynomials are evaluated by
branching over one variable at a time, which stays finite when eigenvalues
repeat; the determinant/Vandermonde form is 0/0 there and is used only as a
test oracle at perturbed distinct points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "Partition",
    "partitions",
    "pochhammer",
    "gen_pochhammer",
    "schur_normalized",
    "hyp1f1_matrix",
    "hyp1f1_matrix_err",
    "KrawtchoukContext",
    "krawtchouk",
    "krawtchouk_hyp",
    "krawtchouk_B",
]

# Above this ball count, binomials are assembled in log space to dodge
# intermediate overflow.
_LOGSPACE_N = 60


@dataclass(frozen=True)
class Partition:
    """Non-increasing tuple of non-negative integers; trailing zeros stripped."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p < 0 for p in parts):
            raise ValueError(f"partition parts must be non-negative, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be non-increasing, got {parts}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def _as_parts(m: Partition | Iterable[int]) -> tuple[int, ...]:
    if isinstance(m, Partition):
        return m.parts
    return Partition(tuple(m)).parts


def partitions(weight: int, max_parts: int | None = None) -> Iterator[Partition]:
    """Partitions of `weight` into at most `max_parts` parts.

    Reverse-lexicographic order, iterative (explicit stack, no recursion).
    """
    if weight < 0:
        raise ValueError("weight must be non-negative")
    if max_parts is None:
        max_parts = weight
    if weight == 0:
        yield Partition(())
        return
    if max_parts <= 0:
        return
    # Entries: (prefix, remaining weight, largest part allowed, slots left).
    # Larger leading parts are pushed last so they pop first (reverse-lex).
    stack: list[tuple[tuple[int, ...], int, int, int]] = [((), weight, weight, max_parts)]
    while stack:
        prefix, rem, cap, slots = stack.pop()
        if rem == 0:
            yield Partition(prefix)
            continue
        if slots == 0:
            continue
        lo = -(-rem // slots)  # smallest feasible next part
        for v in range(lo, min(cap, rem) + 1):
            stack.append((prefix + (v,), rem - v, v, slots - 1))


def pochhammer(x: float, k: int) -> float:
    """Rising factorial (x)_k = x (x+1) ... (x+k-1), with (x)_0 = 1."""
    out = 1.0
    for i in range(k):
        out *= x + i
    return out


def gen_pochhammer(a: float, m: Partition | Iterable[int]) -> float:
    """Partition-indexed Pochhammer symbol [a]_m = prod_j (a - j + 1)_{m_j}."""
    out = 1.0
    for j, mj in enumerate(_as_parts(m), start=1):
        out *= pochhammer(a - j + 1, mj)
    return out


def _num_standard_tableaux(parts: tuple[int, ...]) -> int:
    """Number of standard Young tableaux of shape `parts` (exact integer)."""
    if not parts:
        return 1
    n = len(parts)
    ell = [parts[i] + n - 1 - i for i in range(n)]
    num = math.factorial(sum(parts))
    for i in range(n):
        for j in range(i + 1, n):
            num *= ell[i] - ell[j]
    den = math.prod(math.factorial(li) for li in ell)
    f = Fraction(num, den)
    if f.denominator != 1:
        raise AssertionError(f"tableau count is not integral for {parts}")
    return int(f)


def _interlacing(mu: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Partitions nu with mu_1 >= nu_1 >= mu_2 >= nu_2 >= ... (horizontal strips)."""
    ranges = []
    for i, hi in enumerate(mu):
        lo = mu[i + 1] if i + 1 < len(mu) else 0
        ranges.append(range(lo, hi + 1))
    for nu in product(*ranges):
        out = nu
        while out and out[-1] == 0:
            out = out[:-1]
        yield out


def _schur_poly(parts: tuple[int, ...], z: tuple[float, ...]) -> float:
    """Classical Schur polynomial s_parts(z) by branching over the last variable.

    Finite for arbitrary (including repeated) arguments.
    """
    memo: dict[tuple[int, tuple[int, ...]], float] = {}

    def rec(k: int, mu: tuple[int, ...]) -> float:
        if not mu:
            return 1.0
        if len(mu) > k:
            return 0.0
        if k == 1:
            return z[0] ** mu[0]
        key = (k, mu)
        val = memo.get(key)
        if val is not None:
            return val
        x = z[k - 1]
        w = sum(mu)
        total = 0.0
        for nu in _interlacing(mu):
            total += x ** (w - sum(nu)) * rec(k - 1, nu)
        memo[key] = total
        return total

    return rec(len(z), parts)


def schur_normalized(m: Partition | Iterable[int], z) -> float:
    """Normalized Schur function Z_m(z) = f_m * s_m(z).

    `z` is the eigenvalue vector (any array-like of reals; may be empty or
    carry repeated entries).  Returns 0 when m has more (nonzero) parts than
    z has entries.
    """
    parts = _as_parts(m)
    zz = tuple(float(v) for v in np.asarray(z, dtype=float).ravel())
    if not parts:
        return 1.0
    if len(parts) > len(zz):
        return 0.0
    return float(_num_standard_tableaux(parts)) * _schur_poly(parts, zz)


def _check_lower_parameter(b: float, n: int) -> None:
    # [b]_m vanishes for some partition with <= n parts exactly when b is an
    # integer <= n - 1; those b make the series undefined.
    if float(b).is_integer() and b <= n - 1:
        raise ValueError(
            f"lower parameter b={b} is an excluded integer for argument dimension {n}"
        )


def hyp1f1_matrix(a: float, b: float, z, H: int) -> float:
    """Truncated confluent hypergeometric function of matrix argument.

    Sums the partition series over weights 0..H, partitions restricted to at
    most dim(z) parts.  dim(z) = 0 encodes the empty argument (result 1).
    """
    return hyp1f1_matrix_err(a, b, z, H)[0]


def hyp1f1_matrix_err(a: float, b: float, z, H: int) -> tuple[float, float]:
    """Like :func:`hyp1f1_matrix` but also returns the magnitude of the last
    (weight-H) retained layer, usable as a truncation-error estimate."""
    zz = np.asarray(z, dtype=float).ravel()
    n = int(zz.size)
    if H < 0:
        raise ValueError("truncation order H must be >= 0")
    _check_lower_parameter(b, n)
    if n == 0:
        return 1.0, 0.0
    if a == 1.0:
        # [1]_m = 0 unless m has a single row, so layer j reduces to
        # h_j(z) / (b)_j with h_j the complete homogeneous symmetric
        # polynomial.  h is built by the one-variable-at-a-time recurrence
        # h_j <- h_j + x * h_{j-1}, stable under repeated entries.
        h = [0.0] * (H + 1)
        h[0] = 1.0
        for x in zz:
            for j in range(1, H + 1):
                h[j] += x * h[j - 1]
        total = 0.0
        pb = 1.0
        last = 0.0
        for j in range(H + 1):
            if j > 0:
                pb *= b + j - 1
            last = h[j] / pb
            total += last
        return total, abs(last)
    total = 0.0
    last = 0.0
    for j in range(H + 1):
        layer = 0.0
        for m in partitions(j, max_parts=n):
            num = gen_pochhammer(a, m)
            if num == 0.0:
                continue
            den = gen_pochhammer(b, m)
            if den == 0.0:
                raise ValueError(f"lower parameter b={b} degenerates for partition {m.parts}")
            layer += num / den * schur_normalized(m, zz)
        layer /= math.factorial(j)
        total += layer
        last = layer
    return total, abs(last)


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class KrawtchoukContext:
    """Evaluation context for Krawtchouk polynomials K_l(x; N, p).

    Caches the binomial weights omega(x) = C(N,x) p^x q^(N-x) and the dual
    weights pi_l = C(N,l) (p/q)^l = omega(l) q^(-N).
    """

    N: int
    p: float

    def __post_init__(self) -> None:
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @cached_property
    def omega(self) -> np.ndarray:
        N, p, q = self.N, self.p, self.q
        x = np.arange(N + 1)
        if N <= _LOGSPACE_N:
            combs = np.array([math.comb(N, int(i)) for i in x], dtype=float)
            w = combs * p**x * q ** (N - x)
        else:
            logw = (
                np.array([_log_comb(N, int(i)) for i in x])
                + x * math.log(p)
                + (N - x) * math.log(q)
            )
            w = np.exp(logw)
        w.flags.writeable = False
        return w

    @cached_property
    def pi(self) -> np.ndarray:
        N, p, q = self.N, self.p, self.q
        ell = np.arange(N + 1)
        if N <= _LOGSPACE_N:
            combs = np.array([math.comb(N, int(i)) for i in ell], dtype=float)
            out = combs * (p / q) ** ell
        else:
            out = np.exp(
                np.array([_log_comb(N, int(i)) for i in ell]) + ell * math.log(p / q)
            )
        out.flags.writeable = False
        return out

    @cached_property
    def table(self) -> np.ndarray:
        """K[l, x] over the full index square."""
        N = self.N
        K = np.empty((N + 1, N + 1))
        for l in range(N + 1):
            for x in range(N + 1):
                K[l, x] = krawtchouk(l, x, self)
        K.flags.writeable = False
        return K


def _check_index(i: int, N: int, name: str) -> None:
    if not isinstance(i, (int, np.integer)) or not 0 <= i <= N:
        raise ValueError(f"index {name}={i} out of range 0..{N}")


def krawtchouk(l: int, x: int, ctx: KrawtchoukContext) -> float:
    """Krawtchouk polynomial K_l(x; N, p), normalized so K_l(0) = 1.

    Evaluated by the finite binomial sum
    K_l(x) = C(N,l)^(-1) sum_k (-1)^k C(N-x, l-k) C(x, k) (q/p)^k.
    """
    N, p, q = ctx.N, ctx.p, ctx.q
    _check_index(l, N, "l")
    _check_index(x, N, "x")
    k_lo = max(0, l - (N - x))
    k_hi = min(l, x)
    if N <= _LOGSPACE_N:
        acc = 0.0
        for k in range(k_lo, k_hi + 1):
            acc += (-1.0) ** k * math.comb(N - x, l - k) * math.comb(x, k) * (q / p) ** k
        return acc / math.comb(N, l)
    # Large N: accumulate signed terms in log magnitude.
    logs = []
    signs = []
    lqp = math.log(q / p)
    base = _log_comb(N, l)
    for k in range(k_lo, k_hi + 1):
        logs.append(_log_comb(N - x, l - k) + _log_comb(x, k) + k * lqp - base)
        signs.append(-1.0 if k % 2 else 1.0)
    m = max(logs)
    return math.exp(m) * sum(s * math.exp(g - m) for s, g in zip(signs, logs))


def krawtchouk_hyp(l: int, x: int, ctx: KrawtchoukContext) -> float:
    """Cross-check form of K_l(x): terminating Gauss series
    sum_k (-l)_k (-x)_k / ((-N)_k k!) p^(-k)."""
    N, p = ctx.N, ctx.p
    _check_index(l, N, "l")
    _check_index(x, N, "x")
    acc = 1.0
    term = 1.0
    for k in range(min(l, x)):
        term *= ((-l + k) * (-x + k)) / ((-N + k) * (k + 1) * p)
        acc += term
    return acc


def krawtchouk_B(m: int, l: int, ctx: KrawtchoukContext) -> float:
    """First-moment coefficient B_{m,l} = sum_x x K_l(x) K_m(x) omega(x).

    Closed form (symmetric in m, l; write lo <= hi):
        0                              if hi - lo >= 2,
        -hi * q / pi_{hi-1}            if lo = hi - 1,
        ((N - hi) p + hi q) / pi_hi    if lo = hi.
    """
    N, p, q = ctx.N, ctx.p, ctx.q
    _check_index(m, N, "m")
    _check_index(l, N, "l")
    lo, hi = sorted((int(m), int(l)))
    if hi - lo >= 2:
        return 0.0
    if lo == hi:
        return ((N - hi) * p + hi * q) / ctx.pi[hi]
    return -hi * q / ctx.pi[hi - 1]
