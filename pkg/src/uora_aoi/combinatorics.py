"""Elementary probabilities behind the active-STA chain.

Binomial arrival/access counts and the balls-into-bins probability that
exactly ``s`` of ``l`` RUs carry a single transmission when ``g`` STAs each
pick an RU uniformly at random.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

# Above this many objects the alternating sum loses too many digits.
CLOSED_FORM_MAX_OBJECTS = 25
_NEG_CLAMP = 1e-12
_DIRECT_BINOMIAL_MAX_N = 30


class ConsistencyError(ArithmeticError):
    """A probability computation produced a value outside its valid range."""


class LogFactorialTable:
    """ln(k!) for k = 0..cap, shared read-only."""

    def __init__(self, cap: int):
        if cap < 0:
            raise ValueError("cap must be non-negative")
        self.table = gammaln(np.arange(cap + 1, dtype=float) + 1.0)
        self.table[:2] = 0.0

    @property
    def cap(self) -> int:
        return len(self.table) - 1

    def __getitem__(self, k):
        return self.table[k]

    def log_comb(self, n, k):
        return self.table[n] - self.table[k] - self.table[n - k]


@lru_cache(maxsize=8)
def log_factorials(cap: int) -> LogFactorialTable:
    return LogFactorialTable(cap)


def _clamp(value: float) -> float:
    if value < 0.0:
        if value < -_NEG_CLAMP:
            raise ConsistencyError(f"probability evaluated to {value!r}")
        return 0.0
    return value


def binomial_pmf(k: int, n: int, p: float) -> float:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    if n <= _DIRECT_BINOMIAL_MAX_N:
        return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    log_mass = (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    return math.exp(log_mass)


def arrival_count_prob(k: int, n: int, lam: float) -> float:
    """Probability that ``k`` of ``n`` idle STAs receive an update in one slot."""
    return binomial_pmf(k, n, lam)


def access_count_prob(g: int, i: int, rho: float) -> float:
    """Probability that ``g`` of ``i`` active STAs access an RU in one slot."""
    return binomial_pmf(g, i, rho)


def binomial_pmf_table(n_max: int, p: float) -> np.ndarray:
    """Matrix ``M[n, k]`` = Binomial(n, p) mass at k (zero for k > n)."""
    n = np.arange(n_max + 1)[:, None]
    k = np.arange(n_max + 1)[None, :]
    valid = k <= n
    out = np.zeros((n_max + 1, n_max + 1))
    if p == 0.0:
        out[:, 0] = 1.0
        return out
    if p == 1.0:
        out[np.arange(n_max + 1), np.arange(n_max + 1)] = 1.0
        return out
    lf = log_factorials(n_max).table
    nn, kk = np.broadcast_arrays(n, k)
    nk = np.where(valid, nn - kk, 0)
    log_mass = lf[nn] - lf[np.where(valid, kk, 0)] - lf[nk] + kk * math.log(p) + nk * math.log1p(-p)
    out[valid] = np.exp(log_mass[valid])
    return out


def singleton_alloc_prob_closed(s: int, g: int, l: int) -> float:
    """Alternating-sum evaluation of the singleton probability.

    Each term is carried as a sign and a log-magnitude; the signed terms are
    then summed with ``math.fsum``. Accurate for moderate ``g`` only.
    """
    if l < 1:
        raise ValueError("need at least one RU")
    if s < 0 or g < 0:
        raise ValueError("s and g must be non-negative")
    if s > min(g, l):
        return 0.0
    if g == 0:
        return 1.0
    lf = log_factorials(max(l, g))
    prefix = lf[l] + lf[g] - g * math.log(l) - lf[s]
    terms = []
    for h in range(s, min(l, g) + 1):
        base = l - h
        power = g - h
        if base == 0 and power > 0:
            continue
        log_pow = power * math.log(base) if power > 0 else 0.0
        log_mag = prefix + log_pow - lf[h - s] - lf[l - h] - lf[g - h]
        sign = -1.0 if (s + h) % 2 else 1.0
        terms.append(sign * math.exp(log_mag))
    return _clamp(math.fsum(terms))


@lru_cache(maxsize=256)
def singleton_table_dp(g_max: int, l: int) -> np.ndarray:
    """``T[g, s]`` for every g <= g_max, built by throwing objects one at a time.

    The chain state is (empty bins, singleton bins); an object lands in an
    empty bin, a singleton bin or a crowded bin with probabilities
    proportional to their counts. Only nonnegative terms are ever added.
    """
    if l < 1:
        raise ValueError("need at least one RU")
    if g_max < 0:
        raise ValueError("g_max must be non-negative")
    e = np.arange(l + 1)[:, None]
    s1 = np.arange(l + 1)[None, :]
    p_empty = e / l
    p_single = s1 / l
    p_crowded = np.clip(l - e - s1, 0, None) / l
    dist = np.zeros((l + 1, l + 1))
    dist[l, 0] = 1.0
    out = np.zeros((g_max + 1, l + 1))
    out[0, 0] = 1.0
    for g in range(1, g_max + 1):
        new = dist * p_crowded
        new[:-1, 1:] += (dist * p_empty)[1:, :-1]
        new[:, :-1] += (dist * p_single)[:, 1:]
        dist = new
        out[g] = dist.sum(axis=0)
    out.setflags(write=False)
    return out


def singleton_alloc_prob_dp(s: int, g: int, l: int) -> float:
    if l < 1:
        raise ValueError("need at least one RU")
    if s < 0 or g < 0:
        raise ValueError("s and g must be non-negative")
    if s > min(g, l):
        return 0.0
    return float(singleton_table_dp(g, l)[g, s])


def singleton_alloc_prob(s: int, g: int, l: int) -> float:
    """Probability that exactly ``s`` of ``l`` RUs receive exactly one of ``g`` STAs."""
    if g > CLOSED_FORM_MAX_OBJECTS:
        return singleton_alloc_prob_dp(s, g, l)
    return singleton_alloc_prob_closed(s, g, l)


@lru_cache(maxsize=256)
def singleton_table(g_max: int, l: int) -> np.ndarray:
    """``T[g, s]`` for g = 0..g_max and s = 0..l (s > g entries are 0)."""
    table = np.zeros((g_max + 1, l + 1))
    dp = singleton_table_dp(g_max, l) if g_max > CLOSED_FORM_MAX_OBJECTS else None
    for g in range(g_max + 1):
        for s in range(min(g, l) + 1):
            if dp is not None and g > CLOSED_FORM_MAX_OBJECTS:
                table[g, s] = dp[g, s]
            else:
                table[g, s] = singleton_alloc_prob_closed(s, g, l)
    table.setflags(write=False)
    return table


def success_count_prob(s: int, i: int, rho: float, l: int) -> float:
    """Probability that ``s`` of ``i`` active STAs transmit successfully."""
    if not 0 <= s <= i:
        raise ValueError(f"need 0 <= s <= i, got s={s}, i={i}")
    if s > l:
        return 0.0
    return math.fsum(
        access_count_prob(g, i, rho) * singleton_alloc_prob(s, g, l) for g in range(s, i + 1)
    )


def success_count_table(n: int, rho: float, l: int) -> np.ndarray:
    """``D[i, s]`` for i = 0..n, s = 0..l."""
    access = binomial_pmf_table(n, rho)
    return access @ singleton_table(n, l)
