"""Active-STA chain, its stationary distribution and the (q, rho) fixed point."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .combinatorics import ConsistencyError, binomial_pmf_table, singleton_table
from .config import BackoffLadder, NetworkConfig, build_ladder

log = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-7
FIXED_POINT_TOL = 1e-10
MAX_ITERATIONS = 10_000
DAMPING = 0.5
_NEGATIVE_MASS_TOL = 1e-12
# Above this many entries the per-s arrival blocks are rebuilt on every call.
_BLOCK_CACHE_LIMIT = 4_000_000


class SingularSystemError(np.linalg.LinAlgError):
    pass


class DegenerateDistributionError(ValueError):
    """All stationary mass sits on the empty state, so q is undefined."""


class FixedPointError(RuntimeError):
    """The damped (q, rho) iteration hit its cap without converging."""

    def __init__(self, message, q, rho, residual, iterations):
        super().__init__(message)
        self.q = q
        self.rho = rho
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SteadyState:
    mu: np.ndarray
    q: float
    rho: float
    iterations: int
    residual: float
    degenerate: bool = False

    @property
    def mean_active(self) -> float:
        return float(np.arange(len(self.mu)) @ self.mu)


class _ChainKernel:
    """Pieces of the transition matrix that do not depend on rho."""

    def __init__(self, n: int, l: int, lam: float):
        self.n, self.l, self.lam = n, l, lam
        self.arrivals = binomial_pmf_table(n, lam)
        self.singletons = singleton_table(n, l)
        self._blocks = None
        if (min(n, l) + 1) * (n + 1) ** 2 <= _BLOCK_CACHE_LIMIT:
            self._blocks = np.stack([self._block(s) for s in range(min(n, l) + 1)])

    def _block(self, s: int) -> np.ndarray:
        """G[i, j] = A^{j-i+s}_{N-i+s}: s of the i active STAs succeed, then arrivals."""
        n = self.n
        i = np.arange(n + 1)[:, None]
        j = np.arange(n + 1)[None, :]
        idle = n - i + s
        new = j - i + s
        valid = (i >= s) & (new >= 0) & (new <= idle)
        out = np.zeros((n + 1, n + 1))
        ii, jj = np.nonzero(valid)
        out[ii, jj] = self.arrivals[(n - ii + s), (jj - ii + s)]
        return out

    def success_counts(self, rho: float) -> np.ndarray:
        """D[i, s] for i = 0..N, s = 0..min(N, L)."""
        d = binomial_pmf_table(self.n, rho) @ self.singletons
        return d[:, : min(self.n, self.l) + 1]

    def matrix(self, rho: float) -> np.ndarray:
        d = self.success_counts(rho)
        if self._blocks is not None:
            p = np.einsum("is,sij->ij", d, self._blocks)
        else:
            p = np.zeros((self.n + 1, self.n + 1))
            for s in range(d.shape[1]):
                p += d[:, s, None] * self._block(s)
        rows = p.sum(axis=1)
        worst = np.max(np.abs(rows - 1.0))
        if worst > ROW_SUM_TOL:
            raise ConsistencyError(f"transition row sums deviate from 1 by {worst:.3g}")
        return p


@lru_cache(maxsize=64)
def _kernel(n: int, l: int, lam: float) -> _ChainKernel:
    return _ChainKernel(n, l, lam)


def transition_matrix(n: int, l: int, lam: float, rho: float) -> np.ndarray:
    """Row-stochastic matrix P[i, j] of the active-STA count; ``lam = 0`` is allowed here."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must be in [0, 1], got {rho}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must be in [0, 1], got {lam}")
    return _kernel(n, l, float(lam)).matrix(rho)


def build_transition_matrix(config: NetworkConfig, rho: float) -> np.ndarray:
    return transition_matrix(config.n_stas, config.n_rus, config.arrival_rate, rho)


def absorbing_states(matrix: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.isclose(np.diag(matrix), 1.0, rtol=0.0, atol=1e-15))


def solve_stationary(matrix: np.ndarray) -> np.ndarray:
    """Stationary vector of a row-stochastic matrix.

    The last balance equation is replaced by the normalisation condition. A
    chain with several absorbing states has no unique answer; the uniform
    vector over those states is returned instead (see ``is_degenerate``).
    """
    p = np.asarray(matrix, dtype=float)
    size = p.shape[0]
    if p.shape != (size, size):
        raise ValueError("transition matrix must be square")
    absorbing = absorbing_states(p)
    if len(absorbing) > 1:
        mu = np.zeros(size)
        mu[absorbing] = 1.0 / len(absorbing)
        return mu
    system = p.T - np.eye(size)
    system[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    try:
        mu = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"balance equations are singular: {exc}") from None
    if np.min(mu) < -_NEGATIVE_MASS_TOL:
        # cancellation in a nearly decomposable chain; fall back to a subtraction-free solve
        log.debug("stationary solve produced %.3g, using GTH elimination", np.min(mu))
        mu = stationary_gth(p)
    mu = np.clip(mu, 0.0, None)
    return mu / mu.sum()


def stationary_gth(matrix: np.ndarray) -> np.ndarray:
    """Grassmann-Taksar-Heyman elimination for an irreducible stochastic matrix."""
    a = np.array(matrix, dtype=float)
    size = a.shape[0]
    for k in range(size - 1, 0, -1):
        out = a[k, :k].sum()
        if out <= 0.0:
            raise SingularSystemError(f"state {k} cannot reach lower states")
        a[:k, k] /= out
        a[:k, :k] += np.outer(a[:k, k], a[k, :k])
    x = np.zeros(size)
    x[0] = 1.0
    for k in range(1, size):
        x[k] = x[:k] @ a[:k, k]
    return x / x.sum()


def is_degenerate(matrix: np.ndarray) -> bool:
    return len(absorbing_states(np.asarray(matrix))) > 1


def stationary_residual(mu: np.ndarray, matrix: np.ndarray) -> float:
    return float(np.max(np.abs(mu @ matrix - mu)))


def success_rate(mu: np.ndarray, rho: float, config: NetworkConfig) -> float:
    """Per-attempt success probability of a tagged accessing STA.

    Conditions on the number ``a`` of other active STAs (weighted by
    (a+1)*mu[a+1]); each of them independently accesses with probability
    rho and picks the tagged RU with probability 1/L, so the inner binomial
    sum over accessing neighbours collapses to (1 - rho/L)**a.
    """
    mu = np.asarray(mu, dtype=float)
    n, l = config.n_stas, config.n_rus
    a = np.arange(n)
    weights = (a + 1) * mu[1:]
    total = weights.sum()
    if total <= 0.0:
        raise DegenerateDistributionError("no stationary mass on active states")
    clear = (1.0 - rho / l) ** a
    return float(weights @ clear / total)


def access_rate(q: float, ladder: BackoffLadder) -> float:
    """Probability that an active STA's counter sits at 0 in a given slot."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    w0 = ladder.w0
    h = ladder.h
    m = ladder.m
    if m == 0:
        return w0 / (h[0] + w0)
    ratio = (1.0 - q) / 2.0
    lower = sum(h[x] * ratio**x for x in range(m))
    return w0 / (q * lower + h[m] * ratio**m + w0)


def solve_fixed_point(
    config: NetworkConfig,
    tol: float = FIXED_POINT_TOL,
    max_iterations: int = MAX_ITERATIONS,
    damping: float = DAMPING,
) -> SteadyState:
    """Jointly solve the chain's stationary law, q and rho by damped iteration from rho = 1."""
    ladder = build_ladder(config)
    kernel = _kernel(config.n_stas, config.n_rus, config.arrival_rate)
    rho = 1.0
    q = np.nan
    residual = np.inf
    for iteration in range(1, max_iterations + 1):
        p = kernel.matrix(rho)
        mu = solve_stationary(p)
        q_new = success_rate(mu, rho, config)
        rho_new = (1.0 - damping) * rho + damping * access_rate(q_new, ladder)
        residual = (abs(q_new - q) if iteration > 1 else np.inf) + abs(rho_new - rho)
        q, rho = q_new, rho_new
        if residual <= tol:
            break
    else:
        raise FixedPointError(
            f"fixed point did not converge in {max_iterations} iterations "
            f"(q={q:.6g}, rho={rho:.6g}, residual={residual:.3g})",
            q=q,
            rho=rho,
            residual=residual,
            iterations=max_iterations,
        )
    # one undamped pass removes the geometric tail left by damping
    rho = access_rate(q, ladder)
    p = kernel.matrix(rho)
    mu = solve_stationary(p)
    q = success_rate(mu, rho, config)
    log.debug("fixed point for %s: %d iterations, residual %.3g", config, iteration, residual)
    return SteadyState(
        mu=mu, q=q, rho=rho, iterations=iteration, residual=residual, degenerate=is_degenerate(p)
    )
