"""Average AoI from the steady state: waiting, service and vacancy moments."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import BackoffLadder, NetworkConfig, build_ladder
from .steady_state import SteadyState, solve_fixed_point


@dataclass(frozen=True)
class WaitMoments:
    """First two moments of the slots spent at each level until the counter hits 0."""

    eu: tuple[float, ...]
    eu2: tuple[float, ...]


@dataclass(frozen=True)
class ServiceMoments:
    """Moments of the slots from entering level 0 to the next success (K)."""

    er0: float
    er0_sq: float


@dataclass(frozen=True)
class AoiBreakdown:
    ev: float
    ev2: float
    ek: float
    ek2: float
    es: float
    ex: float
    ex2: float
    aaoi: float
    steady: SteadyState | None = None

    @classmethod
    def assemble(cls, ev, ev2, ek, ek2, es, steady=None) -> "AoiBreakdown":
        ex = ev + ek
        ex2 = ev2 + ek2 + 2.0 * ev * ek
        aaoi = es + ex2 / (2.0 * ex) - 0.5 if math.isfinite(ex2) else math.inf
        return cls(
            ev=ev, ev2=ev2, ek=ek, ek2=ek2, es=es, ex=ex, ex2=ex2, aaoi=aaoi, steady=steady,
        )


def wait_moments(ladder: BackoffLadder, l: int | None = None) -> WaitMoments:
    l = ladder.n_rus if l is None else l
    eu, eu2 = [], []
    for w, a, b in zip(ladder.w, ladder.alpha, ladder.beta):
        eu.append(a * (a + 1) / 2 * l / w + ((a + 1) * b + 1) / w)
        eu2.append(a * (a + 1) * (2 * a + 1) / 6 * l / w + ((a + 1) ** 2 * b + 1) / w)
    return WaitMoments(eu=tuple(eu), eu2=tuple(eu2))


def service_moments(q: float, moments: WaitMoments) -> ServiceMoments:
    """Backward recursion from the top level down to level 0.

    ``q = 0`` (every attempt collides) gives infinite moments.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    if q == 0.0:
        return ServiceMoments(er0=math.inf, er0_sq=math.inf)
    fail = 1.0 - q
    m = len(moments.eu) - 1
    # top levels with the moments of the one below behave like its self-loop
    while m > 0 and (moments.eu[m], moments.eu2[m]) == (moments.eu[m - 1], moments.eu2[m - 1]):
        m -= 1
    eu_m, eu2_m = moments.eu[m], moments.eu2[m]
    er = eu_m / q
    er2 = eu2_m / q + 2.0 * fail * er * er
    for x in range(m - 1, -1, -1):
        eu, eu2 = moments.eu[x], moments.eu2[x]
        er, er2 = eu + fail * er, eu2 + 2.0 * fail * er * eu + fail * er2
    return ServiceMoments(er0=er, er0_sq=er2)


def vacancy_moments(lam: float) -> tuple[float, float]:
    """Mean and second moment of the idle gap before the next arrival.

    The gap is geometric on {0, 1, ...} with success probability ``lam``.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"arrival rate must be in (0, 1], got {lam}")
    return 1.0 / lam - 1.0, (1.0 - lam) * (2.0 - lam) / lam**2


def expected_service(lam: float, rho: float, q: float) -> float:
    """Mean generation-to-reception time, with access treated as Bernoulli(rho)."""
    if not 0.0 <= lam <= 1.0 or not 0.0 <= rho * q <= 1.0:
        raise ValueError("lam and rho*q must lie in [0, 1]")
    if lam == 0.0 and rho * q == 0.0:
        raise ValueError("service time is unbounded when lam = rho*q = 0")
    pq = rho * q
    return 1.0 / (lam * (1.0 - pq) + pq)


def aoi_from_steady(config: NetworkConfig, steady: SteadyState) -> AoiBreakdown:
    ladder = build_ladder(config)
    service = service_moments(steady.q, wait_moments(ladder))
    ev, ev2 = vacancy_moments(config.arrival_rate)
    es = expected_service(config.arrival_rate, steady.rho, steady.q)
    return AoiBreakdown.assemble(ev, ev2, service.er0, service.er0_sq, es, steady=steady)


def average_aoi(config: NetworkConfig) -> AoiBreakdown:
    return aoi_from_steady(config, solve_fixed_point(config))


def is_corollary1_equivalent(a: NetworkConfig, b: NetworkConfig) -> bool:
    """Both configs keep every window at or below L + 1, so they share one AAoI."""
    if (a.n_stas, a.n_rus, a.arrival_rate) != (b.n_stas, b.n_rus, b.arrival_rate):
        raise ValueError("configs must share (N, L, lambda)")
    limit = a.n_rus + 1
    return a.w0 * 2**a.m <= limit and b.w0 * 2**b.m <= limit
