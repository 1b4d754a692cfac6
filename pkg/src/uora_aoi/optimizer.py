"""Search for the AoI-minimising (W_0, m)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .analytics import average_aoi
from .bounds import aaoi_closed_form_m0, stationary_roots
from .config import EOCW_LIMIT, NetworkConfig
from .steady_state import FixedPointError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Evaluation:
    w0: int
    m: int
    aaoi: float


@dataclass(frozen=True)
class OptimizationResult:
    w0_star: int
    m_star: int
    predicted_aaoi: float
    evaluations: list[Evaluation]
    method: str
    failed: list[tuple[int, int, str]] = field(default_factory=list)
    edge_of_range: bool = False
    target_exponent: float | None = None

    @property
    def eocw_min(self) -> int:
        return int(math.log2(self.w0_star))


def _argmin(evaluations: list[Evaluation]) -> Evaluation:
    # ties: smallest W_0, then smallest m
    return min(evaluations, key=lambda e: (e.aaoi, e.w0, e.m))


def exhaustive_search(n: int, l: int, lam: float) -> OptimizationResult:
    """Evaluate every admissible (W_0, m) and keep the best.

    Configurations whose top window stays at or below L + 1 all share one
    AAoI, so only the first of them is evaluated; the rest reuse its value.
    """
    evaluations: list[Evaluation] = []
    failed: list[tuple[int, int, str]] = []
    flat_value: float | None = None
    for e in range(EOCW_LIMIT + 1):
        for m in range(EOCW_LIMIT - e + 1):
            w0 = 2**e
            if w0 * 2**m <= l + 1 and flat_value is not None:
                evaluations.append(Evaluation(w0, m, flat_value))
                continue
            config = NetworkConfig(n, l, lam, e, m)
            try:
                value = average_aoi(config).aaoi
            except FixedPointError as exc:
                failed.append((w0, m, str(exc)))
                log.warning("exhaustive search cell (W0=%d, m=%d) failed: %s", w0, m, exc)
                continue
            if w0 * 2**m <= l + 1:
                flat_value = value
            evaluations.append(Evaluation(w0, m, value))
    if not evaluations:
        raise FixedPointError("every exhaustive-search cell failed", math.nan, math.nan,
                              math.inf, 0)
    best = _argmin(evaluations)
    return OptimizationResult(best.w0, best.m, best.aaoi, evaluations, "exhaustive", failed)


def _candidate_exponents(target: float) -> list[int]:
    if float(target).is_integer():
        return [int(target)]
    return [math.floor(target), math.ceil(target)]


def efficient_search_alg1(n: int, l: int) -> OptimizationResult:
    """Few-evaluation window search for generate-at-will traffic (m = 0).

    Targets the largest stationary point of the approximate lower bound when
    it exists and sqrt(L+1) otherwise. The exponent is clamped to
    [log2(L+1), 7]: every window at or below L + 1 yields the same AAoI.
    """
    if n < 2 or l < 2:
        result = exhaustive_search(n, l, 1.0)
        m0 = [e for e in result.evaluations if e.m == 0]
        best = _argmin(m0)
        return OptimizationResult(best.w0, 0, best.aaoi, m0, "alg1", result.failed)
    roots = stationary_roots(n, l)
    root = roots.r3 if roots.regime == "three-root" else roots.r2
    target = min(max(math.log2(root), math.log2(l + 1)), float(EOCW_LIMIT))
    evaluations = [
        Evaluation(2**e, 0, aaoi_closed_form_m0(n, l, 2**e)) for e in _candidate_exponents(target)
    ]
    best = _argmin(evaluations)
    return OptimizationResult(best.w0, 0, best.aaoi, evaluations, "alg1", target_exponent=target)


def efficient_search_alg2(n: int, l: int, lam: float) -> OptimizationResult:
    """Increase the window exponent from floor(log2(L+1)) until the m = 0 AAoI rises."""
    e = min(math.floor(math.log2(l + 1)), EOCW_LIMIT)
    evaluations = [Evaluation(2**e, 0, average_aoi(NetworkConfig(n, l, lam, e, 0)).aaoi)]
    previous = evaluations[-1]
    while e < EOCW_LIMIT:
        e += 1
        current = Evaluation(2**e, 0, average_aoi(NetworkConfig(n, l, lam, e, 0)).aaoi)
        evaluations.append(current)
        if current.aaoi > previous.aaoi:
            return OptimizationResult(previous.w0, 0, previous.aaoi, evaluations, "alg2")
        previous = current
    return OptimizationResult(previous.w0, 0, previous.aaoi, evaluations, "alg2",
                              edge_of_range=True)


def local_minima(values: list[float]) -> int:
    """Number of strict local minima (plateaus count once) in a sequence."""
    compressed = [v for k, v in enumerate(values) if k == 0 or v != values[k - 1]]
    count = 0
    for k, v in enumerate(compressed):
        left = compressed[k - 1] if k > 0 else math.inf
        right = compressed[k + 1] if k + 1 < len(compressed) else math.inf
        if v < left and v < right:
            count += 1
    return count


def check_unimodal(n: int, l: int, lam: float) -> bool:
    """True if the m = 0 AAoI-versus-exponent curve has a single local minimum."""
    values = [average_aoi(NetworkConfig(n, l, lam, e, 0)).aaoi for e in range(EOCW_LIMIT + 1)]
    ok = local_minima(values) <= 1
    if not ok:
        log.warning("AAoI vs EOCW_min is not unimodal for N=%d L=%d lambda=%g: %s",
                    n, l, lam, values)
    return ok
