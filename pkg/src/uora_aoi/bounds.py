"""Closed forms for a fixed window (m = 0) under generate-at-will traffic.

Covers the exact AAoI, its variance-free lower bound, the continuous
relaxation U(W) with its exponential approximation, and the stationary
points of that approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ladder_terms

INV_E = math.exp(-1.0)
_HALLEY_TOL = 1e-12
_HALLEY_MAX_STEPS = 64


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function for real x >= -1/e."""
    if math.isnan(x):
        return math.nan
    if x < -INV_E:
        # allow for rounding in callers that pass -1/e itself
        if x < -INV_E * (1.0 + 1e-15):
            raise ValueError(f"lambert_w0 is real only for x >= -1/e, got {x}")
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    if x < -0.25:
        # branch-point series in p = sqrt(2(ex + 1))
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    elif x < 3.0:
        w = math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(_HALLEY_MAX_STEPS):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= _HALLEY_TOL * max(1.0, abs(w)):
            break
    return w


W0_HALF_INV_E = lambert_w0(-1.0 / (2.0 * math.e))


def compute_b(n: int, l: int) -> float:
    """Linear coefficient of the quadratic whose roots are the outer stationary points."""
    if n < 2 or l < 2:
        raise ValueError(f"need n >= 2 and l >= 2, got n={n}, l={l}")
    return -2.0 * (n - 1) / (W0_HALF_INV_E + 1.0) + l - 2


def u_of_w(w: float, l: int) -> float:
    """Continuous extension of E[U_0] in the window size."""
    if w <= 0:
        raise ValueError(f"window must be positive, got {w}")
    return (w * w + (l - 2) * w + l + 1) / (2.0 * w * l)


def _mean_wait(w0: float, l: int) -> float:
    alpha = math.floor((w0 - 1) / l)
    beta = w0 - 1 - alpha * l
    return (alpha * (alpha + 1) / 2 * l + (alpha + 1) * beta + 1) / w0


def _check_window(w0) -> None:
    if isinstance(w0, bool) or not isinstance(w0, int) or w0 < 1:
        raise ValueError(f"w0 must be a positive integer, got {w0!r}")


def aaoi_closed_form_m0(n: int, l: int, w0: int) -> float:
    """Exact AAoI for m = 0 and generate-at-will arrivals."""
    _check_window(w0)
    alpha, beta, _ = ladder_terms(w0, l)
    eu = (alpha * (alpha + 1) / 2 * l + (alpha + 1) * beta + 1) / w0
    eu2 = (alpha * (alpha + 1) * (2 * alpha + 1) / 6 * l + (alpha + 1) ** 2 * beta + 1) / w0
    q = (1.0 - 1.0 / (l * eu)) ** (n - 1)
    if q == 0.0:
        return math.inf
    return eu2 / (2.0 * eu) + (1.0 - q) / q * eu + 0.5


def _bound_from_mean_wait(n: int, l: int, eu: float) -> float:
    base = 1.0 - 1.0 / (l * eu)
    if base <= 0.0:
        return math.inf if n > 1 else eu * 0.5 + 0.5
    return (base ** (1 - n) - 0.5) * eu + 0.5


def aaoi_lower_bound_m0(n: int, l: int, w0: float) -> float:
    """Lower bound obtained by replacing E[U_0^2] with E[U_0]^2.

    Accepts any real ``w0 >= 1`` so the bound can be traced as a function of
    the window; integer windows give the bound proper.
    """
    if w0 < 1:
        raise ValueError(f"w0 must be at least 1, got {w0}")
    return _bound_from_mean_wait(n, l, _mean_wait(w0, l))


def approx_lower_bound(n: int, l: int, w: float, exact_power: bool = False) -> float:
    """Lower bound with E[U_0] replaced by U(W).

    By default the power (1 - 1/(UL))**(1-N) is approximated by
    exp((N-1)/(UL)); ``exact_power=True`` keeps the power instead.
    """
    u = u_of_w(w, l)
    if exact_power:
        base = 1.0 - 1.0 / (u * l)
        if base <= 0.0:
            return math.nan
        return (base ** (1 - n) - 0.5) * u + 0.5
    exponent = (n - 1) / (u * l)
    if exponent > 700.0:
        return math.inf
    return (math.exp(exponent) - 0.5) * u + 0.5


def approx_lower_bound_slope(n: int, l: int, w: float) -> float:
    """Analytic derivative of the exponential approximation in W."""
    u = u_of_w(w, l)
    z = (n - 1) / (l * u)
    f1 = (w * w - l - 1) / (2.0 * l * w * w)
    f2 = math.exp(z) * (1.0 - z) - 0.5
    return f1 * f2


@dataclass(frozen=True)
class RootSet:
    regime: str
    b_coeff: float
    r2: float
    r1: float | None = None
    r3: float | None = None

    @property
    def roots(self) -> tuple[float, ...]:
        if self.regime == "three-root":
            return (self.r1, self.r2, self.r3)
        return (self.r2,)


def three_root_conditions(b: float, l: int) -> bool:
    return b < 0 and b * b - 4 * (l + 1) > 0


def stationary_roots(n: int, l: int) -> RootSet:
    b = compute_b(n, l)
    r2 = math.sqrt(l + 1)
    if not three_root_conditions(b, l):
        return RootSet(regime="one-root", b_coeff=b, r2=r2)
    disc = math.sqrt(b * b - 4 * (l + 1))
    r1 = (-b - disc) / 2.0
    r3 = (-b + disc) / 2.0
    return RootSet(regime="three-root", b_coeff=b, r2=r2, r1=r1, r3=r3)
