"""Certified evaluation of E[L^2] and the normalised sum AoI.

``E[L^2]`` is a weighted sum of the series ``sum_l l^2 alpha^(l-1)``, one
per spectral mode. Each series is truncated at ``l_s`` and its remainder is
bracketed: by integral-test bounds for ``alpha >= 0`` and by the
alternating-series bound for ``alpha < 0``. The per-mode brackets are
combined sign-aware into an interval that contains the exact moment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .absorption import expected_cycle_length, pmf_prefactor, power_blocks, spectral_terms
from .errors import DomainError, TruncationLimit
from .model import WalkParams

LS_START = 16
LS_LIMIT = 10**8


@dataclass(frozen=True)
class BoundedValue:
    value: float
    lower: float
    upper: float
    l_s: int

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class TailBound:
    """Bracket on ``R = sum_{l > l_s} l^2 alpha^(l-1)``.

    For negative alpha, ``l_d`` is the first index from which the term
    magnitudes stop growing; for ``alpha >= 0`` it is reported for
    reference only.
    """

    alpha: float
    l_s: int
    lower: float
    upper: float
    regime: str
    l_d: int

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


def tail_integral(alpha: float, a: float) -> float:
    """``int_a^inf alpha^(x-1) x^2 dx`` for ``0 < alpha < 1``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"tail_integral needs 0 < alpha < 1, got {alpha!r}")
    if a < 1:
        raise DomainError(f"tail_integral needs a >= 1, got {a!r}")
    la = math.log(alpha)
    return -(alpha ** (a - 1)) * (a * a * la * la - 2.0 * a * la + 2.0) / la**3


def decay_index(alpha: float) -> int:
    """Smallest ``l >= 1`` with ``|alpha| (1 + 1/l)^2 < 1``."""
    x = abs(alpha)
    if not x < 1.0:
        raise DomainError(f"|alpha| must be < 1, got {alpha!r}")
    if x == 0.0:
        return 1
    # (1 + 1/l)^2 < 1/x  <=>  l > 1/(x^-1/2 - 1)
    l = max(1, math.floor(1.0 / (1.0 / math.sqrt(x) - 1.0)))
    while x * (1.0 + 1.0 / l) ** 2 >= 1.0:
        l += 1
    while l > 1 and x * (1.0 + 1.0 / (l - 1)) ** 2 < 1.0:
        l -= 1
    return l


def tail_bound(alpha: float, l_s: int) -> TailBound:
    if not -1.0 < alpha < 1.0:
        raise DomainError(f"tail_bound needs |alpha| < 1, got {alpha!r}")
    if l_s < 1:
        raise DomainError(f"l_s must be >= 1, got {l_s}")
    l_d = decay_index(alpha)
    if alpha == 0.0:
        return TailBound(alpha, l_s, 0.0, 0.0, "nonnegative_alpha", l_d)
    if alpha > 0.0:
        lo = tail_integral(alpha, l_s + 1)
        hi = tail_integral(alpha, l_s)
        return TailBound(alpha, l_s, lo, hi, "nonnegative_alpha", l_d)
    start = max(l_s, l_d)
    radius = (-alpha) ** start * (start + 1) ** 2
    # terms l_s+1..l_d precede the monotone region and are summed exactly
    l = np.arange(l_s + 1, start + 1, dtype=float)
    gap = float(np.sum(l * l * np.power(alpha, l - 1.0)))
    return TailBound(alpha, l_s, gap - radius, gap + radius, "negative_alpha", l_d)


def _weighted_tail_upper(params: WalkParams, l_s: int) -> float:
    """Upper bound on ``sum_nu C_nu R_nu`` (prefactor not applied).

    A negative weight takes the lower end of its mode's bracket.
    """
    total = []
    for term in spectral_terms(params):
        if term.skippable:
            continue
        tb = tail_bound(term.alpha, l_s)
        total.append(term.c * (tb.upper if term.c >= 0 else tb.lower))
    return math.fsum(total)


def _partial_series(alpha: np.ndarray, l_s: int) -> np.ndarray:
    """``sum_{l=1}^{l_s} l^2 alpha^(l-1)`` for every entry of ``alpha``."""
    acc = np.zeros_like(alpha)
    for offset, powers in power_blocks(alpha, l_s):
        l = np.arange(offset + 1, offset + powers.shape[1] + 1, dtype=float)
        acc += powers @ (l * l)
    return acc


def rounding_pad(params: WalkParams) -> float:
    """Allowance for float error in the truncated ``E[L^2]``.

    Each mode contributes ``|K C| (16 eps S(x) + 4 eps S'(x))`` with
    ``x = |alpha|``, ``S(x) = (1+x)/(1-x)^3`` bounding the partial sum of
    magnitudes and ``S'`` its sensitivity to a few-ulp error in alpha. The
    second part dominates as alpha approaches 1 (large T).
    """
    eps = np.finfo(float).eps
    k = pmf_prefactor(params)
    pad = []
    for term in spectral_terms(params):
        if term.skippable:
            continue
        x = abs(term.alpha)
        size = (1.0 + x) / (1.0 - x) ** 3
        slope = (4.0 + 2.0 * x) / (1.0 - x) ** 4
        pad.append(abs(k * term.c) * (16.0 * eps * size + 4.0 * eps * slope))
    return math.fsum(pad)


def second_moment(params: WalkParams, l_s: int) -> BoundedValue:
    """Truncated ``E[L^2]`` with an interval enclosing the exact moment.

    The partial sum is the lower end, since every dropped term
    ``P_L(l) l^2`` is nonnegative. The upper end adds the sign-aware sum of
    per-mode tail bounds. Both ends are widened by :func:`rounding_pad`.
    """
    if l_s < 1:
        raise DomainError(f"l_s must be >= 1, got {l_s}")
    terms = [t for t in spectral_terms(params) if not t.skippable]
    alpha = np.array([t.alpha for t in terms])
    c = np.array([t.c for t in terms])
    contrib = pmf_prefactor(params) * c * _partial_series(alpha, l_s)
    value = math.fsum(contrib)
    pad = rounding_pad(params)
    tail = second_moment_tail_bound(params, l_s)
    return BoundedValue(value, value - pad, value + tail + pad, l_s)


def _to_nsaoi(m2: BoundedValue, mean: float) -> BoundedValue:
    def f(x):
        return 0.5 * (1.0 + x / mean)

    return BoundedValue(f(m2.value), f(m2.lower), f(m2.upper), m2.l_s)


def nsaoi_lower_bound(params: WalkParams, l_s: int) -> BoundedValue:
    """``1/2 (1 + sum_{l<=l_s} P_L(l) l^2 / E[L])`` and its certified interval."""
    return _to_nsaoi(second_moment(params, l_s), expected_cycle_length(params))


def nsaoi_width_bound(params: WalkParams, l_s: int) -> float:
    """Interval width of :func:`nsaoi_lower_bound` without the partial sums.

    Cheap, so it drives the choice of ``l_s``.
    """
    m2_width = second_moment_tail_bound(params, l_s) + 2.0 * rounding_pad(params)
    return 0.5 * m2_width / expected_cycle_length(params)


def second_moment_tail_bound(params: WalkParams, l_s: int) -> float:
    """Upper bound on ``sum_{l > l_s} P_L(l) l^2``.

    Also bounds the PMF tail mass and the first-moment tail.
    """
    return max(pmf_prefactor(params) * _weighted_tail_upper(params, l_s), 0.0)


def smallest_truncation(measure: Callable[[int], float], epsilon: float,
                        limit: int = LS_LIMIT) -> int:
    """Smallest ``l_s`` with ``measure(l_s) < epsilon``.

    Doubles from ``LS_START`` then bisects; assumes ``measure`` is
    non-increasing in ``l_s``. Raises :class:`TruncationLimit` past ``limit``.
    """
    hi = LS_START
    while not measure(hi) < epsilon:
        if hi >= limit:
            raise TruncationLimit(f"no l_s <= {limit} reaches {epsilon!r}")
        hi = min(2 * hi, limit)
    lo = 0  # measure(lo) treated as failing
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if measure(mid) < epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def nsaoi(params: WalkParams, epsilon: float) -> BoundedValue:
    """NSAoI enclosed in an interval narrower than ``epsilon``.

    Raises :class:`TruncationLimit` when ``epsilon`` is below what double
    precision can certify for these parameters, or would need ``l_s`` beyond
    ``LS_LIMIT``; the exception carries the best interval found.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    floor = 0.5 * 2.0 * rounding_pad(params) / expected_cycle_length(params)
    if floor >= epsilon:
        l_s = smallest_truncation(lambda n: nsaoi_width_bound(params, n), 2.0 * floor)
        raise TruncationLimit(
            f"rounding floor {floor:.3g} is not below epsilon {epsilon!r}",
            nsaoi_lower_bound(params, l_s))
    try:
        l_s = smallest_truncation(lambda n: nsaoi_width_bound(params, n), epsilon)
    except TruncationLimit as exc:
        exc.best = nsaoi_lower_bound(params, LS_LIMIT)
        raise
    result = nsaoi_lower_bound(params, l_s)
    while not result.width < epsilon:
        # value + tail - value can round above the tail itself
        if l_s >= LS_LIMIT:
            raise TruncationLimit(f"no l_s <= {LS_LIMIT} reaches {epsilon!r}", result)
        l_s = min(2 * l_s, LS_LIMIT)
        result = nsaoi_lower_bound(params, l_s)
    return result
