"""Cycle length of the threshold-triggered walk.

A cycle is the absorption time of the walk started at the centre of
``{0, ..., 2T}``. This module gives its mean (closed form and a linear-solve
cross-check), the spectral decomposition of its PMF, and exact rational
moments used to settle ties in the planner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import solve_banded

from ._tridiag import thomas
from .errors import ClaimViolation, ConsistencyError, SingularSystem
from .model import WalkParams

SYMMETRIC_TOL = 1e-9
# negative PMF entries down to this magnitude are rounding noise
NEG_CLAMP = 1e-12
# cap on the (modes x lengths) block materialised at once
_BLOCK = 1 << 20


@dataclass(frozen=True)
class SpectralTerm:
    """One eigen-mode of the absorbed walk.

    ``alpha`` is the geometric decay rate of the mode, ``s = 1/alpha``
    (``inf`` when alpha is 0) and ``c`` its weight in the PMF. Even modes
    carry no weight.
    """

    nu: int
    alpha: float
    s: float
    c: float

    @property
    def skippable(self) -> bool:
        return self.c == 0.0


@dataclass(frozen=True)
class CyclePmf:
    """``probabilities[l - 1] = P(L = l)`` for ``l = 1..l_max``."""

    params: WalkParams
    probabilities: np.ndarray

    @property
    def l_max(self) -> int:
        return len(self.probabilities)

    @property
    def lengths(self) -> np.ndarray:
        return np.arange(1, self.l_max + 1)

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probabilities)


def expected_cycle_length(params: WalkParams) -> float:
    """Mean number of slots between updates.

    For p != q this is ``T (p^T - q^T) / ((p - q)(p^T + q^T))``, evaluated
    as ``T * sum_k r^k / (m (1 + r^T))`` with ``m = max(p, q)`` and
    ``r = min/max`` so neither the difference nor the powers lose precision.
    """
    p, q, T = params.p, params.q, params.T
    if abs(p - q) < SYMMETRIC_TOL:
        # E[L] is even in p - q at fixed p + q, so this is accurate to O((p-q)^2)
        return T * T / (p + q)
    m, r = (p, q / p) if p > q else (q, p / q)
    geom = math.fsum(r**k for k in range(T))
    return T * geom / (m * (1.0 + r**T))


def expected_cycle_length_oracle(params: WalkParams) -> float:
    """Mean absorption time from the centre by a direct banded solve.

    Solves ``(p+q) D_z - p D_{z+1} - q D_{z-1} = 1`` for ``z = 1..2T-1``
    with ``D_0 = D_{2T} = 0``.
    """
    p, q, T = params.p, params.q, params.T
    n = 2 * T - 1
    ab = np.zeros((3, n))
    ab[0, 1:] = -p
    ab[1, :] = p + q
    ab[2, :-1] = -q
    try:
        d = solve_banded((1, 1), ab, np.ones(n))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(d)):
        raise SingularSystem("non-finite hitting times")
    return float(d[T - 1])


def update_rate(params: WalkParams) -> float:
    return 1.0 / expected_cycle_length(params)


def _angles(nu: int, T: int) -> tuple[float, float]:
    """cos and sin of nu*pi/(2T), mirrored so nu and 2T-nu agree exactly."""
    if nu == T:
        return 0.0, 1.0
    k = nu if nu < T else 2 * T - nu
    theta = k * math.pi / (2 * T)
    cos, sin = math.cos(theta), math.sin(theta)
    return (cos if nu < T else -cos), sin


def spectral_terms(params: WalkParams) -> list[SpectralTerm]:
    """Modes ``nu = 1..2T-1`` with rate ``1-p-q + 2 sqrt(pq) cos(nu pi / 2T)``."""
    T = params.T
    root = 2.0 * math.sqrt(params.p * params.q)
    terms = []
    for nu in range(1, 2 * T):
        cos, sin = _angles(nu, T)
        alpha = params.hold + root * cos
        if not -1.0 < alpha < 1.0:
            raise ClaimViolation(f"alpha_{nu} = {alpha!r} is outside (-1, 1) for {params}")
        if nu % 2 == 0:
            c = 0.0
        else:
            # (-1)^(nu+1) sin(nu pi/2) = (-1)^((nu-1)/2) for odd nu
            c = sin if (nu - 1) % 4 == 0 else -sin
        s = math.inf if alpha == 0.0 else 1.0 / alpha
        terms.append(SpectralTerm(nu=nu, alpha=alpha, s=s, c=c))
    return terms


def pmf_prefactor(params: WalkParams) -> float:
    """``[(q/p)^(T/2) + (q/p)^(-T/2)] sqrt(pq) / T``."""
    x = 0.5 * params.T * (math.log(params.q) - math.log(params.p))
    return (math.exp(x) + math.exp(-x)) * math.sqrt(params.p * params.q) / params.T


def _odd_modes(params: WalkParams) -> tuple[np.ndarray, np.ndarray]:
    terms = [t for t in spectral_terms(params) if not t.skippable]
    return np.array([t.alpha for t in terms]), np.array([t.c for t in terms])


def power_blocks(alpha: np.ndarray, count: int):
    """Yield ``(offset, M)`` with ``M[i, j] = alpha[i] ** (offset + j)``.

    Covers exponents ``0..count-1``. Powers are computed once for the first
    block and carried forward by multiplication.
    """
    width = max(256, min(count, _BLOCK // max(len(alpha), 1)))
    base = np.power.outer(alpha, np.arange(width, dtype=float))
    step = alpha ** width
    carry = np.ones_like(alpha)
    for offset in range(0, count, width):
        n = min(width, count - offset)
        yield offset, base[:, :n] * carry[:, None]
        carry = carry * step


def cycle_length_pmf(params: WalkParams, l_max: int) -> CyclePmf:
    if l_max < 1:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    alpha, c = _odd_modes(params)
    weight = pmf_prefactor(params) * c
    out = np.empty(l_max)
    for offset, powers in power_blocks(alpha, l_max):
        out[offset:offset + powers.shape[1]] = weight @ powers
    if out.min() < -NEG_CLAMP:
        worst = int(np.argmin(out))
        raise ConsistencyError(f"P_L({worst + 1}) = {out[worst]!r} is negative")
    np.maximum(out, 0.0, out=out)
    # structural zeros: the boundary needs at least T moves, and with no
    # holding the cycle length has the parity of T
    lengths = np.arange(1, l_max + 1)
    out[lengths < params.T] = 0.0
    if params.hold == 0.0:
        out[(lengths - params.T) % 2 == 1] = 0.0
    return CyclePmf(params, out)


def _hitting_moments_exact(params: WalkParams) -> tuple[list, list]:
    p, q = Fraction(params.p), Fraction(params.q)
    n = 2 * params.T - 1
    lower = [-q] * n
    diag = [p + q] * n
    upper = [-p] * n
    m1 = thomas(lower, diag, upper, [Fraction(1)] * n)
    # tau = 1 + tau'  =>  (I - Q) m2 = 1 + 2 Q m1 = 2 m1 - 1
    m2 = thomas(lower, diag, upper, [2 * x - 1 for x in m1])
    return m1, m2


def cycle_moments_exact(params: WalkParams) -> tuple[Fraction, Fraction]:
    """``(E[L], E[L^2])`` in exact rational arithmetic.

    The float parameters are taken at their exact binary values.
    """
    m1, m2 = _hitting_moments_exact(params)
    return m1[params.T - 1], m2[params.T - 1]
