"""Estimation error of the hold-last-value estimator.

Between updates the destination keeps the last reported value, so the error
is the displacement of a walk that restarts at 0 whenever it would reach
+-T. State vectors index states ``-T+1, ..., T-1`` in ascending order:
position 0 is state ``-T+1`` and position ``T-1`` is state 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._tridiag import thomas
from .absorption import _hitting_moments_exact
from .errors import SolveFailure
from .model import WalkParams

_TOL = 1e-10


@dataclass(frozen=True)
class TransitionMatrix:
    matrix: np.ndarray
    states: np.ndarray

    @property
    def size(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class StationaryDist:
    """Long-run state law of the reset walk.

    For the periodic chain (no holding, even T) ``pi_even``/``pi_odd`` are the
    laws at even/odd slots when started from state 0, and ``pi`` is their
    average.
    """

    kind: str
    pi: np.ndarray
    pi_odd: np.ndarray | None = None
    pi_even: np.ndarray | None = None


def build_transition_matrix(params: WalkParams) -> TransitionMatrix:
    T = params.T
    states = np.arange(-T + 1, T)
    n = len(states)
    P = np.zeros((n, n))
    zero = T - 1
    for r, i in enumerate(states):
        P[r, r] += params.hold
        P[r, r + 1 if i + 1 < T else zero] += params.p
        P[r, r - 1 if i - 1 > -T else zero] += params.q
    if T == 1:
        # every move is redirected back onto the only state
        P[0, 0] = 1.0
    return TransitionMatrix(P, states)


def _solve_stationary(P: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(str(exc)) from exc
    if pi.min() < -_TOL or np.abs(pi @ P - pi).max() > _TOL:
        raise SolveFailure("stationary solve did not yield a probability fixed point")
    np.maximum(pi, 0.0, out=pi)
    return pi / pi.sum()


def stationary_distribution(params: WalkParams) -> StationaryDist:
    P = build_transition_matrix(params).matrix
    if not params.periodic:
        pi = _solve_stationary(P)
        return StationaryDist("aperiodic", pi)
    # two-step chain restricted to the parity class of state 0
    states = np.arange(-params.T + 1, params.T)
    even = np.flatnonzero(states % 2 == 0)
    P2 = P @ P
    pi_even = np.zeros(len(states))
    pi_even[even] = _solve_stationary(P2[np.ix_(even, even)])
    pi_odd = pi_even @ P
    if np.abs(pi_odd @ P - pi_even).max() > _TOL:
        raise SolveFailure("periodic pair does not alternate under P")
    return StationaryDist("periodic", 0.5 * (pi_odd + pi_even), pi_odd, pi_even)


def emse(params: WalkParams) -> float:
    """Long-run mean squared estimation error."""
    dist = stationary_distribution(params)
    sq = np.arange(-params.T + 1, params.T, dtype=float) ** 2
    if dist.kind == "periodic":
        return 0.5 * float(sq @ (dist.pi_odd + dist.pi_even))
    return float(sq @ dist.pi)


def emse_exact(params: WalkParams) -> Fraction:
    """EMSE as an exact rational, by renewal-reward over update cycles.

    Expected squared displacement summed over one cycle (occupation-weighted),
    divided by the expected cycle length.
    """
    p, q, T = Fraction(params.p), Fraction(params.q), params.T
    n = 2 * T - 1
    occupancy = thomas([-q] * n, [p + q] * n, [-p] * n,
                       [Fraction((z - T) ** 2) for z in range(1, n + 1)])
    m1, _ = _hitting_moments_exact(params)
    return occupancy[T - 1] / m1[T - 1]
