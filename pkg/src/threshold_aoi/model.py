"""Walk parameters and the single-step law."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRange

T_MAX = 128
# hold probabilities this close to zero are treated as exactly zero
HOLD_SNAP = 1e-15


@dataclass(frozen=True)
class WalkParams:
    """Lazy +-1 random walk with a symmetric update threshold.

    Parameters
    ----------
    p : float
        Probability of a +1 step.
    q : float
        Probability of a -1 step.
    T : int
        The sensor reports whenever the walk has moved by ``T`` from the
        last reported state.
    """

    p: float
    q: float
    T: int

    @property
    def hold(self) -> float:
        h = 1.0 - self.p - self.q
        return 0.0 if abs(h) <= HOLD_SNAP else h

    @property
    def periodic(self) -> bool:
        """True when the reset chain alternates parity (p + q = 1, T even)."""
        return self.hold == 0.0 and self.T % 2 == 0

    @property
    def symmetric(self) -> bool:
        return abs(self.p - self.q) < 1e-9


@dataclass(frozen=True)
class StepDistribution:
    up: float
    down: float
    hold: float


def validate_params(p, q, T) -> WalkParams:
    """Check ``(p, q, T)`` and return a frozen :class:`WalkParams`.

    ``p + q = 1`` is accepted (no holding). Raises :class:`OutOfRange`.
    """
    try:
        p = float(p)
        q = float(q)
    except (TypeError, ValueError) as exc:
        raise OutOfRange(f"p and q must be real numbers: {exc}") from None
    if isinstance(T, bool) or not float(T).is_integer():
        raise OutOfRange(f"T must be an integer, got {T!r}")
    T = int(T)
    if not (math.isfinite(p) and 0.0 < p < 1.0):
        raise OutOfRange(f"p must lie in (0, 1), got {p}")
    if not (math.isfinite(q) and 0.0 < q < 1.0):
        raise OutOfRange(f"q must lie in (0, 1), got {q}")
    if p + q > 1.0 + HOLD_SNAP:
        raise OutOfRange(f"p + q must not exceed 1, got {p + q}")
    if T < 1:
        raise OutOfRange(f"T must be >= 1, got {T}")
    if T > T_MAX:
        raise OutOfRange(f"T must be <= {T_MAX}, got {T}")
    return WalkParams(p, q, T)


def step_distribution(params: WalkParams) -> StepDistribution:
    return StepDistribution(up=params.p, down=params.q, hold=params.hold)
