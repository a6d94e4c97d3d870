"""Threshold sweeps and the minimum-update-rate design problem."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .absorption import cycle_moments_exact, update_rate
from .accuracy import emse, emse_exact
from .aoi_series import BoundedValue, nsaoi
from .errors import TruncationLimit
from .model import validate_params

log = logging.getLogger(__name__)

# float EMSE values this close to a ceiling are re-decided exactly
_EMSE_TIE = 1e-9


@dataclass(frozen=True)
class SweepRow:
    T: int
    lambda_: float
    nsaoi: BoundedValue
    emse: float
    periodic: bool
    truncated: bool = False


@dataclass(frozen=True)
class PlanResult:
    feasible: bool
    chosen_T: int | None
    lambda_min: float | None
    binding_constraint: str
    feasible_T: tuple[int, ...] = ()
    gaps: tuple[int, ...] = ()


def sweep_row(p, q, T, epsilon) -> SweepRow:
    params = validate_params(p, q, T)
    truncated = False
    try:
        bounded = nsaoi(params, epsilon)
    except TruncationLimit as exc:
        log.warning("T=%d: %s", T, exc)
        bounded, truncated = exc.best, True
    return SweepRow(T, update_rate(params), bounded, emse(params), params.periodic, truncated)


def sweep(p, q, T_min, T_max, epsilon=1e-6) -> list[SweepRow]:
    validate_params(p, q, T_min)
    validate_params(p, q, T_max)
    if T_min > T_max:
        raise ValueError(f"T_min ({T_min}) exceeds T_max ({T_max})")
    return [sweep_row(p, q, T, epsilon) for T in range(T_min, T_max + 1)]


def _exact_nsaoi(params) -> Fraction:
    m1, m2 = cycle_moments_exact(params)
    return (1 + m2 / m1) / 2


def _nsaoi_ok(row: SweepRow, params, ceiling: float) -> bool:
    if row.nsaoi.upper <= ceiling:
        return True
    if row.nsaoi.lower > ceiling:
        return False
    # the ceiling sits inside the certified interval: decide exactly
    return _exact_nsaoi(params) <= Fraction(ceiling)


def _emse_ok(row: SweepRow, params, ceiling: float) -> bool:
    if abs(row.emse - ceiling) > _EMSE_TIE * max(1.0, abs(ceiling)):
        return row.emse <= ceiling
    return emse_exact(params) <= Fraction(ceiling)


def check(row: SweepRow, p, q, nsaoi_max, emse_max) -> tuple[bool, bool]:
    """``(nsaoi ok, emse ok)`` for one sweep row; ceilings are inclusive."""
    params = validate_params(p, q, row.T)
    return _nsaoi_ok(row, params, nsaoi_max), _emse_ok(row, params, emse_max)


def _binding(ok: tuple[bool, bool]) -> str:
    return {(True, True): "none", (False, True): "nsaoi",
            (True, False): "emse", (False, False): "both"}[ok]


def min_update_rate(p, q, nsaoi_max, emse_max, T_search_max=64, epsilon=1e-6) -> PlanResult:
    """Largest threshold (hence smallest rate) meeting both ceilings.

    Every ``T`` up to ``T_search_max`` is evaluated. A reported feasible
    ``T`` is feasible for the exact NSAoI: the certified upper bound is
    compared first and exact rational arithmetic settles values that the
    interval cannot separate from the ceiling.
    """
    if nsaoi_max < 1:
        raise ValueError(f"nsaoi_max must be >= 1, got {nsaoi_max}")
    if emse_max < 0:
        raise ValueError(f"emse_max must be >= 0, got {emse_max}")
    rows = sweep(p, q, 1, T_search_max, epsilon)
    status = {row.T: check(row, p, q, nsaoi_max, emse_max) for row in rows}
    feasible = tuple(T for T, ok in status.items() if all(ok))
    if not feasible:
        return PlanResult(False, None, None, _binding(status[1]))
    chosen = max(feasible)
    gaps = tuple(T for T in range(1, chosen) if T not in feasible)
    if gaps:
        log.error("feasible thresholds are not a prefix; infeasible gaps at T=%s", gaps)
    binding = _binding(status[chosen + 1]) if chosen + 1 in status else "none"
    lam = next(row.lambda_ for row in rows if row.T == chosen)
    return PlanResult(True, chosen, lam, binding, feasible, gaps)
