"""Update rate, Age of Information and estimation error of a sensor that
reports a lazy random walk whenever it moves +-T from the last report."""

__version__ = "0.1.0"

from .absorption import (  # noqa: E402
    CyclePmf,
    SpectralTerm,
    cycle_length_pmf,
    cycle_moments_exact,
    expected_cycle_length,
    expected_cycle_length_oracle,
    spectral_terms,
    update_rate,
)
from .accuracy import (  # noqa: E402
    StationaryDist,
    TransitionMatrix,
    build_transition_matrix,
    emse,
    emse_exact,
    stationary_distribution,
)
from .aoi_series import (  # noqa: E402
    BoundedValue,
    TailBound,
    nsaoi,
    nsaoi_lower_bound,
    second_moment,
    tail_bound,
    tail_integral,
)
from .model import StepDistribution, WalkParams, step_distribution, validate_params  # noqa: E402
from .montecarlo import SimConfig, SimulationReport, empirical_cycle_pmf, simulate  # noqa: E402
from .planner import PlanResult, SweepRow, min_update_rate, sweep  # noqa: E402
