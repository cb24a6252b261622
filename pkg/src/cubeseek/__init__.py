"""Search for integer solutions of x^3 + y^3 + z^3 = k with stochastic
heuristics, model the running times, and compare the fitted models by
Fisher-Rao geodesic distance."""

from .cubes import (
    SearchPoint,
    SearchRange,
    Solution,
    candidate_z,
    fitness,
    nearest_integer_distance,
    signed_cbrt,
    validate_k,
    verify_solution,
)
from .records import TrialRecord
from .pso import SwarmConfig, init_swarm
from .sa import AnnealConfig, run_rsa, run_sa
from .bench import Histogram, TimeDataset, histogram, load_dataset, run_batch, save_dataset
from .stats import (
    ExpModel,
    LogNormalModel,
    SummaryReport,
    exp_summary,
    fit_exponential,
    fit_lognormal,
    lognormal_summary,
    performance_report,
)
from .infogeo import (
    GeodesicPath,
    ModelPoint,
    distance_matrix,
    exp_distance,
    fisher_metric_numeric,
    geodesic_length,
    lognormal_distance_closed_form,
    lognormal_geodesic,
)

__version__ = "0.1.0"
