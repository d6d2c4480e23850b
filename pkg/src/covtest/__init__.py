"""Classical and random-matrix corrected Rao's score tests for
large-dimensional covariance structure."""

__version__ = "0.1.0"

from .exceptions import (ConfigError, CovTestError, DomainError, QuadratureError,
                         RatioAtUnityError)
from .nullspec import NullSpec
from .stats import estimate_beta, sample_cov, sample_mean, trace_sq_dev
from .mp_law import (helper_integral_cos, mp_density, mp_integral_g, mp_integral_numeric,
                     mp_point_mass)
from .rmt_clt import (RmtParams, mean_correction, mean_correction_numeric,
                      stieltjes_z_of_m, var_correction, var_correction_numeric)
from .scoretest import (CorrectedRaoScore, RaoScore, TestResult, TestStatistic,
                        chi_square_sf, crst_statistic, normal_sf, rst_statistic)
from .simulation import (ScenarioSpec, SimulationReport, generate_sample, power_curve,
                         run_monte_carlo, split_seed)
from .estimator import CorrectedRaoScoreTest, RaoScoreTest
