"""Spectral and transport quantities of half-line Jacobi operators."""

from .dynamics import TruncatedEBB, build_truncated, cesaro_current, current_at_time
from .errors import NumericalQualityWarning, ValidationError
from .experiments import ExperimentConfig, Verdict, acet_sets_probe, rate_report, run_experiment
from .leads import Lead, ac_support_contains, lead_borel, m_function
from .measures import DiscreteMeasure, jacobi_to_measure, measure_to_jacobi
from .models import JacobiModel
from .periodic import PeriodicJacobi, discriminant, periodize, restrict_repeated
from .spectral import (
    EnergyGrid,
    ac_density,
    borel_transform,
    sigma_ac_probe,
    tm_inverse_square_integral,
    weak_density_approx,
)
from .transfer import Matrix2, eigenfunction, one_step_matrix, transfer_matrix
from .transport import (
    EBBSpec,
    TransportResult,
    crystalline_current,
    crystalline_transmittance,
    effective_green,
    lb_transmittance,
    linear_response,
    repeated_sample_current,
    steady_current,
    thouless_current,
)

__version__ = "0.1.0"
