"""M-PSK symbol error probability with n-bit phase quantization over Nakagami-m fading."""

__version__ = "0.1.0"

from ._accel import backend
from .analytic import (
    DvoFit,
    QuadratureSettings,
    SepComponents,
    SepQuery,
    asymptotic_sep_qpsk,
    conditional_sep,
    db_to_linear,
    dvo_fit,
    dvo_theoretical,
    error_floor,
    linear_to_db,
    phi_penalty,
    phi_penalty_at_sep,
    psi_penalty,
    qfunc,
    sep_bounds,
    sep_bpsk_craig,
    sep_p_components,
    sep_qpsk_rayleigh,
    sep_qpsk_rayleigh_2bit_closed,
    sep_theorem3,
)
from .channel import FadingSpec, RngStream, nakagami_magnitude_pdf, sample_fading, sample_noise
from .detector import (
    DetectionContext,
    OracleResult,
    decision_table,
    ml_detect_geometric,
    ml_detect_oracle,
    region_probabilities,
)
from .errors import ConfigError, DegenerateInput, DomainError, InsufficientData, LowResError, QuadratureError
from .geometry import (
    ConeRegion,
    ModulationSpec,
    QuantizerSpec,
    bisector_angle,
    build_constellation,
    fading_partition_index,
    partition_cell,
    quantize,
    region_of_attraction,
)
from .montecarlo import SepEstimate, SimPlan, run_trial, simulate_sep, sweep_sep
from .results import ResultRow, SepCurve, load_curve, write_curve
