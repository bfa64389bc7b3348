"""Polarization-entangled photon pairs in dispersive fiber.

Simulates type-II parametric down-conversion pairs whose coincidence-time
structure is magnified by fiber group-velocity dispersion, including the
retarder-plate interference surfaces, Bell-state post-selection by arrival
time, Faraday-mirror cancellation of polarization drift, and a Monte Carlo
of the start-stop coincidence electronics.
"""

from .coincidence import (
    DetectorParams,
    Histogram,
    VisibilityEstimate,
    drift_timeseries,
    estimate_visibility,
    simulate_histogram,
)
from .correlation import (
    PLUS_MINUS,
    PLUS_PLUS,
    AnalyzerConfig,
    CorrelationResult,
    PostSelectionResult,
    PostSelectionWindow,
    g2_analytic,
    g2_numeric,
    postselect,
    visibility,
)
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    EmptyWindowError,
    PreconditionError,
)
from .fiber import (
    DriftProcess,
    FiberChannel,
    apply_gvd,
    channel_operator,
    drift_sample,
    drift_walk,
    required_grid_n,
    tau_f,
    transmittance,
)
from .jones import (
    RetarderSpec,
    analyzer_vector,
    backward,
    faraday_mirror,
    is_unitary,
    jones_vector,
    phase_aligned_distance,
    random_unitary,
    retarder,
    rotator,
    round_trip,
)
from .state import (
    BellTarget,
    BiphotonState,
    CrystalParams,
    FrequencyGrid,
    apply_local,
    apply_to_slice,
    pdc_state,
    polarization_overlap,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyzerConfig",
    "BellTarget",
    "BiphotonState",
    "ConfigurationError",
    "CorrelationResult",
    "CrystalParams",
    "DegenerateInputError",
    "DetectorParams",
    "DriftProcess",
    "EmptyWindowError",
    "FiberChannel",
    "FrequencyGrid",
    "Histogram",
    "PLUS_MINUS",
    "PLUS_PLUS",
    "PostSelectionResult",
    "PostSelectionWindow",
    "PreconditionError",
    "RetarderSpec",
    "VisibilityEstimate",
    "analyzer_vector",
    "apply_gvd",
    "apply_local",
    "apply_to_slice",
    "backward",
    "channel_operator",
    "drift_sample",
    "drift_timeseries",
    "drift_walk",
    "estimate_visibility",
    "faraday_mirror",
    "g2_analytic",
    "g2_numeric",
    "is_unitary",
    "jones_vector",
    "pdc_state",
    "phase_aligned_distance",
    "polarization_overlap",
    "postselect",
    "random_unitary",
    "required_grid_n",
    "retarder",
    "rotator",
    "round_trip",
    "simulate_histogram",
    "tau_f",
    "transmittance",
    "visibility",
]
