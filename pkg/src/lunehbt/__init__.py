"""Closed-form and Monte Carlo intensity correlations for polarized
two-source interferometers.

The library has three layers: exact 2x2 polarization algebra and bench
geometry (``polarization``, ``geometry``), circular complex-Gaussian source
ensembles with moment oracles (``ensemble``), and the correlators themselves
in both closed form and oracle-expanded form (``correlators``), verified
empirically by the sampling engine (``montecarlo``).  ``cli`` drives it all
from the command line.
"""

from .correlators import (
    NONZERO_LABELS,
    TERM_LABELS,
    CorrelationBreakdown,
    gamma_hbt,
    gamma_hbt_16terms,
    gamma_mz,
    gamma_mz_16terms,
    hbt_detector_fields,
    hbt_transfer_matrices,
    mz_detector_fields,
    mz_transfer_matrices,
    sixteen_terms,
)
from .ensemble import (
    EnsembleParams,
    FieldFactor,
    FieldSample,
    fourth_moment,
    sample,
    sample_fields,
    second_moment,
    wick_expectation,
)
from .geometry import (
    ParaxialWarning,
    PropagationFactors,
    SetupGeometry,
    distances,
    propagation_factors,
)
from .montecarlo import (
    FringeFit,
    FringeScanResult,
    McConfig,
    McEstimate,
    MomentAuditReport,
    MomentCheck,
    RunningMoments,
    estimate_gamma,
    fringe_scan,
    merge_pairwise,
    moment_audit,
)
from .polarization import (
    IDENTITY,
    Circular,
    Frame,
    JonesVector,
    L,
    Linear,
    PolState,
    R,
    bargmann4,
    is_projector,
    ket,
    ket_array,
    lune_solid_angle,
    mirror_conjugate,
    projector,
    tau,
    trace_product,
    wrap_phase,
)

__version__ = "0.1.0"

__all__ = [
    "Circular",
    "CorrelationBreakdown",
    "EnsembleParams",
    "FieldFactor",
    "FieldSample",
    "Frame",
    "FringeFit",
    "FringeScanResult",
    "IDENTITY",
    "JonesVector",
    "L",
    "Linear",
    "McConfig",
    "McEstimate",
    "MomentAuditReport",
    "MomentCheck",
    "NONZERO_LABELS",
    "ParaxialWarning",
    "PolState",
    "PropagationFactors",
    "R",
    "RunningMoments",
    "SetupGeometry",
    "TERM_LABELS",
    "bargmann4",
    "distances",
    "estimate_gamma",
    "fourth_moment",
    "fringe_scan",
    "gamma_hbt",
    "gamma_hbt_16terms",
    "gamma_mz",
    "gamma_mz_16terms",
    "hbt_detector_fields",
    "hbt_transfer_matrices",
    "is_projector",
    "ket",
    "ket_array",
    "lune_solid_angle",
    "merge_pairwise",
    "mirror_conjugate",
    "moment_audit",
    "mz_detector_fields",
    "mz_transfer_matrices",
    "projector",
    "propagation_factors",
    "sample",
    "sample_fields",
    "second_moment",
    "sixteen_terms",
    "tau",
    "trace_product",
    "wick_expectation",
    "wrap_phase",
]
