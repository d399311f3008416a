"""Exact few-photon simulation of imperfect single-photon sources.

Covers the Fock-state algebra with internal labels, the signal/noise/loss
emulator, Hong-Ou-Mandel click statistics and the visibility correction
formulas that recover effective and intrinsic indistinguishability errors.
"""

from .extraction import (
    ExtractionResult,
    InconsistentMeasurement,
    Measurement,
    Method,
    extract,
    effective_from_measurement,
    intrinsic_from_A,
    intrinsic_from_B,
)
from .fock import (
    TARGET,
    InternalLabel,
    MixedState,
    OccupationState,
    PureState,
    error_label,
    inner_product,
    mutual_overlap,
    number_decompose,
    partial_trace,
    photon,
    tensor_product,
    trace_distance,
    trace_purity,
    vacuum,
)
from .hom import HOMPrediction, HOMStats, g_hom, hom_stats, predict_hom, reference_stats, visibility_A, visibility_B
from .interferometer import UnitaryMatrix, apply_unitary, beam_splitter, emulator_unitary
from .source import (
    EpsilonMode,
    LabelAllocator,
    SourceParams,
    SourceState,
    Variant,
    build_source,
    closed_form_report,
    effective_epsilon,
    g2_of,
    measured_epsilon_tilde,
    obb_mixed,
    p_for_g2,
    predict_g2,
    predict_pn,
)

__version__ = "0.1.0"
