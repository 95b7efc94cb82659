"""Long-video temporal attention toolkit.

Position grouping/shifting for relative encodings, informative frame
selection, schedule-averaged attention, and numeric checks of the
distinguishability and entropy-floor results.
"""
from . import _kernels
from .analysis import (
    DistanceEstimate,
    EntropyReport,
    Theorem1Report,
    entropy_check,
    epsilon_uniform,
    estimate_distance,
    head_reports,
    head_survey,
    pseudo_dimension_bound,
    sup_logit_estimate,
    synthetic_head_suite,
    theorem1_check,
)
from .attention import (
    AdditiveBias,
    AttentionResult,
    Rotary,
    RPEKind,
    attention_single,
    clip_positions,
    interpolate_positions,
    logit,
    logit_absolute,
    logit_matrix,
    longdiff_attention,
    rotate,
)
from .errors import (
    BadMagicError,
    LongDiffError,
    NonFinitePayloadError,
    TensorFormatError,
    TruncatedPayloadError,
    ValidationError,
)
from .keyframes import (
    FrameScore,
    IFSMask,
    build_ifs_mask,
    detect_keyframes,
    frame_entropy,
    frame_sad,
    frame_scores,
    pool_channels,
    pseudo_video,
    quantize,
)
from .pipeline import LayerPlan, RunReport, emit_stats, plan_layers, run_pipeline
from .positions import (
    GroupConfig,
    PositionSchedule,
    absolute_schedule,
    group_config,
    group_position,
    grouped_matrix,
    relative_matrix,
    schedule,
    shift,
)
from .tensorio import (
    RunConfig,
    derive_seed,
    load_config,
    raw_stream,
    read_tensor,
    save_config,
    standard_normals,
    synth_features,
    write_tensor,
)

__version__ = "0.1.0"

backend_name = _kernels.backend_name
