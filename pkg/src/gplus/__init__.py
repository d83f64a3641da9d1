"""Work fingerprints, performability inference and the g+ score over O*NET-style data."""

__version__ = "0.1.0"

from .bounds import BoundKind, BoundSet, DistributionStats, derive_dwa_bounds, derive_task_bounds, stats
from .errors import (
    BadDate,
    DimensionError,
    DimensionMismatch,
    EmptyInput,
    GPlusError,
    InsufficientData,
    IntegrityError,
    MalformedLabel,
    ParseError,
    PrimitiveCountWarning,
    UnknownKey,
)
from .fingerprint import (
    DEFAULT_CONFIG,
    Comparison,
    Deficit,
    Fingerprint,
    GPlusConfig,
    NormMode,
    ShortfallReport,
    derive_norm_constant,
    display_round,
    gplus,
    merge,
    performable,
)
from .ingest import (
    ControlMode,
    Dataset,
    Occupation,
    PrimitiveKind,
    SubtaskRecord,
    TaskStatement,
    WorkActivity,
    WorkPrimitive,
    build_dataset,
    load_dataset,
    load_subtask_ledger,
)
from .labels import ContentModelLabel, LabelLevel, parse_content_model_label
from .portfolio import (
    PortfolioEvaluation,
    TimelinePoint,
    TrendForecast,
    build_timeline,
    count_performable,
    evaluate_portfolio,
    forecast,
    saturation_target,
)
