"""Categorical clustering and trait reporting for Likert-style survey data."""

from .dissimilarity import (
    CATEGORICAL,
    DEFAULT_WEIGHT,
    MIXED,
    NUMERIC,
    POLICY_MODES,
    SIMPLE,
    WEIGHTED,
    AttributeSpec,
    CategoryWeightTable,
    DissimilarityPolicy,
    Prototype,
    Record,
    compute_category_weights,
    compute_gamma,
    euclidean_distance,
    mixed_dissimilarity,
    simple_matching,
    weighted_matching,
)
from .errors import (
    AlignmentError,
    DegenerateProfileError,
    EmptyClusterError,
    InfeasibleConfigError,
    ParseError,
    PolicyError,
    ReportError,
    SchemaError,
)
from .kmodes import (
    CategoricalDataset,
    ClusterModel,
    FitConfig,
    elbow_scan,
    fit,
    init_modes,
    nearest_mode,
    select_k,
    update_mode_attribute,
    within_cluster_difference,
)
from .report import (
    ClusterLabeling,
    ClusterSummary,
    PercentReport,
    emit_report,
    fuse_profiles,
    label_clusters,
    mean_percentages,
    parse_report,
    personality_percentages,
)
from .survey import (
    PRESETS,
    ParseReport,
    ParseResult,
    ResponseTable,
    SurveyItem,
    SurveySchema,
    TraitProfile,
    dump_schema,
    generate_synthetic,
    load_schema,
    normalize_profile,
    parse_responses,
    schema_to_dict,
    score_profile,
)

__version__ = "0.1.0"
