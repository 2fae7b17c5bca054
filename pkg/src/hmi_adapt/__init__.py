"""Next-action prediction and adaptive assistance for industrial HMIs."""

from .events import (
    ContextAttributes,
    ElementVocabulary,
    InteractionEvent,
    IngestResult,
    LogFormatError,
    RecordError,
    ingest_event_log,
    load_vocabulary,
    parse_event_record,
    save_vocabulary,
    write_event_log,
)
from .sequences import (
    CorpusStats,
    ExtractionStats,
    InteractionSequence,
    corpus_stats,
    extract_corpus,
    extract_valid_sequences,
    read_corpus,
    write_corpus,
)
from .markov import (
    ContextModelStore,
    MarkovModel,
    ModelSelection,
    RankedRecommendation,
    RecommendationItem,
    build_context_store,
    load_snapshot,
    model_from_doc,
    model_to_doc,
    pad_history,
    recommend_top_k,
    save_snapshot,
    select_model,
    store_from_doc,
    store_to_doc,
    train_markov,
    transition_probability,
)
from .evaluation import (
    EvaluationReport,
    OrderComparison,
    SplitResult,
    StepResult,
    compare_orders,
    compute_metrics,
    f1_from_means,
    incremental_eval,
    render_report_table,
    split_train_test,
)
from .simulate import (
    BehaviorProfile,
    SimulationConfig,
    build_profile,
    default_simulation_config,
    default_vocabulary,
    generate_interaction_log,
    profile_assignments,
    simulation_sidecar,
)
from .service import ServiceConfig, create_app

__version__ = "0.1.0"

__all__ = [
    "BehaviorProfile",
    "ContextAttributes",
    "ContextModelStore",
    "CorpusStats",
    "ElementVocabulary",
    "EvaluationReport",
    "ExtractionStats",
    "IngestResult",
    "InteractionEvent",
    "InteractionSequence",
    "LogFormatError",
    "MarkovModel",
    "ModelSelection",
    "OrderComparison",
    "RankedRecommendation",
    "RecommendationItem",
    "RecordError",
    "ServiceConfig",
    "SimulationConfig",
    "SplitResult",
    "StepResult",
    "build_context_store",
    "build_profile",
    "compare_orders",
    "compute_metrics",
    "corpus_stats",
    "create_app",
    "default_simulation_config",
    "default_vocabulary",
    "extract_corpus",
    "extract_valid_sequences",
    "f1_from_means",
    "generate_interaction_log",
    "incremental_eval",
    "ingest_event_log",
    "load_snapshot",
    "load_vocabulary",
    "model_from_doc",
    "model_to_doc",
    "pad_history",
    "parse_event_record",
    "profile_assignments",
    "read_corpus",
    "recommend_top_k",
    "render_report_table",
    "save_snapshot",
    "save_vocabulary",
    "select_model",
    "simulation_sidecar",
    "split_train_test",
    "store_from_doc",
    "store_to_doc",
    "train_markov",
    "transition_probability",
    "write_corpus",
    "write_event_log",
]
