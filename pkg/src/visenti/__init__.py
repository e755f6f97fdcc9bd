"""Sentiment lexicon expansion and lexicon-aware recurrent-convolutional
text classification, end to end: lexicon I/O, seed propagation and
embedding-distance scoring, negation-aware sentiment-vector extraction, a
hand-built differentiable model stack, deterministic training, metrics, and
an experiment harness."""

from .errors import (
    ConfigError,
    DataError,
    DistanceError,
    NoSeedsError,
    ParseError,
    ShapeError,
    UnscorableError,
    VisentiError,
)
from .lexicon import (
    SentiEntry,
    SentiLexicon,
    load_lexicon,
    lookup_longest,
    save_lexicon,
)
from .expansion import (
    ExpansionConfig,
    ExpansionReport,
    ScoreBreakdown,
    SeedSets,
    ThesaurusGraph,
    expand_lexicon,
    extract_seeds,
    load_candidates,
    load_thesaurus,
    polarity_from_distances,
    propagate,
    score_word,
)
from .sentivec import (
    DEFAULT_NEGATORS,
    NegationMatch,
    SentiVecConfig,
    SentiVectors,
    extract_senti_vectors,
    find_negation_matches,
    load_negators,
    match_negation,
    tokenize,
    vsno,
)
from .embeddings import (
    EmbeddingTable,
    EncoderOutput,
    distance,
    encode_static,
    load_embeddings,
    load_encoder_output,
    load_encoder_outputs,
    save_embeddings,
    save_encoder_output,
    save_encoder_outputs,
)
from .neural import (
    CombViSAModel,
    GradCheckReport,
    LstmClassifier,
    Mlp,
    ModelConfig,
    build_model,
    cross_entropy,
    grad_check,
    load_checkpoint,
    lstm_backward,
    lstm_cell,
    lstm_forward,
    lstm_init,
    save_checkpoint,
    softmax,
)
from .training import Adam, EpochStats, Sgd, TrainConfig, train, write_history
from .evaluation import (
    ComparisonTable,
    EvalReport,
    ExperimentConfig,
    StatsReport,
    VariantResult,
    VARIANTS,
    compute_metrics,
    corpus_stats,
    f1_score,
    format_metrics,
    format_stats,
    load_dataset,
    prepare_samples,
    run_experiment,
    save_dataset,
)
from .synthetic import SyntheticConfig, SyntheticCorpus, generate

__version__ = "0.1.0"
