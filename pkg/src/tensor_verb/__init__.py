"""Transitive-verb matrices for compositional distributional semantics."""

from .compose import (
    ALL_MODELS,
    ModelName,
    ModelSpec,
    SentenceMeaning,
    compose_additive,
    compose_baseline,
    compose_categorical,
    compose_multiplicative,
    similarity,
)
from .evaluation import (
    DatasetEntry,
    EvaluationReport,
    PairScore,
    evaluate,
    high_low_means,
    parse_dataset,
    score_entry,
    spearman_rho,
)
from .space import (
    Basis,
    CooccurrenceCounts,
    SemanticSpace,
    SvoTripleSet,
    build_space,
    count_cooccurrence,
    load_space,
    load_triples,
    read_corpus,
    save_space,
    select_basis,
    weight_counts,
)
from .verbs import (
    Method,
    VerbMatrix,
    VerbMatrixStore,
    build_indirect,
    build_kron_self,
    build_one_diag,
    build_zero_diag,
)

__version__ = "0.1.0"
