"""Verb-disambiguation evaluation.

Each dataset row pairs ``subject verb object`` with ``subject landmark
object`` and carries one human similarity judgment on a 1-7 scale. A model
scores the pair with the cosine of the two composed meanings, and is judged
by Spearman's rank correlation with the human scores. Mean model scores for
the HIGH and LOW bands are reported alongside.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

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
from .errors import (
    LengthMismatchError,
    NoObservationsError,
    OutOfVocabularyError,
    ParseError,
    TensorVerbError,
    UndefinedCorrelationError,
    ValidationError,
)
from .space import SemanticSpace, SvoTripleSet
from .verbs import Method, VerbMatrixStore

log = logging.getLogger(__name__)

DATASET_HEADER = ("annotator", "verb", "subject", "object", "landmark", "score", "band")
BANDS = ("HIGH", "LOW")
AGGREGATE_MODES = ("per-judgment", "mean-per-pair")


class EvaluationAborted(TensorVerbError):
    code = "E_DEGENERATE"


@dataclass(frozen=True)
class DatasetEntry:
    annotator: str
    verb: str
    subject: str
    object: str
    landmark: str
    human_score: int
    band: str
    line: int = field(default=0, compare=False)

    @property
    def pair_key(self) -> tuple[str, str, str, str]:
        return (self.verb, self.subject, self.object, self.landmark)


def parse_dataset(path) -> list[DatasetEntry]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\r\n").split("\t")
        if tuple(h.strip().lower() for h in header) != DATASET_HEADER:
            raise ParseError(f"expected header {'<TAB>'.join(DATASET_HEADER)!r}", path, 1)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != len(DATASET_HEADER):
                raise ParseError(f"expected {len(DATASET_HEADER)} fields, found {len(fields)}", path, lineno)
            annotator, verb, sub, obj, landmark, raw_score, band = (f.strip() for f in fields)
            if not all((annotator, verb, sub, obj, landmark)):
                raise ParseError("empty field", path, lineno)
            try:
                score = int(raw_score)
            except ValueError:
                raise ParseError(f"score is not an integer: {raw_score!r}", path, lineno) from None
            if not 1 <= score <= 7:
                raise ValidationError(f"score {score} outside [1, 7]", path, lineno)
            if band not in BANDS:
                raise ValidationError(f"unknown band {band!r} (expected HIGH or LOW)", path, lineno)
            entries.append(DatasetEntry(annotator, verb, sub, obj, landmark, score, band, lineno))
    return entries


# --- scoring ---------------------------------------------------------------


@dataclass(frozen=True)
class PairScore:
    entry: DatasetEntry
    model_similarity: float
    degenerate: bool


@dataclass(frozen=True)
class Skip:
    entry: DatasetEntry
    reason: str


def _lookup(space: SemanticSpace, word: str, oov: str) -> np.ndarray:
    if word in space or oov != "zero":
        return space.vector(word)
    return np.zeros(space.dimension)


def compose_sentence(
    model: ModelSpec,
    subject: str,
    verb: str,
    obj: str,
    space: SemanticSpace,
    store: VerbMatrixStore | None = None,
    oov: str = "skip",
) -> SentenceMeaning:
    """Meaning of ``subject verb obj`` under ``model``.

    ``oov="skip"`` raises on unknown words; ``oov="zero"`` substitutes zero
    vectors, which surface later as degenerate similarities.
    """
    if model.name is ModelName.BASELINE:
        return compose_baseline(_lookup(space, verb, oov))
    s = _lookup(space, subject, oov)
    o = _lookup(space, obj, oov)
    if model.name is ModelName.CATEGORICAL:
        if store is None:
            store = VerbMatrixStore(space)
        if model.matrix_method is not Method.INDIRECT and verb not in space and oov == "zero":
            matrix = _zero_verb_matrix(model.matrix_method, space.dimension)
        else:
            matrix = store.get(verb, model.matrix_method).matrix
        return compose_categorical(matrix, s, o)
    v = _lookup(space, verb, oov)
    if model.name is ModelName.ADD:
        return compose_additive(v, s, o)
    return compose_multiplicative(v, s, o)


def _zero_verb_matrix(method: Method, r: int) -> np.ndarray:
    m = np.ones((r, r)) if method is Method.ONE_DIAG else np.zeros((r, r))
    np.fill_diagonal(m, 0.0)
    return m


def score_entry(
    entry: DatasetEntry,
    model: ModelSpec,
    space: SemanticSpace,
    triples: SvoTripleSet | None = None,
    store: VerbMatrixStore | None = None,
    oov: str = "skip",
) -> PairScore:
    """Similarity of ``subject verb object`` and ``subject landmark object``.

    Raises ``OutOfVocabularyError`` or ``NoObservationsError`` when the pair
    cannot be composed; ``evaluate`` turns those into skip records.
    """
    if store is None:
        store = VerbMatrixStore(space, triples)
    m1 = compose_sentence(model, entry.subject, entry.verb, entry.object, space, store, oov)
    m2 = compose_sentence(model, entry.subject, entry.landmark, entry.object, space, store, oov)
    cos = similarity(m1, m2)
    return PairScore(entry, cos.value, cos.degenerate)


# --- statistics ------------------------------------------------------------


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size)
    sorted_x = x[order]
    i = 0
    n = x.size
    while i < n:
        j = i
        while j + 1 < n and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(model_scores: Sequence[float], human_scores: Sequence[float]) -> float:
    """Spearman's rho: Pearson correlation of the two average-rank lists."""
    if len(model_scores) != len(human_scores):
        raise LengthMismatchError(len(model_scores), len(human_scores))
    if len(model_scores) < 2:
        raise UndefinedCorrelationError("need at least two observations for a rank correlation")
    rx = average_ranks(model_scores)
    ry = average_ranks(human_scores)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(np.sum(dx * dx))
    syy = float(np.sum(dy * dy))
    if sxx == 0.0 or syy == 0.0:
        which = "model scores" if sxx == 0.0 else "human scores"
        raise UndefinedCorrelationError(f"rank correlation undefined: {which} are constant")
    rho = float(np.sum(dx * dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, rho))


def high_low_means(scores: Sequence[PairScore]) -> tuple[float | None, float | None]:
    """Mean model similarity per band; ``None`` for a band with no scores."""
    means = []
    for band in BANDS:
        vals = [s.model_similarity for s in scores if s.entry.band == band]
        means.append(math.fsum(vals) / len(vals) if vals else None)
    return means[0], means[1]


def _aggregate(scores: Sequence[PairScore], mode: str) -> tuple[list[float], list[float]]:
    if mode == "per-judgment":
        return [s.model_similarity for s in scores], [float(s.entry.human_score) for s in scores]
    if mode != "mean-per-pair":
        raise ValueError(f"unknown aggregate mode {mode!r}")
    groups: dict[tuple, list[PairScore]] = {}
    for s in scores:
        groups.setdefault(s.entry.pair_key, []).append(s)
    model, human = [], []
    for group in groups.values():
        model.append(group[0].model_similarity)
        human.append(math.fsum(s.entry.human_score for s in group) / len(group))
    return model, human


# --- reports ---------------------------------------------------------------


@dataclass
class EvaluationReport:
    model: ModelSpec
    rho: float | None
    mean_high: float | None
    mean_low: float | None
    n_scored: int
    n_skipped: int
    n_degenerate: int
    skipped_reasons: list[str]
    scores: list[PairScore]
    aggregate: str = "per-judgment"
    rho_error: str | None = None

    def to_json(self) -> dict:
        return {
            "model": self.model.key,
            "label": self.model.label,
            "rho": self.rho,
            "rho_error": self.rho_error,
            "mean_high": self.mean_high,
            "mean_low": self.mean_low,
            "n_scored": self.n_scored,
            "n_skipped": self.n_skipped,
            "n_degenerate": self.n_degenerate,
            "aggregate": self.aggregate,
            "skipped_reasons": list(self.skipped_reasons),
            "scores": [
                {
                    "line": s.entry.line,
                    "annotator": s.entry.annotator,
                    "verb": s.entry.verb,
                    "subject": s.entry.subject,
                    "object": s.entry.object,
                    "landmark": s.entry.landmark,
                    "human_score": s.entry.human_score,
                    "band": s.entry.band,
                    "similarity": s.model_similarity,
                    "degenerate": s.degenerate,
                }
                for s in self.scores
            ],
        }


@dataclass
class UpperBound:
    """Human agreement row: leave-one-annotator-out rho, band means on the 1-7 scale."""

    rho: float | None
    mean_high: float | None
    mean_low: float | None
    n_annotators: int

    def to_json(self) -> dict:
        return {
            "label": "UpperBound",
            "rho": self.rho,
            "mean_high": self.mean_high,
            "mean_low": self.mean_low,
            "n_annotators": self.n_annotators,
        }


def upper_bound(dataset: Sequence[DatasetEntry]) -> UpperBound | None:
    """``None`` unless at least one pair was judged by several annotators."""
    by_pair: dict[tuple, dict[str, list[int]]] = {}
    for e in dataset:
        by_pair.setdefault(e.pair_key, {}).setdefault(e.annotator, []).append(e.human_score)
    if not any(len(raters) > 1 for raters in by_pair.values()):
        return None
    annotators = sorted({e.annotator for e in dataset})
    rhos = []
    for a in annotators:
        mine, others = [], []
        for raters in by_pair.values():
            if a not in raters or len(raters) < 2:
                continue
            rest = [x for b, xs in raters.items() if b != a for x in xs]
            mine.append(math.fsum(raters[a]) / len(raters[a]))
            others.append(math.fsum(rest) / len(rest))
        try:
            rhos.append(spearman_rho(mine, others))
        except UndefinedCorrelationError:
            continue
    means = []
    for band in BANDS:
        vals = [e.human_score for e in dataset if e.band == band]
        means.append(math.fsum(vals) / len(vals) if vals else None)
    rho = math.fsum(rhos) / len(rhos) if rhos else None
    return UpperBound(rho, means[0], means[1], len(annotators))


def evaluate(
    dataset: Sequence[DatasetEntry],
    models: Sequence[ModelSpec],
    space: SemanticSpace,
    triples: SvoTripleSet | None = None,
    store: VerbMatrixStore | None = None,
    aggregate: str = "per-judgment",
    exclude_degenerate: bool = False,
    oov: str = "skip",
    workers: int = 1,
) -> list[EvaluationReport]:
    """Score every entry under every model; one report per model, in table order."""
    if aggregate not in AGGREGATE_MODES:
        raise ValueError(f"unknown aggregate mode {aggregate!r}")
    if not dataset:
        raise EvaluationAborted("dataset is empty")
    if store is None:
        store = VerbMatrixStore(space, triples)
    reports = []
    for model in sorted(set(models), key=lambda m: m.order):
        if model.name is ModelName.CATEGORICAL:
            # build matrices up front so parallel scoring only reads the memo
            for verb in sorted({w for e in dataset for w in (e.verb, e.landmark)}):
                try:
                    store.get(verb, model.matrix_method)
                except (OutOfVocabularyError, NoObservationsError):
                    pass

        def run(entry: DatasetEntry) -> PairScore | Skip:
            try:
                return score_entry(entry, model, space, triples, store, oov)
            except (OutOfVocabularyError, NoObservationsError) as exc:
                return Skip(entry, f"line {entry.line}: {exc}")

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, dataset))
        else:
            results = [run(e) for e in dataset]

        scores, reasons = [], []
        n_degenerate = 0
        for r in results:
            if isinstance(r, Skip):
                reasons.append(r.reason)
                continue
            if r.degenerate:
                n_degenerate += 1
                if exclude_degenerate:
                    reasons.append(f"line {r.entry.line}: degenerate (zero-norm) meaning")
                    continue
            scores.append(r)
        if not scores:
            raise EvaluationAborted(f"{model.label}: every dataset entry was skipped")

        rho, rho_error = None, None
        try:
            rho = spearman_rho(*_aggregate(scores, aggregate))
        except UndefinedCorrelationError as exc:
            rho_error = str(exc)
        mean_high, mean_low = high_low_means(scores)
        reports.append(
            EvaluationReport(
                model=model,
                rho=rho,
                mean_high=mean_high,
                mean_low=mean_low,
                n_scored=len(scores),
                n_skipped=len(reasons),
                n_degenerate=n_degenerate,
                skipped_reasons=reasons,
                scores=scores,
                aggregate=aggregate,
                rho_error=rho_error,
            )
        )
    return reports


def _cell(x: float | None) -> str:
    return f"{x:8.4f}" if x is not None else f"{'-':>8}"


def format_table(reports: Sequence[EvaluationReport], upper: UpperBound | None = None) -> str:
    lines = [f"{'Model':<18}{'High':>8}{'Low':>8}{'ρ':>8}{'scored':>8}{'skipped':>8}{'degen':>7}"]
    lines.append("-" * len(lines[0]))
    for r in reports:
        rho = _cell(r.rho) if r.rho_error is None else f"{'undef':>8}"
        lines.append(
            f"{r.model.label:<18}{_cell(r.mean_high)}{_cell(r.mean_low)}{rho}"
            f"{r.n_scored:>8}{r.n_skipped:>8}{r.n_degenerate:>7}"
        )
    if upper is not None:
        lines.append(f"{'UpperBound':<18}{_cell(upper.mean_high)}{_cell(upper.mean_low)}{_cell(upper.rho)}")
    return "\n".join(lines) + "\n"


def reports_to_json(reports: Sequence[EvaluationReport], upper: UpperBound | None = None) -> str:
    payload = {
        "reports": [r.to_json() for r in reports],
        "upper_bound": upper.to_json() if upper is not None else None,
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


__all__ = [
    "ALL_MODELS",
    "DatasetEntry",
    "EvaluationReport",
    "PairScore",
    "Skip",
    "UpperBound",
    "evaluate",
    "format_table",
    "high_low_means",
    "parse_dataset",
    "reports_to_json",
    "score_entry",
    "spearman_rho",
    "upper_bound",
]
