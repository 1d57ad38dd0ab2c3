"""Building the distributional space from a lemmatised corpus.

The pipeline is ``select_basis`` -> ``count_cooccurrence`` -> ``weight_counts``.
Weights are the ratio p(context | target) / p(context). Spaces persist to a
plain TSV format whose decimals round-trip exactly to the stored doubles.
"""

from __future__ import annotations

import hashlib
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import chain, islice
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyBasisError,
    EmptyCountsError,
    FormatVersionError,
    OutOfVocabularyError,
    ParseError,
    ValidationError,
)

log = logging.getLogger(__name__)

SPACE_MAGIC = "tensor-verb-space"
SPACE_VERSION = "v1"

Sentence = Sequence[str]


class CorpusFile:
    """Re-iterable view of a corpus file: one sentence per line, space separated.

    Blank lines are skipped. Iterating twice re-reads the file, so large
    corpora never need to sit in memory.
    """

    def __init__(self, path):
        self.path = os.fspath(path)

    def __iter__(self) -> Iterator[list[str]]:
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                tokens = line.split()
                if tokens:
                    yield tokens


def read_corpus(path) -> CorpusFile:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"corpus file not found: {path}")
    return CorpusFile(path)


@dataclass(frozen=True)
class Basis:
    words: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        words = tuple(self.words)
        object.__setattr__(self, "words", words)
        if not words:
            raise EmptyBasisError("basis must contain at least one word")
        index = {w: i for i, w in enumerate(words)}
        if len(index) != len(words):
            dupes = sorted(w for w, n in Counter(words).items() if n > 1)
            raise ValueError(f"duplicate basis words: {dupes}")
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.words)


def token_frequencies(corpus: Iterable[Sentence]) -> Counter:
    freq: Counter = Counter()
    for sentence in corpus:
        freq.update(sentence)
    return freq


def select_basis(
    corpus: Iterable[Sentence],
    k: int,
    stoplist: Iterable[str] = frozenset(),
    frequencies: Mapping[str, int] | None = None,
) -> Basis:
    """The ``k`` most frequent tokens outside ``stoplist``.

    Ordered by descending frequency, ties broken lexicographically. Returns
    fewer than ``k`` words when the corpus does not have enough candidates.
    """
    if k < 1:
        raise ValueError(f"basis size must be >= 1, got {k}")
    if frequencies is None:
        frequencies = token_frequencies(corpus)
    stop = frozenset(stoplist)
    ranked = sorted(
        ((w, n) for w, n in frequencies.items() if w not in stop and n > 0),
        key=lambda wn: (-wn[1], wn[0]),
    )
    if not ranked:
        raise EmptyBasisError("no corpus token qualifies as a basis word")
    return Basis(tuple(w for w, _ in ranked[:k]))


@dataclass(frozen=True)
class CooccurrenceCounts:
    """Raw (target, basis word) event counts.

    ``table[t, j]`` counts how often basis word ``j`` occurred within the
    window of target ``targets[t]``.
    """

    targets: tuple[str, ...]
    table: np.ndarray

    @property
    def target_total(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def context_total(self) -> np.ndarray:
        return self.table.sum(axis=0)

    @property
    def grand_total(self) -> int:
        return int(self.table.sum())

    def count(self, target: str, j: int) -> int:
        try:
            t = self.targets.index(target)
        except ValueError:
            return 0
        return int(self.table[t, j])

    def as_dict(self) -> dict[str, dict[int, int]]:
        """Nonzero counts as nested dicts, for inspection and tests."""
        out: dict[str, dict[int, int]] = {}
        for t, row in zip(self.targets, self.table):
            nz = np.flatnonzero(row)
            if nz.size:
                out[t] = {int(j): int(row[j]) for j in nz}
        return out


def _chunks(corpus: Iterable[Sentence], size: int) -> Iterator[list[Sentence]]:
    it = iter(corpus)
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk


def _count_chunk(sentences, target_index, basis_index, window):
    """Encoded (target * K + context) keys with their counts for one shard."""
    k = len(basis_index)
    tgt, ctx, sid = [], [], []
    for n, sentence in enumerate(sentences):
        for tok in sentence:
            tgt.append(target_index.get(tok, -1))
            ctx.append(basis_index.get(tok, -1))
            sid.append(n)
    tgt = np.asarray(tgt, dtype=np.int64)
    ctx = np.asarray(ctx, dtype=np.int64)
    sid = np.asarray(sid, dtype=np.int64)
    keys = []
    for d in range(1, min(window, len(sid) - 1) + 1):
        same = sid[:-d] == sid[d:]
        # target left, context right
        m = same & (tgt[:-d] >= 0) & (ctx[d:] >= 0)
        keys.append(tgt[:-d][m] * k + ctx[d:][m])
        # target right, context left
        m = same & (tgt[d:] >= 0) & (ctx[:-d] >= 0)
        keys.append(tgt[d:][m] * k + ctx[:-d][m])
    if not keys:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.unique(np.concatenate(keys), return_counts=True)


_worker_state: tuple = ()


def _init_worker(target_index, basis_index, window):
    global _worker_state
    _worker_state = (target_index, basis_index, window)


def _count_chunk_in_worker(sentences):
    return _count_chunk(sentences, *_worker_state)


def count_cooccurrence(
    corpus: Iterable[Sentence],
    basis: Basis,
    window: int = 5,
    targets: Iterable[str] | None = None,
    workers: int = 1,
    chunk_size: int = 20_000,
) -> CooccurrenceCounts:
    """Count basis words within ``window`` tokens of each target token.

    The window is symmetric and clipped at sentence boundaries. With
    ``targets=None`` every token type becomes a target (one extra pass over
    the corpus). Shards are merged by integer addition, so the result does
    not depend on sentence order or on ``workers``.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if targets is None:
        target_words = tuple(sorted(token_frequencies(corpus)))
    else:
        target_words = tuple(sorted(set(targets)))
    target_index = {w: i for i, w in enumerate(target_words)}
    k = len(basis)
    flat = np.zeros(len(target_words) * k, dtype=np.int64)

    def merge(result):
        keys, counts = result
        np.add.at(flat, keys, counts)

    chunks = _chunks(corpus, chunk_size)
    head = list(islice(chunks, 2))
    if workers > 1 and len(head) > 1:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(target_index, dict(basis.index), window),
        ) as pool:
            for result in pool.map(_count_chunk_in_worker, chain(head, chunks)):
                merge(result)
    else:
        for chunk in chain(head, chunks):
            merge(_count_chunk(chunk, target_index, basis.index, window))

    return CooccurrenceCounts(target_words, flat.reshape(len(target_words), k))


@dataclass(frozen=True)
class SemanticSpace:
    """Basis plus one nonnegative weight vector per word.

    Rows of ``matrix`` follow ``words``; both are fixed at construction.
    """

    basis: Basis
    words: tuple[str, ...]
    matrix: np.ndarray
    _row: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        words = tuple(self.words)
        matrix = np.array(self.matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape != (len(words), len(self.basis)):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match "
                f"{len(words)} words x {len(self.basis)} basis words"
            )
        if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
            raise ValueError("space weights must be finite and >= 0")
        row = {w: i for i, w in enumerate(words)}
        if len(row) != len(words):
            raise ValueError("duplicate words in space")
        matrix.flags.writeable = False
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_row", row)

    @classmethod
    def from_vectors(cls, basis: Basis, vectors: Mapping[str, Sequence[float]]) -> "SemanticSpace":
        words = tuple(sorted(vectors))
        if words:
            matrix = np.array([np.asarray(vectors[w], dtype=np.float64) for w in words])
        else:
            matrix = np.zeros((0, len(basis)))
        return cls(basis, words, matrix)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __contains__(self, word: str) -> bool:
        return word in self._row

    def __len__(self) -> int:
        return len(self.words)

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.matrix[self._row[word]]
        except KeyError:
            raise OutOfVocabularyError(word) from None

    @property
    def vectors(self) -> dict[str, np.ndarray]:
        return {w: self.matrix[i] for i, w in enumerate(self.words)}

    def identical_to(self, other: "SemanticSpace") -> bool:
        """Bitwise equality of basis, vocabulary and weights."""
        return (
            self.basis.words == other.basis.words
            and self.words == other.words
            and self.matrix.shape == other.matrix.shape
            and self.matrix.tobytes() == other.matrix.tobytes()
        )

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update("\t".join(self.basis.words).encode())
        h.update(b"\n")
        h.update("\t".join(self.words).encode())
        h.update(b"\n")
        h.update(np.ascontiguousarray(self.matrix, dtype="<f8").tobytes())
        return h.hexdigest()


def weight_counts(counts: CooccurrenceCounts, basis: Basis) -> SemanticSpace:
    """Turn raw counts into p(j | t) / p(j) weights.

    Cells whose target or context total is zero get weight 0.
    """
    if counts.table.shape[1] != len(basis):
        raise ValueError("counts were collected against a different basis")
    grand = counts.grand_total
    if grand <= 0:
        raise EmptyCountsError("no co-occurrence events were counted")
    table = counts.table.astype(np.float64)
    tt = counts.target_total.astype(np.float64)[:, None]
    ct = counts.context_total.astype(np.float64)[None, :]
    p_cond = np.divide(table, tt, out=np.zeros_like(table), where=tt > 0)
    p_ctx = ct / float(grand)
    weights = np.divide(p_cond, p_ctx, out=np.zeros_like(table), where=p_ctx > 0)
    return SemanticSpace(basis, counts.targets, weights)


def build_space(
    corpus: Iterable[Sentence],
    basis_size: int = 2000,
    window: int = 5,
    stoplist: Iterable[str] = frozenset(),
    targets: Iterable[str] | None = None,
    workers: int = 1,
) -> SemanticSpace:
    freq = token_frequencies(corpus)
    basis = select_basis(corpus, basis_size, stoplist, frequencies=freq)
    if targets is None:
        targets = freq.keys()
    counts = count_cooccurrence(corpus, basis, window, targets=targets, workers=workers)
    return weight_counts(counts, basis)


# --- persistence -----------------------------------------------------------


def _fmt(x: float) -> str:
    # repr is the shortest decimal that round-trips to the same double
    return repr(float(x))


def save_space(space: SemanticSpace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{SPACE_MAGIC} {SPACE_VERSION}\tdim={space.dimension}\n")
        fh.write("\t".join(space.basis.words) + "\n")
        for word, row in zip(space.words, space.matrix):
            fh.write(word + "\t" + "\t".join(map(_fmt, row.tolist())) + "\n")


def _parse_header(line: str, magic: str, path) -> dict[str, str]:
    fields = line.rstrip("\n").split("\t")
    head = fields[0].split(" ")
    if len(head) != 2 or head[0] != magic:
        raise ParseError(f"not a {magic} file (header {fields[0]!r})", path, 1)
    if head[1] != SPACE_VERSION:
        raise FormatVersionError(
            f"unsupported format version {head[1]!r} (expected {SPACE_VERSION})", path, 1
        )
    meta = {}
    for item in fields[1:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"bad header field {item!r}", path, 1)
        meta[key] = value
    return meta


def _parse_dim(meta: dict[str, str], path) -> int:
    try:
        dim = int(meta["dim"])
    except (KeyError, ValueError):
        raise ParseError("header lacks a valid dim=K field", path, 1) from None
    if dim < 1:
        raise ParseError(f"dim must be >= 1, got {dim}", path, 1)
    return dim


def _parse_weights(fields: Sequence[str], path, lineno: int) -> list[float]:
    try:
        values = [float(x) for x in fields]
    except ValueError as exc:
        raise ParseError(f"bad weight: {exc}", path, lineno) from None
    return values


def load_space(path) -> SemanticSpace:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if not text:
        raise ParseError("empty space file", path, 1)
    if not text.endswith("\n"):
        raise ParseError(
            f"truncated file: last line has no terminator (byte offset {len(text.encode())})",
            path,
            text.count("\n") + 1,
        )
    lines = text[:-1].split("\n")
    meta = _parse_header(lines[0], SPACE_MAGIC, path)
    dim = _parse_dim(meta, path)
    if len(lines) < 2:
        raise ParseError("truncated file: missing basis line", path, 2)
    basis_words = lines[1].split("\t")
    if len(basis_words) != dim:
        raise ParseError(f"basis has {len(basis_words)} words but dim={dim}", path, 2)
    basis = Basis(tuple(basis_words))
    words = []
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        fields = line.split("\t")
        if len(fields) != dim + 1:
            raise ParseError(f"expected {dim + 1} fields, found {len(fields)}", path, lineno)
        values = _parse_weights(fields[1:], path, lineno)
        words.append(fields[0])
        rows.append(values)
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    try:
        return SemanticSpace(basis, tuple(words), matrix)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


# --- subject/verb/object triples ------------------------------------------


@dataclass(frozen=True)
class SvoTripleSet:
    """verb -> [(subject, object, count), ...] in first-seen order."""

    triples: Mapping[str, tuple[tuple[str, str, int], ...]]

    def __contains__(self, verb: str) -> bool:
        return verb in self.triples

    def __getitem__(self, verb: str) -> tuple[tuple[str, str, int], ...]:
        return self.triples[verb]

    @property
    def verbs(self) -> list[str]:
        return sorted(self.triples)

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, str, int]]) -> "SvoTripleSet":
        acc: dict[str, dict[tuple[str, str], int]] = {}
        for verb, sub, obj, n in records:
            if n <= 0:
                raise ValueError(f"triple count must be positive, got {n}")
            pairs = acc.setdefault(verb, {})
            pairs[(sub, obj)] = pairs.get((sub, obj), 0) + n
        return cls({v: tuple((s, o, n) for (s, o), n in pairs.items()) for v, pairs in acc.items()})

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for verb in self.verbs:
            for s, o, n in self.triples[verb]:
                h.update(f"{verb}\t{s}\t{o}\t{n}\n".encode())
        return h.hexdigest()


def load_triples(path) -> SvoTripleSet:
    """Read ``verb<TAB>subject<TAB>object<TAB>count`` lines.

    Repeated (verb, subject, object) lines have their counts summed.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ParseError(f"expected 4 tab-separated fields, found {len(fields)}", path, lineno)
            verb, sub, obj, raw = fields
            if not all(f and not any(c.isspace() for c in f) for f in (verb, sub, obj)):
                raise ParseError("verb/subject/object must be single non-empty tokens", path, lineno)
            try:
                n = int(raw)
            except ValueError:
                raise ParseError(f"count is not an integer: {raw!r}", path, lineno) from None
            if n <= 0:
                raise ValidationError(f"count must be positive, got {n}", path, lineno)
            records.append((verb, sub, obj, n))
    return SvoTripleSet.from_records(records)
