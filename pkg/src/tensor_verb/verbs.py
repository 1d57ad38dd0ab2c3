"""Transitive-verb matrices.

Four constructions are supported:

* ``indirect``  -- sum over observed (subject, object) pairs of
  ``count * kron(subject, object)``;
* ``zero_diag`` -- the verb's lexical vector on the diagonal, 0 elsewhere;
* ``one_diag``  -- the verb's lexical vector on the diagonal, 1 elsewhere;
* ``kron_self`` -- ``kron(verb, verb)``.
"""

from __future__ import annotations

import enum
import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NoObservationsError, ParseError
from .space import SemanticSpace, SvoTripleSet, _parse_dim, _parse_header
from .tensor import as_matrix, kron

log = logging.getLogger(__name__)

MATRIX_MAGIC = "tensor-verb-matrix"
MATRIX_VERSION = "v1"

# rows per matmul block in the indirect sum
_INDIRECT_BLOCK = 4096


class Method(str, enum.Enum):
    INDIRECT = "indirect"
    ZERO_DIAG = "zero_diag"
    ONE_DIAG = "one_diag"
    KRON_SELF = "kron_self"

    @classmethod
    def parse(cls, text: str) -> "Method":
        key = text.strip().lower().replace("-", "_")
        aliases = {"0_diag": "zero_diag", "1_diag": "one_diag", "kron": "kron_self", "vxv": "kron_self"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown matrix method {text!r} (choose from {choices})") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class VerbMatrix:
    verb: str
    method: Method
    matrix: np.ndarray
    n_pairs: int = 0  # indirect only: observations used
    n_skipped: int = 0  # indirect only: observations dropped as out-of-vocabulary

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def build_indirect(
    verb: str, triples: SvoTripleSet, space: SemanticSpace, type_level: bool = False
) -> VerbMatrix:
    """Sum of count-weighted subject/object Kronecker products.

    Observations whose subject or object is missing from ``space`` are
    skipped with a warning. ``type_level=True`` treats every distinct
    (subject, object) pair as if it had count 1.
    """
    if verb not in triples:
        raise NoObservationsError(f"no subject/object observations for verb {verb!r}")
    subs, objs, weights = [], [], []
    skipped = 0
    for sub, obj, n in triples[verb]:
        missing = [w for w in (sub, obj) if w not in space]
        if missing:
            log.warning("indirect %s: skipping (%s, %s), out of vocabulary: %s", verb, sub, obj, ", ".join(missing))
            skipped += 1
            continue
        subs.append(space.vector(sub))
        objs.append(space.vector(obj))
        weights.append(1.0 if type_level else float(n))
    if not subs:
        raise NoObservationsError(f"every observation of verb {verb!r} was out of vocabulary")

    r = space.dimension
    total = np.zeros((r, r))
    S = np.asarray(subs)
    O = np.asarray(objs)
    w = np.asarray(weights)
    # sum_k w_k s_k^T o_k == (w * S)^T O, accumulated block by block
    for start in range(0, len(w), _INDIRECT_BLOCK):
        stop = start + _INDIRECT_BLOCK
        total += (S[start:stop] * w[start:stop, None]).T @ O[start:stop]
    total.flags.writeable = False
    return VerbMatrix(verb, Method.INDIRECT, total, n_pairs=len(subs), n_skipped=skipped)


def build_zero_diag(verb: str, space: SemanticSpace) -> VerbMatrix:
    c = space.vector(verb)
    m = np.diag(c)
    m.flags.writeable = False
    return VerbMatrix(verb, Method.ZERO_DIAG, m)


def build_one_diag(verb: str, space: SemanticSpace) -> VerbMatrix:
    c = space.vector(verb)
    m = np.ones((c.size, c.size))
    np.fill_diagonal(m, c)
    m.flags.writeable = False
    return VerbMatrix(verb, Method.ONE_DIAG, m)


def build_kron_self(verb: str, space: SemanticSpace) -> VerbMatrix:
    c = space.vector(verb)
    return VerbMatrix(verb, Method.KRON_SELF, kron(c, c))


def build_verb_matrix(
    verb: str,
    method: Method | str,
    space: SemanticSpace,
    triples: SvoTripleSet | None = None,
    type_level: bool = False,
) -> VerbMatrix:
    method = Method.parse(method) if isinstance(method, str) else method
    if method is Method.INDIRECT:
        if triples is None:
            raise ValueError("the indirect method needs a triples file")
        return build_indirect(verb, triples, space, type_level=type_level)
    if method is Method.ZERO_DIAG:
        return build_zero_diag(verb, space)
    if method is Method.ONE_DIAG:
        return build_one_diag(verb, space)
    return build_kron_self(verb, space)


# --- on-disk cache ---------------------------------------------------------


def save_verb_matrix(vm: VerbMatrix, path) -> None:
    r = vm.dimension
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{MATRIX_MAGIC} {MATRIX_VERSION}\tverb={vm.verb}\tmethod={vm.method.value}\tdim={r}\n")
        for row in vm.matrix.tolist():
            fh.write("\t".join(repr(float(x)) for x in row) + "\n")


def load_verb_matrix(path) -> VerbMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if not text.endswith("\n"):
        raise ParseError("truncated verb-matrix file", path, text.count("\n") + 1)
    lines = text[:-1].split("\n")
    meta = _parse_header(lines[0], MATRIX_MAGIC, path)
    dim = _parse_dim(meta, path)
    if "verb" not in meta or "method" not in meta:
        raise ParseError("header lacks verb= or method=", path, 1)
    try:
        method = Method.parse(meta["method"])
    except ValueError as exc:
        raise ParseError(str(exc), path, 1) from None
    if len(lines) != dim + 1:
        raise ParseError(f"expected {dim} matrix rows, found {len(lines) - 1}", path, len(lines))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != dim:
            raise ParseError(f"expected {dim} values, found {len(fields)}", path, lineno)
        try:
            rows.append([float(x) for x in fields])
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
    return VerbMatrix(meta["verb"], method, as_matrix(rows))


class VerbMatrixStore:
    """Memoising factory for verb matrices over one space (and triples).

    With ``cache_dir`` set, matrices are also persisted under a key derived
    from the space fingerprint (plus the triples fingerprint for the
    indirect method), so reruns over the same inputs skip the build.
    """

    def __init__(
        self,
        space: SemanticSpace,
        triples: SvoTripleSet | None = None,
        cache_dir=None,
        type_level: bool = False,
    ):
        self.space = space
        self.triples = triples
        self.type_level = type_level
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self._memo: dict[tuple[str, Method], VerbMatrix] = {}
        self._space_key: str | None = None
        self._triples_key: str | None = None

    def _cache_path(self, verb: str, method: Method) -> Path:
        if self._space_key is None:
            self._space_key = self.space.fingerprint()[:16]
        key = self._space_key
        if method is Method.INDIRECT:
            if self._triples_key is None:
                self._triples_key = self.triples.fingerprint()[:16] if self.triples else "none"
            key += "-" + self._triples_key + ("-types" if self.type_level else "")
        return self.cache_dir / key / method.value / f"{verb}.tsv"

    def get(self, verb: str, method: Method | str) -> VerbMatrix:
        method = Method.parse(method) if isinstance(method, str) else method
        memo_key = (verb, method)
        if memo_key in self._memo:
            return self._memo[memo_key]
        vm = None
        path = self._cache_path(verb, method) if self.cache_dir is not None else None
        if path is not None and path.is_file():
            vm = load_verb_matrix(path)
        if vm is None:
            vm = build_verb_matrix(verb, method, self.space, self.triples, self.type_level)
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(".tmp")
                save_verb_matrix(vm, tmp)
                os.replace(tmp, path)
        self._memo[memo_key] = vm
        return vm
