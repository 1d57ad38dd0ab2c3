"""Sentence meanings for ``subject verb object`` and their similarity.

The categorical model multiplies the verb matrix entrywise with the
Kronecker product of the subject and object vectors. The additive and
multiplicative models combine the three lexical vectors directly, and the
baseline keeps only the verb. Word vectors are used unnormalised; the
cosine at the similarity step does all the normalising.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import tensor
from .errors import IncomparableMeaningsError, ShapeMismatchError
from .tensor import Cosine
from .verbs import Method, VerbMatrix


class Kind(str, enum.Enum):
    MATRIX = "matrix"
    VECTOR = "vector"
    VERB_ONLY = "verb_only"


@dataclass(frozen=True)
class SentenceMeaning:
    kind: Kind
    value: np.ndarray


class ModelName(str, enum.Enum):
    BASELINE = "baseline"
    ADD = "add"
    MULTIPLY = "multiply"
    CATEGORICAL = "categorical"


_LABELS = {
    ModelName.BASELINE: "Baseline",
    ModelName.ADD: "Add",
    ModelName.MULTIPLY: "Multiply",
    Method.INDIRECT: "Indirect matrix",
    Method.ZERO_DIAG: "0-diag matrix",
    Method.ONE_DIAG: "1-diag matrix",
    Method.KRON_SELF: "v⊗v matrix",
}


@dataclass(frozen=True)
class ModelSpec:
    name: ModelName
    matrix_method: Method | None = None

    def __post_init__(self):
        object.__setattr__(self, "name", ModelName(self.name))
        if self.matrix_method is not None:
            mm = self.matrix_method
            object.__setattr__(self, "matrix_method", Method.parse(mm) if isinstance(mm, str) else mm)
        if (self.name is ModelName.CATEGORICAL) != (self.matrix_method is not None):
            raise ValueError("a matrix method is required for, and only for, the categorical model")

    @classmethod
    def parse(cls, text: str) -> "ModelSpec":
        """Accepts ``baseline``, ``add``, ``multiply``, ``categorical:<method>``
        or a bare method name such as ``kron-self``."""
        head, _, tail = text.strip().lower().partition(":")
        if head == ModelName.CATEGORICAL.value:
            if not tail:
                raise ValueError("categorical model needs a matrix method, e.g. categorical:kron-self")
            return cls(ModelName.CATEGORICAL, Method.parse(tail))
        if tail:
            raise ValueError(f"unexpected ':' in model {text!r}")
        try:
            return cls(ModelName(head))
        except ValueError:
            pass
        try:
            return cls(ModelName.CATEGORICAL, Method.parse(head))
        except ValueError:
            raise ValueError(f"unknown model {text!r}") from None

    @property
    def key(self) -> str:
        if self.matrix_method is None:
            return self.name.value
        return f"{self.name.value}:{self.matrix_method.value}"

    @property
    def label(self) -> str:
        return _LABELS[self.matrix_method or self.name]

    @property
    def order(self) -> int:
        """Position of this model among the rows of the results table."""
        return list(_LABELS).index(self.matrix_method or self.name)


ALL_MODELS = tuple(
    [ModelSpec(ModelName.BASELINE), ModelSpec(ModelName.ADD), ModelSpec(ModelName.MULTIPLY)]
    + [ModelSpec(ModelName.CATEGORICAL, m) for m in Method]
)


def compose_categorical(verb_matrix: VerbMatrix | np.ndarray, sub, obj) -> SentenceMeaning:
    v = verb_matrix.matrix if isinstance(verb_matrix, VerbMatrix) else np.asarray(verb_matrix, dtype=np.float64)
    sub = np.asarray(sub, dtype=np.float64)
    obj = np.asarray(obj, dtype=np.float64)
    if sub.shape != obj.shape or v.shape != sub.shape * 2:
        raise ShapeMismatchError(v.shape, sub.shape + obj.shape)
    return SentenceMeaning(Kind.MATRIX, tensor.hadamard_mat(v, tensor.kron(sub, obj)))


def compose_additive(verb, sub, obj) -> SentenceMeaning:
    return SentenceMeaning(Kind.VECTOR, tensor.add_vec(tensor.add_vec(sub, verb), obj))


def compose_multiplicative(verb, sub, obj) -> SentenceMeaning:
    return SentenceMeaning(Kind.VECTOR, tensor.hadamard_vec(tensor.hadamard_vec(sub, verb), obj))


def compose_baseline(verb) -> SentenceMeaning:
    return SentenceMeaning(Kind.VERB_ONLY, tensor.as_vector(verb))


def similarity(m1: SentenceMeaning, m2: SentenceMeaning) -> Cosine:
    """Cosine between two meanings of the same kind (Frobenius for matrices)."""
    if m1.kind is not m2.kind:
        raise IncomparableMeaningsError(f"cannot compare a {m1.kind.value} meaning with a {m2.kind.value} meaning")
    if m1.kind is Kind.MATRIX:
        return tensor.cosine_mat(m1.value, m2.value)
    return tensor.cosine_vec(m1.value, m2.value)
