"""Dense vector and matrix algebra used by every composition model.

Vectors are 1-d and matrices 2-d ``float64`` numpy arrays. Values returned
from this module are marked read-only so they can be shared freely between
threads. Reductions go through ``np.sum`` over contiguous data, which uses a
fixed (pairwise) summation order, so identical inputs give bit-identical
outputs.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import LengthMismatchError, ShapeMismatchError


class Cosine(NamedTuple):
    value: float
    degenerate: bool  # true when either operand had zero norm


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def as_vector(values) -> np.ndarray:
    """Validate and freeze a semantic vector (finite, 1-d, length >= 1)."""
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return _frozen(arr)


def as_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return _frozen(arr)


def _check_lengths(a: np.ndarray, b: np.ndarray) -> None:
    if a.ndim != 1 or b.ndim != 1 or a.shape[0] != b.shape[0]:
        raise LengthMismatchError(a.size if a.ndim == 1 else a.shape, b.size if b.ndim == 1 else b.shape)


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.ndim != 2 or a.shape != b.shape:
        raise ShapeMismatchError(a.shape, b.shape)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two r-vectors laid out as an r x r matrix."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_lengths(a, b)
    return _frozen(np.multiply.outer(a, b))


def hadamard_vec(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_lengths(a, b)
    return _frozen(a * b)


def hadamard_mat(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_shapes(a, b)
    return _frozen(a * b)


def add_vec(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_lengths(a, b)
    return _frozen(a + b)


def dot(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_lengths(a, b)
    return float(np.sum(a * b))


# squared norms inside this range keep their product a normal float
_SQ_MIN = 2.0**-500
_SQ_MAX = 2.0**500


def frobenius_inner(a, b) -> float:
    """Sum of the entrywise products of two equally shaped matrices."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_shapes(a, b)
    return float(np.sum(a * b))


def frobenius_norm(a) -> float:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeMismatchError(a.shape, ("r", "r"))
    return _norm(a)


def norm(a) -> float:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise LengthMismatchError(a.shape, "1-d")
    return _norm(a)


def _norm(a: np.ndarray) -> float:
    with np.errstate(over="ignore", under="ignore"):
        sq = float(np.sum(a * a))
    if _SQ_MIN <= sq <= _SQ_MAX or sq == 0.0 and not a.any():
        return math.sqrt(sq)
    m = float(np.max(np.abs(a)))
    return m * math.sqrt(float(np.sum((a / m) ** 2)))


def _cosine(a: np.ndarray, b: np.ndarray) -> Cosine:
    with np.errstate(over="ignore", under="ignore"):
        inner, sq_a, sq_b = float(np.sum(a * b)), float(np.sum(a * a)), float(np.sum(b * b))
    if not (_SQ_MIN <= sq_a <= _SQ_MAX and _SQ_MIN <= sq_b <= _SQ_MAX):
        # rescale to max-abs 1 before squaring; only reached for extreme magnitudes
        ma, mb = float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0))
        if ma == 0.0 or mb == 0.0:
            return Cosine(0.0, True)
        a, b = a / ma, b / mb
        inner, sq_a, sq_b = float(np.sum(a * b)), float(np.sum(a * a)), float(np.sum(b * b))
    # sqrt of the product keeps cos(x, x) == 1 exactly
    value = inner / math.sqrt(sq_a * sq_b)
    return Cosine(min(1.0, max(-1.0, value)), False)


def cosine_mat(a, b) -> Cosine:
    """Frobenius cosine; zero-norm operands give ``Cosine(0.0, True)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_shapes(a, b)
    return _cosine(a, b)


def cosine_vec(a, b) -> Cosine:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_lengths(a, b)
    return _cosine(a, b)
