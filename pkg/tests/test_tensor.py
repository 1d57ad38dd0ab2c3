import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracle
from tensor_verb import tensor
from tensor_verb.errors import LengthMismatchError, ShapeMismatchError


def vec_pair(min_r=1, max_r=12, lo=-10.0, hi=10.0):
    elems = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.integers(min_r, max_r).flatmap(
        lambda r: st.tuples(arrays(np.float64, r, elements=elems), arrays(np.float64, r, elements=elems))
    )


def rel_close(a, b, rel=1e-12):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0), 1e-300)
    return np.max(np.abs(a - b), initial=0.0) <= rel * scale


# --- spec examples ---------------------------------------------------------


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ([1, 2], [3, 4], [[3, 4], [6, 8]]),
        ([0, 0], [3, 4], [[0, 0], [0, 0]]),
        ([1, 0], [0, 1], [[0, 1], [0, 0]]),
    ],
)
def test_kron_examples(a, b, expected):
    assert tensor.kron(a, b).tolist() == expected


def test_kron_length_mismatch_names_both_lengths():
    with pytest.raises(LengthMismatchError, match="2 != 3"):
        tensor.kron([1, 2], [1, 2, 3])


def test_hadamard_vec_examples():
    assert tensor.hadamard_vec([1, 2], [3, 4]).tolist() == [3, 8]
    assert tensor.hadamard_vec([1.5, -2], [1, 1]).tolist() == [1.5, -2]
    assert tensor.hadamard_vec([1, 2], [0, 0]).tolist() == [0, 0]
    with pytest.raises(LengthMismatchError):
        tensor.hadamard_vec([1], [1, 2])


def test_hadamard_mat_examples():
    A = [[1, 2], [3, 4]]
    assert tensor.hadamard_mat(A, [[5, 6], [7, 8]]).tolist() == [[5, 12], [21, 32]]
    assert tensor.hadamard_mat(A, np.ones((2, 2))).tolist() == A
    assert tensor.hadamard_mat(A, np.zeros((2, 2))).tolist() == [[0, 0], [0, 0]]
    with pytest.raises(ShapeMismatchError):
        tensor.hadamard_mat(A, np.ones((3, 3)))


def test_add_vec_examples():
    assert tensor.add_vec([1, 2], [3, 4]).tolist() == [4, 6]
    assert tensor.add_vec([1, 2], [0, 0]).tolist() == [1, 2]
    assert tensor.add_vec([1, -1], [-1, 1]).tolist() == [0, 0]
    with pytest.raises(LengthMismatchError):
        tensor.add_vec([1, 2], [1])


def test_frobenius_examples():
    A = [[1, 2], [3, 4]]
    assert tensor.frobenius_inner(A, A) == 30
    assert tensor.frobenius_inner(A, np.zeros((2, 2))) == 0
    assert tensor.frobenius_inner([[1, 0], [0, 0]], [[0, 1], [0, 0]]) == 0
    assert tensor.frobenius_norm([[3, 0], [0, 4]]) == 5
    assert tensor.frobenius_norm(np.zeros((2, 2))) == 0
    assert tensor.frobenius_norm([[1, 0], [0, 0]]) == 1
    with pytest.raises(ShapeMismatchError):
        tensor.frobenius_inner(A, [[1, 2, 3]])


def test_cosine_examples():
    A = [[1, 2], [3, 4]]
    assert tensor.cosine_mat(A, A) == (1.0, False)
    assert tensor.cosine_mat([[1, 0], [0, 0]], [[0, 1], [0, 0]]).value == 0
    assert tensor.cosine_mat(A, [[2, 4], [6, 8]]).value == pytest.approx(1, abs=1e-15)
    assert tensor.cosine_vec([1, 0], [1, 0]).value == 1
    assert tensor.cosine_vec([1, 0], [0, 1]).value == 0
    assert tensor.cosine_vec([1, 1], [2, 2]).value == pytest.approx(1, abs=1e-15)


def test_zero_norm_cosine_is_flagged_not_raised():
    assert tensor.cosine_vec([0, 0], [1, 2]) == (0.0, True)
    assert tensor.cosine_mat(np.zeros((2, 2)), np.zeros((2, 2))) == (0.0, True)


def test_cosine_survives_extreme_magnitudes():
    assert tensor.cosine_vec([1e-200], [1e-200]) == (1.0, False)
    assert tensor.cosine_vec([1.0], [4e-128]) == (1.0, False)
    assert tensor.cosine_vec([1e200, 1e200], [1e200, 0]).value == pytest.approx(2**-0.5, abs=1e-15)
    assert tensor.cosine_mat([[5e-324, 0]], [[1, 1]]).value == pytest.approx(2**-0.5, abs=1e-15)


def test_outputs_are_read_only():
    out = tensor.kron([1, 2], [3, 4])
    with pytest.raises(ValueError):
        out[0, 0] = 9


def test_as_vector_rejects_non_finite():
    with pytest.raises(ValueError):
        tensor.as_vector([1.0, float("nan")])
    with pytest.raises(ValueError):
        tensor.as_matrix([[float("inf")]])


# --- properties ------------------------------------------------------------


@given(vec_pair(), st.floats(-5, 5, allow_nan=False))
def test_kron_bilinear(ab, alpha):
    a, b = ab
    c = b[::-1].copy()
    lhs = tensor.kron(alpha * a + b, c)
    rhs = alpha * tensor.kron(a, c) + tensor.kron(b, c)
    scale = (abs(alpha) * np.abs(a) + np.abs(b)).max(initial=0) * np.abs(c).max(initial=0)
    assert np.max(np.abs(lhs - rhs), initial=0) <= 1e-12 * max(scale, 1e-300) * 4


@given(vec_pair())
def test_norm_multiplicative(ab):
    a, b = ab
    assert rel_close(tensor.frobenius_norm(tensor.kron(a, b)), tensor.norm(a) * tensor.norm(b))


@given(vec_pair(lo=0.0), vec_pair(lo=0.0))
def test_inner_product_factorises(ab, cd):
    (a, b), (c, d) = ab, cd
    if a.size != c.size:
        c = np.resize(c, a.size)
        d = np.resize(d, a.size)
    lhs = tensor.frobenius_inner(tensor.kron(a, b), tensor.kron(c, d))
    assert rel_close(lhs, tensor.dot(a, c) * tensor.dot(b, d))


@given(vec_pair(), vec_pair())
def test_mixed_product(ab, cd):
    (a, b), (c, d) = ab, cd
    c, d = np.resize(c, a.size), np.resize(d, a.size)
    lhs = tensor.hadamard_mat(tensor.kron(a, b), tensor.kron(c, d))
    rhs = tensor.kron(tensor.hadamard_vec(a, c), tensor.hadamard_vec(b, d))
    # (a_i b_j)(c_i d_j) vs (a_i c_i)(b_j d_j): a few ulps at most
    assert rel_close(lhs, rhs, rel=1e-15 * 8)


@given(vec_pair(min_r=2), st.floats(0.01, 100), st.floats(0.01, 100))
def test_cosine_symmetric_and_scale_invariant(ab, s, t):
    a, b = ab
    A, B = tensor.kron(a, b), tensor.kron(b, a)
    assert tensor.cosine_vec(a, b) == tensor.cosine_vec(b, a)
    assert tensor.cosine_mat(A, B) == tensor.cosine_mat(B, A)
    assert tensor.cosine_vec(s * a, t * b).value == pytest.approx(tensor.cosine_vec(a, b).value, abs=1e-12)
    assert tensor.cosine_mat(s * A, t * B).value == pytest.approx(tensor.cosine_mat(A, B).value, abs=1e-12)


@given(vec_pair(max_r=8))
def test_matches_oracle(ab):
    a, b = ab
    K = tensor.kron(a, b)
    assert K.tolist() == oracle.kron(a.tolist(), b.tolist())
    assert tensor.cosine_mat(K, K.T).value == pytest.approx(oracle.cosine_mat(K.tolist(), K.T.tolist()), abs=1e-12)


def test_deterministic_across_threads(rng):
    A = rng.random((300, 300))
    B = rng.random((300, 300))
    expected = tensor.cosine_mat(A, B)
    results = []

    def work():
        results.append(tensor.cosine_mat(A, B))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results)
