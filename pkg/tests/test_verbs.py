import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracle
from tensor_verb.errors import NoObservationsError, OutOfVocabularyError
from tensor_verb.space import Basis, SemanticSpace, SvoTripleSet
from tensor_verb.verbs import (
    Method,
    VerbMatrixStore,
    build_indirect,
    build_kron_self,
    build_one_diag,
    build_zero_diag,
    load_verb_matrix,
    save_verb_matrix,
)


def space_of(**vectors):
    r = len(next(iter(vectors.values())))
    return SemanticSpace.from_vectors(Basis(tuple(f"b{i}" for i in range(r))), vectors)


# ratio weights from counts are zero or comfortably normal
weights = st.one_of(st.just(0.0), st.floats(1e-100, 50))


def test_indirect_example():
    space = space_of(s1=[1, 0], s2=[0, 1], o=[0, 1])
    triples = SvoTripleSet.from_records([("v", "s1", "o", 1), ("v", "s2", "o", 1)])
    vm = build_indirect("v", triples, space)
    assert vm.matrix.tolist() == [[0, 1], [0, 1]]
    assert vm.method is Method.INDIRECT and vm.n_pairs == 2


def test_indirect_singleton_and_count_semantics():
    space = space_of(s=[1.5, 2], o=[3, 0.25], t=[0.5, 4])
    single = build_indirect("v", SvoTripleSet.from_records([("v", "s", "o", 1)]), space)
    assert single.matrix.tolist() == np.multiply.outer([1.5, 2], [3, 0.25]).tolist()

    twice = build_indirect("v", SvoTripleSet.from_records([("v", "s", "o", 2), ("v", "t", "o", 1)]), space)
    listed = build_indirect(
        "v", SvoTripleSet({"v": (("s", "o", 1), ("t", "o", 1), ("s", "o", 1))}), space
    )
    np.testing.assert_allclose(twice.matrix, listed.matrix, rtol=1e-15)


def test_indirect_type_level_flag():
    space = space_of(s=[1, 2], o=[3, 4])
    triples = SvoTripleSet.from_records([("v", "s", "o", 5)])
    assert build_indirect("v", triples, space, type_level=True).matrix.tolist() == [[3, 4], [6, 8]]


def test_indirect_skips_oov_with_warning(caplog):
    space = space_of(s=[1, 2], o=[3, 4])
    triples = SvoTripleSet.from_records([("v", "s", "o", 1), ("v", "ghost", "o", 1)])
    with caplog.at_level(logging.WARNING):
        vm = build_indirect("v", triples, space)
    assert vm.n_skipped == 1 and vm.n_pairs == 1
    assert "ghost" in caplog.text


def test_indirect_no_observations():
    space = space_of(s=[1, 2], o=[3, 4])
    with pytest.raises(NoObservationsError):
        build_indirect("absent", SvoTripleSet.from_records([("v", "s", "o", 1)]), space)
    with pytest.raises(NoObservationsError):
        build_indirect("v", SvoTripleSet.from_records([("v", "x", "y", 1)]), space)


def test_diag_examples():
    space = space_of(v=[5, 7], ones=[1, 1], zero=[0, 0])
    assert build_zero_diag("v", space).matrix.tolist() == [[5, 0], [0, 7]]
    assert build_zero_diag("zero", space).matrix.tolist() == [[0, 0], [0, 0]]
    assert build_one_diag("v", space).matrix.tolist() == [[5, 1], [1, 7]]
    assert build_one_diag("ones", space).matrix.tolist() == [[1, 1], [1, 1]]
    tiny = space_of(v=[3])
    assert build_zero_diag("v", tiny).matrix.tolist() == [[3]]
    assert build_one_diag("v", tiny).matrix.tolist() == [[3]]


def test_kron_self_examples():
    space = space_of(v=[1, 2], e=[1, 0])
    assert build_kron_self("v", space).matrix.tolist() == [[1, 2], [2, 4]]
    assert build_kron_self("e", space).matrix.tolist() == [[1, 0], [0, 0]]


@pytest.mark.parametrize("build", [build_zero_diag, build_one_diag, build_kron_self])
def test_oov_verb(build):
    with pytest.raises(OutOfVocabularyError):
        build("nope", space_of(v=[1.0]))


@given(arrays(np.float64, st.integers(1, 12), elements=weights), st.floats(0.01, 100))
def test_encoding_structure_and_scaling(c, lam):
    space = space_of(v=c, w=lam * c)
    r = c.size
    off = ~np.eye(r, dtype=bool)
    z, o, k = (b("v", space).matrix for b in (build_zero_diag, build_one_diag, build_kron_self))
    assert np.array_equal(np.diag(z), c) and np.all(z[off] == 0.0)
    assert np.array_equal(np.diag(o), c) and np.all(o[off] == 1.0)
    assert np.array_equal(k, k.T)
    np.testing.assert_allclose(k * k.T, np.multiply.outer(np.diag(k), np.diag(k)), rtol=1e-15, atol=0)

    cw = space.vector("w")
    assert np.array_equal(np.diag(build_zero_diag("w", space).matrix), cw)
    one_w = build_one_diag("w", space).matrix
    assert np.array_equal(np.diag(one_w), cw) and np.all(one_w[off] == 1.0)
    assert np.array_equal(build_kron_self("w", space).matrix, np.multiply.outer(cw, cw))
    np.testing.assert_allclose(build_kron_self("w", space).matrix, lam**2 * k, rtol=1e-13, atol=0)


@given(arrays(np.float64, st.integers(1, 12), elements=weights), st.integers(-8, 8))
def test_scaling_is_exact_for_powers_of_two(c, e):
    lam = 2.0**e
    space = space_of(v=c, w=lam * c)
    assert np.array_equal(build_zero_diag("w", space).matrix, lam * build_zero_diag("v", space).matrix)
    assert np.array_equal(build_kron_self("w", space).matrix, lam**2 * build_kron_self("v", space).matrix)


@given(arrays(np.float64, st.integers(1, 10), elements=weights), st.integers(0, 2**32 - 1))
def test_kron_self_is_psd(c, seed):
    k = build_kron_self("v", space_of(v=c)).matrix
    probe = np.random.default_rng(seed).normal(size=(20, c.size))
    scale = max(float(np.dot(c, c)), 1.0)
    assert np.all(np.einsum("ni,ij,nj->n", probe, k, probe) >= -1e-12 * scale * c.size)


def test_indirect_additive_over_disjoint_sets(rng):
    nouns = {f"n{i}": rng.random(6) for i in range(8)}
    space = space_of(**nouns)
    records = [("v", f"n{rng.integers(8)}", f"n{rng.integers(8)}", int(rng.integers(1, 4))) for _ in range(30)]
    left, right = records[:13], records[13:]
    full = build_indirect("v", SvoTripleSet({"v": tuple(r[1:] for r in records)}), space).matrix
    a = build_indirect("v", SvoTripleSet({"v": tuple(r[1:] for r in left)}), space).matrix
    b = build_indirect("v", SvoTripleSet({"v": tuple(r[1:] for r in right)}), space).matrix
    np.testing.assert_allclose(full, a + b, rtol=1e-12, atol=0)
    brute = oracle.verb_matrix("indirect", "v", {w: v.tolist() for w, v in nouns.items()}, {"v": [r[1:] for r in records]})
    np.testing.assert_allclose(full, brute, rtol=1e-12, atol=0)


def test_matrix_file_round_trip(tmp_path, rng):
    space = space_of(v=rng.random(5))
    vm = build_kron_self("v", space)
    save_verb_matrix(vm, tmp_path / "m.tsv")
    header = (tmp_path / "m.tsv").read_text().splitlines()[0]
    assert header == "tensor-verb-matrix v1\tverb=v\tmethod=kron_self\tdim=5"
    back = load_verb_matrix(tmp_path / "m.tsv")
    assert back.verb == "v" and back.method is Method.KRON_SELF
    assert back.matrix.tobytes() == vm.matrix.tobytes()


def test_store_caches_on_disk(tmp_path, rng):
    space = space_of(v=rng.random(4), s=rng.random(4), o=rng.random(4))
    triples = SvoTripleSet.from_records([("v", "s", "o", 2)])
    store = VerbMatrixStore(space, triples, cache_dir=tmp_path)
    first = store.get("v", "indirect")
    files = list(tmp_path.rglob("*.tsv"))
    assert len(files) == 1 and files[0].name == "v.tsv"
    again = VerbMatrixStore(space, triples, cache_dir=tmp_path).get("v", Method.INDIRECT)
    assert again.matrix.tobytes() == first.matrix.tobytes()
    # a different space must not hit the same cache entry
    other = space_of(v=rng.random(4), s=rng.random(4), o=rng.random(4))
    VerbMatrixStore(other, triples, cache_dir=tmp_path).get("v", "indirect")
    assert len(list(tmp_path.rglob("*.tsv"))) == 2


def test_method_parse_aliases():
    assert Method.parse("kron-self") is Method.KRON_SELF
    assert Method.parse("0-diag") is Method.ZERO_DIAG
    assert Method.parse("one_diag") is Method.ONE_DIAG
    with pytest.raises(ValueError):
        Method.parse("two-diag")
