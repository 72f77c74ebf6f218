"""The dense oracle against plain index loops."""

import itertools
import math

import numpy as np
import pytest

from hierq.errors import DimensionMismatch, OracleTooLarge
from hierq.oracle import (
    Factor,
    FlatState,
    apparatus_joint_state,
    dense_expectation,
    dense_partial_trace,
    flatten,
    pivoted_cholesky,
)
from hierq.tensor_states import TensorNode, TreeTensorState, TwoLevelState, meson_state

from conftest import two_branch, rand_complex, rand_hermitian, rand_two_level


def loop_partial_trace(vec, dims, keep):
    """Sum over the traced indices entry by entry."""
    keep = sorted(keep)
    traced = [k for k in range(len(dims)) if k not in keep]
    psi = np.asarray(vec).reshape(dims)
    kd = [dims[k] for k in keep]
    out = np.zeros((math.prod(kd), math.prod(kd)), dtype=complex)
    for r, row in enumerate(itertools.product(*(range(d) for d in kd))):
        for c, col in enumerate(itertools.product(*(range(d) for d in kd))):
            for t in itertools.product(*(range(dims[k]) for k in traced)):
                i_row, i_col = [0] * len(dims), [0] * len(dims)
                for k, v in zip(keep, row):
                    i_row[k] = v
                for k, v in zip(keep, col):
                    i_col[k] = v
                for k, v in zip(traced, t):
                    i_row[k] = i_col[k] = v
                out[r, c] += psi[tuple(i_row)] * np.conj(psi[tuple(i_col)])
    return out


def test_flatten_single_macro_state(rng):
    c = rand_complex(rng, 1, 2, 3)
    v = flatten(TwoLevelState(c))
    assert np.array_equal(v.vector, c.reshape(-1))
    assert [f.role for f in v.factors] == ["micro1", "micro2", "macro"]


def test_flatten_meson_layout():
    c1 = c0 = 0.5
    v = flatten(meson_state(c1, c0))
    # index = quark * 3 + macro, macro order (+1, 0, -1)
    expected = np.zeros(6)
    expected[0 * 3 + 0] = c1  # up, S_z=+1
    expected[0 * 3 + 1] = c0  # up, S_z=0
    expected[1 * 3 + 2] = c1  # down, S_z=-1
    expected[1 * 3 + 1] = c0  # down, S_z=0
    assert np.array_equal(v.vector, expected)


def test_flatten_preserves_norm(rng):
    for _ in range(100):
        dims = tuple(rng.integers(1, 4, size=rng.integers(1, 4)))
        c = rand_complex(rng, int(rng.integers(1, 5)), *dims)
        assert flatten(TwoLevelState(c)).norm_sq() == pytest.approx(np.sum(np.abs(c) ** 2), abs=1e-12)


def test_flatten_tree_by_explicit_sum(rng):
    t = two_branch(rng)
    v = flatten(t).tensor()
    r = t.root
    b1, b2 = r.children
    a11, a12 = (n.tensor for n in b1.children)
    a21, a22 = (n.tensor for n in b2.children)
    for i1, i2, i3, i4, j in itertools.product(range(2), repeat=5):
        amp = 0
        for p, q, s, u, w, x in itertools.product(range(2), repeat=6):
            amp += (r.tensor[j, p, q] * b1.tensor[p, s, u] * b2.tensor[q, w, x]
                    * a11[s, i1] * a12[u, i2] * a21[w, i3] * a22[x, i4])
        assert v[i1, i2, i3, i4, j] == pytest.approx(amp, abs=1e-12)
    assert flatten(t).norm_sq() == pytest.approx(1, abs=1e-12)


def test_product_state_trace_is_pure(rng):
    u = rand_complex(rng, 3)
    u /= np.linalg.norm(u)
    w = rand_complex(rng, 2)
    w /= np.linalg.norm(w)
    v = FlatState(np.kron(u, w), (Factor("a", 3), Factor("b", 2)))
    rho = dense_partial_trace(v, [0]).matrix
    assert np.allclose(rho, np.outer(u, u.conj()), atol=1e-12)


def test_bell_state_halves():
    v = FlatState(np.array([1, 0, 0, 1]) / np.sqrt(2), (Factor("a", 2), Factor("b", 2)))
    for k in (0, 1):
        assert np.allclose(dense_partial_trace(v, [k]).matrix, np.eye(2) / 2, atol=1e-12)


@pytest.mark.parametrize("dims,keep", [((2, 3), [1]), ((2, 2, 3), [0, 2]), ((3, 2, 2), [1]), ((2, 3, 2), [0, 1, 2])])
def test_partial_trace_matches_loops(rng, dims, keep):
    vec = rand_complex(rng, math.prod(dims))
    v = FlatState(vec, tuple(Factor(str(k), d) for k, d in enumerate(dims)))
    assert np.allclose(dense_partial_trace(v, keep).matrix, loop_partial_trace(vec, dims, keep), atol=1e-12)


def test_partial_trace_consistent_with_expectation(rng):
    for _ in range(20):
        dims = (2, 3, 2)
        vec = rand_complex(rng, 12)
        vec /= np.linalg.norm(vec)
        v = FlatState(vec, tuple(Factor(str(k), d) for k, d in enumerate(dims)))
        for slot, d in enumerate(dims):
            a = rand_complex(rng, d, d)
            lhs = np.trace(dense_partial_trace(v, [slot]).matrix @ a)
            assert lhs == pytest.approx(dense_expectation(v, a, slot), abs=1e-12)


def test_keep_everything_and_nothing(rng):
    vec = rand_complex(rng, 6)
    vec /= np.linalg.norm(vec)
    v = FlatState(vec, (Factor("a", 2), Factor("b", 3)))
    assert np.allclose(dense_partial_trace(v, [0, 1]).matrix, np.outer(vec, vec.conj()), atol=1e-15)
    assert dense_partial_trace(v, [0]).trace == pytest.approx(1, abs=1e-12)
    with pytest.raises(DimensionMismatch):
        dense_partial_trace(v, [])


def test_expectation_identity_and_hermitian(rng):
    vec = rand_complex(rng, 6)
    v = FlatState(vec, (Factor("a", 2), Factor("b", 3)))
    assert dense_expectation(v, np.eye(3), 1) == pytest.approx(v.norm_sq(), abs=1e-12)
    for _ in range(20):
        assert abs(dense_expectation(v, rand_hermitian(rng, 2), 0).imag) <= 1e-12


def test_meson_sigma_z_on_quark_vanishes():
    v = flatten(meson_state(np.sqrt(0.3), np.sqrt(0.2)))
    assert dense_expectation(v, np.diag([1, -1]), 0) == pytest.approx(0, abs=1e-15)


def test_cap_and_dimension_errors(rng):
    with pytest.raises(OracleTooLarge):
        FlatState(np.zeros(4097), (Factor("a", 4097),))
    with pytest.raises(DimensionMismatch):
        FlatState(np.zeros(5), (Factor("a", 2), Factor("b", 2)))
    v = FlatState(np.ones(4), (Factor("a", 2), Factor("b", 2)))
    with pytest.raises(DimensionMismatch):
        dense_expectation(v, np.eye(3), 0)


@pytest.mark.parametrize("gram", [
    np.eye(3),
    np.ones((3, 3)),
    np.array([[1, 0.5j], [-0.5j, 1]]),
    np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]]),
])
def test_pivoted_cholesky_reproduces_gram(gram):
    v = pivoted_cholesky(gram)
    assert np.allclose(v.conj().T @ v, gram, atol=1e-12)
    assert v.shape[0] == np.linalg.matrix_rank(gram)


def test_pivoted_cholesky_random_psd(rng):
    for _ in range(20):
        n, r = 4, int(rng.integers(1, 5))
        vecs = rand_complex(rng, r, n)
        vecs /= np.linalg.norm(vecs, axis=0)
        gram = vecs.conj().T @ vecs
        v = pivoted_cholesky(gram)
        assert np.allclose(v.conj().T @ v, gram, atol=1e-12)


def test_apparatus_joint_state_norm():
    c = np.array([0.6, 0.8j])
    v = apparatus_joint_state(c, np.array([[1, 0.3], [0.3, 1]]))
    assert v.norm_sq() == pytest.approx(1, abs=1e-12)
