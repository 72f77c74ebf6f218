import math

import numpy as np
import pytest

from hierq.errors import DimensionMismatch, IndexOutOfRange, InvalidApparatus, NotNormalized, ZeroProbability
from hierq.measurement import ApparatusModel, entangle, macro_project, trace_out_apparatus
from hierq.oracle import apparatus_joint_state, dense_partial_trace
from hierq.tensor_states import TwoLevelState, meson_state, reduced_density

from conftest import rand_complex, rand_two_level


def unit(rng, n):
    c = rand_complex(rng, n)
    return c / np.linalg.norm(c)


def random_gram(rng, n, rank=None):
    vecs = rand_complex(rng, rank or n, n)
    vecs /= np.linalg.norm(vecs, axis=0)
    g = vecs.conj().T @ vecs
    np.fill_diagonal(g, 1.0)
    return (g + g.conj().T) / 2


def test_no_superposition_stays_pure():
    rho = trace_out_apparatus(entangle([1, 0], ApparatusModel.two_state(0.3)))
    assert rho.purity == pytest.approx(1, abs=1e-12)


def test_joint_state_keeps_coefficients():
    c = np.array([0.6, 0.8j])
    j = entangle(c, ApparatusModel.two_state(0.5))
    assert np.array_equal(j.coeffs, c)
    assert j.norm_sq() == pytest.approx(1, abs=1e-12)


def test_joint_norm_random(rng):
    for _ in range(100):
        n = int(rng.integers(2, 5))
        c = unit(rng, n)
        g = random_gram(rng, n)
        assert abs(entangle(c, ApparatusModel(g)).norm_sq() - 1) <= 1e-12
        # explicit vectors agree
        assert abs(apparatus_joint_state(c, g).norm_sq() - 1) <= 1e-12


def test_orthogonal_pointers_decohere(rng):
    c = unit(rng, 3)
    rho = trace_out_apparatus(entangle(c, ApparatusModel.orthogonal(3))).matrix
    assert np.max(np.abs(rho - np.diag(np.abs(c) ** 2))) <= 1e-12


def test_blind_apparatus_keeps_coherence(rng):
    c = unit(rng, 3)
    rho = trace_out_apparatus(entangle(c, ApparatusModel.blind(3)))
    assert np.allclose(rho.matrix, np.outer(c, c.conj()), atol=1e-12)
    assert rho.purity == pytest.approx(1, abs=1e-12)


def test_two_state_term_by_term():
    c1, c2 = 0.6, 0.8j
    g = 0.3 + 0.4j  # <Phi_1|Phi_2>
    rho = trace_out_apparatus(entangle([c1, c2], ApparatusModel.two_state(g))).matrix
    assert rho[0, 0] == pytest.approx(abs(c1) ** 2)
    assert rho[1, 1] == pytest.approx(abs(c2) ** 2)
    assert rho[1, 0] == pytest.approx(g * c2 * np.conj(c1))  # |phi_2><phi_1|
    assert rho[0, 1] == pytest.approx(np.conj(g) * c1 * np.conj(c2))


def test_intermediate_overlap_matches_cholesky_embedding(rng):
    for g in (0.5, 0.5j, -0.25 + 0.4j):
        c = unit(rng, 2)
        gram = np.array([[1, g], [np.conj(g), 1]])
        got = trace_out_apparatus(entangle(c, ApparatusModel(gram))).matrix
        ref = dense_partial_trace(apparatus_joint_state(c, gram), [0]).matrix
        assert np.max(np.abs(got - ref)) <= 1e-10


def test_random_gram_matches_embedding(rng):
    for _ in range(50):
        n = int(rng.integers(2, 5))
        rank = int(rng.integers(1, n + 1))
        c = unit(rng, n)
        gram = random_gram(rng, n, rank)
        rho = trace_out_apparatus(entangle(c, ApparatusModel(gram)))
        ref = dense_partial_trace(apparatus_joint_state(c, gram), [0]).matrix
        assert np.max(np.abs(rho.matrix - ref)) <= 1e-10
        w = rho.eigenvalues
        assert w[0] >= -1e-10 and w[-1] <= 1 + 1e-10 and abs(w.sum() - 1) <= 1e-10


def test_purity_one_exactly_when_pointers_coincide(rng):
    for _ in range(20):
        c = unit(rng, 3)
        assert trace_out_apparatus(entangle(c, ApparatusModel.blind(3))).purity == pytest.approx(1, abs=1e-12)
        mixed = trace_out_apparatus(entangle(c, ApparatusModel.orthogonal(3))).purity
        assert mixed == pytest.approx(np.sum(np.abs(c) ** 4), abs=1e-12)
        assert mixed < 1 - 1e-6


def test_coherence_monotone_in_overlap(rng):
    c = unit(rng, 2)
    offs = [abs(trace_out_apparatus(entangle(c, ApparatusModel.two_state(g))).matrix[0, 1])
            for g in (0, 0.25, 0.5, 0.75, 1)]
    assert all(b >= a for a, b in zip(offs, offs[1:]))


@pytest.mark.parametrize("gram", [
    np.array([[1, 0.2], [0.3, 1]]),           # not Hermitian
    np.array([[1, 0], [0, 0.9]]),             # not unit diagonal
    np.array([[1, -0.9, -0.9], [-0.9, 1, -0.9], [-0.9, -0.9, 1]]),  # not PSD
])
def test_invalid_gram(gram):
    with pytest.raises(InvalidApparatus):
        ApparatusModel(gram)


def test_entangle_errors():
    with pytest.raises(NotNormalized):
        entangle([1, 1], ApparatusModel.orthogonal(2))
    with pytest.raises(DimensionMismatch):
        entangle([1, 0, 0], ApparatusModel.orthogonal(2))


# --- macro projection -------------------------------------------------------

@pytest.mark.parametrize("c1sq,c0sq", [(0.25, 0.25), (0.3, 0.2)])
def test_meson_spin_up_projection(c1sq, c0sq):
    s = meson_state(math.sqrt(c1sq), math.sqrt(c0sq))
    prob, post = macro_project(s, [0])
    assert prob == pytest.approx(c1sq, abs=1e-12)
    assert np.max(np.abs(reduced_density(post, 0).matrix - np.diag([1, 0]))) <= 1e-12


@pytest.mark.parametrize("c1sq,c0sq", [(0.25, 0.25), (0.3, 0.2), (0.0, 0.5)])
def test_meson_zero_projection(c1sq, c0sq):
    # one macro index survives, so the quark is left in a pure state:
    # unbiased populations, coherence set by the relative phase
    phases = [1, 1j, 1, -1]
    s = meson_state(math.sqrt(c1sq), math.sqrt(c0sq), phases)
    prob, post = macro_project(s, [1])
    assert prob == pytest.approx(2 * c0sq, abs=1e-12)
    rho = reduced_density(post, 0)
    assert np.allclose(np.diag(rho.matrix), [0.5, 0.5], atol=1e-12)
    c = post.coeffs[1]
    assert rho.matrix[0, 1] == pytest.approx(c[0] * np.conj(c[1]), abs=1e-12)
    assert abs(rho.matrix[0, 1]) == pytest.approx(0.5, abs=1e-12)
    assert rho.purity == pytest.approx(1, abs=1e-12)


def test_complete_projector_is_identity(rng):
    s = rand_two_level(rng, 3, (2, 2))
    prob, post = macro_project(s, [0, 1, 2])
    assert prob == pytest.approx(1, abs=1e-12)
    assert post is s


def test_partition_probabilities_sum_to_one(rng):
    for _ in range(50):
        j = int(rng.integers(2, 6))
        s = rand_two_level(rng, j, (2, 3))
        labels = rng.integers(0, 3, size=j)
        total = 0.0
        for part in range(3):
            subset = np.flatnonzero(labels == part)
            if subset.size:
                total += macro_project(s, subset)[0]
        assert abs(total - 1) <= 1e-12


def test_zero_probability():
    s = meson_state(1 / math.sqrt(2), 0)
    with pytest.raises(ZeroProbability):
        macro_project(s, [1])


def test_projection_index_errors(rng):
    s = rand_two_level(rng, 2, (2,))
    with pytest.raises(IndexOutOfRange):
        macro_project(s, [2])
    with pytest.raises(ValueError):
        macro_project(s, [])
