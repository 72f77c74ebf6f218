"""System-apparatus entanglement and partial trace over the apparatus.

Apparatus states enter only through their Gram matrix
``G[k, l] = <Phi_k|Phi_l>``; no explicit apparatus vectors are built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, InvalidApparatus, IndexOutOfRange, NotNormalized, ZeroProbability
from .tensor_states import DensityMatrix, TwoLevelState, _require_normalized

ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True, eq=False)
class ApparatusModel:
    gram: np.ndarray

    def __post_init__(self):
        g = np.array(self.gram, dtype=np.complex128)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidApparatus(f"Gram matrix must be square, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise InvalidApparatus("Gram matrix entries must be finite")
        if np.max(np.abs(g - g.conj().T), initial=0.0) > 1e-12:
            raise InvalidApparatus("Gram matrix is not Hermitian")
        if np.max(np.abs(np.diag(g) - 1.0), initial=0.0) > 1e-12:
            raise InvalidApparatus("apparatus states must be unit vectors (diag(G) = 1)")
        if g.size and np.linalg.eigvalsh(0.5 * (g + g.conj().T))[0] < -1e-10:
            raise InvalidApparatus("Gram matrix is not positive semidefinite")
        g.flags.writeable = False
        object.__setattr__(self, "gram", g)

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @classmethod
    def orthogonal(cls, n: int) -> ApparatusModel:
        return cls(np.eye(n))

    @classmethod
    def blind(cls, n: int) -> ApparatusModel:
        """Apparatus that does not respond: every Phi_i is the same state."""
        return cls(np.ones((n, n)))

    @classmethod
    def two_state(cls, overlap: complex) -> ApparatusModel:
        return cls(np.array([[1.0, overlap], [np.conj(overlap), 1.0]]))


@dataclass(frozen=True, eq=False)
class JointState:
    """sum_i c_i |phi_i>|Phi_i> after the apparatus has recorded the system."""

    coeffs: np.ndarray
    apparatus: ApparatusModel

    def norm_sq(self) -> float:
        # <phi_i|phi_j> = delta_ij kills cross terms; G_ii = 1
        c = self.coeffs
        return float(np.real(np.sum(np.abs(c) ** 2 * np.diag(self.apparatus.gram))))


def entangle(c, app: ApparatusModel) -> JointState:
    c = np.array(c, dtype=np.complex128).reshape(-1)
    if c.size != app.n:
        raise DimensionMismatch(f"{c.size} system amplitudes but apparatus has {app.n} states")
    norm2 = float(np.sum(np.abs(c) ** 2))
    if abs(norm2 - 1.0) > 1e-8:
        raise NotNormalized(f"sum |c_i|^2 = {norm2:.17g}")
    c.flags.writeable = False
    return JointState(c, app)


def trace_out_apparatus(j: JointState) -> DensityMatrix:
    """rho_S[i, i'] = c_i conj(c_i') <Phi_i'|Phi_i>.

    Orthogonal pointer states leave the classical mixture diag(|c_i|^2);
    overlapping ones keep part of the coherence.
    """
    c = j.coeffs
    rho = np.outer(c, c.conj()) * j.apparatus.gram.T
    return DensityMatrix(rho).check()


def macro_project(s: TwoLevelState, macro_subset: Iterable[int]) -> tuple[float, TwoLevelState]:
    """Project onto the macro states in ``macro_subset`` (0-based).

    Returns the outcome probability and the renormalized post-measurement
    state.  What the outcome says about a constituent is read off with
    ``reduced_density(post, m)``.
    """
    _require_normalized(s.norm_sq())
    subset = sorted(set(int(j) for j in macro_subset))
    if not subset:
        raise ValueError("macro_subset must be nonempty")
    bad = [j for j in subset if not 0 <= j < s.macro_dim]
    if bad:
        raise IndexOutOfRange(f"macro indices {bad} not in [0, {s.macro_dim})")
    mask = np.zeros(s.macro_dim, dtype=bool)
    mask[subset] = True
    kept = np.where(mask.reshape(-1, *([1] * len(s.micro_dims))), s.coeffs, 0)
    prob = float(np.sum(np.abs(kept) ** 2))
    if prob < ZERO_PROBABILITY:
        raise ZeroProbability(f"outcome {subset} has probability {prob:.3e}")
    if mask.all():
        return prob, s
    return prob, TwoLevelState(kept / np.sqrt(prob))
