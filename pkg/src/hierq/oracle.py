"""Dense brute-force reference computations.

Everything here works on one explicit state vector over the full product
space, so it is only usable for small systems (total dimension <= 4096).
Factor order is (micro_1, ..., micro_k, macro).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, OracleTooLarge
from .tensor_states import DensityMatrix, TensorNode, TreeTensorState, TwoLevelState

MAX_DIM = 4096


@dataclass(frozen=True)
class Factor:
    role: str
    dim: int


@dataclass(frozen=True, eq=False)
class FlatState:
    vector: np.ndarray
    factors: tuple[Factor, ...]

    def __post_init__(self):
        v = np.array(self.vector, dtype=np.complex128).reshape(-1)
        factors = tuple(self.factors)
        if v.size != math.prod(f.dim for f in factors):
            raise DimensionMismatch(f"vector length {v.size} != product of factor dims")
        if v.size > MAX_DIM:
            raise OracleTooLarge(f"dense oracle capped at {MAX_DIM}, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("entries must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "factors", factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    def tensor(self) -> np.ndarray:
        return self.vector.reshape(self.dims)

    def norm_sq(self) -> float:
        return float(np.vdot(self.vector, self.vector).real)

    def __eq__(self, other):
        if not isinstance(other, FlatState):
            return NotImplemented
        return self.factors == other.factors and np.array_equal(self.vector, other.vector)


def _contract_subtree(node: TensorNode) -> np.ndarray:
    """Tensor (bond, leaf_1, ..., leaf_n) of a subtree with internal bonds summed."""
    if node.is_leaf:
        return node.tensor
    out = node.tensor
    # contract children right-to-left so earlier axes keep their positions
    for k in reversed(range(len(node.children))):
        sub = _contract_subtree(node.children[k])
        out = np.tensordot(out, sub, axes=([k + 1], [0]))
        n_sub = sub.ndim - 1
        # tensordot appended the child's leaf axes at the end; put them back at k+1
        src = list(range(out.ndim - n_sub, out.ndim))
        out = np.moveaxis(out, src, list(range(k + 1, k + 1 + n_sub)))
    return out


def flatten(s: TwoLevelState | TreeTensorState) -> FlatState:
    if isinstance(s, TwoLevelState):
        micro = [Factor(f"micro{m + 1}", d) for m, d in enumerate(s.micro_dims)]
        full = s.coeffs
    elif isinstance(s, TreeTensorState):
        micro = [Factor(f"micro{m + 1}", d) for m, d in enumerate(s.leaf_dims())]
        if math.prod(f.dim for f in micro) * s.macro_dim > MAX_DIM:
            raise OracleTooLarge("flattened tree exceeds the dense oracle cap")
        full = _contract_subtree(s.root)
    else:
        raise TypeError(f"cannot flatten {type(s).__name__}")
    vec = np.moveaxis(full, 0, -1).reshape(-1)
    return FlatState(vec, (*micro, Factor("macro", full.shape[0])))


def dense_partial_trace(v: FlatState, keep: Sequence[int]) -> DensityMatrix:
    """Partial trace of |v><v| onto the factors at positions ``keep``.

    Kept factors appear in increasing position order.  The result is not
    validated, so unnormalized vectors are allowed.
    """
    keep = sorted(set(keep))
    n = len(v.factors)
    if not keep or any(not 0 <= k < n for k in keep):
        raise DimensionMismatch(f"keep must be a nonempty subset of range({n}), got {keep}")
    psi = v.tensor()
    traced = [ax for ax in range(n) if ax not in keep]
    rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
    d = math.prod(v.dims[k] for k in keep)
    # rho axes are (kept ket..., kept bra...)
    return DensityMatrix(rho.reshape(d, d))


def embed_operator(a: np.ndarray, slot: int, dims: Sequence[int]) -> np.ndarray:
    """Kronecker product I x ... x A x ... x I with A at ``slot``."""
    out = np.ones((1, 1), dtype=np.complex128)
    for k, d in enumerate(dims):
        out = np.kron(out, a if k == slot else np.eye(d))
    return out


def dense_expectation(v: FlatState, a: np.ndarray, slot: int) -> complex:
    a = np.asarray(a, dtype=np.complex128)
    if not 0 <= slot < len(v.factors):
        raise DimensionMismatch(f"slot {slot} out of range")
    d = v.dims[slot]
    if a.shape != (d, d):
        raise DimensionMismatch(f"operator must be {d}x{d}, got {a.shape}")
    full = embed_operator(a, slot, v.dims)
    return complex(np.vdot(v.vector, full @ v.vector))


def merge_factors(v: FlatState, first: int, count: int, role: str) -> FlatState:
    """Fuse ``count`` consecutive factors into one (same vector, coarser bookkeeping)."""
    fs = list(v.factors)
    d = math.prod(f.dim for f in fs[first:first + count])
    fs[first:first + count] = [Factor(role, d)]
    return FlatState(v.vector, tuple(fs))


# ----------------------------------------------------------------------------
# explicit apparatus vectors for non-orthogonal pointer states


def pivoted_cholesky(gram: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Matrix ``V`` (rank x n) with ``V^H V = gram`` for a PSD Gram matrix.

    Diagonal pivoting; stops once the remaining diagonal drops below ``tol``,
    so singular (rank-deficient) Gram matrices are fine.
    """
    g = np.array(gram, dtype=np.complex128)
    n = g.shape[0]
    perm = np.arange(n)
    lower = np.zeros((n, n), dtype=np.complex128)
    rank = 0
    for k in range(n):
        diag = np.real(np.diag(g))[k:]
        p = k + int(np.argmax(diag))
        if diag[p - k] <= tol:
            break
        # symmetric swap of rows/cols k and p
        g[[k, p], :] = g[[p, k], :]
        g[:, [k, p]] = g[:, [p, k]]
        lower[[k, p], :k] = lower[[p, k], :k]
        perm[[k, p]] = perm[[p, k]]
        piv = math.sqrt(np.real(g[k, k]))
        lower[k, k] = piv
        lower[k + 1:, k] = g[k + 1:, k] / piv
        g[k + 1:, k + 1:] -= np.outer(lower[k + 1:, k], lower[k + 1:, k].conj())
        rank += 1
    # gram[perm][:, perm] = L L^H  =>  gram = P L L^H P^T
    v = np.zeros((rank, n), dtype=np.complex128)
    v[:, perm] = lower[:, :rank].conj().T
    return v


def apparatus_joint_state(c: np.ndarray, gram: np.ndarray) -> FlatState:
    """sum_i c_i |phi_i>|Phi_i> with explicit apparatus vectors; factors (system, apparatus)."""
    c = np.asarray(c, dtype=np.complex128)
    vecs = pivoted_cholesky(gram)  # column i is |Phi_i>
    joint = c[:, None] * vecs.T
    return FlatState(joint.reshape(-1), (Factor("system", c.size), Factor("apparatus", vecs.shape[0])))
