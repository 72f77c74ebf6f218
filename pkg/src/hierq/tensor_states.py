"""Macro/micro coefficient tensors and the density matrices derived from them.

A two-level state is the tensor ``C[j, i1, ..., ik]``: ``j`` labels the state
of the embracing system and ``i1..ik`` its constituents.  All indices are
0-based; the flattened ordering used for oracle comparisons puts the micro
indices first and the macro index last.

Multi-level hierarchies are tree tensor networks built by nesting the
two-level form.  Averaging over one branch only (a leaf's ancestors and their
other descendants) is a contraction over the tree that never builds the full
state vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotNormalized,
    NumericContractViolation,
    PathInvalid,
)

INPUT_TOL = 1e-8
OUTPUT_TOL = 1e-10

# macro basis order of meson_state: total S_z = +1, 0, -1
MESON_SZ = (1, 0, -1)
UP, DOWN = 0, 1


def _frozen(arr, ndim_min: int = 0) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    if out.ndim < ndim_min:
        raise DimensionMismatch(f"expected at least {ndim_min} axes, got {out.ndim}")
    if not np.all(np.isfinite(out)):
        raise ValueError("entries must be finite")
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix, 2)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the Hermitian part, ascending."""
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return np.linalg.eigvalsh(h)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def violations(self, tol: float = OUTPUT_TOL) -> list[str]:
        """Names of the broken density-matrix invariants (empty when valid)."""
        out = []
        herm = self.hermiticity_error()
        if herm > tol:
            out.append(f"not Hermitian (max |rho - rho^H| = {herm:.3e})")
        w = self.eigenvalues
        if w.size and (w[0] < -tol or w[-1] > 1 + tol):
            out.append(f"eigenvalues outside [0, 1]: [{w[0]:.3e}, {w[-1]:.3e}]")
        if abs(self.trace - 1) > tol:
            out.append(f"trace {self.trace:.17g} != 1")
        return out

    def check(self, tol: float = OUTPUT_TOL) -> DensityMatrix:
        bad = self.violations(tol)
        if bad:
            raise NumericContractViolation("; ".join(bad))
        return self

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)


@dataclass(frozen=True, eq=False)
class TwoLevelState:
    """Coefficient tensor of shape ``(macro_dim, *micro_dims)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs, 2)
        if any(n < 1 for n in c.shape):
            raise DimensionMismatch(f"all dimensions must be >= 1, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def macro_dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def micro_dims(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @property
    def micro_size(self) -> int:
        return math.prod(self.micro_dims)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def is_normalized(self, tol: float = OUTPUT_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def micro_vectors(self) -> np.ndarray:
        """Matrix whose row ``j`` is the micro vector attached to macro state ``j``."""
        return self.coeffs.reshape(self.macro_dim, -1)

    def __eq__(self, other):
        if not isinstance(other, TwoLevelState):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)


def _require_normalized(norm2: float, tol: float = INPUT_TOL) -> None:
    if abs(norm2 - 1.0) > tol:
        raise NotNormalized(f"squared norm {norm2:.17g} deviates from 1 by more than {tol:g}")


def full_micro_density(s: TwoLevelState) -> DensityMatrix:
    """rho[i, i'] = sum_j C[j, i] * conj(C[j, i']) over multi-indices i, i'."""
    _require_normalized(s.norm_sq())
    v = s.micro_vectors()
    return DensityMatrix(v.T @ v.conj()).check()


def reduced_density(s: TwoLevelState, m: int) -> DensityMatrix:
    """Density matrix of micro subsystem ``m`` (0-based), averaged over the
    macro index and every other subsystem."""
    _require_normalized(s.norm_sq())
    k = len(s.micro_dims)
    if not 0 <= m < k:
        raise IndexOutOfRange(f"subsystem {m} not in [0, {k})")
    axis = m + 1
    others = [ax for ax in range(s.coeffs.ndim) if ax != axis]
    rho = np.tensordot(s.coeffs, s.coeffs.conj(), axes=(others, others))
    return DensityMatrix(rho).check()


def _check_square(a: np.ndarray, n: int, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (n, n):
        raise DimensionMismatch(f"{what} must be {n}x{n}, got {a.shape}")
    return a


def is_hermitian(a: np.ndarray, tol: float = OUTPUT_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(np.all(np.abs(a - a.conj().T) <= tol))


def expectation_micro(s: TwoLevelState, a: np.ndarray) -> complex:
    """Tr(rho A) for an operator acting on the whole micro space.

    The raw complex value is returned; for Hermitian ``A`` the imaginary part
    is round-off and callers report the real part.
    """
    a = _check_square(a, s.micro_size, "operator")
    rho = full_micro_density(s).matrix
    return complex(np.sum(rho * a.T))


@dataclass(frozen=True, eq=False)
class ControlledOperator:
    """One micro-space matrix per macro state, stacked as ``(J, D, D)``."""

    matrices: np.ndarray

    def __post_init__(self):
        b = _frozen(self.matrices, 3)
        if b.ndim != 3 or b.shape[1] != b.shape[2]:
            raise DimensionMismatch(f"expected shape (J, D, D), got {b.shape}")
        object.__setattr__(self, "matrices", b)

    @classmethod
    def uniform(cls, a: np.ndarray, macro_dim: int) -> ControlledOperator:
        return cls(np.broadcast_to(np.asarray(a, dtype=np.complex128), (macro_dim, *np.shape(a))))

    @property
    def macro_dim(self) -> int:
        return self.matrices.shape[0]

    @property
    def micro_size(self) -> int:
        return self.matrices.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ControlledOperator):
            return NotImplemented
        return np.array_equal(self.matrices, other.matrices)


def controlled_expectation(s: TwoLevelState, b: ControlledOperator) -> complex:
    """sum_j <C^j| B^j |C^j> where C^j is the micro vector at macro index j."""
    _require_normalized(s.norm_sq())
    if b.macro_dim != s.macro_dim or b.micro_size != s.micro_size:
        raise DimensionMismatch(
            f"operator is {b.macro_dim} x {b.micro_size}^2, state needs "
            f"{s.macro_dim} x {s.micro_size}^2"
        )
    v = s.micro_vectors()
    return complex(np.einsum("ji,jik,jk->", v.conj(), b.matrices, v))


def meson_state(c1: float, c0: float, phases: Sequence[complex] | None = None) -> TwoLevelState:
    """Quark inside a spin-1 pair.

    Macro basis is total S_z = (+1, 0, -1), micro basis (up, down).  The
    four allowed amplitudes are c_{++}, c_{+0}, c_{--}, c_{-0} with moduli
    c1, c0, c1, c0; ``phases`` multiplies them in that order.
    """
    if c1 < 0 or c0 < 0:
        raise ValueError("c1 and c0 are moduli and must be nonnegative")
    total = 2.0 * (c1 * c1 + c0 * c0)
    if abs(total - 1.0) > OUTPUT_TOL:
        raise NotNormalized(f"2(c1^2 + c0^2) = {total:.17g}, expected 1")
    ph = np.ones(4, dtype=np.complex128) if phases is None else np.asarray(phases, dtype=np.complex128)
    if ph.shape != (4,) or np.any(np.abs(np.abs(ph) - 1.0) > OUTPUT_TOL):
        raise ValueError("phases must be four unit-modulus factors")
    c = np.zeros((3, 2), dtype=np.complex128)
    c[0, UP] = c1 * ph[0]
    c[1, UP] = c0 * ph[1]
    c[2, DOWN] = c1 * ph[2]
    c[1, DOWN] = c0 * ph[3]
    return TwoLevelState(c)


# ----------------------------------------------------------------------------
# tree tensor states


@dataclass(frozen=True, eq=False)
class TensorNode:
    """Axis 0 faces the parent (the macro index at the root).  Internal nodes
    have one further axis per child, in order; leaves have exactly one micro
    axis."""

    label: str
    tensor: np.ndarray
    children: tuple[TensorNode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        t = _frozen(self.tensor, 1)
        object.__setattr__(self, "tensor", t)
        want = 1 + (len(self.children) if self.children else 1)
        if t.ndim != want:
            kind = "internal node" if self.children else "leaf"
            raise DimensionMismatch(
                f"{kind} {self.label!r} needs a {want}-axis tensor, got shape {t.shape}"
            )
        for k, child in enumerate(self.children):
            if child.tensor.shape[0] != t.shape[k + 1]:
                raise DimensionMismatch(
                    f"bond {self.label!r}->{child.label!r}: {t.shape[k + 1]} vs {child.tensor.shape[0]}"
                )

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __eq__(self, other):
        if not isinstance(other, TensorNode):
            return NotImplemented
        return (
            self.label == other.label
            and self.tensor.shape == other.tensor.shape
            and np.array_equal(self.tensor, other.tensor)
            and self.children == other.children
        )


@dataclass(frozen=True)
class TreeTensorState:
    root: TensorNode

    @property
    def macro_dim(self) -> int:
        return self.root.tensor.shape[0]

    def leaves(self) -> list[tuple[tuple[int, ...], TensorNode]]:
        """(path, leaf) pairs in depth-first, left-to-right order."""
        out = []

        def walk(node, path):
            if node.is_leaf:
                out.append((path, node))
            for k, child in enumerate(node.children):
                walk(child, path + (k,))

        walk(self.root, ())
        return out

    def leaf_dims(self) -> tuple[int, ...]:
        return tuple(leaf.tensor.shape[1] for _, leaf in self.leaves())

    def node_at(self, path: Sequence[int]) -> TensorNode:
        node = self.root
        for depth, k in enumerate(path):
            if not 0 <= k < len(node.children):
                raise PathInvalid(f"no child {k} at depth {depth} (node {node.label!r})")
            node = node.children[k]
        return node

    def norm_sq(self) -> float:
        env = _environment(self.root)
        return float(np.real(np.trace(env)))

    @classmethod
    def from_two_level(cls, s: TwoLevelState, labels: Sequence[str] | None = None) -> TreeTensorState:
        """Root carries C unchanged; each micro index gets an identity leaf."""
        k = len(s.micro_dims)
        labels = list(labels) if labels is not None else [f"A{m + 1}" for m in range(k)]
        leaves = tuple(
            TensorNode(labels[m], np.eye(d, dtype=np.complex128)) for m, d in enumerate(s.micro_dims)
        )
        return cls(TensorNode("B", s.coeffs, leaves))


def _pair(tensor: np.ndarray, mats: dict[int, np.ndarray], keep: int) -> np.ndarray:
    """sum over all axes but ``keep`` of T[..] M[.,.'] conj(T[..']).

    ``mats`` attaches a bra-ket matrix to some axes; the remaining summed
    axes are paired by identity.  Returns a matrix on the ``keep`` axis with
    the ket index first.
    """
    t = tensor
    for ax in sorted(mats):
        t = np.moveaxis(np.tensordot(t, mats[ax], axes=([ax], [0])), -1, ax)
    others = [ax for ax in range(tensor.ndim) if ax != keep]
    return np.tensordot(t, tensor.conj(), axes=(others, others))


def _environment(node: TensorNode) -> np.ndarray:
    """Bond matrix E[a, a'] of a subtree with all of its micro indices summed."""
    if node.is_leaf:
        return _pair(node.tensor, {}, keep=0)
    mats = {k + 1: _environment(child) for k, child in enumerate(node.children)}
    return _pair(node.tensor, mats, keep=0)


def branch_reduced_density(t: TreeTensorState, leaf_path: Sequence[int]) -> DensityMatrix:
    """Density matrix of one leaf, averaged over the branch above it.

    Sibling subtrees are reduced to bond matrices leaves-to-root; the walk
    then descends from the root along ``leaf_path`` carrying one bond matrix.
    """
    leaf_path = tuple(leaf_path)
    target = t.node_at(leaf_path)
    if not target.is_leaf:
        raise PathInvalid(f"path {leaf_path} addresses internal node {target.label!r}")
    _require_normalized(t.norm_sq())

    node = t.root
    top = np.eye(t.macro_dim, dtype=np.complex128)
    for k in leaf_path:
        mats = {0: top}
        for q, child in enumerate(node.children):
            if q != k:
                mats[q + 1] = _environment(child)
        top = _pair(node.tensor, mats, keep=k + 1)
        node = node.children[k]
    rho = _pair(node.tensor, {0: top}, keep=1)
    return DensityMatrix(rho).check()
