"""Tree-shaped hierarchic states with componentwise linear algebra.

A :class:`HierState` holds one amplitude vector per entity of the hierarchy.
Linear combination, scalar product and norm act node by node, so two states
can only be combined when their trees have the same shape.  Labels are
bookkeeping and do not take part in the shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import StructureMismatch


def _frozen_vector(amps) -> np.ndarray:
    arr = np.array(amps, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ComponentState:
    """Amplitudes of one named entity.  ``dim == 0`` means the entity has no
    wave function of its own (a collection of parts, not a whole)."""

    label: str
    amps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen_vector(self.amps))

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ComponentState):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.amps, other.amps)

    def __hash__(self):
        return hash((self.label, self.amps.tobytes()))


@dataclass(frozen=True)
class HierState:
    root: ComponentState
    children: tuple[HierState, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    @classmethod
    def build(cls, label: str, amps=(), children: Sequence[HierState] = ()) -> HierState:
        return cls(ComponentState(label, amps), tuple(children))

    def shape(self) -> tuple:
        """Nested ``(dim, (child shapes...))`` tuple; labels are ignored."""
        return (self.root.dim, tuple(c.shape() for c in self.children))

    def nodes(self) -> Iterator[ComponentState]:
        """Pre-order walk over the components."""
        yield self.root
        for child in self.children:
            yield from child.nodes()

    def map_amps(self, fn) -> HierState:
        return HierState(
            ComponentState(self.root.label, fn(self.root.amps)),
            tuple(c.map_amps(fn) for c in self.children),
        )


def compatible(s1: HierState, s2: HierState) -> bool:
    return s1.shape() == s2.shape()


def _check_compatible(s1: HierState, s2: HierState, where: str = "root") -> None:
    if s1.root.dim != s2.root.dim:
        raise StructureMismatch(
            f"component dimension differs at {where}: {s1.root.dim} vs {s2.root.dim}"
        )
    if len(s1.children) != len(s2.children):
        raise StructureMismatch(
            f"arity differs at {where}: {len(s1.children)} vs {len(s2.children)}"
        )
    for k, (c1, c2) in enumerate(zip(s1.children, s2.children)):
        _check_compatible(c1, c2, f"{where}/{k}")


def combined_label(l1: str, l2: str) -> str:
    return l1 if l1 == l2 else f"⟨{l1}|{l2}⟩"


def _combine(a, s1: HierState, b, s2: HierState) -> HierState:
    root = ComponentState(
        combined_label(s1.root.label, s2.root.label),
        a * s1.root.amps + b * s2.root.amps,
    )
    return HierState(root, tuple(_combine(a, c1, b, c2) for c1, c2 in zip(s1.children, s2.children)))


def linear_combine(a: complex, s1: HierState, b: complex, s2: HierState) -> HierState:
    """Return ``a*s1 + b*s2`` computed node by node.

    Raises StructureMismatch if the two trees differ in arity or component
    dimension anywhere, e.g. a whole with an entity-level wave function
    against a bare collection of its parts.
    """
    _check_compatible(s1, s2)
    return _combine(complex(a), s1, complex(b), s2)


def inner_product(s1: HierState, s2: HierState) -> complex:
    """Sum of ``<u|v>`` over corresponding nodes, antilinear in ``s1``."""
    _check_compatible(s1, s2)
    return complex(sum(np.vdot(u.amps, v.amps) for u, v in zip(s1.nodes(), s2.nodes())))


def norm_sq(s: HierState) -> float:
    return float(sum(np.vdot(u.amps, u.amps).real for u in s.nodes()))
