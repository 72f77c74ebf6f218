"""Occupation trees: creation/annihilation of entities inside entities.

A basis ket is one of two sentinels (VACUUM and the absorbing ZERO) or a
tree recording which entities exist and which contains which.  Paths address
nodes by label from the root, e.g. ``("B", "A1")``.  Children are kept
sorted by label so identical operation sequences give identical trees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Sequence, Union

from .errors import DuplicateSibling, PathInvalid

KINDS = ("fermion", "boson", "composite")


class Special(enum.Enum):
    VACUUM = "vacuum"
    ZERO = "zero"

    def __repr__(self):
        return self.name


VACUUM = Special.VACUUM
ZERO = Special.ZERO
ROOT: tuple[str, ...] = ()

QNumber = Union[int, Fraction]


def _qnum(q) -> QNumber:
    if isinstance(q, bool) or isinstance(q, float):
        raise TypeError(f"quantum numbers must be int or Fraction, got {q!r}")
    if isinstance(q, str):
        q = Fraction(q)
    if isinstance(q, Fraction):
        return int(q) if q.denominator == 1 else q
    if isinstance(q, int):
        return q
    raise TypeError(f"quantum numbers must be int or Fraction, got {q!r}")


@dataclass(frozen=True)
class FockNode:
    label: str
    kind: str = "composite"
    qnumbers: tuple[QNumber, ...] = ()
    children: tuple[FockNode, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "qnumbers", tuple(_qnum(q) for q in self.qnumbers))
        kids = tuple(sorted(self.children, key=lambda c: c.label))
        labels = [c.label for c in kids]
        if len(set(labels)) != len(labels):
            raise DuplicateSibling(f"duplicate child labels under {self.label!r}: {labels}")
        object.__setattr__(self, "children", kids)

    def child(self, label: str) -> FockNode | None:
        for c in self.children:
            if c.label == label:
                return c
        return None


OccupationTree = Union[FockNode, Special]


def _replace_at(node: FockNode, path: Sequence[str], fn) -> FockNode:
    """Rebuild ``node`` with ``fn`` applied to the descendant at relative ``path``."""
    if not path:
        return fn(node)
    head, rest = path[0], path[1:]
    target = node.child(head)
    if target is None:
        raise PathInvalid(f"{node.label!r} has no child {head!r}")
    kids = [(_replace_at(c, rest, fn) if c.label == head else c) for c in node.children]
    return replace(node, children=tuple(kids))


def apply_creation(
    t: OccupationTree,
    parent_path: Sequence[str] | None,
    label: str,
    kind: str = "composite",
    qnumbers: Sequence = (),
) -> OccupationTree:
    """a+(label) under ``parent_path``; ``ROOT`` (or None) creates the top entity."""
    if t is ZERO:
        return ZERO
    new = FockNode(label, kind, tuple(qnumbers))
    parent_path = tuple(parent_path or ())
    if t is VACUUM:
        if parent_path:
            raise PathInvalid(f"vacuum has no node {'/'.join(parent_path)!r}")
        return new
    if not parent_path:
        raise PathInvalid("a top-level entity already exists; give a parent path")
    if parent_path[0] != t.label:
        raise PathInvalid(f"path starts at {parent_path[0]!r}, root is {t.label!r}")

    def attach(parent: FockNode) -> FockNode:
        if parent.child(label) is not None:
            raise DuplicateSibling(f"{parent.label!r} already contains {label!r}")
        return replace(parent, children=parent.children + (new,))

    return _replace_at(t, parent_path[1:], attach)


def _remove(node: FockNode) -> FockNode | Special | None:
    """What replaces ``node`` when it is annihilated: nothing (leaf), its only
    child, or ZERO when the rule is undefined (two or more children)."""
    if not node.children:
        return None
    if len(node.children) == 1:
        return node.children[0]
    return ZERO


def apply_annihilation(t: OccupationTree, path: Sequence[str]) -> OccupationTree:
    """a(label) at ``path``.

    Annihilating something that is not there gives ZERO rather than an
    error, as does removing a node that contains several entities.
    """
    path = tuple(path)
    if t is ZERO or t is VACUUM or not path or path[0] != t.label:
        return ZERO
    if len(path) == 1:
        out = _remove(t)
        return VACUUM if out is None else out

    *parent_rel, target = path[1:]
    node = t
    for step in parent_rel:
        node = node.child(step)
        if node is None:
            return ZERO
    victim = node.child(target)
    if victim is None:
        return ZERO
    out = _remove(victim)
    if out is ZERO:
        return ZERO
    if out is not None and node.child(out.label) is not None and out.label != target:
        return ZERO

    def detach(parent: FockNode) -> FockNode:
        kids = [c for c in parent.children if c.label != target]
        if out is not None:
            kids.append(out)
        return replace(parent, children=tuple(kids))

    return _replace_at(t, tuple(parent_rel), detach)


@dataclass(frozen=True, order=True)
class Violation:
    parent_path: tuple[str, ...]
    label1: str
    label2: str


def pauli_check(t: OccupationTree) -> list[Violation]:
    """Sibling fermions sharing all quantum numbers.

    Fermions under different parents may coincide, and bosons and composites
    are never flagged.  The vacuum and the zero vector have no violations.
    """
    if isinstance(t, Special):
        return []
    out: list[Violation] = []

    def walk(node: FockNode, path: tuple[str, ...]):
        fermions = [c for c in node.children if c.kind == "fermion"]
        for f1, f2 in combinations(fermions, 2):
            if f1.qnumbers == f2.qnumbers:
                l1, l2 = sorted((f1.label, f2.label))
                out.append(Violation(path, l1, l2))
        for c in node.children:
            walk(c, path + (c.label,))

    walk(t, (t.label,))
    return sorted(out)


def node(label: str, kind: str = "composite", qnumbers: Sequence = (), children: Sequence[FockNode] = ()) -> FockNode:
    return FockNode(label, kind, tuple(qnumbers), tuple(children))
