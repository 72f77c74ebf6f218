import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from hierq import fock_tree
from hierq.documents import StateDocument
from hierq.fock_tree import KINDS, FockNode
from hierq.hier_core import ComponentState, HierState
from hierq.measurement import ApparatusModel
from hierq.tensor_states import ControlledOperator, TensorNode, TreeTensorState, TwoLevelState
from hierq.wavelet import SampledSignal, ScaleField


def rand_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def rand_two_level(rng, macro_dim, micro_dims):
    c = rand_complex(rng, macro_dim, *micro_dims)
    return TwoLevelState(c / np.linalg.norm(c))


def rand_hermitian(rng, n):
    a = rand_complex(rng, n, n)
    return (a + a.conj().T) / 2


def rand_tree_tensor(rng, depth, bond=2, arity=2, macro_dim=2, micro=2):
    """Uniform tree of the given depth; depth 0 is a lone root leaf."""

    def build(level, label, up):
        if level == depth:
            return TensorNode(label, rand_complex(rng, up, micro))
        kids = tuple(build(level + 1, f"{label}{k + 1}", bond) for k in range(arity))
        return TensorNode(label, rand_complex(rng, up, *([bond] * arity)), kids)

    t = TreeTensorState(build(0, "N", macro_dim))
    root = t.root
    return TreeTensorState(TensorNode(root.label, root.tensor / math.sqrt(t.norm_sq()), root.children))


def two_branch(rng, macro_dim=2):
    """C1 -> B1 -> (A11, A12), C1 -> B2 -> (A21, A22); all dims 2."""
    b1 = TensorNode("B1", rand_complex(rng, 2, 2, 2),
                    (TensorNode("A11", rand_complex(rng, 2, 2)), TensorNode("A12", rand_complex(rng, 2, 2))))
    b2 = TensorNode("B2", rand_complex(rng, 2, 2, 2),
                    (TensorNode("A21", rand_complex(rng, 2, 2)), TensorNode("A22", rand_complex(rng, 2, 2))))
    t = TreeTensorState(TensorNode("C1", rand_complex(rng, macro_dim, 2, 2), (b1, b2)))
    return TreeTensorState(TensorNode("C1", t.root.tensor / math.sqrt(t.norm_sq()), (b1, b2)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# ---------------------------------------------------------------------------
# hypothesis strategies for hierarchic trees

finite = st.one_of(st.just(0.0), st.floats(1e-6, 10), st.floats(-10, -1e-6))
complexes = st.builds(complex, finite, finite)


@st.composite
def shapes(draw, max_depth=3, max_dim=4, max_arity=3):
    dim = draw(st.integers(0, max_dim))
    if max_depth == 0:
        return (dim, ())
    n = draw(st.integers(0, max_arity))
    return (dim, tuple(draw(shapes(max_depth - 1, max_dim, max_arity)) for _ in range(n)))


@st.composite
def state_of_shape(draw, shape, prefix="n"):
    dim, kids = shape
    amps = draw(st.lists(complexes, min_size=dim, max_size=dim))
    label = draw(st.sampled_from([prefix, prefix + "x"]))
    children = tuple(draw(state_of_shape(k, f"{prefix}{i}")) for i, k in enumerate(kids))
    return HierState(ComponentState(label, amps), children)


@st.composite
def compatible_pair(draw):
    shape = draw(shapes())
    return draw(state_of_shape(shape)), draw(state_of_shape(shape))


@st.composite
def compatible_triple(draw):
    shape = draw(shapes())
    return tuple(draw(state_of_shape(shape)) for _ in range(3))


hier_states = shapes().flatmap(state_of_shape)


# ---------------------------------------------------------------------------
# random documents of every kind

def rand_hier(rng, depth=2, label="n"):
    dim = int(rng.integers(0, 4))
    kids = () if depth == 0 else tuple(rand_hier(rng, depth - 1, f"{label}{k}") for k in range(rng.integers(0, 3)))
    return HierState(ComponentState(label, rand_complex(rng, dim)), kids)


def rand_fock(rng, depth=3, label="n"):
    kids = () if depth == 0 else tuple(rand_fock(rng, depth - 1, f"{label}{k}") for k in range(rng.integers(0, 3)))
    qn = tuple(rng.choice([Fraction(1, 2), Fraction(-3, 2), 0, 2]) for _ in range(rng.integers(0, 3)))
    return FockNode(label, str(rng.choice(KINDS)), qn, kids)


def rand_payload(rng, kind):
    if kind == "hier":
        return rand_hier(rng)
    if kind == "two_level":
        k = int(rng.integers(1, 4))
        return rand_two_level(rng, int(rng.integers(1, 5)), tuple(int(d) for d in rng.integers(1, 4, size=k)))
    if kind == "tree_tensor":
        return rand_tree_tensor(rng, int(rng.integers(0, 3)), bond=int(rng.integers(1, 3)),
                                arity=int(rng.integers(1, 3)), macro_dim=int(rng.integers(1, 4)))
    if kind == "fock":
        return rng.choice([fock_tree.VACUUM, fock_tree.ZERO, rand_fock(rng), rand_fock(rng)])
    if kind == "signal":
        return SampledSignal(float(rng.normal()), float(rng.uniform(0.01, 1)), rand_complex(rng, int(rng.integers(2, 20))))
    if kind == "matrix":
        n = int(rng.integers(1, 5))
        return rand_complex(rng, n, n)
    if kind == "controlled_operator":
        n = int(rng.integers(1, 4))
        return ControlledOperator(rand_complex(rng, int(rng.integers(1, 4)), n, n))
    if kind == "apparatus":
        n = int(rng.integers(1, 5))
        v = rand_complex(rng, n, n)
        v /= np.linalg.norm(v, axis=0)
        g = v.conj().T @ v
        g = (g + g.conj().T) / 2
        np.fill_diagonal(g, 1.0)
        c = rand_complex(rng, n)
        return (c / np.linalg.norm(c), ApparatusModel(g))
    if kind == "scale_field":
        na, nb = int(rng.integers(2, 5)), int(rng.integers(2, 6))
        low = rand_complex(rng, nb) if rng.random() < 0.5 else None
        return ScaleField(np.sort(rng.uniform(0.1, 4, na)) + np.arange(na) * 1e-3, np.arange(nb) * 0.5 - 1,
                          rand_complex(rng, na, nb), -1.0, 0.5, nb, low)
    raise ValueError(kind)


def rand_document(rng, kind):
    name = None if rng.random() < 0.3 else f"doc-{rng.integers(1000)}"
    comment = None if rng.random() < 0.5 else "random ünïcode \"quoted\""
    extra = {} if rng.random() < 0.5 else {"seed": int(rng.integers(1 << 30)), "tags": ["a", "b"]}
    return StateDocument(kind, rand_payload(rng, kind), name, comment, extra)


# ---------------------------------------------------------------------------
# acceptance report

ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
