"""Regenerate the documents and golden CLI outputs under data/.

    python scripts/make_golden.py [--out data]
"""

from __future__ import annotations

import argparse
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hierq import cli
from hierq.documents import StateDocument, serialize
from hierq.fock_tree import node
from hierq.hier_core import HierState
from hierq.tensor_states import TensorNode, TreeTensorState, meson_state


@dataclass
class GoldenConfig:
    out: Path = Path("data")
    seed: int = 20031
    c1: float = 0.5
    c0: float = 0.5


def two_branch_tree(rng: np.random.Generator, macro_dim: int = 2) -> TreeTensorState:
    """C1 -> (B1 -> A11, A12), (B2 -> A21, A22), every index of dimension 2."""

    def rand(*shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    def leaf(label):
        return TensorNode(label, rand(2, 2))

    b1 = TensorNode("B1", rand(2, 2, 2), (leaf("A11"), leaf("A12")))
    b2 = TensorNode("B2", rand(2, 2, 2), (leaf("A21"), leaf("A22")))
    t = TreeTensorState(TensorNode("C1", rand(macro_dim, 2, 2), (b1, b2)))
    scale = np.sqrt(t.norm_sq())
    return TreeTensorState(TensorNode("C1", t.root.tensor / scale, (b1, b2)))


def alive_dead() -> tuple[HierState, HierState]:
    parts = lambda: (HierState.build("head", [1, 0]), HierState.build("tail", [0, 1]))
    alive = HierState.build("cat", np.array([1, 1]) / np.sqrt(2), parts())
    dead = HierState.build("cat", [], parts())
    return alive, dead


def _cli(argv) -> str:
    buf = io.StringIO()
    code = cli.run(argv, stdout=buf)
    if code != 0:
        raise RuntimeError(f"{argv} exited {code}: {buf.getvalue()}")
    return buf.getvalue()


def main(cfg: GoldenConfig) -> None:
    rng = np.random.default_rng(cfg.seed)
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    alive, dead = alive_dead()
    zero = HierState.build("B", [0, 0], [HierState.build("A1", [0]), HierState.build("A2", [0, 0, 0])])
    fock = node("C1", children=[
        node("B1", children=[node("A11", "fermion", ["1/2"]), node("A12", "fermion", ["1/2"])]),
        node("B2", children=[node("A21", "fermion", ["1/2"]), node("A22", "fermion", ["-1/2"])]),
    ])
    docs = {
        "meson.json": StateDocument("two_level", meson_state(cfg.c1, cfg.c0), name="meson",
                                    comment="macro S_z = +1, 0, -1; quark up, down; c1 = c0 = 1/2"),
        "two_branch_tree.json": StateDocument("tree_tensor", two_branch_tree(rng), name="two-branch",
                                        comment="C1 > B1 > (A11, A12), C1 > B2 > (A21, A22)"),
        "alive.json": StateDocument("hier", alive, name="alive cat"),
        "dead.json": StateDocument("hier", dead, name="dead cat"),
        "zero_hier.json": StateDocument("hier", zero, name="zero"),
        "two_branch_fock.json": StateDocument("fock", fock, name="two-branch fermions"),
        "sigma_z.json": StateDocument("matrix", np.diag([1.0, -1.0]).astype(complex), name="sigma_z"),
    }
    for fname, doc in docs.items():
        (out / fname).write_text(serialize(doc), encoding="utf-8")

    goldens = {
        "meson_reduce.golden.json": ["reduce", "--input", str(out / "meson.json"), "--subsystem", "1"],
        "two_branch_reduce_A11.golden.json": ["reduce", "--input", str(out / "two_branch_tree.json"), "--path", "0/0"],
    }
    for fname, argv in goldens.items():
        (out / fname).write_text(_cli(argv), encoding="utf-8")
    print(f"wrote {len(docs) + len(goldens)} files to {out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=GoldenConfig.out)
    main(GoldenConfig(out=ap.parse_args().out))
