"""Purity and coherence of the system density as the pointer overlap varies.

    python scripts/decoherence_sweep.py [--points 11] [--seed 0]
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from hierq.measurement import ApparatusModel, entangle, trace_out_apparatus


@dataclass
class SweepConfig:
    points: int = 11
    seed: int = 0
    phase: float = 0.0


def run(cfg: SweepConfig) -> list[tuple[float, float, float]]:
    rng = np.random.default_rng(cfg.seed)
    c = rng.normal(size=2) + 1j * rng.normal(size=2)
    c /= np.linalg.norm(c)
    rows = []
    for g in np.linspace(0.0, 1.0, cfg.points):
        rho = trace_out_apparatus(entangle(c, ApparatusModel.two_state(g * np.exp(1j * cfg.phase))))
        rows.append((float(g), rho.purity, float(abs(rho.matrix[0, 1]))))
    return rows


def main(cfg: SweepConfig) -> None:
    print(f"{'|<Phi1|Phi2>|':>14} {'purity':>9} {'|rho_12|':>9}")
    for g, purity, coh in run(cfg):
        print(f"{g:>14.2f} {purity:>9.5f} {coh:>9.5f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=SweepConfig.points)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--phase", type=float, default=SweepConfig.phase)
    a = ap.parse_args()
    main(SweepConfig(a.points, a.seed, a.phase))
