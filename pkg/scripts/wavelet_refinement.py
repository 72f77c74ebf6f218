"""Scale-grid refinement study for the wavelet norm identity and round trip.

    python scripts/wavelet_refinement.py [--counts 16 32 64] [--no-lowpass]
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from hierq.wavelet import (
    SampledSignal,
    admissibility_constant,
    forward_cwt,
    get_wavelet,
    inverse_cwt,
    log_scales,
    parseval_ratio,
    relative_l2_error,
)


@dataclass
class RefinementConfig:
    n: int = 1024
    dx: float = 0.05
    width: float = 1.0
    wavelet: str = "mexican_hat"
    counts: tuple[int, ...] = (16, 32, 64)
    lowpass: bool = True


def run(cfg: RefinementConfig) -> list[dict]:
    w = get_wavelet(cfg.wavelet)
    c_psi = admissibility_constant(w)
    f = SampledSignal.from_function(
        lambda x: np.exp(-0.5 * (x / cfg.width) ** 2), -cfg.dx * (cfg.n // 2), cfg.dx, cfg.n
    )
    rows = []
    for count in cfg.counts:
        t0 = time.perf_counter()
        field = forward_cwt(f, w, log_scales(f, count), lowpass=cfg.lowpass)
        back = inverse_cwt(field, w, c_psi)
        rows.append({
            "scales": count,
            "ratio_dev": abs(parseval_ratio(f, field) / c_psi - 1),
            "l2_err": relative_l2_error(f, back),
            "seconds": time.perf_counter() - t0,
        })
    return rows


def main(cfg: RefinementConfig) -> None:
    rows = run(cfg)
    print(f"wavelet={cfg.wavelet} N={cfg.n} dx={cfg.dx} lowpass={cfg.lowpass}")
    print(f"{'scales':>7} {'|ratio/C - 1|':>14} {'rel L2 err':>12} {'time [s]':>9}")
    for r in rows:
        print(f"{r['scales']:>7d} {r['ratio_dev']:>14.3e} {r['l2_err']:>12.3e} {r['seconds']:>9.2f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--counts", type=int, nargs="+", default=list(RefinementConfig.counts))
    ap.add_argument("--n", type=int, default=RefinementConfig.n)
    ap.add_argument("--dx", type=float, default=RefinementConfig.dx)
    ap.add_argument("--no-lowpass", action="store_true")
    a = ap.parse_args()
    main(RefinementConfig(n=a.n, dx=a.dx, counts=tuple(a.counts), lowpass=not a.no_lowpass))
