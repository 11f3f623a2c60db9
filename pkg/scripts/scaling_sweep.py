"""Timing sweep: update, query and full-recompute time against n = m.

    python scripts/scaling_sweep.py --sizes 512 1024 2048 4096 --trials 7 --out sweep.csv
"""
import argparse
from dataclasses import dataclass, field

from dyndtw.bench import run_bench, summary, write_csv


@dataclass
class SweepConfig:
    sizes: list = field(default_factory=lambda: [512, 1024, 2048, 4096])
    betas: list = field(default_factory=lambda: [0.5])
    trials: int = 7
    seed: int = 0
    naive: bool = True
    out: str = "sweep.csv"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+")
    ap.add_argument("--betas", type=float, nargs="+")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--no-naive", action="store_true")
    ap.add_argument("--out")
    a = ap.parse_args()
    cfg = SweepConfig()
    for k in ("sizes", "betas", "trials", "seed", "out"):
        if getattr(a, k) is not None:
            setattr(cfg, k, getattr(a, k))
    cfg.naive = not a.no_naive
    recs = run_bench(cfg.sizes, cfg.betas, cfg.trials, cfg.seed, naive=cfg.naive,
                     progress=print)
    write_csv(cfg.out, recs)
    print(f"{len(recs)} records -> {cfg.out}")
    for beta, op, smin, smed in summary(recs):
        print(f"beta={beta:g} {op:13s} slope {smin:.3f} (min)  {smed:.3f} (median)")


if __name__ == "__main__":
    main()
