"""Run many seeded fuzz cases; save minimized failures to --out-dir."""
import argparse
import os
import random
from dataclasses import dataclass

from dyndtw.fuzz import minimize, random_case, run_case, save_case


@dataclass
class FuzzSweepConfig:
    seeds: int = 50
    ops: int = 200
    max_len: int = 64
    mode: str = "exact"
    metric: str = "L1"
    dim: int = 1
    deamortized: bool = False
    out_dir: str = "fuzz-failures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--ops", type=int, default=200)
    ap.add_argument("--max-len", type=int, default=64)
    ap.add_argument("--mode", default="exact")
    ap.add_argument("--metric", default="L1")
    ap.add_argument("--dim", type=int, default=1)
    ap.add_argument("--deamortized", action="store_true")
    ap.add_argument("--out-dir", default="fuzz-failures")
    cfg = FuzzSweepConfig(**vars(ap.parse_args()))
    failures = 0
    for seed in range(cfg.seeds):
        for beta in (0, 0.25, 0.5):
            case = random_case(random.Random(seed), cfg.ops, cfg.max_len, beta, cfg.mode,
                               cfg.metric, cfg.dim, cfg.deamortized)
            res = run_case(case, log=False)
            if not res.ok:
                failures += 1
                os.makedirs(cfg.out_dir, exist_ok=True)
                path = os.path.join(cfg.out_dir, f"seed{seed}_beta{beta}.json")
                save_case(path, minimize(case))
                print(f"seed {seed} beta {beta}: mismatch after {res.failed_at} edits -> {path}")
    print(f"{cfg.seeds * 3} cases, {failures} failures")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
