"""Round-trip random Intermediary instances through DTW, static and dynamic.

Prints per-instance failures and a tally; exit status 1 on any mismatch.
"""
import argparse
import random
import sys
import time
from dataclasses import dataclass

from dyndtw import INF, dtw
from dyndtw.dynamic import DynamicDtw
from dyndtw.intermediary import (apply_update_to_curves, random_instance, recover_answer,
                                 reduction_curves, solve_direct, update)


@dataclass
class ReductionConfig:
    instances: int = 200
    updates: int = 20
    max_side: int = 6
    max_id: int = 4
    max_d: int = 8
    beta: float = 0.5
    seed: int = 0


def run(cfg: ReductionConfig) -> int:
    rng = random.Random(cfg.seed)
    bad = inf = checks = 0
    for t in range(cfg.instances):
        inst = random_instance(rng, cfg.max_side, cfg.max_id, cfg.max_d)
        pair = reduction_curves(inst)
        ds = DynamicDtw(pair.P, pair.Q, beta=cfg.beta)
        for k in range(cfg.updates + 1):
            if k:
                j, x = rng.randrange(inst.n_c), rng.random() < 0.5
                update(inst, j, x)
                for e in apply_update_to_curves(pair, inst, j, x):
                    ds.update(e)
            want = solve_direct(inst)
            static = recover_answer(dtw(pair.P, pair.Q), inst)
            dynamic = recover_answer(ds.query(), inst)
            checks += 1
            inf += want is INF
            if not static == dynamic == want:
                bad += 1
                print(f"instance {t} step {k}: direct={want} static={static} dynamic={dynamic}")
    print(f"{checks} checks, {inf} infinite, {bad} mismatches")
    return bad


def main():
    ap = argparse.ArgumentParser()
    for k, v in vars(ReductionConfig()).items():
        ap.add_argument("--" + k.replace("_", "-"), type=type(v), default=v)
    cfg = ReductionConfig(**vars(ap.parse_args()))
    t = time.perf_counter()
    bad = run(cfg)
    print(f"{time.perf_counter() - t:.1f}s")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
