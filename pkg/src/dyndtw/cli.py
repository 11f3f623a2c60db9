"""Command line: dyndtw static|fuzz|bench|reduce|intermediary-solve.

Exit codes: 0 success, 1 a check failed (fuzz mismatch, reduce FAIL),
2 bad input (unparsable files, broken invariants, unwritable output).
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from . import bench, fuzz
from .errors import (DimensionError, EmptyCurveError, InvalidInstanceError,
                     ReductionInconsistencyError, UnsupportedMetricError)
from .intermediary import (apply_update_to_curves, build_curves, load_instance, random_instance,
                           recover_answer, reduction_curves, solve_direct, update)
from .metric import EXACT, FLOAT, Curve, format_scalar, write_curves
from .oracle import dtw, dtw_witness


class InputError(Exception):
    pass


def _first_curves(path, mode):
    curves = []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                obj = json.loads(line)
                if not isinstance(obj, dict) or obj.get("side") not in ("P", "Q") or "coords" not in obj:
                    raise InputError(f"{path}:{lineno}: expected {{\"side\": \"P\"|\"Q\", \"coords\": [...]}}")
                curves.append((obj["side"], Curve(tuple(obj["coords"]), mode)))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: {e}") from None
    if not curves:
        raise InputError(f"{path}: no curves")
    return curves


def load_pair(files, mode):
    """One file: its P and Q.  Two files: the first curve of each."""
    if len(files) == 1:
        got = dict(_first_curves(files[0], mode))
        if set(got) != {"P", "Q"}:
            raise InputError(f"{files[0]}: need both a P and a Q curve")
        return got["P"], got["Q"]
    if len(files) == 2:
        return _first_curves(files[0], mode)[0][1], _first_curves(files[1], mode)[0][1]
    raise InputError("give one file with P and Q, or two curve files")


def cmd_static(a) -> int:
    P, Q = load_pair(a.files, a.mode)
    if a.witness:
        v, T = dtw_witness(P, Q, a.metric)
        print(format_scalar(v))
        print(" ".join(f"{i},{j}" for i, j in T))
    else:
        print(format_scalar(dtw(P, Q, a.metric)))
    return 0


def cmd_fuzz(a) -> int:
    if a.replay:
        case = fuzz.load_case(a.replay)
    else:
        if a.ops < 0 or a.max_len < 1:
            raise InputError("--ops must be >= 0 and --max-len >= 1")
        case = fuzz.random_case(random.Random(a.seed), a.ops, a.max_len, a.beta, a.mode,
                                a.metric, a.dim, a.deamortized)
    res = fuzz.run_case(case)
    if a.log:
        with open(a.log, "w") as fh:
            fh.write("\n".join(res.log) + ("\n" if res.log else ""))
    elif a.verbose:
        print("\n".join(res.log))
    if res.ok:
        print(f"{res.checks} checks")
        return 0
    small = fuzz.minimize(case)
    print(f"MISMATCH after {res.failed_at} edits; minimized to {len(small.edits)} edits", file=sys.stderr)
    print(json.dumps(small.to_json()))
    if a.save:
        fuzz.save_case(a.save, small)
        print(f"replay with: dyndtw fuzz --replay {a.save}", file=sys.stderr)
    return 1


def cmd_bench(a) -> int:
    try:
        fh = open(a.out, "w")
        fh.close()
    except OSError as e:
        raise InputError(f"cannot write {a.out}: {e}") from None
    say = (lambda s: print(s, file=sys.stderr)) if a.verbose else None
    recs = bench.run_bench(a.sizes, a.beta_list, a.trials, a.seed, naive=a.naive,
                           metric=a.metric, progress=say)
    bench.write_csv(a.out, recs)
    print(f"wrote {len(recs)} records to {a.out}")
    print("slopes (log wall time vs log n, least squares)")
    print("beta op min-fit median-fit")
    for beta, op, smin, smed in bench.summary(recs):
        print(f"{beta:g} {op} {smin:.3f} {smed:.3f}")
    return 0


def _verify(inst, steps, rng, dynamic, beta, out) -> bool:
    pair = reduction_curves(inst)
    ds = None
    if dynamic:
        from .dynamic import DynamicDtw
        ds = DynamicDtw(pair.P, pair.Q, "L1", beta)
    ok = True
    for k in range(steps + 1):
        if k:
            j = rng.randrange(inst.n_c)
            x = rng.random() < 0.5
            update(inst, j, x)
            edits = apply_update_to_curves(pair, inst, j, x)
            if ds is not None:
                for e in edits:
                    ds.update(e)
        v = ds.query() if ds is not None else dtw(pair.P, pair.Q)
        got, want = recover_answer(v, inst), solve_direct(inst)
        good = got == want
        ok &= good
        out(f"step {k}: {'PASS' if good else 'FAIL'} recovered={format_scalar(got)} direct={format_scalar(want)}")
    return ok


def cmd_reduce(a) -> int:
    if a.emit == "curves":
        if a.instance is None or a.out is None:
            raise InputError("--emit curves needs an instance file and --out")
        inst = load_instance(a.instance)
        pair = build_curves(inst) if a.variant == "full" else reduction_curves(inst)
        try:
            write_curves(a.out, pair.P, pair.Q)
        except OSError as e:
            raise InputError(f"cannot write {a.out}: {e}") from None
        print(f"wrote |P|={len(pair.P)} |Q|={len(pair.Q)} to {a.out}")
        return 0
    rng = random.Random(a.seed)
    if a.instance is not None:
        insts = [load_instance(a.instance)]
    else:
        insts = [random_instance(rng) for _ in range(a.random)]
    out = print if a.verbose or a.instance is not None else (lambda s: None)
    bad = 0
    for t, inst in enumerate(insts):
        if len(insts) > 1:
            out(f"instance {t}: n_r={inst.n_r} n_c={inst.n_c} U={inst.U}")
        bad += not _verify(inst, a.updates, rng, a.dynamic, a.beta, out)
    print(f"{'PASS' if not bad else 'FAIL'}: {len(insts) - bad}/{len(insts)} instances")
    return 0 if not bad else 1


def cmd_solve(a) -> int:
    inst = load_instance(a.instance)
    for j, x in a.update or ():
        update(inst, int(j), x not in ("0", "false", "False"))
    print(format_scalar(solve_direct(inst)))
    return 0


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dyndtw", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("static", help="DTW of two curves")
    s.add_argument("files", nargs="+")
    s.add_argument("--metric", default="L1")
    s.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)
    s.add_argument("--witness", action="store_true", help="also print an optimal traversal")
    s.set_defaults(fn=cmd_static)

    s = sub.add_parser("fuzz", help="dynamic structure vs oracle on random edits")
    s.add_argument("--ops", type=int, default=100)
    s.add_argument("--max-len", type=int, default=32)
    s.add_argument("--beta", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--metric", default="L1")
    s.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--deamortized", action="store_true")
    s.add_argument("--log", help="write the per-step log here")
    s.add_argument("--save", help="write a minimized failing case here")
    s.add_argument("--replay", help="run a saved case instead of a random one")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(fn=cmd_fuzz)

    s = sub.add_parser("bench", help="timing sweep, CSV out")
    s.add_argument("--beta-list", type=float, nargs="+", default=[0.5])
    s.add_argument("--sizes", type=int, nargs="+", required=True)
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--metric", default="L1")
    s.add_argument("--naive", action="store_true", help="also time full recomputation (op=naive)")
    s.add_argument("--out", required=True)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(fn=cmd_bench)

    s = sub.add_parser("reduce", help="Intermediary instance to curves, or round-trip check")
    s.add_argument("instance", nargs="?")
    s.add_argument("--emit", choices=("curves", "verify"), default="verify")
    s.add_argument("--variant", choices=("full", "aligned"), default="aligned")
    s.add_argument("--out")
    s.add_argument("--random", type=int, default=200, help="instances to draw when no file is given")
    s.add_argument("--updates", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dynamic", action="store_true", help="answer with the dynamic structure")
    s.add_argument("--beta", type=float, default=0.5)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(fn=cmd_reduce)

    s = sub.add_parser("intermediary-solve", help="solve an instance directly")
    s.add_argument("instance")
    s.add_argument("--update", nargs=2, action="append", metavar=("J", "X"),
                   help="set b_J := X (0-based column) before solving")
    s.set_defaults(fn=cmd_solve)
    return p


BAD_INPUT = (InputError, ValueError, KeyError, TypeError, OSError, DimensionError, EmptyCurveError,
             InvalidInstanceError, UnsupportedMetricError, IndexError)


def main(argv=None) -> int:
    a = parser().parse_args(argv)
    try:
        return a.fn(a)
    except ReductionInconsistencyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except BAD_INPUT as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
