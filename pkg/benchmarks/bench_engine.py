"""Compare the pure-Python and compiled engines on the same configurations.

    python benchmarks/bench_engine.py [--n 81 225] [--slots 20000] [--repeat 3]

Both backends must produce identical records and counters; the script exits
non-zero if they do not.
"""

import argparse
import sys
import time

import numpy as np

from coded_relay.sim import HAVE_COMPILED, SimConfig, run_output


def timed(cfg, backend, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = run_output(cfg, backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    return (np.array_equal(a.records, b.records) and np.array_equal(a.backlog, b.backlog)
            and a.counters == b.counters)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[81, 225])
    ap.add_argument("--slots", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scheme", default="2hrrsc", choices=["2hrrsc", "2hop"])
    args = ap.parse_args(argv)

    if not HAVE_COMPILED:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1

    print(f"{'n':>5} {'slots':>7} {'python s':>9} {'compiled s':>10} {'py slots/s':>11} "
          f"{'c slots/s':>11} {'speedup':>8}  match")
    bad = 0
    for n in args.n:
        cfg = SimConfig(n=n, scheme=args.scheme, horizon=args.slots, warmup=args.slots // 10, seed=1)
        tp, op = timed(cfg, "python", args.repeat)
        tc, oc = timed(cfg, "compiled", args.repeat)
        ok = same(op, oc)
        bad += not ok
        slots = op.end_slot
        print(f"{n:>5} {slots:>7} {tp:>9.3f} {tc:>10.4f} {slots / tp:>11.0f} {slots / tc:>11.0f} "
              f"{tp / tc:>7.1f}x  {'yes' if ok else 'NO'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
