"""Test MSE of PCHAL and PCHAR on the benchmark signals d1..d10.

Defaults to a quick slice; pass --dims 1,2,...,10 --ns 200,400,600 for the
full grid (slow on a laptop).
"""

import argparse

from pcha.simulation import run_mse_benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="1,2,3")
    ap.add_argument("--ns", default="200")
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    dims = tuple(int(t) for t in args.dims.split(","))
    ns = tuple(int(t) for t in args.ns.split(","))
    res = run_mse_benchmark(dims, ns, args.reps, seed=0)
    width = max(len(c) for c in res.table_columns)
    print(" " * 7 + "".join(f"{c:>{width + 2}}" for c in res.table_columns))
    for kind, row in res.table.items():
        print(f"{kind:7s}" + "".join(f"{v:>{width + 2}.4f}" for v in row))


if __name__ == "__main__":
    main()
