"""Command-line front end: ``pcha fit | predict | tune | simulate | bench``.

Exit codes: 0 success, 2 usage error, 3 data or model-file error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
import traceback

import numpy as np

from .data import load_covariates_csv, load_csv, make_folds, scale_apply, scale_fit
from .design import build_design
from .errors import DataError, NumericError
from .estimators import predict
from .kernel import KernelConfig, center_gram, gram
from .modelio import load_model, save_model
from .spectral import eig_sym
from .tuning import TuningGrid, profile_m, tune

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
THREADS_ENV = "HAKERNEL_THREADS"


def _parse_lambdas(text):
    """``lo:hi:count`` (log10 exponents) or a comma-separated list."""
    if text is None:
        return None
    if text.count(":") == 2:
        lo, hi, cnt = text.split(":")
        return tuple(np.logspace(float(lo), float(hi), int(cnt)))
    return tuple(float(t) for t in text.split(","))


def _parse_ks(text):
    """``lo:hi`` inclusive range or a comma-separated list."""
    if text is None:
        return None
    if ":" in text:
        lo, hi = text.split(":")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(t) for t in text.split(","))


def _grid(args):
    try:
        return TuningGrid(k_candidates=_parse_ks(args.k_grid),
                          lambda_grid=_parse_lambdas(args.lambda_grid) or TuningGrid().lambda_grid,
                          m_max=args.m_max, V=args.folds)
    except ValueError as exc:
        raise _Usage(f"bad grid specification: {exc}") from exc


class _Usage(Exception):
    pass


def _write_matrix(path, M, header=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        for row in np.atleast_2d(M):
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else int(v)
                        for v in row])


def _apply_threads(requested):
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        requested = int(env) if env else None
    if requested is not None:
        import numba
        numba.set_num_threads(max(1, min(int(requested), numba.config.NUMBA_NUM_THREADS)))


def _diagnostics(args, model):
    Xs = model.X_train
    if args.dump_spectrum:
        G = center_gram(gram(Xs, KernelConfig(model.m)))
        spec = eig_sym(G)
        with open(args.dump_spectrum, "w") as fh:
            fh.write("component,eigenvalue\n")
            for j, dj in enumerate(spec.D, start=1):
                fh.write(f"{j},{float(dj)!r}\n")
    if args.dump_gram:
        _write_matrix(args.dump_gram, gram(Xs, KernelConfig(model.m)).K)
    if args.dump_design:
        _write_matrix(args.dump_design, build_design(Xs, Xs, model.m))


def cmd_fit(args) -> int:
    data = load_csv(args.train, args.response)
    grid = _grid(args)
    model, report = tune(data, args.kind, grid, seed=args.seed, m=args.m,
                         select_k_by=args.select_k_by)
    save_model(model, args.output)
    if args.report:
        report.to_csv(args.report)
    _diagnostics(args, model)
    print(report.summary())
    return EXIT_OK


def cmd_tune(args) -> int:
    data = load_csv(args.train, args.response)
    grid = _grid(args)
    scaled = scale_apply(scale_fit(data), data)
    folds = make_folds(data.n, grid.V, args.seed)
    report = profile_m(scaled, grid, folds, args.kind,
                       m_values=None if args.m is None else [args.m],
                       select_k_by=args.select_k_by)
    report.to_csv(args.output)
    print(report.summary())
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model)
    X, _ = load_covariates_csv(args.new, model.feature_names)
    if X.shape[1] != model.d:
        raise DataError(f"predict: model expects {model.d} features, file has {X.shape[1]}")
    clamped = model.scaler.out_of_range(X) if X.shape[0] else 0
    preds = predict(model, X) if X.shape[0] else np.zeros(0)
    with open(args.output, "w", newline="") as fh:
        fh.write("prediction\n")
        for p in preds:
            fh.write(f"{float(p)!r}\n")
    if clamped:
        print(f"warning: {clamped} feature value(s) outside the training range were clamped",
              file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    from . import simulation as sim

    os.makedirs(args.output, exist_ok=True)
    progress = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    written = []
    if args.experiment == "interaction":
        ns = tuple(int(t) for t in args.ns.split(",")) if args.ns else (100, 300, 800)
        oracle, cv = sim.run_interaction_experiment(ns, args.reps, args.seed, kind=args.kind,
                                                    n_test=args.n_test or 5000,
                                                    progress=progress)
        for res, name in ((oracle, "interaction_oracle.csv"), (cv, "interaction_cv.csv")):
            res.write_table(os.path.join(args.output, name))
            written.append(name)
        cv.write_records(os.path.join(args.output, "interaction_replicates.csv"))
        written.append("interaction_replicates.csv")
    elif args.experiment == "mse":
        if args.full:
            dims, ns = tuple(range(1, 11)), (200, 400, 600)
        else:
            dims = tuple(int(t) for t in args.dims.split(","))
            ns = tuple(int(t) for t in args.ns.split(",")) if args.ns else (200,)
        res = sim.run_mse_benchmark(dims, ns, args.reps, args.seed,
                                    n_test=args.n_test or 2000, progress=progress)
        res.write_table(os.path.join(args.output, "mse_table.csv"))
        res.write_records(os.path.join(args.output, "mse_replicates.csv"))
        written += ["mse_table.csv", "mse_replicates.csv"]
    if args.figure == "eigen":
        written += _eigen_figure(args.output, args.seed)
    for name in written:
        print(os.path.join(args.output, name))
    return EXIT_OK


def _eigen_figure(outdir, seed, n=200, d=1, ncomp=6):
    from .simulation import eigen_overlay

    idx, num, ref = eigen_overlay(n, d, ncomp, seed)
    header = ["i"] + [f"numerical_{j + 1}" for j in range(ncomp)] + \
        [f"sine_{j + 1}" for j in range(ncomp)]
    _write_matrix(os.path.join(outdir, "eigen_overlay.csv"),
                  np.column_stack([idx.astype(float), num, ref]), header)
    out = ["eigen_overlay.csv"]
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return out
    fig, axes = plt.subplots(2, 3, figsize=(10, 5.5), sharex=True)
    for j, ax in enumerate(axes.ravel()[:ncomp]):
        ax.plot(idx, num[:, j], color="black", lw=1.5)
        ax.plot(idx, ref[:, j], color="red", lw=0.8, ls="--")
        ax.set_title(f"component {j + 1}")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "eigen_overlay.png"), dpi=100,
                metadata={"Software": None})
    plt.close(fig)
    return out + ["eigen_overlay.png"]


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    X = rng.random((args.n, args.d))
    m = args.m or args.d
    methods = ["masks", "blas"] + (["naive"] if args.n <= 120 else [])
    ref = None
    print(f"gram n={args.n} d={args.d} m={m}")
    for meth in methods:
        t0 = time.perf_counter()
        K = gram(X, KernelConfig(m), method=meth).K
        dt = time.perf_counter() - t0
        same = True if ref is None else bool(np.array_equal(K, ref))
        ref = K if ref is None else ref
        print(f"  {meth:6s} {dt:9.4f} s  identical={same}")
    t0 = time.perf_counter()
    spec = eig_sym(center_gram(gram(X, KernelConfig(m))))
    print(f"  eig_sym {time.perf_counter() - t0:8.4f} s  rank={spec.r}")
    return EXIT_OK


def _add_tuning_flags(p):
    p.add_argument("train", help="training CSV (comma-delimited, header row)")
    p.add_argument("--response", required=True, help="response column name or 1-based index")
    p.add_argument("--kind", choices=("pchal", "pchar"), default="pchal")
    p.add_argument("--m", type=int, default=None, help="fixed interaction order (skips the scan)")
    p.add_argument("--m-max", type=int, default=None, help="cap for the interaction-order scan")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-grid", default=None, help="ranks, 'lo:hi' or comma list")
    p.add_argument("--lambda-grid", default=None,
                   help="penalties, 'lo:hi:count' in log10 or comma list")
    p.add_argument("--select-k-by", choices=("train", "cv"), default="train",
                   help="rank rule; 'cv' departs from the training-MSE rule")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcha", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None,
                        help=f"kernel threads (default: ${THREADS_ENV} or all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="tune and fit a model, write a model file")
    _add_tuning_flags(p)
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--report", default=None, help="also write the CV table as CSV")
    p.add_argument("--dump-spectrum", default=None, help="CSV of centered-Gram eigenvalues")
    p.add_argument("--dump-gram", default=None, help="CSV of the uncentered training Gram")
    p.add_argument("--dump-design", default=None,
                   help="CSV of the explicit indicator design (small data only)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("tune", help="write the cross-validation table without fitting")
    _add_tuning_flags(p)
    p.add_argument("-o", "--output", required=True, help="CSV report to write")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("predict", help="predict with a saved model")
    p.add_argument("model")
    p.add_argument("new", help="CSV of covariates (extra columns are ignored by name)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="run the synthetic experiments")
    p.add_argument("--experiment", choices=("interaction", "mse"), default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ns", default=None, help="comma-separated sample sizes")
    p.add_argument("--dims", default="1", help="comma-separated DGP dimensions (mse)")
    p.add_argument("--full", action="store_true", help="mse: all d=1..10, n=200,400,600")
    p.add_argument("--kind", choices=("pchal", "pchar"), default="pchal",
                   help="estimator for the interaction experiment")
    p.add_argument("--n-test", type=int, default=None)
    p.add_argument("--figure", choices=("eigen",), default=None)
    p.add_argument("--verbose", action="store_true")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="time the Gram assembly routes")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def _origin(exc):
    tb = traceback.extract_tb(exc.__traceback__)
    if not tb:
        return "pcha"
    return "pcha." + os.path.splitext(os.path.basename(tb[-1].filename))[0]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        if args.experiment is None and args.figure is None:
            parser.error("simulate: give --experiment and/or --figure")
        if args.reps is None:
            args.reps = 20 if args.experiment == "interaction" else 5
        if args.reps < 1:
            parser.error("simulate: --reps must be >= 1")
    try:
        _apply_threads(args.threads)
        return args.func(args)
    except _Usage as exc:
        print(f"pcha: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"{_origin(exc)}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"{_origin(exc)}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
