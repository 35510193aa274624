"""Command-line surface: train, predict, simulate, bench, convergence, fetch.

Exit codes: 0 success, 2 invalid flags, 3 data/model parse error,
4 training failure, 5 network failure, 6 checksum mismatch.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from reboost import boosters, harness, synthdata
from reboost.cli import data_io, fetch, model_io
from reboost.core import Dataset, InvalidInputError, InvalidSpecError, Task, truncate_predictions
from reboost.losses import LossKind

log = logging.getLogger("reboost")

EXIT_OK = 0
EXIT_FLAGS = 2
EXIT_DATA = 3
EXIT_TRAIN = 4
EXIT_NETWORK = 5
EXIT_CHECKSUM = 6


def _task(name: str) -> Task:
    return Task.CLASSIFICATION if name == "classification" else Task.REGRESSION


def _build_variant(args) -> boosters.Variant:
    if args.variant == "plain":
        return boosters.Plain()
    if args.variant == "rescale":
        if args.u is not None:
            return boosters.Rescale(boosters.ShrinkageSchedule.experimental(args.u))
        return boosters.Rescale(boosters.ShrinkageSchedule.theorem())
    if args.variant == "shrunk":
        if args.nu is None:
            raise InvalidSpecError("--nu is required for the shrunk variant")
        return boosters.Shrunk(args.nu)
    if args.variant == "truncated":
        if args.t0 is None:
            raise InvalidSpecError("--t0 is required for the truncated variant")
        return boosters.Truncated(args.t0, args.t_exponent)
    if args.eps is None:
        raise InvalidSpecError("--eps is required for the epsilon variant")
    return boosters.Epsilon(args.eps)


def _learner_spec(args) -> boosters.LearnerSpec:
    if args.learner == "stump":
        return boosters.StumpLearner()
    return boosters.TreeLearner(args.splits)


def cmd_train(args) -> int:
    try:
        data = data_io.load_dataset_csv(args.data, _task(args.task))
    except (OSError, data_io.CsvParseError, InvalidInputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    try:
        config = boosters.TrainConfig(args.iterations, LossKind(args.loss),
                                      _learner_spec(args), _build_variant(args))
        model, trace = boosters.train(data, config, args.seed)
    except (InvalidInputError, InvalidSpecError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_TRAIN
    model_io.save_model(args.model_out, model, config.loss, data.task, args.seed)
    if args.trace_out:
        data_io.save_trace_csv(args.trace_out, trace)
    if trace.stopped_early:
        print(f"note: {trace.stopped_early}", file=sys.stderr)
    print(f"trained {len(trace)} iterations, final risk "
          f"{trace.records[-1].risk if trace.records else float('nan'):.6g}")
    return EXIT_OK


def cmd_predict(args) -> int:
    try:
        model, loss, task, _ = model_io.load_model(args.model)
    except (OSError, InvalidInputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    try:
        X = _load_feature_matrix(args.data, model.n_features)
        preds = model.predict(X)
    except (OSError, data_io.CsvParseError, InvalidInputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    if args.truncate is not None:
        preds = truncate_predictions(preds, args.truncate)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("prediction\n")
        fh.writelines(f"{p:.17g}\n" for p in preds)
    return EXIT_OK


def _load_feature_matrix(path, n_features) -> np.ndarray:
    """Accept a features-only CSV or a dataset CSV whose last column is the
    target (ignored when the width is one more than the model expects)."""
    import csv as _csv

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise data_io.CsvParseError(f"{path}: empty file")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as err:
                raise data_io.CsvParseError(f"{path}:{lineno}: {err}") from None
    X = np.array(rows)
    if X.ndim != 2 or X.size == 0:
        raise data_io.CsvParseError(f"{path}: no data rows")
    if n_features is not None:
        if X.shape[1] == n_features + 1:
            X = X[:, :-1]
        elif X.shape[1] != n_features:
            raise InvalidInputError(
                f"model expects {n_features} features, file has {X.shape[1]} columns"
            )
    return X


_TOY_SIZES = {  # train rows, validation rows, noiseless test rows
    "m1": (500, 500, 1000),
    "m2": (500, 500, 1000),
}
ORANGE_SIZES = (100, 100, 2000)  # per-class: train, validation, test


def _toy_provider(experiment: str, sigma: float, q: int):
    def provider(seed: int):
        subs = [int(s) for s in np.random.SeedSequence(seed).generate_state(3)]
        if experiment == "orange":
            n_tr, n_val, n_te = ORANGE_SIZES
            return (synthdata.gen_orange(n_tr, q, subs[0]),
                    synthdata.gen_orange(n_val, q, subs[1]),
                    synthdata.gen_orange(n_te, q, subs[2]))
        n_tr, n_val, n_te = _TOY_SIZES[experiment]
        spec_cls = synthdata.M1Spec if experiment == "m1" else synthdata.M2Spec
        return (synthdata.gen_regression(spec_cls(n_tr, sigma), "train", subs[0]),
                synthdata.gen_regression(spec_cls(n_val, sigma), "validation", subs[1]),
                synthdata.gen_regression(spec_cls(n_te, 0.0), "test_noiseless", subs[2]))
    return provider


def _print_report(report: harness.ExperimentReport) -> None:
    for row in report.rows:
        print(f"{row.method:10s} mean={row.mean_metric:.6g} stderr={row.stderr:.3g} "
              f"params={row.chosen_params} k={row.chosen_k} runs={row.runs}")
    if report.failures:
        print(f"note: {report.failures} method-runs failed and were excluded",
              file=sys.stderr)


def cmd_simulate(args) -> int:
    if args.experiment == "orange":
        loss, learner = LossKind.LOGISTIC, boosters.StumpLearner()
        k_max = args.k_max or 1000
    else:
        loss, learner = LossKind.SQUARED, boosters.TreeLearner(4)
        k_max = args.k_max or 500
    grid = harness.TuningGrid(k_max=k_max)
    provider = _toy_provider(args.experiment, args.sigma, args.q)
    methods = tuple(args.methods) if args.methods else harness.METHODS
    try:
        report = harness.repeat_experiment(provider, methods, grid, loss,
                                           learner, args.runs, args.seed)
    except harness.TuningError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_TRAIN
    if any(r.runs == 0 for r in report.rows):
        failed = [r.method for r in report.rows if r.runs == 0]
        print(f"error: every run failed for methods: {failed}", file=sys.stderr)
        return EXIT_TRAIN
    if args.report_out:
        data_io.save_report_csv(args.report_out, report)
    _print_report(report)
    return EXIT_OK


def cmd_bench(args) -> int:
    task = _task(args.task)
    try:
        data = data_io.load_dataset_csv(args.data, task)
    except (OSError, data_io.CsvParseError, InvalidInputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    loss = LossKind.LOGISTIC if task is Task.CLASSIFICATION else LossKind.SQUARED
    grid = harness.TuningGrid(k_max=args.k_max or 1000)
    methods = tuple(args.methods) if args.methods else harness.METHODS

    def provider(seed: int):
        return harness.split_dataset(data, (0.5, 0.25, 0.25), seed)

    try:
        report = harness.repeat_experiment(provider, methods, grid, loss,
                                           boosters.StumpLearner(), args.runs, args.seed)
    except harness.TuningError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_TRAIN
    if any(r.runs == 0 for r in report.rows):
        failed = [r.method for r in report.rows if r.runs == 0]
        print(f"error: every run failed for methods: {failed}", file=sys.stderr)
        return EXIT_TRAIN
    if args.report_out:
        data_io.save_report_csv(args.report_out, report)
    _print_report(report)
    return EXIT_OK


def cmd_convergence(args) -> int:
    spec = synthdata.SparseDictionarySpec(args.samples, args.atoms,
                                          args.sparsity, args.coef_norm)
    try:
        data, atoms, h_risk, _ = synthdata.gen_sparse_dictionary_instance(spec, args.seed)
    except InvalidSpecError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_TRAIN
    learner = boosters.DictionaryLearner(atoms)
    variants = {
        "rescale": boosters.Rescale(boosters.ShrinkageSchedule.theorem()),
        "plain": boosters.Plain(),
    }
    k_lo, k_hi = max(1, args.k_max // 32), args.k_max

    rows = []
    for name, variant in variants.items():
        config = boosters.TrainConfig(args.k_max, LossKind.SQUARED, learner, variant)
        _, trace = boosters.train(data, config, args.seed)
        excess = boosters.excess_risk_trace(trace, h_risk)
        try:
            slope = harness.convergence_slope(excess, k_lo, min(k_hi, len(excess)))
        except InvalidInputError:
            slope = float("nan")
        print(f"{name}: iterations={len(excess)} slope={slope:.4f}")
        rows.extend((name, k + 1, excess[k], slope) for k in range(len(excess)))

    if args.report_out:
        import csv as _csv
        with open(args.report_out, "w", encoding="utf-8", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(("method", "k", "excess_risk", "slope"))
            for name, k, e, s in rows:
                writer.writerow((name, k, f"{e:.17g}", f"{s:.17g}"))
    return EXIT_OK


def cmd_fetch(args) -> int:
    try:
        out = fetch.fetch_dataset(args.name, args.out_dir, args.url, args.table)
    except fetch.NetworkError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NETWORK
    except fetch.ChecksumError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CHECKSUM
    except KeyError as err:
        print(f"error: {err.args[0]}", file=sys.stderr)
        return EXIT_FLAGS
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reboost",
        description="Re-scale gradient boosting: training, prediction, "
                    "experiment reproduction and convergence diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a boosting model on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=("regression", "classification"), default="regression")
    p.add_argument("--loss", choices=[k.value for k in LossKind], default="squared")
    p.add_argument("--learner", choices=("stump", "tree"), default="stump")
    p.add_argument("--splits", type=int, default=4, help="tree split count J")
    p.add_argument("--variant", choices=harness.METHODS, default="rescale")
    p.add_argument("--u", type=float, help="rescale schedule 2/(k+u)")
    p.add_argument("--nu", type=float, help="shrunk step factor in (0,1]")
    p.add_argument("--t0", type=float, help="truncated search bound scale")
    p.add_argument("--t-exponent", type=float, default=2.0 / 3.0)
    p.add_argument("--eps", type=float, help="epsilon step size")
    p.add_argument("--iterations", "-k", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out", required=True)
    p.add_argument("--trace-out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truncate", type=float, help="clamp predictions to [-M, M]")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="reproduce a toy experiment")
    p.add_argument("--experiment", choices=("m1", "m2", "orange"), required=True)
    p.add_argument("--sigma", type=float, default=0.0, help="noise level (m1/m2)")
    p.add_argument("--q", type=int, default=0, help="noise feature count (orange)")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-max", type=int)
    p.add_argument("--methods", nargs="+", choices=harness.METHODS)
    p.add_argument("--report-out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="benchmark all methods on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=("regression", "classification"), required=True)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-max", type=int)
    p.add_argument("--methods", nargs="+", choices=harness.METHODS)
    p.add_argument("--report-out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("convergence", help="empirical convergence-rate check "
                                           "on the sparse dictionary instance")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--atoms", type=int, default=64)
    p.add_argument("--sparsity", type=int, default=4)
    p.add_argument("--coef-norm", type=float, default=4.0)
    p.add_argument("--k-max", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-out")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("fetch", help="download and convert a benchmark dataset")
    p.add_argument("--name", required=True)
    p.add_argument("--url", help="override the table URL")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--table", help="alternate source-table path")
    p.set_defaults(func=cmd_fetch)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, InvalidSpecError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
