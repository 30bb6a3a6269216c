"""Command-line entry point.

Exit codes: 0 success, 2 input/config error, 3 insufficient data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cnf, dataset, evaluation, features, nn, plot, synth, trace
from .errors import InsufficientIterations, SatPredictError

EXIT_OK, EXIT_INPUT, EXIT_INSUFFICIENT = 0, 2, 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"{path}: {e.strerror or e}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fraction(text: str) -> float:
    num, _, den = text.partition("/")
    try:
        return float(num) / float(den) if den else float(num)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from None


def _is_traces_csv(text: str) -> bool:
    first = text.split("\n", 1)[0].strip()
    return first == ",".join(trace.CSV_COLUMNS)


def _load_traces(path: str, adapter: str = "canonical") -> list[trace.RunTrace]:
    """Traces from a canonical CSV, or a single run from a stats log."""
    text = _read_text(path)
    if _is_traces_csv(text):
        return trace.parse_canonical_csv(text)
    run_id = "stdin" if path == "-" else Path(path).stem
    return [trace.parse_stats_stream(text.splitlines(), adapter, run_id)]


def _input_files(paths) -> list[Path]:
    files = []
    for p in map(Path, paths):
        if p.is_dir():
            files += [f for f in p.iterdir() if f.is_file()]
        elif p.exists():
            files.append(p)
        else:
            raise CliError(f"{p}: no such file or directory")
    return sorted(files)


# ---------------------------------------------------------------- subcommands

def cmd_ingest(args) -> int:
    files = _input_files(args.paths)
    if not files:
        raise CliError("no inputs")
    traces = []
    for f in files:
        with f.open() as fh:
            try:
                traces.append(trace.parse_stats_stream(fh, args.adapter, f.stem, f.parent.name))
            except SatPredictError as e:
                raise CliError(f"{f}:{getattr(e, 'line_no', '?')}: {e}") from None
    _write(args.out, trace.serialize_canonical_csv(traces))
    return EXIT_OK


def _labeled_dataset(args, traces):
    if args.time_limit is None:
        raise CliError("--time-limit is required to label runs")
    spec = features.FeatureSetSpec(args.set, args.iterations)
    labels = [dataset.label_run(t, args.time_limit) for t in traces]
    return dataset.build_balanced(traces, labels, spec, args.seed, total=args.total)


def _split_paths(out: str) -> tuple[str, str]:
    p = Path(out)
    return str(p.with_suffix(".train.csv")), str(p.with_suffix(".test.csv"))


def cmd_dataset(args) -> int:
    traces = _load_traces(args.traces)
    ds = _labeled_dataset(args, traces)
    dataset.save_dataset(ds, args.out)
    msg = f"wrote {args.out}: {len(ds)} examples"
    if args.test_fraction is not None:
        train_ds, test_ds = dataset.split(ds, args.test_fraction, args.seed)
        train_path, test_path = _split_paths(args.out)
        dataset.save_dataset(train_ds, train_path)
        dataset.save_dataset(test_ds, test_path)
        msg += f"; {train_path}: {len(train_ds)}, {test_path}: {len(test_ds)}"
    print(msg, file=sys.stderr)
    return EXIT_OK


def cmd_train(args) -> int:
    text = _read_text(args.input)
    if _is_traces_csv(text):
        if args.time_limit is None:
            args.parser.error("--time-limit is required when training from run traces")
        ds = _labeled_dataset(args, trace.parse_canonical_csv(text))
        if args.test_fraction is not None:
            ds, _ = dataset.split(ds, args.test_fraction, args.seed)
    else:
        ds = dataset.loads_dataset(text)
    model = nn.build_model(args.arch, ds.spec.length,
                           args.dropout if args.arch == "C" else None, args.seed)
    batch = min(args.batch_size, len(ds))
    cfg = nn.TrainConfig(args.epochs, batch, args.lr, args.seed, model.dropout_rate)
    tm = nn.train(model, ds, cfg, normalize=not args.no_normalize)
    nn.save_model(tm, args.out)
    acc = tm.training_accuracy
    if args.json:
        print(json.dumps({"model": args.out, "layers": tm.model.layer_sizes(),
                          "training_accuracy": acc, "epochs": len(tm.history)}))
    else:
        sizes = "->".join(map(str, tm.model.layer_sizes()))
        print(f"arch={args.arch} layers={sizes} training_accuracy="
              f"{'n/a' if acc is None else format(acc, '.4f')}")
    return EXIT_OK


def _verdict_line(run_id, cls, p, k):
    prefix = f"{run_id} " if run_id is not None else ""
    return f"{prefix}verdict={cls} p={p!r} after_iter={k}"


def cmd_predict(args) -> int:
    tm = nn.load_model(args.model)
    traces = _load_traces(args.input, args.adapter)
    results, code = [], EXIT_OK
    for t in traces:
        try:
            cls, p = nn.predict(tm, t, args.threshold)
        except InsufficientIterations as e:
            results.append({"run_id": t.run_id, "error": "insufficient-iterations",
                            "have": e.have, "need": e.need})
            code = EXIT_INSUFFICIENT
            continue
        results.append({"run_id": t.run_id, "verdict": cls, "p": p,
                        "after_iter": tm.spec.iterations})
    if args.json:
        print(json.dumps(results, indent=1))
    else:
        for r in results:
            if "error" in r:
                print(f"{r['run_id']} insufficient-iterations have={r['have']} need={r['need']}")
            else:
                print(_verdict_line(r["run_id"], r["verdict"], r["p"], r["after_iter"]))
    return code


def cmd_eval(args) -> int:
    tm = nn.load_model(args.model)
    ds = dataset.load_dataset(args.dataset)
    report = evaluation.evaluate(tm, ds, args.threshold, model_id=Path(args.model).name,
                                 dataset_id=Path(args.dataset).name)
    print(evaluation.render_report(report, "json" if args.json else "text"))
    return EXIT_OK


def cmd_synth(args) -> int:
    params = synth.GeneratorParams.from_json(args.params) if args.params else synth.GeneratorParams()
    if args.noise_scale is not None:
        params = params.with_noise(args.noise_scale).validate()
    if args.oracle:
        spec = features.FeatureSetSpec(args.set, args.iterations)
        acc, se = synth.bayes_accuracy(params, args.oracle, args.seed, spec)
        print(json.dumps({"bayes_accuracy": acc, "stderr": se, "set": args.set,
                          "iterations": args.iterations, "n_mc": args.oracle}))
        return EXIT_OK
    if args.n_per_class is None:
        raise CliError("--n-per-class is required")
    traces, _ = synth.generate_corpus(args.n_per_class, params, args.seed, args.instance_id)
    if args.logs:
        out_dir = Path(args.logs)
        out_dir.mkdir(parents=True, exist_ok=True)
        for t in traces:
            (out_dir / f"{t.run_id}.log").write_text(trace.format_stats_stream(t))
    if args.out or not args.logs:
        _write(args.out, trace.serialize_canonical_csv(traces))
    return EXIT_OK


def cmd_plot(args) -> int:
    if args.kind == "evolution":
        if args.param is None:
            raise CliError("--param is required for evolution plots")
        traces = _load_traces(args.input)
        points = plot.evolution_series(traces, args.param)
        if args.csv:
            Path(args.csv).write_text(plot.series_to_csv(points))
        _write(args.out, plot.evolution_svg(traces, args.param, log_x=args.log_x))
    else:
        ds = dataset.load_dataset(args.input)
        _write(args.out, plot.scatter_matrix(ds, args.iteration))
    return EXIT_OK


def cmd_cnf_stats(args) -> int:
    inst = cnf.parse_dimacs(_read_text(args.path))
    feats = cnf.instance_features(inst)
    d = feats.to_dict()
    if args.json:
        print(json.dumps(d, indent=1))
    else:
        for k, v in d.items():
            print(f"{k}: {v}")
    return EXIT_OK


def cmd_watch(args) -> int:
    tm = nn.load_model(args.model)
    k = tm.spec.iterations
    if args.iterations is not None and args.iterations != k:
        raise CliError(f"model was trained on K={k} iterations, --iterations says {args.iterations}")
    records = []
    for rec in trace.iter_stats_records(sys.stdin, args.adapter):
        records.append(rec)
        if len(records) == k:
            cls, p = nn.predict(tm, trace.RunTrace("watch", "", tuple(records)), args.threshold)
            print(_verdict_line(None, cls, p, k), flush=True)
            return EXIT_OK
    print(f"insufficient-iterations have={len(records)} need={k}", flush=True)
    return EXIT_INSUFFICIENT


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="satpredict",
                                 description="Early termination prediction from CDCL solver statistics.")
    sub = ap.add_subparsers(dest="command", required=True)

    def labeling(p):
        p.add_argument("--time-limit", type=float, help="runs terminating within this many seconds get label 1")
        p.add_argument("--set", choices=sorted(features.FEATURE_SETS), default="set1")
        p.add_argument("--iterations", type=int, default=2, help="K, iterations per feature vector")
        p.add_argument("--total", type=int, help="pool size after balancing (default: 2 x minority count)")
        p.add_argument("--test-fraction", type=_fraction, help="e.g. 0.25 or 1/3")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ingest", help="parse solver stats logs into canonical CSV")
    p.add_argument("paths", nargs="*")
    p.add_argument("--adapter", default="canonical")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("dataset", help="label, balance and split traces into dataset CSVs")
    p.add_argument("traces")
    labeling(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("train", help="train a model on a dataset CSV or labeled traces")
    p.add_argument("input", help="dataset CSV, or canonical traces CSV together with --time-limit")
    labeling(p)
    p.add_argument("--arch", choices=nn.ARCHS, default="C")
    p.add_argument("--epochs", type=int, default=nn.TrainConfig.epochs)
    p.add_argument("--batch-size", type=int, default=nn.TrainConfig.batch_size)
    p.add_argument("--lr", type=float, default=nn.TrainConfig.learning_rate)
    p.add_argument("--dropout", type=float, default=nn.DEFAULT_DROPOUT)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train, parser=p)

    p = sub.add_parser("predict", help="classify runs from their first K iterations")
    p.add_argument("input", help="canonical traces CSV or a stats log ('-' for stdin)")
    p.add_argument("--model", required=True)
    p.add_argument("--adapter", default="canonical")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="hit ratio and confusion counts on a test dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic trace corpus or its Bayes accuracy")
    p.add_argument("--n-per-class", type=int)
    p.add_argument("--params", help="generator params JSON (layered over defaults)")
    p.add_argument("--noise-scale", type=float)
    p.add_argument("--instance-id", default="synthetic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--logs", help="also write one canonical stats log per run into this directory")
    p.add_argument("--oracle", type=int, metavar="N_MC",
                   help="print the Monte-Carlo Bayes accuracy instead of generating")
    p.add_argument("--set", choices=sorted(features.FEATURE_SETS), default="set1")
    p.add_argument("--iterations", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plot", help="parameter evolution curves or scatterplot matrix")
    p.add_argument("kind", choices=["evolution", "scatter"])
    p.add_argument("input", help="traces (evolution) or dataset CSV (scatter)")
    p.add_argument("--param", help="statistic name for evolution plots")
    p.add_argument("--log-x", action="store_true")
    p.add_argument("--iteration", type=int, default=1)
    p.add_argument("--csv", help="also write the evolution series CSV here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("cnf-stats", help="DIMACS instance features")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cnf_stats)

    p = sub.add_parser("watch", help="classify a live run from stdin after K iterations")
    p.add_argument("--model", required=True)
    p.add_argument("--iterations", type=int, help="must match the model's K")
    p.add_argument("--adapter", default="canonical")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_watch)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"satpredict: {e}", file=sys.stderr)
        return e.code
    except InsufficientIterations as e:
        print(f"satpredict: insufficient-iterations: {e}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except SatPredictError as e:
        where = f"line {e.line_no}: " if getattr(e, "line_no", None) and not isinstance(
            e, trace.MalformedLine) else ""
        print(f"satpredict: {where}{e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"satpredict: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
