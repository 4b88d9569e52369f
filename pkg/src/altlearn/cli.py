"""Command-line experiment runner.

Subcommands: generate (corpus specs), run (benchmark), summarize (recompute a
summary from record CSVs), sweep (threshold x window sensitivity grid).

Value precedence, highest first: config file, command-line flags, built-in
defaults. The merged configuration is echoed to stdout and into the output
directory. Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from .bench import ALGORITHMS, ExperimentConfig, run_experiment, write_sensitivity_csv, write_summary_csv
from .controller import ControllerConfig
from .drift_sim import gen_corpus, gen_stream, load_corpus, save_corpus, stream_to_csv
from .metrics import sensitivity_grid, summarize
from .numerics import NumericalBreakdownError, SingularSystemError

CONFIG_ERROR = 2
NUMERICAL_ERROR = 3

_CONTROLLER_FLAGS = (
    ("hidden_width", int),
    ("window", int),
    ("reset_threshold", float),
    ("acceptable_err", float),
    ("least_wait", int),
    ("batch_size", int),
    ("init_batches", int),
    ("ridge", float),
    ("seed", int),
    ("activation", str),
    ("metric", str),
)


def _add_controller_flags(parser: argparse.ArgumentParser) -> None:
    for name, typ in _CONTROLLER_FLAGS:
        parser.add_argument(f"--{name.replace('_', '-')}", type=typ, default=None, dest=name)


def _add_corpus_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-abrupt", type=int, default=None, dest="n_abrupt")
    parser.add_argument("--n-gradual", type=int, default=None, dest="n_gradual")
    parser.add_argument("--corpus-seed", type=int, default=None, dest="corpus_seed")
    parser.add_argument("--stream-len", type=int, default=None, dest="stream_len")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="altlearn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a corpus spec file (and optionally stream CSVs)")
    _add_corpus_flags(gen)
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--emit-streams", action="store_true", help="also write per-stream CSVs")

    run = sub.add_parser("run", help="run the benchmark over a corpus")
    _add_corpus_flags(run)
    _add_controller_flags(run)
    run.add_argument("--corpus", default=None, help="existing corpus spec file (otherwise generated)")
    run.add_argument("--algorithms", default=None, help=f"comma list from {','.join(ALGORITHMS)}")
    run.add_argument("--jobs", type=int, default=None, dest="n_jobs")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--config", default=None, help="JSON config file; overrides flags")

    summ = sub.add_parser("summarize", help="recompute summary.csv from a run's record CSVs")
    summ.add_argument("--run-dir", required=True)
    summ.add_argument("--out", default=None, help="summary CSV path (default: <run-dir>/summary.csv)")

    sweep = sub.add_parser("sweep", help="sensitivity grid over reset threshold and window")
    _add_corpus_flags(sweep)
    _add_controller_flags(sweep)
    sweep.add_argument("--deltas", default="0.2,0.3,0.4,0.5,0.6,0.7", help="comma list of reset thresholds")
    sweep.add_argument("--windows", default="20,30,40", help="comma list of window sizes")
    sweep.add_argument("--corpus", default=None, help="existing corpus spec file")
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--config", default=None, help="JSON config file; overrides flags")
    return parser


def _merge_experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """defaults < flags < config file, per the documented precedence."""
    merged = ExperimentConfig().to_dict()
    for key in ("n_abrupt", "n_gradual", "corpus_seed", "stream_len", "n_jobs"):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if getattr(args, "out", None) is not None:
        merged["out_dir"] = args.out
    if getattr(args, "algorithms", None) is not None:
        merged["algorithms"] = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for name, _ in _CONTROLLER_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            merged["controller"][name] = val
    config_path = getattr(args, "config", None)
    if config_path:
        file_cfg = json.loads(Path(config_path).read_text())
        ctrl_part = file_cfg.pop("controller", {})
        merged.update(file_cfg)
        merged["controller"].update(ctrl_part)
    return ExperimentConfig.from_dict(merged)


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    specs = gen_corpus(
        args.n_abrupt if args.n_abrupt is not None else 20,
        args.n_gradual if args.n_gradual is not None else 20,
        args.corpus_seed if args.corpus_seed is not None else 0,
        n=args.stream_len if args.stream_len is not None else 2000,
    )
    save_corpus(specs, out / "corpus.json")
    if args.emit_streams:
        streams_dir = out / "streams"
        streams_dir.mkdir(exist_ok=True)
        for sid, spec in enumerate(specs):
            stream_to_csv(gen_stream(spec), streams_dir / f"stream_{sid:03d}.csv")
    print(f"wrote {len(specs)} stream specs to {out / 'corpus.json'}")
    return 0


def _cmd_run(args) -> int:
    config = _merge_experiment_config(args)
    if args.corpus:
        specs = load_corpus(args.corpus)
        # corpus file wins over inline counts; reflect the real composition
        config = ExperimentConfig.from_dict(
            {
                **config.to_dict(),
                "n_abrupt": sum(1 for s in specs if s.kind == "abrupt"),
                "n_gradual": sum(1 for s in specs if s.kind == "gradual"),
                "corpus_seed": specs[0].teacher_seed if specs else config.corpus_seed,
                "stream_len": specs[0].n if specs else config.stream_len,
            }
        )
    print(json.dumps(config.to_dict(), indent=2))
    out = run_experiment(config)
    print(f"results in {out}")
    return 0


def _cmd_summarize(args) -> int:
    run_dir = Path(args.run_dir)
    records_dir = run_dir / "records"
    if not records_dir.is_dir():
        raise ValueError(f"no records directory under {run_dir}")
    step_errors: dict[str, dict[int, list[float]]] = defaultdict(dict)
    resets: dict[str, dict[int, list[int]]] = defaultdict(dict)
    for path in sorted(records_dir.glob("*.csv")):
        algo, _, sid_text = path.stem.rpartition("_")
        sid = int(sid_text)
        errs, ridx = [], []
        with path.open(newline="") as fh:
            for row in csv.DictReader(fh):
                errs.append(float(row["err_L"]))
                if row["reset"] == "1":
                    ridx.append(int(row["index"]))
        step_errors[algo][sid] = errs
        resets[algo][sid] = ridx
    if not step_errors:
        raise ValueError(f"no record CSVs in {records_dir}")
    ordered_errs = {a: [v for _, v in sorted(d.items())] for a, d in step_errors.items()}
    ordered_resets = {a: [v for _, v in sorted(d.items())] for a, d in resets.items()}
    summaries = summarize(ordered_errs, ordered_resets)
    out_path = Path(args.out) if args.out else run_dir / "summary.csv"
    write_summary_csv(summaries, out_path)
    for s in summaries:
        print(f"{s.algorithm}: mean {s.mean:.4f}% sd {s.sd:.4f}% over {len(s.stream_means)} streams")
    return 0


def _cmd_sweep(args) -> int:
    config = _merge_experiment_config(args)
    thresholds = _parse_float_list(args.deltas)
    windows = _parse_int_list(args.windows)
    if args.corpus:
        specs = load_corpus(args.corpus)
    else:
        specs = gen_corpus(
            config.n_abrupt, config.n_gradual, config.corpus_seed, n=config.stream_len
        )
    if not specs:
        raise ValueError("sweep corpus is empty")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(json.dumps({**config.to_dict(), "sweep_thresholds": list(thresholds), "sweep_windows": list(windows)}, indent=2))
    rows, cells = sensitivity_grid(thresholds, windows, specs, config.controller)
    write_sensitivity_csv(rows, cells, out)
    print(f"wrote {len(rows)} grid rows to {out / 'sensitivity.csv'}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "run": _cmd_run,
        "summarize": _cmd_summarize,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except (NumericalBreakdownError, SingularSystemError, np.linalg.LinAlgError, FloatingPointError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
