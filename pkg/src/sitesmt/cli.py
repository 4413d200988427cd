"""Command-line pipeline driver.

Subcommands: prepare, train, tune, translate, evaluate, sweep, serve-eval,
report.  Options mirror the pipeline config keys; --config loads a flat
key=value file and explicit flags override it.  On failure every command
exits nonzero after printing a single machine-parseable line to stderr:
``error: <command>: <message>``.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import evalsvc, metrics, pipeline
from .pipeline import PipelineConfig, PipelineError

_CONFIG_FLAGS = [f.name for f in dataclasses.fields(PipelineConfig)]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    for field in dataclasses.fields(PipelineConfig):
        flag = "--" + field.name.replace("_", "-")
        if field.type == "bool":
            parser.add_argument(flag, default=None,
                                choices=("true", "false"))
        elif field.type == "int":
            parser.add_argument(flag, type=int, default=None)
        else:
            parser.add_argument(flag, default=None)


def _build_config(args) -> PipelineConfig:
    if args.config:
        cfg = pipeline.load_config(args.config)
    else:
        cfg = PipelineConfig()
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is None:
            continue
        if value in ("true", "false"):
            value = value == "true"
        setattr(cfg, name, value)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sitesmt",
        description="Train, tune, run and evaluate a site-specific "
                    "phrase-based translation engine.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="split, combine and write corpora")
    _add_config_flags(p)

    p = sub.add_parser("train", help="train language model and phrase table")
    _add_config_flags(p)

    p = sub.add_parser("tune", help="tune decoder weights on the dev split")
    _add_config_flags(p)

    p = sub.add_parser("translate", help="translate a file line by line")
    _add_config_flags(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--breakdown", action="store_true",
                   help="append per-feature values to each line")

    p = sub.add_parser("evaluate", help="score translations against references")
    _add_config_flags(p)
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", default=None,
                   help="reference file (default: prepare/test.tgt)")
    p.add_argument("--src", default=None,
                   help="source file for overlap checks (default: prepare/test.src)")
    p.add_argument("--label", default="system")

    p = sub.add_parser("sweep", help="corpus-size experiment with baselines")
    _add_config_flags(p)
    p.add_argument("--sizes", required=True,
                   help="comma-separated specific-corpus sizes, e.g. 5000,6000,7000")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("serve-eval", help="run the pairwise evaluation service")
    p.add_argument("--log", required=True, help="append-only event log path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)

    p = sub.add_parser("report", help="render system comparison tables")
    p.add_argument("--compare", nargs="+", required=True,
                   help="one or more records.jsonl files")
    return parser


def _cmd_prepare(args):
    cfg = _build_config(args)
    provenance = pipeline.run_prepare(cfg)
    print("prepared %d training pairs (%d common + %d specific), "
          "%d tune, %d test"
          % (provenance["combined_pairs"],
             provenance["origin_counts"]["common"],
             provenance["origin_counts"]["specific"],
             provenance["partitions"]["tune"],
             provenance["partitions"]["test"]))


def _cmd_train(args):
    cfg = _build_config(args)
    pipeline.run_train(cfg)
    print("trained: %s/train/lm.arpa, %s/train/phrase_table.txt"
          % (cfg.work_dir, cfg.work_dir))


def _cmd_tune(args):
    cfg = _build_config(args)
    weights = pipeline.run_tune(cfg)
    print("tuned weights written to %s/tune/weights.txt" % cfg.work_dir)
    for name in dataclasses.asdict(weights):
        print("  %s = %g" % (name, getattr(weights, name)))


def _cmd_translate(args):
    cfg = _build_config(args)
    n = pipeline.run_translate(cfg, args.input, args.output, args.breakdown)
    print("translated %d lines -> %s" % (n, args.output))


def _cmd_evaluate(args):
    cfg = _build_config(args)
    report = pipeline.run_evaluate(cfg, args.hyp, args.ref, args.src, args.label)
    print(metrics.render_comparison([report]), end="")


def _cmd_sweep(args):
    cfg = _build_config(args)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    reports = pipeline.run_experiment_sweep(cfg, sizes, jobs=args.jobs)
    print(metrics.render_comparison(reports), end="")


def _cmd_serve_eval(args):
    evalsvc.serve(args.log, args.host, args.port)


def _cmd_report(args):
    reports = []
    for path in args.compare:
        reports.extend(pipeline._read_records(path))
    print(metrics.render_comparison(reports), end="")


_COMMANDS = {
    "prepare": _cmd_prepare,
    "train": _cmd_train,
    "tune": _cmd_tune,
    "translate": _cmd_translate,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "serve-eval": _cmd_serve_eval,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (PipelineError, OSError, ValueError) as exc:
        message = str(exc).replace("\n", " ")
        print("error: %s: %s" % (args.command, message), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
