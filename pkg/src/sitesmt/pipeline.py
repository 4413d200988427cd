"""End-to-end training workflow: prepare, train, tune, translate, evaluate,
and the corpus-size sweep experiment.

Every stage is a pure function of its declared input artifacts plus the
config: artifacts carry no timestamps, all collections are written in
sorted or input order, and files are written atomically (temp + rename),
so re-running a stage with unchanged inputs reproduces identical bytes.
The specific corpus is split once at prepare time; tune and test rows
never feed any training artifact.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import align, corpus as corpus_mod, decoder, lm as lm_mod, metrics, phrases, tune as tune_mod
from .corpus import ORIGIN_COMMON, ORIGIN_SPECIFIC, ParallelCorpus, SentencePair


class PipelineError(ValueError):
    pass


@dataclass
class PipelineConfig:
    common_src: str = ""
    common_tgt: str = ""
    specific_src: str = ""
    specific_tgt: str = ""
    work_dir: str = "work"
    lm_order: int = 5
    max_phrase_len: int = 7
    beam: int = 100
    distortion_limit: int = 6  # -1 means unlimited
    em_iterations: int = 5
    seed: int = 17
    n_tune: int = 500
    n_test: int = 700
    dedup: bool = False
    lowercase: bool = True
    train_max_len: int = 100  # alignment-training length cap per side

    def validate_inputs(self):
        for name in ("common_src", "common_tgt", "specific_src", "specific_tgt"):
            path = getattr(self, name)
            if not path:
                raise PipelineError("config key %s is required" % name)
            if not os.path.exists(path):
                raise PipelineError("missing input file for %s: %s" % (name, path))

    def decoder_params(self) -> decoder.DecoderParams:
        limit = None if self.distortion_limit < 0 else self.distortion_limit
        return decoder.DecoderParams(beam=self.beam, distortion_limit=limit,
                                     max_phrase_len=self.max_phrase_len)

    def hash(self) -> str:
        blob = json.dumps(dataclasses.asdict(self), sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_config(path) -> PipelineConfig:
    """Flat key=value file; unknown keys rejected, '#' starts a comment."""
    values = {}
    fields = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in fields:
                raise PipelineError("bad config line %d: %r" % (lineno, line))
            values[key] = _parse_value(fields[key].type, value)
    return PipelineConfig(**values)


def _parse_value(ftype: str, value: str):
    if ftype == "int":
        return int(value)
    if ftype == "bool":
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise PipelineError("bad boolean %r" % value)
    return value


def _atomic_write(path, writer) -> None:
    """writer(tmp_path) then atomic rename over the final path."""
    tmp = str(path) + ".tmp"
    writer(tmp)
    os.replace(tmp, path)


def _atomic_text(path, text: str) -> None:
    def write(tmp):
        with open(tmp, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    _atomic_write(path, write)


def _atomic_parallel(part: ParallelCorpus, src_path, tgt_path) -> None:
    corpus_mod.write_parallel(part, src_path + ".tmp", tgt_path + ".tmp")
    os.replace(src_path + ".tmp", src_path)
    os.replace(tgt_path + ".tmp", tgt_path)


def _stage_dir(cfg: PipelineConfig, stage: str, create: bool = True) -> str:
    path = os.path.join(cfg.work_dir, stage)
    if create:
        os.makedirs(path, exist_ok=True)
    return path


def _require(path, stage: str, needed_by: str) -> str:
    if not os.path.exists(path):
        raise PipelineError("stage-order violation: %s requires %s (run '%s' first)"
                            % (needed_by, path, stage))
    return path


def _load_prepared(path_src, path_tgt, origin) -> ParallelCorpus:
    # prepare output is already tokenized; never re-case it
    return corpus_mod.load_parallel(path_src, path_tgt, origin, lowercase=False)


# --- stages -------------------------------------------------------------------

def run_prepare(cfg: PipelineConfig) -> dict:
    """Split the specific corpus, combine with the common one, write all
    partitions plus the split manifest and a provenance record."""
    cfg.validate_inputs()
    common = corpus_mod.load_parallel(cfg.common_src, cfg.common_tgt,
                                      ORIGIN_COMMON, lowercase=cfg.lowercase)
    specific = corpus_mod.load_parallel(cfg.specific_src, cfg.specific_tgt,
                                        ORIGIN_SPECIFIC, lowercase=cfg.lowercase)
    train_idx, tune_idx, test_idx = corpus_mod.split_indices(
        len(specific), cfg.seed, cfg.n_tune, cfg.n_test)
    spec_train = ParallelCorpus(pairs=[specific.pairs[i] for i in train_idx])
    tune_part = ParallelCorpus(pairs=[specific.pairs[i] for i in tune_idx])
    test_part = ParallelCorpus(pairs=[specific.pairs[i] for i in test_idx])
    combined = corpus_mod.combine(common, spec_train, dedup=cfg.dedup)

    out = _stage_dir(cfg, "prepare")
    for name, part in (("train", combined), ("tune", tune_part),
                       ("test", test_part)):
        _atomic_parallel(part, os.path.join(out, name + ".src"),
                         os.path.join(out, name + ".tgt"))
    _atomic_write(os.path.join(out, "split_manifest.txt"),
                  lambda tmp: corpus_mod.write_split_manifest(
                      tmp, train_idx, tune_idx, test_idx))
    provenance = {
        "config_hash": cfg.hash(),
        "inputs": {name: corpus_mod.corpus_hash(getattr(cfg, name))
                   for name in ("common_src", "common_tgt",
                                "specific_src", "specific_tgt")},
        "common_pairs": len(common),
        "common_dropped": common.dropped,
        "specific_pairs": len(specific),
        "specific_dropped": specific.dropped,
        "combined_pairs": len(combined),
        "origin_counts": {
            ORIGIN_COMMON: sum(1 for p in combined if p.origin == ORIGIN_COMMON),
            ORIGIN_SPECIFIC: sum(1 for p in combined if p.origin == ORIGIN_SPECIFIC),
        },
        "partitions": {"train": len(combined), "tune": len(tune_part),
                       "test": len(test_part)},
    }
    _atomic_text(os.path.join(out, "provenance.json"),
                 json.dumps(provenance, indent=2, sort_keys=True) + "\n")
    return provenance


def train_engine(train_corpus: ParallelCorpus, cfg: PipelineConfig,
                 out_dir: str) -> None:
    """Train LM + phrase table for one corpus into out_dir (atomically)."""
    os.makedirs(out_dir, exist_ok=True)
    log_lines = []

    model = lm_mod.train_ngram([p.target for p in train_corpus], cfg.lm_order)
    _atomic_write(os.path.join(out_dir, "lm.arpa"),
                  lambda tmp: lm_mod.write_arpa(model, tmp))

    em_corpus = corpus_mod.length_filter(train_corpus, cfg.train_max_len)
    swapped = ParallelCorpus(pairs=[SentencePair(p.target, p.source, p.origin)
                                    for p in em_corpus])
    fwd = align.train_model1(
        em_corpus, cfg.em_iterations,
        log=lambda i, ll: log_lines.append("em_fwd\titer=%d\tloglik=%.6f" % (i, ll)))
    rev = align.train_model1(
        swapped, cfg.em_iterations,
        log=lambda i, ll: log_lines.append("em_rev\titer=%d\tloglik=%.6f" % (i, ll)))
    alignments = []
    for pair in em_corpus:
        f = align.viterbi_align(fwd, pair, align.FORWARD)
        r = align.viterbi_align(rev, pair, align.REVERSE)
        alignments.append(align.symmetrize(f, r, align.GROW_DIAG_FINAL))
    table = phrases.build_phrase_table(em_corpus, alignments, fwd, rev,
                                       cfg.max_phrase_len)
    _atomic_write(os.path.join(out_dir, "phrase_table.txt"),
                  lambda tmp: phrases.write_phrase_table(table, tmp))
    _atomic_text(os.path.join(out_dir, "train.log"), "\n".join(log_lines) + "\n")


def run_train(cfg: PipelineConfig) -> None:
    prepare = _stage_dir(cfg, "prepare", create=False)
    _require(os.path.join(prepare, "train.src"), "prepare", "train")
    combined = _load_prepared(os.path.join(prepare, "train.src"),
                              os.path.join(prepare, "train.tgt"), ORIGIN_COMMON)
    out = _stage_dir(cfg, "train")
    train_engine(combined, cfg, out)
    _atomic_text(os.path.join(out, "provenance.json"), json.dumps({
        "config_hash": cfg.hash(),
        "inputs": {name: corpus_mod.corpus_hash(os.path.join(prepare, name))
                   for name in ("train.src", "train.tgt")},
    }, indent=2, sort_keys=True) + "\n")


def _load_models(cfg: PipelineConfig, model_dir=None):
    model_dir = model_dir or _stage_dir(cfg, "train", create=False)
    arpa = _require(os.path.join(model_dir, "lm.arpa"), "train", "this stage")
    table_path = _require(os.path.join(model_dir, "phrase_table.txt"),
                          "train", "this stage")
    return (phrases.read_phrase_table(table_path, cfg.max_phrase_len),
            lm_mod.read_arpa(arpa))


def _load_weights(cfg: PipelineConfig) -> decoder.FeatureWeights:
    path = os.path.join(cfg.work_dir, "tune", "weights.txt")
    if os.path.exists(path):
        return decoder.read_weights(path)
    return decoder.FeatureWeights()


def run_tune(cfg: PipelineConfig) -> decoder.FeatureWeights:
    prepare = _stage_dir(cfg, "prepare", create=False)
    _require(os.path.join(prepare, "tune.src"), "prepare", "tune")
    table, model = _load_models(cfg)
    dev = _load_prepared(os.path.join(prepare, "tune.src"),
                         os.path.join(prepare, "tune.tgt"), ORIGIN_SPECIFIC)
    log_lines = []
    weights = tune_mod.tune_weights(
        [(p.source, p.target) for p in dev], table, model,
        decoder.FeatureWeights(), cfg.decoder_params(),
        log=log_lines.append)
    out = _stage_dir(cfg, "tune")
    _atomic_write(os.path.join(out, "weights.txt"),
                  lambda tmp: decoder.write_weights(weights, tmp))
    _atomic_text(os.path.join(out, "tune.log"), "\n".join(log_lines) + "\n")
    return weights


def run_translate(cfg: PipelineConfig, input_path, output_path,
                  breakdown: bool = False) -> int:
    """Translate one file line by line, order-preserving; returns line count."""
    table, model = _load_models(cfg)
    weights = _load_weights(cfg)
    params = cfg.decoder_params()
    with open(input_path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    out_lines = []
    for line in lines:
        tokens = corpus_mod.tokenize(line, cfg.lowercase)
        if not tokens:
            out_lines.append("")
            continue
        result = decoder.translate(tokens, table, model, weights, params)
        text = result.text
        if breakdown:
            text += "\t" + "\t".join(
                "%s=%.6f" % (name, result.features[name])
                for name in decoder.FEATURE_NAMES)
        out_lines.append(text)
    _atomic_text(output_path, "\n".join(out_lines) + "\n")
    return len(out_lines)


def _train_pair_set(cfg: PipelineConfig) -> set:
    prepare = _stage_dir(cfg, "prepare", create=False)
    _require(os.path.join(prepare, "train.src"), "prepare", "evaluate")
    with open(os.path.join(prepare, "train.src"), encoding="utf-8") as f:
        src_lines = f.read().splitlines()
    with open(os.path.join(prepare, "train.tgt"), encoding="utf-8") as f:
        tgt_lines = f.read().splitlines()
    return set(zip(src_lines, tgt_lines))


def check_disjoint(cfg: PipelineConfig, src_path, ref_path) -> None:
    """Refuse to score test rows that also occur in the training corpus."""
    train_pairs = _train_pair_set(cfg)
    with open(src_path, encoding="utf-8") as f:
        src_lines = f.read().splitlines()
    with open(ref_path, encoding="utf-8") as f:
        ref_lines = f.read().splitlines()
    for i, pair in enumerate(zip(src_lines, ref_lines)):
        if pair in train_pairs:
            raise PipelineError(
                "test/train overlap: test line %d is present in the training "
                "corpus; refusing to score" % i)


def run_evaluate(cfg: PipelineConfig, hyp_path, ref_path=None, src_path=None,
                 label: str = "system") -> metrics.MetricReport:
    prepare = _stage_dir(cfg, "prepare", create=False)
    if ref_path is None:
        ref_path = _require(os.path.join(prepare, "test.tgt"), "prepare", "evaluate")
    if src_path is None:
        src_path = _require(os.path.join(prepare, "test.src"), "prepare", "evaluate")
    check_disjoint(cfg, src_path, ref_path)
    report = metrics.evaluate_system(hyp_path, ref_path, label)
    out = _stage_dir(cfg, "evaluate")
    records_path = os.path.join(out, "records.jsonl")
    # one record per label: re-evaluating a system replaces its row, so an
    # unchanged re-run reproduces identical bytes
    reports = _read_records(records_path) if os.path.exists(records_path) else []
    reports = [r for r in reports if r.label != label] + [report]
    _atomic_text(records_path, "".join(r.to_record() + "\n" for r in reports))
    _atomic_text(os.path.join(out, "report.txt"),
                 metrics.render_comparison(reports))
    return report


def _read_records(path) -> list[metrics.MetricReport]:
    reports = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                reports.append(metrics.MetricReport.from_record(line))
    return reports


# --- sweep --------------------------------------------------------------------

def _sweep_partitions(cfg: PipelineConfig):
    """Load inputs and reproduce the prepare-stage split (same seed, same
    partition), so sweep engines stay disjoint from the shared test set."""
    cfg.validate_inputs()
    common = corpus_mod.load_parallel(cfg.common_src, cfg.common_tgt,
                                      ORIGIN_COMMON, lowercase=cfg.lowercase)
    specific = corpus_mod.load_parallel(cfg.specific_src, cfg.specific_tgt,
                                        ORIGIN_SPECIFIC, lowercase=cfg.lowercase)
    spec_train, _tune, test = corpus_mod.split(specific, cfg.seed,
                                               cfg.n_tune, cfg.n_test)
    return common, spec_train, test


def _sweep_engine(cfg_dict: dict, name: str, size: int | None) -> str:
    """Train and score one sweep engine; returns a MetricReport record line.

    size None = common-only, -1 = full specific-only, else combined with the
    first `size` specific training pairs (deterministic prefix subsample).
    """
    cfg = PipelineConfig(**cfg_dict)
    common, spec_train, test = _sweep_partitions(cfg)
    if size is None:
        train_corpus = common
    elif size == -1:
        train_corpus = spec_train
    else:
        if size > len(spec_train):
            raise PipelineError(
                "insufficient specific corpus: %d training pairs available, "
                "%d requested" % (len(spec_train), size))
        subset = ParallelCorpus(pairs=spec_train.pairs[:size])
        train_corpus = corpus_mod.combine(common, subset, dedup=cfg.dedup)
    engine_dir = os.path.join(_stage_dir(cfg, "sweep"), name)
    train_engine(train_corpus, cfg, engine_dir)

    table = phrases.read_phrase_table(
        os.path.join(engine_dir, "phrase_table.txt"), cfg.max_phrase_len)
    model = lm_mod.read_arpa(os.path.join(engine_dir, "lm.arpa"))
    params = cfg.decoder_params()
    weights = decoder.FeatureWeights()
    hyps = []
    for pair in test:
        hyps.append(decoder.translate(pair.source, table, model,
                                      weights, params).tokens)
    _atomic_text(os.path.join(engine_dir, "hyp.txt"),
                 "\n".join(" ".join(h) for h in hyps) + "\n")
    report = metrics.evaluate_pairs(hyps, [p.target for p in test], name)
    return report.to_record()


def run_experiment_sweep(cfg: PipelineConfig, sizes, jobs: int = 1
                         ) -> list[metrics.MetricReport]:
    """Specific-only and common-only baselines plus one combined engine per
    requested specific-corpus size, all scored on the shared test set."""
    _common, spec_train, _test = _sweep_partitions(cfg)
    if sizes and max(sizes) > len(spec_train):
        raise PipelineError(
            "insufficient specific corpus: %d training pairs, sweep asks for %d"
            % (len(spec_train), max(sizes)))
    tasks = [("specific-only", -1), ("common-only", None)]
    tasks += [("combined-%d" % size, size) for size in sizes]
    cfg_dict = dataclasses.asdict(cfg)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sweep_engine, cfg_dict, name, size)
                       for name, size in tasks]
            records = [f.result() for f in futures]
    else:
        records = [_sweep_engine(cfg_dict, name, size) for name, size in tasks]
    out = _stage_dir(cfg, "sweep")
    _atomic_text(os.path.join(out, "records.jsonl"), "\n".join(records) + "\n")
    reports = [metrics.MetricReport.from_record(r) for r in records]
    _atomic_text(os.path.join(out, "comparison.txt"),
                 metrics.render_comparison(reports))
    return reports
