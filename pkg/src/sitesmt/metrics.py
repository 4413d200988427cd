"""Automatic translation metrics: WER, corpus BLEU, TER, system reports.

All metrics operate on token sequences.  Corpus-level BLEU follows the
original definition: geometric mean of clipped modified n-gram precisions
times the brevity penalty, no smoothing, scaled to 0..100.  TER uses the
greedy shift search: repeatedly apply the single block shift that lowers
edit distance the most, then add the remaining edit distance.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

MAX_SHIFTS = 50  # per-sentence cap on greedy TER shifts

LENGTH_BUCKETS = (("1-10", 1, 10), ("11-20", 11, 20),
                  ("21-30", 21, 30), (">30", 31, None))


class MetricError(ValueError):
    pass


def edit_distance(a, b) -> int:
    """Token-level Levenshtein distance with unit costs."""
    a, b = tuple(a), tuple(b)
    if not a:
        return len(b)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1,         # deletion
                           cur[j - 1] + 1,      # insertion
                           prev[j - 1] + (x != y)))  # substitution
        prev = cur
    return prev[-1]


def wer(hypothesis, reference) -> float:
    """Word error rate: edit distance over reference length."""
    reference = tuple(reference)
    if not reference:
        raise MetricError("empty reference")
    return edit_distance(hypothesis, reference) / len(reference)


def _ngram_counts(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_corpus(hypotheses, references, max_n: int = 4) -> float:
    """Corpus BLEU on a single reference per hypothesis, 0..100."""
    hypotheses = [tuple(h) for h in hypotheses]
    references = [tuple(r) for r in references]
    if len(hypotheses) != len(references):
        raise MetricError("length mismatch: %d hypotheses, %d references"
                          % (len(hypotheses), len(references)))
    if not hypotheses:
        raise MetricError("empty corpus")
    matched = [0] * (max_n + 1)
    total = [0] * (max_n + 1)
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngram_counts(hyp, n)
            ref_counts = _ngram_counts(ref, n)
            total[n] += max(0, len(hyp) - n + 1)
            matched[n] += sum((hyp_counts & ref_counts).values())
    log_sum = 0.0
    for n in range(1, max_n + 1):
        if matched[n] == 0 or total[n] == 0:
            return 0.0
        log_sum += math.log(matched[n] / total[n]) / max_n
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_sum)


# --- TER --------------------------------------------------------------------

def _shift_candidates(hyp, ref):
    """Block shifts allowed by the greedy search: the moved substring must
    match a reference substring and must not already sit in a matching
    position."""
    ref_subs = {tuple(ref[i:i + length])
                for length in range(1, len(ref) + 1)
                for i in range(len(ref) - length + 1)}
    n = len(hyp)
    for length in range(1, n + 1):
        for i in range(n - length + 1):
            block = tuple(hyp[i:i + length])
            if block not in ref_subs:
                continue
            if tuple(ref[i:i + length]) == block:
                continue  # already aligned at this position
            rest = hyp[:i] + hyp[i + length:]
            for k in range(len(rest) + 1):
                if k == i:
                    continue
                yield rest[:k] + list(block) + rest[k:]


def _ter_edits(hypothesis, reference) -> tuple[int, int]:
    """Greedy TER search; returns (shifts applied, remaining edit distance)."""
    hyp = list(hypothesis)
    shifts = 0
    dist = edit_distance(hyp, reference)
    while dist > 0 and shifts < MAX_SHIFTS:
        best_hyp, best_dist = None, dist
        for cand in _shift_candidates(hyp, reference):
            d = edit_distance(cand, reference)
            if d < best_dist or (d == best_dist and best_hyp is not None
                                 and cand < best_hyp):
                best_hyp, best_dist = cand, d
        if best_hyp is None or best_dist >= dist:
            break
        hyp, dist = best_hyp, best_dist
        shifts += 1
    return shifts, dist


def ter(hypothesis, reference) -> float:
    """Translation edit rate: (edits + shifts) / reference length."""
    reference = list(reference)
    if not reference:
        raise MetricError("empty reference")
    shifts, dist = _ter_edits(hypothesis, reference)
    return (shifts + dist) / len(reference)


# --- system reports ---------------------------------------------------------

@dataclass
class MetricReport:
    label: str
    bleu: float
    ter: float
    wer: float
    bleu_by_length: dict[str, float | None] = field(default_factory=dict)
    sentences: int = 0

    def to_record(self) -> str:
        return json.dumps({"label": self.label, "bleu": self.bleu,
                           "ter": self.ter, "wer": self.wer,
                           "bleu_by_length": self.bleu_by_length,
                           "sentences": self.sentences},
                          sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_record(cls, line: str) -> "MetricReport":
        d = json.loads(line)
        return cls(label=d["label"], bleu=d["bleu"], ter=d["ter"],
                   wer=d["wer"], bleu_by_length=d["bleu_by_length"],
                   sentences=d["sentences"])


def evaluate_pairs(hypotheses, references, label: str) -> MetricReport:
    """Corpus metrics plus BLEU broken down by reference-length bucket."""
    hypotheses = [tuple(h) for h in hypotheses]
    references = [tuple(r) for r in references]
    if len(hypotheses) != len(references):
        raise MetricError("length mismatch: %d hypotheses, %d references"
                          % (len(hypotheses), len(references)))
    if not hypotheses:
        raise MetricError("empty corpus")
    total_edits = 0
    total_ter = 0
    ref_tokens = 0
    for idx, (hyp, ref) in enumerate(zip(hypotheses, references)):
        if not ref:
            raise MetricError("empty reference at line %d" % (idx + 1))
        total_edits += edit_distance(hyp, ref)
        shifts, dist = _ter_edits(list(hyp), list(ref))
        total_ter += shifts + dist
        ref_tokens += len(ref)
    by_length = {}
    for name, lo, hi in LENGTH_BUCKETS:
        bucket = [(h, r) for h, r in zip(hypotheses, references)
                  if lo <= len(r) and (hi is None or len(r) <= hi)]
        if bucket:
            by_length[name] = bleu_corpus([h for h, _ in bucket],
                                          [r for _, r in bucket])
        else:
            by_length[name] = None
    return MetricReport(label=label,
                        bleu=bleu_corpus(hypotheses, references),
                        ter=total_ter / ref_tokens,
                        wer=total_edits / ref_tokens,
                        bleu_by_length=by_length,
                        sentences=len(hypotheses))


def evaluate_system(hypothesis_path, reference_path, label: str) -> MetricReport:
    """Score a hypothesis file against a reference file (whitespace tokens)."""
    with open(hypothesis_path, encoding="utf-8") as f:
        hyps = [line.split() for line in f.read().splitlines()]
    with open(reference_path, encoding="utf-8") as f:
        refs = [line.split() for line in f.read().splitlines()]
    if len(hyps) != len(refs):
        raise MetricError("line-count mismatch: %d vs %d" % (len(hyps), len(refs)))
    return evaluate_pairs(hyps, refs, label)


def render_comparison(reports) -> str:
    """Text table of several systems, one row each."""
    header = ["System", "Sentences", "BLEU", "TER", "WER"] + \
             ["BLEU %s" % name for name, _, _ in LENGTH_BUCKETS]
    rows = [header]
    for r in reports:
        row = [r.label, str(r.sentences), "%.2f" % r.bleu,
               "%.3f" % r.ter, "%.3f" % r.wer]
        for name, _, _ in LENGTH_BUCKETS:
            v = r.bleu_by_length.get(name)
            row.append("-" if v is None else "%.2f" % v)
        rows.append(row)
    widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + \
                [row[c].rjust(widths[c]) for c in range(1, len(row))]
        lines.append("  ".join(cells).rstrip())
        if i == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines) + "\n"
