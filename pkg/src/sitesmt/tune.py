"""Coordinate-search weight tuning against corpus WER on a dev set.

For each feature in a fixed order, the current weight is rescaled by
{0.25, 0.5, 1, 2, 4} and their sign-flipped counterparts; the candidate
with the lowest dev WER is kept if it strictly improves.  Passes repeat
until a full pass yields no improvement, capped at five passes.  The tuner
only ever accepts improvements, so the final dev WER never exceeds the
initial one.
"""

from __future__ import annotations

from .decoder import FEATURE_NAMES, DecoderParams, FeatureWeights, translate
from .metrics import MetricError, edit_distance

MULTIPLIERS = (0.25, 0.5, 1.0, 2.0, 4.0, -0.25, -0.5, -1.0, -2.0, -4.0)
MAX_PASSES = 5


def corpus_wer(dev_pairs, table, lm, weights: FeatureWeights,
               params: DecoderParams) -> float:
    """Total edit distance of 1-best decodings over total reference length."""
    edits = 0
    ref_len = 0
    for source, reference in dev_pairs:
        hyp = translate(source, table, lm, weights, params).tokens
        edits += edit_distance(hyp, reference)
        ref_len += len(reference)
    return edits / ref_len


def tune_weights(dev_pairs, table, lm, initial: FeatureWeights,
                 params: DecoderParams | None = None,
                 log=None) -> FeatureWeights:
    """Minimize dev WER by deterministic coordinate search.

    dev_pairs is a sequence of (source tokens, reference tokens); the caller
    guarantees it is disjoint from the training data.
    """
    dev_pairs = [(tuple(s), tuple(r)) for s, r in dev_pairs]
    if not dev_pairs:
        raise MetricError("empty dev corpus")
    if any(not r for _, r in dev_pairs):
        raise MetricError("empty reference in dev corpus")
    if params is None:
        params = DecoderParams()
    weights = initial
    best_wer = corpus_wer(dev_pairs, table, lm, weights, params)
    if log:
        log("initial WER %.6f" % best_wer)
    for sweep in range(MAX_PASSES):
        improved = False
        for name in FEATURE_NAMES:
            current = getattr(weights, name)
            best_value = current
            for mult in MULTIPLIERS:
                value = current * mult
                if value == current:
                    continue
                cand_wer = corpus_wer(dev_pairs, table, lm,
                                      weights.replace(name, value), params)
                if cand_wer < best_wer:
                    best_wer = cand_wer
                    best_value = value
            if best_value != current:
                weights = weights.replace(name, best_value)
                improved = True
                if log:
                    log("pass %d: %s -> %.6g (WER %.6f)"
                        % (sweep + 1, name, best_value, best_wer))
        if not improved:
            break
    return weights
