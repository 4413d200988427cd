"""Log-linear phrase-based stack decoder.

Search organizes partial hypotheses into one stack per number of covered
source words, prunes each stack to a beam by score plus an admissible-ish
future-cost estimate, and recombines hypotheses that agree on coverage,
language-model context, and the end of the last translated span.

Seven features, all accumulated in log10 where applicable:
  lm            sentence log10 probability of the output
  phi_fwd/rev   log10 phrase translation scores
  lex_fwd/rev   log10 lexical weights
  word_penalty  -(number of output tokens)
  distortion    -sum of |start_k - end_{k-1} - 1| over applied phrases
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .corpus import BOS, EOS
from .lm import NGramModel
from .phrases import PROB_FLOOR, PhraseTable

FEATURE_NAMES = ("lm", "phi_fwd", "phi_rev", "lex_fwd", "lex_rev",
                 "word_penalty", "distortion")

OOV_SCORE = 1e-10  # per-feature phrase score for copied-through words


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureWeights:
    lm: float = 0.5
    phi_fwd: float = 1.0
    phi_rev: float = 0.3
    lex_fwd: float = 0.3
    lex_rev: float = 0.3
    word_penalty: float = 0.0
    distortion: float = 0.6

    def __post_init__(self):
        for name in FEATURE_NAMES:
            if not math.isfinite(getattr(self, name)):
                raise DecodeError("non-finite weight for %s" % name)

    def dot(self, features: dict[str, float]) -> float:
        return sum(getattr(self, name) * features[name] for name in FEATURE_NAMES)

    def replace(self, name: str, value: float) -> "FeatureWeights":
        return replace(self, **{name: value})


def write_weights(weights: FeatureWeights, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for name in FEATURE_NAMES:
            f.write("%s\t%.10g\n" % (name, getattr(weights, name)))


def read_weights(path) -> FeatureWeights:
    values = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            name, _, value = line.partition("\t")
            if name not in FEATURE_NAMES:
                raise DecodeError("unknown weight name %r on line %d" % (name, lineno))
            if name in values:
                raise DecodeError("duplicate weight name %r on line %d" % (name, lineno))
            values[name] = float(value)
    missing = [n for n in FEATURE_NAMES if n not in values]
    if missing:
        raise DecodeError("missing weights: %s" % ", ".join(missing))
    return FeatureWeights(**values)


@dataclass
class DecoderParams:
    beam: int = 100
    distortion_limit: int | None = 6  # None = unlimited
    max_phrase_len: int = 7

    def __post_init__(self):
        if self.beam < 1:
            raise DecodeError("beam must be >= 1")
        if self.distortion_limit is not None and self.distortion_limit < 0:
            raise DecodeError("distortion limit must be >= 0 or None")


@dataclass
class Hypothesis:
    coverage: int                       # bitmask over source positions
    covered: int                        # popcount of coverage
    context: tuple[str, ...]            # last order-1 output tokens
    prev_end: int                       # end index of last translated span
    out: tuple[str, ...]                # accumulated target tokens
    score: float
    pred: "Hypothesis | None" = None
    step: "tuple | None" = None         # ((i, j), src, tgt) of the applied phrase
    edge_score: float = 0.0             # score increment of the last step
    merged: list = field(default_factory=list)  # recombined-away alternatives


@dataclass
class Translation:
    tokens: tuple[str, ...]
    score: float
    features: dict[str, float]
    derivation: list  # [((i, j), src_phrase, tgt_phrase), ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def _floored_log10(x: float) -> float:
    return math.log10(max(x, PROB_FLOOR))


def translation_options(source, table: PhraseTable, params: DecoderParams):
    """Applicable phrases per source span, with pass-through entries for
    words having no single-word candidate."""
    src = tuple(source)
    n = len(src)
    options: dict[tuple[int, int], list[tuple[tuple[str, ...], list[float]]]] = {}
    for i in range(n):
        for j in range(i + 1, min(n, i + params.max_phrase_len) + 1):
            cands = table.lookup(src[i:j])
            if cands:
                options[(i, j)] = cands
    for i in range(n):
        if (i, i + 1) not in options:
            options[(i, i + 1)] = [((src[i],), [OOV_SCORE] * 4)]
    return options


def _derivation_features(derivation, lm: NGramModel) -> tuple[dict[str, float], tuple[str, ...]]:
    """Recompute the feature breakdown of a phrase sequence from scratch."""
    out: list[str] = []
    features = dict.fromkeys(FEATURE_NAMES, 0.0)
    prev_end = -1
    for (i, j), _src, tgt, scores in derivation:
        features["phi_fwd"] += _floored_log10(scores[0])
        features["phi_rev"] += _floored_log10(scores[1])
        features["lex_fwd"] += _floored_log10(scores[2])
        features["lex_rev"] += _floored_log10(scores[3])
        features["distortion"] -= abs(i - prev_end - 1)
        prev_end = j - 1
        out.extend(tgt)
    features["word_penalty"] = -float(len(out))
    features["lm"] = lm.sentence_log_prob(out)
    return features, tuple(out)


def _lm_increment(lm: NGramModel, context: tuple[str, ...], tokens) -> tuple[float, tuple[str, ...]]:
    total = 0.0
    ctx = context
    for tok in tokens:
        total += lm.log_prob(tok, ctx)
        ctx = (ctx + (tok,))[-(lm.order - 1):] if lm.order > 1 else ()
    return total, ctx


def _future_costs(source, options, lm: NGramModel, weights: FeatureWeights):
    """Best per-span score estimate (phrase features + unigram LM), combined
    over splits by dynamic programming."""
    n = len(source)
    fc = [[float("-inf")] * (n + 1) for _ in range(n + 1)]
    for (i, j), cands in options.items():
        best = float("-inf")
        for tgt, scores in cands:
            est = (weights.phi_fwd * _floored_log10(scores[0])
                   + weights.phi_rev * _floored_log10(scores[1])
                   + weights.lex_fwd * _floored_log10(scores[2])
                   + weights.lex_rev * _floored_log10(scores[3])
                   + weights.word_penalty * -float(len(tgt))
                   + weights.lm * sum(lm.log_prob(w) for w in tgt))
            best = max(best, est)
        fc[i][j] = best
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            for k in range(i + 1, j):
                if fc[i][k] + fc[k][j] > fc[i][j]:
                    fc[i][j] = fc[i][k] + fc[k][j]
    return fc


def _gap_future_cost(coverage: int, n: int, fc) -> float:
    total = 0.0
    i = 0
    while i < n:
        if coverage >> i & 1:
            i += 1
            continue
        j = i
        while j < n and not (coverage >> j & 1):
            j += 1
        total += fc[i][j]
        i = j
    return total


def _better(score_a: float, out_a: tuple, score_b: float, out_b: tuple) -> bool:
    """Deterministic hypothesis order: higher score, then lexicographic text."""
    if score_a != score_b:
        return score_a > score_b
    return out_a < out_b


def _search(source, table, lm, weights, params):
    src = tuple(source)
    if not src:
        raise DecodeError("empty source")
    n = len(src)
    options = translation_options(src, table, params)
    fc = _future_costs(src, options, lm, weights)
    ctx0 = (BOS,) if lm.order > 1 else ()
    root = Hypothesis(coverage=0, covered=0, context=ctx0, prev_end=-1,
                      out=(), score=0.0)
    stacks: list[dict] = [dict() for _ in range(n + 1)]
    stacks[0][(0, ctx0, -1)] = root
    spans = sorted(options)
    for covered in range(n):
        stack = stacks[covered]
        if not stack:
            continue
        ranked = sorted(stack.values(),
                        key=lambda h: (-(h.score + _gap_future_cost(h.coverage, n, fc)),
                                       h.out))
        for hyp in ranked[:params.beam]:
            leftmost = _leftmost_gap(hyp.coverage, n)
            for (i, j) in spans:
                mask = ((1 << (j - i)) - 1) << i
                if hyp.coverage & mask:
                    continue
                if (params.distortion_limit is not None
                        and abs(i - hyp.prev_end - 1) > params.distortion_limit
                        and i != leftmost):
                    continue
                for tgt, scores in options[(i, j)]:
                    _extend(hyp, i, j, mask, tgt, scores, src, lm, weights,
                            stacks, n)
    return stacks, options, fc


def _leftmost_gap(coverage: int, n: int) -> int:
    for i in range(n):
        if not (coverage >> i & 1):
            return i
    return n


def _extend(hyp, i, j, mask, tgt, scores, src, lm, weights, stacks, n):
    lm_lp, new_ctx = _lm_increment(lm, hyp.context, tgt)
    inc = (weights.lm * lm_lp
           + weights.phi_fwd * _floored_log10(scores[0])
           + weights.phi_rev * _floored_log10(scores[1])
           + weights.lex_fwd * _floored_log10(scores[2])
           + weights.lex_rev * _floored_log10(scores[3])
           + weights.word_penalty * -float(len(tgt))
           + weights.distortion * -abs(i - hyp.prev_end - 1))
    covered = hyp.covered + (j - i)
    if covered == n:
        # end-of-sentence term folds into the final edge
        inc += weights.lm * lm.log_prob(EOS, new_ctx)
    new = Hypothesis(coverage=hyp.coverage | mask, covered=covered,
                     context=new_ctx, prev_end=j - 1, out=hyp.out + tuple(tgt),
                     score=hyp.score + inc, pred=hyp,
                     step=((i, j), src[i:j], tuple(tgt), tuple(scores)),
                     edge_score=inc)
    key = (new.coverage, new.context, new.prev_end)
    stack = stacks[covered]
    old = stack.get(key)
    if old is None:
        stack[key] = new
    elif _better(new.score, new.out, old.score, old.out):
        new.merged = old.merged + [old]
        old.merged = []
        stack[key] = new
    else:
        old.merged.append(new)


def translate(source, table: PhraseTable, lm: NGramModel,
              weights: FeatureWeights, params: DecoderParams | None = None) -> Translation:
    """Best-scoring translation of one tokenized source sentence."""
    if params is None:
        params = DecoderParams()
    stacks, _options, _fc = _search(source, table, lm, weights, params)
    final = stacks[-1]
    if not final:
        raise DecodeError("no complete hypothesis found")
    best = None
    for hyp in final.values():
        if best is None or _better(hyp.score, hyp.out, best.score, best.out):
            best = hyp
    deriv = []
    node = best
    while node.pred is not None:
        deriv.append(node.step)
        node = node.pred
    deriv.reverse()
    features, out = _derivation_features(deriv, lm)
    return Translation(tokens=out, score=weights.dot(features),
                       features=features, derivation=[d[:3] for d in deriv])


def decode_nbest(source, table: PhraseTable, lm: NGramModel,
                 weights: FeatureWeights, params: DecoderParams | None = None,
                 n: int = 1) -> list[Translation]:
    """Up to n distinct translations, best first (may return fewer)."""
    if n < 1:
        raise DecodeError("n must be >= 1")
    if params is None:
        params = DecoderParams()
    stacks, _options, _fc = _search(source, table, lm, weights, params)
    final = stacks[-1]
    if not final:
        raise DecodeError("no complete hypothesis found")
    # several derivations can share one target string, so grow the per-node
    # path budget until the n-th distinct string provably beats every path
    # still unenumerated (bounded by the worst score a truncated node kept)
    k = n
    while True:
        memo: dict[int, list] = {}
        paths: list[tuple[float, tuple[str, ...], tuple]] = []
        cutoff = None
        for hyp in final.values():
            got = _top_paths(hyp, k, memo)
            if len(got) == k:
                cutoff = got[-1][0] if cutoff is None else max(cutoff, got[-1][0])
            paths.extend(got)
        best_by_string: dict[tuple[str, ...], tuple[float, tuple]] = {}
        for score, out, deriv in paths:
            cur = best_by_string.get(out)
            if cur is None or score > cur[0]:
                best_by_string[out] = (score, deriv)
        ranked = sorted(best_by_string.items(), key=lambda kv: (-kv[1][0], kv[0]))
        if cutoff is None:  # every path enumerated
            break
        if len(ranked) >= n and ranked[n - 1][1][0] > cutoff:
            break
        k *= 2
    results = []
    for out, (_search_score, deriv) in ranked[:n]:
        features, out_tokens = _derivation_features(deriv, lm)
        score = weights.dot(features)
        results.append(Translation(tokens=out_tokens, score=score,
                                   features=features,
                                   derivation=[d[:3] for d in deriv]))
    return results


def _top_paths(node: Hypothesis, k: int, memo: dict):
    """Up to k best (score, tokens, derivation) paths reaching this node's
    state, enumerated through the recombination lattice."""
    key = id(node)
    if key in memo:
        return memo[key]
    if node.pred is None:
        result = [(0.0, (), ())]
    else:
        cands = []
        for variant in [node] + node.merged:
            for score, out, deriv in _top_paths(variant.pred, k, memo):
                cands.append((score + variant.edge_score,
                              out + variant.step[2],
                              deriv + (variant.step,)))
        cands.sort(key=lambda c: (-c[0], c[1]))
        result = cands[:k]
    memo[key] = result
    return result


def score_breakdown(translation: Translation) -> dict[str, float]:
    """Per-feature values of a produced translation; dot(weights, breakdown)
    equals the reported score."""
    return dict(translation.features)
