"""Backoff n-gram language model (default order 5) with ARPA text I/O.

Smoothing is interpolated absolute discounting: one discount per order,
estimated from the global count-of-counts as D = n1 / (n1 + 2*n2), clamped
to [0.1, 0.9].  Probabilities are stored in log10 (ARPA convention).

Sentences are padded with a single begin symbol and terminated with the end
symbol; the begin symbol is context only and is never predicted, so every
conditional distribution is taken over the event space
(observed tokens + <unk> + </s>).
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .corpus import BOS, EOS, UNK

LOG10_ZERO = -99.0  # conventional stand-in for log10(0) in ARPA files

DISCOUNT_FLOOR = 0.1
DISCOUNT_CAP = 0.9


class LmError(ValueError):
    """Raised for invalid training input or malformed ARPA files."""


@dataclass
class NGramModel:
    order: int
    # log10 probability per stored n-gram (token tuples, length 1..order)
    probs: dict[tuple[str, ...], float] = field(default_factory=dict)
    # log10 backoff weight per stored context (absent means 0.0)
    backoffs: dict[tuple[str, ...], float] = field(default_factory=dict)

    def events(self) -> list[str]:
        """Predictable tokens: every stored unigram except the begin symbol."""
        return [g[0] for g in self.probs if len(g) == 1 and g[0] != BOS]

    def contexts(self) -> set[tuple[str, ...]]:
        """Every stored context, i.e. every proper prefix of a stored n-gram."""
        return {g[:-1] for g in self.probs if len(g) > 1}

    def log_prob(self, token: str, context: tuple[str, ...] = ()) -> float:
        """log10 P(token | context), longest matching suffix with backoff."""
        if (token,) not in self.probs:
            token = UNK
        ctx = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        backoff = 0.0
        while True:
            gram = ctx + (token,)
            if gram in self.probs:
                return backoff + self.probs[gram]
            if not ctx:
                # unigrams always cover the event space via <unk>
                return backoff + self.probs[(UNK,)]
            backoff += self.backoffs.get(ctx, 0.0)
            ctx = ctx[1:]

    def sentence_log_prob(self, tokens) -> float:
        """log10 probability of a sentence, begin-padded, end-terminated.

        Note: log-probs of two sentences do not add up to the log-prob of
        their concatenation, because context crosses the boundary.
        """
        history = (BOS,) + tuple(tokens)
        total = 0.0
        for i, tok in enumerate(tuple(tokens) + (EOS,)):
            total += self.log_prob(tok, history[:i + 1])
        return total

    def perplexity(self, sentences) -> float:
        total_lp = 0.0
        total_tokens = 0
        for sent in sentences:
            total_lp += self.sentence_log_prob(sent)
            total_tokens += len(sent) + 1  # sentence end counts as an event
        if total_tokens == 0:
            raise LmError("empty corpus")
        return 10.0 ** (-total_lp / total_tokens)


def collect_counts(sentences, order: int) -> Counter:
    """Sliding-window n-gram counts over begin-padded, end-terminated text.

    Counts are plain integers, so partial counts from corpus partitions can
    be merged with Counter addition and yield the same model.
    """
    counts: Counter = Counter()
    for sent in sentences:
        padded = (BOS,) + tuple(sent) + (EOS,)
        n = len(padded)
        for k in range(1, order + 1):
            for i in range(n - k + 1):
                counts[padded[i:i + k]] += 1
    return counts


def _discounts(counts: Counter, order: int) -> list[float]:
    """Per-order absolute discount from the global count-of-counts."""
    n1 = [0] * (order + 1)
    n2 = [0] * (order + 1)
    for gram, c in counts.items():
        if len(gram) == 1 and gram[0] == BOS:
            continue
        if c == 1:
            n1[len(gram)] += 1
        elif c == 2:
            n2[len(gram)] += 1
    discounts = [0.0]
    for k in range(1, order + 1):
        denom = n1[k] + 2 * n2[k]
        d = n1[k] / denom if denom else DISCOUNT_FLOOR
        discounts.append(min(DISCOUNT_CAP, max(DISCOUNT_FLOOR, d)))
    return discounts


def train_ngram(sentences, order: int = 5) -> NGramModel:
    """Train an order-N model; deterministic for a fixed corpus."""
    if not 1 <= order <= 9:
        raise LmError("order must be in 1..9, got %d" % order)
    sentences = [tuple(s) for s in sentences if len(s) > 0]
    if not sentences:
        raise LmError("empty training set")
    counts = collect_counts(sentences, order)
    return model_from_counts(counts, order)


def model_from_counts(counts: Counter, order: int) -> NGramModel:
    """Build the smoothed model from raw n-gram counts."""
    discounts = _discounts(counts, order)

    # unigram level: interpolate with the uniform distribution over the
    # event space (observed tokens + </s> are in the counts; <unk> is not)
    uni_total = 0
    events = []
    for gram, c in counts.items():
        if len(gram) != 1 or gram[0] == BOS:
            continue
        uni_total += c
        events.append(gram[0])
    events.append(UNK)
    d1 = discounts[1]
    distinct = len(events) - 1  # observed types carrying the discount
    reserved_mass = d1 * distinct / uni_total
    uniform = 1.0 / len(events)
    probs: dict[tuple[str, ...], float] = {}
    p_uni: dict[str, float] = {}
    for w in events:
        c = counts.get((w,), 0)
        p = max(c - d1, 0.0) / uni_total + reserved_mass * uniform
        p_uni[w] = p
        probs[(w,)] = math.log10(p)
    if (BOS,) in counts:
        probs[(BOS,)] = LOG10_ZERO  # context only, never predicted

    # higher orders: interpolated absolute discounting, stored together
    # with the exactly-normalizing backoff weight of each context
    backoffs: dict[tuple[str, ...], float] = {}
    interpolated = {(w,): p for w, p in p_uni.items()}
    for k in range(2, order + 1):
        ctx_total: dict[tuple[str, ...], int] = defaultdict(int)
        ctx_distinct: dict[tuple[str, ...], int] = defaultdict(int)
        for gram, c in counts.items():
            if len(gram) != k:
                continue
            ctx_total[gram[:-1]] += c
            ctx_distinct[gram[:-1]] += 1
        dk = discounts[k]
        gamma = {ctx: dk * ctx_distinct[ctx] / ctx_total[ctx] for ctx in ctx_total}
        next_interp: dict[tuple[str, ...], float] = {}
        for gram, c in counts.items():
            if len(gram) != k:
                continue
            ctx = gram[:-1]
            lower = interpolated[gram[1:]]
            p = (c - dk) / ctx_total[ctx] + gamma[ctx] * lower
            next_interp[gram] = p
            probs[gram] = math.log10(p)
        for ctx, g in gamma.items():
            backoffs[ctx] = math.log10(g)
        interpolated = next_interp

    return NGramModel(order=order, probs=probs, backoffs=backoffs)


# --- ARPA text format ------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.7g" % x


def write_arpa(model: NGramModel, path) -> None:
    """Serialize in ARPA layout; entries sorted for reproducible bytes."""
    by_order: dict[int, list[tuple[tuple[str, ...], float]]] = defaultdict(list)
    for gram, lp in model.probs.items():
        by_order[len(gram)].append((gram, lp))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\\data\\\n")
        for k in range(1, model.order + 1):
            f.write("ngram %d=%d\n" % (k, len(by_order.get(k, []))))
        for k in range(1, model.order + 1):
            f.write("\n\\%d-grams:\n" % k)
            for gram, lp in sorted(by_order.get(k, [])):
                line = "%s\t%s" % (_fmt(lp), " ".join(gram))
                if k < model.order and gram in model.backoffs:
                    line += "\t%s" % _fmt(model.backoffs[gram])
                f.write(line + "\n")
        f.write("\n\\end\\\n")


def read_arpa(path) -> NGramModel:
    """Parse an ARPA file; validates declared counts and the end marker."""
    with open(path, encoding="utf-8") as f:
        lines = [ln.rstrip("\n") for ln in f]
    it = iter(enumerate(lines, 1))
    declared: dict[int, int] = {}
    for lineno, line in it:
        if line.strip() == "\\data\\":
            break
    else:
        raise LmError("malformed ARPA: missing \\data\\ header")
    for lineno, line in it:
        line = line.strip()
        if not line:
            continue
        if line.startswith("ngram "):
            k, _, count = line[len("ngram "):].partition("=")
            declared[int(k)] = int(count)
        else:
            break
    else:
        raise LmError("malformed ARPA: no n-gram sections")
    if not declared:
        raise LmError("malformed ARPA: no ngram count lines")
    order = max(declared)
    probs: dict[tuple[str, ...], float] = {}
    backoffs: dict[tuple[str, ...], float] = {}
    seen: Counter = Counter()
    current_k = None
    ended = False
    # `line` currently holds the first section header
    while True:
        line = line.strip()
        if line == "\\end\\":
            ended = True
            break
        # section headers never contain a tab; entries always do
        if line.endswith("-grams:") and line.startswith("\\") and "\t" not in line:
            current_k = int(line[1:-len("-grams:")])
            if current_k not in declared:
                raise LmError("malformed ARPA: undeclared section %d" % current_k)
        elif line:
            if current_k is None:
                raise LmError("malformed ARPA: entry before any section")
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise LmError("malformed ARPA entry at line %d" % lineno)
            gram = tuple(fields[1].split(" "))
            if len(gram) != current_k:
                raise LmError("ARPA entry of wrong order at line %d" % lineno)
            probs[gram] = float(fields[0])
            if len(fields) == 3:
                backoffs[gram] = float(fields[2])
            seen[current_k] += 1
        nxt = next(it, None)
        if nxt is None:
            break
        lineno, line = nxt
    if not ended:
        raise LmError("malformed ARPA: missing \\end\\ marker")
    for k, n in declared.items():
        if seen.get(k, 0) != n:
            raise LmError("ARPA count mismatch for order %d: declared %d, found %d"
                          % (k, n, seen.get(k, 0)))
    return NGramModel(order=order, probs=probs, backoffs=backoffs)
