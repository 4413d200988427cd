"""Independent reference implementations used to cross-check the package.

Everything here is written as plainly as possible (full matrices, exhaustive
enumeration, dense tables) and never calls the optimized code paths it
verifies.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter


# --- edit distance / WER ------------------------------------------------------

def lev_oracle(a, b) -> int:
    """Full-matrix Levenshtein, indexed recursion."""
    a, b = list(a), list(b)
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            d[i][j] = min(d[i - 1][j] + 1,
                          d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[m][n]


# --- BLEU -----------------------------------------------------------------------

def bleu_oracle(hypotheses, references, max_n: int = 4) -> float:
    """Direct-counting corpus BLEU, written independently of the package."""
    stats = {n: [0, 0] for n in range(1, max_n + 1)}  # n -> [clipped, total]
    c = sum(len(h) for h in hypotheses)
    r = sum(len(rf) for rf in references)
    for hyp, ref in zip(hypotheses, references):
        for n in range(1, max_n + 1):
            hyp_ngrams = [tuple(hyp[i:i + n]) for i in range(len(hyp) - n + 1)]
            ref_ngrams = [tuple(ref[i:i + n]) for i in range(len(ref) - n + 1)]
            ref_counts = Counter(ref_ngrams)
            clipped = 0
            for gram, count in Counter(hyp_ngrams).items():
                clipped += min(count, ref_counts.get(gram, 0))
            stats[n][0] += clipped
            stats[n][1] += len(hyp_ngrams)
    product = 1.0
    for n in range(1, max_n + 1):
        clipped, total = stats[n]
        if total == 0 or clipped == 0:
            return 0.0
        product *= (clipped / total) ** (1.0 / max_n)
    bp = math.exp(1 - r / c) if c < r else 1.0
    return 100.0 * product * bp


# --- IBM Model 1 ----------------------------------------------------------------

NULL = "<null>"


def model1_reference_em(pairs, iterations: int):
    """Dense textbook EM over the full vocabulary; returns the t table as a
    dict (f, e) -> prob."""
    src_vocab = {NULL} | {f for s, _ in pairs for f in s}
    tgt_vocab = {e for _, t in pairs for e in t}
    t = {(f, e): 1.0 / len(tgt_vocab) for f in src_vocab for e in tgt_vocab}
    for _ in range(iterations):
        count = {key: 0.0 for key in t}
        total = {f: 0.0 for f in src_vocab}
        for s, tgt in pairs:
            src = [NULL] + list(s)
            for e in tgt:
                z = sum(t[(f, e)] for f in src)
                for f in src:
                    count[(f, e)] += t[(f, e)] / z
                    total[f] += t[(f, e)] / z
        t = {(f, e): (count[(f, e)] / total[f] if total[f] > 0 else 0.0)
             for (f, e) in t}
    return t


def model1_loglik(prob_fn, pairs) -> float:
    """Corpus log-likelihood under t; prob_fn(e, f) -> t(e|f)."""
    ll = 0.0
    for s, tgt in pairs:
        src = [NULL] + list(s)
        for e in tgt:
            z = sum(prob_fn(e, f) for f in src)
            ll += math.log(z / len(src))
    return ll


# --- phrase extraction ----------------------------------------------------------

def consistent_rectangles(m: int, n: int, links, max_len: int):
    """Every (i1, i2, j1, j2) span rectangle that contains at least one link
    and that no link leaves."""
    links = set(links)
    out = []
    for i1 in range(m):
        for i2 in range(i1 + 1, min(m, i1 + max_len) + 1):
            for j1 in range(n):
                for j2 in range(j1 + 1, min(n, j1 + max_len) + 1):
                    inside = False
                    ok = True
                    for (i, j) in links:
                        row_in = i1 <= i < i2
                        col_in = j1 <= j < j2
                        if row_in and col_in:
                            inside = True
                        elif row_in != col_in:
                            ok = False
                            break
                    if ok and inside:
                        out.append((i1, i2, j1, j2))
    return sorted(out)


# --- decoder ---------------------------------------------------------------------

def enumerate_derivations(n: int, options):
    """All (ordered phrase applications) covering positions 0..n-1.

    options: dict (i, j) -> candidate list.  Yields tuples of
    ((i, j), candidate) steps in application order.
    """
    spans = sorted(options)

    def rec(coverage, steps):
        if coverage == (1 << n) - 1:
            yield tuple(steps)
            return
        for (i, j) in spans:
            mask = ((1 << (j - i)) - 1) << i
            if coverage & mask:
                continue
            for cand in options[(i, j)]:
                steps.append(((i, j), cand))
                yield from rec(coverage | mask, steps)
                steps.pop()

    yield from rec(0, [])


def brute_force_decode(source, options, lm_model, weights, floor=1e-12):
    """Exhaustive best (score, output tokens) over all derivations.

    Scores each derivation by summing features phrase by phrase in the same
    left-to-right order the published formulas state, then dotting with the
    weights.
    """
    def flog(x):
        return math.log10(max(x, floor))

    best = None
    for steps in enumerate_derivations(len(source), options):
        feats = {"lm": 0.0, "phi_fwd": 0.0, "phi_rev": 0.0, "lex_fwd": 0.0,
                 "lex_rev": 0.0, "word_penalty": 0.0, "distortion": 0.0}
        out = []
        prev_end = -1
        for (i, j), (tgt, scores) in steps:
            feats["phi_fwd"] += flog(scores[0])
            feats["phi_rev"] += flog(scores[1])
            feats["lex_fwd"] += flog(scores[2])
            feats["lex_rev"] += flog(scores[3])
            feats["distortion"] -= abs(i - prev_end - 1)
            prev_end = j - 1
            out.extend(tgt)
        feats["word_penalty"] = -float(len(out))
        feats["lm"] = lm_model.sentence_log_prob(out)
        score = sum(getattr(weights, k) * v for k, v in feats.items())
        key = (score, tuple(out))
        if best is None or score > best[0] or (score == best[0]
                                               and tuple(out) < best[1]):
            best = key
    return best


def brute_force_nbest(source, options, lm_model, weights, n, floor=1e-12):
    """Top-n distinct output strings by exhaustive enumeration."""
    def flog(x):
        return math.log10(max(x, floor))

    best_by_out = {}
    for steps in enumerate_derivations(len(source), options):
        out = []
        prev_end = -1
        feats = {"lm": 0.0, "phi_fwd": 0.0, "phi_rev": 0.0, "lex_fwd": 0.0,
                 "lex_rev": 0.0, "word_penalty": 0.0, "distortion": 0.0}
        for (i, j), (tgt, scores) in steps:
            feats["phi_fwd"] += flog(scores[0])
            feats["phi_rev"] += flog(scores[1])
            feats["lex_fwd"] += flog(scores[2])
            feats["lex_rev"] += flog(scores[3])
            feats["distortion"] -= abs(i - prev_end - 1)
            prev_end = j - 1
            out.extend(tgt)
        feats["word_penalty"] = -float(len(out))
        feats["lm"] = lm_model.sentence_log_prob(out)
        score = sum(getattr(weights, k) * v for k, v in feats.items())
        out = tuple(out)
        if out not in best_by_out or score > best_by_out[out]:
            best_by_out[out] = score
    ranked = sorted(best_by_out.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


# --- TER -------------------------------------------------------------------------

def ter_shift_candidates(hyp, ref):
    """Same move set the greedy search uses (kept in lockstep by the tests)."""
    ref_subs = {tuple(ref[i:i + L])
                for L in range(1, len(ref) + 1)
                for i in range(len(ref) - L + 1)}
    n = len(hyp)
    for L in range(1, n + 1):
        for i in range(n - L + 1):
            block = tuple(hyp[i:i + L])
            if block not in ref_subs:
                continue
            if tuple(ref[i:i + L]) == block:
                continue
            rest = hyp[:i] + hyp[i + L:]
            for k in range(len(rest) + 1):
                if k == i:
                    continue
                yield tuple(rest[:k]) + block + tuple(rest[k:])


def ter_optimal(hyp, ref) -> float:
    """Minimum (shifts + edit distance) / |ref| over all shift sequences,
    breadth-first over reachable hypothesis states."""
    hyp = tuple(hyp)
    ref = list(ref)
    best = lev_oracle(hyp, ref)
    dist = {hyp: 0}
    frontier = [hyp]
    depth = 0
    while frontier and depth + 1 < best:
        depth += 1
        nxt = []
        for state in frontier:
            for cand in ter_shift_candidates(list(state), ref):
                if cand in dist:
                    continue
                dist[cand] = depth
                total = depth + lev_oracle(cand, ref)
                if total < best:
                    best = total
                nxt.append(cand)
        frontier = nxt
    return best / len(ref)


# --- LM --------------------------------------------------------------------------

def context_prob_sum(model, context) -> float:
    """Sum of conditional probabilities over the full event space."""
    total = 0.0
    for w in model.events():
        total += 10.0 ** model.log_prob(w, context)
    return total
