"""Word alignment: IBM Model 1 EM training, Viterbi links, symmetrization.

The lexical table t(e|f) gives the probability of a target word e being the
translation of a source word f.  A NULL source token is prepended to every
source sentence so target words can stay unlinked.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

NULL = "<null>"

FORWARD = "fwd"   # target words pick a source word (table is t(target|source))
REVERSE = "rev"   # source words pick a target word (table is t(source|target))


class AlignError(ValueError):
    pass


class LexicalTable:
    """Sparse t(e|f) map; every source row sums to 1 after EM."""

    def __init__(self):
        self.t: dict[str, dict[str, float]] = {}

    def prob(self, e: str, f: str) -> float:
        return self.t.get(f, {}).get(e, 0.0)

    def row(self, f: str) -> dict[str, float]:
        return self.t.get(f, {})

    def __len__(self):
        return sum(len(r) for r in self.t.values())


@dataclass(frozen=True)
class AlignmentMatrix:
    """Set of (source index, target index) links for one sentence pair."""
    m: int  # source length
    n: int  # target length
    links: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        for i, j in self.links:
            if not (0 <= i < self.m and 0 <= j < self.n):
                raise AlignError("link (%d,%d) outside %dx%d" % (i, j, self.m, self.n))


def _em_expectations(pairs, table: LexicalTable | None, uniform: float):
    """One E-step; returns (counts, totals, log-likelihood of the input table).

    Expected counts are additive over corpus partitions, so partitioned
    E-steps merge into the same model.
    """
    counts: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
    totals: dict[str, float] = defaultdict(float)
    loglik = 0.0
    for pair in pairs:
        src = (NULL,) + tuple(pair.source)
        for e in pair.target:
            if table is None:
                probs = [uniform] * len(src)
            else:
                probs = [table.prob(e, f) for f in src]
            z = sum(probs)
            loglik += math.log(z / len(src))
            for f, p in zip(src, probs):
                d = p / z
                counts[f][e] += d
                totals[f] += d
    return counts, totals, loglik


def _maximize(counts, totals) -> LexicalTable:
    table = LexicalTable()
    for f, row in counts.items():
        tot = totals[f]
        table.t[f] = {e: c / tot for e, c in row.items()}
    return table


def train_model1(corpus, iterations: int = 5, log=None) -> LexicalTable:
    """EM from uniform initialization; deterministic.

    Corpus log-likelihood is non-decreasing across iterations (EM guarantee,
    verified by the test suite with an independent evaluator).  When given,
    ``log(iteration, loglik)`` receives the likelihood of the table entering
    each iteration, at no extra cost.
    """
    pairs = list(corpus)
    if not pairs:
        raise AlignError("empty corpus")
    if iterations < 1:
        raise AlignError("iterations must be >= 1")
    vocab_tgt = {e for p in pairs for e in p.target}
    uniform = 1.0 / len(vocab_tgt)
    table = None
    for iteration in range(1, iterations + 1):
        counts, totals, loglik = _em_expectations(pairs, table, uniform)
        if log:
            log(iteration, loglik)
        table = _maximize(counts, totals)
    return table


def log_likelihood(table: LexicalTable, corpus) -> float:
    """Model 1 corpus log-likelihood (natural log, constant terms dropped)."""
    total = 0.0
    for pair in corpus:
        src = (NULL,) + tuple(pair.source)
        for e in pair.target:
            z = sum(table.prob(e, f) for f in src)
            total += math.log(z / len(src)) if z > 0 else float("-inf")
    return total


def viterbi_align(table: LexicalTable, pair, direction: str = FORWARD) -> AlignmentMatrix:
    """Best-link alignment: each word of the generated side links to its
    argmax on the other side, NULL meaning no link; ties go to the leftmost
    position."""
    m, n = len(pair.source), len(pair.target)
    links = set()
    if direction == FORWARD:
        outer, inner = pair.target, pair.source
    elif direction == REVERSE:
        outer, inner = pair.source, pair.target
    else:
        raise AlignError("direction must be %r or %r" % (FORWARD, REVERSE))
    for j, e in enumerate(outer):
        best_i, best_p = None, table.prob(e, NULL)
        for i, f in enumerate(inner):
            p = table.prob(e, f)
            if p > best_p:
                best_i, best_p = i, p
        if best_i is not None:
            links.add((best_i, j) if direction == FORWARD else (j, best_i))
    return AlignmentMatrix(m, n, frozenset(links))


INTERSECTION = "intersection"
UNION = "union"
GROW_DIAG_FINAL = "grow-diag-final"

_NEIGHBORHOOD = ((-1, -1), (-1, 0), (-1, 1), (0, -1),
                 (0, 1), (1, -1), (1, 0), (1, 1))


def symmetrize(forward: AlignmentMatrix, reverse: AlignmentMatrix,
               heuristic: str = GROW_DIAG_FINAL) -> AlignmentMatrix:
    """Merge two directional alignments into one."""
    if (forward.m, forward.n) != (reverse.m, reverse.n):
        raise AlignError("dimension mismatch: %dx%d vs %dx%d"
                         % (forward.m, forward.n, reverse.m, reverse.n))
    m, n = forward.m, forward.n
    inter = forward.links & reverse.links
    union = forward.links | reverse.links
    if heuristic == INTERSECTION:
        return AlignmentMatrix(m, n, inter)
    if heuristic == UNION:
        return AlignmentMatrix(m, n, union)
    if heuristic != GROW_DIAG_FINAL:
        raise AlignError("unknown heuristic %r" % heuristic)

    links = set(inter)
    rows = {i for i, _ in links}
    cols = {j for _, j in links}
    # grow-diag: repeatedly adopt union links that touch the current
    # alignment diagonally or orthogonally and fill an uncovered row/column
    grew = True
    while grew:
        grew = False
        for i, j in sorted(union - links):
            if i in rows and j in cols:
                continue
            if any((i + di, j + dj) in links for di, dj in _NEIGHBORHOOD):
                links.add((i, j))
                rows.add(i)
                cols.add(j)
                grew = True
    # final: remaining union links whose row or column is still uncovered
    for i, j in sorted(union - links):
        if i not in rows or j not in cols:
            links.add((i, j))
            rows.add(i)
            cols.add(j)
    return AlignmentMatrix(m, n, frozenset(links))
