"""Consistent phrase-pair extraction and phrase table construction.

A phrase pair is a source span and a target span such that no alignment
link leaves the rectangle they form and at least one link lies inside it.
Unaligned words at span boundaries are absorbed into additional pairs, which
falls out of enumerating every consistent rectangle.
"""

from __future__ import annotations

from collections import Counter, defaultdict

from .align import NULL, AlignmentMatrix, LexicalTable

PROB_FLOOR = 1e-12  # applied when scores are taken to log space downstream


class PhraseError(ValueError):
    pass


def extract_phrases(pair, alignment: AlignmentMatrix, max_len: int = 7):
    """All consistent phrase spans, as (i1, i2, j1, j2) with exclusive ends.

    Spans are limited to max_len words on both sides.  Equivalent to
    brute-force enumeration of all consistent rectangles (the test suite
    checks this), but skips source spans with no inside links early.
    """
    m, n = len(pair.source), len(pair.target)
    if alignment.m != m or alignment.n != n:
        raise PhraseError("alignment size %dx%d does not match pair %dx%d"
                          % (alignment.m, alignment.n, m, n))
    links = alignment.links
    aligned_cols = {j for _, j in links}
    spans = []
    for i1 in range(m):
        for i2 in range(i1 + 1, min(m, i1 + max_len) + 1):
            inside = [(i, j) for i, j in links if i1 <= i < i2]
            if not inside:
                continue
            j1 = min(j for _, j in inside)
            j2 = max(j for _, j in inside) + 1
            # consistency: no link to the target window from outside rows
            if any(j1 <= j < j2 and not (i1 <= i < i2) for i, j in links):
                continue
            # grow the target span over unaligned boundary words
            lo = j1
            while lo >= 0:
                if j2 - lo > max_len:
                    break
                hi = j2
                while hi <= n:
                    if hi - lo > max_len:
                        break
                    spans.append((i1, i2, lo, hi))
                    hi += 1
                    if hi > n or (hi - 1) in aligned_cols:
                        break
                lo -= 1
                if lo < 0 or lo in aligned_cols:
                    break
    return sorted(set(spans))


def _lexical_weight(src_words, tgt_words, inside_links, table: LexicalTable) -> float:
    """Koehn-style lexical weight: for each target word, average t over its
    linked source words (NULL when unlinked), then multiply."""
    by_tgt: dict[int, list[int]] = defaultdict(list)
    for i, j in inside_links:
        by_tgt[j].append(i)
    weight = 1.0
    for j, e in enumerate(tgt_words):
        if by_tgt.get(j):
            s = sum(table.prob(e, src_words[i]) for i in by_tgt[j])
            weight *= s / len(by_tgt[j])
        else:
            weight *= table.prob(e, NULL)
    return weight


class PhraseTable:
    """Scored phrase pairs: source phrase -> candidate target phrases."""

    def __init__(self, max_len: int = 7):
        self.max_len = max_len
        # source phrase -> {target phrase: [phi_fwd, phi_rev, lex_fwd, lex_rev]}
        self.entries: dict[tuple[str, ...], dict[tuple[str, ...], list[float]]] = {}

    def lookup(self, source_phrase) -> list[tuple[tuple[str, ...], list[float]]]:
        """Candidates sorted by phi(t|s) descending, ties lexicographic."""
        cands = self.entries.get(tuple(source_phrase))
        if not cands:
            return []
        return sorted(cands.items(), key=lambda kv: (-kv[1][0], kv[0]))

    def __contains__(self, source_phrase):
        return tuple(source_phrase) in self.entries

    def __len__(self):
        return sum(len(c) for c in self.entries.values())


def build_phrase_table(corpus, alignments, lexical_fwd: LexicalTable,
                       lexical_rev: LexicalTable, max_len: int = 7) -> PhraseTable:
    """Extract phrases from every pair and score them.

    phi scores are relative frequencies of extraction counts; lexical
    weights follow the averaged-t formula, keeping the best-scoring internal
    alignment when a pair is extracted with several different ones.
    """
    pairs = list(corpus)
    if len(pairs) != len(alignments):
        raise PhraseError("need one alignment per pair: %d pairs, %d alignments"
                          % (len(pairs), len(alignments)))
    pair_counts: Counter = Counter()
    src_counts: Counter = Counter()
    tgt_counts: Counter = Counter()
    lex_fwd: dict[tuple, float] = {}
    lex_rev: dict[tuple, float] = {}
    for pair, alignment in zip(pairs, alignments):
        for i1, i2, j1, j2 in extract_phrases(pair, alignment, max_len):
            src = pair.source[i1:i2]
            tgt = pair.target[j1:j2]
            key = (src, tgt)
            pair_counts[key] += 1
            src_counts[src] += 1
            tgt_counts[tgt] += 1
            inside = [(i - i1, j - j1) for i, j in alignment.links
                      if i1 <= i < i2 and j1 <= j < j2]
            lw_f = _lexical_weight(src, tgt, inside, lexical_fwd)
            lw_r = _lexical_weight(tgt, src, [(j, i) for i, j in inside], lexical_rev)
            if lw_f > lex_fwd.get(key, -1.0):
                lex_fwd[key] = lw_f
            if lw_r > lex_rev.get(key, -1.0):
                lex_rev[key] = lw_r
    table = PhraseTable(max_len)
    for (src, tgt), c in pair_counts.items():
        table.entries.setdefault(src, {})[tgt] = [
            c / src_counts[src],
            c / tgt_counts[tgt],
            lex_fwd[(src, tgt)],
            lex_rev[(src, tgt)],
        ]
    return table


# --- text format ------------------------------------------------------------
#
# One entry per line:
#   SRC TOKENS ||| TGT TOKENS ||| phi_fwd phi_rev lex_fwd lex_rev
# sorted by source phrase, then target phrase.

def write_phrase_table(table: PhraseTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for src in sorted(table.entries):
            for tgt in sorted(table.entries[src]):
                scores = table.entries[src][tgt]
                f.write("%s ||| %s ||| %s\n"
                        % (" ".join(src), " ".join(tgt),
                           " ".join("%.10g" % s for s in scores)))


def read_phrase_table(path, max_len: int = 7) -> PhraseTable:
    table = PhraseTable(max_len)
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(" ||| ")
            if len(parts) != 3:
                raise PhraseError("bad phrase table line %d" % lineno)
            src = tuple(parts[0].split())
            tgt = tuple(parts[1].split())
            scores = [float(x) for x in parts[2].split()]
            if len(scores) != 4:
                raise PhraseError("expected 4 scores on line %d" % lineno)
            table.entries.setdefault(src, {})[tgt] = scores
    return table
