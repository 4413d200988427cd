"""From sentence pairs to a scored phrase table.

The classic four-step recipe: train word-translation probabilities with
IBM Model 1 EM in both directions, take best-link alignments, symmetrize
with grow-diag-final, then extract every consistent phrase pair and score
it with relative frequencies plus lexical weights.
"""

from sitesmt.align import (FORWARD, GROW_DIAG_FINAL, REVERSE, symmetrize,
                           train_model1, viterbi_align)
from sitesmt.corpus import ParallelCorpus, SentencePair
from sitesmt.phrases import build_phrase_table, extract_phrases

corpus = ParallelCorpus(pairs=[
    SentencePair(("das", "haus"), ("the", "house")),
    SentencePair(("das", "buch"), ("the", "book")),
    SentencePair(("ein", "buch"), ("a", "book")),
])
swapped = ParallelCorpus(pairs=[SentencePair(p.target, p.source)
                                for p in corpus])

print("EM log-likelihood is non-decreasing:")
fwd = train_model1(corpus, 5, log=lambda i, ll: print("  iter %d: %.4f" % (i, ll)))
rev = train_model1(swapped, 5)

print("\nlearned t(e|f) for source word 'das':")
for e, p in sorted(fwd.row("das").items(), key=lambda kv: -kv[1]):
    print("  t(%-5s | das) = %.3f" % (e, p))

alignments = []
for pair in corpus:
    f = viterbi_align(fwd, pair, FORWARD)
    r = viterbi_align(rev, pair, REVERSE)
    merged = symmetrize(f, r, GROW_DIAG_FINAL)
    alignments.append(merged)
    print("\n%s ||| %s" % (" ".join(pair.source), " ".join(pair.target)))
    print("  forward %s  reverse %s  grow-diag-final %s"
          % (sorted(f.links), sorted(r.links), sorted(merged.links)))

spans = extract_phrases(corpus[0], alignments[0], max_len=2)
print("\nconsistent phrase spans of the first pair:", spans)

table = build_phrase_table(corpus, alignments, fwd, rev, max_len=2)
print("\nphrase table (src ||| tgt ||| phi_fwd phi_rev lex_fwd lex_rev):")
for src in sorted(table.entries):
    for tgt, scores in table.lookup(src):
        print("  %s ||| %s ||| %s" % (" ".join(src), " ".join(tgt),
                                      " ".join("%.3f" % s for s in scores)))
