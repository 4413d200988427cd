"""Stack decoding: translate with a log-linear model over seven features.

The decoder segments the source into phrases, translates each from the
phrase table, and orders the output, searching hypothesis stacks with
beam pruning, recombination and a precomputed future-cost table.  Every
output comes with its per-feature score breakdown.
"""

from sitesmt import lm
from sitesmt.decoder import (DecoderParams, FeatureWeights, decode_nbest,
                             translate)
from sitesmt.phrases import PhraseTable

# a small hand-built engine: German-ish to English-ish
table = PhraseTable()
table.entries = {
    ("das",): {("the",): [0.7, 0.6, 0.8, 0.7], ("this",): [0.3, 0.4, 0.5, 0.4]},
    ("haus",): {("house",): [0.8, 0.9, 0.9, 0.8], ("home",): [0.2, 0.5, 0.6, 0.5]},
    ("das", "haus"): {("the", "house"): [0.9, 0.7, 0.7, 0.6]},
    ("ist",): {("is",): [0.9, 0.9, 0.9, 0.9]},
    ("klein",): {("small",): [0.6, 0.8, 0.8, 0.8], ("little",): [0.4, 0.7, 0.7, 0.7]},
}
model = lm.train_ngram([("the", "house", "is", "small"),
                        ("the", "house", "is", "little"),
                        ("this", "home", "is", "small")] * 3, order=3)
weights = FeatureWeights()
params = DecoderParams(beam=50, distortion_limit=4, max_phrase_len=2)

source = ("das", "haus", "ist", "klein")
best = translate(source, table, model, weights, params)
print("source     :", " ".join(source))
print("translation:", best.text)
print("score      : %.4f" % best.score)
print("breakdown  :")
for name, value in best.features.items():
    print("  %-12s %9.4f" % (name, value))
print("derivation :")
for (i, j), src, tgt in best.derivation:
    print("  source[%d:%d] %r -> %r" % (i, j, " ".join(src), " ".join(tgt)))

print("\n5-best distinct translations:")
for t in decode_nbest(source, table, model, weights, params, 5):
    print("  %-28s %.4f" % (t.text, t.score))

oov = translate(("das", "zauberstab",), table, model, weights, params)
print("\nout-of-vocabulary words pass through:", oov.text)
