"""Automatic metrics (BLEU, TER, WER) and WER-driven weight tuning.

BLEU rewards n-gram overlap with a brevity penalty; TER counts edits plus
block shifts; WER is plain edit distance.  The tuner runs a deterministic
coordinate search over the seven decoder weights, accepting only moves
that lower corpus WER of the 1-best decodings on a dev set.
"""

from sitesmt import lm
from sitesmt.decoder import DecoderParams, FeatureWeights
from sitesmt.metrics import bleu_corpus, ter, wer
from sitesmt.phrases import PhraseTable
from sitesmt.tune import corpus_wer, tune_weights

ref = "the boy who lived had a scar".split()
hyp1 = "the boy who lived had a scar".split()
hyp2 = "the boy that lived had scar".split()
hyp3 = "had a scar the boy who lived".split()

for name, hyp in (("exact", hyp1), ("two errors", hyp2), ("rotated", hyp3)):
    print("%-10s  WER %.3f  TER %.3f  BLEU %6.2f"
          % (name, wer(hyp, ref), ter(hyp, ref),
             bleu_corpus([hyp], [ref])))
print("note: TER charges the rotation one shift; WER pays for every word.\n")

# tuning on a constructed instance: the reference order is reversed, the
# LM knows it, but a heavy distortion weight keeps the decoder monotone
table = PhraseTable()
for w in ("a", "b"):
    table.entries[(w,)] = {(w,): [1.0, 1.0, 1.0, 1.0]}
model = lm.train_ngram([("b", "a")] * 20, order=2)
dev = [(("a", "b"), ("b", "a"))]
params = DecoderParams(beam=20, distortion_limit=None, max_phrase_len=1)
initial = FeatureWeights(lm=1.0, phi_fwd=1.0, phi_rev=0.0, lex_fwd=0.0,
                         lex_rev=0.0, word_penalty=0.0, distortion=4.0)

print("initial dev WER: %.3f" % corpus_wer(dev, table, model, initial, params))
tuned = tune_weights(dev, table, model, initial, params, log=print)
print("tuned dev WER  : %.3f" % corpus_wer(dev, table, model, tuned, params))
changed = [name for name in ("lm", "phi_fwd", "phi_rev", "lex_fwd", "lex_rev",
                             "word_penalty", "distortion")
           if getattr(tuned, name) != getattr(initial, name)]
print("weights moved by the search:", ", ".join(changed))
