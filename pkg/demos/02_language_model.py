"""Order-5 backoff language model: training, queries, perplexity, ARPA.

The target-language model scores fluency during decoding.  Probabilities
are smoothed with interpolated absolute discounting, so every conditional
distribution normalizes exactly, and models round-trip through the
standard ARPA text format.
"""

import os
import tempfile

from sitesmt import lm
from sitesmt.synth import SynthSpec, generate

data = generate(SynthSpec(common_pairs=3000, specific_pairs=200, tune_pairs=10,
                          test_pairs=40, common_vocab=50, specific_vocab=80,
                          min_len=3, max_len=8, seed=2))
common_tgt = [p.target for p in data.common]
site_tgt = [p.target for p in data.specific.pairs[:200]]
site_test = [p.target for p in data.specific.pairs[200:]]

model = lm.train_ngram(common_tgt + site_tgt, order=5)
print("trained order-%d model: %d n-grams" % (model.order, len(model.probs)))

ctx = site_tgt[0][:2]
tok = site_tgt[0][2]
print("\nlog10 P(%s | %s) = %.4f" % (tok, " ".join(ctx), model.log_prob(tok, ctx)))
print("an unseen word still scores finitely via <unk>:",
      "%.4f" % model.log_prob("hippogriff", ctx))

total = sum(10 ** model.log_prob(w, ctx) for w in model.events())
print("the conditional distribution sums to %.9f" % total)

# the paper's motivation in miniature: a model that saw site text fits the
# site much better than one trained on the common corpus alone
combined_ppl = model.perplexity(site_test)
common_only = lm.train_ngram(common_tgt, order=5)
print("\nperplexity on held-out site text:")
print("  combined-trained: %8.1f" % combined_ppl)
print("  common-only     : %8.1f" % common_only.perplexity(site_test))

path = os.path.join(tempfile.mkdtemp(), "model.arpa")
lm.write_arpa(model, path)
again = lm.read_arpa(path)
print("\nARPA round trip: %d -> %d n-grams, header:" %
      (len(model.probs), len(again.probs)))
with open(path, encoding="utf-8") as f:
    for line in f.read().splitlines()[:7]:
        print("  " + line)
