"""Corpus handling walkthrough: tokenize, load, combine, split.

A translation engine for one web site trains on two corpora: a big
general-domain one and the small site-specific one harvested from the
site's own translations.  This demo builds both from synthetic data and
walks the preparation steps.
"""

import os
import tempfile

from sitesmt.corpus import (build_vocab, combine, load_parallel, split,
                            tokenize, write_parallel)
from sitesmt.synth import SynthSpec, generate

print("tokenization splits punctuation and lowercases by default:")
print("  %r" % tokenize('The Ravenclaw student said: "Alohomora!"'))

data = generate(SynthSpec(common_pairs=500, specific_pairs=120, tune_pairs=15,
                          test_pairs=20, common_vocab=40, specific_vocab=60,
                          min_len=2, max_len=6, seed=1))

tmp = tempfile.mkdtemp()
write_parallel(data.common, os.path.join(tmp, "common.src"),
               os.path.join(tmp, "common.tgt"))
write_parallel(data.specific, os.path.join(tmp, "site.src"),
               os.path.join(tmp, "site.tgt"))

common = load_parallel(os.path.join(tmp, "common.src"),
                       os.path.join(tmp, "common.tgt"), origin="common")
site = load_parallel(os.path.join(tmp, "site.src"),
                     os.path.join(tmp, "site.tgt"), origin="specific")
print("\nloaded %d common pairs and %d site pairs" % (len(common), len(site)))
print("a site pair:", " ".join(site[0].source), "->", " ".join(site[0].target))

# held-out tune/test rows come from the site corpus only, like the paper's
# protocol: the engine is judged on the domain it is built for
train_site, tune, test = split(site, seed=7, n_tune=15, n_test=20)
print("\nsite corpus split: %d train / %d tune / %d test (disjoint by seed)"
      % (len(train_site), len(tune), len(test)))

combined = combine(common, train_site)
print("combined training corpus: %d pairs (site pairs last, origins kept)"
      % len(combined))

vocab = build_vocab(combined, "target")
print("target vocabulary: %d types (+3 reserved symbols)" % (len(vocab) - 3))
