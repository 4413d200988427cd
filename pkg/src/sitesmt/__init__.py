"""Site-specific phrase-based statistical machine translation toolkit.

Trains a translation engine on a big general-domain parallel corpus
combined with a small site-specific one, decodes with a log-linear stack
decoder, scores with BLEU/TER/WER, tunes weights against dev WER, and
collects pairwise human judgments through an HTTP service.
"""

__version__ = "0.1.0"
