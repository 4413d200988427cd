"""Seeded synthetic parallel data for trend experiments.

Builds two toy "languages" related by deterministic word substitution: each
source word has exactly one target form, so the reference translation of a
sentence is its word-by-word image.  Sentences are drawn from a seeded
Markov chain per domain (every word owns a small successor set), which
gives the target side genuine sequential structure for the language model
to learn; without it, n-gram noise rewards random reordering.

Two domains share a configurable fraction of the specific domain's
vocabulary, mimicking a big general corpus plus a small site-specific one.
Zipf-weighted sampling keeps rare specific words under-covered by small
corpora, which is what makes corpus combination pay off.

Held-out tune/test pairs are rejection-sampled to be disjoint from every
training pair (and from the common corpus), so downstream train/test
overlap checks hold by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import ORIGIN_COMMON, ORIGIN_SPECIFIC, ParallelCorpus, SentencePair


@dataclass
class SynthSpec:
    common_pairs: int = 50000
    specific_pairs: int = 700
    tune_pairs: int = 60
    test_pairs: int = 120
    common_vocab: int = 260      # words exclusive to the common domain
    specific_vocab: int = 800    # full specific-domain vocabulary
    shared_fraction: float = 0.3  # of the specific vocabulary, also common
    successors: int = 4          # outgoing transitions per word
    min_len: int = 3
    max_len: int = 8
    zipf_exponent: float = 1.0
    seed: int = 7


@dataclass
class SynthData:
    common: ParallelCorpus          # big general-domain corpus
    specific: ParallelCorpus        # training pool + held-out rows, all distinct
    n_tune: int
    n_test: int

    @property
    def n_pool(self) -> int:
        return len(self.specific) - self.n_tune - self.n_test


def _zipf_weights(n: int, exponent: float) -> list[float]:
    return [1.0 / (rank ** exponent) for rank in range(1, n + 1)]


class _Chain:
    """Word-substitution grammar for one domain: Zipf start distribution
    plus a fixed successor set per word."""

    def __init__(self, vocab, rnd, spec):
        self.vocab = vocab
        self.weights = _zipf_weights(len(vocab), spec.zipf_exponent)
        k = spec.successors
        self.next = {w: rnd.choices(vocab, self.weights, k=k) for w in vocab}
        self.next_weights = _zipf_weights(k, 1.0)

    def sentence(self, rnd, length):
        word = rnd.choices(self.vocab, self.weights)[0]
        out = [word]
        for _ in range(length - 1):
            word = rnd.choices(self.next[word], self.next_weights)[0]
            out.append(word)
        return tuple(out)


def generate(spec: SynthSpec | None = None) -> SynthData:
    """Deterministic corpora for a domain-adaptation experiment."""
    if spec is None:
        spec = SynthSpec()
    rnd = random.Random(spec.seed)
    n_shared = round(spec.specific_vocab * spec.shared_fraction)
    shared_src = ["xa%d" % i for i in range(n_shared)]
    common_only = ["ca%d" % i for i in range(spec.common_vocab)]
    specific_only = ["sa%d" % i for i in range(spec.specific_vocab - n_shared)]
    # one target form per source word: deterministic substitution
    translation = {w: w[:1] + "b" + w[2:] for w in
                   shared_src + common_only + specific_only}

    common_src = common_only + shared_src
    specific_src = specific_only + shared_src
    rnd.shuffle(common_src)
    rnd.shuffle(specific_src)
    common_chain = _Chain(common_src, rnd, spec)
    specific_chain = _Chain(specific_src, rnd, spec)
    # shared words keep their common-domain usage where possible: successor
    # slots landing on shared words carry over, the rest stay domain-local,
    # so the two corpora never teach contradictory order statistics
    specific_set = set(specific_src)
    for w in shared_src:
        specific_chain.next[w] = [
            s if s in specific_set else specific_chain.next[w][i]
            for i, s in enumerate(common_chain.next[w])]

    def sample_pair(chain, origin):
        src = chain.sentence(rnd, rnd.randint(spec.min_len, spec.max_len))
        tgt = tuple(translation[w] for w in src)
        return SentencePair(src, tgt, origin)

    common = ParallelCorpus()
    for _ in range(spec.common_pairs):
        common.pairs.append(sample_pair(common_chain, ORIGIN_COMMON))
    common_sources = {p.source for p in common}

    specific = ParallelCorpus()
    seen: set = set()
    target = spec.specific_pairs + spec.tune_pairs + spec.test_pairs
    while len(specific) < target:
        pair = sample_pair(specific_chain, ORIGIN_SPECIFIC)
        # held-out rows must not repeat any training sentence
        if pair.source in seen or pair.source in common_sources:
            continue
        seen.add(pair.source)
        specific.pairs.append(pair)
    return SynthData(common=common, specific=specific,
                     n_tune=spec.tune_pairs, n_test=spec.test_pairs)
