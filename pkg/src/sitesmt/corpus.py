"""Parallel corpus handling: tokenization, loading, combination, splits, vocabulary.

A parallel corpus is a list of sentence pairs, each tagged with its origin
(the big general-domain corpus or the small site-specific one).  All
operations are pure functions of their inputs plus an explicit seed, so
repeated runs produce identical results.
"""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass, field

ORIGIN_COMMON = "common"
ORIGIN_SPECIFIC = "specific"

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
RESERVED = (BOS, EOS, UNK)

_PUNCT = '.,!?;:"()«»—'
_PUNCT_RE = re.compile("([" + re.escape(_PUNCT) + "])")


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus inputs."""


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split on whitespace, isolating punctuation characters as tokens."""
    if lowercase:
        text = text.lower()
    return _PUNCT_RE.sub(r" \1 ", text).split()


@dataclass(frozen=True)
class SentencePair:
    source: tuple[str, ...]
    target: tuple[str, ...]
    origin: str = ORIGIN_SPECIFIC

    def __post_init__(self):
        if not self.source or not self.target:
            raise CorpusError("sentence pair with an empty side")
        for tok in self.source + self.target:
            if "\n" in tok:
                raise CorpusError("token contains a newline: %r" % tok)


@dataclass
class ParallelCorpus:
    pairs: list[SentencePair] = field(default_factory=list)
    source_lang: str = "en"
    target_lang: str = "ru"
    dropped: int = 0  # degenerate lines skipped at load time

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]


def load_parallel(source_path, target_path, origin: str = ORIGIN_SPECIFIC,
                  source_lang: str = "en", target_lang: str = "ru",
                  lowercase: bool = True) -> ParallelCorpus:
    """Read a Moses-style pair of one-sentence-per-line files.

    Pairs where either side tokenizes to nothing are dropped and counted in
    the returned corpus' ``dropped`` field.  A line-count mismatch between
    the two files is an error.
    """
    with open(source_path, encoding="utf-8") as f:
        src_lines = f.read().split("\n")
    with open(target_path, encoding="utf-8") as f:
        tgt_lines = f.read().split("\n")
    # a trailing newline yields one empty trailing element on each side
    if src_lines and src_lines[-1] == "":
        src_lines.pop()
    if tgt_lines and tgt_lines[-1] == "":
        tgt_lines.pop()
    if len(src_lines) != len(tgt_lines):
        raise CorpusError(
            "line-count mismatch: %s has %d lines, %s has %d lines"
            % (source_path, len(src_lines), target_path, len(tgt_lines)))
    corpus = ParallelCorpus(source_lang=source_lang, target_lang=target_lang)
    for src, tgt in zip(src_lines, tgt_lines):
        s = tokenize(src, lowercase)
        t = tokenize(tgt, lowercase)
        if not s or not t:
            corpus.dropped += 1
            continue
        corpus.pairs.append(SentencePair(tuple(s), tuple(t), origin))
    return corpus


def write_parallel(corpus: ParallelCorpus, source_path, target_path) -> None:
    """Write a corpus back to a Moses-style file pair (LF line endings)."""
    with open(source_path, "w", encoding="utf-8", newline="\n") as f:
        for p in corpus:
            f.write(" ".join(p.source) + "\n")
    with open(target_path, "w", encoding="utf-8", newline="\n") as f:
        for p in corpus:
            f.write(" ".join(p.target) + "\n")


def combine(common: ParallelCorpus, specific: ParallelCorpus,
            dedup: bool = False) -> ParallelCorpus:
    """Concatenate the common corpus with the specific one (specific last).

    With ``dedup`` set, exact duplicates (same source and target token
    sequences) keep their first occurrence only.  Origin tags are preserved.
    """
    if (common.source_lang, common.target_lang) != (specific.source_lang,
                                                    specific.target_lang):
        raise CorpusError(
            "language-pair mismatch: %s-%s vs %s-%s"
            % (common.source_lang, common.target_lang,
               specific.source_lang, specific.target_lang))
    out = ParallelCorpus(source_lang=common.source_lang,
                         target_lang=common.target_lang)
    seen = set()
    for pair in list(common) + list(specific):
        if dedup:
            key = (pair.source, pair.target)
            if key in seen:
                continue
            seen.add(key)
        out.pairs.append(pair)
    return out


def split(corpus: ParallelCorpus, seed: int, n_tune: int,
          n_test: int) -> tuple[ParallelCorpus, ParallelCorpus, ParallelCorpus]:
    """Deterministic seeded partition into (train, tune, test).

    The three parts are disjoint by pair index and exhaustive; each part
    keeps the original corpus order.
    """
    train_idx, tune_idx, test_idx = split_indices(len(corpus), seed, n_tune, n_test)
    return (_subset(corpus, train_idx), _subset(corpus, tune_idx),
            _subset(corpus, test_idx))


def split_indices(size: int, seed: int, n_tune: int,
                  n_test: int) -> tuple[list[int], list[int], list[int]]:
    if n_tune + n_test >= size:
        raise CorpusError(
            "insufficient corpus size: %d pairs for n_tune=%d + n_test=%d"
            % (size, n_tune, n_test))
    idx = list(range(size))
    random.Random(seed).shuffle(idx)
    tune_idx = sorted(idx[:n_tune])
    test_idx = sorted(idx[n_tune:n_tune + n_test])
    train_idx = sorted(idx[n_tune + n_test:])
    return train_idx, tune_idx, test_idx


def _subset(corpus: ParallelCorpus, indices) -> ParallelCorpus:
    out = ParallelCorpus(source_lang=corpus.source_lang,
                         target_lang=corpus.target_lang)
    out.pairs = [corpus.pairs[i] for i in indices]
    return out


def length_filter(corpus: ParallelCorpus, max_len: int = 100) -> ParallelCorpus:
    """Drop pairs where either side exceeds max_len tokens (EM cost bound)."""
    out = ParallelCorpus(source_lang=corpus.source_lang,
                         target_lang=corpus.target_lang)
    out.pairs = [p for p in corpus
                 if len(p.source) <= max_len and len(p.target) <= max_len]
    return out


class Vocabulary:
    """Bijective token <-> id map with reserved begin/end/unknown symbols."""

    def __init__(self):
        self._token2id = {BOS: 0, EOS: 1, UNK: 2}
        self._id2token = [BOS, EOS, UNK]

    def add(self, token: str) -> int:
        if token in RESERVED:
            raise CorpusError("reserved symbol used as corpus token: %r" % token)
        if token not in self._token2id:
            self._token2id[token] = len(self._id2token)
            self._id2token.append(token)
        return self._token2id[token]

    def id(self, token: str) -> int:
        return self._token2id.get(token, self._token2id[UNK])

    def token(self, idx: int) -> str:
        return self._id2token[idx]

    def __contains__(self, token: str) -> bool:
        return token in self._token2id

    def __len__(self):
        return len(self._id2token)

    def tokens(self):
        """All non-reserved tokens in first-occurrence order."""
        return self._id2token[len(RESERVED):]


def build_vocab(corpus: ParallelCorpus, side: str) -> Vocabulary:
    """Vocabulary of one side ('source' or 'target'), first-occurrence order."""
    if side not in ("source", "target"):
        raise CorpusError("side must be 'source' or 'target', got %r" % side)
    vocab = Vocabulary()
    for pair in corpus:
        for tok in getattr(pair, side):
            vocab.add(tok)
    return vocab


# --- split manifest -------------------------------------------------------
#
# Text format: one section header per partition (#train / #tune / #test),
# one zero-based pair index per line under it.

_SECTIONS = ("train", "tune", "test")


def write_split_manifest(path, train_idx, tune_idx, test_idx) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for name, idx in zip(_SECTIONS, (train_idx, tune_idx, test_idx)):
            f.write("#%s\n" % name)
            for i in idx:
                f.write("%d\n" % i)


def read_split_manifest(path) -> dict[str, list[int]]:
    parts: dict[str, list[int]] = {}
    current = None
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                current = line[1:]
                if current not in _SECTIONS:
                    raise CorpusError("unknown manifest section %r" % current)
                parts[current] = []
            elif current is None:
                raise CorpusError("manifest entry before any section header")
            else:
                parts[current].append(int(line))
    for name in _SECTIONS:
        parts.setdefault(name, [])
    return parts


def corpus_hash(path) -> str:
    """SHA-256 of a file, used for artifact provenance records."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
