import math
import random

import pytest

from oracles import brute_force_decode, brute_force_nbest
from sitesmt import lm
from sitesmt.decoder import (FEATURE_NAMES, DecodeError, DecoderParams,
                             FeatureWeights, decode_nbest, read_weights,
                             translate, translation_options, write_weights)
from sitesmt.phrases import PhraseTable

UNLIMITED = DecoderParams(beam=10 ** 9, distortion_limit=None, max_phrase_len=3)


def identity_table(words):
    table = PhraseTable()
    for w in words:
        table.entries[(w,)] = {(w,): [1.0, 1.0, 1.0, 1.0]}
    return table


def uniform_lm(words, order=2):
    sents = [tuple(words)] * 2
    return lm.train_ngram(sents, order=order)


def toy_instance(rnd):
    """Random source, phrase table (<=3 candidates/phrase) and tiny LM."""
    src_vocab = ["s%d" % i for i in range(4)]
    tgt_vocab = ["t%d" % i for i in range(5)]
    n = rnd.randint(1, 5)
    source = tuple(rnd.choice(src_vocab) for _ in range(n))
    table = PhraseTable()
    for w in src_vocab:
        if rnd.random() < 0.85:  # some words stay OOV
            cands = {}
            for _ in range(rnd.randint(1, 3)):
                length = rnd.randint(1, 2)
                tgt = tuple(rnd.choice(tgt_vocab) for _ in range(length))
                cands[tgt] = [rnd.uniform(0.05, 1.0) for _ in range(4)]
            table.entries[(w,)] = cands
    for _ in range(3):  # a few bigram phrases
        i = rnd.randint(0, len(src_vocab) - 2)
        phrase = (src_vocab[i], src_vocab[i + 1])
        tgt = tuple(rnd.choice(tgt_vocab) for _ in range(rnd.randint(1, 3)))
        table.entries[phrase] = {tgt: [rnd.uniform(0.05, 1.0) for _ in range(4)]}
    model = lm.train_ngram(
        [tuple(rnd.choice(tgt_vocab) for _ in range(rnd.randint(2, 6)))
         for _ in range(30)], order=2)
    weights = FeatureWeights(lm=rnd.uniform(0.2, 1.0), phi_fwd=rnd.uniform(0.2, 1.0),
                             phi_rev=rnd.uniform(0.1, 0.5), lex_fwd=rnd.uniform(0.1, 0.5),
                             lex_rev=rnd.uniform(0.1, 0.5),
                             word_penalty=rnd.uniform(-0.3, 0.3),
                             distortion=rnd.uniform(0.05, 0.5))
    return source, table, model, weights


class TestTranslate:
    def test_identity_round_trip(self):
        words = ("a", "b", "c", "d")
        table = identity_table(words)
        model = uniform_lm(words)
        result = translate(words, table, model, FeatureWeights())
        assert result.tokens == words

    def test_oov_copied_through(self):
        words = ("a", "b")
        table = identity_table(words)
        model = uniform_lm(words)
        result = translate(("a", "mystery", "b"), table, model, FeatureWeights())
        assert result.tokens == ("a", "mystery", "b")
        # the pass-through phrase carries the fixed -10 feature cost
        oov_step = [s for s in result.derivation if s[1] == ("mystery",)]
        assert len(oov_step) == 1
        assert result.features["phi_fwd"] == pytest.approx(-10.0)

    def test_empty_source_rejected(self):
        table = identity_table(("a",))
        with pytest.raises(DecodeError):
            translate((), table, uniform_lm(("a",)), FeatureWeights())

    def test_deterministic(self):
        rnd = random.Random(0)
        source, table, model, weights = toy_instance(rnd)
        a = translate(source, table, model, weights, UNLIMITED)
        b = translate(source, table, model, weights, UNLIMITED)
        assert a.tokens == b.tokens and a.score == b.score

    def test_score_is_dot_of_breakdown(self):
        for seed in range(20):
            rnd = random.Random(200 + seed)
            source, table, model, weights = toy_instance(rnd)
            result = translate(source, table, model, weights, UNLIMITED)
            assert weights.dot(result.features) == pytest.approx(result.score,
                                                                 abs=1e-9)

    def test_lm_feature_matches_sentence_log_prob(self):
        rnd = random.Random(7)
        source, table, model, weights = toy_instance(rnd)
        result = translate(source, table, model, weights, UNLIMITED)
        assert result.features["lm"] == pytest.approx(
            model.sentence_log_prob(result.tokens), abs=1e-9)

    def test_word_penalty_is_negative_length(self):
        rnd = random.Random(8)
        source, table, model, weights = toy_instance(rnd)
        result = translate(source, table, model, weights, UNLIMITED)
        assert result.features["word_penalty"] == -len(result.tokens)

    def test_distortion_is_jump_cost_of_derivation(self):
        rnd = random.Random(9)
        for seed in range(10):
            source, table, model, weights = toy_instance(random.Random(900 + seed))
            result = translate(source, table, model, weights, UNLIMITED)
            prev_end = -1
            expected = 0
            for (i, j), _src, _tgt in result.derivation:
                expected -= abs(i - prev_end - 1)
                prev_end = j - 1
            assert result.features["distortion"] == expected

    def test_monotone_derivation_has_zero_distortion(self):
        words = ("a", "b", "c")
        result = translate(words, identity_table(words), uniform_lm(words),
                           FeatureWeights())
        assert result.features["distortion"] == 0.0


class TestOracleEquivalence:
    def test_exhaustive_optimum_on_50_toys(self):
        for seed in range(50):
            rnd = random.Random(3000 + seed)
            source, table, model, weights = toy_instance(rnd)
            result = translate(source, table, model, weights, UNLIMITED)
            options = translation_options(source, table, UNLIMITED)
            best_score, best_out = brute_force_decode(source, options, model,
                                                      weights)
            assert result.score == best_score, \
                "seed %d: %r vs %r" % (seed, result.score, best_score)

    def test_unlimited_beam_dominates_finite_beams(self):
        for seed in range(15):
            rnd = random.Random(4000 + seed)
            source, table, model, weights = toy_instance(rnd)
            full = translate(source, table, model, weights, UNLIMITED)
            for beam in (1, 2, 5):
                params = DecoderParams(beam=beam, distortion_limit=None,
                                       max_phrase_len=3)
                pruned = translate(source, table, model, weights, params)
                assert full.score >= pruned.score - 1e-12

    def test_distortion_limit_still_completes(self):
        # limit 0 forbids every jump; the leftmost-gap exemption must still
        # let search finish, monotonically
        words = ("a", "b", "c", "d")
        params = DecoderParams(beam=10, distortion_limit=0, max_phrase_len=2)
        result = translate(words, identity_table(words), uniform_lm(words),
                           FeatureWeights(), params)
        assert result.tokens == words
        assert result.features["distortion"] == 0.0


class TestNBest:
    def test_n1_matches_translate(self):
        for seed in range(10):
            rnd = random.Random(5000 + seed)
            source, table, model, weights = toy_instance(rnd)
            best = translate(source, table, model, weights, UNLIMITED)
            nbest = decode_nbest(source, table, model, weights, UNLIMITED, 1)
            assert len(nbest) == 1
            assert nbest[0].tokens == best.tokens
            assert nbest[0].score == pytest.approx(best.score, abs=1e-12)

    def test_scores_non_increasing_and_distinct(self):
        rnd = random.Random(42)
        source, table, model, weights = toy_instance(rnd)
        results = decode_nbest(source, table, model, weights, UNLIMITED, 10)
        texts = [r.text for r in results]
        assert len(set(texts)) == len(texts)
        for a, b in zip(results, results[1:]):
            assert a.score >= b.score

    def test_matches_exhaustive_top_n(self):
        for seed in range(15):
            rnd = random.Random(6000 + seed)
            source, table, model, weights = toy_instance(rnd)
            n = 5
            results = decode_nbest(source, table, model, weights, UNLIMITED, n)
            options = translation_options(source, table, UNLIMITED)
            expected = brute_force_nbest(source, options, model, weights, n)
            assert [r.tokens for r in results] == [out for out, _ in expected], \
                "seed %d" % seed
            for r, (_, score) in zip(results, expected):
                assert r.score == pytest.approx(score, abs=1e-9)

    def test_may_return_fewer_than_n(self):
        words = ("a",)
        results = decode_nbest(words, identity_table(words), uniform_lm(words),
                               FeatureWeights(), UNLIMITED, 50)
        assert len(results) == 1  # only the identity derivation exists


class TestConcurrentDecoding:
    def test_shared_models_reproducible_across_threads(self):
        from concurrent.futures import ThreadPoolExecutor
        rnd = random.Random(77)
        source, table, model, weights = toy_instance(rnd)
        sources = [source[:k] or source for k in (1, 2, 3, 4, 5)] * 4
        serial = [translate(s, table, model, weights, UNLIMITED).text
                  for s in sources]
        with ThreadPoolExecutor(max_workers=8) as pool:
            threaded = list(pool.map(
                lambda s: translate(s, table, model, weights, UNLIMITED).text,
                sources))
        assert threaded == serial


class TestWeightsFile:
    def test_round_trip(self, tmp_path):
        weights = FeatureWeights(lm=0.25, phi_fwd=1.5, phi_rev=-0.5,
                                 lex_fwd=0.125, lex_rev=2.0,
                                 word_penalty=-1.0, distortion=0.0625)
        path = tmp_path / "w.txt"
        write_weights(weights, path)
        assert read_weights(path) == weights

    def test_unknown_name_rejected(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("lm\t1.0\nbogus\t2.0\n", encoding="utf-8")
        with pytest.raises(DecodeError, match="unknown"):
            read_weights(path)

    def test_missing_name_rejected(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("lm\t1.0\n", encoding="utf-8")
        with pytest.raises(DecodeError, match="missing"):
            read_weights(path)

    def test_duplicate_name_rejected(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("".join("%s\t1.0\n" % n for n in FEATURE_NAMES)
                        + "lm\t2.0\n", encoding="utf-8")
        with pytest.raises(DecodeError, match="duplicate"):
            read_weights(path)

    def test_non_finite_weight_rejected(self):
        with pytest.raises(DecodeError):
            FeatureWeights(lm=math.inf)
