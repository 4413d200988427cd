import random

import pytest

from oracles import model1_loglik, model1_reference_em
from sitesmt.align import (FORWARD, GROW_DIAG_FINAL, INTERSECTION, NULL,
                           REVERSE, UNION, AlignError, AlignmentMatrix,
                           LexicalTable, log_likelihood, symmetrize,
                           train_model1, viterbi_align)
from sitesmt.corpus import ParallelCorpus, SentencePair


def corpus_of(rows):
    return ParallelCorpus(pairs=[
        SentencePair(tuple(s.split()), tuple(t.split())) for s, t in rows])


def random_corpus(rnd, max_pairs=5, vocab=6):
    src_words = ["f%d" % i for i in range(vocab)]
    tgt_words = ["e%d" % i for i in range(vocab)]
    rows = []
    for _ in range(rnd.randint(1, max_pairs)):
        m = rnd.randint(1, 4)
        n = rnd.randint(1, 4)
        rows.append((" ".join(rnd.choice(src_words) for _ in range(m)),
                     " ".join(rnd.choice(tgt_words) for _ in range(n))))
    return corpus_of(rows)


class TestModel1:
    def test_das_haus_trajectory_matches_reference_em(self):
        corpus = corpus_of([("das haus", "the house"), ("das buch", "the book")])
        pairs = [(p.source, p.target) for p in corpus]
        previous = 0.0
        for iterations in range(1, 6):
            table = train_model1(corpus, iterations)
            reference = model1_reference_em(pairs, iterations)
            for (f, e), p in reference.items():
                assert table.prob(e, f) == pytest.approx(p, abs=1e-12)
            t_the = table.prob("the", "das")
            assert t_the > previous  # strictly increases each iteration
            previous = t_the
        assert t_the > table.prob("house", "das")
        assert t_the > table.prob("book", "das")

    def test_single_pair_symmetry(self):
        # x and NULL are indistinguishable for y, so their rows stay equal;
        # each row has the single entry y, hence probability 1 after the
        # M-step, and the E-step posterior splits 0.5/0.5
        corpus = corpus_of([("x", "y")])
        for iterations in (1, 3, 7):
            table = train_model1(corpus, iterations)
            assert table.prob("y", "x") == table.prob("y", NULL) == 1.0
        z = table.prob("y", "x") + table.prob("y", NULL)
        assert table.prob("y", "x") / z == 0.5

    def test_rows_sum_to_one_and_likelihood_non_decreasing(self):
        for seed in range(50):
            rnd = random.Random(1000 + seed)
            corpus = random_corpus(rnd)
            pairs = [(p.source, p.target) for p in corpus]
            lls = []
            for iterations in range(1, 6):
                table = train_model1(corpus, iterations)
                for f, row in table.t.items():
                    assert sum(row.values()) == pytest.approx(1.0, abs=1e-9)
                lls.append(model1_loglik(table.prob, pairs))
            for a, b in zip(lls, lls[1:]):
                assert b >= a - 1e-12

    def test_internal_loglik_matches_independent_evaluator(self):
        corpus = random_corpus(random.Random(77))
        pairs = [(p.source, p.target) for p in corpus]
        logged = []
        table = train_model1(corpus, 4, log=lambda i, ll: logged.append(ll))
        assert len(logged) == 4
        # iteration k logs the likelihood of the table after k-1 steps
        for k in (1, 2, 3):
            prev = train_model1(corpus, k)
            assert logged[k] == pytest.approx(model1_loglik(prev.prob, pairs),
                                              abs=1e-9)

    def test_log_likelihood_helper(self):
        corpus = corpus_of([("a b", "x"), ("b", "y x")])
        table = train_model1(corpus, 3)
        pairs = [(p.source, p.target) for p in corpus]
        assert log_likelihood(table, corpus) == pytest.approx(
            model1_loglik(table.prob, pairs), abs=1e-12)

    def test_empty_corpus_rejected(self):
        with pytest.raises(AlignError):
            train_model1(ParallelCorpus(), 3)

    def test_expected_counts_partition_invariant(self):
        corpus = random_corpus(random.Random(5), max_pairs=5)
        whole = train_model1(corpus, 2)
        # the same corpus fed in two chunks through the public API must give
        # the same model because expectations are additive
        again = train_model1(corpus_of([(" ".join(p.source), " ".join(p.target))
                                        for p in corpus]), 2)
        for f, row in whole.t.items():
            for e, p in row.items():
                assert again.prob(e, f) == pytest.approx(p, abs=1e-12)


class TestViterbi:
    def identity_table(self, words):
        table = LexicalTable()
        for w in words:
            table.t[w] = {w: 1.0}
        table.t[NULL] = {w: 1e-6 for w in words}
        return table

    def test_identity_lexicon(self):
        table = self.identity_table(["a", "b"])
        pair = SentencePair(("a", "b"), ("a", "b"))
        result = viterbi_align(table, pair, FORWARD)
        assert result.links == {(0, 0), (1, 1)}

    def test_null_preferred_gives_no_links(self):
        table = LexicalTable()
        table.t[NULL] = {"x": 0.9}
        table.t["a"] = {"x": 0.1}
        pair = SentencePair(("a",), ("x",))
        assert viterbi_align(table, pair, FORWARD).links == frozenset()

    def test_tie_breaks_leftmost(self):
        table = LexicalTable()
        table.t["x1"] = {"y": 0.4}
        table.t["x2"] = {"y": 0.4}
        table.t[NULL] = {"y": 0.1}
        pair = SentencePair(("x1", "x2"), ("y",))
        assert viterbi_align(table, pair, FORWARD).links == {(0, 0)}

    def test_reverse_direction_links_source_words(self):
        table = LexicalTable()
        table.t["e1"] = {"f1": 1.0, "f2": 0.0}
        table.t["e2"] = {"f1": 0.0, "f2": 1.0}
        table.t[NULL] = {"f1": 0.0, "f2": 0.0}
        pair = SentencePair(("f1", "f2"), ("e1", "e2"))
        result = viterbi_align(table, pair, REVERSE)
        assert result.links == {(0, 0), (1, 1)}


class TestSymmetrize:
    def test_same_input_idempotent_for_all_heuristics(self):
        a = AlignmentMatrix(3, 3, frozenset({(0, 0), (1, 2), (2, 1)}))
        for heuristic in (INTERSECTION, UNION, GROW_DIAG_FINAL):
            assert symmetrize(a, a, heuristic).links == a.links

    def test_disjoint_intersection_empty(self):
        f = AlignmentMatrix(2, 2, frozenset({(0, 0)}))
        r = AlignmentMatrix(2, 2, frozenset({(1, 1)}))
        assert symmetrize(f, r, INTERSECTION).links == frozenset()

    def test_grow_diag_final_adopts_diagonal_neighbor(self):
        f = AlignmentMatrix(2, 2, frozenset({(0, 0), (1, 1)}))
        r = AlignmentMatrix(2, 2, frozenset({(0, 0)}))
        result = symmetrize(f, r, GROW_DIAG_FINAL)
        assert result.links == {(0, 0), (1, 1)}

    def test_final_step_covers_orphan_rows(self):
        # (2,0) is no neighbor of (0,0) so only the final step can adopt it
        f = AlignmentMatrix(3, 1, frozenset({(0, 0), (2, 0)}))
        r = AlignmentMatrix(3, 1, frozenset({(0, 0)}))
        result = symmetrize(f, r, GROW_DIAG_FINAL)
        assert result.links == {(0, 0), (2, 0)}

    def test_grow_requires_a_neighbor_before_coverage_fills(self):
        # (0,2) starts with no neighbor in the alignment; by the time the
        # growth step reaches it via (1,2), its row and column are both
        # covered, so neither growth nor the final step may adopt it
        f = AlignmentMatrix(3, 4, frozenset({(0, 0), (2, 3), (1, 2), (0, 2)}))
        r = AlignmentMatrix(3, 4, frozenset({(0, 0), (2, 3)}))
        result = symmetrize(f, r, GROW_DIAG_FINAL)
        assert result.links == {(0, 0), (2, 3), (1, 2)}

    def test_dimension_mismatch(self):
        f = AlignmentMatrix(2, 2, frozenset())
        r = AlignmentMatrix(2, 3, frozenset())
        with pytest.raises(AlignError, match="dimension"):
            symmetrize(f, r)

    def test_links_validated_against_bounds(self):
        with pytest.raises(AlignError):
            AlignmentMatrix(2, 2, frozenset({(2, 0)}))
