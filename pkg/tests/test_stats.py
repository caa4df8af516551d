import itertools

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

from elastika.exceptions import UsageError
from elastika.stats import (
    PairedAccuracies,
    average_ranks,
    cliques,
    mean_ranks,
    signed_rank_test,
    wilcoxon_signed_rank,
    win_tie_loss,
)

from oracles import exact_wilcoxon_enumeration


def paired(a, b):
    return PairedAccuracies(tuple(f"d{i}" for i in range(len(a))), a, b)


class TestPairedAccuracies:
    def test_duplicate_names(self):
        with pytest.raises(UsageError):
            PairedAccuracies(("x", "x"), [0.1, 0.2], [0.3, 0.4])

    @pytest.mark.parametrize("a, b", [([], []), ([0.5], [1.5]), ([0.5, 0.2], [0.1])])
    def test_invalid(self, a, b):
        with pytest.raises(UsageError):
            paired(a, b)


class TestSignedRank:
    def test_five_increasing_differences(self):
        res = signed_rank_test([1, 2, 3, 4, 5])
        assert res.p_value == 0.0625 and res.n_effective == 5 and res.exact

    def test_all_zero(self):
        p, n = wilcoxon_signed_rank(paired([0.3, 0.7], [0.3, 0.7]))
        assert (p, n) == (1.0, 0)

    def test_zeros_discarded(self):
        assert signed_rank_test([0, 0, 1, 2, 3, 4, 5]).p_value == 0.0625

    def test_empty(self):
        with pytest.raises(UsageError):
            signed_rank_test([])

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_enumeration_with_ties(self, seed):
        rng = np.random.default_rng(seed)
        d = rng.integers(-3, 4, size=12).astype(float)
        assert signed_rank_test(d).p_value == pytest.approx(exact_wilcoxon_enumeration(d), abs=1e-12)

    @pytest.mark.parametrize("n", [6, 15, 25])
    def test_exact_matches_scipy(self, n):
        rng = np.random.default_rng(n)
        for _ in range(10):
            d = rng.normal(0.2, 1.0, n)
            expected = scipy.stats.wilcoxon(d, method="exact").pvalue
            assert signed_rank_test(d).p_value == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("n", [26, 40, 109])
    def test_normal_approximation_matches_scipy(self, n):
        rng = np.random.default_rng(n)
        for _ in range(10):
            d = np.round(rng.normal(0.1, 1.0, n), 1)  # rounding creates ties
            d[d == 0] = 0.1
            res = signed_rank_test(d)
            expected = scipy.stats.wilcoxon(d, method="approx", correction=True).pvalue
            assert not res.exact
            assert res.p_value == pytest.approx(expected, rel=1e-9)

    def test_column_swap_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(1, 40))
            pairs = paired(rng.integers(0, 11, n) / 10, rng.integers(0, 11, n) / 10)
            assert wilcoxon_signed_rank(pairs) == wilcoxon_signed_rank(pairs.swapped())

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1, 1).filter(lambda x: x != 0), min_size=1, max_size=20))
    def test_invariant_under_rank_preserving_maps(self, d):
        d = np.array(d)
        # a strictly increasing map of |d| keeps every sign and rank
        mapped = np.sign(d) * (np.abs(d) ** 3 + 2 * np.abs(d))
        if len(np.unique(np.abs(mapped))) == len(np.unique(np.abs(d))):
            assert signed_rank_test(mapped).p_value == signed_rank_test(d).p_value

    def test_size_under_null(self):
        rng = np.random.default_rng(2024)
        trials = 10**4
        rejections = sum(signed_rank_test(rng.normal(size=30)).p_value < 0.05 for _ in range(trials))
        assert abs(rejections / trials - 0.05) <= 0.02


class TestWinTieLoss:
    def test_identical(self):
        assert win_tie_loss(paired([0.1, 0.5, 0.9], [0.1, 0.5, 0.9])) == (0, 3, 0)

    def test_a_dominates(self):
        assert win_tie_loss(paired([0.2, 0.6], [0.1, 0.5])) == (2, 0, 0)

    def test_mixed(self):
        assert win_tie_loss(paired([0.9, 0.5, 0.2], [0.8, 0.5, 0.4])) == (1, 1, 1)


class TestRanks:
    def test_average_ranks(self):
        assert average_ranks([1.0, 1.0, 1.0]).tolist() == [2.0, 2.0, 2.0]

    def test_single_dataset(self):
        assert mean_ranks([[0.9, 0.8, 0.7]]).mean.tolist() == [1.0, 2.0, 3.0]

    def test_identical_classifiers(self):
        M = np.tile([[0.5], [0.7], [0.2]], (1, 4))
        table = mean_ranks(M)
        assert table.mean.tolist() == [2.5] * 4
        assert cliques(M) == [("0", "1", "2", "3")]

    def test_row_sums(self):
        rng = np.random.default_rng(1)
        M = rng.integers(0, 5, size=(50, 6)) / 4
        table = mean_ranks(M)
        assert np.all(table.ranks.sum(axis=1) == 6 * 7 / 2)

    @pytest.mark.parametrize("bad", [[[0.1, 0.2], [0.3]], [[0.1]], [], [[0.1, np.nan]]])
    def test_ragged(self, bad):
        with pytest.raises(UsageError):
            mean_ranks(bad)


def naive_cliques(M, alpha):
    k = M.shape[1]
    same = {(i, j): scipy.stats.wilcoxon(M[:, i], M[:, j], method="exact").pvalue >= alpha
            for i, j in itertools.combinations(range(k), 2)}
    ok = [set(s) for r in range(1, k + 1) for s in itertools.combinations(range(k), r)
          if all(same[p] for p in itertools.combinations(s, 2))]
    return {frozenset(s) for s in ok if not any(s < t for t in ok)}


@pytest.mark.parametrize("seed", range(6))
def test_cliques_match_all_subsets_oracle(seed):
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.5, 0.8, size=(20, 1))
    M = base + np.array([0.0, 0.01, 0.05, 0.06]) + rng.normal(0, 0.02, size=(20, 4))
    got = {frozenset(int(c) for c in g) for g in cliques(M, 0.05)}
    assert got == naive_cliques(M, 0.05)


def test_cliques_ordered_by_rank():
    M = np.array([[0.9, 0.1, 0.5]] * 10) + np.linspace(0, 0.05, 10)[:, None]
    groups = cliques(M, 0.05, ["good", "bad", "mid"])
    assert groups == [("good",), ("mid",), ("bad",)]
