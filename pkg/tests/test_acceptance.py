"""Acceptance criteria, each checked at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py``; the summary prints one
PASS/FAIL line per criterion. Criterion 11 needs the real ArrowHead data
(``ELASTIKA_UCR_ROOT`` pointing at a UCR-layout directory) and is skipped
otherwise.
"""

import math
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from elastika.cost import costs, exponent_set
from elastika.data import Split, load_pair
from elastika.distances import adtw, direct_alignment, dtw, dtw_cells, erp, lcss, msm, path_cost, twe, wdtw
from elastika.forest import GAMMA_AWARE, PFConfig, sample_splitter, train_pf
from elastika.stats import PairedAccuracies, signed_rank_test, wilcoxon_signed_rank
from elastika.synthetic import BUNDLED, head_tail_triplet, plateaus
from elastika.tuning import (
    DistanceKind,
    GridEntry,
    LOOCVTable,
    ParamGrid,
    build_grid,
    penalty_ratios,
    select_model,
    train_plus,
)
from elastika.bench import fast_path_speedups

import oracles

GAMMAS = exponent_set("a").gammas


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# ------------------------------------------------------------------ 1


@criterion(1, "oracle equivalence of DTW, ADTW, WDTW, LCSS, ERP, MSM, TWE for L in 2..8")
def test_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for L in range(2, 9):
        inc, max_dev, off_diag, _ = oracles.monotone_paths(L)
        pairs = rng.uniform(-1, 1, size=(200, 2, L))
        diff = np.abs(pairs[:, 0, :, None] - pairs[:, 1, None, :])  # (200, L, L)
        lags = np.abs(np.arange(L)[:, None] - np.arange(L)[None, :])
        g_w = rng.uniform(0, 1, 200)
        weights = 1.0 / (1.0 + np.exp(-g_w[:, None, None] * (lags[None] - L / 2)))
        for gamma in GAMMAS:
            C = diff ** gamma
            path_vals = inc @ C.reshape(200, -1).T  # (n_paths, 200)
            weighted_vals = inc @ (weights * C).reshape(200, -1).T
            for k, (s, t) in enumerate(pairs):
                for w in list(range(L)) + [None]:
                    limit = L if w is None else w
                    ref = path_vals[max_dev <= limit, k].min()
                    worst = max(worst, abs(dtw(s, t, w, gamma).value - ref))
                omega = float(rng.uniform(0, 1))
                ref = (path_vals[:, k] + omega * off_diag).min()
                worst = max(worst, abs(adtw(s, t, omega, gamma).value - ref))
                worst = max(worst, abs(wdtw(s, t, g_w[k], gamma) - weighted_vals[:, k].min()))
        for s, t in pairs:
            eps = float(rng.uniform(0.05, 1.0))
            window = int(rng.integers(0, L + 1)) if rng.random() < 0.6 else None
            gap = float(rng.uniform(-0.5, 0.5))
            c = float(rng.uniform(0.01, 2.0))
            nu, lam = float(rng.uniform(0, 1)), float(rng.uniform(0, 0.1))
            ts, tt = tuple(s), tuple(t)
            worst = max(
                worst,
                abs(lcss(s, t, eps, window) - oracles.brute_lcss(ts, tt, eps, window)),
                abs(erp(s, t, gap, window) - oracles.naive_erp(ts, tt, gap, window)),
                abs(msm(s, t, c) - oracles.naive_msm(ts, tt, c)),
                abs(twe(s, t, nu, lam) - oracles.naive_twe(ts, tt, nu, lam)),
            )
    elapsed = time.perf_counter() - start
    print(f"largest deviation {worst:.3g}, {elapsed:.1f}s")
    assert worst <= 1e-9
    assert elapsed < 60


# ------------------------------------------------------------------ 2


def _instances(n, seed, max_len=30):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        L = int(rng.integers(1, max_len + 1))
        s, t = rng.uniform(-1, 1, size=(2, L))
        yield s, t, GAMMAS[rng.integers(len(GAMMAS))]


@criterion(2, "structural identities: Minkowski at w=0, ADTW endpoints exact")
class TestStructuralIdentities:
    def test_zero_window_is_minkowski(self):
        worst = max(abs(dtw(s, t, 0, g).value - float(np.sum(np.abs(s - t) ** g)))
                    for s, t, g in _instances(10**4, 2))
        assert worst <= 1e-12

    def test_zero_penalty_is_unconstrained_dtw(self):
        assert all(adtw(s, t, 0.0, g).value == dtw(s, t, None, g).value for s, t, g in _instances(10**4, 3))

    def test_large_penalty_is_direct(self):
        rng = np.random.default_rng(4)
        for s, t, g in _instances(10**4, 5):
            d = direct_alignment(s, t, g)
            omega = d * (1 + float(rng.uniform(0, 3)))
            assert adtw(s, t, omega, g).value == d


# ------------------------------------------------------------------ 3


@criterion(3, "DTW non-increasing in window, ADTW non-decreasing in penalty")
def test_monotonicity_suites():
    rng = np.random.default_rng(6)
    violations = 0
    ratios = penalty_ratios(100)
    for _ in range(1000):
        L = int(rng.integers(2, 25))
        s, t = rng.uniform(-1, 1, size=(2, L))
        g = GAMMAS[rng.integers(len(GAMMAS))]
        d = [dtw(s, t, w, g).value for w in range(0, L - 1)] + [dtw(s, t, None, g).value]
        violations += sum(a < b for a, b in zip(d, d[1:]))
        scale = direct_alignment(s, t, g)
        a = [adtw(s, t, 0.0, g).value] + [adtw(s, t, scale * r, g).value for r in ratios]
        violations += sum(x > y for x, y in zip(a, a[1:]))
    assert violations == 0


# ------------------------------------------------------------------ 4


@criterion(4, "ADTW value equals path cost plus penalty times 2(|path| - L)")
def test_penalty_accounting():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        L = int(rng.integers(1, 25))
        s, t = rng.uniform(-1, 1, size=(2, L))
        g = GAMMAS[rng.integers(len(GAMMAS))]
        omega = float(rng.uniform(0, 1)) * direct_alignment(s, t, g) / L
        res = adtw(s, t, omega, g, want_path=True)
        expected = path_cost(s, t, res.path, g) + omega * 2 * (len(res.path) - L)
        worst = max(worst, abs(res.value - expected))
    assert worst <= 1e-9


# ------------------------------------------------------------------ 5


@criterion(5, "head/tail ordering flips between exponents 0.5 and 2; tuned model dominates")
class TestHeadTail:
    def test_ordering_flips(self):
        S, T, U = head_tail_triplet()
        low = dtw(S, U, None, 0.5).value - dtw(S, T, None, 0.5).value
        high = dtw(S, U, None, 2.0).value - dtw(S, T, None, 2.0).value
        print(f"gamma=0.5: DTW(S,U)-DTW(S,T)={low:.4f}; gamma=2: {high:.4f}")
        assert low > 0 > high

    @pytest.mark.parametrize("kind", ["dtw", "adtw"])
    def test_tuned_dominates_each_fixed_exponent(self, kind):
        make, n_train, _, seed, _ = BUNDLED["HeadTail"]
        train = make(n_train, seed, Split.TRAIN)
        plus = train_plus(train, kind, "a", 100, seed=0)
        fixed = {g: train_plus(train, kind, [g], 100, seed=0).train_accuracy for g in GAMMAS}
        print(kind, "tuned", plus.gamma, plus.train_accuracy, "fixed", {round(g, 3): str(a) for g, a in fixed.items()})
        assert all(plus.train_accuracy >= a for a in fixed.values())
        assert plus.train_accuracy == max(fixed.values())


# ------------------------------------------------------------------ 6


def _tables(score):
    A = exponent_set("a")
    entries = tuple(GridEntry(g, float(w), w) for g in A.gammas for w in range(5))
    grid = ParamGrid(DistanceKind.DTW, A, 5, entries)
    return grid, LOOCVTable(np.array([score(e) for e in entries]), 20)


@criterion(6, "tie-breaking: all-tie, {1.5, 2} and {0.5, 2} examples")
@pytest.mark.parametrize("winners, gamma, window", [(None, 1.0, 0), ((1.5, 2.0), 1.5, 0), ((0.5, 2.0), 0.5, 0)])
def test_tie_breaking(winners, gamma, window):
    grid, table = _tables(lambda e: 12 if winners is None or e.gamma in winners else 9)
    model = select_model(grid, table)
    assert model.gamma == gamma and model.param == window


# ------------------------------------------------------------------ 7


@criterion(7, "set a x 100 gives 500 configurations; penalty ratio endpoints exact")
def test_grid_accounting():
    rng = np.random.default_rng(8)
    from elastika.data import Dataset

    train = Dataset("g", Split.TRAIN, rng.normal(size=(6, 150)), [0, 1] * 3)
    for kind in ("dtw", "adtw"):
        assert len(build_grid(train, kind, "a", 100, seed=0)) == 500
    r = penalty_ratios(100)
    assert r[0] == float(Fraction(1, 100) ** 5) and r[-1] == 1.0


# ------------------------------------------------------------------ 8


@criterion(8, "Wilcoxon exact p, column-swap symmetry, size at n = 30")
class TestWilcoxon:
    def test_exact_value(self):
        assert signed_rank_test([1, 2, 3, 4, 5]).p_value == 0.0625

    def test_swap_symmetry(self):
        rng = np.random.default_rng(9)
        for _ in range(1000):
            n = int(rng.integers(1, 60))
            a, b = rng.integers(0, 21, size=(2, n)) / 20
            pairs = PairedAccuracies(tuple(map(str, range(n))), a, b)
            assert wilcoxon_signed_rank(pairs) == wilcoxon_signed_rank(pairs.swapped())

    def test_size(self):
        rng = np.random.default_rng(10)
        rate = np.mean([signed_rank_test(rng.normal(size=30)).p_value < 0.05 for _ in range(10**4)])
        print(f"rejection rate {rate:.4f}")
        assert abs(rate - 0.05) <= 0.02


# ------------------------------------------------------------------ 9


@criterion(9, "forest determinism, separable accuracy, exponent sampling frequencies")
class TestForest:
    def test_bit_identical(self):
        make, n_train, _, seed, _ = BUNDLED["Waves"]
        train = make(n_train, seed, Split.TRAIN)
        config = PFConfig(num_trees=10, seed=123, plus_mode=True)
        assert train_pf(train, config).to_json() == train_pf(train, config).to_json()

    def test_separable(self):
        forest = train_pf(plateaus(8, 3, Split.TRAIN), PFConfig(num_trees=10, seed=5))
        assert forest.score(plateaus(20, 4, Split.TEST)) == 1.0

    def test_gamma_frequencies(self):
        train = plateaus(3, 0)
        rng = np.random.default_rng(11)
        config = PFConfig(plus_mode=True)
        drawn = []
        while len(drawn) < 10**4:
            sp = sample_splitter(train, np.arange(len(train)), config, rng)
            if sp.kind in GAMMA_AWARE:
                drawn.append(sp.gamma)
        values, counts = np.unique(drawn, return_counts=True)
        assert len(values) == 5
        assert np.all(np.abs(counts / len(drawn) - 0.2) <= 0.02)


# ------------------------------------------------------------------ 10


@criterion(10, "banded DTW cell bound; fast paths at least 1.5x faster than general power")
class TestPerformance:
    def test_cell_bound(self):
        rng = np.random.default_rng(12)
        for L in (10, 64, 257):
            s, t = rng.normal(size=(2, L))
            for w in range(0, L - 1, max(1, L // 16)):
                assert dtw_cells(s, t, w) <= (2 * w + 1) * L

    def test_fast_path_speedup(self):
        result = fast_path_speedups(10**6, repeats=7)
        print({g: round(r["speedup"], 2) for g, r in result.items()})
        assert all(r["speedup"] >= 1.5 for r in result.values())


# ------------------------------------------------------------------ 11


@criterion(11, "ArrowHead PF+ mean accuracy over 10 seeds within 0.04 of 0.8971 (optional)")
@pytest.mark.slow
def test_arrowhead_pf_plus():
    root = os.environ.get("ELASTIKA_UCR_ROOT")
    if not root or not os.path.isdir(os.path.join(root, "ArrowHead")):
        pytest.skip("set ELASTIKA_UCR_ROOT to a UCR archive copy containing ArrowHead")
    train, test = load_pair(root, "ArrowHead")
    accs = [train_pf(train, PFConfig(num_trees=100, plus_mode=True, seed=s)).score(test) for s in range(10)]
    mean = float(np.mean(accs))
    print(f"ArrowHead PF+ mean accuracy {mean:.4f}")
    assert math.isclose(mean, 0.8971, abs_tol=0.04)
