import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from elastika.data import (
    Dataset,
    Split,
    add_noise,
    check_tuning_gate,
    derivative_transform,
    load_pair,
    load_ucr_tsv,
    write_ucr_tsv,
)
from elastika.exceptions import (
    EmptyDatasetError,
    ParseError,
    SeriesTooShortError,
    SingletonClassError,
    UsageError,
    VariableLengthError,
)

from oracles import naive_derivative


def _write(tmp_path, text, name="Toy_TRAIN.tsv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoad:
    def test_single_line(self, tmp_path):
        ds = load_ucr_tsv(_write(tmp_path, "2\t0.0\t1.5\t-1.0\n"))
        assert ds.name == "Toy" and ds.split is Split.TRAIN
        assert ds.y.tolist() == [2]
        assert ds.X[0].tolist() == [0.0, 1.5, -1.0]

    def test_integer_valued_real_label(self, tmp_path):
        ds = load_ucr_tsv(_write(tmp_path, "1.0\t3\t4\n-1\t5\t6\n"))
        assert ds.y.tolist() == [1, -1]

    def test_ragged_rows(self, tmp_path):
        with pytest.raises(VariableLengthError):
            load_ucr_tsv(_write(tmp_path, "1\t1\t2\t3\t4\t5\n1\t1\t2\t3\t4\t5\t6\n"))

    def test_non_numeric_reports_line(self, tmp_path):
        with pytest.raises(ParseError) as info:
            load_ucr_tsv(_write(tmp_path, "1\t1\t2\n1\t1\tx\n"))
        assert info.value.line == 2

    def test_fractional_label(self, tmp_path):
        with pytest.raises(ParseError):
            load_ucr_tsv(_write(tmp_path, "1.5\t1\t2\n"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyDatasetError):
            load_ucr_tsv(_write(tmp_path, "\n\n"))

    def test_singleton_class_loads_but_fails_gate(self, tmp_path):
        ds = load_ucr_tsv(_write(tmp_path, "1\t0\t0\n2\t1\t1\n2\t1\t2\n2\t3\t1\n"))
        assert ds.class_counts() == {1: 1, 2: 3}
        with pytest.raises(SingletonClassError):
            check_tuning_gate(ds)

    def test_pair_layout(self, tmp_path):
        ds = Dataset("Pairs", Split.TRAIN, np.arange(6.0).reshape(3, 2), [0, 1, 1])
        write_ucr_tsv(ds, tmp_path / "Pairs" / "Pairs_TRAIN.tsv")
        write_ucr_tsv(ds.replace(split=Split.TEST), tmp_path / "Pairs" / "Pairs_TEST.tsv")
        train, test = load_pair(tmp_path, "Pairs")
        assert train.split is Split.TRAIN and test.split is Split.TEST


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 10)),
              elements=st.floats(allow_nan=False, allow_infinity=False, width=64)))
def test_round_trip_bit_exact(tmp_path_factory, X):
    path = tmp_path_factory.mktemp("rt") / "R_TRAIN.tsv"
    ds = Dataset("R", Split.TRAIN, X, np.arange(X.shape[0]) % 3)
    back = load_ucr_tsv(write_ucr_tsv(ds, path))
    assert back.X.tobytes() == ds.X.tobytes()
    assert back.y.tolist() == ds.y.tolist()


def test_dataset_is_immutable():
    ds = Dataset("I", Split.TRAIN, np.zeros((2, 3)), [0, 1])
    with pytest.raises(ValueError):
        ds.X[0, 0] = 1.0


class TestNoise:
    def _ds(self, n=4, length=50, seed=0):
        rng = np.random.default_rng(seed)
        return Dataset("N", Split.TRAIN, rng.normal(size=(n, length)) * 3 + 1, np.arange(n) % 2)

    def test_zero_scale_is_identity(self):
        ds = self._ds()
        assert np.array_equal(add_noise(ds, 0.0, 1).X, ds.X)

    def test_constant_series_untouched(self):
        ds = Dataset("C", Split.TRAIN, np.full((3, 20), 2.5), [0, 1, 0])
        assert np.array_equal(add_noise(ds, 1.0, 9).X, ds.X)

    def test_empirical_std_matches_series_sigma(self):
        rng = np.random.default_rng(11)
        ds = Dataset("Big", Split.TRAIN, rng.uniform(-2, 5, size=(1, 10**5)), [0])
        sigma = ds.X[0].std()
        delta = add_noise(ds, 1.0, 1234).X[0] - ds.X[0]
        assert abs(delta.std() - sigma) <= 0.05 * sigma

    def test_scale_factor(self):
        rng = np.random.default_rng(12)
        ds = Dataset("Big", Split.TRAIN, rng.uniform(-2, 5, size=(1, 10**5)), [0])
        delta = add_noise(ds, 0.1, 5).X[0] - ds.X[0]
        assert abs(delta.std() - 0.1 * ds.X[0].std()) <= 0.05 * 0.1 * ds.X[0].std()

    def test_reproducible_and_seed_sensitive(self):
        ds = self._ds()
        a = add_noise(ds, 0.1, 42).X
        b = add_noise(ds, 0.1, 42).X
        c = add_noise(ds, 0.1, 43).X
        assert np.array_equal(a, b)
        assert np.mean(a != c) >= 0.99

    def test_labels_unchanged(self):
        ds = self._ds()
        assert np.array_equal(add_noise(ds, 1.0, 3).y, ds.y)

    @pytest.mark.parametrize("bad", [-0.1, float("nan")])
    def test_negative_scale(self, bad):
        with pytest.raises(UsageError):
            add_noise(self._ds(), bad, 0)

    def test_seed_must_be_u64(self):
        with pytest.raises(UsageError):
            add_noise(self._ds(), 0.1, -1)


class TestDerivative:
    def test_ramp(self):
        assert derivative_transform([0, 1, 2, 3, 4]).tolist() == [1.0] * 5

    def test_constant(self):
        assert derivative_transform([3.0] * 6).tolist() == [0.0] * 6

    def test_alternating_by_hand(self):
        # interior: ((1-0) + (0-0)/2)/2 = 0.5, ((0-1) + (1-1)/2)/2 = -0.5, ...
        d = derivative_transform([0, 1, 0, 1, 0])
        assert d.tolist() == [0.5, 0.5, -0.5, 0.5, 0.5]

    def test_length_preserved_and_too_short(self):
        assert derivative_transform(np.arange(3.0)).shape == (3,)
        with pytest.raises(SeriesTooShortError):
            derivative_transform([1.0, 2.0])

    @settings(max_examples=100, deadline=None)
    @given(arrays(np.float64, st.integers(3, 30), elements=st.floats(-100, 100)))
    def test_matches_loop_reference(self, s):
        assert np.allclose(derivative_transform(s), naive_derivative(list(s)), rtol=0, atol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(arrays(np.float64, st.integers(3, 30), elements=st.floats(-100, 100)),
           st.floats(-10, 10))
    def test_linear(self, s, alpha):
        assert np.allclose(derivative_transform(alpha * s), alpha * derivative_transform(s),
                           rtol=1e-12, atol=1e-10)
