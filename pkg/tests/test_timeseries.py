import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynconn import TimeSeriesMatrix, bandpass_filter, detrend_polynomial, regress_nuisance, remove_outliers
from dynconn.timeseries import BandDefinition, nuisance_design, polynomial_basis

from oracles import amplitude_at, polyfit_residuals, projection_residuals, robust_z
from util import make_ts


class TestTimeSeriesMatrix:
    def test_valid_construction(self):
        ts = make_ts([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        assert ts.n_samples == 3
        assert ts.n_nodes == 2

    @pytest.mark.parametrize(
        "values,labels,modalities,dt,match",
        [
            ([[1.0, 2.0]], ["a", "b"], ["EEG", "EEG"], 2.0, "at least 2 samples"),
            ([[1.0], [2.0]], ["a", "a"], ["EEG"], 2.0, "labels"),
            ([[1.0], [np.nan]], ["a"], ["EEG"], 2.0, "non-finite"),
            ([[1.0], [2.0]], ["a"], ["MEG"], 2.0, "modality"),
            ([[1.0], [2.0]], ["a"], ["EEG"], 0.0, "dt"),
            ([[1.0], [2.0]], ["a"], ["EEG", "FMRI"], 2.0, "modality tags"),
        ],
    )
    def test_invalid_construction(self, values, labels, modalities, dt, match):
        with pytest.raises(ValueError, match=match):
            TimeSeriesMatrix(values, labels, modalities, dt)


class TestDetrend:
    def test_exact_linear_trend_removed(self):
        out = detrend_polynomial(make_ts([1.0, 2.0, 3.0, 4.0]), 1)
        np.testing.assert_allclose(out.values[:, 0], 0.0, atol=1e-12)

    def test_exact_quadratic_removed(self):
        out = detrend_polynomial(make_ts([1.0, 4.0, 9.0, 16.0]), 2)
        np.testing.assert_allclose(out.values[:, 0], 0.0, atol=1e-10)

    def test_alternating_column_order_one(self):
        # Frozen from the normal-equations oracle: slope 0.2, intercept 0.2.
        column = [0.0, 1.0, 0.0, 1.0]
        expected = polyfit_residuals(column, 1)
        np.testing.assert_allclose(expected, [-0.2, 0.6, -0.6, 0.2], atol=1e-12)
        out = detrend_polynomial(make_ts(column), 1)
        np.testing.assert_allclose(out.values[:, 0], expected, atol=1e-12)

    def test_matches_oracle_on_random_columns(self):
        rng = np.random.default_rng(7)
        values = rng.standard_normal((30, 4))
        for order in (1, 2, 3):
            out = detrend_polynomial(make_ts(values), order)
            for j in range(4):
                np.testing.assert_allclose(
                    out.values[:, j], polyfit_residuals(values[:, j], order), atol=1e-9
                )

    def test_too_short_series_raises(self):
        with pytest.raises(ValueError, match="samples"):
            detrend_polynomial(make_ts([1.0, 2.0, 3.0]), 2)

    def test_bad_order_raises(self):
        with pytest.raises(ValueError, match="order"):
            detrend_polynomial(make_ts([1.0, 2.0, 3.0, 4.0]), 4)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 3))
    @settings(max_examples=25, deadline=None)
    def test_residuals_orthogonal_to_basis(self, seed, order):
        rng = np.random.default_rng(seed)
        t = rng.integers(order + 2, 64)
        ts = make_ts(rng.standard_normal((t, 3)))
        out = detrend_polynomial(ts, order)
        basis = polynomial_basis(t, order)
        basis /= np.linalg.norm(basis, axis=0, keepdims=True)
        assert np.abs(basis.T @ out.values).max() < 1e-8 * t


class TestRegressNuisance:
    def test_perfect_fit_gives_zero_residuals(self):
        reg = np.arange(8.0)
        ts = make_ts(reg.copy())
        out = regress_nuisance(ts, reg[:, None])
        np.testing.assert_allclose(out.values, 0.0, atol=1e-12)

    def test_orthogonal_regressor_leaves_column_unchanged(self):
        # 6-sample case checked against the projection oracle.
        column = np.array([1.0, -1.0, 2.0, -2.0, 3.0, -3.0])
        column -= column.mean()
        reg = np.ones((6, 1))  # orthogonal to any zero-mean column
        expected = projection_residuals(column, np.column_stack([np.ones(6), reg]))
        np.testing.assert_allclose(expected, column, atol=1e-12)
        out = regress_nuisance(make_ts(column), reg)
        np.testing.assert_allclose(out.values[:, 0], column, atol=1e-12)

    def test_design_has_thirteen_columns_with_derivatives(self):
        reg = np.random.default_rng(0).standard_normal((20, 6))
        design = nuisance_design(reg, include_derivatives=True)
        assert design.shape == (20, 13)

    def test_all_zero_regressor_dropped_with_warning(self):
        reg = np.zeros((10, 2))
        reg[:, 0] = np.arange(10.0)
        with pytest.warns(UserWarning, match="all-zero"):
            design = nuisance_design(reg, include_derivatives=False)
        assert design.shape == (10, 2)  # intercept + surviving column

    def test_row_mismatch_raises(self):
        with pytest.raises(ValueError, match="rows"):
            regress_nuisance(make_ts(np.arange(6.0)), np.ones((5, 1)))

    def test_too_many_design_columns_raises(self):
        ts = make_ts(np.random.default_rng(1).standard_normal((5, 1)))
        with pytest.raises(ValueError, match="columns"):
            regress_nuisance(ts, np.random.default_rng(2).standard_normal((5, 4)), True)

    def test_rank_deficient_design_is_solved(self):
        rng = np.random.default_rng(3)
        base = rng.standard_normal((12, 1))
        reg = np.hstack([base, base])  # duplicated column
        out = regress_nuisance(make_ts(rng.standard_normal((12, 2))), reg)
        design = nuisance_design(reg, include_derivatives=False)
        assert np.abs(design.T @ out.values).max() < 1e-8

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_residuals_orthogonal_to_design(self, seed):
        rng = np.random.default_rng(seed)
        t = int(rng.integers(16, 64))
        k = int(rng.integers(1, 4))
        reg = rng.standard_normal((t, k))
        ts = make_ts(rng.standard_normal((t, 2)))
        out = regress_nuisance(ts, reg, include_derivatives=True)
        design = nuisance_design(reg, include_derivatives=True)
        scale = np.linalg.norm(design, axis=0) * np.linalg.norm(out.values, axis=0).max()
        assert np.abs(design.T @ out.values).max() < 1e-8 * max(scale.max(), 1.0)


class TestRemoveOutliers:
    def test_no_outliers_is_identity(self):
        values = np.array([0.1, -0.2, 0.3, 0.0, -0.1])
        out = remove_outliers(make_ts(values))
        np.testing.assert_array_equal(out.values[:, 0], values)

    def test_constant_column_unchanged(self):
        values = np.full(6, 3.5)
        out = remove_outliers(make_ts(values))
        np.testing.assert_array_equal(out.values[:, 0], values)

    def test_spike_on_flat_column_removed(self):
        column = np.array([0.0, 0.0, 10.0, 0.0, 0.0])
        z = robust_z(column)
        assert z[2] > 4.0  # the oracle confirms the spike exceeds threshold
        out = remove_outliers(make_ts(column), 4.0)
        np.testing.assert_array_equal(out.values[:, 0], np.zeros(5))

    def test_edge_spike_clamped_to_nearest_inlier(self):
        column = np.array([50.0, 1.0, 1.1, 0.9, 1.0, 1.05, 0.95, 1.0])
        out = remove_outliers(make_ts(column), 4.0)
        assert out.values[0, 0] == 1.0

    def test_interior_spike_interpolated(self):
        column = np.array([0.0, 1.0, 2.0, 300.0, 4.0, 5.0, 6.0])
        out = remove_outliers(make_ts(column), 4.0)
        assert out.values[3, 0] == pytest.approx(3.0)

    def test_short_series_raises(self):
        with pytest.raises(ValueError, match="3 samples"):
            remove_outliers(make_ts([1.0, 2.0]))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_idempotent_on_spiky_signals(self, seed):
        rng = np.random.default_rng(seed)
        t = int(rng.integers(16, 80))
        values = rng.standard_normal((t, 2))
        spikes = rng.integers(0, t, size=3)
        values[spikes, 0] += rng.choice([-40.0, 40.0], size=3)
        once = remove_outliers(make_ts(values), 4.0)
        twice = remove_outliers(once, 4.0)
        np.testing.assert_array_equal(once.values, twice.values)


class TestBandpass:
    def test_constant_column_goes_to_zero(self):
        out = bandpass_filter(make_ts(np.full(64, 7.3)))
        assert np.abs(out.values).max() <= 1e-6

    def test_midband_sinusoid_passes(self):
        t = np.arange(512) * 2.0
        out = bandpass_filter(make_ts(np.sin(2 * np.pi * 0.05 * t)))
        assert amplitude_at(out.values[:, 0], 0.05, 2.0) >= 0.9

    def test_stopband_sinusoid_attenuated(self):
        t = np.arange(512) * 2.0
        out = bandpass_filter(make_ts(np.sin(2 * np.pi * 0.2 * t)))
        assert amplitude_at(out.values[:, 0], 0.2, 2.0) <= 0.1

    def test_infeasible_band_names_nyquist(self):
        with pytest.raises(ValueError, match="Nyquist"):
            bandpass_filter(make_ts(np.arange(64.0)), lo=0.01, hi=0.3)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_linearity(self, seed):
        rng = np.random.default_rng(seed)
        x = make_ts(rng.standard_normal((128, 1)))
        y = make_ts(rng.standard_normal((128, 1)))
        a, b = rng.uniform(-3, 3, size=2)
        combined = bandpass_filter(make_ts(a * x.values + b * y.values))
        separate = a * bandpass_filter(x).values + b * bandpass_filter(y).values
        scale = max(np.abs(separate).max(), 1e-12)
        np.testing.assert_allclose(combined.values, separate, rtol=0, atol=1e-9 * scale)


@pytest.mark.parametrize(
    "operation",
    [
        lambda ts: detrend_polynomial(ts, 2),
        lambda ts: regress_nuisance(ts, np.sin(np.arange(ts.n_samples) / 3.0)[:, None]),
        lambda ts: remove_outliers(ts),
        lambda ts: bandpass_filter(ts),
    ],
    ids=["detrend", "regress", "outliers", "bandpass"],
)
def test_operations_preserve_shape_and_metadata(operation):
    rng = np.random.default_rng(11)
    ts = make_ts(rng.standard_normal((40, 3)), dt=2.0)
    out = operation(ts)
    assert out.values.shape == ts.values.shape
    assert out.labels == ts.labels
    assert out.modalities == ts.modalities
    assert out.dt == ts.dt


class TestBandDefinition:
    def test_known_names_only(self):
        with pytest.raises(ValueError, match="band name"):
            BandDefinition("mu", 8.0, 13.0)

    def test_edges_ordered(self):
        with pytest.raises(ValueError, match="edges"):
            BandDefinition("alpha", 12.0, 8.0)
