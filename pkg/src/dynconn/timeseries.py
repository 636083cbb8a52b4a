"""Multichannel time-course data model and post-processing chain.

The :class:`TimeSeriesMatrix` is the common currency of the package: a
``T x N`` matrix of samples with one labelled, modality-tagged node per
column and a fixed sampling interval. The operations in this module clean
the columns before any correlation or graph construction: polynomial
detrending, nuisance regression, spike removal, and zero-phase bandpass
filtering. All of them are pure functions that return a new matrix and
preserve shape, labels, modalities, and sampling interval.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal

MODALITIES = ("EEG", "FMRI")

# Consistency factor relating the median absolute deviation of a normal
# sample to its standard deviation.
MAD_SCALE = 1.4826


@dataclass
class TimeSeriesMatrix:
    """T x N sample matrix with per-column node labels and modality tags.

    Parameters
    ----------
    values : ndarray, shape (T, N)
        Samples; every entry must be finite and T >= 2.
    labels : list of str
        Unique node names, one per column.
    modalities : list of str
        Per-column tag, each one of ``("EEG", "FMRI")``.
    dt : float
        Sampling interval in seconds (the TR for TR-gridded series).
    """

    values: np.ndarray
    labels: list[str]
    modalities: list[str]
    dt: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.labels = list(self.labels)
        self.modalities = list(self.modalities)
        if self.values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {self.values.shape}")
        t, n = self.values.shape
        if t < 2:
            raise ValueError(f"need at least 2 samples per column, got {t}")
        if n < 1:
            raise ValueError("need at least one column")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values contain non-finite entries")
        if len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for {n} columns")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if len(self.modalities) != n:
            raise ValueError(f"{len(self.modalities)} modality tags for {n} columns")
        bad = sorted(set(self.modalities) - set(MODALITIES))
        if bad:
            raise ValueError(f"unknown modality tags {bad}; expected one of {MODALITIES}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray) -> "TimeSeriesMatrix":
        """New matrix with the same labels/modalities/dt and fresh values."""
        return TimeSeriesMatrix(values, list(self.labels), list(self.modalities), self.dt)


@dataclass(frozen=True)
class BandDefinition:
    """A named EEG frequency band with edges in Hz."""

    name: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.name not in BAND_NAMES:
            raise ValueError(f"unknown band name {self.name!r}; expected one of {BAND_NAMES}")
        if not 0 < self.lo < self.hi:
            raise ValueError(f"band edges must satisfy 0 < lo < hi, got ({self.lo}, {self.hi})")


BAND_NAMES = ("delta", "theta", "alpha", "beta", "low_gamma")

#: Conventional band edges in Hz, configurable by constructing BandDefinition directly.
DEFAULT_BANDS = {
    "delta": BandDefinition("delta", 1.0, 4.0),
    "theta": BandDefinition("theta", 4.0, 8.0),
    "alpha": BandDefinition("alpha", 8.0, 12.0),
    "beta": BandDefinition("beta", 12.0, 30.0),
    "low_gamma": BandDefinition("low_gamma", 30.0, 50.0),
}


def polynomial_basis(n_samples: int, order: int) -> np.ndarray:
    """Design matrix [1, x, ..., x^order] on time rescaled to [-1, 1]."""
    x = np.linspace(-1.0, 1.0, n_samples)
    return np.vander(x, order + 1, increasing=True)


def detrend_polynomial(ts: TimeSeriesMatrix, order: int) -> TimeSeriesMatrix:
    """Remove a per-column least-squares polynomial trend of the given order.

    The fit always includes an intercept, so ``order=1`` removes both the
    mean and any linear drift. Orders 1 through 3 are supported.
    """
    if not 1 <= order <= 3:
        raise ValueError(f"order must be in [1, 3], got {order}")
    t = ts.n_samples
    if t <= order + 1:
        raise ValueError(
            f"polynomial detrend of order {order} needs more than {order + 1} "
            f"samples per column, got {t}"
        )
    basis = polynomial_basis(t, order)
    coef, *_ = np.linalg.lstsq(basis, ts.values, rcond=None)
    return ts.with_values(ts.values - basis @ coef)


def nuisance_design(regressors: np.ndarray, include_derivatives: bool) -> np.ndarray:
    """Build the regression design: intercept, regressors, optional derivatives.

    Derivatives are first differences with the first element set to 0. Any
    all-zero regressor column is dropped with a warning.
    """
    reg = np.asarray(regressors, dtype=float)
    if reg.ndim == 1:
        reg = reg[:, None]
    if reg.ndim != 2:
        raise ValueError(f"regressors must be 2-D, got shape {reg.shape}")
    if not np.all(np.isfinite(reg)):
        raise ValueError("regressors contain non-finite entries")
    dead = np.flatnonzero(~reg.any(axis=0))
    if dead.size:
        warnings.warn(f"dropping all-zero regressor column(s) {dead.tolist()}")
        reg = np.delete(reg, dead, axis=1)
    columns = [np.ones((reg.shape[0], 1)), reg]
    if include_derivatives and reg.shape[1]:
        deriv = np.diff(reg, axis=0, prepend=reg[:1])
        deriv[0] = 0.0
        columns.append(deriv)
    return np.hstack(columns)


def regress_nuisance(
    ts: TimeSeriesMatrix,
    regressors: np.ndarray,
    include_derivatives: bool = False,
) -> TimeSeriesMatrix:
    """Residualize every column against nuisance regressors by least squares.

    Rank-deficient designs are solved with the minimum-norm solution, so the
    operation is total on valid inputs.
    """
    reg = np.asarray(regressors, dtype=float)
    if reg.ndim == 1:
        reg = reg[:, None]
    if reg.shape[0] != ts.n_samples:
        raise ValueError(
            f"regressors have {reg.shape[0]} rows but the series has {ts.n_samples} samples"
        )
    design = nuisance_design(reg, include_derivatives)
    if ts.n_samples <= design.shape[1]:
        raise ValueError(
            f"design has {design.shape[1]} columns; need more than "
            f"{design.shape[1]} samples, got {ts.n_samples}"
        )
    coef, *_ = np.linalg.lstsq(design, ts.values, rcond=None)
    return ts.with_values(ts.values - design @ coef)


def remove_outliers(ts: TimeSeriesMatrix, z_threshold: float = 4.0) -> TimeSeriesMatrix:
    """Replace spike samples per column by interpolation between inliers.

    A sample is an outlier when its robust z-score ``|x - median| /
    (1.4826 * MAD)`` exceeds ``z_threshold``. When the MAD is zero, any
    sample equal to the median is an inlier and any deviating sample counts
    as infinitely deviant, so constant columns pass through unchanged while
    isolated spikes on an otherwise flat column are still removed. Edge
    outliers are clamped to the nearest inlier value.

    Replacing a spike shifts the column's median and MAD, which can push a
    previously borderline sample over the threshold, so detection and
    replacement repeat until the column stops changing. That makes the
    operation idempotent: the output never contains a sample the operation
    itself would flag.
    """
    if not z_threshold > 0:
        raise ValueError(f"z_threshold must be positive, got {z_threshold}")
    if ts.n_samples < 3:
        raise ValueError(f"need at least 3 samples, got {ts.n_samples}")
    out = ts.values.copy()
    for j in range(ts.n_nodes):
        out[:, j] = _despike_column(out[:, j], z_threshold)
    return ts.with_values(out)


def _despike_column(col: np.ndarray, z_threshold: float, max_passes: int = 100) -> np.ndarray:
    for _ in range(max_passes):
        med = np.median(col)
        dev = np.abs(col - med)
        mad = np.median(dev)
        if mad > 0:
            bad = dev > z_threshold * MAD_SCALE * mad
        else:
            bad = dev > 0
        if not bad.any():
            return col
        good = np.flatnonzero(~bad)
        replaced = col.copy()
        # np.interp clamps to the first/last inlier outside their range.
        replaced[bad] = np.interp(np.flatnonzero(bad), good, col[good])
        if np.array_equal(replaced, col):
            return replaced
        col = replaced
    return col


def bandpass_taps(lo: float, hi: float, fs: float, n_samples: int) -> np.ndarray:
    """Hamming windowed-sinc FIR bandpass taps for a signal of given length.

    The order targets 4 / (transition width / fs) where the transition width
    is the narrower of the low edge and half the bandwidth, capped at
    ``n_samples - 1`` rounded down to even so the filter never exceeds the
    signal.
    """
    if not 0 < lo < hi:
        raise ValueError(f"band edges must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if hi >= fs / 2:
        raise ValueError(
            f"upper edge {hi} Hz is not below the Nyquist frequency {fs / 2} Hz"
        )
    width = min(lo, (hi - lo) / 2.0)
    order = int(4.0 / (width / fs))
    cap = (n_samples - 1) - ((n_samples - 1) % 2)
    order = max(2, min(order, cap))
    return signal.firwin(order + 1, [lo, hi], window="hamming", pass_zero=False, fs=fs)


def zero_phase_bandpass(values: np.ndarray, lo: float, hi: float, fs: float) -> np.ndarray:
    """Demean then apply the FIR bandpass forward and backward along axis 0."""
    x = values - values.mean(axis=0, keepdims=True)
    taps = bandpass_taps(lo, hi, fs, x.shape[0])
    padlen = min(3 * len(taps), x.shape[0] - 1)
    return signal.filtfilt(taps, [1.0], x, axis=0, padtype="even", padlen=padlen)


def bandpass_filter(
    ts: TimeSeriesMatrix, lo: float = 0.01, hi: float = 0.10
) -> TimeSeriesMatrix:
    """Zero-phase bandpass of every column, preserving length.

    The filter is a Hamming windowed-sinc FIR applied forward and backward
    (no phase distortion) over reflection-padded columns; columns are
    demeaned first so the DC component is removed exactly.
    """
    nyquist = 1.0 / (2.0 * ts.dt)
    if hi >= nyquist:
        raise ValueError(
            f"upper edge {hi} Hz must be below the Nyquist frequency "
            f"{nyquist} Hz for dt={ts.dt}"
        )
    if not 0 < lo < hi:
        raise ValueError(f"band edges must satisfy 0 < lo < hi, got ({lo}, {hi})")
    return ts.with_values(zero_phase_bandpass(ts.values, lo, hi, 1.0 / ts.dt))
