"""EEG band power on the TR grid and hemodynamic convolution.

High-rate EEG enters as a :class:`RawEegRecord`; per band it is reduced to
one mean-power sample per TR-length segment and then convolved with a
canonical double-gamma hemodynamic response kernel so the EEG columns live
on the same grid, and with the same latency, as the fMRI columns they are
correlated against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .timeseries import BandDefinition, TimeSeriesMatrix, zero_phase_bandpass

# Canonical double-gamma parameters: response peak ~5 s (shape 6, scale 1),
# undershoot ~15 s (shape 16, scale 1), undershoot ratio 1/6.
HRF_RESPONSE_SHAPE = 6.0
HRF_RESPONSE_SCALE = 1.0
HRF_UNDERSHOOT_SHAPE = 16.0
HRF_UNDERSHOOT_SCALE = 1.0
HRF_UNDERSHOOT_RATIO = 6.0


@dataclass
class RawEegRecord:
    """S x C matrix of raw EEG samples at rate ``fs`` Hz."""

    samples: np.ndarray
    fs: float
    channel_labels: list[str]

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        self.channel_labels = list(self.channel_labels)
        if self.samples.ndim != 2:
            raise ValueError(f"samples must be 2-D, got shape {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain non-finite entries")
        if not self.fs > 0:
            raise ValueError(f"fs must be positive, got {self.fs}")
        c = self.samples.shape[1]
        if len(self.channel_labels) != c:
            raise ValueError(f"{len(self.channel_labels)} labels for {c} channels")
        if len(set(self.channel_labels)) != c:
            raise ValueError("channel labels must be unique")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]


@dataclass
class HrfKernel:
    """Hemodynamic response taps sampled at ``dt``, peak-normalized to 1."""

    taps: np.ndarray
    dt: float

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=float)
        if self.taps.ndim != 1 or self.taps.size < 1:
            raise ValueError("taps must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(self.taps)):
            raise ValueError("taps contain non-finite entries")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if abs(self.taps.max() - 1.0) > 1e-12:
            raise ValueError("taps must be peak-normalized to 1")


def band_power_series(
    raw: RawEegRecord, band: BandDefinition, dt: float
) -> TimeSeriesMatrix:
    """Mean band power per channel for each consecutive ``dt`` segment.

    Each channel is bandpassed to ``[band.lo, band.hi]`` with the same
    zero-phase FIR family used for the TR-gridded series, then the mean of
    the squared samples over each dt-length segment becomes one output
    sample. Output columns keep the channel labels and are tagged EEG.

    A trailing partial segment is dropped with a warning. The whole channel
    is filtered in one pass rather than segment by segment, which keeps
    filter edge transients confined to the first and last segments.
    """
    if band.hi >= raw.fs / 2:
        raise ValueError(
            f"band {band.name} upper edge {band.hi} Hz is not below the "
            f"Nyquist frequency {raw.fs / 2} Hz"
        )
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    per_segment = raw.fs * dt
    n_per = int(round(per_segment))
    if n_per < 1 or abs(per_segment - n_per) > 1e-6:
        raise ValueError(
            f"dt={dt} s does not span an integer number of samples at fs={raw.fs} Hz"
        )
    n_segments = raw.n_samples // n_per
    if n_segments < 2:
        raise ValueError(
            f"need at least 2 full dt segments, got {n_segments} "
            f"({raw.n_samples} samples at {n_per} per segment)"
        )
    if raw.n_samples % n_per:
        warnings.warn(
            f"dropping trailing partial segment of {raw.n_samples % n_per} samples"
        )
    filtered = zero_phase_bandpass(raw.samples, band.lo, band.hi, raw.fs)
    used = filtered[: n_segments * n_per]
    power = (used**2).reshape(n_segments, n_per, raw.n_channels).mean(axis=1)
    return TimeSeriesMatrix(power, raw.channel_labels, ["EEG"] * raw.n_channels, dt)


def hrf_kernel(dt: float, duration: float = 32.0) -> HrfKernel:
    """Canonical double-gamma hemodynamic response sampled at ``dt``.

    h(t) = g(t; 6, 1) - g(t; 16, 1) / 6 with g the gamma density, evaluated
    at t = 0, dt, 2*dt, ... up to ``duration``, then peak-normalized.
    """
    if not 0 < dt <= duration:
        raise ValueError(f"need 0 < dt <= duration, got dt={dt}, duration={duration}")
    n = int(math.floor(duration / dt + 1e-9))
    t = np.arange(n + 1) * dt
    taps = _gamma_density(t, HRF_RESPONSE_SHAPE, HRF_RESPONSE_SCALE)
    taps -= _gamma_density(t, HRF_UNDERSHOOT_SHAPE, HRF_UNDERSHOOT_SCALE) / HRF_UNDERSHOOT_RATIO
    return HrfKernel(taps / taps.max(), dt)


def _gamma_density(t: np.ndarray, shape: float, scale: float) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = (
        tp ** (shape - 1.0)
        * np.exp(-tp / scale)
        / (math.gamma(shape) * scale**shape)
    )
    return out


def hrf_convolve(power: TimeSeriesMatrix, kernel: HrfKernel) -> TimeSeriesMatrix:
    """Causal convolution of every column with the kernel, truncated to T."""
    if not math.isclose(power.dt, kernel.dt, rel_tol=1e-9, abs_tol=0.0):
        raise ValueError(
            f"sampling mismatch: series dt={power.dt} s, kernel dt={kernel.dt} s"
        )
    t = power.n_samples
    out = np.empty_like(power.values)
    for j in range(power.n_nodes):
        out[:, j] = np.convolve(power.values[:, j], kernel.taps)[:t]
    return power.with_values(out)
