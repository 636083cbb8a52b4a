"""Sliding-window graph series and temporal summary measures.

A window of ``length_tr`` samples slides over the time-course matrix in
steps of ``step_tr`` samples; each window yields one signed weighted graph.
For a series of 256 TRs with the default 20-TR window and 1-TR step this
produces 237 windows. Per-window metric traces are summarized by their
sample variance and by their low-frequency fluctuation amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import (
    SignedWeightedGraph,
    clustering_coefficient,
    connectivity_strength,
    global_efficiency,
    pearson_correlation_matrix,
    split_signed,
)
from .timeseries import TimeSeriesMatrix

METRICS = ("cs", "cc", "ge")
SIGNS = ("positive", "negative")

_METRIC_FUNCS = {
    "cs": connectivity_strength,
    "cc": clustering_coefficient,
    "ge": global_efficiency,
}


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window geometry in TR units."""

    length_tr: int = 20
    step_tr: int = 1

    def __post_init__(self):
        if self.length_tr < 3:
            raise ValueError(f"window length must be at least 3 TRs, got {self.length_tr}")
        if self.step_tr < 1:
            raise ValueError(f"step must be at least 1 TR, got {self.step_tr}")


@dataclass
class DynamicGraphSeries:
    """Ordered per-window graphs with their half-open sample ranges."""

    windows: list[tuple[int, int]]
    graphs: list[SignedWeightedGraph]
    dt: float

    def __post_init__(self):
        if len(self.windows) != len(self.graphs):
            raise ValueError(
                f"{len(self.windows)} windows but {len(self.graphs)} graphs"
            )
        if not self.windows:
            raise ValueError("series must contain at least one window")
        starts = [a for a, _ in self.windows]
        if any(b <= a for a, b in self.windows) or any(
            s2 <= s1 for s1, s2 in zip(starts, starts[1:])
        ):
            raise ValueError("window ranges must be non-empty and strictly increasing")
        labels = self.graphs[0].labels
        if any(g.labels != labels for g in self.graphs):
            raise ValueError("all window graphs must share the same node labels")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def n_windows(self) -> int:
        return len(self.windows)

    @property
    def labels(self) -> list[str]:
        return self.graphs[0].labels


def make_windows(n_samples: int, spec: WindowSpec) -> list[tuple[int, int]]:
    """Half-open index ranges [k*step, k*step + L) covering the series."""
    if n_samples < spec.length_tr:
        raise ValueError(
            f"series of {n_samples} samples is shorter than the "
            f"{spec.length_tr}-TR window"
        )
    count = (n_samples - spec.length_tr) // spec.step_tr + 1
    return [
        (k * spec.step_tr, k * spec.step_tr + spec.length_tr) for k in range(count)
    ]


def dynamic_graph_series(ts: TimeSeriesMatrix, spec: WindowSpec) -> DynamicGraphSeries:
    """One signed weighted graph per sliding window, ordered by window start."""
    windows = make_windows(ts.n_samples, spec)
    graphs = []
    for idx, (a, b) in enumerate(windows):
        segment = ts.with_values(ts.values[a:b])
        try:
            graphs.append(split_signed(pearson_correlation_matrix(segment)))
        except ValueError as err:
            raise ValueError(f"window {idx} [{a}:{b}): {err}") from err
    return DynamicGraphSeries(windows, graphs, ts.dt)


def metric_series(
    dyn: DynamicGraphSeries, metric: str, sign: str
) -> tuple[np.ndarray, np.ndarray]:
    """Per-window node-level metric matrix and graph-level series.

    Returns ``(node_values, net_values)`` with shapes ``(windows, N)`` and
    ``(windows,)``, in window order. ``metric`` is one of ``cs``, ``cc``,
    ``ge``; ``sign`` selects the positive or negative weight matrix.
    """
    key = metric.lower()
    if key not in _METRIC_FUNCS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    func = _METRIC_FUNCS[key]
    node_rows = np.empty((dyn.n_windows, dyn.graphs[0].n_nodes))
    net = np.empty(dyn.n_windows)
    for i, g in enumerate(dyn.graphs):
        node_rows[i], net[i] = func(g.weights(sign))
    return node_rows, net


def temporal_variance(series: np.ndarray) -> float:
    """Sample variance (n - 1 divisor) of a metric trace."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"need a 1-D sequence of at least 2 values, got shape {x.shape}")
    return float(np.var(x, ddof=1))


def low_freq_amplitude(
    series: np.ndarray, dt: float, f_lo: float = 0.0, f_hi: float = 0.025
) -> float:
    """Low-frequency fluctuation amplitude of a metric trace.

    The trace is demeaned and the single-sided Fourier amplitudes
    ``2*|X_k|/n`` are summed over the bins with ``f_lo < f_k <= f_hi``
    (excluding DC), so a unit sinusoid lying on a bin inside the band
    scores 1. For traces sampled one window per step, ``dt`` is
    ``step_tr * TR`` seconds.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 8:
        raise ValueError(f"need a 1-D sequence of at least 8 values, got shape {x.shape}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if f_hi >= 1.0 / (2.0 * dt):
        raise ValueError(
            f"f_hi={f_hi} Hz is not below the Nyquist frequency {1.0 / (2.0 * dt)} Hz"
        )
    if not 0 <= f_lo < f_hi:
        raise ValueError(f"need 0 <= f_lo < f_hi, got ({f_lo}, {f_hi})")
    n = x.size
    freqs = np.fft.rfftfreq(n, dt)
    band = (freqs > max(f_lo, 0.0)) & (freqs <= f_hi * (1.0 + 1e-12))
    if not band.any():
        raise ValueError(
            f"no spectral bins in ({f_lo}, {f_hi}] Hz at resolution "
            f"{freqs[1]:.6g} Hz; lengthen the series or widen the band"
        )
    spectrum = np.fft.rfft(x - x.mean())
    return float((2.0 * np.abs(spectrum[band]) / n).sum())
