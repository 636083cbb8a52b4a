"""Synthetic multimodal datasets with planted connectivity states.

Ground truth for end-to-end validation: each state is a correlation
template, samples are drawn from a zero-mean Gaussian with that template's
covariance for the duration of each dwell segment, and the per-sample state
labels are recorded alongside the data.

Randomness is pinned to ``numpy.random.default_rng`` (the PCG64 bit
generator with numpy's documented Gaussian transform), so a given seed and
parameter set reproduces the dataset bit for bit across runs and platforms.

Note that state detection compares windows through their node-strength
vectors, so templates are only distinguishable when their strength profiles
differ (for example, blocks whose internal weight differs between states);
two states that merely permute equally-weighted blocks look identical to
that similarity measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .timeseries import TimeSeriesMatrix


@dataclass
class StateTemplate:
    """Symmetric positive-definite covariance defining one planted state."""

    covariance: np.ndarray
    name: str

    def __post_init__(self):
        self.covariance = np.asarray(self.covariance, dtype=float)
        c = self.covariance
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"covariance must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("covariance contains non-finite entries")
        if np.abs(c - c.T).max() > 1e-12:
            raise ValueError("covariance is not symmetric")
        if np.any(np.diagonal(c) <= 0):
            raise ValueError("covariance diagonal must be strictly positive")
        smallest = float(np.linalg.eigvalsh(c).min())
        if smallest <= 0:
            raise ValueError(
                f"covariance is not positive definite (minimum eigenvalue {smallest:.6g})"
            )

    @property
    def n_nodes(self) -> int:
        return self.covariance.shape[0]


@dataclass
class SyntheticDataset:
    """Generated series plus the per-sample ground-truth state labels."""

    ts: TimeSeriesMatrix
    true_labels: np.ndarray
    templates: list[StateTemplate]
    seed: int

    def __post_init__(self):
        self.true_labels = np.asarray(self.true_labels, dtype=int)
        if self.true_labels.shape != (self.ts.n_samples,):
            raise ValueError(
                f"{self.true_labels.size} labels for {self.ts.n_samples} samples"
            )
        if self.true_labels.min() < 0 or self.true_labels.max() >= len(self.templates):
            raise ValueError("labels must index the template list")


def block_template(
    n: int, blocks: list[list[int]], within: float, between: float
) -> StateTemplate:
    """Correlation template with block structure.

    ``blocks`` must partition ``0..n-1``; entries inside a block are
    ``within``, entries across blocks are ``between``, the diagonal is 1.
    The result must be positive definite.
    """
    seen: set[int] = set()
    for block in blocks:
        overlap = seen & set(block)
        if overlap:
            raise ValueError(f"blocks overlap at indices {sorted(overlap)}")
        seen |= set(block)
    if seen != set(range(n)):
        raise ValueError(f"blocks must partition 0..{n - 1}")
    if not -1.0 < between < within <= 1.0:
        raise ValueError(
            f"need -1 < between < within <= 1, got between={between}, within={within}"
        )
    cov = np.full((n, n), float(between))
    for block in blocks:
        idx = np.asarray(sorted(block), dtype=int)
        cov[np.ix_(idx, idx)] = within
    np.fill_diagonal(cov, 1.0)
    smallest = float(np.linalg.eigvalsh(cov).min())
    if smallest <= 0:
        raise ValueError(
            f"template is not positive definite (minimum eigenvalue {smallest:.6g}); "
            "reduce |between| or within"
        )
    name = f"block(within={within:g}, between={between:g}, sizes={[len(b) for b in blocks]})"
    return StateTemplate(cov, name)


def generate_dataset(
    templates: list[StateTemplate],
    dwell_lengths: list[tuple[int, int]],
    n_eeg: int,
    n_fmri: int,
    noise_sigma: float,
    seed: int,
    dt: float = 2.0,
) -> SyntheticDataset:
    """Draw dwell segments from the planted templates.

    ``dwell_lengths`` is a list of ``(template index, length)`` pairs; each
    segment draws that many rows from a zero-mean Gaussian with the
    template covariance (via its symmetric square root) plus independent
    Gaussian noise of scale ``noise_sigma``. The first ``n_eeg`` columns
    are tagged EEG, the rest FMRI. Fully determined by ``seed``.
    """
    n = n_eeg + n_fmri
    if n_eeg < 0 or n_fmri < 0 or n < 1:
        raise ValueError(f"invalid column counts n_eeg={n_eeg}, n_fmri={n_fmri}")
    if not templates:
        raise ValueError("need at least one template")
    for t in templates:
        if t.n_nodes != n:
            raise ValueError(
                f"template {t.name!r} has {t.n_nodes} nodes, expected n_eeg + n_fmri = {n}"
            )
    if not dwell_lengths:
        raise ValueError("need at least one dwell segment")
    for ti, length in dwell_lengths:
        if not 0 <= ti < len(templates):
            raise ValueError(f"dwell references template {ti} of {len(templates)}")
        if length < 1:
            raise ValueError(f"dwell lengths must be at least 1, got {length}")
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be non-negative, got {noise_sigma}")

    factors = [_symmetric_sqrt(t.covariance) for t in templates]
    rng = np.random.default_rng(seed)
    segments = []
    labels = []
    for ti, length in dwell_lengths:
        draw = rng.standard_normal((length, n)) @ factors[ti]
        if noise_sigma > 0:
            draw = draw + noise_sigma * rng.standard_normal((length, n))
        segments.append(draw)
        labels.extend([ti] * length)
    values = np.vstack(segments)
    names = [f"E{i + 1:02d}" for i in range(n_eeg)] + [
        f"IC{i + 1:02d}" for i in range(n_fmri)
    ]
    modalities = ["EEG"] * n_eeg + ["FMRI"] * n_fmri
    ts = TimeSeriesMatrix(values, names, modalities, dt)
    return SyntheticDataset(ts, np.asarray(labels, dtype=int), list(templates), seed)


def _symmetric_sqrt(cov: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(cov)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
