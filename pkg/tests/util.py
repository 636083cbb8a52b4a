"""Small builders shared across test modules."""

import numpy as np

from dynconn import TimeSeriesMatrix


def make_ts(values, dt=2.0, modalities=None):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[0] == 1:
        values = values.T
    n = values.shape[1]
    labels = [f"n{j}" for j in range(n)]
    if modalities is None:
        modalities = ["EEG" if j % 2 == 0 else "FMRI" for j in range(n)]
    return TimeSeriesMatrix(values, labels, modalities, dt)


def random_weight_matrix(rng, n, density=0.6, max_weight=1.0):
    """Random symmetric non-negative weight matrix with zero diagonal."""
    w = rng.uniform(0.05, max_weight, size=(n, n))
    mask = rng.random((n, n)) < density
    w = np.triu(w * mask, k=1)
    return w + w.T


def random_correlation_matrix(rng, n, t=None):
    """Correlation matrix of random data (always a valid correlation matrix)."""
    data = rng.standard_normal((t or max(3 * n, 12), n))
    r = np.corrcoef(data, rowvar=False)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return r


def profile_templates(n, strong=0.7, weak=0.2):
    """Two block templates whose node-strength profiles differ.

    State 0 strengthens the first half, state 1 the second half, so the
    strength-vector similarity that state detection relies on can tell the
    states apart.
    """
    from dynconn import StateTemplate

    half = n // 2
    templates = []
    for state, strong_block in enumerate((range(half), range(half, n))):
        cov = np.zeros((n, n))
        strong_idx = np.asarray(list(strong_block))
        weak_idx = np.asarray([i for i in range(n) if i not in set(strong_block)])
        cov[np.ix_(strong_idx, strong_idx)] = strong
        cov[np.ix_(weak_idx, weak_idx)] = weak
        np.fill_diagonal(cov, 1.0)
        templates.append(StateTemplate(cov, f"state{state}"))
    return templates


def two_state_dataset(n=20, dwell=500, noise=0.1, seed=12345, n_eeg=None):
    """Planted two-state dataset used by state-recovery tests."""
    from dynconn import generate_dataset

    templates = profile_templates(n)
    n_eeg = n // 4 if n_eeg is None else n_eeg
    return generate_dataset(
        templates, [(0, dwell), (1, dwell)], n_eeg, n - n_eeg, noise, seed
    )
