"""Independent reference implementations used to derive expected values.

Everything here is deliberately brute force and shares no code with the
package: normal equations instead of lstsq, triple loops instead of matrix
products, exhaustive path enumeration instead of Dijkstra, quadrature
instead of closed forms. Tests compare package output against these.
"""

import math

import numpy as np
from scipy.integrate import quad


def polyfit_residuals(column, order):
    """Least-squares polynomial residuals via explicit normal equations."""
    x = np.asarray(column, dtype=float)
    t = np.arange(x.size, dtype=float)
    basis = np.column_stack([t**p for p in range(order + 1)])
    coef = np.linalg.solve(basis.T @ basis, basis.T @ x)
    return x - basis @ coef


def projection_residuals(column, design):
    """Residuals of the orthogonal projection onto the design columns."""
    design = np.atleast_2d(np.asarray(design, dtype=float))
    if design.shape[0] != np.asarray(column).size:
        design = design.T
    proj = design @ np.linalg.pinv(design) @ np.asarray(column, dtype=float)
    return np.asarray(column, dtype=float) - proj


def robust_z(column):
    """|x - median| / (1.4826 * MAD); infinite where MAD is 0 but x deviates."""
    x = np.asarray(column, dtype=float)
    dev = np.abs(x - np.median(x))
    mad = np.median(dev)
    if mad == 0:
        return np.where(dev > 0, np.inf, 0.0)
    return dev / (1.4826 * mad)


def amplitude_at(signal_values, freq_hz, dt):
    """Single-frequency projection amplitude of a real signal."""
    x = np.asarray(signal_values, dtype=float)
    t = np.arange(x.size) * dt
    return 2.0 * abs(np.sum(x * np.exp(-2j * np.pi * freq_hz * t))) / x.size


def sinusoid_band_power(amplitude):
    """Mean power of a pure sinusoid of the given amplitude (Parseval)."""
    return amplitude**2 / 2.0


def pearson_r(x, y):
    """Pearson correlation straight from the definition."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    return float((dx * dy).sum() / math.sqrt((dx**2).sum() * (dy**2).sum()))


def strength_by_loop(w):
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    cs = np.zeros(n)
    for i in range(n):
        for j in range(n):
            cs[i] += w[i, j]
    return cs, cs.sum() / n


def clustering_by_loop(w, eps=1e-12):
    """Triple-loop evaluation: sum over ordered pairs j != k, both != i."""
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    cs, _ = strength_by_loop(w)
    cc = np.zeros(n)
    for i in range(n):
        if np.count_nonzero(w[i]) < 2:
            continue
        den = cs[i] * (cs[i] - 1.0)
        if den <= eps:
            continue
        total = 0.0
        for j in range(n):
            for k in range(n):
                if j == k or j == i or k == i:
                    continue
                total += (w[i, j] * w[i, k] * w[j, k]) ** (1.0 / 3.0)
        cc[i] = total / den
    return cc, cc.sum() / n


def shortest_paths_by_enumeration(w):
    """All-pairs shortest weighted path lengths by exhaustive simple-path DFS.

    Edge length is 1 / weight. Only practical for small graphs (N <= 8 or so).
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    neighbors = [np.flatnonzero(w[i] > 0) for i in range(n)]

    def explore(node, target, visited, length):
        if length >= dist[start, target]:
            return
        if node == target:
            dist[start, target] = length
            return
        for nxt in neighbors[node]:
            if nxt not in visited:
                explore(nxt, target, visited | {nxt}, length + 1.0 / w[node, nxt])

    for start in range(n):
        for target in range(n):
            if target != start:
                explore(start, target, {start}, 0.0)
    return dist


def efficiency_by_enumeration(w):
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    dist = shortest_paths_by_enumeration(w)
    ge = np.zeros(n)
    for i in range(n):
        for j in range(n):
            if j != i and np.isfinite(dist[i, j]):
                ge[i] += 1.0 / dist[i, j]
        ge[i] /= n - 1
    return ge, ge.sum() / n


def window_count(n_samples, length, step):
    """Count windows by literally sliding one across the series."""
    count = 0
    start = 0
    while start + length <= n_samples:
        count += 1
        start += step
    return count


def sample_variance(values):
    x = np.asarray(values, dtype=float)
    mean = x.sum() / x.size
    return float(((x - mean) ** 2).sum() / (x.size - 1))


def modularity_by_definition(adj, assignment):
    """Q = (1/2m) sum_ab [A_ab - k_a k_b / 2m] delta(c_a, c_b), all pairs."""
    a = np.asarray(adj, dtype=float).copy()
    np.fill_diagonal(a, 0.0)
    k = a.sum(axis=1)
    two_m = k.sum()
    q = 0.0
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            if assignment[i] == assignment[j]:
                q += a[i, j] - k[i] * k[j] / two_m
    return q / two_m


def t_two_sided_p_by_quadrature(t, df):
    """Two-sided Student-t p value by numerical integration of the density."""

    def density(x):
        return (
            math.gamma((df + 1) / 2.0)
            / (math.sqrt(df * math.pi) * math.gamma(df / 2.0))
            * (1.0 + x * x / df) ** (-(df + 1) / 2.0)
        )

    tail, _ = quad(density, abs(t), np.inf)
    return 2.0 * tail


def adjusted_rand_index(labels_a, labels_b):
    """Chance-corrected agreement between two partitions (pair counting)."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ValueError("label vectors must have the same length")
    n = a.size
    ua, ub = np.unique(a), np.unique(b)
    table = np.array([[np.sum((a == x) & (b == y)) for y in ub] for x in ua])

    def comb2(v):
        return v * (v - 1) // 2

    sum_ij = sum(comb2(int(v)) for v in table.ravel())
    sum_a = sum(comb2(int(v)) for v in table.sum(axis=1))
    sum_b = sum(comb2(int(v)) for v in table.sum(axis=0))
    expected = sum_a * sum_b / comb2(n)
    maximum = (sum_a + sum_b) / 2.0
    if maximum == expected:
        return 1.0
    return (sum_ij - expected) / (maximum - expected)


def majority_window_labels(sample_labels, windows):
    """Per-window ground truth: the most common sample label in the window."""
    out = []
    for a, b in windows:
        counts = np.bincount(np.asarray(sample_labels)[a:b])
        out.append(int(np.argmax(counts)))
    return np.asarray(out, dtype=int)
