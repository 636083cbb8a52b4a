"""Signed weighted graphs from correlation matrices and their metrics.

A correlation matrix splits into a pair of non-negative weight matrices:
positive correlations keep their value in ``w_plus``, negative ones
contribute their magnitude to ``w_minus``, and self-correlations are
excluded (zero diagonal). Three metrics are computed per weight matrix at
node and whole-graph level:

* connectivity strength: row sum of weights;
* clustering coefficient: sum over ordered neighbor pairs of the cube root
  of the triangle weight product, divided by ``CS_i * (CS_i - 1)`` with CS
  the weighted strength. Because the denominator uses strength rather than
  integer degree, values above 1 are possible (a uniform triangle with
  weight 0.75 scores 2.0); ``denominator="degree"`` switches to the
  conventional degree-based normalization;
* global efficiency: mean inverse shortest-path length, with edge length
  the inverse of the edge weight and unreachable pairs contributing 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .timeseries import TimeSeriesMatrix

STRENGTH_EPS = 1e-12


@dataclass
class CorrelationMatrix:
    """Symmetric N x N Pearson correlation matrix with unit diagonal."""

    r: np.ndarray
    labels: list[str]

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.labels = list(self.labels)
        n = self.r.shape[0]
        if self.r.ndim != 2 or self.r.shape != (n, n):
            raise ValueError(f"r must be square, got shape {self.r.shape}")
        if len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for {n} nodes")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if not np.all(np.isfinite(self.r)):
            raise ValueError("correlations contain non-finite entries")
        if np.abs(self.r - self.r.T).max() > 1e-12:
            raise ValueError("correlation matrix is not symmetric")
        if not np.all(np.diagonal(self.r) == 1.0):
            raise ValueError("correlation diagonal must be exactly 1")
        if np.abs(self.r).max() > 1.0:
            raise ValueError("correlations must lie in [-1, 1]")

    @property
    def n_nodes(self) -> int:
        return self.r.shape[0]


@dataclass
class SignedWeightedGraph:
    """Pair of non-negative weight matrices split from one correlation matrix.

    ``exclusive=True`` (the construction invariant) enforces that every pair
    is positive or negative but never both. Averaged graphs, e.g. per
    connectivity state, relax that: set ``exclusive=False``.
    """

    w_plus: np.ndarray
    w_minus: np.ndarray
    labels: list[str]
    exclusive: bool = True

    def __post_init__(self):
        self.w_plus = np.asarray(self.w_plus, dtype=float)
        self.w_minus = np.asarray(self.w_minus, dtype=float)
        self.labels = list(self.labels)
        n = self.w_plus.shape[0]
        for name, w in (("w_plus", self.w_plus), ("w_minus", self.w_minus)):
            if w.ndim != 2 or w.shape != (n, n):
                raise ValueError(f"{name} must be square of matching size, got {w.shape}")
            if not np.all(np.isfinite(w)):
                raise ValueError(f"{name} contains non-finite entries")
            if w.min() < 0:
                raise ValueError(f"{name} must be non-negative")
            if np.abs(w - w.T).max() > 1e-12:
                raise ValueError(f"{name} is not symmetric")
            if np.any(np.diagonal(w) != 0.0):
                raise ValueError(f"{name} must have a zero diagonal")
        if len(self.labels) != n or len(set(self.labels)) != n:
            raise ValueError(f"need {n} unique labels, got {self.labels}")
        if self.exclusive and np.any(self.w_plus * self.w_minus != 0.0):
            raise ValueError("a pair cannot carry both positive and negative weight")

    @property
    def n_nodes(self) -> int:
        return self.w_plus.shape[0]

    def weights(self, sign: str) -> np.ndarray:
        """The ``"positive"`` or ``"negative"`` weight matrix."""
        if sign == "positive":
            return self.w_plus
        if sign == "negative":
            return self.w_minus
        raise ValueError(f"sign must be 'positive' or 'negative', got {sign!r}")


@dataclass
class GraphMetricSet:
    """Node-level and graph-level strength, clustering, and efficiency."""

    cs_node: np.ndarray
    cs_net: float
    cc_node: np.ndarray
    cc_net: float
    ge_node: np.ndarray
    ge_net: float


def pearson_correlation_matrix(ts: TimeSeriesMatrix) -> CorrelationMatrix:
    """Pearson correlation over the T samples for every pair of columns."""
    values = ts.values
    if ts.n_samples < 3:
        raise ValueError(f"need at least 3 samples, got {ts.n_samples}")
    flat = np.flatnonzero(values.std(axis=0) == 0.0)
    if flat.size:
        names = [ts.labels[i] for i in flat]
        raise ValueError(f"constant column(s) {names} have no defined correlation")
    r = np.corrcoef(values, rowvar=False)
    r = np.atleast_2d(r)
    # corrcoef can stray past +/-1 by rounding; make the invariants exact
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(r, ts.labels)


def split_signed(corr: CorrelationMatrix) -> SignedWeightedGraph:
    """Split correlations into the positive / negative weight matrix pair."""
    r = corr.r
    w_plus = np.where(r > 0.0, r, 0.0)
    w_minus = np.where(r < 0.0, -r, 0.0)
    np.fill_diagonal(w_plus, 0.0)
    np.fill_diagonal(w_minus, 0.0)
    return SignedWeightedGraph(w_plus, w_minus, corr.labels)


def _check_weights(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"weight matrix must be square, got shape {w.shape}")
    if w.min() < 0:
        raise ValueError("weights must be non-negative")
    if np.abs(w - w.T).max() > 1e-12:
        raise ValueError("weight matrix is not symmetric")
    if np.any(np.diagonal(w) != 0.0):
        raise ValueError("weight matrix must have a zero diagonal")
    return w


def connectivity_strength(w: np.ndarray) -> tuple[np.ndarray, float]:
    """Per-node sum of weights and its mean over nodes."""
    w = _check_weights(w)
    cs_node = w.sum(axis=1)
    return cs_node, float(cs_node.mean())


def clustering_coefficient(
    w: np.ndarray, denominator: str = "strength"
) -> tuple[np.ndarray, float]:
    """Weighted clustering per node and its mean over nodes.

    The numerator sums ``(w_ij * w_ik * w_jk) ** (1/3)`` over ordered
    neighbor pairs, counting each triangle twice. With the default
    ``denominator="strength"`` it is divided by ``CS_i * (CS_i - 1)``;
    nodes where that product is within 1e-12 of zero or negative, or with
    fewer than two neighbors, score 0. ``denominator="degree"`` divides by
    ``k_i * (k_i - 1)`` with k the neighbor count instead.
    """
    w = _check_weights(w)
    if denominator not in ("strength", "degree"):
        raise ValueError(f"denominator must be 'strength' or 'degree', got {denominator!r}")
    roots = np.cbrt(w)
    numerator = np.diagonal(roots @ roots @ roots).copy()
    degree = np.count_nonzero(w, axis=1)
    if denominator == "strength":
        cs = w.sum(axis=1)
        den = cs * (cs - 1.0)
    else:
        den = degree * (degree - 1.0)
    valid = (den > STRENGTH_EPS) & (degree >= 2)
    cc_node = np.zeros(w.shape[0])
    cc_node[valid] = numerator[valid] / den[valid]
    return cc_node, float(cc_node.mean())


def global_efficiency(w: np.ndarray) -> tuple[np.ndarray, float]:
    """Mean inverse shortest-path length from each node.

    Edge length is the inverse of the edge weight; absent edges carry no
    length and unreachable pairs contribute 0. For each node the inverse
    distances to the other N - 1 nodes are averaged.
    """
    w = _check_weights(w)
    n = w.shape[0]
    if n == 1:
        return np.zeros(1), 0.0
    lengths = np.zeros_like(w)
    mask = w > 0
    lengths[mask] = 1.0 / w[mask]
    dist = shortest_path(csr_matrix(lengths), method="D", directed=False)
    inv = np.zeros_like(dist)
    reachable = np.isfinite(dist) & (dist > 0)
    inv[reachable] = 1.0 / dist[reachable]
    ge_node = inv.sum(axis=1) / (n - 1)
    return ge_node, float(ge_node.mean())


def graph_metrics(w: np.ndarray, clustering_denominator: str = "strength") -> GraphMetricSet:
    """All three metrics for one weight matrix."""
    cs_node, cs_net = connectivity_strength(w)
    cc_node, cc_net = clustering_coefficient(w, clustering_denominator)
    ge_node, ge_net = global_efficiency(w)
    return GraphMetricSet(cs_node, cs_net, cc_node, cc_net, ge_node, ge_net)
