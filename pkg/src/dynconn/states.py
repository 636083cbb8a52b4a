"""Connectivity-state detection over sliding-window graphs.

Windows are compared through their node-strength vectors: the similarity of
two windows is the Pearson correlation of those vectors. Groups of windows
with similar strength patterns are found by greedy multi-level modularity
maximization on the non-negative part of the similarity matrix, and each
group's member graphs are averaged into the graph representing that
connectivity state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DynamicGraphSeries
from .graph import SignedWeightedGraph, connectivity_strength

#: Minimum modularity gain for a node move to be accepted.
MIN_GAIN = 1e-10


@dataclass
class WindowSimilarityMatrix:
    """Symmetric M x M correlation of window strength vectors."""

    s: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        m = self.s.shape[0]
        if self.s.ndim != 2 or self.s.shape != (m, m) or m < 2:
            raise ValueError(f"similarity must be square with M >= 2, got {self.s.shape}")
        if not np.all(np.isfinite(self.s)):
            raise ValueError("similarities contain non-finite entries")
        if np.abs(self.s - self.s.T).max() > 1e-12:
            raise ValueError("similarity matrix is not symmetric")
        if not np.all(np.diagonal(self.s) == 1.0):
            raise ValueError("similarity diagonal must be exactly 1")
        if np.abs(self.s).max() > 1.0:
            raise ValueError("similarities must lie in [-1, 1]")

    @property
    def n_windows(self) -> int:
        return self.s.shape[0]


@dataclass
class StatePartition:
    """Assignment of every window to a connectivity state.

    ``state_graphs`` is filled by :func:`state_average_graphs`; detection
    itself returns the partition without graphs.
    """

    assignment: np.ndarray
    n_states: int
    modularity_q: float
    state_graphs: list[SignedWeightedGraph] | None = None

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=int)
        if self.assignment.ndim != 1 or self.assignment.size == 0:
            raise ValueError("assignment must be a non-empty 1-D index array")
        if self.n_states < 1:
            raise ValueError(f"n_states must be positive, got {self.n_states}")
        present = np.unique(self.assignment)
        if not np.array_equal(present, np.arange(self.n_states)):
            raise ValueError(
                f"state indices must be 0..{self.n_states - 1} with no empty state, "
                f"got {present.tolist()}"
            )
        if not -1.0 <= self.modularity_q <= 1.0:
            raise ValueError(f"modularity must lie in [-1, 1], got {self.modularity_q}")
        if self.state_graphs is not None and len(self.state_graphs) != self.n_states:
            raise ValueError(
                f"{len(self.state_graphs)} state graphs for {self.n_states} states"
            )


def window_similarity(dyn: DynamicGraphSeries, sign: str = "positive") -> WindowSimilarityMatrix:
    """Correlate node-strength vectors between every pair of windows."""
    m = dyn.n_windows
    n = dyn.graphs[0].n_nodes
    if m < 2:
        raise ValueError(f"need at least 2 windows, got {m}")
    if n < 3:
        raise ValueError(f"need at least 3 nodes, got {n}")
    strengths = np.empty((m, n))
    for i, g in enumerate(dyn.graphs):
        strengths[i], _ = connectivity_strength(g.weights(sign))
    flat = np.flatnonzero(strengths.std(axis=1) == 0.0)
    if flat.size:
        raise ValueError(
            f"window(s) {flat.tolist()} have a constant strength vector; "
            "similarity is undefined"
        )
    s = np.corrcoef(strengths)
    s = np.clip((s + s.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(s, 1.0)
    return WindowSimilarityMatrix(s)


def _clipped_adjacency(s: np.ndarray) -> np.ndarray:
    adj = np.maximum(s, 0.0)
    np.fill_diagonal(adj, 0.0)
    if not adj.any():
        raise ValueError("similarity matrix has no positive off-diagonal entries")
    return adj


def modularity_score(sim: WindowSimilarityMatrix, assignment: np.ndarray) -> float:
    """Newman modularity of a window partition.

    Computed on the non-negative part of the similarity matrix with zero
    diagonal: Q = sum over communities of (within-weight / total) minus
    (community degree fraction) squared.
    """
    adj = _clipped_adjacency(sim.s)
    assignment = np.asarray(assignment, dtype=int)
    if assignment.shape != (adj.shape[0],):
        raise ValueError(
            f"assignment length {assignment.size} does not match {adj.shape[0]} windows"
        )
    return _modularity(adj, assignment, 1.0)


def _modularity(adj: np.ndarray, comm: np.ndarray, gamma: float) -> float:
    k = adj.sum(axis=1)
    total = k.sum()
    q = 0.0
    for c in np.unique(comm):
        idx = np.flatnonzero(comm == c)
        q += adj[np.ix_(idx, idx)].sum() / total - gamma * (k[idx].sum() / total) ** 2
    return float(q)


def detect_states(
    sim: WindowSimilarityMatrix, resolution: float = 1.0, rng_seed: int = 0
) -> StatePartition:
    """Partition windows into connectivity states by modularity maximization.

    Greedy multi-level optimization: nodes are visited in a seeded random
    order and moved into the neighboring community with the largest
    modularity gain (ties to the lowest community index, moves accepted
    only when the gain exceeds ``MIN_GAIN``), then communities are
    aggregated and the process repeats until no move improves modularity.
    The same seed and input always yield the same partition. States are
    renumbered in order of first appearance along the window axis.
    """
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    adj = _clipped_adjacency(sim.s)
    rng = np.random.default_rng(rng_seed)
    membership = _louvain(adj, resolution, rng)
    membership = _relabel_by_first_seen(membership)
    q = _modularity(adj, membership, 1.0)
    # A partition worse than the trivial one is never returned.
    if q < 0.0:
        membership = np.zeros_like(membership)
        q = _modularity(adj, membership, 1.0)
    return StatePartition(membership, int(membership.max()) + 1, q)


def _relabel_by_first_seen(comm: np.ndarray) -> np.ndarray:
    mapping: dict[int, int] = {}
    out = np.empty_like(comm)
    for i, c in enumerate(comm):
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out


def _louvain(adj: np.ndarray, gamma: float, rng: np.random.Generator) -> np.ndarray:
    """Multi-level greedy modularity maximization on a dense weight matrix."""
    membership = np.arange(adj.shape[0])
    graph = adj.copy()
    while True:
        comm = _local_moves(graph, gamma, rng)
        labels, comm = np.unique(comm, return_inverse=True)
        membership = comm[membership]
        if labels.size == graph.shape[0]:
            return membership
        onehot = np.zeros((graph.shape[0], labels.size))
        onehot[np.arange(graph.shape[0]), comm] = 1.0
        # Aggregated self-loops hold twice the internal weight of a community.
        graph = onehot.T @ graph @ onehot


def _local_moves(graph: np.ndarray, gamma: float, rng: np.random.Generator) -> np.ndarray:
    n = graph.shape[0]
    degree = graph.sum(axis=1)
    total = degree.sum()
    comm = np.arange(n)
    comm_degree = degree.copy()
    comm_size = np.ones(n, dtype=int)
    indices = np.arange(n)
    improved = True
    while improved:
        improved = False
        for i in rng.permutation(n):
            ci = comm[i]
            links = np.bincount(comm, weights=graph[i], minlength=n)
            links[ci] -= graph[i, i]
            comm_degree[ci] -= degree[i]
            comm_size[ci] -= 1
            gain = (2.0 / total) * (links - gamma * comm_degree * degree[i] / total)
            candidates = np.flatnonzero((links > 0.0) | (indices == ci))
            best_pos = int(np.argmax(gain[candidates]))
            best, best_gain = candidates[best_pos], gain[candidates[best_pos]]
            if best_gain < 0.0:
                # Leaving for an empty community beats every attached one.
                empty = np.flatnonzero(comm_size == 0)
                if empty.size:
                    best, best_gain = int(empty[0]), 0.0
            stay_gain = gain[ci] if comm_size[ci] > 0 else 0.0
            if best != ci and best_gain - stay_gain > MIN_GAIN:
                improved = True
            else:
                best = ci
            comm[i] = best
            comm_degree[best] += degree[i]
            comm_size[best] += 1
    return comm


def state_average_graphs(
    dyn: DynamicGraphSeries, assignment: np.ndarray
) -> list[SignedWeightedGraph]:
    """Elementwise mean of member-window graphs, one graph per state.

    Averaging mixes windows where a pair was positive with windows where it
    was negative, so the returned graphs carry ``exclusive=False``.
    """
    assignment = np.asarray(assignment, dtype=int)
    if assignment.shape != (dyn.n_windows,):
        raise ValueError(
            f"assignment covers {assignment.size} windows, series has {dyn.n_windows}"
        )
    graphs = []
    for state in range(int(assignment.max()) + 1):
        members = np.flatnonzero(assignment == state)
        if members.size == 0:
            raise ValueError(f"state {state} has no member windows")
        w_plus = np.mean([dyn.graphs[k].w_plus for k in members], axis=0)
        w_minus = np.mean([dyn.graphs[k].w_minus for k in members], axis=0)
        graphs.append(
            SignedWeightedGraph(w_plus, w_minus, dyn.labels, exclusive=False)
        )
    return graphs
