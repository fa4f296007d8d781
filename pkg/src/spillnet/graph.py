"""Undirected interference networks: construction, random generation, summaries.

Networks are simple (no self-links, no parallel edges) and symmetric. All
types are immutable after construction and safe to share across threads;
randomness lives entirely in the generator functions, which are pure
functions of their arguments.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import IngestionError, ParameterError

# Calibrated Watts-Strogatz-with-deletion parameters. At n = 1000 these give
# roughly 10% isolated nodes, mean degree 2 and a maximum degree around 7;
# the heavy deletion stage is what produces the isolated nodes.
WS_CALIBRATED = {"k": 8, "beta": 0.25, "delete_prob": 0.75}


@dataclass(frozen=True)
class Network:
    """Immutable undirected simple graph on nodes 0..n-1.

    ``adjacency[i]`` is the sorted tuple of i's neighbors. Symmetry
    (j in adjacency[i] iff i in adjacency[j]) and absence of self-links are
    guaranteed by every constructor in this module.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @cached_property
    def degree(self) -> np.ndarray:
        """Per-node neighbor counts as an int array."""
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints (u, v) with u < v, sorted lexicographically."""
        u = [i for i in range(self.n) for j in self.adjacency[i] if i < j]
        v = [j for i in range(self.n) for j in self.adjacency[i] if i < j]
        return np.array(u, dtype=np.int64), np.array(v, dtype=np.int64)

    def check_invariants(self) -> None:
        """Assert symmetry, no self-links, sortedness and no duplicates."""
        if len(self.adjacency) != self.n:
            raise AssertionError("adjacency length differs from n")
        neighbor_sets = [set(a) for a in self.adjacency]
        for i, nbrs in enumerate(self.adjacency):
            if i in neighbor_sets[i]:
                raise AssertionError(f"self-link at node {i}")
            if len(nbrs) != len(neighbor_sets[i]):
                raise AssertionError(f"duplicate neighbor at node {i}")
            if list(nbrs) != sorted(nbrs):
                raise AssertionError(f"unsorted adjacency at node {i}")
            for j in nbrs:
                if i not in neighbor_sets[j]:
                    raise AssertionError(f"asymmetric edge {i}-{j}")


@dataclass(frozen=True)
class DegreeSummary:
    """Empirical degree-distribution moments of a network.

    ``mean_degree_positive`` and ``mean_inverse_degree_positive`` are None
    when no node has a neighbor (the conditional moments are undefined).
    """

    n: int
    histogram: Mapping[int, int]
    mean_degree: float
    max_degree: int
    isolated_fraction: float
    mean_degree_positive: float | None
    mean_inverse_degree_positive: float | None

    @property
    def positive_share(self) -> float:
        """Fraction of nodes with at least one neighbor."""
        return 1.0 - self.isolated_fraction

    def expect(self, fn: Callable[[int], float], positive_only: bool = False) -> float:
        """Average fn(degree) over the empirical degree distribution.

        With ``positive_only`` the average conditions on degree > 0; raises
        ParameterError when that stratum is empty.
        """
        items = [(g, c) for g, c in self.histogram.items() if not positive_only or g > 0]
        total = sum(c for _, c in items)
        if total == 0:
            raise ParameterError("empty degree stratum in expectation")
        return sum(c * fn(g) for g, c in items) / total

    @staticmethod
    def from_degrees(degrees: Sequence[int] | np.ndarray) -> "DegreeSummary":
        degrees = np.asarray(degrees, dtype=np.int64)
        if degrees.size == 0:
            raise ParameterError("cannot summarize an empty degree sequence")
        if (degrees < 0).any():
            raise ParameterError("degrees must be nonnegative")
        values, counts = np.unique(degrees, return_counts=True)
        return DegreeSummary.from_histogram(dict(zip(values.tolist(), counts.tolist())))

    @staticmethod
    def from_histogram(histogram: Mapping[int, int]) -> "DegreeSummary":
        if not histogram or any(c <= 0 for c in histogram.values()):
            raise ParameterError("histogram must have positive counts")
        if any(g < 0 for g in histogram):
            raise ParameterError("degrees must be nonnegative")
        n = sum(histogram.values())
        n_isolated = histogram.get(0, 0)
        n_positive = n - n_isolated
        mean = sum(g * c for g, c in histogram.items()) / n
        if n_positive > 0:
            mean_pos = sum(g * c for g, c in histogram.items() if g > 0) / n_positive
            mean_inv_pos = sum(c / g for g, c in histogram.items() if g > 0) / n_positive
        else:
            mean_pos = None
            mean_inv_pos = None
        return DegreeSummary(
            n=n,
            histogram=dict(sorted(histogram.items())),
            mean_degree=mean,
            max_degree=max(histogram),
            isolated_fraction=n_isolated / n,
            mean_degree_positive=mean_pos,
            mean_inverse_degree_positive=mean_inv_pos,
        )


def summarize(net: Network) -> DegreeSummary:
    """Exact empirical degree moments of a network."""
    return DegreeSummary.from_degrees(net.degree)


def _network_from_sets(n: int, adj: list[set[int]]) -> Network:
    return Network(n=n, adjacency=tuple(tuple(sorted(s)) for s in adj))


def generate_watts_strogatz(
    n: int, k: int, beta: float, delete_prob: float, seed: int
) -> Network:
    """Ring-lattice small-world graph with an extra edge-deletion stage.

    Starts from a ring lattice with k/2 neighbors on each side, rewires each
    edge independently with probability ``beta`` (the far endpoint is redrawn
    uniformly, rejecting self-links and duplicates), then deletes each
    surviving edge independently with probability ``delete_prob``. Plain
    rewiring never strands a node, so the deletion stage is what creates
    isolated nodes. Deterministic given ``seed`` (Mersenne Twister).
    """
    if n < 3:
        raise ParameterError("watts-strogatz requires n >= 3")
    if k % 2 != 0 or k < 0:
        raise ParameterError("k must be a nonnegative even integer")
    if k >= n:
        raise ParameterError("k must be smaller than n")
    if not 0.0 <= beta <= 1.0:
        raise ParameterError("beta must lie in [0, 1]")
    if not 0.0 <= delete_prob <= 1.0:
        raise ParameterError("delete_prob must lie in [0, 1]")

    rng = random.Random(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    edges: list[tuple[int, int]] = []
    for i in range(n):
        for j in range(1, k // 2 + 1):
            a, b = i, (i + j) % n
            adj[a].add(b)
            adj[b].add(a)
            edges.append((a, b))

    for idx, (a, b) in enumerate(edges):
        if rng.random() < beta:
            if len(adj[a]) >= n - 1:
                continue  # no legal target left; keep the edge in place
            while True:
                c = rng.randrange(n)
                if c != a and c not in adj[a]:
                    break
            adj[a].discard(b)
            adj[b].discard(a)
            adj[a].add(c)
            adj[c].add(a)
            edges[idx] = (a, c)

    surviving = sorted({(min(a, b), max(a, b)) for a, b in edges if b in adj[a]})
    for a, b in surviving:
        if rng.random() < delete_prob:
            adj[a].discard(b)
            adj[b].discard(a)

    return _network_from_sets(n, adj)


def generate_erdos_renyi(n: int, mean_degree: float, seed: int) -> Network:
    """G(n, p) graph with p chosen to target the requested mean degree.

    Each unordered pair is linked independently with probability
    mean_degree / (n - 1). Deterministic given ``seed`` (PCG64).
    """
    if n < 2:
        raise ParameterError("erdos-renyi requires n >= 2")
    if not 0.0 < mean_degree <= n - 1:
        raise ParameterError("mean_degree must lie in (0, n-1]")

    p_edge = mean_degree / (n - 1)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    linked = rng.random(iu.size) < p_edge
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in zip(iu[linked].tolist(), ju[linked].tolist()):
        adj[a].add(b)
        adj[b].add(a)
    return _network_from_sets(n, adj)


def from_edge_list(rows: Iterable[tuple[int, int]], n: int) -> Network:
    """Build a network from undirected edge rows.

    Duplicate rows and opposite orientations collapse to a single edge.
    Self-loops and out-of-range indices are rejected.
    """
    if n < 0:
        raise ParameterError("n must be nonnegative")
    adj: list[set[int]] = [set() for _ in range(n)]
    for row_idx, (i, j) in enumerate(rows):
        if not (0 <= i < n and 0 <= j < n):
            raise IngestionError(f"edge row {row_idx}: index ({i}, {j}) out of range for n={n}")
        if i == j:
            raise IngestionError(f"edge row {row_idx}: self-link ({i}, {j}) not allowed")
        adj[i].add(j)
        adj[j].add(i)
    return _network_from_sets(n, adj)


def to_edge_list(net: Network) -> list[tuple[int, int]]:
    """All edges as (i, j) pairs with i < j, sorted."""
    return [(i, j) for i in range(net.n) for j in net.adjacency[i] if i < j]


def read_edge_csv(path: str | Path) -> list[tuple[int, int]]:
    """Read an edge-list CSV with header ``src,dst`` and 0-based node indices."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["src", "dst"]:
            raise IngestionError(f"{path}: expected header 'src,dst'")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise IngestionError(f"{path}:{line_no}: expected two columns")
            try:
                rows.append((int(row[0]), int(row[1])))
            except ValueError as exc:
                raise IngestionError(f"{path}:{line_no}: non-integer node index") from exc
    return rows


def write_edge_csv(net: Network, path: str | Path) -> None:
    """Write the edge list as a ``src,dst`` CSV (one row per undirected edge)."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst"])
        writer.writerows(to_edge_list(net))
