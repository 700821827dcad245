"""Directed weighted interaction networks.

Edge convention: ``weights[i, j] > 0`` means agent ``j`` transmits to agent
``i`` (directed edge ``j -> i``). All other modules inherit this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import (
    NegativeWeightError,
    NonFiniteError,
    NonSquareError,
    NonzeroDiagonalError,
)


@dataclass(frozen=True)
class Digraph:
    """Immutable weighted digraph over ``n`` agents.

    Construct through :func:`build_digraph`, which validates the invariants
    (square, finite, non-negative, zero diagonal).
    """

    weights: NDArray[np.float64]

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def neighbors(self, i: int) -> NDArray[np.intp]:
        """In-neighbors of agent ``i``: senders ``j`` with ``a_ij > 0``."""
        return np.flatnonzero(self.weights[i] > 0)

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(j, i)`` pairs, ``j`` sender, ``i`` receiver."""
        receivers, senders = np.nonzero(self.weights)
        return [(int(j), int(i)) for i, j in zip(receivers, senders)]

    def laplacian(self) -> NDArray[np.float64]:
        alpha, _ = row_stats(self)
        return np.diag(alpha) - self.weights


def build_digraph(weights) -> Digraph:
    """Validate a weight matrix and wrap it in a :class:`Digraph`.

    Raises on a non-square matrix, negative or non-finite entries, or a
    nonzero diagonal (self-loops are an error, not silently repaired).
    """
    w = np.array(weights, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise NonSquareError(f"weight matrix must be square, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise NonFiniteError("weight matrix has non-finite entries")
    if np.any(w < 0):
        raise NegativeWeightError("weight matrix has negative entries")
    if np.any(np.diag(w) != 0):
        raise NonzeroDiagonalError("weight matrix has nonzero diagonal entries")
    w.setflags(write=False)
    return Digraph(w)


def row_stats(g: Digraph) -> tuple[NDArray[np.float64], float]:
    """Row sums ``alpha_i`` and their maximum."""
    alpha = g.weights.sum(axis=1)
    a_bar = float(alpha.max()) if g.n else 0.0
    return alpha, a_bar


def is_strongly_connected(g: Digraph) -> bool:
    """Exact strong-connectivity test via Tarjan-style double DFS.

    Every vertex must reach every other along directed edges; with the
    ``j -> i`` convention, reachability follows columns-to-rows.
    """
    n = g.n
    if n <= 1:
        return True
    adj = g.weights > 0  # adj[i, j]: edge j -> i

    def reaches_all(out_edges) -> bool:
        # out_edges[v] yields successors of v
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for w in np.flatnonzero(out_edges[v]):
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        return bool(seen.all())

    # forward: successors of j are rows i with adj[i, j]; that is adj.T[j]
    return reaches_all(adj.T) and reaches_all(adj)
