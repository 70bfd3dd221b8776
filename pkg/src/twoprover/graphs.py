"""Bipartite multigraphs with degree metadata.

Edges form a multiset: the same ``(left, right)`` pair may appear several
times, and several operations downstream (concatenation, edge duplication,
gadget overlays) rely on that.  The edge list is kept sorted so equal
multisets compare and hash equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import NotBiregular, NotLeftRegular


@dataclass(frozen=True)
class BipartiteGraph:
    """A bipartite multigraph on ``n_left + n_right`` vertices.

    Vertices are 0-based indices on each side.  ``edges`` is the edge
    multiset as a sorted tuple of ``(left, right)`` pairs; multiplicity is
    repetition.
    """

    n_left: int
    n_right: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n_left <= 0 or self.n_right <= 0:
            raise ValueError("both sides need at least one vertex")
        canonical = tuple(sorted((int(x), int(y)) for x, y in self.edges))
        object.__setattr__(self, "edges", canonical)
        for x, y in canonical:
            if not (0 <= x < self.n_left and 0 <= y < self.n_right):
                raise ValueError(f"edge ({x},{y}) out of range")

    @cached_property
    def left_degrees(self) -> tuple[int, ...]:
        degs = [0] * self.n_left
        for x, _ in self.edges:
            degs[x] += 1
        return tuple(degs)

    @cached_property
    def right_degrees(self) -> tuple[int, ...]:
        degs = [0] * self.n_right
        for _, y in self.edges:
            degs[y] += 1
        return tuple(degs)

    @property
    def is_left_regular(self) -> bool:
        degs = self.left_degrees
        return len(set(degs)) == 1 and degs[0] > 0

    @property
    def is_biregular(self) -> bool:
        return self.is_left_regular and len(set(self.right_degrees)) == 1

    @property
    def left_degree(self) -> int:
        """Common left degree; raises if the left side is irregular."""
        degs = set(self.left_degrees)
        if len(degs) != 1:
            raise NotLeftRegular("left degrees are not all equal")
        return degs.pop()

    def require_biregular(self) -> tuple[int, int]:
        """Return (left degree, right degree), raising if not bi-regular."""
        if not self.is_biregular:
            raise NotBiregular(
                f"graph is not bi-regular (left degrees {sorted(set(self.left_degrees))}, "
                f"right degrees {sorted(set(self.right_degrees))})"
            )
        return self.left_degrees[0], self.right_degrees[0]

    def multiplicity(self) -> Mapping[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for e in self.edges:
            counts[e] = counts.get(e, 0) + 1
        return counts

    def neighbors(self, x: int) -> tuple[int, ...]:
        """Sorted right neighbors of left vertex ``x``, with multiplicity."""
        return tuple(y for (u, y) in self.edges if u == x)

    def left_neighbors(self, y: int) -> tuple[int, ...]:
        """Sorted left neighbors of right vertex ``y``, with multiplicity."""
        return tuple(x for (x, v) in self.edges if v == y)

    def edge_count(self) -> int:
        return len(self.edges)

    def to_json_dict(self) -> dict:
        return {
            "n_left": self.n_left,
            "n_right": self.n_right,
            "edges": [[x, y] for x, y in self.edges],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "BipartiteGraph":
        return cls(
            n_left=int(doc["n_left"]),
            n_right=int(doc["n_right"]),
            edges=tuple((int(x), int(y)) for x, y in doc["edges"]),
        )


def matching_graph(n: int) -> BipartiteGraph:
    """The perfect matching ``i -- i`` on ``n + n`` vertices."""
    return BipartiteGraph(n, n, tuple((i, i) for i in range(n)))


def complete_bipartite(n_left: int, n_right: int) -> BipartiteGraph:
    return BipartiteGraph(
        n_left, n_right, tuple((x, y) for x in range(n_left) for y in range(n_right))
    )


def cycle_graph(half: int) -> BipartiteGraph:
    """The bipartite cycle on ``2*half`` vertices (each side 2-regular)."""
    edges = []
    for i in range(half):
        edges.append((i, i))
        edges.append((i, (i + 1) % half))
    return BipartiteGraph(half, half, tuple(edges))


def graph_from_pairs(
    n_left: int, n_right: int, pairs: Iterable[tuple[int, int]]
) -> BipartiteGraph:
    return BipartiteGraph(n_left, n_right, tuple(pairs))
