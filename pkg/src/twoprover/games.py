"""Two-prover games: representation and exact exhaustive solving.

A game is a bipartite constraint graph: the verifier draws an edge uniformly
from the edge multiset and accepts iff the two provers' labels for its
endpoints lie in that edge's relation.  Relations are stored as dense
bitmasks over ``sigma_x * sigma_y`` label pairs, one mask per edge instance
(parallel multi-edges carry independent relations).

Values are exact: satisfied and total edge multiplicities are integers, so
every value is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal, Mapping, Sequence

from .errors import (
    BudgetExceeded,
    EmptySet,
    EmptySubgame,
    NotProjection,
    ZeroDenominator,
)
from .graphs import BipartiteGraph

GroundSet = Literal["left-vertices", "right-vertices", "edges"]

DEFAULT_ENUM_BUDGET = 10**8
_ENUM_BUDGET_ENV = "TWOPROVER_ENUM_BUDGET"


def enum_budget(override: int | None = None) -> int:
    """Labeling-enumeration budget (number of labelings of the enumerated side)."""
    if override is not None:
        return override
    return int(os.environ.get(_ENUM_BUDGET_ENV, DEFAULT_ENUM_BUDGET))


def relation_mask(pairs: Iterable[tuple[int, int]], sigma_x: int, sigma_y: int) -> int:
    """Pack accepted ``(left label, right label)`` pairs into a bitmask."""
    mask = 0
    for a, b in pairs:
        if not (0 <= a < sigma_x and 0 <= b < sigma_y):
            raise ValueError(f"label pair ({a},{b}) out of range")
        mask |= 1 << (a * sigma_y + b)
    return mask


def relation_pairs(mask: int, sigma_x: int, sigma_y: int) -> list[tuple[int, int]]:
    return [
        (a, b)
        for a in range(sigma_x)
        for b in range(sigma_y)
        if mask >> (a * sigma_y + b) & 1
    ]


def full_relation(sigma_x: int, sigma_y: int) -> int:
    return (1 << (sigma_x * sigma_y)) - 1


@dataclass(frozen=True)
class Labeling:
    """One deterministic strategy pair: a label per vertex on each side."""

    left_labels: tuple[int, ...]
    right_labels: tuple[int, ...]


@dataclass(frozen=True)
class Distribution:
    """A probability vector over a named ground set.

    Weights may be floats or :class:`~fractions.Fraction`; they must be
    nonnegative and sum to 1 within ``1e-9``.
    """

    ground_set: GroundSet
    weights: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(self.weights))
        if any(w < 0 for w in self.weights):
            raise ValueError("distribution weights must be nonnegative")
        if abs(float(sum(self.weights)) - 1.0) > 1e-9:
            raise ValueError("distribution weights must sum to 1")

    def __len__(self) -> int:
        return len(self.weights)

    @staticmethod
    def uniform(ground_set: GroundSet, size: int, exact: bool = True) -> "Distribution":
        w = Fraction(1, size) if exact else 1.0 / size
        return Distribution(ground_set, (w,) * size)

    @staticmethod
    def point_mass(ground_set: GroundSet, size: int, index: int) -> "Distribution":
        w = [Fraction(0)] * size
        w[index] = Fraction(1)
        return Distribution(ground_set, tuple(w))


@dataclass(frozen=True)
class Game:
    """A two-prover game: graph, alphabet sizes, and per-edge relations.

    ``relations[i]`` is the bitmask for ``graph.edges[i]``; use
    :meth:`Game.build` to construct from unsorted edge/relation pairs.
    """

    graph: BipartiteGraph
    sigma_x: int
    sigma_y: int
    relations: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.sigma_x <= 0 or self.sigma_y <= 0:
            raise ValueError("alphabets must be nonempty")
        if len(self.relations) != len(self.graph.edges):
            raise ValueError("one relation per edge instance required")
        limit = 1 << (self.sigma_x * self.sigma_y)
        for mask in self.relations:
            if not (0 <= mask < limit):
                raise ValueError("relation mask out of range for the alphabets")

    @classmethod
    def build(
        cls,
        n_left: int,
        n_right: int,
        sigma_x: int,
        sigma_y: int,
        edge_relations: Iterable[tuple[tuple[int, int], int]],
    ) -> "Game":
        """Build a game from ``((x, y), relation_mask)`` pairs in any order."""
        pairs = sorted(edge_relations, key=lambda er: er[0])
        graph = BipartiteGraph(n_left, n_right, tuple(e for e, _ in pairs))
        return cls(graph, sigma_x, sigma_y, tuple(m for _, m in pairs))

    @cached_property
    def is_projection(self) -> bool:
        """True iff every relation is the graph of a function left -> right."""
        one_hot = {1 << b for b in range(self.sigma_y)}
        col = (1 << self.sigma_y) - 1
        for mask in self.relations:
            for a in range(self.sigma_x):
                if (mask >> (a * self.sigma_y)) & col not in one_hot:
                    return False
        return True

    def projection_maps(self) -> tuple[tuple[int, ...], ...]:
        """Per-edge label maps; raises :class:`NotProjection` if not functional."""
        if not self.is_projection:
            raise NotProjection("game relations are not all functional")
        col = (1 << self.sigma_y) - 1
        maps = []
        for mask in self.relations:
            maps.append(
                tuple(
                    ((mask >> (a * self.sigma_y)) & col).bit_length() - 1
                    for a in range(self.sigma_x)
                )
            )
        return tuple(maps)

    def accepts(self, edge_index: int, a: int, b: int) -> bool:
        return bool(self.relations[edge_index] >> (a * self.sigma_y + b) & 1)

    def to_json_dict(self) -> dict:
        doc = {
            "n_left": self.graph.n_left,
            "n_right": self.graph.n_right,
            "sigma_x": self.sigma_x,
            "sigma_y": self.sigma_y,
            "edges": [[x, y] for x, y in self.graph.edges],
            "relations": [
                [[a, b] for a, b in relation_pairs(m, self.sigma_x, self.sigma_y)]
                for m in self.relations
            ],
        }
        if self.is_projection:
            doc["projection"] = [list(m) for m in self.projection_maps()]
        return doc

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "Game":
        sigma_x = int(doc["sigma_x"])
        sigma_y = int(doc["sigma_y"])
        edges = [(int(x), int(y)) for x, y in doc["edges"]]
        masks = [
            relation_mask(((int(a), int(b)) for a, b in rel), sigma_x, sigma_y)
            for rel in doc["relations"]
        ]
        if "projection" in doc:
            stated = [tuple(int(b) for b in m) for m in doc["projection"]]
            derived = [
                relation_mask(((a, m[a]) for a in range(sigma_x)), sigma_x, sigma_y)
                for m in stated
            ]
            if derived != masks:
                raise ValueError("stated projection maps disagree with relations")
        return cls.build(
            int(doc["n_left"]), int(doc["n_right"]), sigma_x, sigma_y,
            zip(edges, masks),
        )


@dataclass(frozen=True)
class SolveResult:
    value: Fraction
    witness: Labeling
    satisfied: int
    total: int


def _active_vertices(edges: Sequence[tuple[int, int]]) -> tuple[list[int], list[int]]:
    lefts = sorted({x for x, _ in edges})
    rights = sorted({y for _, y in edges})
    return lefts, rights


def _solve_on_edges(
    game: Game,
    edge_indices: Sequence[int],
    enumerate_side: Literal["auto", "left", "right"],
    budget: int | None,
) -> SolveResult:
    """Exact optimum over labelings restricted to the given edge instances.

    One side is enumerated exhaustively (row-major, first vertex outermost);
    the other side is optimized per-vertex, which is exact because the
    objective is a sum of per-edge terms each touching one vertex per side.
    Ties break toward the first labeling found and the lowest label.
    """
    edges = [game.graph.edges[i] for i in edge_indices]
    masks = [game.relations[i] for i in edge_indices]
    total = len(edges)
    lefts, rights = _active_vertices(edges)

    cost_left = game.sigma_x ** len(lefts)
    cost_right = game.sigma_y ** len(rights)
    if enumerate_side == "auto":
        side = "left" if cost_left <= cost_right else "right"
    else:
        side = enumerate_side
    limit = enum_budget(budget)
    cost = cost_left if side == "left" else cost_right
    if cost > limit:
        raise BudgetExceeded(
            f"{cost} labelings of the {side} side exceed the budget {limit}"
        )

    if side == "left":
        enum_vertices, other_vertices = lefts, rights
        enum_sigma, other_sigma = game.sigma_x, game.sigma_y
        # incidence[other vertex] = [(enum-side local index, mask)]
        pos = {x: i for i, x in enumerate(lefts)}
        incidence: dict[int, list[tuple[int, int]]] = {y: [] for y in rights}
        for (x, y), mask in zip(edges, masks):
            incidence[y].append((pos[x], mask))
        stride = other_sigma  # mask bit for (a, b) is a*sigma_y + b

        def bit(mask: int, enum_label: int, other_label: int) -> int:
            return mask >> (enum_label * stride + other_label) & 1

    else:
        enum_vertices, other_vertices = rights, lefts
        enum_sigma, other_sigma = game.sigma_y, game.sigma_x
        pos = {y: i for i, y in enumerate(rights)}
        incidence = {x: [] for x in lefts}
        for (x, y), mask in zip(edges, masks):
            incidence[x].append((pos[y], mask))
        stride = game.sigma_y

        def bit(mask: int, enum_label: int, other_label: int) -> int:
            return mask >> (other_label * stride + enum_label) & 1

    best_sat = -1
    best_enum: tuple[int, ...] | None = None
    best_other: dict[int, int] = {}
    other_range = range(other_sigma)
    for assignment in itertools.product(range(enum_sigma), repeat=len(enum_vertices)):
        sat = 0
        choice: dict[int, int] = {}
        for v in other_vertices:
            rows = incidence[v]
            best_b, best_score = 0, -1
            for b in other_range:
                score = 0
                for idx, mask in rows:
                    score += bit(mask, assignment[idx], b)
                if score > best_score:
                    best_b, best_score = b, score
            sat += best_score
            choice[v] = best_b
        if sat > best_sat:
            best_sat = sat
            best_enum = assignment
            best_other = choice

    left_labels = [0] * game.graph.n_left
    right_labels = [0] * game.graph.n_right
    if side == "left":
        for v, lab in zip(enum_vertices, best_enum or ()):
            left_labels[v] = lab
        for v, lab in best_other.items():
            right_labels[v] = lab
    else:
        for v, lab in zip(enum_vertices, best_enum or ()):
            right_labels[v] = lab
        for v, lab in best_other.items():
            left_labels[v] = lab
    witness = Labeling(tuple(left_labels), tuple(right_labels))
    return SolveResult(Fraction(best_sat, total), witness, best_sat, total)


def solve_game(
    game: Game,
    enumerate_side: Literal["auto", "left", "right"] = "auto",
    budget: int | None = None,
) -> SolveResult:
    """Exact value of the game with a deterministic witness labeling."""
    return _solve_on_edges(game, range(len(game.graph.edges)), enumerate_side, budget)


def game_value(
    game: Game,
    enumerate_side: Literal["auto", "left", "right"] = "auto",
    budget: int | None = None,
) -> Fraction:
    """Maximum acceptance probability over all labelings, as an exact fraction."""
    return solve_game(game, enumerate_side, budget).value


def subgame_value(
    game: Game,
    left_set: Sequence[int],
    right_set: Sequence[int],
    enumerate_side: Literal["auto", "left", "right"] = "auto",
    budget: int | None = None,
) -> Fraction:
    """Value of the game conditioned on the sampled edge landing in S x T."""
    if not left_set or not right_set:
        raise EmptySet("rectangle sides must be nonempty")
    sset, tset = set(left_set), set(right_set)
    surviving = [
        i
        for i, (x, y) in enumerate(game.graph.edges)
        if x in sset and y in tset
    ]
    if not surviving:
        raise EmptySubgame("no edge of the game lies in the rectangle")
    return _solve_on_edges(game, surviving, enumerate_side, budget).value


def edge_distribution(game: Game, mu_left: Distribution, mu_right: Distribution) -> Distribution:
    """Distribution on edge instances induced by independent endpoint weights.

    Instance ``(x, y)`` receives weight proportional to
    ``mu_left[x] * mu_right[y]``; parallel instances of the same pair thus
    split the pair's weight equally.
    """
    if mu_left.ground_set != "left-vertices" or mu_right.ground_set != "right-vertices":
        raise ValueError("expected left-vertex and right-vertex distributions")
    if len(mu_left) != game.graph.n_left or len(mu_right) != game.graph.n_right:
        raise ValueError("distribution lengths do not match the graph")
    raw = [mu_left.weights[x] * mu_right.weights[y] for x, y in game.graph.edges]
    denom = sum(raw)
    if denom == 0:
        raise ZeroDenominator("distribution supports touch no edge of the game")
    return Distribution("edges", tuple(w / denom for w in raw))


def symmetrize(game: Game) -> Game:
    """Fold a projection game onto its left side through shared right vertices.

    For every right vertex ``y`` and every *ordered* pair of edge instances
    ``(x, y), (x', y)`` (including a pair of the same instance), the output
    gains an edge ``(x, x')`` whose relation accepts ``(a, a')`` iff both
    instances project those labels to the same right label.  The output is
    generally not a projection game; relations are stored explicitly.
    """
    maps = game.projection_maps()
    by_right: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
    for (x, y), pmap in zip(game.graph.edges, maps):
        by_right.setdefault(y, []).append((x, pmap))
    n = game.graph.n_left
    sigma = game.sigma_x
    edge_relations = []
    for y in sorted(by_right):
        incident = by_right[y]
        for x1, map1 in incident:
            for x2, map2 in incident:
                mask = 0
                for a1 in range(sigma):
                    for a2 in range(sigma):
                        if map1[a1] == map2[a2]:
                            mask |= 1 << (a1 * sigma + a2)
                edge_relations.append(((x1, x2), mask))
    return Game.build(n, n, sigma, sigma, edge_relations)
