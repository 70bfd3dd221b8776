"""Concatenation of games with gadget graphs, and robustness audits.

Concatenation replaces each side of a game by the left side of a gadget
graph: a gadget vertex answers with a tuple of labels, one per neighbor in
sorted order, and the verifier decodes the two coordinates that matter for
the base edge it actually checks.  With bi-regular gadgets the value is
preserved exactly; the point of the audits is what happens on dense
rectangles, where the decoded edge distribution can drift from uniform.

Two audits are provided.  ``audit_exact`` computes the true sub-game value
of every dense rectangle by exhaustive enumeration (vectorized over the
enumerated side's labelings).  ``audit_distance`` instead measures how far
each rectangle's decoded edge distribution is from uniform, which upper
bounds the value inflation: a sub-game's value is at most the full value
plus that l1 distance.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import seeds
from .errors import BudgetExceeded, DimensionMismatch, EmptySet, NotBiregular
from .fortifiers import CheckMode, EXHAUSTIVE, _scaled_rows
from .games import Distribution, Game, edge_distribution, solve_game
from .graphs import BipartiteGraph

_RELATION_BITS_LIMIT = 1 << 16
_DERIVED_EDGE_LIMIT = 500_000
_AUDIT_BUDGET_ENV = "TWOPROVER_AUDIT_BUDGET"
DEFAULT_AUDIT_BUDGET = 10**8


def audit_budget(override: int | None = None) -> int:
    if override is not None:
        return override
    return int(os.environ.get(_AUDIT_BUDGET_ENV, DEFAULT_AUDIT_BUDGET))


@dataclass(frozen=True)
class ConcatenatedGame:
    """A base game wrapped in two gadget graphs, with its derived game.

    ``h1`` covers the left side (gadget left side ``W``, right side glued to
    the base left side) and ``h2`` the right side.  ``derived`` is a real
    game on ``(W, Z)`` whose alphabets are base labels to the power of the
    gadget left degrees; super-labels use base-``sigma`` digits, least
    significant digit = position 0 in the sorted neighbor list.
    """

    base: Game
    h1: BipartiteGraph
    h2: BipartiteGraph
    derived: Game

    @property
    def left_degree(self) -> int:
        return self.h1.left_degree

    @property
    def right_degree(self) -> int:
        return self.h2.left_degree


def _sorted_neighbor_slots(graph: BipartiteGraph) -> list[tuple[int, ...]]:
    nbrs: list[list[int]] = [[] for _ in range(graph.n_left)]
    for w, x in graph.edges:
        nbrs[w].append(x)
    return [tuple(sorted(row)) for row in nbrs]


def _digit_groups(degree: int, sigma: int) -> list[list[list[int]]]:
    """``groups[slot][digit]`` = all super-labels whose slot-th digit is digit."""
    size = sigma**degree
    groups: list[list[list[int]]] = [
        [[] for _ in range(sigma)] for _ in range(degree)
    ]
    for label in range(size):
        rest = label
        for slot in range(degree):
            groups[slot][rest % sigma].append(label)
            rest //= sigma
    return groups


def concatenate(
    h1: BipartiteGraph, base: Game, h2: BipartiteGraph
) -> ConcatenatedGame:
    """Build the concatenated game; gadgets must be left-regular and glue onto the base."""
    if h1.n_right != base.graph.n_left:
        raise DimensionMismatch(
            f"left gadget output side {h1.n_right} != base left side {base.graph.n_left}"
        )
    if h2.n_right != base.graph.n_right:
        raise DimensionMismatch(
            f"right gadget output side {h2.n_right} != base right side {base.graph.n_right}"
        )
    d1 = h1.left_degree
    d2 = h2.left_degree
    sigma_w = base.sigma_x**d1
    sigma_z = base.sigma_y**d2
    if sigma_w * sigma_z > _RELATION_BITS_LIMIT:
        raise BudgetExceeded(
            f"derived relations need {sigma_w * sigma_z} bits per edge; "
            f"limit is {_RELATION_BITS_LIMIT}"
        )

    slots1 = _sorted_neighbor_slots(h1)
    slots2 = _sorted_neighbor_slots(h2)
    # (w, slot) pairs per base-left vertex, and (z, slot) per base-right vertex
    at_left: list[list[tuple[int, int]]] = [[] for _ in range(base.graph.n_left)]
    for w, row in enumerate(slots1):
        for j, x in enumerate(row):
            at_left[x].append((w, j))
    at_right: list[list[tuple[int, int]]] = [[] for _ in range(base.graph.n_right)]
    for z, row in enumerate(slots2):
        for l, y in enumerate(row):
            at_right[y].append((z, l))

    count = sum(
        len(at_left[x]) * len(at_right[y]) for x, y in base.graph.edges
    )
    if count > _DERIVED_EDGE_LIMIT:
        raise BudgetExceeded(
            f"{count} derived edge instances exceed the limit {_DERIVED_EDGE_LIMIT}"
        )

    groups1 = _digit_groups(d1, base.sigma_x)
    groups2 = _digit_groups(d2, base.sigma_y)
    # digit_mask2[l][b]: bitmask over super-labels B whose slot-l digit is b
    digit_mask2 = [
        [sum(1 << b_label for b_label in groups2[l][b]) for b in range(base.sigma_y)]
        for l in range(d2)
    ]

    edge_relations: list[tuple[tuple[int, int], int]] = []
    for (x, y), base_mask in zip(base.graph.edges, base.relations):
        accepted = [
            (a, b)
            for a in range(base.sigma_x)
            for b in range(base.sigma_y)
            if base_mask >> (a * base.sigma_y + b) & 1
        ]
        for w, j in at_left[x]:
            for z, l in at_right[y]:
                mask = 0
                for a, b in accepted:
                    col = digit_mask2[l][b]
                    for a_label in groups1[j][a]:
                        mask |= col << (a_label * sigma_z)
                edge_relations.append(((w, z), mask))

    derived = Game.build(
        h1.n_left, h2.n_left, sigma_w, sigma_z, edge_relations
    )
    return ConcatenatedGame(base=base, h1=h1, h2=h2, derived=derived)


@dataclass(frozen=True)
class AuditReport:
    """Outcome of a rectangle audit.

    In ``exact-value`` mode the statistic is the worst sub-game value and
    the bound is ``base value + epsilon``.  In ``distance-certificate`` mode
    the statistic is the worst l1 distance of the decoded edge distribution
    from uniform and the bound is ``epsilon`` itself; since a rectangle's
    value is at most ``base value + distance``, a passing distance audit
    implies a passing value audit.
    """

    delta: float
    epsilon: float
    mode: str
    rectangles_checked: int
    worst_rectangle: tuple[tuple[int, ...], tuple[int, ...]]
    bound: float
    verdict: str
    base_value: float
    worst_value: float | None = None
    worst_l1_distance: float | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "mode": self.mode,
            "rectangles_checked": self.rectangles_checked,
            "worst_rectangle": [list(self.worst_rectangle[0]), list(self.worst_rectangle[1])],
            "bound": self.bound,
            "verdict": self.verdict,
            "base_value": self.base_value,
        }
        if self.worst_value is not None:
            doc["worst_value"] = self.worst_value
        if self.worst_l1_distance is not None:
            doc["worst_l1_distance"] = self.worst_l1_distance
            doc["implied_value_bound"] = self.base_value + self.worst_l1_distance
        return doc


def _side_subsets(
    n: int, delta: float, mode: CheckMode
) -> list[tuple[int, ...]]:
    if mode.kind == "exhaustive":
        return list(seeds.subsets_of_density(n, delta))
    assert mode.seed is not None and mode.trials is not None
    out: list[tuple[int, ...]] = []
    for k in range(seeds.min_subset_size(n, delta), n + 1):
        out.extend(seeds.subset_stream(mode.seed, n, k, mode.trials))
    return sorted(set(out), key=lambda s: (len(s), s))


def _acceptance_tables(game: Game) -> tuple[np.ndarray, np.ndarray]:
    """acc[w, a, z, b] = accepted multiplicity; tot[w, z] = total multiplicity."""
    n_w, n_z = game.graph.n_left, game.graph.n_right
    acc = np.zeros((n_w, game.sigma_x, n_z, game.sigma_y), dtype=np.int64)
    tot = np.zeros((n_w, n_z), dtype=np.int64)
    for (w, z), mask in zip(game.graph.edges, game.relations):
        tot[w, z] += 1
        for a in range(game.sigma_x):
            row = mask >> (a * game.sigma_y)
            for b in range(game.sigma_y):
                if row >> b & 1:
                    acc[w, a, z, b] += 1
    return acc, tot


def _best_counts_for_left_subset(
    acc: np.ndarray, subset: Sequence[int], sigma_w: int, n_z: int
) -> np.ndarray:
    """Per right-vertex greedy satisfaction counts for all labelings of ``subset``.

    Returns an array of shape ``(sigma_w**len(subset), n_z)`` whose row for a
    labeling holds, per right vertex, the best satisfied multiplicity over
    that vertex's labels.  Broadcasting builds the sum over the subset
    without materializing the labeling list.
    """
    k = len(subset)
    shape = (sigma_w,) * k
    sigma_z = acc.shape[3]
    score = np.zeros(shape + (n_z, sigma_z), dtype=np.int64)
    for idx, w in enumerate(subset):
        view_shape = tuple(sigma_w if i == idx else 1 for i in range(k)) + (
            n_z,
            sigma_z,
        )
        score += acc[w].reshape(view_shape)
    return score.max(axis=-1).reshape(-1, n_z)


def rectangle_audit_exact(
    game: Game,
    delta: float,
    epsilon: float,
    mode: CheckMode = EXHAUSTIVE,
    jobs: int = 1,
    budget: int | None = None,
    base_value: Fraction | None = None,
) -> AuditReport:
    """Worst sub-game value over all rectangles of density >= delta.

    ``base_value`` defaults to the game's own value; the verdict compares
    the worst rectangle against ``base_value + epsilon``.
    """
    n_w, n_z = game.graph.n_left, game.graph.n_right
    left_subsets = _side_subsets(n_w, delta, mode)
    right_subsets = _side_subsets(n_z, delta, mode)
    enumerations = sum(game.sigma_x ** len(s) for s in left_subsets)
    limit = audit_budget(budget)
    if enumerations > limit:
        raise BudgetExceeded(
            f"{enumerations} labeling enumerations exceed the audit budget {limit}"
        )

    acc, tot = _acceptance_tables(game)
    t_matrix = np.zeros((n_z, len(right_subsets)), dtype=np.int64)
    for col, t in enumerate(right_subsets):
        t_matrix[list(t), col] = 1

    def process(subset: tuple[int, ...]) -> tuple[int, int, int, int]:
        """Worst (satisfied, total) over right subsets for one left subset."""
        pzmax = _best_counts_for_left_subset(acc, subset, game.sigma_x, n_z)
        tot_row = tot[list(subset)].sum(axis=0)  # (n_z,)
        tot_per_t = tot_row @ t_matrix  # (num right subsets,)
        ncols = len(right_subsets)
        best_per_t = np.empty(ncols, dtype=np.int64)
        for lo in range(0, ncols, 64):  # chunked to cap the labelings x subsets block
            hi = min(lo + 64, ncols)
            best_per_t[lo:hi] = (pzmax @ t_matrix[:, lo:hi]).max(axis=0)
        worst_num, worst_den, worst_col = -1, 1, -1
        checked = 0
        for col in range(ncols):
            den = int(tot_per_t[col])
            if den == 0:
                continue
            checked += 1
            num = int(best_per_t[col])
            if num * worst_den > worst_num * den:
                worst_num, worst_den, worst_col = num, den, col
        return worst_num, worst_den, worst_col, checked

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(process, left_subsets))
    else:
        results = [process(s) for s in left_subsets]

    worst = Fraction(-1)
    worst_rect: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    rectangles = 0
    for subset, (num, den, col, checked) in zip(left_subsets, results):
        rectangles += checked
        if col >= 0:
            value = Fraction(num, den)
            if value > worst:
                worst = value
                worst_rect = (subset, right_subsets[col])
    if worst_rect is None:
        raise EmptySet("no rectangle of the requested density contains an edge")

    if base_value is None:
        base_value = solve_game(game).value
    bound = float(base_value) + epsilon
    verdict = "violated" if float(worst) > bound + 1e-12 else "robust"
    return AuditReport(
        delta=delta,
        epsilon=epsilon,
        mode="exact-value",
        rectangles_checked=rectangles,
        worst_rectangle=worst_rect,
        bound=bound,
        verdict=verdict,
        base_value=float(base_value),
        worst_value=float(worst),
    )


def audit_exact(
    cg: ConcatenatedGame,
    delta: float,
    epsilon: float,
    mode: CheckMode = EXHAUSTIVE,
    jobs: int = 1,
    budget: int | None = None,
) -> AuditReport:
    """Exhaustive rectangle audit of a concatenated game's derived values."""
    base_value = solve_game(cg.base).value
    return rectangle_audit_exact(
        cg.derived, delta, epsilon, mode=mode, jobs=jobs, budget=budget,
        base_value=base_value,
    )


def audit_distance(
    cg: ConcatenatedGame,
    delta: float,
    epsilon: float,
    mode: CheckMode = EXHAUSTIVE,
    budget: int | None = None,
) -> AuditReport:
    """Distance-certificate audit of a concatenated game.

    For each rectangle, measures the l1 distance between the decoded base
    edge distribution and uniform; all arithmetic is exact integer work on
    common-denominator degree counts.
    """
    base = cg.base
    n_w, n_z = cg.h1.n_left, cg.h2.n_left
    left_subsets = _side_subsets(n_w, delta, mode)
    right_subsets = _side_subsets(n_z, delta, mode)
    if len(left_subsets) * len(right_subsets) > audit_budget(budget):
        raise BudgetExceeded("rectangle count exceeds the audit budget")

    rows1, lcm1 = _scaled_rows(cg.h1)
    rows2, lcm2 = _scaled_rows(cg.h2)
    ex = np.array([x for x, _ in base.graph.edges], dtype=np.intp)
    ey = np.array([y for _, y in base.graph.edges], dtype=np.intp)
    n_edges = len(base.graph.edges)

    left_numers = [rows1[list(s)].sum(axis=0) for s in left_subsets]
    right_numers = [rows2[list(t)].sum(axis=0) for t in right_subsets]

    worst = Fraction(-1)
    worst_rect: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    rectangles = 0
    for s, numer_s in zip(left_subsets, left_numers):
        ps = numer_s[ex].astype(object)
        for t, numer_t in zip(right_subsets, right_numers):
            weights = ps * numer_t[ey].astype(object)
            total = int(weights.sum())
            if total == 0:
                continue  # rectangle touches no edge
            rectangles += 1
            spread = int(np.abs(n_edges * weights - total).sum())
            dist = Fraction(spread, n_edges * total)
            if dist > worst:
                worst = dist
                worst_rect = (s, t)
    if worst_rect is None:
        raise EmptySet("no rectangle of the requested density touches an edge")

    base_value = solve_game(base).value
    verdict = "violated" if float(worst) > epsilon + 1e-12 else "robust"
    return AuditReport(
        delta=delta,
        epsilon=epsilon,
        mode="distance-certificate",
        rectangles_checked=rectangles,
        worst_rectangle=worst_rect,
        bound=epsilon,
        verdict=verdict,
        base_value=float(base_value),
        worst_l1_distance=float(worst),
    )


def rectangle_distributions(
    cg: ConcatenatedGame, left_subset: Sequence[int], right_subset: Sequence[int]
) -> tuple[Distribution, Distribution, Distribution]:
    """The (mu_S, mu_T, decoded edge distribution) triple for one rectangle."""
    from .fortifiers import induced_distribution

    mu_s = induced_distribution(cg.h1, left_subset)
    mu_t = induced_distribution(cg.h2, right_subset)
    mu_s = Distribution("left-vertices", mu_s.weights)
    pi = edge_distribution(cg.base, mu_s, mu_t)
    return mu_s, mu_t, pi


@dataclass(frozen=True)
class DeviationBound:
    """Measured pieces of the uniform-closeness bound for one (mu_S, mu_T) pair.

    ``claim1`` is the l1 gap between the true decoded distribution and its
    unnormalized form; ``claim2`` the gap between the unnormalized form and
    uniform; ``total`` the direct l1 distance.  Each is bounded by the
    matching expression in the measured ``eps1``/``eps2``/``lambda0``.
    """

    claim1: float
    claim2: float
    total: float
    bound: float
    eps1: float
    eps2: float
    lambda0: float

    @property
    def claim1_bound(self) -> float:
        return self.lambda0 * self.eps2

    @property
    def claim2_bound(self) -> float:
        return 2 * self.eps1 + self.eps1**2 + self.lambda0 * self.eps2


def deviation_bound(
    game: Game,
    mu_left: Distribution,
    mu_right: Distribution,
    lambda0: float,
) -> DeviationBound:
    """Measure the two triangle pieces of the edge-distribution deviation.

    ``lambda0`` must be at least the expansion coefficient of the game's
    graph (caller-supplied certificate).  ``eps1`` and ``eps2`` are the
    achieved off-uniform norms of the two distributions, so the returned
    bounds hold with measured quantities, not assumptions.
    """
    d, _ = game.graph.require_biregular()
    n, m = game.graph.n_left, game.graph.n_right
    ws = [float(w) for w in mu_left.weights]
    wt = [float(w) for w in mu_right.weights]
    if len(ws) != n or len(wt) != m:
        raise ValueError("distribution lengths do not match the graph")
    perp_s = [w - 1.0 / n for w in ws]
    perp_t = [w - 1.0 / m for w in wt]
    eps1 = max(sum(abs(v) for v in perp_s), sum(abs(v) for v in perp_t))
    eps2 = max(
        n * sum(v * v for v in perp_s), m * sum(v * v for v in perp_t)
    )

    raw = [ws[x] * wt[y] for x, y in game.graph.edges]
    denom = sum(raw)
    n_edges = len(game.graph.edges)  # equals n * d
    uniform = 1.0 / n_edges
    mid = [r * m / d for r in raw]
    if denom == 0:
        raise ValueError("distribution supports touch no edge")
    pi = [r / denom for r in raw]
    claim1 = sum(abs(p - q) for p, q in zip(pi, mid))
    claim2 = sum(abs(q - uniform) for q in mid)
    total = sum(abs(p - uniform) for p in pi)
    bound = 2 * eps1 + eps1**2 + 2 * lambda0 * eps2
    return DeviationBound(
        claim1=claim1,
        claim2=claim2,
        total=total,
        bound=bound,
        eps1=eps1,
        eps2=eps2,
        lambda0=lambda0,
    )
