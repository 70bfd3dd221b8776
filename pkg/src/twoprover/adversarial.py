"""Adversarial constructions: graphs that defeat naive fortification.

Two constructions live here.  ``skew_extractor`` rewires a left-regular
graph inside one chosen dense subset so that the subset's induced
distribution piles mass on a single distinguished right vertex while the
graph's extractor quality degrades only by a constant factor.
``find_bad_subset`` exhibits, for any left-regular graph of small left
degree, a dense subset whose induced distribution is provably far from
uniform in squared l2, which is what rules such graphs out as fortifiers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterInfeasible
from .fortifiers import EXHAUSTIVE, induced_distribution, measure_subsets
from .graphs import BipartiteGraph
from .seeds import density_subset_count

_MEASURE_SUBSET_LIMIT = 2_000_000


@dataclass(frozen=True)
class SkewReport:
    """Accounting of the rewiring, enough to re-verify the edge budget.

    ``edges_relocated`` counts actual moves; ``relocation_budget`` is the
    reference quantity ``eps * delta * m * D`` it should stay within (up to
    a constant).  ``rounding_slack`` records how much of the per-vertex
    relocation count was lost to flooring.
    """

    subset: tuple[int, ...]
    delta: float
    eps: float
    distinguished: int
    uniformize_moves: int
    concentrate_moves: int
    edges_relocated: int
    relocation_budget: float
    per_vertex_moves: int
    rounding_slack: float
    target_mass: float
    achieved_mass: float
    uniformized: BipartiteGraph | None = None  # state between the two steps
    original_eps: float | None = None
    final_eps: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "delta": self.delta,
            "eps": self.eps,
            "distinguished": self.distinguished,
            "uniformize_moves": self.uniformize_moves,
            "concentrate_moves": self.concentrate_moves,
            "edges_relocated": self.edges_relocated,
            "relocation_budget": self.relocation_budget,
            "per_vertex_moves": self.per_vertex_moves,
            "rounding_slack": self.rounding_slack,
            "target_mass": self.target_mass,
            "achieved_mass": self.achieved_mass,
            "original_eps": self.original_eps,
            "final_eps": self.final_eps,
        }


def skew_extractor(
    graph: BipartiteGraph,
    subset: Sequence[int],
    eps: float,
    measure: bool = True,
) -> tuple[BipartiteGraph, SkewReport]:
    """Rewire the edges out of ``subset`` to concentrate mass on one vertex.

    Step 1 moves edges between right vertices until every right vertex sees
    exactly ``|S|*D/n`` edges from the subset (that ratio must be an
    integer).  Step 2 relocates ``floor(eps * d_avg)`` of those edges from
    every right vertex except the lowest-indexed one onto it; the flooring
    must leave at least one edge to move, i.e. ``d_avg >= 1/eps``.  Both
    steps change each right vertex's subset-neighborhood monotonically and
    never touch left degrees, so left-regularity survives (bi-regularity
    does not).
    """
    degree = graph.left_degree  # raises NotLeftRegular
    chosen = sorted(set(int(w) for w in subset))
    if not chosen:
        raise ParameterInfeasible("subset must be nonempty")
    if chosen[0] < 0 or chosen[-1] >= graph.n_left:
        raise ParameterInfeasible("subset index out of range")
    m, n = graph.n_left, graph.n_right
    delta = len(chosen) / m
    total_from_s = len(chosen) * degree
    if total_from_s % n != 0:
        raise ParameterInfeasible(
            f"|S|*D = {total_from_s} edges do not spread evenly over {n} right vertices"
        )
    d_avg = total_from_s // n
    per_vertex = int(eps * d_avg)
    if per_vertex < 1:
        raise ParameterInfeasible(
            f"eps*d_avg = {eps * d_avg:.3f} < 1: no whole edge to relocate per vertex"
        )

    in_s = set(chosen)
    edges = [[w, y] for w, y in graph.edges]
    # indices of subset edges currently pointing at each right vertex,
    # kept sorted by (left endpoint, position) for deterministic picks
    s_edges_at: list[list[int]] = [[] for _ in range(n)]
    for idx, (w, y) in enumerate(edges):
        if w in in_s:
            s_edges_at[y].append(idx)

    original_eps = None
    final_eps = None
    if measure and density_subset_count(m, delta) <= _MEASURE_SUBSET_LIMIT:
        original_eps = measure_subsets(graph, delta, EXHAUSTIVE).worst_l1.l1

    # Step 1: uniformize the subset-degrees onto the right side.
    uniformize_moves = 0
    donors = [y for y in range(n) if len(s_edges_at[y]) > d_avg]
    donor_pos = 0
    for y in range(n):
        while len(s_edges_at[y]) < d_avg:
            while donor_pos < len(donors) and len(s_edges_at[donors[donor_pos]]) <= d_avg:
                donor_pos += 1
            donor = donors[donor_pos]
            idx = s_edges_at[donor].pop(0)
            edges[idx][1] = y
            s_edges_at[y].append(idx)
            uniformize_moves += 1

    uniformized = BipartiteGraph(m, n, tuple((w, y) for w, y in edges))

    # Step 2: drain every other right vertex toward the distinguished one.
    distinguished = 0
    concentrate_moves = 0
    for y in range(1, n):
        for _ in range(per_vertex):
            idx = s_edges_at[y].pop(0)
            edges[idx][1] = distinguished
            s_edges_at[distinguished].append(idx)
            concentrate_moves += 1

    achieved_mass = len(s_edges_at[distinguished]) / total_from_s
    skewed = BipartiteGraph(m, n, tuple((w, y) for w, y in edges))

    if measure and original_eps is not None:
        final_eps = measure_subsets(skewed, delta, EXHAUSTIVE).worst_l1.l1

    report = SkewReport(
        subset=tuple(chosen),
        delta=delta,
        eps=eps,
        distinguished=distinguished,
        uniformize_moves=uniformize_moves,
        concentrate_moves=concentrate_moves,
        edges_relocated=uniformize_moves + concentrate_moves,
        relocation_budget=eps * delta * m * degree,
        per_vertex_moves=per_vertex,
        rounding_slack=eps * d_avg - per_vertex,
        target_mass=eps,
        achieved_mass=achieved_mass,
        uniformized=uniformized,
        original_eps=original_eps,
        final_eps=final_eps,
    )
    return skewed, report


def _scaled_l2_from_uniform(graph: BipartiteGraph, subset: Sequence[int]) -> float:
    dist = induced_distribution(graph, subset, exact=False)
    n = graph.n_right
    u = 1.0 / n
    return n * sum((float(w) - u) ** 2 for w in dist.weights)


def find_bad_subset(
    graph: BipartiteGraph, delta: float, eps: float, c: float
) -> tuple[tuple[int, ...], float]:
    """A dense subset whose induced distribution is far from uniform in l2.

    Follows the constructive argument for left degree around
    ``1/(c*eps*delta)``: if a quarter of the right side is badly
    under-covered the whole left side already witnesses the gap; otherwise a
    small set of mid-degree right vertices is picked, and of the two sets
    "everything outside their neighborhood" and "that plus the
    neighborhood", one must be far from the other and hence from uniform.
    Returns the subset and its achieved ``||pi - u||^2 * n_right``.

    All choices are by lowest index, so the output is deterministic.
    """
    degree = graph.left_degree  # raises NotLeftRegular
    m, n = graph.n_left, graph.n_right
    d_avg = m * degree / n
    degs = graph.right_degrees

    low = [y for y in range(n) if degs[y] < 0.5 * d_avg]
    if len(low) >= n / 4:
        subset = tuple(range(m))
        return subset, _scaled_l2_from_uniform(graph, subset)

    mid = [y for y in range(n) if 0.5 * d_avg < degs[y] < 2 * d_avg]
    want = max(1, math.ceil(c * eps * delta * delta * n))
    if len(mid) < want:
        raise ParameterInfeasible(
            f"only {len(mid)} mid-degree right vertices; need {want}"
        )
    x_prime = mid[:want]
    in_x_prime = set(x_prime)
    s0_set = {w for w, y in graph.edges if y in in_x_prime}
    size_s1 = max(1, math.ceil(delta * m))
    candidates = [w for w in range(m) if w not in s0_set]
    if len(candidates) < size_s1:
        # degree far above the lemma's range (e.g. complete graphs): the
        # mid-degree neighborhood swallows the left side, so no disjoint
        # dense set exists; report the full side, whose deviation is what it is
        subset = tuple(range(m))
        return subset, _scaled_l2_from_uniform(graph, subset)
    s1 = tuple(candidates[:size_s1])
    s2 = tuple(sorted(s0_set.union(s1)))
    achieved1 = _scaled_l2_from_uniform(graph, s1)
    achieved2 = _scaled_l2_from_uniform(graph, s2)
    if achieved1 >= achieved2:
        return s1, achieved1
    return s2, achieved2
