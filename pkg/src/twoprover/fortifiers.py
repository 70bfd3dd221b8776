"""Extractor and fortifier certification: exhaustive, sampled, and spectral.

A left subset ``S`` of a bipartite graph induces a distribution on the right
side: pick a uniform element of ``S``, then a uniform neighbor.  An
extractor keeps that distribution close to uniform in l1 for every dense
enough ``S``; a fortifier additionally bounds the squared l2 distance by
``eps2 / n_right``.  Both properties are certified here either by direct
subset enumeration (exact integer arithmetic throughout), by seeded
sampling (refutation only), or derived from a spectral certificate.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import seeds
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    EmptySet,
    IsolatedVertex,
    NotBiregular,
)
from .games import Distribution
from .graphs import BipartiteGraph
from .spectral import ExpanderCertificate

DEFAULT_SUBSET_BUDGET = 2 * 10**7
_SUBSET_BUDGET_ENV = "TWOPROVER_SUBSET_BUDGET"
EXACT_SIZE_LIMIT = 12  # left-vertex count up to which Fraction output is default


def subset_budget(override: int | None = None) -> int:
    if override is not None:
        return override
    return int(os.environ.get(_SUBSET_BUDGET_ENV, DEFAULT_SUBSET_BUDGET))


@dataclass(frozen=True)
class CheckMode:
    """How a subset property was verified.

    ``exhaustive`` enumerates every subset of density at least delta.
    ``sampled`` draws a fixed number of seeded subsets per size; it can
    refute but never prove, and the certificate records that.
    """

    kind: str  # "exhaustive" | "sampled"
    trials: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown check mode {self.kind!r}")
        if self.kind == "sampled" and (self.trials is None or self.trials < 1):
            raise ValueError("sampled mode requires trials >= 1")

    def label(self) -> str:
        if self.kind == "sampled":
            return f"sampled(trials={self.trials}, seed={self.seed})"
        return "exhaustive"


EXHAUSTIVE = CheckMode("exhaustive")


def sampled(trials: int, seed: int) -> CheckMode:
    return CheckMode("sampled", trials=trials, seed=seed)


@dataclass(frozen=True)
class SubsetDeviation:
    """Achieved distances of one subset's induced distribution from uniform."""

    subset: tuple[int, ...]
    l1: float
    l2_scaled: float  # squared l2 distance times n_right


@dataclass(frozen=True)
class MeasuredDeviations:
    """Worst induced-distribution deviations over the enumerated subsets."""

    delta: float
    worst_l1: SubsetDeviation
    worst_l2: SubsetDeviation
    subsets_checked: int
    mode: CheckMode


@dataclass(frozen=True)
class CounterexampleSubset:
    subset: tuple[int, ...]
    l1: float
    l2_scaled: float

    def to_json_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "l1": self.l1,
            "l2_scaled": self.l2_scaled,
        }


@dataclass(frozen=True)
class ExtractorCertificate:
    delta: float
    eps: float
    mode: str
    witness: SubsetDeviation | None = None

    def to_json_dict(self) -> dict:
        doc = {"delta": self.delta, "eps": self.eps, "mode": self.mode}
        if self.witness is not None:
            doc["witness"] = {
                "subset": list(self.witness.subset),
                "l1": self.witness.l1,
                "l2_scaled": self.witness.l2_scaled,
            }
        return doc


@dataclass(frozen=True)
class FortifierCertificate:
    delta: float
    eps1: float
    eps2: float
    mode: str
    witness: SubsetDeviation | None = None
    source_lambda: float | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "delta": self.delta,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "mode": self.mode,
        }
        if self.source_lambda is not None:
            doc["lambda"] = self.source_lambda
        if self.witness is not None:
            doc["witness"] = {
                "subset": list(self.witness.subset),
                "l1": self.witness.l1,
                "l2_scaled": self.witness.l2_scaled,
            }
        return doc

    def as_extractor(self) -> ExtractorCertificate:
        """The l1 half of the guarantee on its own."""
        return ExtractorCertificate(self.delta, self.eps1, self.mode, self.witness)


def _scaled_rows(graph: BipartiteGraph) -> tuple[np.ndarray, int]:
    """Integer neighbor rows scaled to a common denominator.

    Row ``w`` holds ``mult(w, x) * (L / deg(w))`` where ``L`` is the lcm of
    the left degrees, so a subset's induced distribution is the row sum
    divided by ``|S| * L``.  Integer arithmetic keeps every comparison exact.
    """
    degs = graph.left_degrees
    if any(d == 0 for d in degs):
        raise IsolatedVertex("every left vertex needs degree >= 1")
    lcm = math.lcm(*degs)
    rows = np.zeros((graph.n_left, graph.n_right), dtype=np.int64)
    for x, y in graph.edges:
        rows[x, y] += lcm // degs[x]
    return rows, lcm


def induced_distribution(
    graph: BipartiteGraph, subset: Sequence[int], exact: bool | None = None
) -> Distribution:
    """Right-side distribution from a uniform element of ``subset`` and a uniform neighbor."""
    if not subset:
        raise EmptySet("subset must be nonempty")
    chosen = sorted(set(int(w) for w in subset))
    if chosen[0] < 0 or chosen[-1] >= graph.n_left:
        raise ValueError("subset index out of range")
    rows, lcm = _scaled_rows(graph)
    numer = rows[chosen].sum(axis=0)
    denom = len(chosen) * lcm
    if exact is None:
        exact = graph.n_left <= EXACT_SIZE_LIMIT
    if exact:
        weights = tuple(Fraction(int(v), denom) for v in numer)
    else:
        weights = tuple(float(v) / denom for v in numer)
    return Distribution("right-vertices", weights)


def _deviations_from_numer(
    numer: np.ndarray, denom: int, n_right: int
) -> tuple[Fraction, Fraction]:
    """Exact (l1, l2_scaled) of ``numer/denom`` from uniform on ``n_right`` points."""
    centered = n_right * numer.astype(object) - denom
    l1 = Fraction(int(sum(abs(int(c)) for c in centered)), n_right * denom)
    l2s = Fraction(int(sum(int(c) * int(c) for c in centered)), n_right * denom * denom)
    return l1, l2s


def _iter_subsets(
    graph: BipartiteGraph, delta: float, mode: CheckMode, budget: int | None
) -> Iterator[tuple[int, ...]]:
    m = graph.n_left
    if mode.kind == "exhaustive":
        count = seeds.density_subset_count(m, delta)
        limit = subset_budget(budget)
        if count > limit:
            raise BudgetExceeded(
                f"{count} subsets of density >= {delta} exceed the budget {limit}"
            )
        yield from seeds.subsets_of_density(m, delta)
    else:
        assert mode.seed is not None
        for k in range(seeds.min_subset_size(m, delta), m + 1):
            yield from seeds.subset_stream(mode.seed, m, k, mode.trials or 1)


def measure_subsets(
    graph: BipartiteGraph,
    delta: float,
    mode: CheckMode = EXHAUSTIVE,
    budget: int | None = None,
) -> MeasuredDeviations:
    """Worst l1 and scaled-l2 deviations over subsets of density >= delta.

    Every subset size from the density threshold up to the full side is
    covered: neither inequality is a priori monotone in the subset size.
    """
    rows, lcm = _scaled_rows(graph)
    n_right = graph.n_right
    worst_l1: tuple[Fraction, tuple[int, ...]] | None = None
    worst_l2: tuple[Fraction, tuple[int, ...]] | None = None
    checked = 0
    for subset in _iter_subsets(graph, delta, mode, budget):
        numer = rows[list(subset)].sum(axis=0)
        denom = len(subset) * lcm
        l1, l2s = _deviations_from_numer(numer, denom, n_right)
        checked += 1
        if worst_l1 is None or l1 > worst_l1[0]:
            worst_l1 = (l1, subset)
        if worst_l2 is None or l2s > worst_l2[0]:
            worst_l2 = (l2s, subset)
    if worst_l1 is None or worst_l2 is None:
        raise EmptySet("no subset met the density threshold")

    def deviation_at(subset: tuple[int, ...]) -> SubsetDeviation:
        numer = rows[list(subset)].sum(axis=0)
        denom = len(subset) * lcm
        l1, l2s = _deviations_from_numer(numer, denom, n_right)
        return SubsetDeviation(subset, float(l1), float(l2s))

    return MeasuredDeviations(
        delta=delta,
        worst_l1=deviation_at(worst_l1[1]),
        worst_l2=deviation_at(worst_l2[1]),
        subsets_checked=checked,
        mode=mode,
    )


_SLACK = 1e-12  # absorbs the final float conversions in measured deviations


def check_extractor(
    graph: BipartiteGraph,
    delta: float,
    eps: float,
    mode: CheckMode = EXHAUSTIVE,
    budget: int | None = None,
) -> ExtractorCertificate | CounterexampleSubset:
    """Verify the l1 half of the subset property at ``(delta, eps)``."""
    measured = measure_subsets(graph, delta, mode, budget)
    worst = measured.worst_l1
    if worst.l1 > eps + _SLACK:
        return CounterexampleSubset(worst.subset, worst.l1, worst.l2_scaled)
    return ExtractorCertificate(delta, eps, measured.mode.label(), witness=worst)


def check_fortifier(
    graph: BipartiteGraph,
    delta: float,
    eps1: float,
    eps2: float,
    mode: CheckMode = EXHAUSTIVE,
    budget: int | None = None,
) -> FortifierCertificate | CounterexampleSubset:
    """Verify both subset inequalities at ``(delta, eps1, eps2)``.

    The scaled-l2 bound compares ``||pi - u||^2 * n_right`` against ``eps2``.
    Returns the certificate, or the worst offending subset with its achieved
    ``(l1, l2_scaled)`` pair.
    """
    measured = measure_subsets(graph, delta, mode, budget)
    bad_l1 = measured.worst_l1.l1 > eps1 + _SLACK
    bad_l2 = measured.worst_l2.l2_scaled > eps2 + _SLACK
    if bad_l1 or bad_l2:
        worst = measured.worst_l1 if bad_l1 else measured.worst_l2
        return CounterexampleSubset(worst.subset, worst.l1, worst.l2_scaled)
    return FortifierCertificate(
        delta, eps1, eps2, measured.mode.label(), witness=measured.worst_l2
    )


def fortifier_from_expander(
    cert: ExpanderCertificate, delta: float
) -> FortifierCertificate:
    """Fortifier parameters implied by a spectral certificate.

    An expansion coefficient ``lam`` gives a
    ``(delta, sqrt(lam^2/delta), lam^2/delta)``-fortifier; in particular
    ``lam <= eps*sqrt(delta)`` yields a ``(delta, eps, eps)``-fortifier.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    eps2 = cert.lam**2 / delta
    return FortifierCertificate(
        delta=delta,
        eps1=math.sqrt(eps2),
        eps2=eps2,
        mode="spectral-lemma-2.7",
        source_lambda=cert.lam,
    )


def product_graph(h1: BipartiteGraph, h2: BipartiteGraph) -> BipartiteGraph:
    """Compose two bipartite graphs through their shared middle side.

    The product has an edge ``(v, x)`` of multiplicity
    ``sum_w mult1(v, w) * mult2(w, x)``.
    """
    if h1.n_right != h2.n_left:
        raise DimensionMismatch(
            f"inner sides differ: {h1.n_right} vs {h2.n_left}"
        )
    counts1 = np.zeros((h1.n_left, h1.n_right), dtype=np.int64)
    for v, w in h1.edges:
        counts1[v, w] += 1
    counts2 = np.zeros((h2.n_left, h2.n_right), dtype=np.int64)
    for w, x in h2.edges:
        counts2[w, x] += 1
    product = counts1 @ counts2
    edges = []
    for v in range(h1.n_left):
        for x in range(h2.n_right):
            edges.extend(((v, x),) * int(product[v, x]))
    return BipartiteGraph(h1.n_left, h2.n_right, tuple(edges))


def product_fortifier(
    h1: BipartiteGraph,
    extractor_cert: ExtractorCertificate,
    h2: BipartiteGraph,
    expander_cert: ExpanderCertificate,
) -> tuple[BipartiteGraph, FortifierCertificate]:
    """Fortifier built as extractor times expander.

    ``h1`` must be a bi-regular extractor (its right-degree bound is what
    caps the middle-side point masses) and ``h2`` a bi-regular expander on
    the middle and output sides.  The product inherits the extractor's l1
    bound and gains the l2 bound ``lam^2 * eps / delta``.
    """
    if not h1.is_biregular:
        raise NotBiregular("the extractor factor must be bi-regular")
    if not h2.is_biregular:
        raise NotBiregular("the expander factor must be bi-regular")
    graph = product_graph(h1, h2)
    eps = extractor_cert.eps
    delta = extractor_cert.delta
    cert = FortifierCertificate(
        delta=delta,
        eps1=eps,
        eps2=expander_cert.lam**2 * eps / delta,
        mode="product-lemma-2.6",
        source_lambda=expander_cert.lam,
    )
    return graph, cert
