from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from oracles import oracle_induced, oracle_worst_deviations
from twoprover.errors import (
    BudgetExceeded,
    DimensionMismatch,
    EmptySet,
    IsolatedVertex,
    NotBiregular,
)
from twoprover.fortifiers import (
    CounterexampleSubset,
    EXHAUSTIVE,
    ExtractorCertificate,
    FortifierCertificate,
    check_extractor,
    check_fortifier,
    fortifier_from_expander,
    induced_distribution,
    measure_subsets,
    product_fortifier,
    product_graph,
    sampled,
)
from twoprover.graphs import BipartiteGraph, complete_bipartite, cycle_graph, matching_graph
from twoprover.spectral import generate_expander, random_biregular, spectral_lambda


class TestInducedDistribution:
    def test_full_left_side_of_biregular_is_uniform(self):
        h = random_biregular(8, 4, 3, seed=1)
        dist = induced_distribution(h, range(8))
        assert all(w == Fraction(1, 4) for w in dist.weights)

    def test_single_vertex_point_mass(self):
        h = BipartiteGraph(2, 2, ((0, 0), (0, 0), (1, 1), (1, 0)))
        dist = induced_distribution(h, [0])
        assert dist.weights == (Fraction(1), Fraction(0))

    def test_half_of_cycle_matches_direct_summation_oracle(self):
        h = cycle_graph(4)
        subset = (0, 1)
        dist = induced_distribution(h, subset)
        assert list(dist.weights) == oracle_induced(h, subset)

    def test_empty_set_raises(self):
        with pytest.raises(EmptySet):
            induced_distribution(cycle_graph(4), [])

    def test_isolated_vertex_raises(self):
        h = BipartiteGraph(2, 1, ((0, 0),))
        with pytest.raises(IsolatedVertex):
            induced_distribution(h, [1])


class TestCheckFortifier:
    def test_complete_graph_zero_deviations(self):
        out = check_fortifier(complete_bipartite(5, 5), 0.2, 0.0, 0.0)
        assert isinstance(out, FortifierCertificate)
        assert out.witness.l1 == 0 and out.witness.l2_scaled == 0

    def test_matching_singleton_violation_values(self):
        n = 5
        out = check_fortifier(matching_graph(n), 1 / n, 0.1, 0.1)
        assert isinstance(out, CounterexampleSubset)
        assert out.l1 == pytest.approx(2 * (1 - 1 / n))
        assert out.l2_scaled == pytest.approx(n - 1)

    def test_worst_subset_matches_exhaustive_oracle(self):
        h = random_biregular(16, 16, 4, seed=3)
        measured = measure_subsets(h, 0.25)
        worst_l1, worst_l2 = oracle_worst_deviations(h, 0.25)
        assert measured.worst_l1.l1 == pytest.approx(float(worst_l1), abs=1e-12)
        assert measured.worst_l2.l2_scaled == pytest.approx(float(worst_l2), abs=1e-12)

    def test_cauchy_schwarz_l1_sq_below_scaled_l2(self):
        h = random_biregular(8, 8, 2, seed=9)
        from twoprover.fortifiers import _scaled_rows, _deviations_from_numer

        rows, lcm = _scaled_rows(h)
        for k in range(1, 9):
            for subset in itertools.combinations(range(8), k):
                numer = rows[list(subset)].sum(axis=0)
                l1, l2s = _deviations_from_numer(numer, len(subset) * lcm, 8)
                assert l1 * l1 <= l2s

    def test_budget_guard(self):
        h = random_biregular(16, 16, 4, seed=3)
        with pytest.raises(BudgetExceeded):
            measure_subsets(h, 0.25, budget=100)

    def test_sampled_mode_deterministic_and_refutes(self):
        h = matching_graph(6)
        mode = sampled(trials=5, seed=42)
        out1 = check_extractor(h, 1 / 6, 0.5, mode)
        out2 = check_extractor(h, 1 / 6, 0.5, mode)
        assert isinstance(out1, CounterexampleSubset)
        assert out1 == out2

    def test_sampled_certificate_records_mode(self):
        h = complete_bipartite(6, 6)
        out = check_extractor(h, 0.5, 0.1, sampled(trials=3, seed=7))
        assert isinstance(out, ExtractorCertificate)
        assert out.mode == "sampled(trials=3, seed=7)"

    def test_fortifier_implies_extractor(self):
        h, _ = generate_expander(8, 8, 3, seed=2)
        out = check_fortifier(h, 0.5, 2.0, 8.0)
        assert isinstance(out, FortifierCertificate)
        ext = out.as_extractor()
        assert ext.delta == out.delta and ext.eps == out.eps1


class TestSpectralCertificates:
    def test_lemma_soundness_on_seeded_graphs(self):
        shapes = [(8, 8, 3), (12, 6, 2), (10, 10, 2), (12, 12, 4)]
        for i, (m, n, d) in enumerate(shapes):
            h = random_biregular(m, n, d, seed=400 + i)
            lam = spectral_lambda(h).lam
            for delta in (1 / m, 0.25, 0.5):
                derived = fortifier_from_expander(spectral_lambda(h), delta)
                measured = measure_subsets(h, delta)
                assert measured.worst_l2.l2_scaled <= derived.eps2 + 1e-9
                assert measured.worst_l1.l1 <= derived.eps1 + 1e-9
                assert derived.eps2 == pytest.approx(lam * lam / delta)

    def test_zero_lambda_gives_zero_fortifier(self):
        cert = spectral_lambda(complete_bipartite(4, 4))
        derived = fortifier_from_expander(cert, 0.3)
        assert derived.eps1 == pytest.approx(0, abs=1e-12)
        assert derived.eps2 == pytest.approx(0, abs=1e-12)

    def test_formula_point(self):
        cert = spectral_lambda(matching_graph(3))
        # lam = 1, delta = 1: loose but valid endpoint of the formula
        derived = fortifier_from_expander(cert, 1.0)
        assert derived.eps1 == pytest.approx(1.0)
        assert derived.eps2 == pytest.approx(1.0)
        manual = FortifierCertificate(0.04, 0.0, 0.0, "spectral-lemma-2.7")
        hand = fortifier_from_expander(
            type(cert)(lam=0.1, n_left=4, n_right=4, left_degree=2, method="exact-svd", tolerance=1e-9),
            0.04,
        )
        assert hand.eps1 == pytest.approx(0.5)
        assert hand.eps2 == pytest.approx(0.25)
        assert manual.mode == hand.mode

    def test_corollary_threshold(self):
        # lam <= eps*sqrt(delta) makes both derived parameters at most eps
        eps, delta = 0.5, 0.36
        h, cert = generate_expander(16, 16, 6, seed=1)
        if cert.lam <= eps * math.sqrt(delta):
            derived = fortifier_from_expander(cert, delta)
            assert derived.eps1 <= eps and derived.eps2 <= eps


class TestProductFortifier:
    def test_complete_expander_factor_kills_l2(self):
        h1, _ = generate_expander(8, 4, 2, seed=5)
        ext = ExtractorCertificate(0.25, 0.4, "exhaustive")
        h2 = complete_bipartite(4, 4)
        _, cert = product_fortifier(h1, ext, h2, spectral_lambda(h2))
        assert cert.eps2 == pytest.approx(0, abs=1e-12)
        assert cert.eps1 == 0.4

    def test_identity_expander_gives_eps_over_delta(self):
        h1, _ = generate_expander(8, 4, 2, seed=6)
        ext = ExtractorCertificate(0.25, 0.4, "exhaustive")
        h2 = matching_graph(4)
        _, cert = product_fortifier(h1, ext, h2, spectral_lambda(h2))
        assert cert.eps2 == pytest.approx(0.4 / 0.25)

    def test_product_multiplicity_is_path_count(self):
        h1 = BipartiteGraph(2, 2, ((0, 0), (0, 1), (1, 1), (1, 0)))
        h2 = BipartiteGraph(2, 1, ((0, 0), (1, 0)))
        prod = product_graph(h1, h2)
        assert prod.multiplicity()[(0, 0)] == 2
        assert prod.multiplicity()[(1, 0)] == 2

    def test_tiny_product_bounds_hold_exhaustively(self):
        delta = 0.25
        h1, _ = generate_expander(8, 8, 2, seed=5)
        h2, exp_cert = generate_expander(8, 8, 3, seed=5)
        measured1 = measure_subsets(h1, delta)
        ext = ExtractorCertificate(delta, measured1.worst_l1.l1, "exhaustive")
        prod, cert = product_fortifier(h1, ext, h2, exp_cert)
        out = check_fortifier(prod, delta, cert.eps1, cert.eps2)
        assert isinstance(out, FortifierCertificate)

    def test_dimension_and_regularity_errors(self):
        with pytest.raises(DimensionMismatch):
            product_graph(complete_bipartite(2, 3), complete_bipartite(2, 2))
        irregular = BipartiteGraph(2, 2, ((0, 0), (0, 1), (1, 0)))
        with pytest.raises(NotBiregular):
            product_fortifier(
                irregular,
                ExtractorCertificate(0.5, 0.1, "exhaustive"),
                complete_bipartite(2, 2),
                spectral_lambda(complete_bipartite(2, 2)),
            )
