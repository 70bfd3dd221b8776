from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from conftest import random_binary_game
from twoprover.errors import BudgetExceeded, DimensionMismatch
from twoprover.fortifiers import induced_distribution
from twoprover.fortify import (
    audit_distance,
    audit_exact,
    concatenate,
    deviation_bound,
    rectangle_audit_exact,
)
from twoprover.games import (
    Distribution,
    Game,
    game_value,
    relation_mask,
    subgame_value,
)
from twoprover.graphs import BipartiteGraph, complete_bipartite, cycle_graph, matching_graph
from twoprover.seeds import perturbed_distribution, rng_for
from twoprover.spectral import random_biregular, spectral_lambda
from test_games import matching_game_one_live_edge


def matching_base(n: int, relations: list[int]) -> Game:
    return Game.build(n, n, 2, 2, [((i, i), m) for i, m in enumerate(relations)])


class TestConcatenate:
    def test_identity_gadgets_preserve_structure(self):
        g = random_binary_game(3, n_left=2, n_right=2)
        ident = matching_graph(2)
        cg = concatenate(ident, g, ident)
        assert cg.derived.sigma_x == 2 and cg.derived.sigma_y == 2
        assert cg.derived.graph.edges == g.graph.edges
        assert game_value(cg.derived) == game_value(g)

    def test_k22_gadgets_decode_table(self):
        # matching base on 2+2; complete gadgets of degree 2 on both sides.
        base = matching_base(2, [relation_mask([(0, 0), (1, 1)], 2, 2),
                                 relation_mask([(0, 1)], 2, 2)])
        k22 = complete_bipartite(2, 2)
        cg = concatenate(k22, base, k22)
        assert cg.derived.sigma_x == 4 and cg.derived.sigma_y == 4
        # every (w, z) pair carries one instance per base edge
        assert len(cg.derived.graph.edges) == 8

        def digit(label: int, slot: int) -> int:
            return (label >> slot) & 1

        # independent decoding over all 16 super-label pairs per instance
        def expected_mask(base_edge: int) -> int:
            mask = 0
            for a_label in range(4):
                for b_label in range(4):
                    a = digit(a_label, base_edge)  # slot of x equals x here
                    b = digit(b_label, base_edge)
                    if base.relations[base_edge] >> (a * 2 + b) & 1:
                        mask |= 1 << (a_label * 4 + b_label)
            return mask

        expected = sorted([expected_mask(0), expected_mask(1)])
        for w in range(2):
            for z in range(2):
                masks = sorted(
                    m
                    for (edge, m) in zip(cg.derived.graph.edges, cg.derived.relations)
                    if edge == (w, z)
                )
                assert masks == expected

    def test_value_preservation_on_seeded_instances(self):
        for seed in range(20):
            g = random_binary_game(seed)
            n, m = g.graph.n_left, g.graph.n_right
            h1 = random_biregular(2 * n, n, seed % 2 + 1, seed=seed + 500)
            h2 = random_biregular(2 * m, m, seed % 2 + 1, seed=seed + 900)
            cg = concatenate(h1, g, h2)
            assert game_value(cg.derived) == game_value(g)

    def test_dimension_mismatch(self):
        g = random_binary_game(1, n_left=2, n_right=2)
        with pytest.raises(DimensionMismatch):
            concatenate(complete_bipartite(4, 3), g, complete_bipartite(4, 2))

    def test_relation_bit_budget(self):
        g = random_binary_game(1, n_left=4, n_right=4, degree=1)
        wide = random_biregular(4, 4, 10, seed=0)
        with pytest.raises(BudgetExceeded):
            concatenate(wide, g, wide)


class TestAuditExact:
    def test_full_density_single_rectangle(self):
        g = matching_base(2, [relation_mask([(0, 0)], 2, 2), 0])
        h = random_biregular(4, 2, 2, seed=3)
        cg = concatenate(h, g, h)
        report = audit_exact(cg, 1.0, 0.0)
        assert report.rectangles_checked == 1
        assert report.worst_value == pytest.approx(float(game_value(cg.derived)))

    def test_satisfiable_base_every_rectangle_full(self):
        g = matching_base(2, [relation_mask([(0, 0), (1, 1)], 2, 2)] * 2)
        h = random_biregular(4, 2, 2, seed=4)
        cg = concatenate(h, g, h)
        report = audit_exact(cg, 0.25, 0.0)
        assert report.worst_value == 1.0
        assert report.verdict == "robust"

    def test_worst_rectangle_agrees_with_subgame_value(self):
        g = matching_base(3, [relation_mask([(0, 0)], 2, 2),
                              relation_mask([(1, 0)], 2, 2), 0])
        h1 = random_biregular(6, 3, 1, seed=5)
        h2 = random_biregular(6, 3, 2, seed=6)
        cg = concatenate(h1, g, h2)
        report = audit_exact(cg, 1 / 3, 0.1)
        s, t = report.worst_rectangle
        assert float(subgame_value(cg.derived, s, t)) == pytest.approx(report.worst_value)

    def test_jobs_do_not_change_result(self):
        g = matching_base(2, [relation_mask([(0, 0)], 2, 2),
                              relation_mask([(0, 1), (1, 0)], 2, 2)])
        h = random_biregular(4, 2, 2, seed=9)
        cg = concatenate(h, g, h)
        a = audit_exact(cg, 0.5, 0.2, jobs=1)
        b = audit_exact(cg, 0.5, 0.2, jobs=4)
        assert a == b


class TestAuditDistance:
    def test_complete_gadgets_zero_distance(self):
        g = matching_base(2, [relation_mask([(0, 0)], 2, 2), 0])
        k = complete_bipartite(4, 2)
        cg = concatenate(k, g, k)
        report = audit_distance(cg, 0.5, 0.1)
        assert report.worst_l1_distance == 0.0
        assert report.verdict == "robust"

    def test_certificate_soundness_against_exact(self):
        for seed in range(6):
            g = random_binary_game(seed, n_left=2, n_right=2, degree=1)
            h1 = random_biregular(4, 2, 2, seed=seed + 40)
            h2 = random_biregular(4, 2, 2, seed=seed + 80)
            cg = concatenate(h1, g, h2)
            exact = audit_exact(cg, 0.5, 0.3)
            dist = audit_distance(cg, 0.5, 0.3)
            assert exact.worst_value <= float(game_value(g)) + dist.worst_l1_distance + 1e-9

    def test_skew_scenario_violates(self):
        from twoprover.adversarial import skew_extractor

        h0 = random_biregular(8, 4, 2, seed=21)
        skewed, _ = skew_extractor(h0, range(6), 2 / 3)
        base = matching_game_one_live_edge(4)
        cg = concatenate(skewed, base, skewed)
        report = audit_distance(cg, 0.75, 0.9)
        assert report.worst_l1_distance >= 0.9
        assert report.verdict == "violated"


def complete_minus_matching(n: int) -> BipartiteGraph:
    """K_{n,n} without the diagonal: (n-1)-regular with expansion 1/(n-1)."""
    return BipartiteGraph(
        n, n, tuple((x, y) for x in range(n) for y in range(n) if x != y)
    )


class TestLemma31Necessity:
    def test_rectangle_closeness_forces_subset_closeness(self):
        # matching base, same bi-regular gadget both sides
        h = complete_minus_matching(4)
        base = matching_game_one_live_edge(4)
        cg = concatenate(h, base, h)
        delta = 0.5
        report = audit_distance(cg, delta, 2.0)
        eps = report.worst_l1_distance
        assert eps < 1  # needed for the constant below to mean anything
        cap = 4 * eps / (1 - eps) ** 2
        n = 4
        for k in range(2, 5):
            for subset in itertools.combinations(range(4), k):
                mu = induced_distribution(h, subset)
                l1 = float(sum(abs(w - Fraction(1, n)) for w in mu.weights))
                l2_scaled = float(n * sum((w - Fraction(1, n)) ** 2 for w in mu.weights))
                # the S x (full side) rectangle realizes mu_S as its edge distribution
                assert l1 <= eps + 1e-9
                assert l2_scaled <= cap + 1e-9


class TestDeviationBound:
    def test_uniform_inputs_all_zero(self):
        c8 = cycle_graph(4)
        g = Game(c8, 2, 2, tuple(relation_mask([(0, 0), (1, 1)], 2, 2) for _ in c8.edges))
        db = deviation_bound(
            g,
            Distribution.uniform("left-vertices", 4),
            Distribution.uniform("right-vertices", 4),
            1.0,
        )
        assert db.claim1 == db.claim2 == db.total == 0

    def test_claims_hold_on_seeded_trials(self):
        c8 = cycle_graph(4)
        g = Game(c8, 2, 2, tuple(relation_mask([(0, 0)], 2, 2) for _ in c8.edges))
        lam0 = spectral_lambda(c8).lam
        for trial in range(100):
            rng = rng_for(55, "trial", trial)
            mu_s = Distribution("left-vertices", perturbed_distribution(rng, 4, 0.7))
            mu_t = Distribution("right-vertices", perturbed_distribution(rng, 4, 0.7))
            db = deviation_bound(g, mu_s, mu_t, lam0)
            assert db.claim1 <= db.claim1_bound + 1e-9
            assert db.claim2 <= db.claim2_bound + 1e-9
            assert db.total <= db.bound + 1e-9
            assert db.total <= db.claim1 + db.claim2 + 1e-12

    def test_requires_biregular(self):
        g = Game.build(2, 2, 2, 2, [((0, 0), 15), ((0, 1), 15), ((1, 0), 15)])
        from twoprover.errors import NotBiregular

        with pytest.raises(NotBiregular):
            deviation_bound(
                g,
                Distribution.uniform("left-vertices", 2),
                Distribution.uniform("right-vertices", 2),
                1.0,
            )


class TestRectangleAuditOnPlainGames:
    def test_trivially_robust_satisfiable_game(self):
        g = random_binary_game(2, allow_empty_relations=False)
        report = rectangle_audit_exact(g, 0.5, 1.0)
        assert report.verdict == "robust"

    def test_detects_concentrated_violation(self):
        g = matching_game_one_live_edge(4)
        report = rectangle_audit_exact(g, 0.25, 0.5)
        assert report.worst_value == 1.0
        assert report.verdict == "violated"  # 1 > 1/4 + 0.5
