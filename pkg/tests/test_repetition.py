from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import random_binary_game, random_projection_game
from oracles import oracle_game_value
from twoprover.errors import BudgetExceeded
from twoprover.games import Game, game_value, relation_mask, symmetrize
from twoprover.repetition import (
    partition_accounting,
    repeat_game,
    verify_recursion,
)


def contradiction_game() -> Game:
    """One left vertex, two right vertices, incompatible projections: value 1/2."""
    return Game.build(
        1, 2, 2, 1,
        [((0, 0), relation_mask([(0, 0)], 2, 1)),
         ((0, 1), relation_mask([(1, 0)], 2, 1))],
    )


class TestRepeatGame:
    def test_k1_same_value_and_shape(self):
        g = random_binary_game(3)
        r = repeat_game(g, 1)
        assert game_value(r) == game_value(g)
        assert len(r.graph.edges) == len(g.graph.edges)

    def test_satisfiable_stays_satisfiable(self):
        g = Game.build(2, 2, 2, 2, [((i, i), relation_mask([(0, 0)], 2, 2)) for i in range(2)])
        for k in (2, 3):
            assert game_value(repeat_game(g, k)) == 1

    def test_contradiction_game_squared(self):
        g = contradiction_game()
        v2 = game_value(repeat_game(g, 2))
        assert Fraction(1, 4) <= v2 <= Fraction(1, 2)
        assert v2 == oracle_game_value(repeat_game(g, 2))

    def test_vertex_and_edge_counts(self):
        g = random_binary_game(5, n_left=2, n_right=2)
        r = repeat_game(g, 2)
        assert r.graph.n_left == 4 and r.graph.n_right == 4
        assert len(r.graph.edges) == len(g.graph.edges) ** 2
        assert r.sigma_x == 4 and r.sigma_y == 4

    def test_budget(self):
        g = random_binary_game(5, n_left=4, n_right=4, degree=2)
        with pytest.raises(BudgetExceeded):
            repeat_game(g, 4)


class TestSandwich:
    def test_value_between_power_and_base(self):
        for seed in range(12):
            g = random_binary_game(seed, n_left=1, n_right=2, degree=2)
            v = game_value(g)
            for k in (2, 3):
                vk = game_value(repeat_game(g, k))
                assert v**k <= vk <= v

    def test_no_submultiplicative_assertion(self):
        # val(G^k) can exceed val(G^{k-1})*val(G) in general; only the
        # two-sided sandwich is guaranteed, so that is all we pin down.
        g = contradiction_game()
        v, v2 = game_value(g), game_value(repeat_game(g, 2))
        assert v2 <= v and v2 >= v * v


class TestVerifyRecursion:
    def test_satisfiable_game_bound_trivial(self):
        g = Game.build(2, 2, 2, 2, [((i, i), relation_mask([(0, 0)], 2, 2)) for i in range(2)])
        report = verify_recursion(g, 2, delta=0.1, epsilon=0.9)
        assert report.robust_certified
        assert report.precondition_ok
        assert report.bound_holds
        assert report.val_repeated == 1.0

    def test_robust_binary_game_bound(self):
        g = contradiction_game()
        # 2*delta*(sigma_x*sigma_y)^(k-1) = 4*delta <= eps
        report = verify_recursion(g, 2, delta=0.1, epsilon=0.5)
        assert report.robust_certified
        assert report.precondition_ok
        assert report.bound_holds
        assert all(report.step_inequalities)

    def test_precondition_failure_reported_not_fatal(self):
        g = contradiction_game()
        report = verify_recursion(g, 3, delta=0.4, epsilon=0.9)
        assert not report.precondition_ok
        assert report.bound_holds is None

    def test_values_monotone_decreasing(self):
        g = contradiction_game()
        report = verify_recursion(g, 3, delta=0.5, epsilon=1.0)
        vals = report.values
        assert all(vals[i + 1] <= vals[i] + 1e-12 for i in range(len(vals) - 1))

    def test_projection_variant_on_symmetrized_game(self):
        g = random_projection_game(2, n=2, degree=2)
        sym = symmetrize(g)
        if not sym.graph.is_biregular:
            pytest.skip("symmetrized instance not bi-regular")
        report = verify_recursion(
            sym, 2, delta=0.05, epsilon=0.9, underlying_sigma_y=g.sigma_y
        )
        assert report.projection_precondition_ok is not None
        if report.robust_certified and report.projection_precondition_ok:
            assert report.projection_bound_holds


class TestPartitionAccounting:
    def test_win_count_bounded_by_single_round_value(self):
        for seed in (1, 4, 9):
            g = random_binary_game(seed, n_left=2, n_right=2, degree=2,
                                   allow_empty_relations=False)
            acc = partition_accounting(g, delta=0.5)
            assert acc.not_accepting + acc.accepting_large + acc.accepting_small == acc.total_queries
            assert acc.accepting_large + acc.accepting_small <= acc.win_bound

    def test_small_rectangle_mass_bounded(self):
        for seed in (1, 4, 9):
            g = random_binary_game(seed, n_left=2, n_right=2, degree=2,
                                   allow_empty_relations=False)
            acc = partition_accounting(g, delta=0.25)
            assert acc.accepting_small <= acc.small_bound + 1e-9
