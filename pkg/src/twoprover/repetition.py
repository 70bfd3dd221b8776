"""Parallel repetition: k-fold product games and the robust-game bound.

The k-fold repetition samples k edges independently and requires all k
constraints to hold.  Its value sits between ``val(G)^k`` and ``val(G)``
(the upper end because a strategy for the product can be no better on a
single coordinate than the best single-round strategy would allow -- the
product value is in general *not* submultiplicative, so nothing stronger is
asserted).  For games that are robust on dense rectangles there is a
recursion bounding each round's damage, verified here step by step, along
with the rectangle-partition bookkeeping that drives its proof at k = 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded
from .fortify import rectangle_audit_exact
from .games import Game, solve_game
from .graphs import BipartiteGraph

_REPEAT_EDGE_LIMIT = 200_000
_REPEAT_RELATION_BITS_LIMIT = 1 << 16


def _tuple_index(coords: tuple[int, ...], base: int) -> int:
    """Lexicographic index of a tuple, first coordinate most significant."""
    idx = 0
    for c in coords:
        idx = idx * base + c
    return idx


def _digits(value: int, base: int, length: int) -> tuple[int, ...]:
    """Inverse of :func:`_tuple_index`."""
    out = [0] * length
    for i in range(length - 1, -1, -1):
        out[i] = value % base
        value //= base
    return tuple(out)


def repeat_game(game: Game, k: int, budget: int | None = None) -> Game:
    """The k-fold product game on vertex tuples, edge tuples, and label tuples."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n_edges = len(game.graph.edges)
    edge_limit = budget if budget is not None else _REPEAT_EDGE_LIMIT
    if n_edges**k > edge_limit:
        raise BudgetExceeded(f"{n_edges}^{k} repeated edges exceed the limit {edge_limit}")
    sigma_x_k = game.sigma_x**k
    sigma_y_k = game.sigma_y**k
    if sigma_x_k * sigma_y_k > _REPEAT_RELATION_BITS_LIMIT:
        raise BudgetExceeded(
            f"repeated relations need {sigma_x_k * sigma_y_k} bits per edge"
        )

    n_left = game.graph.n_left**k
    n_right = game.graph.n_right**k
    edge_relations = []
    for combo in itertools.product(range(n_edges), repeat=k):
        xs = tuple(game.graph.edges[i][0] for i in combo)
        ys = tuple(game.graph.edges[i][1] for i in combo)
        masks = [game.relations[i] for i in combo]
        mask = 0
        for a in range(sigma_x_k):
            a_digits = _digits(a, game.sigma_x, k)
            for b in range(sigma_y_k):
                b_digits = _digits(b, game.sigma_y, k)
                if all(
                    masks[i] >> (a_digits[i] * game.sigma_y + b_digits[i]) & 1
                    for i in range(k)
                ):
                    mask |= 1 << (a * sigma_y_k + b)
        edge_relations.append(
            (
                (_tuple_index(xs, game.graph.n_left), _tuple_index(ys, game.graph.n_right)),
                mask,
            )
        )
    return Game.build(n_left, n_right, sigma_x_k, sigma_y_k, edge_relations)


@dataclass(frozen=True)
class RepetitionReport:
    """Measured values and bounds for one repeated game."""

    k: int
    delta: float
    epsilon: float
    val_base: float
    val_repeated: float
    values: tuple[float, ...]  # val(G^j) for j = 1..k
    robust_certified: bool
    precondition_ok: bool
    bound_general: float
    bound_holds: bool | None  # None when not asserted
    step_inequalities: tuple[bool, ...]  # Lemma-style recursion at each j >= 2
    projection_precondition_ok: bool | None = None
    bound_projection: float | None = None
    projection_bound_holds: bool | None = None

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "val_base": self.val_base,
            "val_repeated": self.val_repeated,
            "values": list(self.values),
            "robust_certified": self.robust_certified,
            "precondition_ok": self.precondition_ok,
            "bound_general": self.bound_general,
            "bound_holds": self.bound_holds,
            "step_inequalities": list(self.step_inequalities),
            "projection_precondition_ok": self.projection_precondition_ok,
            "bound_projection": self.bound_projection,
            "projection_bound_holds": self.projection_bound_holds,
        }


def verify_recursion(
    game: Game,
    k: int,
    delta: float,
    epsilon: float,
    underlying_sigma_y: int | None = None,
    budget: int | None = None,
) -> RepetitionReport:
    """Audit robustness, compute val(G^j) for j <= k, and test the recursion.

    The per-step inequality ``val(G^j) <= val(G^{j-1})(val(G)+eps) + eps``
    and the closed form ``val(G^k) <= (val(G)+eps)^k + k*eps`` are asserted
    only when the game was certified robust at ``(delta, epsilon)`` and the
    alphabet precondition ``2*delta*|Sigma_X x Sigma_Y|^{k-1} <= eps``
    holds; otherwise the report carries the failed flags and no verdict.

    When ``underlying_sigma_y`` is given (the game is a symmetrized
    projection game over that original right alphabet), the sharper
    precondition ``2*delta*|Sigma_Y|^{k-1} <= eps`` is also checked; that
    variant additionally needs the symmetrized graph to be bi-regular, and
    is skipped when it is not.
    """
    audit = rectangle_audit_exact(game, delta, epsilon)
    robust = audit.verdict == "robust"
    val_base = solve_game(game).value
    values: list[Fraction] = [val_base]
    for j in range(2, k + 1):
        values.append(solve_game(repeat_game(game, j, budget=budget)).value)

    sigma_pair = game.sigma_x * game.sigma_y
    precondition_ok = 2 * delta * sigma_pair ** (k - 1) <= epsilon
    step_flags = []
    for j in range(2, k + 1):
        step_pre = 2 * delta * sigma_pair ** (j - 1) <= epsilon
        if robust and step_pre:
            lhs = float(values[j - 1])
            rhs = float(values[j - 2]) * (float(val_base) + epsilon) + epsilon
            step_flags.append(lhs <= rhs + 1e-12)
        else:
            step_flags.append(True)  # not asserted

    bound_general = (float(val_base) + epsilon) ** k + k * epsilon
    bound_holds: bool | None = None
    if robust and precondition_ok:
        bound_holds = float(values[-1]) <= bound_general + 1e-12

    projection_pre: bool | None = None
    bound_projection: float | None = None
    projection_holds: bool | None = None
    if underlying_sigma_y is not None and game.graph.is_biregular:
        projection_pre = 2 * delta * underlying_sigma_y ** (k - 1) <= epsilon
        bound_projection = bound_general
        if robust and projection_pre:
            projection_holds = float(values[-1]) <= bound_projection + 1e-12

    return RepetitionReport(
        k=k,
        delta=delta,
        epsilon=epsilon,
        val_base=float(val_base),
        val_repeated=float(values[-1]),
        values=tuple(float(v) for v in values),
        robust_certified=robust,
        precondition_ok=precondition_ok,
        bound_general=bound_general,
        bound_holds=bound_holds,
        step_inequalities=tuple(step_flags),
        projection_precondition_ok=projection_pre,
        bound_projection=bound_projection,
        projection_bound_holds=projection_holds,
    )


@dataclass(frozen=True)
class PartitionAccounting:
    """Rectangle-partition counts for the optimal two-round strategy.

    Every query pair is binned by whether the rectangle its last round
    falls into (conditioned on the first-round answers) is accepting, and
    whether that rectangle is dense on both sides.
    """

    not_accepting: int
    accepting_large: int
    accepting_small: int
    total_queries: int
    win_bound: Fraction  # val(G) * |E|^2
    small_bound: float  # 2*delta*|Sigma_X x Sigma_Y|*|E|^2


def partition_accounting(game: Game, delta: float) -> PartitionAccounting:
    """Recompute the two-round partition for the brute-force optimal strategy."""
    doubled = repeat_game(game, 2)
    result = solve_game(doubled, enumerate_side="left")
    n, m = game.graph.n_left, game.graph.n_right
    edges = game.graph.edges
    n_edges = len(edges)

    def left_answer(x1: int, x2: int) -> tuple[int, ...]:
        label = result.witness.left_labels[x1 * n + x2]
        return _digits(label, game.sigma_x, 2)

    def right_answer(y1: int, y2: int) -> tuple[int, ...]:
        label = result.witness.right_labels[y1 * m + y2]
        return _digits(label, game.sigma_y, 2)

    # size of S_{x1, sigma}: how many x2 make the strategy give x1 the label sigma
    s_size = [[0] * game.sigma_x for _ in range(n)]
    for x1 in range(n):
        for x2 in range(n):
            s_size[x1][left_answer(x1, x2)[0]] += 1
    t_size = [[0] * game.sigma_y for _ in range(m)]
    for y1 in range(m):
        for y2 in range(m):
            t_size[y1][right_answer(y1, y2)[0]] += 1

    a0 = a1 = a2 = 0
    for i1, (x1, y1) in enumerate(edges):
        for x2, y2 in edges:
            sigma = left_answer(x1, x2)[0]
            sigma_p = right_answer(y1, y2)[0]
            if not game.accepts(i1, sigma, sigma_p):
                a0 += 1
            elif s_size[x1][sigma] >= delta * n and t_size[y1][sigma_p] >= delta * m:
                a1 += 1
            else:
                a2 += 1

    val = solve_game(game).value
    return PartitionAccounting(
        not_accepting=a0,
        accepting_large=a1,
        accepting_small=a2,
        total_queries=n_edges**2,
        win_bound=val * n_edges**2,
        small_bound=2 * delta * game.sigma_x * game.sigma_y * n_edges**2,
    )
