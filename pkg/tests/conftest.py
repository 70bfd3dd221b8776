from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from twoprover.games import Game
from twoprover.spectral import random_biregular


def random_binary_game(
    seed: int,
    n_left: int | None = None,
    n_right: int | None = None,
    degree: int | None = None,
    allow_empty_relations: bool = True,
) -> Game:
    """Seeded tiny bi-regular game over binary alphabets."""
    rng = random.Random(seed)
    n = n_left or rng.choice([2, 3, 4])
    m = n_right or n
    d = degree or rng.choice([1, 2])
    while (n * d) % m != 0:
        d += 1
    graph = random_biregular(n, m, d, seed=rng.randrange(2**31))
    low = 0 if allow_empty_relations else 1
    relations = tuple(rng.randrange(low, 16) for _ in graph.edges)
    return Game(graph, 2, 2, relations)


def random_projection_game(seed: int, n: int = 3, degree: int = 2, sigma: int = 2) -> Game:
    """Seeded bi-regular projection game (functional constraints)."""
    rng = random.Random(seed)
    graph = random_biregular(n, n, degree, seed=rng.randrange(2**31))
    relations = []
    for _ in graph.edges:
        mask = 0
        for a in range(sigma):
            b = rng.randrange(sigma)
            mask |= 1 << (a * sigma + b)
        relations.append(mask)
    return Game(graph, sigma, sigma, tuple(relations))
