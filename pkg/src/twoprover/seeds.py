"""Deterministic seed derivation and shared subset streams.

All randomness in the package flows from explicit integer seeds through
``random.Random`` (Mersenne Twister).  Distinct purposes draw from distinct
streams derived with :func:`derive_seed`, so adding a consumer never shifts
another consumer's stream.  The derivation hashes the root seed together
with a purpose label, which keeps results identical across platforms and
process invocations.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from typing import Iterator, Sequence


def derive_seed(root: int, *purpose: object) -> int:
    """Derive a child seed from ``root`` and a purpose path.

    The same ``(root, purpose)`` pair always yields the same child seed.
    """
    text = repr((int(root),) + tuple(str(p) for p in purpose))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(root: int, *purpose: object) -> random.Random:
    """A ``random.Random`` seeded for one named purpose."""
    return random.Random(derive_seed(root, *purpose))


def subset_stream(
    seed: int, universe: int, size: int, trials: int
) -> Iterator[tuple[int, ...]]:
    """Yield ``trials`` sorted random ``size``-subsets of ``range(universe)``.

    This stream is shared by the sampled certification modes and the sampled
    rectangle audits so that co-run checks see the same subsets.
    """
    rng = rng_for(seed, "subset", universe, size)
    for _ in range(trials):
        yield tuple(sorted(rng.sample(range(universe), size)))


def subsets_of_density(universe: int, delta: float) -> Iterator[tuple[int, ...]]:
    """All subsets of ``range(universe)`` with density at least ``delta``.

    Enumerated by size then lexicographically, so iteration order is stable.
    """
    for k in range(min_subset_size(universe, delta), universe + 1):
        yield from itertools.combinations(range(universe), k)


def _ceil(x: float) -> int:
    i = int(x)
    return i if i == x else i + 1


def min_subset_size(universe: int, delta: float) -> int:
    """Smallest subset size meeting density ``delta`` (at least 1)."""
    return max(1, _ceil(delta * universe))


def density_subset_count(universe: int, delta: float) -> int:
    """Number of subsets :func:`subsets_of_density` would yield."""
    import math

    return sum(
        math.comb(universe, k)
        for k in range(min_subset_size(universe, delta), universe + 1)
    )


def random_labels(rng: random.Random, count: int, alphabet: int) -> tuple[int, ...]:
    return tuple(rng.randrange(alphabet) for _ in range(count))


def perturbed_distribution(rng: random.Random, size: int, spread: float) -> list[float]:
    """A random distribution near uniform: uniform weights jittered by ``spread``."""
    raw = [max(1e-9, 1.0 + spread * (rng.random() * 2.0 - 1.0)) for _ in range(size)]
    total = sum(raw)
    return [w / total for w in raw]


def sorted_sample(rng: random.Random, population: Sequence[int], k: int) -> tuple[int, ...]:
    return tuple(sorted(rng.sample(list(population), k)))
