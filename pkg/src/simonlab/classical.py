"""Classical baselines: basis querying for linear maps, collision search for tables."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fflinalg import FpMatrix, kernel, unit_vector
from .instances import GeneralInstance, Label, label_for_kernel_dim


class CountingOracle:
    """Wraps a callable and counts the queries made through it."""

    def __init__(self, f):
        self.f = f
        self.queries = 0

    def __call__(self, x):
        self.queries += 1
        return self.f(x)


def basis_solve(oracle, p: int, n: int):
    """Query e_1..e_n, rebuild the matrix and label it by kernel dimension.

    Returns (label, queries_used); queries_used is always n.
    """
    counter = CountingOracle(oracle)
    columns = [tuple(counter(unit_vector(j, n))) for j in range(n)]
    rows = tuple(tuple(columns[j][i] for j in range(n)) for i in range(n))
    h = kernel(FpMatrix(p, n, rows)).dim
    return label_for_kernel_dim(h), counter.queries


@dataclass(frozen=True)
class CollisionResult:
    found: bool
    pair: tuple | None
    queries_used: int

    def to_json(self) -> dict:
        return {"result": "COLLISION_FOUND" if self.found else "NO_COLLISION",
                "pair": list(self.pair) if self.pair else None,
                "queries_used": self.queries_used}


def collision_search(g: GeneralInstance, budget: int, seed=None) -> CollisionResult:
    """Query distinct uniformly random points until two share an image."""
    size = 2 ** g.n
    if budget > size:
        warnings.warn(f"budget {budget} exceeds 2^n = {size}; clamped", stacklevel=2)
        budget = size
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    order = rng.permutation(size)[:budget]
    seen = {}
    for used, x in enumerate(order, start=1):
        x = int(x)
        y = g(x)
        if y in seen:
            return CollisionResult(True, (seen[y], x), used)
        seen[y] = x
    return CollisionResult(False, None, len(order))


def birthday_collision_probability(n: int, budget: int) -> Fraction:
    """Exact chance that ``budget`` distinct random queries to a 2-to-1 map
    on {0,1}^n hit a collision.

    After j collision-free queries, j unqueried partners are bad out of
    the 2^n - j remaining points.
    """
    size = 2 ** n
    budget = min(budget, size)
    no_hit = Fraction(1)
    for j in range(budget):
        no_hit *= Fraction(size - 2 * j, size - j)
    return 1 - no_hit
