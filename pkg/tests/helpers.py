"""Random instance generators shared by the test modules."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from wfeq import SimplexVector, SurvivalMatrix


def random_survival(rng: np.random.Generator, dim: int) -> SurvivalMatrix:
    return SurvivalMatrix(rng.uniform(0.0, 1.0, size=(dim, dim)))


def random_simplex(rng: np.random.Generator, dim: int) -> SimplexVector:
    return SimplexVector(rng.dirichlet(np.ones(dim)))


def random_interior_simplex(
    rng: np.random.Generator, dim: int, floor: float = 0.02
) -> SimplexVector:
    while True:
        values = rng.dirichlet(np.ones(dim))
        if values.min() >= floor:
            return SimplexVector(values)


def random_rational_matrix(rng: np.random.Generator, dim: int, max_den: int = 64):
    """Matrix of small-denominator rationals in [0, 1]."""
    out = []
    for _ in range(dim):
        row = []
        for _ in range(dim):
            den = int(rng.integers(1, max_den + 1))
            num = int(rng.integers(0, den + 1))
            row.append(Fraction(num, den))
        out.append(row)
    return out


def random_rational_simplex(rng: np.random.Generator, dim: int, total: int = 64):
    """Exact rational frequencies with a common denominator, all positive."""
    cuts = sorted(rng.choice(np.arange(1, total), size=dim - 1, replace=False))
    parts = np.diff([0, *cuts, total])
    return [Fraction(int(c), total) for c in parts]


def to_float_matrix(rows) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in rows])


def to_float_vector(values) -> np.ndarray:
    return np.array([float(x) for x in values])


def balanced_equilibrium(rng: np.random.Generator, dim: int, pi_floor: float):
    """Interior equilibrium with its component product at least `pi_floor`.

    Larger state counts cap the achievable product at dim^-dim, so callers
    pass floors below that; rejection keeps the draw unbiased within the
    admissible set.
    """
    alpha = {2: 2.0, 3: 3.0, 4: 6.0, 5: 25.0, 6: 90.0}.get(dim, 90.0)
    while True:
        values = rng.dirichlet(np.full(dim, alpha))
        if values.prod() >= pi_floor and values.min() > 1e-3:
            return SimplexVector(values)
