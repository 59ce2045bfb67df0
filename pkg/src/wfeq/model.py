"""Frequency vectors, parameter matrices, and the one-step regression map.

The dynamics of genotype frequencies p on the probability simplex is driven
by a matrix of survival parameters W in [0, 1]: each state's quadratic
fitness is W_m(p) = p_m * sum_n W[m, n] p_n, the population mean fitness is
their total, and one generation maps p to W_m(p) / W(p).  The complementary
"direction" parameters V = 1 - W express the same increment relative to the
matrix that steers the equilibrium; both forms are provided and agree
algebraically.
"""

from __future__ import annotations

import numpy as np

from .errors import ZeroMeanFitness

SIMPLEX_ATOL = 1e-12
FITNESS_FLOOR = 1e-15


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class SimplexVector:
    """Probability frequencies over the M+1 genotype states.

    Validates once at construction: components within [0, 1] (up to `atol`
    slack for rounding) and total 1 within `atol`.  Boundary points are
    legitimate states; they are absorbing for the dynamics.
    """

    __slots__ = ("_values",)

    def __init__(self, values, *, atol: float = SIMPLEX_ATOL):
        arr = np.asarray(values, dtype=float).copy()
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("a frequency vector needs at least two states")
        if not np.all(np.isfinite(arr)):
            raise ValueError("frequencies must be finite")
        if arr.min() < -atol or arr.max() > 1.0 + atol:
            bad = int(np.argmin(arr)) if arr.min() < -atol else int(np.argmax(arr))
            raise ValueError(f"frequency p[{bad}] = {arr[bad]!r} outside [0, 1]")
        total = arr.sum()
        if abs(total - 1.0) > atol:
            raise ValueError(f"frequencies sum to {total!r}, not 1")
        self._values = _readonly(arr)

    @classmethod
    def uniform(cls, n_states: int) -> "SimplexVector":
        return cls(np.full(n_states, 1.0 / n_states))

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n_states(self) -> int:
        return self._values.size

    def is_interior(self, margin: float = 0.0) -> bool:
        return bool(self._values.min() > margin)

    def __len__(self):
        return self._values.size

    def __getitem__(self, m):
        return self._values[m]

    def __iter__(self):
        return iter(self._values)

    def __repr__(self):
        return f"SimplexVector({self._values.tolist()!r})"


class _UnitBoxMatrix:
    """Square matrix with every entry in [0, 1]; base for both parameter kinds."""

    __slots__ = ("_entries",)
    _kind = "matrix"

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=float).copy()
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"{self._kind} must be square")
        if arr.shape[0] < 2:
            raise ValueError(f"{self._kind} needs dimension >= 2 (at least two states)")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{self._kind} entries must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            m, n = np.unravel_index(
                np.argmin(arr) if arr.min() < 0.0 else np.argmax(arr), arr.shape
            )
            raise ValueError(
                f"{self._kind} entry ({m}, {n}) = {arr[m, n]!r} outside [0, 1]"
            )
        self._entries = _readonly(arr)

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n_states(self) -> int:
        return self._entries.shape[0]

    def __repr__(self):
        return f"{type(self).__name__}({self._entries.tolist()!r})"


class SurvivalMatrix(_UnitBoxMatrix):
    """Pairwise survival parameters W[m, n] in [0, 1]."""

    _kind = "survival matrix"

    @classmethod
    def ones(cls, n_states: int) -> "SurvivalMatrix":
        return cls(np.ones((n_states, n_states)))


class DirectionMatrix(_UnitBoxMatrix):
    """Complementary parameters V[m, n] = 1 - W[m, n]."""

    _kind = "direction matrix"

    @property
    def is_diagonal(self) -> bool:
        off = self._entries[~np.eye(self.n_states, dtype=bool)]
        return bool(np.all(off == 0.0))


def as_simplex(p) -> SimplexVector:
    return p if isinstance(p, SimplexVector) else SimplexVector(p)


def as_survival(W) -> SurvivalMatrix:
    return W if isinstance(W, SurvivalMatrix) else SurvivalMatrix(W)


def as_direction(V) -> DirectionMatrix:
    return V if isinstance(V, DirectionMatrix) else DirectionMatrix(V)


def _check_state_index(m: int, n_states: int) -> int:
    m = int(m)
    if not 0 <= m < n_states:
        raise IndexError(f"state index {m} outside 0..{n_states - 1}")
    return m


# ----------------------------------------------------------------------
# survival-form operations
# ----------------------------------------------------------------------

def fitness_component(W, p, m: int) -> float:
    """Quadratic fitness of state m: p_m * sum_n W[m, n] p_n."""
    W, p = as_survival(W), as_simplex(p)
    m = _check_state_index(m, p.n_states)
    return float(p.values[m] * (W.entries[m] * p.values).sum())


def mean_fitness(W, p) -> float:
    """Total fitness over all states; the step's normalizing denominator."""
    W, p = as_survival(W), as_simplex(p)
    return float((p.values * (W.entries * p.values).sum(axis=1)).sum())


def regression_step(W, p, *, fitness_floor: float = FITNESS_FLOOR) -> SimplexVector:
    """One generation of the deterministic dynamics.

    Raises ZeroMeanFitness when the mean fitness is at or below
    `fitness_floor`: the map is undefined at such a degenerate state.
    """
    W, p = as_survival(W), as_simplex(p)
    per_state = p.values * (W.entries * p.values).sum(axis=1)
    total = per_state.sum()
    if total <= fitness_floor:
        raise ZeroMeanFitness(f"mean fitness {total!r} at or below {fitness_floor!r}")
    return SimplexVector(per_state / total)


def increment_drift(W, p, m: int, *, fitness_floor: float = FITNESS_FLOOR) -> float:
    """Expected one-step change of component m (normalized drift)."""
    W, p = as_survival(W), as_simplex(p)
    m = _check_state_index(m, p.n_states)
    per_state = p.values * (W.entries * p.values).sum(axis=1)
    total = per_state.sum()
    if total <= fitness_floor:
        raise ZeroMeanFitness(f"mean fitness {total!r} at or below {fitness_floor!r}")
    return float((per_state[m] - p.values[m] * total) / total)


def drift_numerator(W, p, m: int) -> float:
    """Unnormalized drift W_m(p) - p_m W(p); well-defined for any state."""
    W, p = as_survival(W), as_simplex(p)
    m = _check_state_index(m, p.n_states)
    per_state = p.values * (W.entries * p.values).sum(axis=1)
    return float(per_state[m] - p.values[m] * per_state.sum())


# ----------------------------------------------------------------------
# direction-form operations
# ----------------------------------------------------------------------

def direction_transform(matrix):
    """Entrywise complement 1 - entries; swaps the two parameter kinds.

    Applying it twice returns the original matrix.
    """
    if isinstance(matrix, SurvivalMatrix):
        return DirectionMatrix(1.0 - matrix.entries)
    if isinstance(matrix, DirectionMatrix):
        return SurvivalMatrix(1.0 - matrix.entries)
    return DirectionMatrix(1.0 - as_survival(matrix).entries)


def scalar_product(V, p, m: int) -> float:
    """Row-m inner product of the direction matrix with the frequencies."""
    V, p = as_direction(V), as_simplex(p)
    m = _check_state_index(m, p.n_states)
    return float((V.entries[m] * p.values).sum())


def drift_direction_form(V, p, m: int) -> float:
    """Unnormalized drift written through the direction parameters.

    Algebraically identical to drift_numerator of the survival matrix
    1 - V; the two code paths share no arithmetic.
    """
    V, p = as_direction(V), as_simplex(p)
    m = _check_state_index(m, p.n_states)
    row_products = (V.entries * p.values).sum(axis=1)
    mixed = (p.values * row_products).sum()
    return float(p.values[m] * (mixed - row_products[m]))


def direction_normalizer(V, p) -> float:
    """Mean fitness written through the direction parameters."""
    V, p = as_direction(V), as_simplex(p)
    row_products = (V.entries * p.values).sum(axis=1)
    return float(1.0 - (p.values * row_products).sum())
