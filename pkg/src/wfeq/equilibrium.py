"""Equilibrium frequencies from the inverse direction matrix.

An interior equilibrium rho satisfies V rho = pi * 1 for a common scalar pi,
so rho is proportional to the row sums of V^-1 and pi is pinned by requiring
the components to sum to one.  Two extra conditions hold in a restricted
subclass only, and are reported as diagnostics rather than enforced: pi may
also equal the product of the rho components, and the per-row scalar
products (V_m, rho) may equal that same product.  Both hold simultaneously
exactly when V is the diagonal matrix diag(pi / rho_m), the subclass built
by `diagonal_from_equilibrium`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InadmissibleEquilibrium,
    NotDiagonalModel,
    OutOfRangeDirection,
    SingularDirectionMatrix,
)
from .model import DirectionMatrix, SimplexVector, as_direction, as_simplex, _check_state_index, _readonly

RCOND_FLOOR = 1e-12
FLAG_TOL = 1e-9
RHO_SUM_TOL = 1e-10


@dataclass(frozen=True)
class EquilibriumProfile:
    """Solved equilibrium with its scale and subclass diagnostics.

    `pi` is always 1 / sum(inverse_row_sums); `product_consistent` and
    `row_consistent` report whether the product-of-frequencies conditions
    hold as well, and `diagonal` whether the source matrix was diagonal.
    """

    rho: SimplexVector
    pi: float
    inverse_row_sums: np.ndarray
    product_consistent: bool
    row_consistent: bool
    diagonal: bool

    def __post_init__(self):
        object.__setattr__(
            self, "inverse_row_sums",
            _readonly(np.asarray(self.inverse_row_sums, dtype=float).copy()),
        )
        rho = as_simplex(self.rho)
        object.__setattr__(self, "rho", rho)
        if abs(rho.values.sum() - 1.0) > RHO_SUM_TOL:
            raise InadmissibleEquilibrium("equilibrium components do not sum to 1")
        if rho.values.min() <= 0.0:
            raise InadmissibleEquilibrium("equilibrium has a non-positive component")
        recon = 1.0 / self.inverse_row_sums.sum()
        if not np.isclose(self.pi, recon, rtol=1e-9, atol=0.0):
            raise ValueError("pi inconsistent with the inverse row sums")

    @property
    def n_states(self) -> int:
        return self.rho.n_states


def solve_equilibrium(
    V,
    *,
    rcond_floor: float = RCOND_FLOOR,
    flag_tol: float = FLAG_TOL,
) -> EquilibriumProfile:
    """Equilibrium of the direction matrix via a dense LU solve.

    Raises SingularDirectionMatrix when the reciprocal condition estimate
    (1-norm) falls below `rcond_floor`, and InadmissibleEquilibrium when a
    solved component is non-positive (no interior equilibrium).
    """
    V = as_direction(V)
    dim = V.n_states
    try:
        inverse = np.linalg.solve(V.entries, np.eye(dim))
    except np.linalg.LinAlgError as exc:
        raise SingularDirectionMatrix(str(exc)) from None
    norm_v = np.abs(V.entries).sum(axis=0).max()
    norm_inv = np.abs(inverse).sum(axis=0).max()
    rcond = 1.0 / (norm_v * norm_inv) if norm_v * norm_inv > 0 else 0.0
    if not np.isfinite(rcond) or rcond < rcond_floor:
        raise SingularDirectionMatrix(
            f"reciprocal condition estimate {rcond:.3e} below {rcond_floor:.1e}"
        )
    row_sums = inverse.sum(axis=1)
    total = row_sums.sum()
    if total == 0.0 or not np.isfinite(total):
        raise SingularDirectionMatrix("inverse row sums do not normalize")
    pi = 1.0 / total
    rho = pi * row_sums
    if rho.min() <= 0.0:
        raise InadmissibleEquilibrium(
            f"component {int(np.argmin(rho))} of the solved equilibrium is "
            f"{rho.min():.3e}; no interior equilibrium for this matrix"
        )
    rho_vec = SimplexVector(rho / rho.sum())
    pi_product = float(np.prod(rho_vec.values))
    scalar_products = V.entries @ rho_vec.values
    scale = max(abs(pi), abs(pi_product), 1e-300)
    product_consistent = bool(abs(pi - pi_product) <= flag_tol * scale)
    row_consistent = bool(
        np.max(np.abs(scalar_products - pi_product)) <= flag_tol * scale
    )
    return EquilibriumProfile(
        rho=rho_vec,
        pi=float(pi),
        inverse_row_sums=row_sums,
        product_consistent=product_consistent,
        row_consistent=row_consistent,
        diagonal=V.is_diagonal,
    )


def diagonal_from_equilibrium(rho) -> DirectionMatrix:
    """Diagonal direction matrix realizing the given interior equilibrium.

    The diagonal entries are pi / rho_m with pi the product of the
    components; each must land in [0, 1] to be a legitimate direction
    parameter, otherwise OutOfRangeDirection is raised.  (On the simplex
    pi / rho_m is the product of the other components, so any interior
    frequency vector is realizable; the check guards unvalidated input.)
    """
    rho = as_simplex(rho)
    if rho.values.min() <= 0.0:
        raise InadmissibleEquilibrium("equilibrium components must all be positive")
    pi = float(np.prod(rho.values))
    diag = pi / rho.values
    if diag.max() > 1.0 or diag.min() < 0.0:
        m = int(np.argmax(diag))
        raise OutOfRangeDirection(
            f"direction parameter {diag[m]!r} for state {m} outside [0, 1]"
        )
    return DirectionMatrix(np.diag(diag))


def profile_from_equilibrium(rho) -> EquilibriumProfile:
    """Profile of the diagonal-subclass model with equilibrium `rho`.

    Equivalent to solving `diagonal_from_equilibrium(rho)` but built
    directly, so no linear-algebra noise enters the stored values.
    """
    rho = as_simplex(rho)
    if rho.values.min() <= 0.0:
        raise InadmissibleEquilibrium("equilibrium components must all be positive")
    pi = float(np.prod(rho.values))
    return EquilibriumProfile(
        rho=rho,
        pi=pi,
        inverse_row_sums=rho.values / pi,
        product_consistent=True,
        row_consistent=True,
        diagonal=True,
    )


def fluctuation_scalar_product(profile: EquilibriumProfile, p, m: int) -> float:
    """Scalar product (V_m, p) expressed through the frequency ratio.

    Returns pi * p_m / rho_m, the closed form valid in the diagonal
    subclass; outside it the representation is not exact and
    NotDiagonalModel is raised.
    """
    if not (profile.diagonal and profile.row_consistent):
        raise NotDiagonalModel(
            "ratio representation of the scalar product requires the "
            "diagonal subclass (diagonal and row-consistent profile)"
        )
    p = as_simplex(p)
    m = _check_state_index(m, p.n_states)
    return float(profile.pi * p.values[m] / profile.rho.values[m])
