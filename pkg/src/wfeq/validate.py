"""Self-checks runnable against any model file.

Each check evaluates an algebraic identity of the dynamics at a batch of
probe states (structured points plus seeded random draws) and reports the
worst residual against a fixed threshold.  Scalar identities use relative
error; vector identities measure the difference in max-norm relative to the
larger vector's max-norm, so near-zero individual components do not inflate
the ratio.  Consistency flags of the solved equilibrium are informational,
not pass/fail: they characterize the model subclass.
"""

from __future__ import annotations

import numpy as np

from .dynamics import balance_residual, fluctuation_drift
from .equilibrium import profile_from_equilibrium, solve_equilibrium
from .errors import InadmissibleEquilibrium, SingularDirectionMatrix
from .model import (
    SimplexVector,
    direction_normalizer,
    direction_transform,
    drift_direction_form,
    drift_numerator,
    increment_drift,
    mean_fitness,
    regression_step,
)
from .modelio import ModelSpec

PATH_EQUIVALENCE_TOL = 1e-13
ZERO_SUM_TOL = 1e-13
SIMPLEX_SUM_TOL = 1e-12
FIXED_POINT_TOL = 1e-12
BALANCE_TOL = 1e-13
ROUNDTRIP_TOL = 1e-10


def vector_relative_error(a, b) -> float:
    """Max-norm difference relative to the larger max-norm, floored at one.

    Every model quantity here (frequency, fitness, drift) is bounded by 1,
    so the floor makes the measure an honest relative error at that natural
    scale while staying meaningful where an identity cancels to ~0 (a pure
    output-relative ratio explodes there for any floating-point evaluation).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.abs(a).max(), np.abs(b).max(), 1.0)
    return float(np.abs(a - b).max() / scale)


def relative_error(a: float, b: float) -> float:
    """Scalar counterpart of `vector_relative_error`, same unit floor."""
    scale = max(abs(a), abs(b), 1.0)
    return abs(a - b) / scale


def probe_states(dim: int, n_points: int, seed: int) -> list[SimplexVector]:
    """Structured probes plus seeded random interior and boundary states."""
    rng = np.random.Generator(np.random.PCG64(seed))
    points = [SimplexVector.uniform(dim)]
    skew = np.full(dim, 0.5 / (dim - 1))
    skew[0] = 0.5
    points.append(SimplexVector(skew))
    if dim > 2:
        edge = np.zeros(dim)
        edge[0], edge[1] = 0.7, 0.3
        points.append(SimplexVector(edge))  # boundary: absorbing components
    for _ in range(n_points):
        points.append(SimplexVector(rng.dirichlet(np.ones(dim))))
    return points


def run_validation(spec: ModelSpec, n_points: int = 25, seed: int = 0) -> dict:
    if spec.kind == "rho":
        from .equilibrium import diagonal_from_equilibrium

        direction = diagonal_from_equilibrium(spec.rho)
        survival = direction_transform(direction)
    elif spec.kind == "V":
        direction = spec.direction
        survival = direction_transform(direction)
    else:
        survival = spec.survival
        direction = direction_transform(survival)

    dim = survival.n_states
    candidates = probe_states(dim, n_points, seed)
    # keep only states where the map is defined; a valid model loses none
    points = [p for p in candidates if mean_fitness(survival, p) > 1e-15]
    checks: list[dict] = []
    if not points:
        return {
            "model_kind": spec.kind,
            "n_states": dim,
            "probe_points": 0,
            "checks": [
                {
                    "name": "map_defined",
                    "residual": 1.0,
                    "threshold": 0.0,
                    "passed": False,
                }
            ],
            "equilibrium": None,
        }

    def add_check(name: str, residual: float, threshold: float):
        checks.append(
            {
                "name": name,
                "residual": float(residual),
                "threshold": threshold,
                "passed": bool(residual <= threshold),
            }
        )

    # drift written through survival vs direction parameters
    worst = 0.0
    for p in points:
        w_form = [drift_numerator(survival, p, m) for m in range(dim)]
        v_form = [drift_direction_form(direction, p, m) for m in range(dim)]
        worst = max(worst, vector_relative_error(w_form, v_form))
    add_check("drift_path_equivalence", worst, PATH_EQUIVALENCE_TOL)

    # the two normalizer expressions
    worst = max(
        relative_error(mean_fitness(survival, p), direction_normalizer(direction, p))
        for p in points
    )
    add_check("normalizer_equivalence", worst, PATH_EQUIVALENCE_TOL)

    # step-minus-state identity for the normalized increment
    worst = 0.0
    for p in points:
        stepped = regression_step(survival, p).values - p.values
        inc = [increment_drift(survival, p, m) for m in range(dim)]
        worst = max(worst, vector_relative_error(stepped, inc))
    add_check("increment_identity", worst, PATH_EQUIVALENCE_TOL)

    # drift components add to zero
    worst = max(
        abs(sum(drift_numerator(survival, p, m) for m in range(dim)))
        for p in points
    )
    add_check("zero_sum_drift", worst, ZERO_SUM_TOL)

    # step stays on the simplex
    worst = max(
        abs(regression_step(survival, p).values.sum() - 1.0) for p in points
    )
    add_check("step_simplex_sum", worst, SIMPLEX_SUM_TOL)

    # zero frequencies stay zero
    worst = 0.0
    for p in points:
        zero_mask = p.values == 0.0
        if zero_mask.any():
            worst = max(
                worst, np.abs(regression_step(survival, p).values[zero_mask]).max()
            )
    add_check("boundary_absorption", worst, 0.0)

    equilibrium_info: dict | None
    try:
        profile = (
            profile_from_equilibrium(spec.rho)
            if spec.kind == "rho"
            else solve_equilibrium(direction)
        )
    except (SingularDirectionMatrix, InadmissibleEquilibrium) as exc:
        profile = None
        equilibrium_info = {"error": f"{type(exc).__name__}: {exc}"}
    if profile is not None:
        equilibrium_info = {
            "rho": profile.rho.values.tolist(),
            "pi": profile.pi,
            "product_consistent": profile.product_consistent,
            "row_consistent": profile.row_consistent,
            "diagonal": profile.diagonal,
        }
        worst = max(
            abs(drift_direction_form(direction, profile.rho, m)) for m in range(dim)
        )
        add_check("equilibrium_fixed_point", worst, FIXED_POINT_TOL)
        if profile.diagonal and profile.row_consistent:
            worst = max(abs(balance_residual(profile, p)) for p in points)
            add_check("fluctuation_balance", worst, BALANCE_TOL)
            worst = max(
                vector_relative_error(
                    [fluctuation_drift(profile, p, m) for m in range(dim)],
                    [drift_direction_form(direction, p, m) for m in range(dim)],
                )
                for p in points
            )
            add_check("fluctuation_form_equivalence", worst, PATH_EQUIVALENCE_TOL)
            recovered = solve_equilibrium(direction).rho.values
            add_check(
                "equilibrium_roundtrip",
                np.abs(recovered - profile.rho.values).max(),
                ROUNDTRIP_TOL,
            )

    return {
        "model_kind": spec.kind,
        "n_states": dim,
        "probe_points": len(points),
        "checks": checks,
        "equilibrium": equilibrium_info,
    }
