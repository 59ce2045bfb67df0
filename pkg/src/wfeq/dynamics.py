"""Equilibrium-parameterized drift and the deterministic iteration.

With an interior equilibrium rho and its scale pi, the drift of component m
takes the closed form pi * p_m * [ sum_n p_n^2/rho_n - p_m/rho_m ] and the
normalizer 1 - pi * sum_n p_n^2/rho_n.  The bracketed average
sum_n p_n (p_n/rho_n) is the frequency-weighted mean of the ratios
p_n/rho_n: it is 1 exactly at p = rho and larger everywhere else, which is
what pushes every interior trajectory to the equilibrium.  The drift
components add to zero identically, so the iteration conserves the simplex
up to rounding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _backend
from .equilibrium import EquilibriumProfile
from .errors import (
    DegenerateNormalizer,
    NonFiniteIterate,
    ZeroMeanFitness,
)
from .model import (
    DirectionMatrix,
    SimplexVector,
    SurvivalMatrix,
    as_simplex,
    direction_transform,
    _check_state_index,
    _readonly,
)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_STEPS = 1_000_000
NORMALIZER_FLOOR = 1e-15
ZONE_TOL = 1e-9

Model = Union[SurvivalMatrix, DirectionMatrix, EquilibriumProfile]


class Zone(enum.Enum):
    """Position of one component relative to its equilibrium value."""

    PLUS = "plus"     # below equilibrium: drift pushes it up
    MINUS = "minus"   # above equilibrium: drift pushes it down
    ZERO = "zero"     # at equilibrium within tolerance


@dataclass(frozen=True)
class Trajectory:
    """Deterministic iterate sequence with convergence metadata.

    `states` holds one row per iterate, the initial state included, so
    `steps_taken == len(states) - 1`.  When `converged` is set the final
    evaluated increment was below the stopping tolerance.
    """

    states: np.ndarray
    converged: bool
    final_increment_norm: float
    steps_taken: int

    def __post_init__(self):
        object.__setattr__(
            self, "states", _readonly(np.asarray(self.states, dtype=float))
        )
        if self.states.ndim != 2 or len(self.states) != self.steps_taken + 1:
            raise ValueError("trajectory shape inconsistent with steps_taken")

    @property
    def initial(self) -> SimplexVector:
        return SimplexVector(self.states[0])

    @property
    def final(self) -> SimplexVector:
        return SimplexVector(self.states[-1])

    def __len__(self):
        return len(self.states)


# ----------------------------------------------------------------------
# pointwise quantities
# ----------------------------------------------------------------------

def mean_fluctuation(profile: EquilibriumProfile, p) -> float:
    """Frequency-weighted average of the ratios p_n / rho_n; >= 1 always."""
    p = as_simplex(p)
    r = p.values / profile.rho.values
    return float((p.values * r).sum())


def fluctuation_drift(profile: EquilibriumProfile, p, m: int) -> float:
    """Unnormalized drift of component m in equilibrium coordinates."""
    p = as_simplex(p)
    m = _check_state_index(m, p.n_states)
    ratio_m = p.values[m] / profile.rho.values[m]
    return float(profile.pi * p.values[m] * (mean_fluctuation(profile, p) - ratio_m))


def fluctuation_normalizer(
    profile: EquilibriumProfile, p, *, floor: float = NORMALIZER_FLOOR
) -> float:
    """Normalizing denominator 1 - pi * mean_fluctuation; equals 1 - pi at rho."""
    value = 1.0 - profile.pi * mean_fluctuation(profile, p)
    if value <= floor:
        raise DegenerateNormalizer(
            f"normalizer {value!r} at or below {floor!r}"
        )
    return float(value)


def balance_residual(profile: EquilibriumProfile, p) -> float:
    """Sum of all drift components; an identity puts it at zero exactly."""
    p = as_simplex(p)
    return float(
        sum(fluctuation_drift(profile, p, m) for m in range(p.n_states))
    )


def classify_zones(
    profile: EquilibriumProfile, p, tol: float = ZONE_TOL
) -> tuple[Zone, ...]:
    """Per-state position labels relative to the equilibrium."""
    p = as_simplex(p)
    labels = []
    for pm, rm in zip(p.values, profile.rho.values):
        if pm < rm - tol:
            labels.append(Zone.PLUS)
        elif pm > rm + tol:
            labels.append(Zone.MINUS)
        else:
            labels.append(Zone.ZERO)
    return tuple(labels)


def zone_sign_agreement(
    profile: EquilibriumProfile, p, tol: float = ZONE_TOL
) -> tuple[bool, ...]:
    """Whether each component's drift sign matches its zone label.

    True for the two-state model by the cubic factorization; for three or
    more states the componentwise claim can fail (the drift compares the
    ratio p_m/rho_m with the weighted mean over all states, which may sit on
    either side of 1), so this is an observable, not an invariant.
    """
    p = as_simplex(p)
    zones = classify_zones(profile, p, tol)
    out = []
    for m, zone in enumerate(zones):
        drift = fluctuation_drift(profile, p, m)
        if zone is Zone.PLUS:
            out.append(drift >= 0.0)
        elif zone is Zone.MINUS:
            out.append(drift <= 0.0)
        else:
            out.append(True)
    return tuple(out)


# ----------------------------------------------------------------------
# iteration
# ----------------------------------------------------------------------

def _raise_for_status(status: int, kind: str) -> None:
    if status == _backend.STATUS_ZERO_NORMALIZER:
        if kind == "fluctuation":
            raise DegenerateNormalizer("normalizer vanished along the trajectory")
        raise ZeroMeanFitness("mean fitness vanished along the trajectory")
    if status == _backend.STATUS_NON_FINITE:
        raise NonFiniteIterate(
            "an iterate left the simplex; the model violates the "
            "interior-equilibrium hypotheses"
        )


def iterate(
    model: Model,
    p0,
    max_steps: int = DEFAULT_MAX_STEPS,
    tol: float = DEFAULT_TOL,
    *,
    allow_boundary: bool = False,
) -> Trajectory:
    """Run the dynamics from p0 until the increment max-norm drops below tol.

    `model` is a survival matrix, a direction matrix (converted to its
    survival complement), or an equilibrium profile (equilibrium-form
    stepping).  Initial states must be interior unless `allow_boundary`;
    boundary points are fixed for the map, so iteration from them reports
    immediate convergence rather than approach to the equilibrium.
    """
    p0 = as_simplex(p0)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if not (allow_boundary or p0.is_interior()):
        raise ValueError(
            "initial state must be interior (0 < p < 1); "
            "pass allow_boundary=True to iterate from the boundary"
        )
    if isinstance(model, EquilibriumProfile):
        states, status, norm = _backend.kernels.iterate_fluctuation(
            model.rho.values, model.pi, p0.values, int(max_steps), float(tol)
        )
        _raise_for_status(status, "fluctuation")
    else:
        if isinstance(model, DirectionMatrix):
            model = direction_transform(model)
        elif not isinstance(model, SurvivalMatrix):
            model = SurvivalMatrix(model)
        states, status, norm = _backend.kernels.iterate_survival(
            model.entries, p0.values, int(max_steps), float(tol)
        )
        _raise_for_status(status, "survival")
    return Trajectory(
        states=states,
        converged=status == _backend.STATUS_CONVERGED,
        final_increment_norm=float(norm),
        steps_taken=len(states) - 1,
    )


@dataclass(frozen=True)
class BatchResult:
    """Stopping points of many equilibrium-form runs (no trajectories)."""

    finals: np.ndarray
    steps_taken: np.ndarray
    final_increment_norms: np.ndarray
    converged: np.ndarray


def iterate_batch(
    profiles: Sequence[EquilibriumProfile],
    p0s,
    max_steps: int = DEFAULT_MAX_STEPS,
    tol: float = DEFAULT_TOL,
) -> BatchResult:
    """Equilibrium-form iteration for many (profile, start) pairs at once.

    All profiles must share the state count.  Failure statuses raise, as in
    `iterate`; rows that merely hit the step budget report converged=False.
    """
    p0s = np.asarray([as_simplex(p).values for p in p0s])
    if len(profiles) != len(p0s):
        raise ValueError("profiles and starts must align")
    rhos = np.asarray([prof.rho.values for prof in profiles])
    pis = np.asarray([prof.pi for prof in profiles])
    finals, steps, norms, statuses = _backend.kernels.iterate_fluctuation_batch(
        rhos, pis, p0s, int(max_steps), float(tol)
    )
    for status in np.unique(statuses):
        if status not in (_backend.STATUS_CONVERGED, _backend.STATUS_MAX_STEPS):
            _raise_for_status(int(status), "fluctuation")
    return BatchResult(
        finals=finals,
        steps_taken=steps,
        final_increment_norms=norms,
        converged=statuses == _backend.STATUS_CONVERGED,
    )
