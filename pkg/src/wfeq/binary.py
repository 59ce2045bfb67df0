"""Closed forms for the two-state process.

Everything reduces to the single frequency p_+ (p_- = 1 - p_+).  The drift
numerator factors exactly as -(V_+ + V_-) * p_+ p_- (p_+ - rho_+): a cubic
in p_+ with roots at the two vertices and at the interior equilibrium
rho_+ = V_- / (V_+ + V_-).  Under the normalization V_+ + V_- = 1 the
leading factor drops and rho_+ = V_-; the general parameterization keeps
the explicit factor so the forms here agree with the two-state instance of
the full model for every parameter choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory, iterate
from .errors import DegenerateNormalizer
from .model import SurvivalMatrix


def binary_equilibrium(v_plus: float, v_minus: float) -> tuple[float, float]:
    """Interior equilibrium (rho_+, rho_-) from the direction parameters."""
    if not (0.0 < v_plus < 1.0 and 0.0 < v_minus < 1.0):
        raise ValueError("direction parameters must lie in (0, 1)")
    total = v_plus + v_minus
    return v_minus / total, v_plus / total


@dataclass(frozen=True)
class BinaryModel:
    """Two-state model; direction parameters and equilibrium are derived."""

    w_plus: float
    w_minus: float
    v_plus: float = field(init=False)
    v_minus: float = field(init=False)
    rho_plus: float = field(init=False)
    rho_minus: float = field(init=False)
    pi: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.w_plus < 1.0 and 0.0 < self.w_minus < 1.0):
            raise ValueError("survival parameters must lie strictly in (0, 1)")
        object.__setattr__(self, "v_plus", 1.0 - self.w_plus)
        object.__setattr__(self, "v_minus", 1.0 - self.w_minus)
        rho_p, rho_m = binary_equilibrium(self.v_plus, self.v_minus)
        object.__setattr__(self, "rho_plus", rho_p)
        object.__setattr__(self, "rho_minus", rho_m)
        object.__setattr__(self, "pi", rho_p * rho_m)

    @classmethod
    def from_direction(cls, v_plus: float, v_minus: float) -> "BinaryModel":
        return cls(w_plus=1.0 - v_plus, w_minus=1.0 - v_minus)

    @property
    def normalized(self) -> bool:
        """Whether the direction parameters add to one (the reduced regime)."""
        return abs(self.v_plus + self.v_minus - 1.0) <= 1e-12

    def survival_matrix(self) -> SurvivalMatrix:
        """The equivalent two-state instance of the full model."""
        return SurvivalMatrix([[self.w_plus, 1.0], [1.0, self.w_minus]])


def _check_p(p_plus: float) -> float:
    p = float(p_plus)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p_plus = {p!r} outside [0, 1]")
    return p


def binary_normalizer(model: BinaryModel, p_plus: float) -> float:
    """Mean fitness W_+ p_+^2 + 2 p_+ p_- + W_- p_-^2."""
    p = _check_p(p_plus)
    q = 1.0 - p
    return model.w_plus * p * p + 2.0 * p * q + model.w_minus * q * q


def binary_step(model: BinaryModel, p_plus: float) -> float:
    """Next-generation frequency of the plus state."""
    p = _check_p(p_plus)
    q = 1.0 - p
    total = binary_normalizer(model, p)
    if total <= 1e-15:
        # unreachable for survival parameters in (0, 1): the normalizer is
        # bounded below by min(w_plus, w_minus) on the whole interval
        raise DegenerateNormalizer(f"normalizer {total!r} vanished")
    return p * (model.w_plus * p + q) / total


def binary_drift(model: BinaryModel, p_plus: float) -> float:
    """Unnormalized drift of p_+: the cubic -(V_+ + V_-) p_+ p_- (p_+ - rho_+).

    Divide by `binary_normalizer` for the full one-step increment.
    """
    p = _check_p(p_plus)
    q = 1.0 - p
    return -(model.v_plus + model.v_minus) * p * q * (p - model.rho_plus)


def binary_trajectory(
    model: BinaryModel,
    p0_plus: float,
    max_steps: int = 1_000_000,
    tol: float = 1e-10,
) -> Trajectory:
    """Iterate the two-state dynamics via the general machinery."""
    p0 = _check_p(p0_plus)
    return iterate(
        model.survival_matrix(),
        np.array([p0, 1.0 - p0]),
        max_steps=max_steps,
        tol=tol,
        allow_boundary=not (0.0 < p0 < 1.0),
    )
