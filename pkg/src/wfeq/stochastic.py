"""Finite-population sampling layer over the deterministic dynamics.

A population of N individuals occupies the M+1 states; its frequency vector
steps by drawing N independent offspring from the regression-mapped
frequencies (multinomial resampling).  Each observed transition then splits
exactly into a predictable part, the regression step itself, plus a noise
term with zero conditional mean.  The per-state noise has conditional
variance V_m(p)(1 - V_m(p)) / N, a categorical variance shrunk by the
population size.

Reproducibility: every replica draws from its own PCG64 stream derived from
(seed, stream_id, replica), so runs are bit-stable regardless of scheduling
and replicas never share generator state.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ZeroMeanFitness
from .model import (
    SimplexVector,
    as_simplex,
    as_survival,
    regression_step,
    _check_state_index,
    _readonly,
)


@dataclass(frozen=True)
class RandomSeed:
    """Root seed plus a stream id separating independent experiments.

    Identical (seed, stream_id) reproduce identical draws bit-for-bit;
    replicas get child streams via `bit_generator(replica)`.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.stream_id) < 0:
            raise ValueError("stream_id must be non-negative")

    def bit_generator(self, replica: int = 0) -> np.random.PCG64:
        ss = np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_id), int(replica))
        )
        return np.random.PCG64(ss)

    def generator(self, replica: int = 0) -> np.random.Generator:
        return np.random.Generator(self.bit_generator(replica))


@dataclass(frozen=True)
class PopulationState:
    """Integer occupation counts of the M+1 states, totalling N."""

    counts: np.ndarray
    population_size: int

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64).copy()
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("counts must be a vector over at least two states")
        if arr.min() < 0:
            raise ValueError("counts must be non-negative")
        n = int(self.population_size)
        if n < 1:
            raise ValueError("population size must be at least 1")
        if int(arr.sum()) != n:
            raise ValueError(f"counts sum to {int(arr.sum())}, expected {n}")
        object.__setattr__(self, "counts", _readonly(arr))
        object.__setattr__(self, "population_size", n)

    @classmethod
    def from_counts(cls, counts) -> "PopulationState":
        arr = np.asarray(counts, dtype=np.int64)
        return cls(counts=arr, population_size=int(arr.sum()))

    @property
    def frequencies(self) -> SimplexVector:
        return SimplexVector(self.counts / self.population_size)

    @property
    def n_states(self) -> int:
        return self.counts.size


@dataclass(frozen=True)
class MartingaleRecord:
    """One transition split into its predictable part and the noise."""

    predictable: SimplexVector
    realized: SimplexVector
    delta_mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "delta_mu", _readonly(np.asarray(self.delta_mu, dtype=float).copy())
        )


def predictable_component(W, state: PopulationState) -> SimplexVector:
    """Conditional expectation of the next frequency vector."""
    return regression_step(W, state.frequencies)


def sample_next_generation(
    W, state: PopulationState, rng: np.random.Generator
) -> PopulationState:
    """Resample N offspring from the regression-mapped frequencies."""
    q = predictable_component(W, state)
    counts = rng.multinomial(state.population_size, q.values)
    return PopulationState(counts=counts, population_size=state.population_size)


def martingale_difference(
    predictable, realized: PopulationState
) -> MartingaleRecord:
    """Noise term of one observed transition.

    The difference of two simplex vectors, so the components add to zero.
    """
    predictable = as_simplex(predictable)
    freqs = realized.frequencies
    if predictable.n_states != freqs.n_states:
        raise ValueError("predictable vector and realized state differ in dimension")
    return MartingaleRecord(
        predictable=predictable,
        realized=freqs,
        delta_mu=freqs.values - predictable.values,
    )


def conditional_dispersion(W, p, m: int) -> float:
    """Per-individual categorical variance V_m(p)(1 - V_m(p)).

    The variance of the averaged noise component is this divided by N.
    """
    p = as_simplex(p)
    m = _check_state_index(m, p.n_states)
    v = regression_step(W, p).values[m]
    return float(v * (1.0 - v))


def sample_transitions(
    W, state: PopulationState, n_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Many independent one-step transitions from the same state.

    Returns an (n_samples, M+1) int64 array of next-generation counts; used
    for conditional-moment checks, where the conditioning state stays fixed.
    """
    q = predictable_component(W, state)
    return rng.multinomial(state.population_size, q.values, size=int(n_samples))


@dataclass(frozen=True)
class MomentSummary:
    """Noise moments pooled over steps, one entry per state.

    `predicted_var` averages the per-step conditional variances
    sigma_m^2(p)/N over the same steps the empirical moments pool, so the
    comparison respects the conditional form of the variance law.
    """

    empirical_mean_dmu: np.ndarray
    empirical_var_dmu: np.ndarray
    predicted_var: np.ndarray
    n_samples: int

    def as_records(self) -> list[dict]:
        return [
            {
                "m": m,
                "empirical_mean_dmu": float(self.empirical_mean_dmu[m]),
                "empirical_var_dmu": float(self.empirical_var_dmu[m]),
                "predicted_var": float(self.predicted_var[m]),
                "n_samples": self.n_samples,
            }
            for m in range(len(self.empirical_mean_dmu))
        ]


@dataclass(frozen=True)
class SimulationResult:
    """Sampled paths of all replicas plus per-step predictable components.

    `counts` has shape (replicas, steps+1, M+1) and `predictable`
    (replicas, steps, M+1); `delta_mu()` recovers the noise increments and
    `record(replica, k)` a single transition's decomposition.
    """

    counts: np.ndarray
    predictable: np.ndarray
    population_size: int
    seed: RandomSeed

    @property
    def n_replicas(self) -> int:
        return self.counts.shape[0]

    @property
    def n_steps(self) -> int:
        return self.counts.shape[1] - 1

    def delta_mu(self) -> np.ndarray:
        return self.counts[:, 1:, :] / self.population_size - self.predictable

    def record(self, replica: int, k: int) -> MartingaleRecord:
        realized = PopulationState(
            counts=self.counts[replica, k + 1], population_size=self.population_size
        )
        return martingale_difference(
            SimplexVector(self.predictable[replica, k]), realized
        )

    def moment_summary(self) -> MomentSummary:
        dmu = self.delta_mu().reshape(-1, self.counts.shape[2])
        pred = self.predictable.reshape(-1, self.counts.shape[2])
        sigma_sq = pred * (1.0 - pred)
        return MomentSummary(
            empirical_mean_dmu=dmu.mean(axis=0),
            empirical_var_dmu=(dmu * dmu).mean(axis=0),
            predicted_var=(sigma_sq / self.population_size).mean(axis=0),
            n_samples=dmu.shape[0],
        )


def _run_replica(W_entries, counts0, steps, bit_generator):
    path, predictable, status = _backend.kernels.simulate_replica(
        bit_generator, W_entries, counts0, int(steps)
    )
    if status == _backend.STATUS_ZERO_NORMALIZER:
        raise ZeroMeanFitness(
            "mean fitness vanished along a sampled path; model degenerate"
        )
    return path, predictable


def simulate_paths(
    W,
    initial: PopulationState,
    steps: int,
    replicas: int,
    seed: RandomSeed,
    *,
    jobs: int | None = None,
) -> SimulationResult:
    """Independent replicas of the sampled dynamics from a common start.

    Replica r draws from the stream (seed, stream_id, r), so results do not
    depend on `jobs` (the thread pool size) or on completion order.
    """
    W = as_survival(W)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if replicas < 1:
        raise ValueError("replicas must be at least 1")
    counts0 = np.asarray(initial.counts, dtype=np.int64)

    def run(replica: int):
        return _run_replica(W.entries, counts0, steps, seed.bit_generator(replica))

    if jobs is not None and jobs < 1:
        raise ValueError("jobs must be at least 1 when given")
    if jobs == 1 or replicas == 1:
        results = [run(r) for r in range(replicas)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, range(replicas)))

    all_counts = np.stack([path for path, _ in results])
    all_pred = np.stack([pred for _, pred in results])
    return SimulationResult(
        counts=_readonly(all_counts),
        predictable=_readonly(all_pred),
        population_size=initial.population_size,
        seed=seed,
    )
