"""Pure-NumPy implementations of the inner loops.

Mirror of the compiled module `wfeq._kernels`; same functions, same status
codes, same stepping order (step, convergence test, bounds test,
renormalize).  Selected by `wfeq._backend` when the extension is absent or
when WFEQ_BACKEND=python.
"""

from __future__ import annotations

import numpy as np

COMPILED = False

STATUS_CONVERGED = 0
STATUS_MAX_STEPS = 1
STATUS_ZERO_NORMALIZER = 2
STATUS_NON_FINITE = 3

BOUND_TOL = 1e-9


def _finish(states, status, norm):
    return np.array(states, dtype=float), int(status), float(norm)


def iterate_survival(W, p0, max_steps, tol, fitness_floor=1e-15):
    """Iterate the survival-form regression map, recording every state.

    Returns (states, status, final_norm): states has one row per iterate
    including the start, status is one of the STATUS_* codes, final_norm the
    max-abs increment at the last evaluation.
    """
    W = np.asarray(W, dtype=float)
    p = np.asarray(p0, dtype=float).copy()
    states = [p.copy()]
    status = STATUS_MAX_STEPS
    norm = np.inf
    for _ in range(int(max_steps)):
        per_state = p * (W * p).sum(axis=1)
        total = per_state.sum()
        if not np.isfinite(total) or total <= fitness_floor:
            status = STATUS_ZERO_NORMALIZER
            break
        q = per_state / total
        norm = np.abs(q - p).max()
        if norm < tol:
            status = STATUS_CONVERGED
            break
        if not np.all(np.isfinite(q)) or q.min() < -BOUND_TOL or q.max() > 1.0 + BOUND_TOL:
            status = STATUS_NON_FINITE
            break
        p = q / q.sum()
        states.append(p.copy())
    return _finish(states, status, norm)


def iterate_fluctuation(rho, pi, p0, max_steps, tol, normalizer_floor=1e-15):
    """Iterate the equilibrium-parameterized map, recording every state."""
    rho = np.asarray(rho, dtype=float)
    inv_rho = 1.0 / rho
    p = np.asarray(p0, dtype=float).copy()
    states = [p.copy()]
    status = STATUS_MAX_STEPS
    norm = np.inf
    for _ in range(int(max_steps)):
        ratio = p * inv_rho
        weighted = (p * ratio).sum()
        normalizer = 1.0 - pi * weighted
        if not np.isfinite(normalizer) or normalizer <= normalizer_floor:
            status = STATUS_ZERO_NORMALIZER
            break
        delta = pi * p * (weighted - ratio) / normalizer
        norm = np.abs(delta).max()
        if norm < tol:
            status = STATUS_CONVERGED
            break
        q = p + delta
        if not np.all(np.isfinite(q)) or q.min() < -BOUND_TOL or q.max() > 1.0 + BOUND_TOL:
            status = STATUS_NON_FINITE
            break
        p = q / q.sum()
        states.append(p.copy())
    return _finish(states, status, norm)


def iterate_fluctuation_batch(rhos, pis, p0s, max_steps, tol, normalizer_floor=1e-15):
    """Run many equilibrium-parameterized iterations to their stopping points.

    rhos, p0s: (R, d) arrays; pis: (R,).  Trajectories are not recorded.
    Returns (finals, steps, norms, statuses), each with leading dimension R.

    Vectorized across rows and tuned for long runs: the per-step arithmetic
    reproduces `iterate_fluctuation` bit for bit (same operation order), and
    per-row stopping events are detected with scalar reductions so the
    common no-event iteration touches no boolean masks.  Rows are compacted
    away as they stop.
    """
    rhos = np.asarray(rhos, dtype=float)
    pis = np.asarray(pis, dtype=float)
    P = np.asarray(p0s, dtype=float).copy()
    n_rows = P.shape[0]

    finals = P.copy()
    steps = np.zeros(n_rows, dtype=np.int64)
    norms = np.full(n_rows, np.inf)
    statuses = np.full(n_rows, STATUS_MAX_STEPS, dtype=np.int64)

    index = np.arange(n_rows)
    inv_rho = 1.0 / rhos
    max_steps = int(max_steps)

    ratio = np.empty_like(P)
    delta = np.empty_like(P)
    work = np.empty_like(P)
    weighted = np.empty(n_rows)
    normalizer = np.empty(n_rows)
    scale = np.empty(n_rows)
    row_norm = np.full(n_rows, np.inf)
    prev_norm = np.full(n_rows, np.inf)

    k = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        while k < max_steps and index.size:
            np.multiply(P, inv_rho, out=ratio)
            np.multiply(P, ratio, out=work)
            work.sum(axis=1, out=weighted)
            np.multiply(pis, weighted, out=normalizer)
            np.subtract(1.0, normalizer, out=normalizer)

            # delta = ((pi * p) * (weighted - ratio)) / normalizer, same
            # association as the single-run reference
            np.multiply(pis[:, None], P, out=delta)
            np.subtract(weighted[:, None], ratio, out=work)
            np.multiply(delta, work, out=delta)
            np.divide(delta, normalizer[:, None], out=delta)
            np.abs(delta, out=work)
            work.max(axis=1, out=row_norm)

            # scalar short-circuits; every comparison is False under NaN,
            # which routes any pathology through the slow path below
            if row_norm.min() >= tol and normalizer.min() > normalizer_floor:
                np.add(P, delta, out=work)  # candidate next states
                q_min, q_max = work.min(), work.max()
                if q_min >= -BOUND_TOL and q_max <= 1.0 + BOUND_TOL:
                    work.sum(axis=1, out=scale)
                    np.divide(work, scale[:, None], out=P)
                    prev_norm, row_norm = row_norm, prev_norm
                    k += 1
                    continue

            # slow path: at least one row stops at this iteration
            dead = ~np.isfinite(normalizer) | (normalizer <= normalizer_floor)
            converged = ~dead & (row_norm < tol)
            candidate = P + delta
            bad = ~dead & ~converged & (
                ~np.all(np.isfinite(candidate), axis=1)
                | (candidate.min(axis=1) < -BOUND_TOL)
                | (candidate.max(axis=1) > 1.0 + BOUND_TOL)
            )
            stopping = dead | converged | bad
            rows = index[stopping]
            finals[rows] = P[stopping]
            steps[rows] = k
            # a dead normalizer is detected before the increment in the
            # reference, so those rows keep their previous evaluation
            norms[rows] = np.where(
                dead[stopping], prev_norm[stopping], row_norm[stopping]
            )
            statuses[rows] = np.where(
                dead[stopping],
                STATUS_ZERO_NORMALIZER,
                np.where(converged[stopping], STATUS_CONVERGED, STATUS_NON_FINITE),
            )
            keep = ~stopping
            index = index[keep]
            if index.size == 0:
                break
            inv_rho, pis = inv_rho[keep], pis[keep]
            candidate = candidate[keep]
            P = candidate / candidate.sum(axis=1, keepdims=True)
            n_active = index.size
            ratio = np.empty_like(P)
            delta = np.empty_like(P)
            work = np.empty_like(P)
            weighted = np.empty(n_active)
            normalizer = np.empty(n_active)
            scale = np.empty(n_active)
            prev_norm = row_norm[keep].copy()
            row_norm = np.empty(n_active)
            k += 1

    if index.size:
        # rows that exhausted the budget: keep their last evaluated increment
        finals[index] = P
        steps[index] = max_steps
        norms[index] = prev_norm
    return finals, steps, norms, statuses


def simulate_replica(bit_generator, W, counts0, steps, fitness_floor=1e-15):
    """One finite-population path: regression step then categorical resampling.

    Returns (counts, predictable, status): counts is (k+1, d) int64 with the
    initial state first, predictable is (k, d) float64 with the conditional
    next-generation frequencies for each step taken.  Stops early with
    STATUS_ZERO_NORMALIZER if the regression map degenerates.
    """
    rng = np.random.Generator(bit_generator)
    W = np.asarray(W, dtype=float)
    counts = np.asarray(counts0, dtype=np.int64).copy()
    n_total = int(counts.sum())
    steps = int(steps)
    dim = counts.size

    path = np.empty((steps + 1, dim), dtype=np.int64)
    predictable = np.empty((steps, dim), dtype=float)
    path[0] = counts
    status = STATUS_CONVERGED  # completed all requested steps
    taken = 0
    for k in range(steps):
        p = counts / n_total
        per_state = p * (W * p).sum(axis=1)
        total = per_state.sum()
        if not np.isfinite(total) or total <= fitness_floor:
            status = STATUS_ZERO_NORMALIZER
            break
        q = per_state / total
        predictable[k] = q
        counts = rng.multinomial(n_total, q)
        path[k + 1] = counts
        taken = k + 1
    return path[: taken + 1], predictable[:taken], status
