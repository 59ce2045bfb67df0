"""Exact-arithmetic reference implementations.

Everything here recomputes the model formulas in rational arithmetic
(`fractions.Fraction`), independently of the floating-point code paths, plus
two brute-force tools: bisection for the binary equilibrium and exhaustive
enumeration of one resampling generation.  The test suite uses these as
ground truth; the public library never imports this module.

All inputs are coerced with `Fraction(...)`, so ints, strings like "1/3",
Fractions and (exactly representable) floats are accepted.  Conversion back
to float happens only in the caller, at comparison boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, isfinite

from .errors import (
    DegenerateModel,
    NoSignChange,
    SingularDirectionMatrix,
)

MAX_ENUMERATION_POPULATION = 6


def as_vector(values):
    return tuple(Fraction(v) for v in values)


def as_matrix(rows):
    mat = tuple(tuple(Fraction(v) for v in row) for row in rows)
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    return mat


# ----------------------------------------------------------------------
# survival-form regression and drift
# ----------------------------------------------------------------------

def exact_fitness(W, p, m):
    """Per-state quadratic fitness p_m * sum_n W[m][n] p_n."""
    W, p = as_matrix(W), as_vector(p)
    return p[m] * sum(W[m][n] * p[n] for n in range(len(p)))


def exact_mean_fitness(W, p):
    W, p = as_matrix(W), as_vector(p)
    return sum(exact_fitness(W, p, m) for m in range(len(p)))


def exact_step(W, p):
    """One regression step; raises DegenerateModel on an exactly zero normalizer."""
    W, p = as_matrix(W), as_vector(p)
    total = exact_mean_fitness(W, p)
    if total == 0:
        raise DegenerateModel("mean fitness is exactly zero")
    return tuple(exact_fitness(W, p, m) / total for m in range(len(p)))


def exact_drift_numerator(W, p, m):
    """Survival-form drift numerator W_m(p) - p_m W(p)."""
    W, p = as_matrix(W), as_vector(p)
    return exact_fitness(W, p, m) - p[m] * exact_mean_fitness(W, p)


def exact_increment(W, p, m):
    """Normalized one-step increment (equals step minus current state)."""
    W, p = as_matrix(W), as_vector(p)
    total = exact_mean_fitness(W, p)
    if total == 0:
        raise DegenerateModel("mean fitness is exactly zero")
    return exact_drift_numerator(W, p, m) / total


# ----------------------------------------------------------------------
# direction-form quantities
# ----------------------------------------------------------------------

def exact_scalar_product(V, p, m):
    V, p = as_matrix(V), as_vector(p)
    return sum(V[m][n] * p[n] for n in range(len(p)))


def exact_direction_drift(V, p, m):
    """Direction-form drift numerator p_m [ sum_n p_n (V_n, p) - (V_m, p) ]."""
    V, p = as_matrix(V), as_vector(p)
    mixed = sum(p[n] * exact_scalar_product(V, p, n) for n in range(len(p)))
    return p[m] * (mixed - exact_scalar_product(V, p, m))


def exact_direction_normalizer(V, p):
    V, p = as_matrix(V), as_vector(p)
    return 1 - sum(p[n] * exact_scalar_product(V, p, n) for n in range(len(p)))


# ----------------------------------------------------------------------
# equilibrium solve (exact Gaussian elimination)
# ----------------------------------------------------------------------

def exact_inverse(V):
    """Inverse by Gauss-Jordan elimination over the rationals."""
    V = as_matrix(V)
    n = len(V)
    aug = [list(V[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularDirectionMatrix("matrix is exactly singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def exact_equilibrium(V):
    """Equilibrium frequencies and scale from the inverse direction matrix.

    Returns (rho, pi) with rho_m = pi * (row sum of V^-1) and pi fixed by
    sum(rho) = 1.  Components are returned as solved; callers decide whether a
    non-positive component disqualifies the model.
    """
    inv = exact_inverse(V)
    row_sums = tuple(sum(row) for row in inv)
    total = sum(row_sums)
    if total == 0:
        raise SingularDirectionMatrix("inverse row sums add to zero; no normalization")
    pi = 1 / total
    return tuple(pi * s for s in row_sums), pi


def exact_diagonal_from_equilibrium(rho):
    """Diagonal direction matrix whose equilibrium is the given interior rho."""
    rho = as_vector(rho)
    if any(r <= 0 for r in rho):
        raise ValueError("equilibrium components must be positive")
    if sum(rho) != 1:
        raise ValueError("equilibrium components must sum to one exactly")
    pi = prod(rho)
    n = len(rho)
    return tuple(
        tuple(pi / rho[i] if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def prod(values):
    out = Fraction(1)
    for v in values:
        out *= v
    return out


# ----------------------------------------------------------------------
# equilibrium-parameterized (fluctuation-form) quantities
# ----------------------------------------------------------------------

def exact_mean_fluctuation(rho, p):
    """Frequency-weighted average of the ratios p_n / rho_n."""
    rho, p = as_vector(rho), as_vector(p)
    return sum(p[n] * p[n] / rho[n] for n in range(len(p)))


def exact_fluctuation_drift(rho, p, m):
    """Fluctuation-form drift numerator with the frequency-weighted prefactor."""
    rho, p = as_vector(rho), as_vector(p)
    pi = prod(rho)
    return pi * p[m] * (exact_mean_fluctuation(rho, p) - p[m] / rho[m])


def exact_fluctuation_drift_equilibrium_weighted(rho, p, m):
    """Variant with prefactor pi * rho_m instead of pi * p_m.

    Kept only so tests can exhibit that this variant breaks the zero-sum
    balance identity; it is not used anywhere else.
    """
    rho, p = as_vector(rho), as_vector(p)
    pi = prod(rho)
    return pi * rho[m] * (exact_mean_fluctuation(rho, p) - p[m] / rho[m])


def exact_fluctuation_normalizer(rho, p):
    rho, p = as_vector(rho), as_vector(p)
    return 1 - prod(rho) * exact_mean_fluctuation(rho, p)


def exact_balance_residual(rho, p):
    rho, p = as_vector(rho), as_vector(p)
    return sum(exact_fluctuation_drift(rho, p, m) for m in range(len(p)))


# ----------------------------------------------------------------------
# binary model helpers
# ----------------------------------------------------------------------

def exact_binary_fitness_plus(v_plus, v_minus, p_plus):
    """W_+(p) for the two-state model, from the survival parameters."""
    v_plus, v_minus, p = Fraction(v_plus), Fraction(v_minus), Fraction(p_plus)
    w_plus = 1 - v_plus
    return p * (w_plus * p + (1 - p))


def exact_binary_fitness_plus_ratio_form(v_plus, v_minus, p_plus):
    """The same numerator written through the equilibrium ratio p_+ / rho_+.

    Valid algebraic identity: p_+(1 - V_+ p_+) = p_+(1 - pi p_+ / rho_+)
    whenever V_+ + V_- = 1 (then pi / rho_+ = V_+).
    """
    p = Fraction(p_plus)
    rho_plus, rho_minus = exact_binary_equilibrium(v_plus, v_minus)
    pi = rho_plus * rho_minus
    return p * (1 - pi * p / rho_plus)


def exact_binary_fitness_plus_swapped_index(v_plus, v_minus, p_plus):
    """Broken variant with the complementary frequency in the ratio.

    Exists only as adjudication material: it disagrees with the survival-form
    numerator except at p_+ = 1/2.
    """
    p = Fraction(p_plus)
    rho_plus, rho_minus = exact_binary_equilibrium(v_plus, v_minus)
    pi = rho_plus * rho_minus
    return p * (1 - pi * (1 - p) / rho_plus)


def exact_binary_drift(v_plus, v_minus, p_plus):
    """Two-state drift numerator p_+ p_- (V_- p_- - V_+ p_+)."""
    v_plus, v_minus, p = Fraction(v_plus), Fraction(v_minus), Fraction(p_plus)
    return p * (1 - p) * (v_minus * (1 - p) - v_plus * p)


def exact_binary_drift_cubic_coefficients(v_plus, v_minus):
    """Coefficients (c0, c1, c2, c3) of the drift as a polynomial in p_+."""
    v_plus, v_minus = Fraction(v_plus), Fraction(v_minus)
    # p(1-p)(v_minus(1-p) - v_plus p) expanded.
    c0 = Fraction(0)
    c1 = v_minus
    c2 = -2 * v_minus - v_plus
    c3 = v_minus + v_plus
    return (c0, c1, c2, c3)


def exact_binary_equilibrium(v_plus, v_minus):
    v_plus, v_minus = Fraction(v_plus), Fraction(v_minus)
    total = v_plus + v_minus
    if total == 0:
        raise NoSignChange("zero direction parameters: drift vanishes identically")
    return v_minus / total, v_plus / total


def bisection_equilibrium(v_plus, v_minus, tol=1e-12, eps=1e-9):
    """Interior root of the binary drift by plain bisection.

    Independent of the closed-form equilibrium: only evaluates the cubic
    drift numerator built from the survival-form fitnesses.
    """

    def drift(p):
        return float(exact_binary_drift(v_plus, v_minus, Fraction(p)))

    lo, hi = eps, 1.0 - eps
    f_lo, f_hi = drift(lo), drift(hi)
    if not (isfinite(f_lo) and isfinite(f_hi)) or f_lo * f_hi > 0 or (f_lo == 0 and f_hi == 0):
        raise NoSignChange("drift does not change sign on the interior interval")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = drift(mid)
        if f_mid == 0:
            return mid
        if f_lo * f_mid < 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# exhaustive enumeration of one resampling generation
# ----------------------------------------------------------------------

def compositions(total, parts):
    """All tuples of `parts` non-negative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for cut in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def multinomial_pmf(counts, probs):
    coef = Fraction(1)
    remaining = sum(counts)
    for c in counts:
        coef *= comb(remaining, c)
        remaining -= c
    weight = Fraction(1)
    for c, q in zip(counts, probs):
        if c > 0:
            weight *= q ** c
        # q == 0 with c == 0 contributes a factor 1
    return coef * weight


def enumerate_generation(W, counts):
    """Exact distribution of next-generation counts under the sampled model.

    Returns a dict mapping count tuples to exact probabilities.  Restricted
    to tiny populations; the state space grows like C(N+M, M).
    """
    counts = tuple(int(c) for c in counts)
    n_total = sum(counts)
    if n_total > MAX_ENUMERATION_POPULATION:
        raise ValueError(
            f"population {n_total} too large to enumerate "
            f"(limit {MAX_ENUMERATION_POPULATION})"
        )
    p = tuple(Fraction(c, n_total) for c in counts)
    q = exact_step(W, p)
    dist = {}
    for outcome in compositions(n_total, len(counts)):
        prob = multinomial_pmf(outcome, q)
        if prob != 0:
            dist[outcome] = prob
    return dist


def enumeration_moments(W, counts):
    """Exact conditional mean of next frequencies and second moment of the noise.

    Returns (mean, second_moment) where mean[m] = E[S'_m | counts] and
    second_moment[m] = E[(S'_m - V_m)^2 | counts], both tuples of Fractions.
    """
    counts = tuple(int(c) for c in counts)
    n_total = sum(counts)
    p = tuple(Fraction(c, n_total) for c in counts)
    predictable = exact_step(W, p)
    dist = enumerate_generation(W, counts)
    dim = len(counts)
    mean = [Fraction(0)] * dim
    second = [Fraction(0)] * dim
    for outcome, prob in dist.items():
        for m in range(dim):
            freq = Fraction(outcome[m], n_total)
            mean[m] += prob * freq
            second[m] += prob * (freq - predictable[m]) ** 2
    return tuple(mean), tuple(second)


# ----------------------------------------------------------------------
# adjudication of the conflicting printed formula variants
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Adjudication:
    """Outcome of comparing two formula variants against the defining form.

    `witness` holds the concrete inputs; `reference` the value obtained from
    the defining (survival- or direction-form) expression; `implemented` and
    `variant` the two candidate closed forms evaluated at the witness.
    """

    witness: dict
    reference: object
    implemented: object
    variant: object

    @property
    def implemented_matches(self):
        return self.implemented == self.reference

    @property
    def variant_matches(self):
        return self.variant == self.reference


def adjudicate_drift_prefactor(rho, p, m=0):
    """Frequency-weighted vs equilibrium-weighted prefactor in the drift.

    The defining value is the direction-form drift of the diagonal matrix
    realizing `rho`.  Exact agreement selects the frequency-weighted form.
    """
    rho, p = as_vector(rho), as_vector(p)
    V = exact_diagonal_from_equilibrium(rho)
    reference = exact_direction_drift(V, p, m)
    return Adjudication(
        witness={"rho": rho, "p": p, "m": m},
        reference=reference,
        implemented=exact_fluctuation_drift(rho, p, m),
        variant=exact_fluctuation_drift_equilibrium_weighted(rho, p, m),
    )


def adjudicate_binary_ratio_index(v_plus, v_minus, p_plus):
    """Own-frequency vs complementary-frequency ratio in the binary fitness.

    Requires v_plus + v_minus == 1, the regime in which the ratio form is an
    identity at all; the defining value is the survival-form fitness.
    """
    v_plus, v_minus = Fraction(v_plus), Fraction(v_minus)
    if v_plus + v_minus != 1:
        raise ValueError("ratio form applies under v_plus + v_minus == 1")
    reference = exact_binary_fitness_plus(v_plus, v_minus, p_plus)
    return Adjudication(
        witness={"v_plus": v_plus, "v_minus": v_minus, "p_plus": Fraction(p_plus)},
        reference=reference,
        implemented=exact_binary_fitness_plus_ratio_form(v_plus, v_minus, p_plus),
        variant=exact_binary_fitness_plus_swapped_index(v_plus, v_minus, p_plus),
    )


def adjudicate_binary_equilibrium(v_plus, v_minus):
    """Closed-form equilibrium vs the reciprocal-of-direction variant.

    The defining condition is a vanishing drift, so the record stores the
    exact drift evaluated at both candidate points (the reciprocal variant
    1/V_+ exceeds 1 for direction parameters in (0, 1), but the cubic is
    still evaluable there).  A bisection root rides along in the witness as
    independent confirmation of the interior root's location.
    """
    v_plus, v_minus = Fraction(v_plus), Fraction(v_minus)
    rho_plus, _ = exact_binary_equilibrium(v_plus, v_minus)
    reciprocal = 1 / v_plus
    return Adjudication(
        witness={
            "v_plus": v_plus,
            "v_minus": v_minus,
            "candidate_implemented": rho_plus,
            "candidate_variant": reciprocal,
            "bisection_root": bisection_equilibrium(v_plus, v_minus),
            "variant_in_unit_interval": 0 <= reciprocal <= 1,
        },
        reference=Fraction(0),
        implemented=exact_binary_drift(v_plus, v_minus, rho_plus),
        variant=exact_binary_drift(v_plus, v_minus, reciprocal),
    )
