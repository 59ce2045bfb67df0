# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops: deterministic iteration and finite-population sampling.

Behavioral contract is defined by the reference module `wfeq._kernels_py`;
this module must match it (same status codes, same stepping order).  The
multinomial draws call the same C routine the NumPy Generator uses, so a
given bit-generator state yields the same counts here as in pure Python
whenever the probability vectors are bitwise equal.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport INFINITY, fabs, isfinite
from libc.string cimport memset
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport binomial_t, random_multinomial

cnp.import_array()

COMPILED = True

STATUS_CONVERGED = 0
STATUS_MAX_STEPS = 1
STATUS_ZERO_NORMALIZER = 2
STATUS_NON_FINITE = 3

cdef double BOUND_TOL = 1e-9

cdef enum:
    C_CONVERGED = 0
    C_MAX_STEPS = 1
    C_ZERO_NORMALIZER = 2
    C_NON_FINITE = 3


cdef class _Trace:
    """Growable (k, d) float64 row store."""

    cdef object block
    cdef double[:, ::1] view
    cdef Py_ssize_t used, cap, dim

    def __cinit__(self, Py_ssize_t dim):
        self.dim = dim
        self.cap = 1024
        self.used = 0
        self.block = np.empty((self.cap, dim), dtype=np.float64)
        self.view = self.block

    cdef void push(self, double* row):
        cdef Py_ssize_t j
        if self.used == self.cap:
            self.cap *= 2
            grown = np.empty((self.cap, self.dim), dtype=np.float64)
            grown[: self.used] = self.block[: self.used]
            self.block = grown
            self.view = self.block
        for j in range(self.dim):
            self.view[self.used, j] = row[j]
        self.used += 1

    cdef object take(self):
        return self.block[: self.used].copy()


def iterate_survival(const double[:, ::1] W, const double[::1] p0, long max_steps,
                     double tol, double fitness_floor=1e-15):
    cdef Py_ssize_t d = p0.shape[0]
    cdef double[::1] p_mv = np.array(p0, dtype=np.float64)
    cdef double[::1] q_mv = np.empty(d, dtype=np.float64)
    cdef double* p = &p_mv[0]
    cdef double* q = &q_mv[0]
    cdef _Trace trace = _Trace(d)
    cdef int status = C_MAX_STEPS
    cdef double norm = INFINITY
    cdef double total, row, delta, qsum
    cdef Py_ssize_t m, n
    cdef long k
    cdef bint bad

    trace.push(p)
    for k in range(max_steps):
        total = 0.0
        for m in range(d):
            row = 0.0
            for n in range(d):
                row += W[m, n] * p[n]
            q[m] = p[m] * row
            total += q[m]
        if not isfinite(total) or total <= fitness_floor:
            status = C_ZERO_NORMALIZER
            break
        norm = 0.0
        qsum = 0.0
        bad = False
        for m in range(d):
            q[m] = q[m] / total
            qsum += q[m]
            delta = fabs(q[m] - p[m])
            if delta > norm:
                norm = delta
        if norm < tol:
            status = C_CONVERGED
            break
        for m in range(d):
            if not isfinite(q[m]) or q[m] < -BOUND_TOL or q[m] > 1.0 + BOUND_TOL:
                bad = True
        if bad:
            status = C_NON_FINITE
            break
        for m in range(d):
            p[m] = q[m] / qsum
        trace.push(p)
    return trace.take(), status, norm


def iterate_fluctuation(const double[::1] rho, double pi, const double[::1] p0,
                        long max_steps, double tol,
                        double normalizer_floor=1e-15):
    cdef Py_ssize_t d = p0.shape[0]
    cdef double[::1] p_mv = np.array(p0, dtype=np.float64)
    cdef double[::1] q_mv = np.empty(d, dtype=np.float64)
    cdef double[::1] ratio_mv = np.empty(d, dtype=np.float64)
    cdef double* p = &p_mv[0]
    cdef double* q = &q_mv[0]
    cdef double* ratio = &ratio_mv[0]
    cdef _Trace trace = _Trace(d)
    cdef int status = C_MAX_STEPS
    cdef double norm = INFINITY
    cdef double weighted, normalizer, delta, step, qsum
    cdef Py_ssize_t m
    cdef long k
    cdef bint bad

    trace.push(p)
    for k in range(max_steps):
        weighted = 0.0
        for m in range(d):
            ratio[m] = p[m] / rho[m]
            weighted += p[m] * ratio[m]
        normalizer = 1.0 - pi * weighted
        if not isfinite(normalizer) or normalizer <= normalizer_floor:
            status = C_ZERO_NORMALIZER
            break
        norm = 0.0
        for m in range(d):
            step = pi * p[m] * (weighted - ratio[m]) / normalizer
            q[m] = p[m] + step
            delta = fabs(step)
            if delta > norm:
                norm = delta
        if norm < tol:
            status = C_CONVERGED
            break
        bad = False
        qsum = 0.0
        for m in range(d):
            qsum += q[m]
            if not isfinite(q[m]) or q[m] < -BOUND_TOL or q[m] > 1.0 + BOUND_TOL:
                bad = True
        if bad:
            status = C_NON_FINITE
            break
        for m in range(d):
            p[m] = q[m] / qsum
        trace.push(p)
    return trace.take(), status, norm


def iterate_fluctuation_batch(const double[:, ::1] rhos, const double[::1] pis,
                              const double[:, ::1] p0s, long max_steps, double tol,
                              double normalizer_floor=1e-15):
    cdef Py_ssize_t n_rows = p0s.shape[0]
    cdef Py_ssize_t d = p0s.shape[1]
    finals = np.array(p0s, dtype=np.float64)
    steps = np.zeros(n_rows, dtype=np.int64)
    norms = np.full(n_rows, np.inf)
    statuses = np.full(n_rows, C_MAX_STEPS, dtype=np.int64)
    cdef double[:, ::1] finals_mv = finals
    cdef cnp.int64_t[::1] steps_mv = steps
    cdef double[::1] norms_mv = norms
    cdef cnp.int64_t[::1] statuses_mv = statuses
    cdef double[::1] q_mv = np.empty(d, dtype=np.float64)
    cdef double[::1] ratio_mv = np.empty(d, dtype=np.float64)
    cdef double* q = &q_mv[0]
    cdef double* ratio = &ratio_mv[0]
    cdef double* p
    cdef double pi, weighted, normalizer, step, delta, norm, qsum
    cdef Py_ssize_t i, m
    cdef long k
    cdef int status
    cdef bint bad

    for i in range(n_rows):
        p = &finals_mv[i, 0]
        pi = pis[i]
        status = C_MAX_STEPS
        norm = INFINITY
        k = 0
        while k < max_steps:
            weighted = 0.0
            for m in range(d):
                ratio[m] = p[m] / rhos[i, m]
                weighted += p[m] * ratio[m]
            normalizer = 1.0 - pi * weighted
            if not isfinite(normalizer) or normalizer <= normalizer_floor:
                status = C_ZERO_NORMALIZER
                break
            norm = 0.0
            for m in range(d):
                step = pi * p[m] * (weighted - ratio[m]) / normalizer
                q[m] = p[m] + step
                delta = fabs(step)
                if delta > norm:
                    norm = delta
            if norm < tol:
                status = C_CONVERGED
                break
            bad = False
            qsum = 0.0
            for m in range(d):
                qsum += q[m]
                if not isfinite(q[m]) or q[m] < -BOUND_TOL or q[m] > 1.0 + BOUND_TOL:
                    bad = True
            if bad:
                status = C_NON_FINITE
                break
            for m in range(d):
                p[m] = q[m] / qsum
            k += 1
        steps_mv[i] = k
        norms_mv[i] = norm
        statuses_mv[i] = status
    return finals, steps, norms, statuses


def simulate_replica(object bit_generator, const double[:, ::1] W,
                     const cnp.int64_t[::1] counts0, long steps,
                     double fitness_floor=1e-15):
    cdef Py_ssize_t d = counts0.shape[0]
    path = np.empty((steps + 1, d), dtype=np.int64)
    predictable = np.empty((steps, d), dtype=np.float64)
    cdef cnp.int64_t[:, ::1] path_mv = path
    cdef double[:, ::1] pred_mv = predictable
    cdef double[::1] q_mv = np.empty(d, dtype=np.float64)
    cdef cnp.int64_t[::1] counts_mv = np.array(counts0, dtype=np.int64)
    cdef double[::1] p_mv = np.empty(d, dtype=np.float64)
    cdef double* q = &q_mv[0]
    cdef double* pvec = &p_mv[0]
    cdef cnp.int64_t* c = &counts_mv[0]
    cdef cnp.int64_t n_total = 0
    cdef double n_f, total, row, pm
    cdef Py_ssize_t m, n
    cdef long k, taken = 0
    cdef int status = C_CONVERGED
    cdef bitgen_t* rng
    cdef binomial_t scratch
    cdef object capsule = bit_generator.capsule

    memset(&scratch, 0, sizeof(scratch))
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid BitGenerator capsule")
    rng = <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")

    for m in range(d):
        n_total += c[m]
        path_mv[0, m] = c[m]
    n_f = <double> n_total

    with bit_generator.lock:
        for k in range(steps):
            total = 0.0
            for m in range(d):
                pvec[m] = c[m] / n_f
            for m in range(d):
                row = 0.0
                for n in range(d):
                    row += W[m, n] * pvec[n]
                q[m] = pvec[m] * row
                total += q[m]
            if not isfinite(total) or total <= fitness_floor:
                status = C_ZERO_NORMALIZER
                break
            for m in range(d):
                q[m] = q[m] / total
                pred_mv[k, m] = q[m]
            memset(c, 0, d * sizeof(cnp.int64_t))
            random_multinomial(rng, n_total, c, q, d, &scratch)
            for m in range(d):
                path_mv[k + 1, m] = c[m]
            taken = k + 1
    return path[: taken + 1], predictable[:taken], status
