# cython: language_level=3
"""Compiled kernels for the hot inner loops.

Semantics match fqlab._kernels.pure exactly: floats arrive as
precomputed tables, every accumulation runs in the same order, and the
extension is built with FP contraction off, so results are bit-identical
to the pure backend.
"""

import math

import numpy as np

cimport numpy as cnp

cnp.import_array()


def scan_additive(cnp.int64_t[:, ::1] shift_sub, int q, double[::1] xlogx,
                  double[::1] ps2, long long start, long long stop):
    """See fqlab._kernels.pure.scan_additive."""
    cdef int S = shift_sub.shape[0]
    cdef cnp.int64_t[::1] digits = np.zeros(S, dtype=np.int64)
    cdef cnp.int64_t[::1] masks = np.zeros(q, dtype=np.int64)
    cdef long long k, rem
    cdef int j, s2, v
    cdef double acc, inner, val
    cdef double best_val = math.inf
    cdef long long best_idx = -1
    improvements = []

    # seed the digit odometer at `start`, most significant digit first
    rem = start
    for j in range(S - 1, -1, -1):
        digits[j] = rem % q
        rem //= q

    for k in range(start, stop):
        acc = 0.0
        for s2 in range(q):
            for v in range(q):
                masks[v] = 0
            for j in range(S):
                v = <int>((digits[j] + shift_sub[j, s2]) % q)
                masks[v] |= (<cnp.int64_t>1) << j
            inner = 0.0
            for v in range(q):
                inner += xlogx[masks[v]]
            acc += ps2[s2] * inner
        val = -acc
        if val < best_val:
            best_val = val
            best_idx = k
            improvements.append((int(k), float(val)))
        # advance the odometer (least significant digit last in the array)
        for j in range(S - 1, -1, -1):
            digits[j] += 1
            if digits[j] < q:
                break
            digits[j] = 0

    return float(best_val), int(best_idx), improvements


def decode_cosets(cnp.int16_t[:, ::1] z0s, cnp.int16_t[:, ::1] span, int q,
                  double[::1] logp, mulvec_obj=None):
    """See fqlab._kernels.pure.decode_cosets."""
    cdef Py_ssize_t T = z0s.shape[0]
    cdef Py_ssize_t n = z0s.shape[1]
    cdef Py_ssize_t M = span.shape[0]
    cdef bint scaled = mulvec_obj is not None
    cdef cnp.int16_t[:, ::1] mulvec
    if scaled:
        mulvec = mulvec_obj
    out_arr = np.empty((T, n), dtype=np.int16)
    cdef cnp.int16_t[:, ::1] out = out_arr
    cdef cnp.int16_t[::1] member = np.zeros(n, dtype=np.int16)
    cdef cnp.int64_t[::1] counts = np.zeros(q, dtype=np.int64)
    cdef Py_ssize_t t, mi, i
    cdef int v, cmp_flag
    cdef double score, best_score
    for t in range(T):
        best_score = -math.inf
        for mi in range(M):
            for v in range(q):
                counts[v] = 0
            for i in range(n):
                v = <int>((z0s[t, i] + span[mi, i]) % q)
                if scaled:
                    v = <int>((v * mulvec[t, i]) % q)
                member[i] = <cnp.int16_t>v
                counts[v] += 1
            score = 0.0
            for v in range(q):
                if counts[v] != 0:
                    score += counts[v] * logp[v]
            if mi == 0:
                best_score = score
                for i in range(n):
                    out[t, i] = member[i]
                continue
            if score > best_score:
                best_score = score
                for i in range(n):
                    out[t, i] = member[i]
            elif score == best_score:
                cmp_flag = 0
                for i in range(n):
                    if member[i] != out[t, i]:
                        cmp_flag = 1 if member[i] < out[t, i] else -1
                        break
                if cmp_flag == 1:
                    for i in range(n):
                        out[t, i] = member[i]
    return out_arr


def anneal_additive(cnp.int64_t[:, ::1] f2, cnp.int64_t[::1] sup_values, int Q,
                    cnp.int64_t[:, ::1] addq, double[::1] xlogx, double[::1] ps2,
                    cnp.int64_t[::1] g0, cnp.int64_t[::1] positions,
                    cnp.int64_t[::1] deltas, double[::1] log_accept,
                    double t0, double alpha):
    """See fqlab._kernels.pure.anneal_additive."""
    cdef int S = sup_values.shape[0]
    cdef Py_ssize_t budget = positions.shape[0]
    cdef cnp.int64_t[::1] g = np.array(g0, dtype=np.int64)
    cdef cnp.int64_t[::1] best_g = np.array(g0, dtype=np.int64)
    cdef cnp.int64_t[::1] masks = np.zeros(Q, dtype=np.int64)
    cdef Py_ssize_t step
    cdef int j, s2, v, cell
    cdef cnp.int64_t old
    cdef double acc, inner, cur, cand, best, temp, init_val
    improvements = []

    # evaluation inlined twice (init and per step) to stay in C types
    acc = 0.0
    for s2 in range(Q):
        for v in range(Q):
            masks[v] = 0
        for j in range(S):
            v = <int>addq[g[sup_values[j]], f2[j, s2]]
            masks[v] |= (<cnp.int64_t>1) << j
        inner = 0.0
        for v in range(Q):
            inner += xlogx[masks[v]]
        acc += ps2[s2] * inner
    cur = -acc
    init_val = cur
    best = cur
    temp = t0

    for step in range(budget):
        temp *= alpha
        cell = <int>sup_values[positions[step]]
        old = g[cell]
        g[cell] = (old + deltas[step]) % Q
        acc = 0.0
        for s2 in range(Q):
            for v in range(Q):
                masks[v] = 0
            for j in range(S):
                v = <int>addq[g[sup_values[j]], f2[j, s2]]
                masks[v] |= (<cnp.int64_t>1) << j
            inner = 0.0
            for v in range(Q):
                inner += xlogx[masks[v]]
            acc += ps2[s2] * inner
        cand = -acc
        if cand <= cur or log_accept[step] * temp < cur - cand:
            cur = cand
            if cand < best:
                best = cand
                for v in range(Q):
                    best_g[v] = g[v]
                improvements.append((int(step + 1), float(cand)))
        else:
            g[cell] = old
    return float(best), np.asarray(best_g).copy(), improvements, float(init_val)
