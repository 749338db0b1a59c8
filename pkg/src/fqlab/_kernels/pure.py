"""Pure NumPy/Python kernels, the fallback when the compiled core is absent.

These mirror the compiled kernels operation for operation: every float
enters as a precomputed table (no libm calls here or in the compiled
core) and accumulation orders match exactly, so both backends produce
bit-identical results.
"""

from __future__ import annotations

import math

import numpy as np

_SCAN_CHUNK = 1 << 14
_DECODE_CELLS = 1 << 22


def scan_additive(shift_sub: np.ndarray, q: int, xlogx: np.ndarray,
                  ps2: np.ndarray, start: int, stop: int):
    """Scan per-letter tables g over the support digits, minimizing the
    conditional output entropy of g(S1) + shift(S1, S2) given S2.

    shift_sub[j, s2] is the shift value for support position j; xlogx is
    indexed by the bitmask of support positions landing in one output
    bucket.  Candidates are mixed-radix integers, digit for support
    position 0 most significant.  Returns (best value, best index,
    improvements) where improvements lists (index, value) pairs that
    lowered the running local minimum, in scan order.
    """
    S = shift_sub.shape[0]
    pw = q ** np.arange(S - 1, -1, -1, dtype=np.int64)
    best_val = math.inf
    best_idx = -1
    improvements: list[tuple[int, float]] = []
    for lo in range(start, stop, _SCAN_CHUNK):
        hi = min(lo + _SCAN_CHUNK, stop)
        ks = np.arange(lo, hi, dtype=np.int64)
        digits = (ks[:, None] // pw[None, :]) % q
        rows = np.arange(len(ks))
        acc = np.zeros(len(ks))
        for s2 in range(q):
            masks = np.zeros((len(ks), q), dtype=np.int64)
            for j in range(S):
                v = (digits[:, j] + shift_sub[j, s2]) % q
                masks[rows, v] |= np.int64(1 << j)
            inner = np.zeros(len(ks))
            for v in range(q):
                inner += xlogx[masks[:, v]]
            acc += ps2[s2] * inner
        vals = -acc
        run = np.minimum.accumulate(vals)
        prev = np.minimum(best_val, np.concatenate(([math.inf], run[:-1])))
        for i in np.flatnonzero(vals < prev):
            improvements.append((int(lo + i), float(vals[i])))
        ci = int(np.argmin(vals))
        if vals[ci] < best_val:
            best_val = float(vals[ci])
            best_idx = lo + ci
    return best_val, int(best_idx), improvements


def decode_cosets(z0s: np.ndarray, span: np.ndarray, q: int, logp: np.ndarray,
                  mulvec: np.ndarray | None = None) -> np.ndarray:
    """Most probable member of each coset z0 + span under an i.i.d. prior.

    Scores are canonical: the symbol-count vector of a member dotted
    with logp in symbol order, so equal-probability members tie exactly.
    Ties resolve to the lexicographically smallest member.  When mulvec
    is given, members are scaled entrywise by it (mod q) before scoring,
    which turns a coset of H into a coset of H * diag(mulvec^-1).
    """
    T, n = z0s.shape
    M = span.shape[0]
    out = np.empty((T, n), dtype=np.int16)
    rows_per = max(1, _DECODE_CELLS // max(M * n, 1))
    for lo in range(0, T, rows_per):
        hi = min(lo + rows_per, T)
        members = (z0s[lo:hi, None, :] + span[None, :, :]) % q
        if mulvec is not None:
            members = (members * mulvec[lo:hi, None, :]) % q
        scores = np.zeros((hi - lo, M))
        with np.errstate(invalid="ignore"):
            for v in range(q):
                cnt = np.count_nonzero(members == v, axis=2)
                scores += np.where(cnt > 0, cnt * logp[v], 0.0)
        for r in range(hi - lo):
            row = scores[r]
            best = row.max()
            ties = np.flatnonzero(row == best)
            if len(ties) == 1:
                out[lo + r] = members[r, ties[0]]
            else:
                out[lo + r] = min(map(tuple, members[r, ties].tolist()))
    return out


def anneal_additive(f2: np.ndarray, sup_values: np.ndarray, Q: int,
                    addq: np.ndarray, xlogx: np.ndarray, ps2: np.ndarray,
                    g0: np.ndarray, positions: np.ndarray, deltas: np.ndarray,
                    log_accept: np.ndarray, t0: float, alpha: float):
    """Single annealing chain over truth tables g, minimizing the
    conditional entropy of g(S1^n) + shift given S2^n.

    f2[j, s2] is the packed shift for support position j and packed s2;
    addq is the packed componentwise addition table; proposals flow from
    pre-drawn streams (positions into the support, value deltas, log of
    the acceptance uniforms) so that trajectories are reproducible.
    Returns (best value, best table, improvements, initial value); the
    improvements list pairs (steps taken, value).
    """
    S = int(len(sup_values))
    supv = [int(v) for v in sup_values]
    f2l = [[int(f2[j, s2]) for s2 in range(Q)] for j in range(S)]
    addl = [[int(addq[a, b]) for b in range(Q)] for a in range(Q)]
    xl = [float(v) for v in xlogx]
    p2 = [float(v) for v in ps2]
    g = [int(v) for v in g0]

    def evaluate() -> float:
        acc = 0.0
        for s2 in range(Q):
            masks = [0] * Q
            for j in range(S):
                v = addl[g[supv[j]]][f2l[j][s2]]
                masks[v] |= 1 << j
            inner = 0.0
            for v in range(Q):
                inner += xl[masks[v]]
            acc += p2[s2] * inner
        return -acc

    cur = evaluate()
    init_val = cur
    best = cur
    best_g = list(g)
    improvements: list[tuple[int, float]] = []
    temp = t0
    pos = [int(v) for v in positions]
    dl = [int(v) for v in deltas]
    la = [float(v) for v in log_accept]
    for step in range(len(pos)):
        temp *= alpha
        cell = supv[pos[step]]
        old = g[cell]
        g[cell] = (old + dl[step]) % Q
        cand = evaluate()
        if cand <= cur or la[step] * temp < cur - cand:
            cur = cand
            if cand < best:
                best = cand
                best_g = list(g)
                improvements.append((step + 1, cand))
        else:
            g[cell] = old
    return best, np.asarray(best_g, dtype=np.int64), improvements, init_val
