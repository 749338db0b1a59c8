"""Backend contract: the compiled and pure kernels are interchangeable.

Floats are bit-identical by construction (shared precomputed tables,
matching accumulation order, no FP contraction), so every comparison
here is exact equality.
"""

import numpy as np
import pytest

import fqlab._kernels as kernels
from fqlab._kernels import available_backends, pure
from fqlab.channel import TwoStateChannel, _xlogx_subset_table
from fqlab.codec import _log_prior, _particular_solutions, random_parity
from fqlab.field import FieldSpec
from fqlab.prob import Pmf

BACKENDS = available_backends()
HAVE_COMPILED = "compiled" in BACKENDS

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED,
                                    reason="compiled kernels not built")


def scan_inputs(q, ps1=None):
    ch = TwoStateChannel.sum_product(FieldSpec(q), ps1=ps1)
    sup = ch.ps1.support()
    psup = ch.ps1.as_float()[sup]
    xlogx = _xlogx_subset_table(psup)
    grid = ch.additive_shift().as_array()
    shift_sub = np.asarray([[int(grid[s1, s2]) for s2 in range(q)] for s1 in sup],
                           dtype=np.int64)
    return shift_sub, q, xlogx, ch.ps2.as_float(), len(sup)


@needs_compiled
def test_scan_backends_bit_identical():
    for q, ps1 in ((3, None), (5, None), (5, Pmf.uniform(5)), (7, None)):
        shift_sub, q_, xlogx, ps2, s = scan_inputs(q, ps1)
        stop = q ** s
        r_pure = pure.scan_additive(shift_sub, q_, xlogx, ps2, 0, stop)
        r_comp = BACKENDS["compiled"].scan_additive(shift_sub, q_, xlogx, ps2, 0, stop)
        assert r_pure[0] == r_comp[0]
        assert r_pure[1] == r_comp[1]
        assert r_pure[2] == r_comp[2]


def test_scan_chunk_invariance():
    """Splitting the range and merging in order reproduces the full scan."""
    shift_sub, q, xlogx, ps2, s = scan_inputs(5)
    stop = q ** s
    full = kernels.scan_additive(shift_sub, q, xlogx, ps2, 0, stop)
    best = np.inf
    best_idx = -1
    for lo in range(0, stop, 97):
        hi = min(lo + 97, stop)
        val, idx, _ = kernels.scan_additive(shift_sub, q, xlogx, ps2, lo, hi)
        if val < best:
            best, best_idx = val, idx
    assert best == full[0]
    assert best_idx == full[1]


def test_scan_improvements_are_running_minima():
    shift_sub, q, xlogx, ps2, s = scan_inputs(3)
    _, _, improvements = kernels.scan_additive(shift_sub, q, xlogx, ps2, 0, q ** s)
    assert improvements[0][0] == 0
    vals = [v for _, v in improvements]
    assert all(vals[i + 1] < vals[i] for i in range(len(vals) - 1))


def decode_inputs(q, n, m, seed, with_scale):
    field = FieldSpec(q)
    code = random_parity(field, n, m, seed=seed)
    span = code.codewords()
    rng = np.random.default_rng(seed + 100)
    z = rng.integers(0, q, size=(40, n))
    synds = (z @ code.matrix.T) % q
    z0s = _particular_solutions(code, synds)
    w = rng.random(q) + 0.05
    logp = _log_prior(Pmf.of(w / w.sum()))
    mulvec = rng.integers(1, q, size=(40, n)).astype(np.int16) if with_scale else None
    return z0s, span, q, logp, mulvec


@needs_compiled
@pytest.mark.parametrize("q,n,m,with_scale", [(2, 12, 6, False), (3, 8, 4, False),
                                              (3, 8, 4, True), (5, 6, 3, True)])
def test_decode_backends_bit_identical(q, n, m, with_scale):
    z0s, span, q_, logp, mulvec = decode_inputs(q, n, m, 5, with_scale)
    a = pure.decode_cosets(z0s, span, q_, logp, mulvec)
    b = BACKENDS["compiled"].decode_cosets(z0s, span, q_, logp, mulvec)
    assert np.array_equal(a, b)


@needs_compiled
def test_decode_backends_with_zero_probability_symbols():
    """-inf log-prior entries must not disturb either backend."""
    z0s, span, q, _, _ = decode_inputs(3, 8, 4, 6, False)
    logp = _log_prior(Pmf.of([0.7, 0.3, 0.0]))
    a = pure.decode_cosets(z0s, span, q, logp)
    b = BACKENDS["compiled"].decode_cosets(z0s, span, q, logp)
    assert np.array_equal(a, b)


def test_decode_uniform_prior_returns_lex_min():
    """All members tie under a uniform prior; lex order decides."""
    field = FieldSpec(2)
    code = random_parity(field, 8, 3, seed=2)
    span = code.codewords()
    synd = np.zeros((1, 3), dtype=np.int64)
    z0s = _particular_solutions(code, synd)
    logp = _log_prior(Pmf.uniform(2))
    out = kernels.decode_cosets(z0s, span, 2, logp)
    members = sorted(map(tuple, ((z0s[0][None, :] + span) % 2).tolist()))
    assert tuple(out[0]) == members[0]


def anneal_inputs(q, n, budget, seed):
    import itertools
    import math as _math

    from fqlab.rng import ANNEAL_STREAM, substream

    ch = TwoStateChannel.sum_product(FieldSpec(q))
    grid = ch.additive_shift().as_array()
    ps1, ps2 = ch.ps1.as_float(), ch.ps2.as_float()
    big_q = q ** n
    sup = ch.ps1.support()
    sup_tuples = list(itertools.product(sup, repeat=n))

    def pack(tp):
        idx = 0
        for d in tp:
            idx = idx * q + d
        return idx

    sup_values = np.asarray([pack(tp) for tp in sup_tuples], dtype=np.int64)
    psup = np.asarray([_math.prod(ps1[t] for t in tp) for tp in sup_tuples])
    xlogx = _xlogx_subset_table(psup)
    s2_tuples = list(itertools.product(range(q), repeat=n))
    ps2n = np.asarray([_math.prod(ps2[t] for t in tp) for tp in s2_tuples])
    f2 = np.asarray([[pack(tuple(int(grid[tp[i], s2[i]]) for i in range(n)))
                      for s2 in s2_tuples] for tp in sup_tuples], dtype=np.int64)
    addq = np.asarray([[pack(tuple((a[i] + b[i]) % q for i in range(n)))
                        for b in s2_tuples] for a in s2_tuples], dtype=np.int64)
    g0 = np.zeros(big_q, dtype=np.int64)
    rng = substream(seed, ANNEAL_STREAM)
    positions = rng.integers(0, len(sup_tuples), size=budget, dtype=np.int64)
    deltas = rng.integers(1, big_q, size=budget, dtype=np.int64)
    log_accept = np.log(rng.random(budget))
    return (f2, sup_values, big_q, addq, xlogx, ps2n, g0, positions, deltas,
            log_accept, 0.5, 0.999)


@needs_compiled
def test_anneal_backends_bit_identical():
    args = anneal_inputs(3, 2, 4000, 11)
    a = pure.anneal_additive(*args)
    b = BACKENDS["compiled"].anneal_additive(*args)
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1])
    assert a[2] == b[2]
    assert a[3] == b[3]


def test_backend_name_reported():
    assert kernels.backend() in ("pure", "compiled")
    assert "pure" in BACKENDS
