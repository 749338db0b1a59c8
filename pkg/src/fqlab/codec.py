"""Syndrome (coset) coding over F_q and its Monte-Carlo verifiers.

Compression is the map v -> H v; decoding picks the most probable
vector in the indicated coset under an i.i.d. prior, by exhaustive coset
enumeration (exact maximum likelihood at desk scale, no iterative
decoders).  When many trials share one code and prior, the enumeration
is amortized into a per-syndrome decode table; results are identical to
per-trial enumeration.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import BudgetError, ConfigError
from .field import FieldSpec
from .prob import Pmf
from .rng import MATRIX_STREAM, SOURCE_STREAM, draw_iid, substream
from .source import SumProductSource

DEFAULT_ENUM_CAP = 1 << 24   # coset members examined in one decode
TABLE_SYNDROME_CAP = 1 << 20  # syndrome count above which no table is built


@dataclass(frozen=True, eq=False)
class LinearCode:
    """A parity-check matrix over F_q; rows are checks, columns symbols."""

    field: FieldSpec
    matrix: np.ndarray

    def __post_init__(self) -> None:
        h = self.matrix
        if h.ndim != 2 or h.size == 0:
            raise ConfigError("parity-check matrix must be two-dimensional and non-empty")
        if h.min() < 0 or h.max() >= self.field.q:
            raise ConfigError(f"matrix entries must lie in [0, {self.field.q})")

    @property
    def n(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def m(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def rate_bits(self) -> float:
        """Encoding rate in bits per source symbol."""
        return self.m / self.n * math.log2(self.field.q)

    @cached_property
    def _reduction(self) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
        return gf_row_reduce(self.matrix, self.field.q)

    @property
    def rank(self) -> int:
        return len(self._reduction[2])

    def codewords(self, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
        """All q^(n - rank) vectors in the nullspace of the matrix."""
        count = self.field.q ** (self.n - self.rank)
        if count > cap:
            raise BudgetError(
                f"coset enumeration needs {count} candidates, cap is {cap}"
            )
        if "_span" not in self.__dict__:
            self.__dict__["_span"] = _span_from_basis(
                _nullspace_basis(*self._reduction, self.n, self.field.q), self.field.q, self.n
            )
        return self.__dict__["_span"]


def gf_row_reduce(mat: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form R = E @ mat over F_q, with pivot columns."""
    r = np.array(mat, dtype=np.int64) % q
    m, n = r.shape
    e = np.eye(m, dtype=np.int64)
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        hits = np.nonzero(r[row:, col])[0]
        if len(hits) == 0:
            continue
        p = row + int(hits[0])
        if p != row:
            r[[row, p]] = r[[p, row]]
            e[[row, p]] = e[[p, row]]
        inv = pow(int(r[row, col]), q - 2, q)
        r[row] = (r[row] * inv) % q
        e[row] = (e[row] * inv) % q
        others = np.nonzero(r[:, col])[0]
        others = others[others != row]
        if len(others):
            f = r[others, col][:, None]
            r[others] = (r[others] - f * r[row]) % q
            e[others] = (e[others] - f * e[row]) % q
        pivots.append(col)
        row += 1
    return r, e, tuple(pivots)


def gf_rank(mat: np.ndarray, q: int) -> int:
    return len(gf_row_reduce(mat, q)[2])


def _nullspace_basis(r: np.ndarray, e: np.ndarray, pivots: tuple[int, ...],
                     n: int, q: int) -> np.ndarray:
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for j, pc in enumerate(pivots):
            basis[i, pc] = (-r[j, fc]) % q
    return basis


def _span_from_basis(basis: np.ndarray, q: int, n: int) -> np.ndarray:
    span = np.zeros((1, n), dtype=np.int16)
    for b in basis:
        blocks = [(span + coef * b.astype(np.int16)) % q for coef in range(q)]
        span = np.concatenate(blocks, axis=0)
    return span


def random_parity(field: FieldSpec, n: int, m: int, seed: int) -> LinearCode:
    """Parity-check matrix with uniform i.i.d. entries from the matrix stream."""
    if n < 1 or m < 1:
        raise ConfigError("block length and syndrome dimension must be positive")
    rng = substream(seed, MATRIX_STREAM)
    return LinearCode(field, rng.integers(0, field.q, size=(m, n), dtype=np.int64))


def syndrome(code: LinearCode, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (code.n,):
        raise ConfigError(f"vector length {v.shape} does not match block length {code.n}")
    if v.min() < 0 or v.max() >= code.field.q:
        raise ConfigError("vector entries outside the field")
    return (code.matrix @ v) % code.field.q


def _log_prior(prior: Pmf) -> np.ndarray:
    p = prior.as_float()
    with np.errstate(divide="ignore"):
        return np.where(p > 0, np.log(p), -np.inf)


def _particular_solutions(code: LinearCode, synds: np.ndarray) -> np.ndarray:
    """One solution of H z = s per row of synds; error if any s is unreachable."""
    r, e, pivots = code._reduction
    q = code.field.q
    t = (synds @ e.T) % q
    rank = len(pivots)
    if rank < code.m and np.any(t[:, rank:]):
        raise ConfigError("syndrome outside the column space of the matrix")
    z0s = np.zeros((synds.shape[0], code.n), dtype=np.int16)
    z0s[:, list(pivots)] = t[:, :rank]
    return z0s


def coset_decode(code: LinearCode, synd: np.ndarray, prior: Pmf,
                 cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Most probable z with H z = synd under the i.i.d. prior.

    Exhaustive over the coset; ties break to the lexicographically
    smallest maximizer.  Raises BudgetError when the coset exceeds cap.
    """
    if prior.size != code.field.q:
        raise ConfigError("prior alphabet must match the field")
    synd = np.asarray(synd, dtype=np.int64)
    if synd.shape != (code.m,):
        raise ConfigError(f"syndrome length {synd.shape} does not match {code.m}")
    span = code.codewords(cap)
    z0s = _particular_solutions(code, synd[None, :] % code.field.q)
    out = _kernels.decode_cosets(z0s, span, code.field.q, _log_prior(prior))
    return out[0].astype(np.int64)


def _syndrome_indices(synds: np.ndarray, q: int, m: int) -> np.ndarray:
    pw = q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return synds @ pw


def decode_table(code: LinearCode, prior: Pmf, cap: int = DEFAULT_ENUM_CAP,
                 jobs: int = 1) -> np.ndarray:
    """Decoded vector per syndrome index, -1 rows for unreachable syndromes.

    Row order follows the mixed-radix syndrome index (first syndrome
    symbol most significant).  Results are identical to per-syndrome
    coset_decode; jobs only splits the work.
    """
    q, m = code.field.q, code.m
    total = q ** m
    if total > TABLE_SYNDROME_CAP:
        raise BudgetError(f"{total} syndromes exceed the table cap {TABLE_SYNDROME_CAP}")
    span = code.codewords(cap)
    idx = np.arange(total, dtype=np.int64)
    pw = q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    synds = (idx[:, None] // pw[None, :]) % q
    r, e, pivots = code._reduction
    rank = len(pivots)
    t = (synds @ e.T) % q
    reachable = np.ones(total, dtype=bool) if rank == m else ~np.any(t[:, rank:], axis=1)
    z0s = np.zeros((int(reachable.sum()), code.n), dtype=np.int16)
    z0s[:, list(pivots)] = t[reachable][:, :rank]
    logp = _log_prior(prior)
    table = np.full((total, code.n), -1, dtype=np.int16)
    decoded = _run_chunks(
        lambda lo, hi: _kernels.decode_cosets(z0s[lo:hi], span, q, logp),
        z0s.shape[0], jobs,
    )
    table[reachable] = decoded
    return table


def _run_chunks(fn, total: int, jobs: int, chunk: int = 1024) -> np.ndarray:
    """Map fn over fixed-size index ranges; chunking never depends on jobs."""
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    if jobs <= 1 or len(ranges) <= 1:
        parts = [fn(lo, hi) for lo, hi in ranges]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda r: fn(*r), ranges))
    return np.concatenate(parts, axis=0) if parts else np.empty((0, 0), dtype=np.int16)


@dataclass(frozen=True)
class SimOutcome:
    """Block-error count of one seeded simulation run."""

    trials: int
    block_errors: int
    rate_bits_per_symbol: float
    seed: int

    def __post_init__(self) -> None:
        if self.block_errors > self.trials:
            raise ConfigError("more errors than trials")

    @property
    def error_rate(self) -> float:
        return self.block_errors / self.trials

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "block_errors": self.block_errors,
            "rate_bits_per_symbol": self.rate_bits_per_symbol,
            "seed": self.seed,
        }


def _decode_many(code: LinearCode, synds: np.ndarray, prior: Pmf,
                 cap: int, jobs: int, mulvec: np.ndarray | None = None) -> np.ndarray:
    """Decode a batch of syndromes, via the table when it is cheaper.

    The table costs q^n member evaluations, per-trial enumeration costs
    trials * q^(n - rank); the table wins when q^rank <= trials.  The
    scaled variant (mulvec) has per-trial cosets and never uses a table.
    """
    q = code.field.q
    if mulvec is None and q ** code.rank <= synds.shape[0] and q ** code.m <= TABLE_SYNDROME_CAP:
        table = decode_table(code, prior, cap, jobs)
        decoded = table[_syndrome_indices(synds, q, code.m)]
        if np.any(decoded < 0):
            raise ConfigError("syndrome outside the column space of the matrix")
        return decoded
    span = code.codewords(cap)
    z0s = _particular_solutions(code, synds)
    logp = _log_prior(prior)
    if mulvec is None:
        return _run_chunks(
            lambda lo, hi: _kernels.decode_cosets(z0s[lo:hi], span, q, logp),
            z0s.shape[0], jobs,
        )
    mv = mulvec.astype(np.int16)
    return _run_chunks(
        lambda lo, hi: _kernels.decode_cosets(z0s[lo:hi], span, q, logp, mv[lo:hi]),
        z0s.shape[0], jobs,
    )


def km_simulate(code: LinearCode, pz: Pmf, trials: int, seed: int,
                cap: int = DEFAULT_ENUM_CAP, jobs: int = 1) -> SimOutcome:
    """Classical two-helper simulation: reconstruct the noise from syndromes.

    Per trial: draw X^n uniform and Z^n i.i.d. from pz, form Y = X + Z,
    hand the decoder syndrome(Y) - syndrome(X) = syndrome(Z), decode,
    and count a block error when the decoded vector differs from Z^n.
    """
    q = code.field.q
    if pz.size != q:
        raise ConfigError("noise alphabet must match the field")
    rng = substream(seed, SOURCE_STREAM)
    x = draw_iid(rng, Pmf.uniform(q).as_float(), (trials, code.n))
    z = draw_iid(rng, pz.as_float(), (trials, code.n))
    y = (x + z) % q
    s = ((y @ code.matrix.T) - (x @ code.matrix.T)) % q
    zhat = _decode_many(code, s, pz, cap, jobs)
    errors = int(np.any(zhat != z, axis=1).sum())
    return SimOutcome(trials, errors, code.rate_bits, seed)


def km_sum_product_centralized(code: LinearCode, src: SumProductSource, trials: int,
                               seed: int, state_mode: str = "decoder",
                               cap: int = DEFAULT_ENUM_CAP, jobs: int = 1) -> SimOutcome:
    """Sum-product simulation with the multiplier B known somewhere central.

    state_mode "decoder": encoders send syndrome(A) and syndrome(Y); the
    decoder forms H(B o C) and, knowing B^n, decodes C^n against the
    column-scaled matrix H diag(B).  state_mode "encoder": both encoders
    divide their observations by B first, which reduces to the classical
    problem with noise C.
    """
    if state_mode not in ("decoder", "encoder"):
        raise ConfigError(f"unknown state mode {state_mode!r}")
    q = code.field.q
    if src.field.q != q:
        raise ConfigError("source field must match the code field")
    rng = substream(seed, SOURCE_STREAM)
    a = draw_iid(rng, src.pa.as_float(), (trials, code.n))
    b = draw_iid(rng, src.pb.as_float(), (trials, code.n))
    c = draw_iid(rng, src.pc.as_float(), (trials, code.n))
    y = (a + b * c) % q
    binv = code.field.inv_table[b]
    if state_mode == "decoder":
        s = ((y @ code.matrix.T) - (a @ code.matrix.T)) % q
        chat = _decode_many(code, s, src.pc, cap, jobs, mulvec=binv)
    else:
        u1 = (a * binv) % q
        u2 = (y * binv) % q
        s = ((u2 @ code.matrix.T) - (u1 @ code.matrix.T)) % q
        chat = _decode_many(code, s, src.pc, cap, jobs)
    errors = int(np.any(chat != c, axis=1).sum())
    return SimOutcome(trials, errors, code.rate_bits, seed)


def km_sum_product_decentralized(code: LinearCode, src: SumProductSource, trials: int,
                                 seed: int, cap: int = DEFAULT_ENUM_CAP,
                                 jobs: int = 1) -> SimOutcome:
    """Sum-product simulation with the decoder ignorant of B.

    The decoder sees H(B o C) only; its best per-symbol model is the
    i.i.d. law of W = B * C, so it decodes W^n and has to output that
    estimate as its guess of C^n.  The error rate stays bounded away
    from zero at any rate: without B the product cannot be undone.
    """
    q = code.field.q
    if src.field.q != q:
        raise ConfigError("source field must match the code field")
    rng = substream(seed, SOURCE_STREAM)
    a = draw_iid(rng, src.pa.as_float(), (trials, code.n))
    b = draw_iid(rng, src.pb.as_float(), (trials, code.n))
    c = draw_iid(rng, src.pc.as_float(), (trials, code.n))
    y = (a + b * c) % q
    s = ((y @ code.matrix.T) - (a @ code.matrix.T)) % q
    pw = np.zeros(q)
    pbf, pcf = src.pb.as_float(), src.pc.as_float()
    for bb in src.pb.support():
        binv = int(code.field.inv_table[bb])
        for w in range(q):
            pw[w] += pbf[bb] * pcf[(w * binv) % q]
    what = _decode_many(code, s, Pmf.of(pw), cap, jobs)
    errors = int(np.any(what != c, axis=1).sum())
    return SimOutcome(trials, errors, code.rate_bits, seed)
