"""Two-state deterministic channels: objective evaluation and capacity search.

The channel Y = f(X, S1, S2) has S1 known at the encoder and S2 at the
decoder.  Three engines live here:

* gp_objective evaluates I(U; Y, S2) - I(U; S1) exactly for a candidate
  auxiliary design (a conditional law of U given S1 plus an input map
  x(u, s1)), cross-checking the equivalent I(U; Y | S2) form.
* gp_search maximizes that objective: a constructive candidate from the
  function decomposition when one exists, plus seeded random restarts
  driven by alternating row ascent and input-table sweeps.  The result
  is a capacity lower bound, never claimed optimal.
* For channels in the additive form Y = X + shift(S1, S2), capacity is
  log2(q) minus an entropy infimum over encoding tables g; the per-letter
  minimum is found exhaustively and multi-letter tables are explored by
  seeded annealing started from the per-letter optimum.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .analysis import decompose, g_invertible_in_first
from .errors import BudgetError, ConfigError, InvariantError
from .field import FieldSpec
from .prob import JointPmf, Pmf, conditional_entropy, mutual_information
from .rng import ANNEAL_STREAM, SEARCH_STREAM, substream
from .tables import TableFunction, mul2

_IDENT_TOL = 1e-9
DEFAULT_SCAN_CAP = 10 ** 7
ANNEAL_ALPHABET_CAP = 32
_ANNEAL_SUPPORT_CAP = 20


@dataclass(frozen=True)
class TwoStateChannel:
    """Deterministic channel y = f(x, s1, s2) with independent states."""

    field: FieldSpec
    f: TableFunction
    ps1: Pmf
    ps2: Pmf

    def __post_init__(self) -> None:
        q = self.field.q
        if self.f.domain != (q, q, q) or self.f.codomain != q:
            raise ConfigError("channel function must map F_q^3 to F_q")
        if self.ps1.size != q or self.ps2.size != q:
            raise ConfigError("state alphabets must match the field")

    @classmethod
    def sum_product(cls, field: FieldSpec, ps1: Optional[Pmf] = None,
                    ps2: Optional[Pmf] = None) -> TwoStateChannel:
        """y = x + s1 * s2; default states: S1 uniform nonzero, S2 uniform."""
        q = field.q
        f = TableFunction.from_callable((q, q, q), q,
                                        lambda x, s1, s2: (x + s1 * s2) % q)
        ps1 = ps1 if ps1 is not None else Pmf.uniform_nonzero(q)
        ps2 = ps2 if ps2 is not None else Pmf.uniform(q)
        return cls(field, f, ps1, ps2)

    @classmethod
    def additive(cls, field: FieldSpec, ps1: Optional[Pmf] = None,
                 ps2: Optional[Pmf] = None) -> TwoStateChannel:
        """y = x + s1 + s2 with the same state defaults."""
        q = field.q
        f = TableFunction.from_callable((q, q, q), q,
                                        lambda x, s1, s2: (x + s1 + s2) % q)
        ps1 = ps1 if ps1 is not None else Pmf.uniform_nonzero(q)
        ps2 = ps2 if ps2 is not None else Pmf.uniform(q)
        return cls(field, f, ps1, ps2)

    @classmethod
    def from_shift(cls, field: FieldSpec, shift: TableFunction,
                   ps1: Pmf, ps2: Pmf) -> TwoStateChannel:
        """Additive-form channel y = x + shift(s1, s2)."""
        q = field.q
        if shift.domain != (q, q) or shift.codomain != q:
            raise ConfigError("shift must map F_q^2 to F_q")
        grid = shift.as_array()
        f = TableFunction.from_callable(
            (q, q, q), q, lambda x, s1, s2: (x + int(grid[s1, s2])) % q
        )
        return cls(field, f, ps1, ps2)

    def additive_shift(self) -> Optional[TableFunction]:
        """shift(s1, s2) = f(0, s1, s2) when f(x,.) = x + shift; else None."""
        q = self.field.q
        cube = self.f.as_array()
        base = cube[0]
        for x in range(1, q):
            if not np.array_equal(cube[x], (base + x) % q):
                return None
        return TableFunction((q, q), q, base.ravel().astype(np.int64))


@dataclass(frozen=True)
class GPDesign:
    """Auxiliary design: a row-conditional law of U given S1 and an input map.

    pu_given_s1 has shape (q, u_size); x_of_u_s1 maps (u, s1) to the
    channel input.
    """

    pu_given_s1: np.ndarray
    x_of_u_s1: TableFunction

    def __post_init__(self) -> None:
        rows = self.pu_given_s1
        if rows.ndim != 2:
            raise ConfigError("pu_given_s1 must be a (s1, u) matrix")
        if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > 1e-9):
            raise ConfigError("each conditional row must be a pmf")
        if self.x_of_u_s1.domain != (rows.shape[1], rows.shape[0]):
            raise ConfigError("input map domain must be (u_size, q)")

    @property
    def u_size(self) -> int:
        return int(self.pu_given_s1.shape[1])


def _design_joint(ch: TwoStateChannel, design: GPDesign) -> JointPmf:
    """Exact joint of (U, S1, X, S2, Y) induced by a design."""
    q = ch.field.q
    u_size = design.u_size
    ps1 = ch.ps1.as_float()
    ps2 = ch.ps2.as_float()
    xmap = design.x_of_u_s1.as_array()
    cube = ch.f.as_array()
    joint = np.zeros((u_size, q, q, q, q))
    for s1 in range(q):
        if ps1[s1] == 0.0:
            continue
        for u in range(u_size):
            pu = design.pu_given_s1[s1, u]
            if pu == 0.0:
                continue
            x = int(xmap[u, s1])
            for s2 in range(q):
                if ps2[s2] == 0.0:
                    continue
                y = int(cube[x, s1, s2])
                joint[u, s1, x, s2, y] += ps1[s1] * pu * ps2[s2]
    return JointPmf(joint)


def gp_objective(ch: TwoStateChannel, design: GPDesign) -> float:
    """I(U; Y, S2) - I(U; S1) in bits for one design.

    Also evaluates the equivalent I(U; Y | S2) - I(U; S1) form and the
    independence of S2 from (U, X, S1); both must agree within 1e-9.
    """
    joint = _design_joint(ch, design)
    # axes: 0=U 1=S1 2=X 3=S2 4=Y
    primary = mutual_information(joint, [0], [4, 3]) - mutual_information(joint, [0], [1])
    cond_form = (conditional_entropy(joint, [0], [3])
                 - conditional_entropy(joint, [0], [4, 3])
                 - mutual_information(joint, [0], [1]))
    if abs(primary - cond_form) > _IDENT_TOL:
        raise InvariantError(
            f"objective forms disagree: {primary} vs {cond_form}"
        )
    leak = mutual_information(joint, [0, 2, 1], [3])
    if abs(leak) > _IDENT_TOL:
        raise InvariantError(f"decoder state is not independent of the design: {leak}")
    return primary


@dataclass(frozen=True)
class GPSearchResult:
    design: GPDesign
    objective_bits: float
    origin: str          # "decomposition", "sweep", or "restart:<i>"
    u_size: int
    restarts: int


def _objective_nats(ps1: np.ndarray, ps2: np.ndarray, y_of: np.ndarray,
                    t: np.ndarray) -> float:
    """J = H(U|S1) - H(U|Y,S2) in nats for rows t and input map y_of."""
    q = ps1.shape[0]
    u_size = t.shape[1]
    h_u_s1 = 0.0
    for s1 in range(q):
        row = t[s1]
        nz = row[row > 0]
        h_u_s1 += ps1[s1] * float(-(nz * np.log(nz)).sum())
    h_u_ys2 = 0.0
    rows = np.arange(u_size)
    for s2 in range(q):
        if ps2[s2] == 0.0:
            continue
        m = np.zeros((u_size, q))
        for s1 in range(q):
            if ps1[s1] == 0.0:
                continue
            # row indices are distinct, so fancy += never collides
            m[rows, y_of[:, s1, s2]] += ps1[s1] * t[s1]
        py = m.sum(axis=0)
        nz = m[m > 0]
        h_joint = float(-(nz * np.log(nz)).sum())
        nzy = py[py > 0]
        h_y = float(-(nzy * np.log(nzy)).sum())
        h_u_ys2 += ps2[s2] * (h_joint - h_y)
    return h_u_s1 - h_u_ys2


def _ba_rows(ps1: np.ndarray, ps2: np.ndarray, y_of: np.ndarray, t0: np.ndarray,
             max_iters: int = 2000, tol: float = 1e-13) -> np.ndarray:
    """Monotone alternating ascent on the rows of p(u | s1) for a fixed input map.

    The posterior step uses r(u | y, s2) from the current rows; the row
    step has the closed form t(u | s1) proportional to
    exp(sum_s2 p(s2) ln r(u | y(u, s1, s2), s2)).
    """
    q = ps1.shape[0]
    u_size = t0.shape[1]
    t = t0.copy()
    rows = np.arange(u_size)
    last = -math.inf
    for _ in range(max_iters):
        # posterior r(u | y, s2) per decoder observation
        r = np.zeros((u_size, q, q))
        for s2 in range(q):
            if ps2[s2] == 0.0:
                continue
            m = np.zeros((u_size, q))
            for s1 in range(q):
                if ps1[s1] == 0.0:
                    continue
                m[rows, y_of[:, s1, s2]] += ps1[s1] * t[s1]
            tot = m.sum(axis=0)
            with np.errstate(invalid="ignore", divide="ignore"):
                r[:, :, s2] = np.where(tot > 0, m / tot, 0.0)
        # row step
        c = np.full((q, u_size), -math.inf)
        for s1 in range(q):
            acc = np.zeros(u_size)
            dead = np.zeros(u_size, dtype=bool)
            for s2 in range(q):
                if ps2[s2] == 0.0:
                    continue
                rv = r[np.arange(u_size), y_of[:, s1, s2], s2]
                dead |= rv <= 0
                with np.errstate(divide="ignore"):
                    acc += ps2[s2] * np.where(rv > 0, np.log(np.maximum(rv, 1e-300)), 0.0)
            acc[dead] = -math.inf
            c[s1] = acc
        for s1 in range(q):
            row = c[s1]
            mx = row.max()
            if mx == -math.inf:
                t[s1] = np.full(u_size, 1.0 / u_size)
                continue
            w = np.exp(row - mx)
            t[s1] = w / w.sum()
        j = _objective_nats(ps1, ps2, y_of, t)
        if j - last < tol:
            break
        last = j
    return t


def _y_of(ch: TwoStateChannel, xmap: np.ndarray) -> np.ndarray:
    """y_of[u, s1, s2] for an input table xmap[u, s1]."""
    cube = ch.f.as_array()
    u_size, q = xmap.shape
    y_of = np.zeros((u_size, q, q), dtype=np.int64)
    for u in range(u_size):
        for s1 in range(q):
            y_of[u, s1, :] = cube[xmap[u, s1], s1, :]
    return y_of


def _decomposition_design(ch: TwoStateChannel, u_size: int) -> Optional[GPDesign]:
    """Constructive design from a split f = ftilde(G(x, s1), s2) with G
    invertible in x: U uniform on the classes and x(u, s1) the inverse
    of G(., s1).  Reaches log2(q) exactly when it applies."""
    result = decompose(ch.f)
    if not result.decomposable or result.g is None:
        return None
    if not g_invertible_in_first(result.g):
        return None
    q = ch.field.q
    t_size = result.g.codomain
    if u_size < t_size:
        return None
    ginv = np.zeros((t_size, q), dtype=np.int64)
    grid = result.g.as_array()
    for s1 in range(q):
        for x in range(q):
            ginv[int(grid[x, s1]), s1] = x
    xmap = np.zeros((u_size, q), dtype=np.int64)
    xmap[:t_size] = ginv
    rows = np.zeros((q, u_size))
    rows[:, :t_size] = 1.0 / t_size
    table = TableFunction((u_size, q), q, xmap.ravel())
    return GPDesign(rows, table)


def gp_search(ch: TwoStateChannel, u_size: Optional[int] = None, restarts: int = 8,
              seed: int = 0, jobs: int = 1, sweep_cap: int = 10 ** 6) -> GPSearchResult:
    """Best design found for the objective; a capacity lower bound.

    Candidates, in deterministic order: the constructive decomposition
    design when the channel function splits; a full sweep over input
    tables when that space is at most sweep_cap; otherwise seeded random
    restarts.  Every candidate's rows are polished by the alternating
    ascent.  Ties keep the earliest candidate.
    """
    q = ch.field.q
    u_size = u_size if u_size is not None else q * q
    if u_size < 1:
        raise ConfigError("u alphabet must be non-empty")
    ps1 = ch.ps1.as_float()
    ps2 = ch.ps2.as_float()
    candidates: list[tuple[str, GPDesign]] = []

    constructive = _decomposition_design(ch, u_size)
    if constructive is not None:
        candidates.append(("decomposition", constructive))

    table_space = q ** (u_size * q)
    if table_space <= sweep_cap:
        for flat in itertools.product(range(q), repeat=u_size * q):
            xmap = np.asarray(flat, dtype=np.int64).reshape(u_size, q)
            t_init = _tilted_rows(q, u_size)
            t = _ba_rows(ps1, ps2, _y_of(ch, xmap), t_init, max_iters=200)
            candidates.append(("sweep", GPDesign(t, TableFunction((u_size, q), q, xmap.ravel()))))
    else:
        def one_restart(r: int) -> tuple[str, GPDesign]:
            rng = substream(seed, SEARCH_STREAM, r)
            xmap = rng.integers(0, q, size=(u_size, q), dtype=np.int64)
            w = rng.random((q, u_size))
            t = w / w.sum(axis=1, keepdims=True)
            t, xmap = _alternate(ch, ps1, ps2, t, xmap)
            return (f"restart:{r}", GPDesign(t, TableFunction((u_size, q), q, xmap.ravel())))

        if jobs > 1 and restarts > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                candidates.extend(pool.map(one_restart, range(restarts)))
        else:
            candidates.extend(one_restart(r) for r in range(restarts))

    best: Optional[tuple[float, str, GPDesign]] = None
    for origin, design in candidates:
        value = gp_objective(ch, design)
        if best is None or value > best[0] + 1e-15:
            best = (value, origin, design)
    if best is None:
        raise ConfigError("no candidates evaluated")
    return GPSearchResult(best[2], best[0], best[1], u_size, restarts)


def _tilted_rows(q: int, u_size: int) -> np.ndarray:
    """Deterministic near-uniform rows; the tilt breaks symmetric saddles."""
    base = np.ones((q, u_size))
    tilt = 1e-3 * (1.0 + np.arange(u_size))[None, :] / (u_size + np.arange(q))[:, None]
    rows = base + tilt
    return rows / rows.sum(axis=1, keepdims=True)


def _alternate(ch: TwoStateChannel, ps1: np.ndarray, ps2: np.ndarray,
               t: np.ndarray, xmap: np.ndarray, rounds: int = 15) -> tuple[np.ndarray, np.ndarray]:
    """Alternate row ascent with greedy single-cell input-table sweeps."""
    q = ch.field.q
    u_size = xmap.shape[0]
    cube = ch.f.as_array()
    y_of = _y_of(ch, xmap)
    for _ in range(rounds):
        t = _ba_rows(ps1, ps2, y_of, t)
        current = _objective_nats(ps1, ps2, y_of, t)
        improved = False
        for u in range(u_size):
            for s1 in range(q):
                orig = xmap[u, s1]
                best_v, best_j = orig, current
                for v in range(q):
                    if v == orig:
                        continue
                    y_of[u, s1, :] = cube[v, s1, :]
                    j = _objective_nats(ps1, ps2, y_of, t)
                    if j > best_j + 1e-10:
                        best_v, best_j = v, j
                xmap[u, s1] = best_v
                y_of[u, s1, :] = cube[best_v, s1, :]
                if best_v != orig:
                    current = best_j
                    improved = True
        if not improved:
            break
    return t, xmap


# ---------------------------------------------------------------------------
# additive-form entropy minimization


@dataclass(frozen=True)
class MinEntropySearchResult:
    """Outcome of one entropy-minimization run over encoding tables g.

    best_entropy_bits is per symbol; trace lists (candidates evaluated,
    best so far) at every improvement.
    """

    n: int
    best_g: TableFunction
    best_entropy_bits: float
    method: str
    trace: tuple[tuple[int, float], ...]
    evaluated: int
    search_space: int


def _require_additive(ch: TwoStateChannel) -> TableFunction:
    shift = ch.additive_shift()
    if shift is None:
        raise ConfigError("channel is not in the additive form y = x + shift(s1, s2)")
    return shift


def _pack(digits: tuple[int, ...], q: int) -> int:
    idx = 0
    for d in digits:
        idx = idx * q + d
    return idx


def _unpack(idx: int, q: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(idx % q)
        idx //= q
    return tuple(reversed(out))


def _xlogx_subset_table(psup: np.ndarray) -> np.ndarray:
    """xlogx of every subset sum of support probabilities, bitmask indexed.

    Computed once here (NumPy log2) and shared by both kernel backends,
    which keeps their float work bit-identical.
    """
    s = len(psup)
    sums = np.zeros(1 << s)
    for mask in range(1, 1 << s):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + psup[low.bit_length() - 1]
    out = np.zeros(1 << s)
    nz = sums > 0
    out[nz] = sums[nz] * np.log2(sums[nz])
    return out


def additive_entropy(ch: TwoStateChannel, g: TableFunction, n: int = 1) -> float:
    """Per-symbol conditional entropy of g(S1^n) + shift^n given S2^n.

    Direct enumeration, independent of the scan and anneal kernels; used
    as the cross-checking evaluator.  g maps n field symbols to one
    packed index over F_q^n.
    """
    shift = _require_additive(ch)
    q = ch.field.q
    if g.domain != (q,) * n or g.codomain != q ** n:
        raise ConfigError(f"g must map F_q^{n} to F_q^{n}")
    grid = shift.as_array()
    ps1 = ch.ps1.as_float()
    ps2 = ch.ps2.as_float()
    sup1 = ch.ps1.support()
    sup2 = ch.ps2.support()
    h = 0.0
    for s2_tuple in itertools.product(sup2, repeat=n):
        p_s2 = math.prod(ps2[t] for t in s2_tuple)
        buckets: dict[tuple[int, ...], float] = {}
        for s1_tuple in itertools.product(sup1, repeat=n):
            p_s1 = math.prod(ps1[t] for t in s1_tuple)
            gv = _unpack(g(*s1_tuple), q, n)
            v = tuple((gv[i] + int(grid[s1_tuple[i], s2_tuple[i]])) % q for i in range(n))
            buckets[v] = buckets.get(v, 0.0) + p_s1
        h_s2 = -sum(p * math.log2(p) for p in buckets.values() if p > 0)
        h += p_s2 * h_s2
    return h / n + 0.0


def min_entropy_exhaustive(ch: TwoStateChannel, cap: int = DEFAULT_SCAN_CAP,
                           jobs: int = 1) -> MinEntropySearchResult:
    """Exact per-letter minimum of the conditional output entropy.

    Scans every g: F_q -> F_q; tables differing only where S1 has no
    mass are equivalent, so the scan runs over the support digits and
    reports the lexicographically first full table achieving the
    minimum (dead cells fixed at 0).
    """
    shift = _require_additive(ch)
    q = ch.field.q
    search_space = q ** q
    if search_space > cap:
        raise BudgetError(f"scan over {search_space} tables exceeds the cap {cap}")
    sup = ch.ps1.support()
    s = len(sup)
    psup = ch.ps1.as_float()[sup]
    xlogx = _xlogx_subset_table(psup)
    grid = shift.as_array()
    shift_sub = np.asarray([[int(grid[s1, s2]) for s2 in range(q)] for s1 in sup],
                           dtype=np.int64)
    ps2 = ch.ps2.as_float()
    total = q ** s

    chunk = 1 << 16
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]

    def run(rg: tuple[int, int]):
        return _kernels.scan_additive(shift_sub, q, xlogx, ps2, rg[0], rg[1])

    if jobs > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run, ranges))
    else:
        parts = [run(rg) for rg in ranges]

    best_val = math.inf
    best_idx = -1
    trace: list[tuple[int, float]] = []
    for (lo, _), (_, _, improvements) in zip(ranges, parts):
        for idx, val in improvements:
            if val < best_val:
                best_val = val
                best_idx = idx
                trace.append((idx + 1, val + 0.0))
    best_val += 0.0  # drop a possible negative zero from the negated accumulator

    digits = _unpack(best_idx, q, s)
    table = np.zeros(q, dtype=np.int64)
    for j, s1 in enumerate(sup):
        table[s1] = digits[j]
    best_g = TableFunction((q,), q, table)
    check = additive_entropy(ch, best_g, 1)
    if abs(check - best_val) > _IDENT_TOL:
        raise InvariantError(
            f"scan minimum {best_val} does not re-evaluate: {check}"
        )
    return MinEntropySearchResult(1, best_g, best_val, "exhaustive",
                                  tuple(trace), total, search_space)


def quadratic_entropy(ch: TwoStateChannel, n: int = 1) -> float:
    """Per-symbol entropy achieved by the squaring table g(s) = s*s.

    Only defined for the multiplying shift s1 * s2.  For n = 2 the
    per-letter lift is evaluated explicitly and must match the n = 1
    value for i.i.d. states.
    """
    shift = _require_additive(ch)
    q = ch.field.q
    if not np.array_equal(shift.as_array(), mul2(ch.field).as_array()):
        raise ConfigError("the squaring table is specific to the s1 * s2 shift")
    g1 = TableFunction((q,), q, np.asarray([(s * s) % q for s in range(q)], dtype=np.int64))
    v1 = additive_entropy(ch, g1, 1)
    if n == 1:
        return v1
    if n == 2:
        sq = [(s * s) % q for s in range(q)]
        g2 = TableFunction.from_callable((q, q), q * q,
                                         lambda s, t: sq[s] * q + sq[t])
        v2 = additive_entropy(ch, g2, 2)
        if abs(v2 - v1) > _IDENT_TOL:
            raise InvariantError(f"per-letter table not additive: {v1} vs {v2}")
        return v2
    raise ConfigError("only n in (1, 2) is evaluated exactly")


@dataclass(frozen=True)
class EntropySandwichReport:
    """Per-letter entropy minimum against the sandwich constants.

    lower_bound_bits = log2(q/2) and upper_bound_bits = log2(q/(2-1/q));
    the squaring table must not exceed the upper constant and the
    per-letter minimum must not fall below the lower one under the
    default state convention.  capacity_lb_bits = log2(q) - H_min(1) and
    the corollary cap is one bit.
    """

    q: int
    h_min1_bits: float
    quadratic_bits: float
    lower_bound_bits: float
    upper_bound_bits: float
    capacity_lb_bits: float
    corollary_cap_bits: float
    lower_bound_ok: bool
    quadratic_within_upper: bool
    capacity_within_corollary: bool
    search: MinEntropySearchResult


def entropy_sandwich_check(field: FieldSpec, ps1: Optional[Pmf] = None,
                   ps2: Optional[Pmf] = None, cap: int = DEFAULT_SCAN_CAP,
                   jobs: int = 1) -> EntropySandwichReport:
    ch = TwoStateChannel.sum_product(field, ps1, ps2)
    q = field.q
    res = min_entropy_exhaustive(ch, cap=cap, jobs=jobs)
    quad = quadratic_entropy(ch, 1)
    lower = math.log2(q / 2)
    upper = math.log2(q / (2 - 1 / q))
    cap_lb = capacity_from_entropy(q, res.best_entropy_bits)
    return EntropySandwichReport(
        q=q,
        h_min1_bits=res.best_entropy_bits,
        quadratic_bits=quad,
        lower_bound_bits=lower,
        upper_bound_bits=upper,
        capacity_lb_bits=cap_lb,
        corollary_cap_bits=1.0,
        lower_bound_ok=res.best_entropy_bits >= lower - _IDENT_TOL,
        quadratic_within_upper=quad <= upper + _IDENT_TOL,
        capacity_within_corollary=cap_lb <= 1.0 + _IDENT_TOL,
        search=res,
    )


def capacity_from_entropy(q: int, h_bits: float) -> float:
    """log2(q) - h, the capacity implied by an achievable entropy value."""
    if h_bits < -_IDENT_TOL:
        raise ConfigError("entropy cannot be negative")
    return math.log2(q) - h_bits


def min_entropy_anneal(ch: TwoStateChannel, n: int = 2, budget: int = 10 ** 5,
                       seed: int = 0, t0: float = 0.5,
                       cooling: Optional[float] = None) -> MinEntropySearchResult:
    """Seeded annealing over tables g: F_q^n -> F_q^n.

    The chain starts from the per-letter lift of the exhaustive n = 1
    optimum, so the reported value never exceeds it.  Proposals mutate
    one table cell on the state support; acceptance follows Metropolis
    with geometric cooling.  Heuristic: the result is an upper bound on
    the true multi-letter minimum, nothing more.
    """
    _require_additive(ch)
    q = ch.field.q
    big_q = q ** n
    if n < 2:
        raise ConfigError("annealing is for n >= 2; use the exhaustive scan at n = 1")
    if big_q > ANNEAL_ALPHABET_CAP:
        raise BudgetError(f"alphabet q^n = {big_q} exceeds the cap {ANNEAL_ALPHABET_CAP}")
    if budget < 1 or budget > 10 ** 7:
        raise BudgetError("annealing budget must be in [1, 10^7]")
    sup1 = ch.ps1.support()
    if len(sup1) ** n > _ANNEAL_SUPPORT_CAP:
        raise BudgetError(
            f"support of S1^{n} has {len(sup1) ** n} points, cap is {_ANNEAL_SUPPORT_CAP}"
        )
    shift = _require_additive(ch)
    grid = shift.as_array()
    ps1 = ch.ps1.as_float()
    ps2 = ch.ps2.as_float()

    sup_tuples = list(itertools.product(sup1, repeat=n))
    sup_values = np.asarray([_pack(tp, q) for tp in sup_tuples], dtype=np.int64)
    psup = np.asarray([math.prod(ps1[t] for t in tp) for tp in sup_tuples])
    xlogx = _xlogx_subset_table(psup)

    s2_tuples = list(itertools.product(range(q), repeat=n))
    ps2n = np.asarray([math.prod(ps2[t] for t in tp) for tp in s2_tuples])
    f2 = np.asarray(
        [[_pack(tuple(int(grid[tp[i], s2[i]]) for i in range(n)), q) for s2 in s2_tuples]
         for tp in sup_tuples], dtype=np.int64)
    addq = np.asarray(
        [[_pack(tuple((a[i] + b[i]) % q for i in range(n)), q) for b in s2_tuples]
         for a in s2_tuples], dtype=np.int64)

    base = min_entropy_exhaustive(ch)
    g1 = base.best_g.table
    g0 = np.asarray(
        [_pack(tuple(int(g1[d]) for d in _unpack(idx, q, n)), q) for idx in range(big_q)],
        dtype=np.int64)

    rng = substream(seed, ANNEAL_STREAM)
    positions = rng.integers(0, len(sup_tuples), size=budget, dtype=np.int64)
    deltas = rng.integers(1, big_q, size=budget, dtype=np.int64)
    with np.errstate(divide="ignore"):
        log_accept = np.log(rng.random(budget))
    alpha = cooling if cooling is not None else (1e-4 / t0) ** (1.0 / budget)

    best, best_g, improvements, init_val = _kernels.anneal_additive(
        f2, sup_values, big_q, addq, xlogx, ps2n, g0,
        positions, deltas, log_accept, t0, alpha)

    per_symbol = best / n + 0.0
    if per_symbol > base.best_entropy_bits + _IDENT_TOL:
        raise InvariantError("anneal lost its initialization guarantee")
    table = TableFunction((q,) * n, big_q, best_g)
    check = additive_entropy(ch, table, n)
    if abs(check - per_symbol) > _IDENT_TOL:
        raise InvariantError(f"anneal value {per_symbol} does not re-evaluate: {check}")
    trace = [(1, init_val / n)]
    trace.extend((steps + 1, val / n) for steps, val in improvements)
    return MinEntropySearchResult(
        n, table, per_symbol, "anneal", tuple(trace),
        budget + 1, big_q ** big_q,
    )
