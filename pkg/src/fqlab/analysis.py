"""Structural analysis of functions over finite alphabets.

The central question: can a three-argument function be split so that the
first two arguments act only through an intermediate value, with the
residual single-argument action invertible?  Functions that split this
way admit clean coding-theoretic solutions; the mixed sum-product form
does not, and the checkers here produce explicit witnesses for that.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .field import FieldSpec, smallest_generator
from .tables import TableFunction


@dataclass(frozen=True)
class SectionPartition:
    """Partition of (a, b) pairs by their section a, b -> F(a, b, .).

    Two pairs are equivalent when they induce the same function of the
    third argument.  Class ids are assigned in row-major first-occurrence
    order over (a, b).
    """

    num_classes: int
    class_index: np.ndarray          # shape (k1, k2), entries in [0, num_classes)
    sections: tuple[tuple[int, ...], ...]  # class id -> values over the third argument

    def members(self, class_id: int) -> list[tuple[int, int]]:
        k1, k2 = self.class_index.shape
        return [(a, b) for a in range(k1) for b in range(k2)
                if self.class_index[a, b] == class_id]

    def representative(self, class_id: int) -> tuple[int, int]:
        return self.members(class_id)[0]


def section_classes(fn: TableFunction) -> SectionPartition:
    """Group (a, b) pairs that induce identical sections of a 3-ary function."""
    if fn.arity != 3:
        raise ConfigError(f"section analysis needs a 3-ary function, got arity {fn.arity}")
    k1, k2, k3 = fn.domain
    cube = fn.as_array()
    index: dict[tuple[int, ...], int] = {}
    class_index = np.zeros((k1, k2), dtype=np.int64)
    sections: list[tuple[int, ...]] = []
    for a in range(k1):
        for b in range(k2):
            sec = tuple(int(v) for v in cube[a, b, :])
            cid = index.get(sec)
            if cid is None:
                cid = len(sections)
                index[sec] = cid
                sections.append(sec)
            class_index[a, b] = cid
    return SectionPartition(len(sections), class_index, tuple(sections))


@dataclass(frozen=True)
class DecompositionResult:
    """Outcome of the two-stage split F(a,b,c) = Ftilde(G(a,b), c).

    ``decomposable`` requires that for every c the classes map to
    pairwise distinct values and every codomain value is reached, i.e.
    each Ftilde(., c) is a bijection from classes onto the codomain.
    ``witness`` explains the first failure: ("collision", c, (a,b),
    (a',b')) for two classes agreeing at c, or ("missing", c, y) for a
    codomain value y unreached at c.  ``violations`` counts all
    colliding class pairs plus all missing values, over all c.
    """

    decomposable: bool
    partition: SectionPartition
    g: Optional[TableFunction]
    ftilde: Optional[TableFunction]
    witness: Optional[tuple]
    violations: int


def decompose(fn: TableFunction) -> DecompositionResult:
    """Decide whether a 3-ary function splits through an intermediate value."""
    part = section_classes(fn)
    k3 = fn.domain[2]
    m = fn.codomain
    t = part.num_classes
    witness = None
    violations = 0
    for c in range(k3):
        buckets: dict[int, list[int]] = {}
        for cid in range(t):
            buckets.setdefault(part.sections[cid][c], []).append(cid)
        for value in sorted(buckets):
            ids = buckets[value]
            violations += len(ids) * (len(ids) - 1) // 2
            if len(ids) > 1 and witness is None:
                witness = ("collision", c,
                           part.representative(ids[0]), part.representative(ids[1]))
        missing = [y for y in range(m) if y not in buckets]
        violations += len(missing)
        if missing and witness is None:
            witness = ("missing", c, missing[0])
    if violations > 0:
        return DecompositionResult(False, part, None, None, witness, violations)
    g = TableFunction(fn.domain[:2], t, part.class_index.ravel().copy())
    ftilde_table = np.array(
        [part.sections[cid][c] for cid in range(t) for c in range(k3)], dtype=np.int64
    )
    ftilde = TableFunction((t, k3), m, ftilde_table)
    return DecompositionResult(True, part, g, ftilde, None, 0)


def g_invertible_in_first(fn: TableFunction) -> bool:
    """True when a -> fn(a, b) is a bijection onto the codomain for every b."""
    if fn.arity != 2:
        raise ConfigError(f"invertibility check needs a 2-ary function, got arity {fn.arity}")
    k1, k2 = fn.domain
    if k1 != fn.codomain:
        return False
    grid = fn.as_array()
    for b in range(k2):
        if len(set(int(v) for v in grid[:, b])) != k1:
            return False
    return True


@dataclass(frozen=True)
class ResidualResult:
    """Search outcome for a first-argument plug a(b) cancelling the b-dependence.

    ``exists`` means some a(.) makes (b, c) -> F(a(b), b, c) a function of
    c alone; the witness table is returned and always verifies
    exhaustively.  ``method`` is "exhaustive" below the alphabet cutoff
    and "heuristic" above it; a heuristic "not found" is inconclusive.
    """

    exists: bool
    a_of_b: Optional[TableFunction]
    method: str
    candidates_checked: int


def _cancels(cube: np.ndarray, assign: tuple[int, ...]) -> bool:
    k2 = cube.shape[1]
    base = cube[assign[0], 0, :]
    for b in range(1, k2):
        if not np.array_equal(cube[assign[b], b, :], base):
            return False
    return True


def residual_dependence(fn: TableFunction, *, exhaustive_limit: int = 6,
                        heuristic_budget: int = 20000, seed: int = 0) -> ResidualResult:
    """Search all plugs a: b -> a for one that removes the b-dependence.

    Exhaustive over all k^k candidate tables for k <= exhaustive_limit,
    in lexicographic order of (a(0), a(1), ...); seeded random restarts
    with greedy single-cell descent above the limit.
    """
    if fn.arity != 3:
        raise ConfigError(f"residual analysis needs a 3-ary function, got arity {fn.arity}")
    k1, k2, _ = fn.domain
    if k1 != k2:
        raise ConfigError("the first two alphabets must have equal size")
    cube = fn.as_array()
    k = k1
    if k <= exhaustive_limit:
        checked = 0
        for assign in itertools.product(range(k), repeat=k):
            checked += 1
            if _cancels(cube, assign):
                table = TableFunction((k,), k, np.asarray(assign, dtype=np.int64))
                return ResidualResult(True, table, "exhaustive", checked)
        return ResidualResult(False, None, "exhaustive", checked)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    checked = 0

    def mismatch_count(assign: np.ndarray) -> int:
        base = cube[assign[0], 0, :]
        return int(sum(np.count_nonzero(cube[assign[b], b, :] != base)
                       for b in range(1, k)))

    while checked < heuristic_budget:
        assign = rng.integers(0, k, size=k)
        checked += 1
        score = mismatch_count(assign)
        improved = True
        while improved and score > 0 and checked < heuristic_budget:
            improved = False
            for b in range(k):
                for v in range(k):
                    if v == assign[b]:
                        continue
                    trial = assign.copy()
                    trial[b] = v
                    checked += 1
                    s = mismatch_count(trial)
                    if s < score:
                        assign, score, improved = trial, s, True
        if score == 0:
            table = TableFunction((k,), k, assign.astype(np.int64))
            return ResidualResult(True, table, "heuristic", checked)
    return ResidualResult(False, None, "heuristic", checked)


@dataclass(frozen=True)
class OpProperties:
    commutative: bool
    associative: bool


def op_properties(op: TableFunction) -> OpProperties:
    """Exhaustive commutativity and associativity checks for a binary operation."""
    if op.arity != 2:
        raise ConfigError(f"operation checks need a 2-ary function, got arity {op.arity}")
    k1, k2 = op.domain
    if k1 != k2 or op.codomain != k1:
        raise ConfigError("operation checks need op: K x K -> K with one alphabet K")
    grid = op.as_array()
    commutative = bool(np.array_equal(grid, grid.T))
    associative = True
    k = k1
    for a in range(k):
        for b in range(k):
            ab = int(grid[a, b])
            for c in range(k):
                if int(grid[ab, c]) != int(grid[a, int(grid[b, c])]):
                    associative = False
                    break
            if not associative:
                break
        if not associative:
            break
    return OpProperties(commutative, associative)


@dataclass(frozen=True)
class DiscreteLog:
    """Discrete logarithm table for F_q^* to the smallest generator.

    log[x] satisfies generator**log[x] = x for x != 0; log[0] is the
    sentinel -1.  exp[i] = generator**i for i in 0..q-2.
    """

    generator: int
    log: np.ndarray
    exp: np.ndarray


def discrete_log_table(field: FieldSpec) -> DiscreteLog:
    q = field.q
    g = smallest_generator(field)
    log = np.full(q, -1, dtype=np.int64)
    exp = np.zeros(max(q - 1, 1), dtype=np.int64)
    x = 1
    for i in range(q - 1):
        exp[i] = x
        log[x] = i
        x = (x * g) % q
    return DiscreteLog(g, log, exp)
