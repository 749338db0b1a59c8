"""The sum-product functional source-coding instance and its rate bounds.

One encoder observes the pair X = (A, B); the decoder observes
Y = A + B*C as side information and must output Z = C, which equals
(Y - A) / B on the support.  The minimum encoding rate is pinned between
H(X|Y) and H(Z|Y), and for this source family the upper bound is tight;
with A uniform it evaluates to H(B) + H(C).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import ConfigError, InvariantError
from .field import FieldSpec
from .prob import JointPmf, Pmf, conditional_entropy, entropy
from .tables import TableFunction

_UNIFORM_TOL = 1e-12
_IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class SumProductSource:
    """Independent A, B, C over F_q with B supported away from zero."""

    field: FieldSpec
    pa: Pmf
    pb: Pmf
    pc: Pmf

    def __post_init__(self) -> None:
        q = self.field.q
        for name, p in (("pa", self.pa), ("pb", self.pb), ("pc", self.pc)):
            if p.size != q:
                raise ConfigError(f"{name} has alphabet {p.size}, field has order {q}")
        if float(self.pb.probs[0]) != 0.0:
            raise ConfigError("the multiplier B must have zero mass at 0")

    def a_uniform(self) -> bool:
        target = 1.0 / self.field.q
        return all(abs(float(p) - target) <= _UNIFORM_TOL for p in self.pa.probs.tolist())


@dataclass(frozen=True)
class FunctionalInstance:
    """Joint law of (X, Y, Z) plus the reconstruction table Z = f(X, Y).

    X is the pair (a, b) packed as a*q + b; axis order in the joint is
    (X, Y, Z) with alphabet sizes (q*q, q, q).  Cells of f with b = 0
    carry zero probability and are filled with 0 by convention.
    """

    source: SumProductSource
    joint: JointPmf
    f: TableFunction

    @property
    def field(self) -> FieldSpec:
        return self.source.field

    def x_index(self, a: int, b: int) -> int:
        return a * self.field.q + b

    def x_pair(self, x: int) -> tuple[int, int]:
        return divmod(x, self.field.q)


def build_instance(src: SumProductSource) -> FunctionalInstance:
    """Exact joint of (X, Y, Z) and the total table f((a,b), y) = (y - a) / b."""
    q = src.field.q
    exact = src.pa.exact or src.pb.exact or src.pc.exact
    zero = Fraction(0) if exact else 0.0
    joint = np.full((q * q, q, q), zero, dtype=object if exact else np.float64)
    pa, pb, pc = src.pa.probs, src.pb.probs, src.pc.probs
    for a in src.pa.support():
        for b in src.pb.support():
            for c in src.pc.support():
                y = (a + b * c) % q
                joint[a * q + b, y, c] += pa[a] * pb[b] * pc[c]

    inv = src.field.inv_table

    def recover(x: int, y: int) -> int:
        a, b = divmod(x, q)
        if b == 0:
            return 0
        return ((y - a) * int(inv[b])) % q

    f = TableFunction.from_callable((q * q, q), q, recover)
    inst = FunctionalInstance(src, JointPmf(joint), f)
    _verify_instance(inst)
    return inst


def _verify_instance(inst: FunctionalInstance) -> None:
    """Z = f(X, Y) and Y = A + B*C must hold pointwise on the support."""
    q = inst.field.q
    probs = inst.joint.probs
    for x in range(q * q):
        a, b = divmod(x, q)
        for y in range(q):
            for z in range(q):
                if float(probs[x, y, z]) <= 0.0:
                    continue
                if inst.f(x, y) != z:
                    raise InvariantError(
                        f"support cell x={x} y={y} z={z} disagrees with the recovery table"
                    )
                if (a + b * z) % q != y:
                    raise InvariantError(
                        f"support cell x={x} y={y} z={z} violates y = a + b*c"
                    )


def rate_bounds(inst: FunctionalInstance) -> tuple[float, float]:
    """(H(X|Y), H(Z|Y)) in bits; the encoding rate lies between them."""
    upper = conditional_entropy(inst.joint, [0], [1])
    lower = conditional_entropy(inst.joint, [2], [1])
    if upper < lower - _IDENTITY_TOL:
        raise InvariantError(f"bound ordering violated: {upper} < {lower}")
    return upper, lower


def rstar(inst: FunctionalInstance) -> float:
    """The minimum achievable encoding rate H(X|Y) in bits.

    For uniform A this must equal H(B) + H(C); the identity is asserted
    rather than assumed.
    """
    value = conditional_entropy(inst.joint, [0], [1])
    if inst.source.a_uniform():
        expect = entropy(inst.source.pb) + entropy(inst.source.pc)
        if abs(value - expect) > _IDENTITY_TOL:
            raise InvariantError(
                f"H(X|Y) = {value} but H(B) + H(C) = {expect} with A uniform"
            )
    return value


def rate_identity_gap(inst: FunctionalInstance) -> float:
    """|H(X|Y) - (H(B) + H(C))|, meaningful when A is uniform."""
    value = conditional_entropy(inst.joint, [0], [1])
    return abs(value - (entropy(inst.source.pb) + entropy(inst.source.pc)))


@dataclass(frozen=True)
class LineCheckReport:
    """Exhaustive intersection count over all ordered pairs of distinct lines."""

    q: int
    max_intersections: int
    worst_pair: tuple[tuple[int, int], tuple[int, int]]
    pairs_checked: int


def line_intersection_check(field: FieldSpec) -> LineCheckReport:
    """Count |{c : a + b*c = a' + b'*c}| for every pair of distinct lines (a, b).

    Brute force over all c per pair; the expected maximum is 1.
    """
    q = field.q
    lines = [(a, b) for a in range(q) for b in range(q)]
    vals = np.array([[(a + b * c) % q for c in range(q)] for (a, b) in lines])
    eq = np.zeros((len(lines), len(lines)), dtype=np.int64)
    for c in range(q):
        col = vals[:, c]
        eq += col[:, None] == col[None, :]
    np.fill_diagonal(eq, -1)
    flat = int(np.argmax(eq))
    i, j = divmod(flat, len(lines))
    return LineCheckReport(
        q=q,
        max_intersections=int(eq[i, j]),
        worst_pair=(lines[i], lines[j]),
        pairs_checked=len(lines) * (len(lines) - 1),
    )


@dataclass(frozen=True)
class ConfusabilityGraph:
    """Graph on positive-probability x values.

    An edge joins x and x' when some side-information value y has
    positive probability with both and the required outputs differ, so
    the decoder must be able to tell them apart.  A complete graph means
    the encoding can do no better than describing X given Y in full.
    """

    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    complete: bool

    def has_edge(self, x: int, xp: int) -> bool:
        return (min(x, xp), max(x, xp)) in self.edges


def confusability_graph(inst: FunctionalInstance) -> ConfusabilityGraph:
    pxy = inst.joint.marginal([0, 1]).probs
    pxy_f = np.array([[float(v) for v in row] for row in pxy.tolist()])
    verts = [x for x in range(pxy_f.shape[0]) if pxy_f[x].sum() > 0.0]
    fvals = inst.f.as_array()
    edges = set()
    for i, x in enumerate(verts):
        for xp in verts[i + 1:]:
            shared = (pxy_f[x] > 0.0) & (pxy_f[xp] > 0.0)
            if np.any(shared & (fvals[x] != fvals[xp])):
                edges.add((x, xp))
    n = len(verts)
    return ConfusabilityGraph(
        vertices=tuple(verts),
        edges=frozenset(edges),
        complete=len(edges) == n * (n - 1) // 2,
    )


def random_source(field: FieldSpec, rng: np.random.Generator,
                  uniform_a: bool = False) -> SumProductSource:
    """Random source from normalized uniform weights; B never touches zero."""
    q = field.q

    def normalized(k: int) -> np.ndarray:
        w = rng.random(k)
        return w / w.sum()

    pa = Pmf.uniform(q) if uniform_a else Pmf.of(normalized(q))
    pb = Pmf.of(np.concatenate([[0.0], normalized(q - 1)]))
    pc = Pmf.of(normalized(q))
    return SumProductSource(field, pa, pb, pc)


def bounds_report(src: SumProductSource,
                  inst: Optional[FunctionalInstance] = None) -> dict:
    """Result payload shared by the library and the CLI."""
    inst = inst or build_instance(src)
    upper, lower = rate_bounds(inst)
    graph = confusability_graph(inst)
    lines = line_intersection_check(src.field)
    return {
        "q": src.field.q,
        "H_B": entropy(src.pb),
        "H_C": entropy(src.pc),
        "H_X_given_Y": upper,
        "H_Z_given_Y": lower,
        "rstar_bits": rstar(inst) if src.a_uniform() else upper,
        "rate_identity_gap": rate_identity_gap(inst),
        "a_uniform": src.a_uniform(),
        "graph_complete": graph.complete,
        "max_line_intersections": lines.max_intersections,
    }
