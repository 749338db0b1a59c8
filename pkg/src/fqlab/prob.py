"""Exact probability bookkeeping over finite alphabets.

Alphabets are dense index sets 0..k-1; any field semantics live in the
table functions that feed distributions in, not here.  All information
measures are in bits.

Two numeric modes share one code path: float64 (primary) and exact
rationals (``fractions.Fraction`` entries in an object array), used by
the test oracles to rule out probability-arithmetic error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError
from .tables import TableFunction

_NORM_TOL = 1e-12


def _as_prob_array(probs, exact: bool) -> np.ndarray:
    if exact:
        flat = np.asarray(probs, dtype=object).ravel()
        arr = np.array([Fraction(p) for p in flat], dtype=object)
        arr = arr.reshape(np.shape(probs))
    else:
        arr = np.asarray(probs, dtype=np.float64).copy()
        arr.flags.writeable = False
    return arr


def _validate_mass(arr: np.ndarray) -> None:
    flat = arr.ravel()
    if any(p < 0 for p in flat.tolist()):
        raise ConfigError("probabilities must be non-negative")
    total = flat.sum()
    if arr.dtype == object:
        if total != 1:
            raise ConfigError(f"probabilities must sum to 1 exactly, got {total}")
    elif abs(float(total) - 1.0) > _NORM_TOL:
        raise ConfigError(f"probabilities must sum to 1 within {_NORM_TOL}, got {total!r}")


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over the alphabet 0..size-1."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = self.probs
        if arr.ndim != 1 or arr.size == 0:
            raise ConfigError("a pmf needs a one-dimensional, non-empty table")
        _validate_mass(arr)

    @classmethod
    def of(cls, probs: Iterable, *, exact: bool = False) -> Pmf:
        return cls(_as_prob_array(list(probs), exact))

    @classmethod
    def uniform(cls, size: int, *, exact: bool = False) -> Pmf:
        if exact:
            return cls.of([Fraction(1, size)] * size, exact=True)
        return cls.of([1.0 / size] * size)

    @classmethod
    def uniform_nonzero(cls, size: int, *, exact: bool = False) -> Pmf:
        """Uniform over 1..size-1, zero mass at 0."""
        if size < 2:
            raise ConfigError("uniform_nonzero needs an alphabet of size >= 2")
        if exact:
            return cls.of([Fraction(0)] + [Fraction(1, size - 1)] * (size - 1), exact=True)
        return cls.of([0.0] + [1.0 / (size - 1)] * (size - 1))

    @classmethod
    def point(cls, size: int, at: int, *, exact: bool = False) -> Pmf:
        if not 0 <= at < size:
            raise ConfigError(f"point mass location {at} outside alphabet of size {size}")
        probs = [0] * size
        probs[at] = 1
        if exact:
            return cls.of([Fraction(p) for p in probs], exact=True)
        return cls.of([float(p) for p in probs])

    @classmethod
    def bernoulli(cls, p: float) -> Pmf:
        return cls.of([1.0 - p, p])

    @property
    def size(self) -> int:
        return int(self.probs.shape[0])

    @property
    def exact(self) -> bool:
        return self.probs.dtype == object

    def support(self) -> list[int]:
        return [i for i, p in enumerate(self.probs.tolist()) if p > 0]

    def as_float(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs.tolist()], dtype=np.float64)

    def to_json(self) -> dict:
        return {"alphabet": self.size, "probs": [float(p) for p in self.probs.tolist()]}

    @classmethod
    def from_json(cls, obj: dict) -> Pmf:
        p = cls.of(obj["probs"])
        if p.size != obj["alphabet"]:
            raise ConfigError("pmf alphabet size disagrees with probability list")
        return p


@dataclass(frozen=True)
class JointPmf:
    """Dense joint distribution; axis i ranges over 0..shape[i]-1."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        if self.probs.ndim < 1:
            raise ConfigError("a joint pmf needs at least one axis")
        _validate_mass(self.probs)

    @classmethod
    def of(cls, probs, *, exact: bool = False) -> JointPmf:
        return cls(_as_prob_array(probs, exact))

    @property
    def alphabets(self) -> tuple[int, ...]:
        return tuple(int(s) for s in self.probs.shape)

    @property
    def num_axes(self) -> int:
        return self.probs.ndim

    def _check_axes(self, axes: Sequence[int]) -> tuple[int, ...]:
        axes = tuple(axes)
        if len(set(axes)) != len(axes):
            raise ConfigError(f"repeated axis in {axes}")
        for a in axes:
            if not 0 <= a < self.num_axes:
                raise ConfigError(f"axis {a} out of range for {self.num_axes} axes")
        return axes

    def marginal(self, axes: Sequence[int]) -> JointPmf:
        """Marginal joint over the given axes, in the given order."""
        axes = self._check_axes(axes)
        if not axes:
            raise ConfigError("marginal needs at least one axis")
        drop = tuple(a for a in range(self.num_axes) if a not in axes)
        arr = self.probs.sum(axis=drop) if drop else self.probs
        kept_sorted = sorted(axes)
        perm = tuple(kept_sorted.index(a) for a in axes)
        if perm != tuple(range(len(axes))):
            arr = arr.transpose(perm)
        return JointPmf(arr)

    def pmf(self, axis: int) -> Pmf:
        return Pmf(self.marginal([axis]).probs)

    def to_json(self) -> dict:
        return {
            "alphabets": list(self.alphabets),
            "probs": [float(p) for p in self.probs.ravel().tolist()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> JointPmf:
        shape = tuple(int(k) for k in obj["alphabets"])
        flat = np.asarray(obj["probs"], dtype=np.float64)
        if flat.size != math.prod(shape):
            raise ConfigError("joint pmf table length disagrees with alphabet sizes")
        return cls(flat.reshape(shape))


def entropy(dist: Pmf | JointPmf) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    total = 0.0
    for p in dist.probs.ravel().tolist():
        fp = float(p)
        if fp > 0.0:
            total += fp * math.log2(fp)
    return -total


def conditional_entropy(joint: JointPmf, target_axes: Sequence[int],
                        given_axes: Sequence[int]) -> float:
    """H(targets | givens) = H(targets, givens) - H(givens), in bits."""
    t = joint._check_axes(target_axes)
    g = joint._check_axes(given_axes)
    if set(t) & set(g):
        raise ConfigError("target and given axes must be disjoint")
    both = joint.marginal(tuple(t) + tuple(g))
    if not g:
        return entropy(both)
    return entropy(both) - entropy(joint.marginal(g))


def mutual_information(joint: JointPmf, axes1: Sequence[int],
                       axes2: Sequence[int]) -> float:
    """I(axes1; axes2) = H(axes1) + H(axes2) - H(axes1, axes2), in bits.

    Can be a tiny negative number (order 1e-15) from float rounding.
    """
    a1 = joint._check_axes(axes1)
    a2 = joint._check_axes(axes2)
    if set(a1) & set(a2):
        raise ConfigError("the two axis groups must be disjoint")
    return (entropy(joint.marginal(a1)) + entropy(joint.marginal(a2))
            - entropy(joint.marginal(tuple(a1) + tuple(a2))))


def pushforward(inputs: Sequence[Pmf], fn: TableFunction,
                keep_inputs: bool = True) -> JointPmf:
    """Exact joint law of independent inputs pushed through a table function.

    Returns the law of (inputs..., fn(inputs)) when keep_inputs is set,
    else the law of fn(inputs) alone.
    """
    if len(inputs) != fn.arity:
        raise ConfigError(f"function expects {fn.arity} inputs, got {len(inputs)}")
    for i, (p, k) in enumerate(zip(inputs, fn.domain)):
        if p.size != k:
            raise ConfigError(f"input {i} has alphabet {p.size}, function expects {k}")
    exact = any(p.exact for p in inputs)
    if exact and not all(p.exact for p in inputs):
        raise ConfigError("cannot mix exact and float inputs in one pushforward")
    zero = Fraction(0) if exact else 0.0
    shape = (tuple(fn.domain) + (fn.codomain,)) if keep_inputs else (fn.codomain,)
    out = np.full(shape, zero, dtype=object if exact else np.float64)
    supports = [p.support() for p in inputs]
    probs = [p.probs for p in inputs]

    def rec(idx: int, point: list[int], mass) -> None:
        if idx == len(inputs):
            v = fn(*point)
            key = tuple(point) + (v,) if keep_inputs else (v,)
            out[key] += mass
            return
        for s in supports[idx]:
            point.append(s)
            rec(idx + 1, point, mass * probs[idx][s])
            point.pop()

    one = Fraction(1) if exact else 1.0
    rec(0, [], one)
    return JointPmf(out)


def product_extension(p: Pmf, n: int) -> JointPmf:
    """The n-fold i.i.d. product law, one axis per coordinate."""
    if n < 1:
        raise ConfigError("product extension needs n >= 1")
    zero_d = p.probs
    out = zero_d
    for _ in range(n - 1):
        out = np.multiply.outer(out, zero_d)
    return JointPmf(out.copy())
