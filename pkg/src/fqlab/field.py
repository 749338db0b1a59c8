"""Exact arithmetic over prime fields F_q.

Elements carry a reference to their field; mixing elements of different
fields is a hard error rather than a silent coercion.  Only prime q is
supported, extension fields are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, FieldMismatchError, InvariantError


def is_prime(n: int) -> bool:
    """Trial-division primality check (q is always tiny here)."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_q, q prime and >= 2."""

    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q < 2:
            raise ConfigError(f"field order must be an integer >= 2, got {self.q!r}")
        if not is_prime(self.q):
            raise ConfigError(f"field order {self.q} is not prime")

    def element(self, value: int) -> FieldElement:
        return FieldElement(value, self)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(v, self) for v in range(self.q)]

    def nonzero_elements(self) -> list[FieldElement]:
        return [FieldElement(v, self) for v in range(1, self.q)]

    # Dense operation tables, used by the vectorized/kernel code paths.
    @cached_property
    def add_table(self) -> np.ndarray:
        v = np.arange(self.q)
        return (v[:, None] + v[None, :]) % self.q

    @cached_property
    def mul_table(self) -> np.ndarray:
        v = np.arange(self.q)
        return (v[:, None] * v[None, :]) % self.q

    @cached_property
    def neg_table(self) -> np.ndarray:
        return (-np.arange(self.q)) % self.q

    @cached_property
    def inv_table(self) -> np.ndarray:
        """inv_table[0] is a sentinel -1; element-level inv() rejects zero."""
        t = np.full(self.q, -1, dtype=np.int64)
        for a in range(1, self.q):
            t[a] = pow(a, self.q - 2, self.q)
        return t

    def inv(self, value: int) -> int:
        if value % self.q == 0:
            raise ConfigError("zero has no multiplicative inverse")
        return pow(value, self.q - 2, self.q)

    def __repr__(self) -> str:
        return f"GF({self.q})"


@dataclass(frozen=True)
class FieldElement:
    """An element of F_q; immutable, operator overloads stay within one field."""

    value: int
    spec: FieldSpec

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.spec.q:
            raise ConfigError(
                f"value {self.value} out of range for {self.spec!r}"
            )

    def _same_field(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise FieldMismatchError(
                f"cannot combine {self!r} with non-field value {other!r}"
            )
        if other.spec != self.spec:
            raise FieldMismatchError(
                f"cannot combine elements of {self.spec!r} and {other.spec!r}"
            )

    def __add__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return FieldElement((self.value + other.value) % self.spec.q, self.spec)

    def __sub__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return FieldElement((self.value - other.value) % self.spec.q, self.spec)

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return FieldElement((self.value * other.value) % self.spec.q, self.spec)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return self * other.inv()

    def __neg__(self) -> FieldElement:
        return FieldElement((-self.value) % self.spec.q, self.spec)

    def inv(self) -> FieldElement:
        if self.value == 0:
            raise ConfigError(f"zero has no multiplicative inverse in {self.spec!r}")
        return FieldElement(pow(self.value, self.spec.q - 2, self.spec.q), self.spec)

    def __pow__(self, k: int) -> FieldElement:
        if not isinstance(k, int):
            raise ConfigError("exponent must be an integer")
        if k < 0:
            return self.inv() ** (-k)
        return FieldElement(pow(self.value, k, self.spec.q), self.spec)

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.spec.q})"


def smallest_generator(field: FieldSpec) -> int:
    """Smallest generator of the multiplicative group F_q^*.

    For q = 2 the group is trivial and 1 generates it.
    """
    q = field.q
    if q == 2:
        return 1
    for g in range(2, q):
        seen = set()
        x = 1
        for _ in range(q - 1):
            x = (x * g) % q
            seen.add(x)
        if len(seen) == q - 1:
            return g
    raise InvariantError(f"no generator found for GF({q})")  # pragma: no cover
