"""Total functions between products of finite alphabets, stored as truth tables.

The text file format accepted by the CLI is:

    k1 k2 ... -> m
    t0 t1 t2 ...

First line: domain alphabet sizes, an arrow, the codomain size.  Then the
table entries in row-major order (last argument varies fastest), separated
by arbitrary whitespace and line breaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError
from .field import FieldSpec


@dataclass(frozen=True)
class TableFunction:
    """A total function prod(domain) -> 0..codomain-1 as a dense table."""

    domain: tuple[int, ...]
    codomain: int
    table: np.ndarray  # flat int array, row-major over the domain

    def __post_init__(self) -> None:
        if len(self.domain) == 0:
            raise ConfigError("a table function needs at least one argument")
        if any(k < 1 for k in self.domain) or self.codomain < 1:
            raise ConfigError("alphabet sizes must be positive")
        if self.table.ndim != 1 or self.table.size != math.prod(self.domain):
            raise ConfigError(
                f"table length {self.table.size} does not match domain {self.domain}"
            )
        if self.table.size and (self.table.min() < 0 or self.table.max() >= self.codomain):
            raise ConfigError("table entries must lie in the codomain")

    @classmethod
    def from_callable(cls, domain: Sequence[int], codomain: int,
                      fn: Callable[..., int]) -> TableFunction:
        domain = tuple(int(k) for k in domain)
        values = [int(fn(*point)) for point in np.ndindex(*domain)]
        return cls(domain, int(codomain), np.asarray(values, dtype=np.int64))

    @property
    def arity(self) -> int:
        return len(self.domain)

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ConfigError(f"expected {self.arity} arguments, got {len(args)}")
        idx = 0
        for a, k in zip(args, self.domain):
            if not 0 <= a < k:
                raise ConfigError(f"argument {a} outside alphabet of size {k}")
            idx = idx * k + a
        return int(self.table[idx])

    def as_array(self) -> np.ndarray:
        """The table reshaped to the domain, one axis per argument."""
        return self.table.reshape(self.domain)

    def format(self) -> str:
        head = " ".join(str(k) for k in self.domain) + f" -> {self.codomain}"
        body = " ".join(str(int(v)) for v in self.table.tolist())
        return head + "\n" + body + "\n"

    @classmethod
    def parse(cls, text: str) -> TableFunction:
        lines = text.splitlines()
        header_no = None
        for i, line in enumerate(lines):
            if line.strip():
                header_no = i
                break
        if header_no is None:
            raise ConfigError("line 1: empty truth-table file")
        header = lines[header_no]
        if "->" not in header:
            raise ConfigError(f"line {header_no + 1}: header must look like 'k1 k2 -> m'")
        left, _, right = header.partition("->")
        try:
            domain = tuple(int(tok) for tok in left.split())
            codomain = int(right.strip())
        except ValueError as exc:
            raise ConfigError(f"line {header_no + 1}: bad header: {exc}") from None
        if not domain:
            raise ConfigError(f"line {header_no + 1}: header lists no domain sizes")
        entries: list[int] = []
        for j in range(header_no + 1, len(lines)):
            for tok in lines[j].split():
                try:
                    entries.append(int(tok))
                except ValueError:
                    raise ConfigError(f"line {j + 1}: bad table entry {tok!r}") from None
        want = math.prod(domain)
        if len(entries) != want:
            raise ConfigError(
                f"line {len(lines)}: expected {want} table entries, found {len(entries)}"
            )
        try:
            return cls(domain, codomain, np.asarray(entries, dtype=np.int64))
        except ConfigError as exc:
            raise ConfigError(f"line {header_no + 2}: {exc}") from None

    @classmethod
    def read(cls, path) -> TableFunction:
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.format())


# Builders for the function families everything else studies.

def sum3(field: FieldSpec) -> TableFunction:
    """(a, b, c) -> a + b + c over F_q."""
    q = field.q
    return TableFunction.from_callable((q, q, q), q, lambda a, b, c: (a + b + c) % q)


def sum_product(field: FieldSpec) -> TableFunction:
    """(a, b, c) -> a + b * c over F_q."""
    q = field.q
    return TableFunction.from_callable((q, q, q), q, lambda a, b, c: (a + b * c) % q)


def product3_nonzero(field: FieldSpec) -> TableFunction:
    """(a, b, c) -> a * b * c on the nonzero elements, indexed as value - 1."""
    q = field.q
    if q < 3:
        raise ConfigError("the nonzero product alphabet needs q >= 3")
    k = q - 1
    return TableFunction.from_callable(
        (k, k, k), k,
        lambda a, b, c: ((a + 1) * (b + 1) * (c + 1)) % q - 1,
    )


def mul2(field: FieldSpec) -> TableFunction:
    """(a, b) -> a * b over F_q."""
    q = field.q
    return TableFunction.from_callable((q, q), q, lambda a, b: (a * b) % q)


def add2(field: FieldSpec) -> TableFunction:
    """(a, b) -> a + b over F_q."""
    q = field.q
    return TableFunction.from_callable((q, q), q, lambda a, b: (a + b) % q)


def mul2_nonzero(field: FieldSpec) -> TableFunction:
    """(a, b) -> a * b on the nonzero elements, indexed as value - 1."""
    q = field.q
    if q < 3:
        raise ConfigError("the nonzero product alphabet needs q >= 3")
    k = q - 1
    return TableFunction.from_callable(
        (k, k), k, lambda a, b: ((a + 1) * (b + 1)) % q - 1
    )
