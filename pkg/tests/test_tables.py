"""Truth-table functions and their text file format."""

import numpy as np
import pytest

from fqlab.errors import ConfigError
from fqlab.field import FieldSpec
from fqlab.tables import (TableFunction, add2, mul2, mul2_nonzero,
                          product3_nonzero, sum3, sum_product)


def test_call_and_validation():
    fn = TableFunction.from_callable((2, 3), 4, lambda a, b: a + b)
    assert fn(1, 2) == 3
    assert fn.arity == 2
    with pytest.raises(ConfigError):
        fn(2, 0)
    with pytest.raises(ConfigError):
        fn(0)
    with pytest.raises(ConfigError):
        TableFunction((2,), 2, np.array([0, 2]))
    with pytest.raises(ConfigError):
        TableFunction((2,), 2, np.array([0, 1, 0]))


def test_as_array_row_major():
    fn = TableFunction((2, 2), 4, np.array([0, 1, 2, 3]))
    grid = fn.as_array()
    assert grid[0, 1] == 1 and grid[1, 0] == 2


def test_format_parse_round_trip():
    fn = sum_product(FieldSpec(3))
    text = fn.format()
    assert text.splitlines()[0] == "3 3 3 -> 3"
    back = TableFunction.parse(text)
    assert back.domain == fn.domain
    assert back.codomain == fn.codomain
    assert np.array_equal(back.table, fn.table)


def test_read_write(tmp_path):
    path = tmp_path / "fn.tbl"
    fn = add2(FieldSpec(5))
    fn.write(path)
    assert np.array_equal(TableFunction.read(path).table, fn.table)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match="line 1"):
        TableFunction.parse("")
    with pytest.raises(ConfigError, match="line 1"):
        TableFunction.parse("2 2 2\n0 1")
    with pytest.raises(ConfigError, match="line 2"):
        TableFunction.parse("2 -> 2\n0 x")
    with pytest.raises(ConfigError, match="line 3"):
        TableFunction.parse("2 2 -> 2\n0 1\n0 1 1")
    with pytest.raises(ConfigError, match="line 1"):
        TableFunction.parse("a b -> 2\n0 1")


def test_parse_multiline_entries():
    fn = TableFunction.parse("2 2 -> 3\n0 1\n2 0\n")
    assert fn(1, 0) == 2


def test_field_builders():
    f5 = FieldSpec(5)
    assert sum3(f5)(1, 2, 3) == 1
    assert sum_product(f5)(1, 2, 3) == 2
    assert mul2(f5)(2, 4) == 3
    assert add2(f5)(4, 4) == 3
    # nonzero product tables index value v as v - 1
    p3 = product3_nonzero(f5)
    assert p3.domain == (4, 4, 4)
    assert p3(0, 0, 0) == 0  # 1*1*1 = 1 -> index 0
    assert p3(1, 1, 1) == (2 * 2 * 2) % 5 - 1
    m2 = mul2_nonzero(f5)
    assert m2(2, 3) == (3 * 4) % 5 - 1
    with pytest.raises(ConfigError):
        product3_nonzero(FieldSpec(2))
