"""Decomposability, residual dependence, operation properties, discrete logs."""

import numpy as np
import pytest

from fqlab.analysis import (decompose, discrete_log_table, g_invertible_in_first,
                            op_properties, residual_dependence, section_classes)
from fqlab.errors import ConfigError
from fqlab.field import FieldSpec
from fqlab.tables import (TableFunction, add2, mul2, mul2_nonzero,
                          product3_nonzero, sum3, sum_product)


def test_section_classes_sum():
    """a + b + c: sections depend only on a + b, so q classes."""
    part = section_classes(sum3(FieldSpec(3)))
    assert part.num_classes == 3
    grid = part.class_index
    for a in range(3):
        for b in range(3):
            for a2 in range(3):
                for b2 in range(3):
                    same = (a + b) % 3 == (a2 + b2) % 3
                    assert (grid[a, b] == grid[a2, b2]) == same


def test_section_classes_sum_product_singletons():
    """a + b*c: c=0 reveals a, any c != 0 then reveals b."""
    part = section_classes(sum_product(FieldSpec(3)))
    assert part.num_classes == 9


def test_section_classes_constant():
    const = TableFunction.from_callable((2, 2, 2), 2, lambda a, b, c: 1)
    assert section_classes(const).num_classes == 1


def test_decompose_sum_is_decomposable():
    for q in (2, 3, 5, 7):
        res = decompose(sum3(FieldSpec(q)))
        assert res.decomposable
        assert res.g is not None and res.ftilde is not None
        # G must be the level sets of a + b up to relabeling; check reconstruction
        for a in range(q):
            for b in range(q):
                for c in range(q):
                    assert res.ftilde(res.g(a, b), c) == (a + b + c) % q
        # each section of ftilde is a bijection
        for c in range(q):
            assert sorted(res.ftilde(t, c) for t in range(res.g.codomain)) == list(range(q))
        assert g_invertible_in_first(res.g)


def test_decompose_sum_product_fails_with_witness():
    for q in (2, 3, 5, 7):
        res = decompose(sum_product(FieldSpec(q)))
        assert not res.decomposable
        assert res.witness is not None
        kind = res.witness[0]
        assert kind in ("collision", "missing")
        if kind == "collision":
            _, c, (a1, b1), (a2, b2) = res.witness
            # the two pair classes agree at this c but differ somewhere
            assert (a1 + b1 * c) % q == (a2 + b2 * c) % q
            assert any((a1 + b1 * cc) % q != (a2 + b2 * cc) % q for cc in range(q))
        assert res.violations > 0


def test_decompose_pure_product_nonzero():
    for q in (3, 5, 7):
        res = decompose(product3_nonzero(FieldSpec(q)))
        assert res.decomposable
        assert res.g.codomain == q - 1
        assert g_invertible_in_first(res.g)


def test_decompose_soundness_random_tables():
    """Whenever decomposable, reconstruction holds and sections are bijections."""
    rng = np.random.default_rng(11)
    found = 0
    for _ in range(400):
        k = int(rng.integers(2, 4))
        table = rng.integers(0, k, size=k * k * k)
        fn = TableFunction((k, k, k), k, table.astype(np.int64))
        res = decompose(fn)
        if not res.decomposable:
            continue
        found += 1
        for a in range(k):
            for b in range(k):
                for c in range(k):
                    assert res.ftilde(res.g(a, b), c) == fn(a, b, c)
        for c in range(k):
            assert sorted(res.ftilde(t, c) for t in range(res.g.codomain)) == list(range(k))
    assert found > 0  # the sample must exercise the success path


def test_g_invertible_examples():
    f5 = FieldSpec(5)
    assert g_invertible_in_first(add2(f5))
    assert not g_invertible_in_first(mul2(f5))
    assert g_invertible_in_first(mul2_nonzero(f5))


def test_residual_dependence_sum_finds_negation():
    for q in (2, 3, 5):
        res = residual_dependence(sum3(FieldSpec(q)))
        assert res.exists and res.method == "exhaustive"
        table = res.a_of_b.table
        # lexicographically first canceller is a(b) = -b
        assert [int(v) for v in table] == [(-b) % q for b in range(q)]


def test_residual_dependence_sum_product_impossible():
    for q in (2, 3, 5):
        res = residual_dependence(sum_product(FieldSpec(q)))
        assert not res.exists
        assert res.candidates_checked == q ** q


def test_residual_dependence_pure_product():
    """a * b * c on nonzero elements: a(b) = b^-1 cancels."""
    for q in (3, 5):
        res = residual_dependence(product3_nonzero(FieldSpec(q)))
        assert res.exists
        a_of_b = res.a_of_b
        k = q - 1
        for b in range(k):
            for c in range(k):
                v = ((a_of_b(b) + 1) * (b + 1) * (c + 1)) % q
                assert v == ((a_of_b(0) + 1) * 1 * (c + 1)) % q


def test_residual_dependence_verified_when_found():
    rng = np.random.default_rng(5)
    for _ in range(100):
        k = int(rng.integers(2, 4))
        fn = TableFunction((k, k, k), k, rng.integers(0, k, size=k ** 3).astype(np.int64))
        res = residual_dependence(fn)
        if res.exists:
            cube = fn.as_array()
            base = cube[res.a_of_b(0), 0, :]
            for b in range(1, k):
                assert np.array_equal(cube[res.a_of_b(b), b, :], base)


def test_residual_dependence_heuristic_mode():
    q = 7  # above the exhaustive cutoff of 6
    res = residual_dependence(sum3(FieldSpec(q)))
    assert res.method == "heuristic"
    assert res.exists  # local search must find one of the q cancellers
    table = res.a_of_b.table
    k0 = (int(table[0]) + 0) % q
    assert all(int(table[b]) == (k0 - b) % q for b in range(q))


def test_residual_dependence_requires_square_front():
    fn = TableFunction.from_callable((2, 3, 2), 2, lambda a, b, c: 0)
    with pytest.raises(ConfigError):
        residual_dependence(fn)


def test_op_properties():
    f5 = FieldSpec(5)
    assert op_properties(add2(f5)) == op_properties(mul2(f5))
    props = op_properties(add2(f5))
    assert props.commutative and props.associative
    skew = TableFunction.from_callable((5, 5), 5, lambda a, b: (a + 2 * b) % 5)
    props = op_properties(skew)
    assert not props.commutative and not props.associative


def test_discrete_log_tables():
    d5 = discrete_log_table(FieldSpec(5))
    assert d5.generator == 2
    assert d5.log[4] == 2  # 2^2 = 4
    d7 = discrete_log_table(FieldSpec(7))
    assert d7.generator == 3
    for x in range(1, 7):
        assert int(d7.exp[int(d7.log[x])]) == x
    d2 = discrete_log_table(FieldSpec(2))
    assert d2.generator == 1 and d2.log[1] == 0
    assert d5.log[0] == -1


def test_discrete_log_reduction_of_product_decomposition():
    """Relabeling by logs turns the product decomposition's G into addition."""
    for q in (5, 7, 11):
        field = FieldSpec(q)
        res = decompose(product3_nonzero(field))
        assert res.decomposable
        dlog = discrete_log_table(field)
        k = q - 1
        sigma = {}
        for a in range(k):
            for b in range(k):
                t = res.g(a, b)
                target = (int(dlog.log[a + 1]) + int(dlog.log[b + 1])) % k
                assert sigma.setdefault(t, target) == target
        assert sorted(sigma.values()) == list(range(k))
