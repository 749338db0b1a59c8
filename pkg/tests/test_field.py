"""Exhaustive checks of the prime-field arithmetic."""

import pytest

from fqlab.errors import ConfigError, FieldMismatchError
from fqlab.field import FieldElement, FieldSpec, is_prime, smallest_generator

PRIMES = [2, 3, 5, 7, 11, 13]


def test_rejects_non_prime_orders():
    for q in (0, 1, 4, 6, 8, 9, 10, 12):
        with pytest.raises(ConfigError):
            FieldSpec(q)


def test_accepts_primes():
    for q in PRIMES:
        assert FieldSpec(q).q == q


def test_is_prime_basics():
    assert [n for n in range(2, 30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_add_examples():
    g2, g5 = FieldSpec(2), FieldSpec(5)
    assert (g2.element(1) + g2.element(1)).value == 0
    assert (g5.element(3) + g5.element(4)).value == 2


def test_additive_identity_all_small_primes():
    for q in PRIMES:
        f = FieldSpec(q)
        zero = f.element(0)
        for a in f.elements():
            assert (a + zero) == a


def test_mul_examples():
    g5, g3 = FieldSpec(5), FieldSpec(3)
    assert (g5.element(2) * g5.element(3)).value == 1
    assert (g3.element(2) * g3.element(2)).value == 1
    for q in PRIMES:
        f = FieldSpec(q)
        one = f.element(1)
        for a in f.elements():
            assert (a * one) == a


def test_inverse_examples():
    assert FieldSpec(7).element(3).inv().value == 5
    assert FieldSpec(2).element(1).inv().value == 1


def test_inverse_involution_all_small_primes():
    for q in PRIMES:
        f = FieldSpec(q)
        for a in f.nonzero_elements():
            assert a.inv().inv() == a
            assert (a * a.inv()).value == 1


def test_zero_has_no_inverse():
    with pytest.raises(ConfigError):
        FieldSpec(5).element(0).inv()
    with pytest.raises(ConfigError):
        FieldSpec(5).inv(0)


def test_neg_sub_pow_examples():
    g5, g3 = FieldSpec(5), FieldSpec(3)
    assert (-g5.element(2)).value == 3
    assert (g5.element(4) - g5.element(4)).value == 0
    assert (g3.element(2) ** 2).value == 1
    assert (g5.element(2) ** -1) == g5.element(2).inv()


def test_mixed_field_operations_rejected():
    a = FieldSpec(5).element(1)
    b = FieldSpec(7).element(1)
    for op in (lambda: a + b, lambda: a - b, lambda: a * b, lambda: a / b):
        with pytest.raises(FieldMismatchError):
            op()
    with pytest.raises(FieldMismatchError):
        a + 3  # plain ints never coerce


def test_out_of_range_values_rejected():
    with pytest.raises(ConfigError):
        FieldElement(5, FieldSpec(5))
    with pytest.raises(ConfigError):
        FieldElement(-1, FieldSpec(5))


def test_field_axioms_exhaustive():
    """Associativity, commutativity, distributivity for all prime q <= 13."""
    for q in PRIMES:
        f = FieldSpec(q)
        els = f.elements()
        for a in els:
            for b in els:
                assert a + b == b + a
                assert a * b == b * a
                for c in els:
                    assert (a + b) + c == a + (b + c)
                    assert (a * b) * c == a * (b * c)
                    assert a * (b + c) == (a * b) + (a * c)


def test_unique_inverses_exhaustive():
    for q in PRIMES:
        f = FieldSpec(q)
        for a in f.elements():
            assert sum(1 for b in f.elements() if (a + b).value == 0) == 1
        for a in f.nonzero_elements():
            assert sum(1 for b in f.elements() if (a * b).value == 1) == 1


def test_fermat_exhaustive():
    for q in PRIMES:
        f = FieldSpec(q)
        for a in f.nonzero_elements():
            assert (a ** (q - 1)).value == 1


def test_multiplicative_group_cyclic():
    for q in PRIMES:
        f = FieldSpec(q)
        g = smallest_generator(f)
        powers = set()
        x = 1
        for _ in range(q - 1):
            powers.add(x)
            x = (x * g) % q
        assert powers == set(range(1, q))


def test_known_generators():
    assert smallest_generator(FieldSpec(2)) == 1
    assert smallest_generator(FieldSpec(5)) == 2
    assert smallest_generator(FieldSpec(7)) == 3


def test_tables_match_elementwise_ops():
    f = FieldSpec(7)
    for a in range(7):
        for b in range(7):
            assert f.add_table[a, b] == (a + b) % 7
            assert f.mul_table[a, b] == (a * b) % 7
    for a in range(1, 7):
        assert (a * int(f.inv_table[a])) % 7 == 1
    assert f.inv_table[0] == -1
