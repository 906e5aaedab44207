import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feyndd.exactnum import (
    CyclotomicValue,
    cyclotomic_coefficients,
    equals_integer,
    from_counts,
    probability,
    to_complex,
    to_json,
    to_mpmath,
)

from util import rng_for


def test_cyclotomic_polynomials():
    assert cyclotomic_coefficients(1) == (-1, 1)
    assert cyclotomic_coefficients(2) == (1, 1)
    assert cyclotomic_coefficients(4) == (1, 0, 1)
    assert cyclotomic_coefficients(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_coefficients(24) == (1, 0, 0, 0, -1, 0, 0, 0, 1)


def test_from_counts_concentrated():
    v = from_counts([5, 0, 0, 0, 0, 0, 0, 0], 0, modulus=8)
    assert equals_integer(v, 5)


def test_from_counts_phase_wraps():
    counts = [1, 2, 3, 4, 0, 0, 0, 0]
    assert from_counts(counts, 0, phase=8, modulus=8) == from_counts(counts, 0, modulus=8)
    shifted = from_counts(counts, 0, phase=3, modulus=8)
    base = from_counts(counts, 0, modulus=8)
    assert shifted == base * CyclotomicValue.root_power(3, 8)


def test_abs_squared_examples():
    omega8 = CyclotomicValue.root_power(1, 8)
    assert equals_integer(omega8.abs_squared(), 1)
    one_plus_i = CyclotomicValue(4, (1, 1, 0, 0))
    assert equals_integer(one_plus_i.abs_squared(), 2)


def test_conj_involution():
    rng = rng_for(4)
    for _ in range(50):
        r = int(rng.choice([2, 8, 24]))
        v = CyclotomicValue(r, tuple(int(c) for c in rng.integers(-9, 9, size=r)),
                            int(rng.integers(-3, 6)))
        assert v.conj().conj() == v


def test_sqrt2_in_eighth_roots():
    # omega8 + omega8^7 evaluates to sqrt(2)
    vec = [0] * 8
    vec[1] = vec[7] = 1
    sqrt2 = CyclotomicValue(8, tuple(vec), 1)  # sqrt2 * 2^(-1/2) = 1
    assert equals_integer(sqrt2, 1)


def test_power_of_two_normalization():
    v = CyclotomicValue(2, (2, 0), 3)  # 2 * 2^(-3/2) = 2^(-1/2)
    norm = v.normalized()
    assert (norm.coeffs, norm.sqrt2_exponent) == ((1, 0), 1)
    assert CyclotomicValue.zero(2).normalized().sqrt2_exponent == 0


def test_huge_counts_do_not_overflow():
    v = from_counts([1 << 9999, 0], 2 * 9999 + 1, modulus=2)
    z = to_complex(v)
    assert abs(z - 0.7071067811865476) < 1e-15


@settings(max_examples=60)
@given(st.integers(0, 2), st.data())
def test_ring_laws(which, data):
    r = [2, 8, 24][which]
    coeff = st.integers(-7, 7)
    vals = [
        CyclotomicValue(r, tuple(data.draw(st.lists(coeff, min_size=r, max_size=r))),
                        2 * data.draw(st.integers(-2, 2)))
        for _ in range(3)
    ]
    a, b, c = vals
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


def test_equals_integer_against_float_cross_check():
    rng = rng_for(11)
    for _ in range(1000):
        r = int(rng.choice([2, 8, 24]))
        v = CyclotomicValue(r, tuple(int(c) for c in rng.integers(-4, 5, size=r)),
                            2 * int(rng.integers(0, 3)))
        n = int(rng.integers(-6, 7))
        exact = equals_integer(v, n)
        z = to_mpmath(v, 128)
        approx = abs(z - n) < mpmath.mpf(2) ** -60
        assert exact == approx


def test_abs_squared_is_nonnegative():
    rng = rng_for(21)
    for _ in range(100):
        r = int(rng.choice([2, 8, 24]))
        v = CyclotomicValue(r, tuple(int(c) for c in rng.integers(-5, 6, size=r)),
                            int(rng.integers(0, 4)) * 2)
        z = to_complex(v.abs_squared())
        assert z.real >= -1e-12
        assert abs(z.imag) <= 1e-12


def test_to_complex_rejects_low_precision():
    with pytest.raises(ValueError):
        to_complex(CyclotomicValue.integer(1, 2), 32)


def test_probability_clamps_and_guards():
    assert probability(CyclotomicValue.integer(1, 2)) == 1.0
    assert probability(CyclotomicValue.zero(8)) == 0.0
    with pytest.raises(ArithmeticError):
        probability(CyclotomicValue.root_power(1, 4))  # purely imaginary
    with pytest.raises(ArithmeticError):
        probability(CyclotomicValue.integer(3, 2))  # above 1


def test_add_with_incompatible_sqrt2_parity():
    a = CyclotomicValue.integer(1, 2)
    b = CyclotomicValue(2, (1, 0), 1)
    with pytest.raises(ValueError):
        _ = a + b
    # fine when one side is zero, and fine in a ring containing sqrt(2)
    assert CyclotomicValue.zero(2) + a == a
    c = CyclotomicValue.integer(1, 8) + CyclotomicValue(8, (1, 0, 0, 0, 0, 0, 0, 0), 2)
    z = to_complex(c)
    assert abs(z - 1.5) < 1e-12


def test_mixed_moduli_rejected():
    with pytest.raises(ValueError):
        _ = CyclotomicValue.integer(1, 2) * CyclotomicValue.integer(1, 8)
    with pytest.raises(ValueError):
        _ = CyclotomicValue.integer(1, 2) == CyclotomicValue.integer(1, 8)


def test_json_rendering_round_trip():
    v = from_counts([2, 0], 3, modulus=2)
    blob = to_json(v)
    assert blob["exact"] == {"r": 2, "coeffs": [1, 0], "sqrt2_exp": 1}
    assert abs(blob["re"] - 0.7071067811865476) < 1e-15
    assert blob["im"] == 0.0
