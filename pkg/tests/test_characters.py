import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from biaslab.characters import (
    build_character_group,
    char_power,
    inner_product_exact,
    orthogonality_indicator,
    principal_character,
)
from biaslab.errors import InvalidArgument


def test_q4():
    chars = build_character_group(4)
    assert len(chars) == 2
    assert chars[0].is_principal
    assert chars[1](3) == -1


def test_q5_generator_value():
    chars = build_character_group(5)
    assert len(chars) == 4
    gens = [c for c in chars if c.order == 4]
    assert gens and all(c(2) in (1j, -1j) for c in gens)


def test_q1():
    (chi,) = build_character_group(1)
    assert chi.is_principal
    assert all(chi(n) == 1 for n in range(20))


def test_char_power():
    chars = build_character_group(5)
    chi0 = chars[0]
    assert char_power(chi0, 7) == chi0
    for chi in chars:
        if chi.order == 4:
            sq = char_power(chi, 2)
            assert sq.order == 2
            assert [sq(n) for n in range(5)] == [0, 1, -1, -1, 1]
        assert char_power(chi, chi.order).is_principal


def test_orthogonality_indicator_examples():
    assert orthogonality_indicator(5, 2, 7) == pytest.approx(1, abs=1e-12)
    assert orthogonality_indicator(5, 2, 3) == pytest.approx(0, abs=1e-12)
    assert orthogonality_indicator(4, 1, 2) == pytest.approx(0, abs=1e-12)
    with pytest.raises(InvalidArgument):
        orthogonality_indicator(4, 2, 1)


@pytest.mark.parametrize("q", range(1, 51))
def test_column_orthogonality_exact(q):
    chars = build_character_group(q)
    phi = sum(1 for a in range(q) if math.gcd(a, q) == 1)
    assert len(chars) == phi
    for chi in chars:
        for psi in chars:
            assert inner_product_exact(chi, psi) == (phi if chi == psi else 0)


@given(st.integers(2, 60), st.integers(0, 10**6), st.integers(0, 10**6))
def test_exact_multiplicativity(q, m, n):
    for chi in build_character_group(q):
        am, an, amn = chi.angle(m), chi.angle(n), chi.angle(m * n)
        if am is None or an is None:
            assert amn is None
            assert chi(m * n) == 0
        else:
            assert amn == (am + an) % 1
        assert chi.angle(1) == Fraction(0)


@given(st.integers(2, 40), st.integers(0, 12), st.integers(0, 12))
def test_power_homomorphism(q, j, l):
    for chi in build_character_group(q):
        assert char_power(chi, j + l) == char_power(chi, j) * char_power(chi, l)


def test_principal_helper():
    chi = principal_character(12)
    assert [chi(n) for n in range(12)] == [1 if math.gcd(n, 12) == 1 else 0 for n in range(12)]
