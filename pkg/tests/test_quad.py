import math

import pytest
from hypothesis import given, strategies as st

from biaslab.errors import BudgetExceeded, InvalidArgument
from biaslab.quad import (
    field_constants,
    ideal_count_formula,
    is_fundamental,
    kronecker,
    make_field,
    quad_summatory,
    split_prime,
)


def test_fields():
    f4 = make_field(-4)
    assert (f4.h, f4.w) == (1, 4)
    assert f4.lam == pytest.approx(math.pi / 4, rel=1e-15)
    f3 = make_field(-3)
    assert (f3.h, f3.w) == (1, 6)
    assert f3.lam == pytest.approx(0.604600, abs=1e-6)
    assert make_field(-23).h == 3
    with pytest.raises(InvalidArgument):
        make_field(-12)
    with pytest.raises(InvalidArgument):
        make_field(5)


@pytest.mark.parametrize("d,h", [(-7, 1), (-15, 2), (-20, 2), (-47, 5), (-56, 4), (-71, 7), (-84, 4), (-163, 1)])
def test_class_numbers(d, h):
    assert make_field(d).h == h


def test_fundamental():
    assert [d for d in range(-30, 0) if is_fundamental(d)] == [-24, -23, -20, -19, -15, -11, -8, -7, -4, -3]


def test_splitting_examples():
    f = make_field(-4)
    assert [P.splitting for P in split_prime(5, f)] == ["split", "split"]
    assert [(P.splitting, P.norm) for P in split_prime(3, f)] == [("inert", 9)]
    assert [(P.splitting, P.norm) for P in split_prime(2, f)] == [("ramified", 2)]


@pytest.mark.parametrize("d", [-3, -4, -7, -8, -11, -23])
def test_splitting_partition(d):
    f = make_field(d)
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        ideals = split_prime(p, f)
        s = kronecker(d, p)
        # norm-p ideals match the local factor of zeta(s) L(s, chi_d)
        assert sum(1 for P in ideals if P.norm == p) == 1 + s
        assert ideals[0].splitting == {1: "split", -1: "inert", 0: "ramified"}[s]


def test_kronecker_is_chi4():
    assert [kronecker(-4, n) for n in range(8)] == [0, 1, 0, -1, 0, 1, 0, -1]


def test_summatory_example():
    f = make_field(-4)
    s = quad_summatory(10, 2, f)
    assert s.sum == pytest.approx(1 + 2 + 2**0.5 + 10 + 2 ** (1 / 3) + 9 + 20, rel=1e-14)
    assert s.sum == pytest.approx(44.674135, abs=1e-6)
    assert s.ideal_count == 9 == ideal_count_formula(10, -4)
    assert quad_summatory(1, 3, f).sum == 1.0
    with pytest.raises(BudgetExceeded):
        quad_summatory(10**8, 2, f)


@pytest.mark.parametrize("d", [-3, -4, -7, -8, -11])
def test_ideal_count_identity(d):
    assert quad_summatory(10**5, 2, make_field(d)).ideal_count == ideal_count_formula(10**5, d)


def brute_quad_sum(x, k, d):
    # ideals as exponent vectors over prime ideals; F_k from norms and exponents
    f = make_field(d)
    ideals = []
    for p in range(2, x + 1):
        if all(p % r for r in range(2, int(p**0.5) + 1)):
            ideals.extend(P.norm for P in split_prime(p, f) if P.norm <= x)
    total = 0.0

    def rec(i, n, val):
        nonlocal total
        total += val
        for j in range(i, len(ideals)):
            N = ideals[j]
            m, a = n * N, 1
            while m <= x:
                rec(j + 1, m, val * (N**a if a < k else N ** (1 / a)))
                m *= N
                a += 1

    rec(0, 1, 1.0)
    return total


@pytest.mark.parametrize("d,k", [(-4, 2), (-3, 3), (-23, 2)])
def test_summatory_brute(d, k):
    assert quad_summatory(3000, k, make_field(d)).sum == pytest.approx(brute_quad_sum(3000, k, d), rel=1e-12)


@given(
    st.dictionaries(st.integers(0, 9), st.integers(1, 6), max_size=4),
    st.dictionaries(st.integers(10, 19), st.integers(1, 6), max_size=4),
    st.integers(2, 4),
)
def test_F_multiplicative_on_coprime_ideals(A, B, k):
    # prime-ideal norms for d = -4 by index
    norms = [2, 5, 5, 9, 13, 13, 17, 17, 29, 29, 37, 37, 41, 41, 49, 53, 53, 61, 61, 73]

    def logF(I):
        return math.fsum((a if a < k else 1 / a) * math.log(norms[i]) for i, a in I.items())

    assert logF({**A, **B}) == pytest.approx(logF(A) + logF(B), rel=1e-12, abs=1e-12)


def test_constants():
    c = field_constants(make_field(-4), 2)
    assert c.R_k_2 > 1
    assert c.tail_bound <= 1e-12
    assert c.zeta_K_k == pytest.approx(math.pi**2 / 6 * 0.915965594177219015, rel=1e-13)
