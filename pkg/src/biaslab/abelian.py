"""Bases of small finite abelian groups and exact sums of roots of unity.

The unit groups (Z/q)* and (F_p[X]/m)* are handed over as an explicit element
list plus a multiplication.  A basis is extracted one Sylow subgroup at a time:
take an element of largest order modulo the span so far, then correct it by a
span element so its order equals its order in the quotient (the standard
inductive proof of the structure theorem).  Discrete logs are read off the
enumerated span, so everything here is brute force and meant for groups of
size up to ~10^5.
"""
from __future__ import annotations

from dataclasses import dataclass
import cmath
import math
from functools import lru_cache
from math import gcd, lcm
from typing import Callable, Hashable, Sequence

import sympy


def _pow(x, e: int, mul, one):
    result = one
    base = x
    while e:
        if e & 1:
            result = mul(result, base)
        base = mul(base, base)
        e >>= 1
    return result


@dataclass(frozen=True)
class AbelianBasis:
    order: int
    gens: tuple
    orders: tuple[int, ...]
    dlog: dict  # element -> exponent vector, one entry per generator

    @property
    def exponent(self) -> int:
        return lcm(*self.orders) if self.orders else 1


def abelian_basis(
    elements: Sequence[Hashable],
    mul: Callable,
    one: Hashable,
) -> AbelianBasis:
    n = len(elements)
    if n == 1:
        return AbelianBasis(1, (), (), {one: ()})
    gens: list = []
    orders: list[int] = []
    sylow_logs = []  # per prime: (ell^e, n / ell^e, span, first generator index, count)
    for ell, e in sorted(sympy.factorint(n).items()):
        pe = ell**e
        cof = n // pe
        sylow = sorted({_pow(x, cof, mul, one) for x in elements}, key=_sort_key)
        span = {one: ()}
        local_gens: list = []
        local_orders: list[int] = []
        while len(span) < pe:
            best, best_m = None, -1
            for y in sylow:
                if y in span:
                    continue
                m, z = 0, y
                while z not in span:
                    z = _pow(z, ell, mul, one)
                    m += 1
                if m > best_m:
                    best, best_m = y, m
            h = ell**best_m
            t = span[_pow(best, h, mul, one)]
            # best^h = prod g_i^t_i with every t_i divisible by h; strip it off
            fix = one
            for g, ti in zip(local_gens, t):
                if ti % h:
                    raise ArithmeticError("basis extraction failed: non-divisible lift")
                fix = mul(fix, _pow(g, ti // h, mul, one))
            inv_fix = _pow(fix, pe - 1, mul, one)
            g_new = mul(best, inv_fix)
            new_span = {}
            power = one
            for j in range(h):
                for el, vec in span.items():
                    new_span[mul(el, power)] = vec + (j,)
                power = mul(power, g_new)
            span = new_span
            local_gens.append(g_new)
            local_orders.append(h)
        sylow_logs.append((pe, cof, span, len(gens), len(local_gens)))
        gens.extend(local_gens)
        orders.extend(local_orders)

    r = len(gens)
    dlog = {}
    for x in elements:
        vec = [0] * r
        for pe, cof, span, start, count in sylow_logs:
            # x_ell = x^(c), c = 1 mod pe and 0 mod n/pe
            c = cof * pow(cof, -1, pe)
            part = span[_pow(x, c % n, mul, one)]
            vec[start : start + count] = part
        dlog[x] = tuple(vec)
    return AbelianBasis(n, tuple(gens), tuple(orders), dlog)


def _sort_key(x):
    return (0, x) if isinstance(x, int) else (1, repr(x))


@lru_cache(maxsize=None)
def cyclotomic_coeffs(N: int) -> tuple[int, ...]:
    """Integer coefficients of the N-th cyclotomic polynomial, low degree first."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(N, x), x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def reduce_root_sum(weights: dict[int, int] | Sequence[int], N: int) -> tuple[int, ...]:
    """Canonical form of sum_t w_t * exp(2 pi i t / N) in Z[zeta_N].

    Returns the coefficients of sum_t w_t x^t reduced modulo the N-th
    cyclotomic polynomial; two root sums are equal exactly when their
    reduced forms are equal.
    """
    if not isinstance(weights, dict):
        weights = {t: int(w) for t, w in enumerate(weights) if w}
    phi = cyclotomic_coeffs(N)
    d = len(phi) - 1
    acc = [0] * max(N, d + 1)
    for t, w in weights.items():
        acc[t % N] += int(w)
    # phi is monic: eliminate from the top down
    for top in range(len(acc) - 1, d - 1, -1):
        c = acc[top]
        if c:
            shift = top - d
            for i, pc in enumerate(phi):
                acc[shift + i] -= c * pc
    out = acc[:d]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def root_sum_is_zero(weights, N: int) -> bool:
    return reduce_root_sum(weights, N) == ()


def root_sum_equals_int(weights, N: int, value: int) -> bool:
    red = reduce_root_sum(weights, N)
    return red == ((value,) if value else ())


def reduce_fraction(t: int, N: int) -> tuple[int, int]:
    g = gcd(t, N)
    return t // g, N // g


def root_sum_value(weights, N: int) -> complex:
    """Float value of an exact root sum; exactly 0 when it vanishes, and
    real when the weights are symmetric under t -> -t."""
    if not isinstance(weights, dict):
        weights = {t: int(w) for t, w in enumerate(weights) if w}
    red = reduce_root_sum(weights, N)
    if not red:
        return 0j
    val = sum(float(c) * cmath.exp(2j * math.pi * j / N) for j, c in enumerate(red) if c)
    sym = all(weights.get(t, 0) == weights.get((-t) % N, 0) for t in weights)
    return complex(val.real, 0.0) if sym else complex(val)
