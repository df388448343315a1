"""Dirichlet characters with exact values.

A character is an exponent vector over a basis of the unit group.  Its value
at a unit with discrete-log vector v is exp(2 pi i t / N), N the group
exponent and t = sum_i e_i v_i N / ord_i (mod N).  Only the integer t is
stored, so powers, conjugates and products are exact; complex floats are
derived on demand.

Residues are handled through integer codes 0 <= code < ring_size (n mod q on
the integer side, base-p digit codes on the polynomial side), which lets both
sides share :class:`UnitGroup` and :class:`Character`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .abelian import AbelianBasis, abelian_basis, root_sum_equals_int, root_sum_is_zero
from .errors import InvalidArgument


@dataclass(frozen=True, eq=False)
class UnitGroup:
    ring_size: int
    units: tuple[int, ...]
    basis: AbelianBasis = field(repr=False)

    @property
    def order(self) -> int:
        return self.basis.order

    @property
    def exponent(self) -> int:
        return self.basis.exponent

    @cached_property
    def log_table(self) -> np.ndarray:
        """Row per residue code: exponent vector, or -1 entries for non-units."""
        r = len(self.basis.orders)
        tab = np.full((self.ring_size, r), -1, dtype=np.int64)
        for code in self.units:
            tab[code] = self.basis.dlog[code]
        return tab

    def is_unit_code(self, code: int) -> bool:
        return self.log_table[code, 0] >= 0 if self.basis.orders else code in self.units


@dataclass(frozen=True, eq=False)
class UnitGroupZ(UnitGroup):
    q: int = 1

    def code(self, n: int) -> int:
        return n % self.q


def unit_group_z(q: int) -> UnitGroupZ:
    if q < 1:
        raise InvalidArgument(f"modulus must be >= 1, got {q}")
    units = tuple(a for a in range(q) if math.gcd(a, q) == 1)
    basis = abelian_basis(units, lambda x, y: x * y % q, 1 % q)
    return UnitGroupZ(q, units, basis, q=q)


@dataclass(frozen=True, eq=False)
class Character:
    group: UnitGroup = field(repr=False)
    exponents: tuple[int, ...]

    def __post_init__(self):
        orders = self.group.basis.orders
        if len(self.exponents) != len(orders):
            raise InvalidArgument("exponent vector does not match the unit-group basis")
        object.__setattr__(
            self, "exponents", tuple(e % o for e, o in zip(self.exponents, orders))
        )

    def __eq__(self, other):
        return (
            isinstance(other, Character)
            and other.group is self.group
            and other.exponents == self.exponents
        )

    def __hash__(self):
        return hash((id(self.group), self.exponents))

    @property
    def modulus_order(self) -> int:
        return self.group.order

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @property
    def order(self) -> int:
        return math.lcm(
            *(o // math.gcd(e, o) for e, o in zip(self.exponents, self.group.basis.orders))
        )

    @cached_property
    def angle_table(self) -> np.ndarray:
        """t(code) in [0, N) for units, -1 for non-units; N = group exponent."""
        N = self.group.exponent
        weights = np.array(
            [e * (N // o) for e, o in zip(self.exponents, self.group.basis.orders)],
            dtype=np.int64,
        )
        logs = self.group.log_table
        tab = np.full(self.group.ring_size, -1, dtype=np.int64)
        units = np.array(self.group.units, dtype=np.int64)
        if weights.size:
            tab[units] = (logs[units] @ weights) % N
        else:
            tab[units] = 0
        tab.flags.writeable = False
        return tab

    @cached_property
    def value_table(self) -> np.ndarray:
        N = self.group.exponent
        t = self.angle_table
        vals = np.exp(2j * np.pi * t / N)
        # exact values where they are exact
        vals[t == 0] = 1.0
        if N % 2 == 0:
            vals[t == N // 2] = -1.0
        if N % 4 == 0:
            vals[t == N // 4] = 1j
            vals[t == 3 * N // 4] = -1j
        vals[t < 0] = 0.0
        vals.flags.writeable = False
        return vals

    def angle_code(self, code: int) -> Fraction | None:
        t = int(self.angle_table[code])
        return None if t < 0 else Fraction(t, self.group.exponent)

    def value_code(self, code: int) -> complex:
        return complex(self.value_table[code])

    def power(self, k: int) -> "Character":
        if k < 0:
            raise InvalidArgument("use conj() for negative powers")
        return type(self)(self.group, tuple(k * e for e in self.exponents))

    def conj(self) -> "Character":
        return type(self)(self.group, tuple(-e for e in self.exponents))

    def __mul__(self, other: "Character") -> "Character":
        if other.group is not self.group:
            raise InvalidArgument("characters of different moduli")
        return type(self)(
            self.group, tuple(a + b for a, b in zip(self.exponents, other.exponents))
        )


class DirichletCharacter(Character):
    """Character of (Z/q)*, extended by zero."""

    @property
    def q(self) -> int:
        return self.group.q

    def angle(self, n: int) -> Fraction | None:
        return self.angle_code(n % self.group.q)

    def __call__(self, n: int) -> complex:
        return self.value_code(n % self.group.q)

    def values_upto(self, D: int) -> np.ndarray:
        """chi(n) for n = 0..D as a complex array."""
        idx = np.arange(D + 1) % self.group.q
        return self.value_table[idx]

    def __repr__(self):
        return f"DirichletCharacter(q={self.q}, exponents={self.exponents})"


def all_exponent_vectors(group: UnitGroup):
    return itertools.product(*(range(o) for o in group.basis.orders))


def build_character_group(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q; the principal character comes first."""
    group = unit_group_z(q)
    return [DirichletCharacter(group, e) for e in all_exponent_vectors(group)]


def principal_character(q: int) -> DirichletCharacter:
    group = unit_group_z(q)
    return DirichletCharacter(group, (0,) * len(group.basis.orders))


def char_power(chi: Character, k: int) -> Character:
    return chi.power(k)


def orthogonality_indicator(q: int, a: int, n: int) -> complex:
    """(1/phi(q)) sum_chi conj(chi(a)) chi(n): 1 when n = a (mod q), else 0."""
    if math.gcd(a, q) != 1:
        raise InvalidArgument(f"gcd({a}, {q}) != 1")
    chars = build_character_group(q)
    total = sum(chi.conj()(a) * chi(n) for chi in chars)
    return total / len(chars)


def inner_product_exact(chi: Character, psi: Character) -> int | None:
    """sum over residues of chi * conj(psi), exactly, if it is an integer."""
    if chi.group is not psi.group:
        raise InvalidArgument("characters of different moduli")
    N = chi.group.exponent
    t = chi.angle_table
    u = psi.angle_table
    mask = t >= 0
    diff = (t[mask] - u[mask]) % N
    weights = np.bincount(diff, minlength=N)
    if root_sum_is_zero(weights, N):
        return 0
    if root_sum_equals_int(weights, N, int(mask.sum())):
        return int(mask.sum())
    return None

