"""Irreducibles, factorization, F_k, characters mod m and the summatory
function over F_p[X].  Prime fields only."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import sympy

from ..abelian import abelian_basis, root_sum_is_zero
from ..characters import Character, UnitGroup, all_exponent_vectors
from ..errors import BudgetExceeded, CertificateError, InvalidArgument, OutOfRange, check_budget
from .poly import Poly, gcd, monic_from_index, monic_index, poly_from_code, residue_code
from .sieve import (
    _degrees,
    _exponent_numerators,
    _factor_values,
    _multiplicity,
    _sieve,
    offsets,
    residues_mod,
)

ENUM_BUDGET = 50_000_000
UNIT_BUDGET = 100_000


def necklace_count(p: int, d: int) -> int:
    return sum(int(sympy.mobius(e)) * p ** (d // e) for e in sympy.divisors(d)) // d


@dataclass(frozen=True, eq=False)
class IrreducibleTable:
    """Sieve of all monic polynomials of degree <= max_degree over F_p."""

    p: int
    max_degree: int
    off: np.ndarray = field(repr=False)
    spf: np.ndarray = field(repr=False)
    cof: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    rest: np.ndarray = field(repr=False)
    deg: np.ndarray = field(repr=False)
    _values: dict = field(default_factory=dict, repr=False)
    _residues: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return int(self.off[self.max_degree + 1])

    @cached_property
    def irreducible_ids(self) -> np.ndarray:
        ids = np.arange(self.size, dtype=np.int64)
        return ids[(self.spf == ids) & (ids > 0)]

    def ids_of_degree(self, d: int) -> np.ndarray:
        ids = self.irreducible_ids
        return ids[(ids >= self.off[d]) & (ids < self.off[d + 1])]

    def counts(self) -> list[int]:
        return [int(self.ids_of_degree(d).size) for d in range(1, self.max_degree + 1)]

    def by_degree(self, d: int) -> list[Poly]:
        return [self.poly(int(i)) for i in self.ids_of_degree(d)]

    def poly(self, gid: int) -> Poly:
        n = int(self.deg[gid])
        return monic_from_index(self.p, n, gid - int(self.off[n]))

    def id_of(self, f: Poly) -> int:
        if f.is_zero or f.lead != 1:
            raise InvalidArgument("expected a monic polynomial")
        if f.degree > self.max_degree:
            raise OutOfRange(f"degree {f.degree} beyond sieve depth {self.max_degree}")
        return int(self.off[f.degree]) + monic_index(f)

    def factor_values(self, k: int) -> np.ndarray:
        """F_k(f) for every monic id (read-only)."""
        v = self._values.get(k)
        if v is None:
            check_budget(8 * self.size * (len(self._values) + 1), "F_k value table")
            v = _factor_values(self.spf, self.alpha, self.rest, self.deg, self.p, k)
            v.flags.writeable = False
            self._values[k] = v
        return v

    @property
    def exponent_denominator(self) -> int:
        return math.lcm(*range(1, self.max_degree + 1)) if self.max_degree else 1

    def exponent_numerators(self, k: int) -> np.ndarray:
        """L * log_p F_k(f) as exact integers, L = exponent_denominator."""
        key = ("e", k)
        e = self._values.get(key)
        if e is None:
            check_budget(8 * self.size * (len(self._values) + 1), "F_k exponent table")
            e = _exponent_numerators(self.spf, self.alpha, self.rest, self.deg, k, self.exponent_denominator)
            e.flags.writeable = False
            self._values[key] = e
        return e

    def residues(self, ring: "ResidueRing") -> np.ndarray:
        key = ring.m.coeffs
        r = self._residues.get(key)
        if r is None:
            check_budget(4 * self.size * (len(self._residues) + 1), "residue table")
            r = residues_mod(self.p, self.max_degree, ring.mulx, ring.one_code)
            r.flags.writeable = False
            self._residues[key] = r
        return r


def build_irreducibles(p: int, D: int) -> IrreducibleTable:
    if not sympy.isprime(p):
        raise InvalidArgument(f"{p} is not prime")
    if D < 0:
        raise InvalidArgument("degree must be >= 0")
    if p**D > ENUM_BUDGET:
        raise BudgetExceeded(f"p^D = {p**D} monic polynomials exceeds the enumeration budget")
    off = offsets(p, D)
    total = int(off[D + 1])
    check_budget(14 * total, "monic polynomial sieve")
    spf, cof = _sieve(p, D, off)
    alpha, rest = _multiplicity(spf, cof)
    deg = _degrees(off, D)
    for a in (spf, cof, alpha, rest, deg):
        a.flags.writeable = False
    return IrreducibleTable(p, D, off, spf, cof, alpha, rest, deg)


@dataclass(frozen=True)
class FFFactorization:
    unit: int
    factors: tuple[tuple[Poly, int], ...]

    def expand(self, p: int) -> Poly:
        out = Poly(p, (self.unit,))
        for P, a in self.factors:
            for _ in range(a):
                out = out * P
        return out


def ff_factorize(f: Poly, table: IrreducibleTable) -> FFFactorization:
    if f.is_zero:
        raise InvalidArgument("cannot factor the zero polynomial")
    if f.p != table.p:
        raise InvalidArgument("characteristic mismatch")
    unit = f.lead
    g = f.monic()
    found: dict[Poly, int] = {}
    if g.degree <= table.max_degree:
        gid = table.id_of(g)
        while gid:
            P = int(table.spf[gid])
            key = table.poly(P)
            found[key] = found.get(key, 0) + 1
            gid = int(table.cof[gid])
    else:
        if g.degree // 2 > table.max_degree:
            raise OutOfRange(
                f"degree {g.degree} needs irreducibles up to {g.degree // 2}, table has {table.max_degree}"
            )
        for P_id in table.irreducible_ids:
            P = table.poly(int(P_id))
            if 2 * P.degree > g.degree:
                break
            while True:
                quo, rem = divmod(g, P)
                if not rem.is_zero:
                    break
                found[P] = found.get(P, 0) + 1
                g = quo
        if g.degree > 0:
            found[g] = found.get(g, 0) + 1
    factors = tuple(sorted(found.items(), key=lambda t: (t[0].degree, monic_index(t[0]))))
    return FFFactorization(unit, factors)


@dataclass(frozen=True)
class FFFactorValue:
    log_value: float
    value: float


def ff_irrational_factor(fact: FFFactorization, k: int) -> FFFactorValue:
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")
    log_value = 0.0
    value = 1.0
    for P, a in fact.factors:
        lognorm = P.degree * math.log(P.p)
        b = a if a < k else 1.0 / a
        log_value += b * lognorm
        value *= float(P.norm) ** b
    return FFFactorValue(log_value, value)


# residues mod m -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ResidueRing:
    """F_p[X]/m with elements as integer codes sum r_i p^i, i < deg m (m made monic)."""

    m: Poly

    def __post_init__(self):
        if self.m.is_zero:
            raise InvalidArgument("modulus must be nonzero")
        object.__setattr__(self, "m", self.m.monic())

    @property
    def p(self) -> int:
        return self.m.p

    @property
    def size(self) -> int:
        return self.p**self.m.degree

    @property
    def one_code(self) -> int:
        return 1 if self.m.degree > 0 else 0

    @cached_property
    def mulx(self) -> np.ndarray:
        p, d = self.p, self.m.degree
        if d == 0:
            return np.zeros(1, dtype=np.int64)
        top_w = p ** (d - 1)
        out = np.empty(self.size, dtype=np.int64)
        low = self.m.coeffs[:d]
        for r in range(self.size):
            t, rem = divmod(r, top_w)
            digits = [0] + [(rem // p**i) % p for i in range(d - 1)]
            code = 0
            for i in range(d - 1, -1, -1):
                code = code * p + (digits[i] - t * low[i]) % p
            out[r] = code
        return out

    def code(self, f: Poly) -> int:
        return residue_code(f, self.m)

    def poly(self, code: int) -> Poly:
        return poly_from_code(self.p, code)

    def mul(self, a: int, b: int) -> int:
        return _ring_mul(self.m, a, b)

    @cached_property
    def units(self) -> tuple[int, ...]:
        if self.m.degree == 0:
            return (0,)
        return tuple(c for c in range(1, self.size) if gcd(self.poly(c), self.m).degree == 0)

    @cached_property
    def prime_divisors(self) -> tuple[Poly, ...]:
        """Monic irreducible P | m, by trial division over all monic P of degree <= deg m."""
        out = []
        g = self.m
        d = 1
        while g.degree >= 1:
            if 2 * d > g.degree:
                out.append(g)
                break
            for idx in range(self.p**d):
                P = monic_from_index(self.p, d, idx)
                if (g % P).is_zero:
                    out.append(P)
                    while (g % P).is_zero:
                        g = g // P
            d += 1
        return tuple(sorted(set(out), key=lambda P: (P.degree, monic_index(P))))

    @property
    def phi_formula(self) -> int:
        val = self.size
        for P in self.prime_divisors:
            val = val // P.norm * (P.norm - 1)
        return val


@lru_cache(maxsize=None)
def _ring_mul_table(m: Poly):
    return {}


def _ring_mul(m: Poly, a: int, b: int) -> int:
    cache = _ring_mul_table(m)
    key = (a, b) if a <= b else (b, a)
    r = cache.get(key)
    if r is None:
        p = m.p
        r = residue_code(poly_from_code(p, a) * poly_from_code(p, b), m)
        cache[key] = r
    return r


@dataclass(frozen=True, eq=False)
class UnitGroupFF(UnitGroup):
    ring: ResidueRing | None = None


def unit_group_ff(m: Poly) -> UnitGroupFF:
    ring = ResidueRing(m)
    units = ring.units
    if len(units) > UNIT_BUDGET:
        raise BudgetExceeded(f"Phi(m) = {len(units)} exceeds the unit enumeration budget")
    phi_formula = ring.phi_formula
    if len(units) != phi_formula:
        raise CertificateError(f"unit count {len(units)} != Phi formula {phi_formula}")
    basis = abelian_basis(units, ring.mul, ring.one_code)
    return UnitGroupFF(ring.size, units, basis, ring=ring)


class FFCharacter(Character):
    """Character of (F_p[X]/m)*, extended by zero."""

    @property
    def ring(self) -> ResidueRing:
        return self.group.ring

    @property
    def modulus(self) -> Poly:
        return self.group.ring.m

    def __call__(self, f: Poly) -> complex:
        return self.value_code(self.ring.code(f))

    def angle(self, f: Poly):
        return self.angle_code(self.ring.code(f))

    @cached_property
    def is_odd(self) -> bool:
        """Nontrivial on the constants F_p*."""
        if self.modulus.degree == 0:
            return False
        return any(int(self.angle_table[c]) != 0 for c in range(1, self.ring.p))

    @cached_property
    def is_primitive(self) -> bool:
        """Not induced from any proper divisor m/P of m."""
        if self.modulus.degree == 0:
            return True
        ring = self.ring
        for P in ring.prime_divisors:
            sub = ring.m // P
            # chi is trivial on {u = 1 mod m/P} exactly when it is induced from m/P
            trivial = True
            for u in ring.units:
                if residue_code(ring.poly(u), sub) == residue_code(Poly(ring.p, (1,)), sub):
                    if int(self.angle_table[u]) != 0:
                        trivial = False
                        break
            if trivial:
                return False
        return True

    def __repr__(self):
        return f"FFCharacter(m={self.modulus.format()}, exponents={self.exponents})"


def build_ff_characters(m: Poly) -> list[FFCharacter]:
    """All Phi(m) characters; the principal one first."""
    group = unit_group_ff(m)
    return [FFCharacter(group, e) for e in all_exponent_vectors(group)]


def k_admissible(m: Poly, k: int) -> bool:
    """No nonprincipal chi mod m has chi^k principal, i.e. gcd(k, Phi(m)) = 1."""
    return math.gcd(k, ResidueRing(m).phi_formula) == 1


# summatory ----------------------------------------------------------------


def degree_class_sums(table: IrreducibleTable, ring: ResidueRing, k: int, N: int) -> np.ndarray:
    """G[n, code] = sum of F_k(f) over monic f of degree n with f = code (mod m)."""
    if N > table.max_degree:
        raise OutOfRange(f"N={N} beyond sieve depth {table.max_degree}")
    vals = table.factor_values(k)
    res = table.residues(ring)
    G = np.zeros((N + 1, ring.size), dtype=np.float64)
    for n in range(N + 1):
        lo, hi = int(table.off[n]), int(table.off[n + 1])
        G[n] = np.bincount(res[lo:hi], weights=vals[lo:hi], minlength=ring.size)
    return G


def degree_class_counts(table: IrreducibleTable, ring: ResidueRing, N: int) -> np.ndarray:
    """C[n, code] = number of monic f of degree n with f = code (mod m)."""
    res = table.residues(ring)
    C = np.zeros((N + 1, ring.size), dtype=np.int64)
    for n in range(N + 1):
        lo, hi = int(table.off[n]), int(table.off[n + 1])
        C[n] = np.bincount(res[lo:hi], minlength=ring.size)
    return C


@dataclass(frozen=True)
class FFSummatory:
    N: int
    m: Poly
    g: Poly
    k: int
    sum: float
    per_degree: tuple[float, ...]
    monic_only: bool = False


def ff_summatory(
    N: int, m: Poly, g: Poly, k: int, table: IrreducibleTable, monic_only: bool = False
) -> FFSummatory:
    """Sum of F_k(f) over nonzero f with deg f <= N and f = g (mod m).

    All f by default (f = c * monic, c in F_p*); monic_only restricts to c = 1.
    """
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")
    if m.p != table.p or g.p != table.p:
        raise InvalidArgument("characteristic mismatch")
    if N < 0:
        return FFSummatory(N, m, g, k, 0.0, (), monic_only)
    if table.p ** (N + 1) > ENUM_BUDGET:
        raise BudgetExceeded(f"p^(N+1) = {table.p ** (N + 1)} exceeds the enumeration budget")
    ring = ResidueRing(m)
    G = degree_class_sums(table, ring, k, N)
    target = ring.code(g)
    p = table.p
    per = []
    for n in range(N + 1):
        if monic_only:
            per.append(float(G[n, target]))
            continue
        # f = c * h, h monic: f = g  <=>  h = c^-1 g
        parts = [G[n, ring.code(g * pow(c, -1, p))] for c in range(1, p)]
        per.append(math.fsum(parts))
    return FFSummatory(N, m, g, k, math.fsum(per), tuple(per), monic_only)


def exponent_class_counts(table: IrreducibleTable, ring: ResidueRing, k: int, n: int):
    """Distinct (exponent numerator, residue code) pairs among monic f of
    degree n, with multiplicities: F_k(f) = p^(e/L) exactly describes f."""
    lo, hi = int(table.off[n]), int(table.off[n + 1])
    e = table.exponent_numerators(k)[lo:hi]
    r = table.residues(ring)[lo:hi].astype(np.int64)
    key = e * ring.size + r
    uniq, cnt = np.unique(key, return_counts=True)
    return uniq // ring.size, uniq % ring.size, cnt


def character_sum_exact_zero(chi: FFCharacter, counts_row: np.ndarray) -> bool:
    """Whether sum_code counts[code] chi(code) is exactly 0 in Z[zeta_N]."""
    N = chi.group.exponent
    t = chi.angle_table
    mask = t >= 0
    weights = np.bincount(t[mask], weights=counts_row[mask], minlength=N).astype(np.int64)
    return root_sum_is_zero(weights, N)
