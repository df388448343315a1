"""Imaginary quadratic fields Q(sqrt d): class number, splitting of primes,
enumeration of ideals by norm with F_k, and the leading constant of
sum_{N(A) <= x} F_k(A)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import sympy
from numba import njit
from sympy.functions.combinatorial.numbers import kronecker_symbol

from .errors import BudgetExceeded, CertificateError, InvalidArgument
from .euler import periodic_l_value, prime_cutoff_for, zeta_real, _tail_bound

MAX_ABS_D = 10_000
MAX_X = 10_000_000


def is_fundamental(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return sympy.ntheory.factor_.core(abs(d)) == abs(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and sympy.ntheory.factor_.core(abs(m)) == abs(m)
    return False


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """Reduced positive definite forms (a, b, c), b^2 - 4ac = d:
    |b| <= a <= c, and b >= 0 when |b| = a or a = c."""
    out = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            out.append((a, b, c))
        a += 1
    return out


@dataclass(frozen=True)
class QuadField:
    d: int
    h: int
    w: int
    lam: float

    @property
    def conductor(self) -> int:
        return abs(self.d)


def make_field(d: int) -> QuadField:
    if d >= 0:
        raise InvalidArgument(f"only imaginary quadratic fields (d < 0), got {d}")
    if abs(d) > MAX_ABS_D:
        raise InvalidArgument(f"|d| = {abs(d)} beyond {MAX_ABS_D}")
    if not is_fundamental(d):
        raise InvalidArgument(f"{d} is not a fundamental discriminant")
    h = len(reduced_forms(d))
    w = 6 if d == -3 else 4 if d == -4 else 2
    return QuadField(d, h, w, 2 * math.pi * h / (w * math.sqrt(-d)))


def kronecker(d: int, n: int) -> int:
    return int(kronecker_symbol(d, n))


def kronecker_table(d: int) -> np.ndarray:
    """chi_d(n) for n = 0..|d|-1 (a real character mod |d|)."""
    return np.array([kronecker(d, n) for n in range(abs(d))], dtype=np.int64)


@dataclass(frozen=True)
class PrimeIdealQ:
    p: int
    splitting: str
    norm: int
    tag: int = 0


def split_prime(p: int, field: QuadField) -> list[PrimeIdealQ]:
    if not sympy.isprime(p):
        raise InvalidArgument(f"{p} is not prime")
    s = kronecker(field.d, p)
    if s == 0:
        return [PrimeIdealQ(p, "ramified", p)]
    if s == 1:
        return [PrimeIdealQ(p, "split", p, 0), PrimeIdealQ(p, "split", p, 1)]
    return [PrimeIdealQ(p, "inert", p * p)]


def prime_ideal_norms(field: QuadField, x: int) -> np.ndarray:
    """Norms of all prime ideals with norm <= x, ascending, one entry per ideal."""
    norms = []
    for p in sympy.sieve.primerange(2, x + 1):
        for P in split_prime(int(p), field):
            if P.norm <= x:
                norms.append(P.norm)
    norms.sort()
    return np.array(norms, dtype=np.int64)


@njit(cache=True)
def _ideal_dfs(norms, x, k):
    # explicit stack of (next prime-ideal index, norm, F_k); every push is one ideal
    total = 1.0
    comp = 0.0
    count = 1
    st_i = [0]
    st_n = [1]
    st_f = [1.0]
    while len(st_i) > 0:
        start = st_i.pop()
        n = st_n.pop()
        f = st_f.pop()
        for i in range(start, norms.shape[0]):
            Ni = norms[i]
            if Ni > x // n:
                break
            m = n * Ni
            a = 1
            while True:
                if a < k:
                    loc = float(Ni) ** a
                else:
                    loc = float(Ni) ** (1.0 / a)
                fv = f * loc
                y = fv - comp
                t = total + y
                comp = (t - total) - y
                total = t
                count += 1
                st_i.append(i + 1)
                st_n.append(m)
                st_f.append(fv)
                if m > x // Ni:
                    break
                m *= Ni
                a += 1
    return total, count


@dataclass(frozen=True)
class QuadSummatory:
    x: int
    k: int
    sum: float
    ideal_count: int


def quad_summatory(x: int, k: int, field: QuadField) -> QuadSummatory:
    """sum of F_k(A) over integral ideals A with N(A) <= x."""
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")
    if x > MAX_X:
        raise BudgetExceeded(f"x = {x} beyond the enumeration budget {MAX_X}")
    if x < 1:
        return QuadSummatory(x, k, 0.0, 0)
    norms = prime_ideal_norms(field, x)
    total, count = _ideal_dfs(norms, int(x), int(k))
    return QuadSummatory(x, k, float(total), int(count))


def ideal_count_formula(x: int, d: int) -> int:
    """sum_{n<=x} sum_{m|n} chi_d(m) = sum_{m<=x} chi_d(m) floor(x/m)."""
    tab = kronecker_table(d)
    m = np.arange(1, x + 1, dtype=np.int64)
    return int(np.sum(tab[m % abs(d)] * (x // m)))


def _untwisted_local_A(norm: int, s: float, k: int) -> tuple[float, float]:
    # A(s) for a prime of norm N, trivial twist; error bound on the m-series cut
    ratio = float(norm) ** -s
    num = 0.0
    last = 0.0
    for m in range(200):
        e = k + m
        term = float(norm) ** (1.0 / e - e * s)
        num += term
        last = term
        if term < 1e-17 * num:
            break
    den = math.fsum(float(norm) ** (-j * (s - 1)) for j in range(k))
    return num / den, last * ratio / (1 - ratio) / den


@dataclass(frozen=True)
class FieldConstants:
    zeta_K_k: float
    R_k_2: float
    predicted: float
    prime_cutoff: int
    tail_bound: float


def field_constants(field: QuadField, k: int, tol: float = 1e-12) -> FieldConstants:
    """zeta_K(k) = zeta(k) L(k, chi_d); R_k(2) = prod over prime ideals of (1 + A(2));
    predicted = lambda R_k(2) / (2 zeta_K(k))."""
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")
    zk = zeta_real(k, tol / 10)
    Lk = periodic_l_value(k, kronecker_table(field.d).astype(np.float64), abs(field.d), tol / 10).real
    zeta_K = zk * Lk
    # each rational prime carries at most two ideals of norm >= p: twice the rational tail
    P = prime_cutoff_for(tol / 2, 2.0, k)
    logs = []
    err = 0.0
    for p in sympy.sieve.primerange(2, P + 1):
        for ideal in split_prime(int(p), field):
            A, e = _untwisted_local_A(ideal.norm, 2.0, k)
            logs.append(math.log1p(A))
            err += 2 * e
    bound = 2 * _tail_bound(P, 2.0, k) + err
    if bound > tol:
        raise CertificateError(f"tail bound {bound} above tolerance {tol}")
    R = math.exp(math.fsum(logs))
    return FieldConstants(zeta_K, R, field.lam * R / (2 * zeta_K), P, bound)


def quad_report(field: QuadField, k: int, x: int, tol: float = 1e-12) -> dict:
    c = field_constants(field, k, tol)
    s = quad_summatory(x, k, field)
    empirical = s.sum / float(x) ** 2
    return {
        "d": field.d,
        "k": k,
        "h": field.h,
        "w": field.w,
        "lambda": field.lam,
        "zeta_K_k": c.zeta_K_k,
        "R_k_2": c.R_k_2,
        "predicted": c.predicted,
        "empirical": empirical,
        "ratio": empirical / c.predicted,
        "ideal_count": s.ideal_count,
        "tail_bound": c.tail_bound,
        "x": x,
    }


def quad_report_json(field: QuadField, k: int, x: int, tol: float = 1e-12) -> str:
    return json.dumps(quad_report(field, k, x, tol), sort_keys=True)
