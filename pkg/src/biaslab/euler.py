"""zeta, Dirichlet L-values at real s, the Euler products M_{k,chi}(s), the
main-term constants c(q, a), and the coefficient-level check of

    sum chi(n) I_k(n) n^-s = L(s-1, chi) / L(ks-k, chi^k) * M_{k,chi}(s).

Everything is restricted to real s (s >= 2 for the Euler products); there
is no analytic continuation anywhere on the integer side.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
import sympy

from .arith import FactorizationTable, build_spf_sieve
from .characters import DirichletCharacter, principal_character
from .errors import CertificateError, InvalidArgument, OutOfRange, SingularLocalFactor, Unsupported

MAX_PRIME_CUTOFF = 10_000_000


def _em_tail(x: float, s: float) -> tuple[float, float]:
    """Euler-Maclaurin value of sum_{j>=0} (x+j)^-s through the B_2 term, and
    the bound on what is left (first omitted term; the summand is
    completely monotone so the remainder is dominated by it)."""
    tail = x ** (1 - s) / (s - 1) + 0.5 * x**-s + s * x ** (-s - 1) / 12
    rem = s * (s + 1) * (s + 2) * x ** (-s - 3) / 720
    return tail, rem


def _em_cutoff(s: float, tol: float, scale: float = 1.0) -> int:
    # smallest N with scale * s(s+1)(s+2) N^(-s-3) / 720 <= tol
    c = scale * s * (s + 1) * (s + 2) / 720
    return max(8, math.ceil((c / tol) ** (1 / (s + 3))))


def zeta_real(s: float, tol: float = 1e-13) -> float:
    if s <= 1:
        raise InvalidArgument(f"zeta_real needs s > 1, got {s}")
    N = _em_cutoff(s, tol / 2)
    head = math.fsum(float(n) ** -s for n in range(1, N))
    tail, _ = _em_tail(float(N), s)
    return head + tail


def periodic_l_value(s: float, values, q: int, tol: float = 1e-13) -> complex:
    """sum_{n>=1} f(n) n^-s for a q-periodic f given by values[0..q-1]."""
    if s <= 1:
        raise InvalidArgument(f"needs s > 1, got {s}")
    support = [r for r in range(q) if values[r] != 0]
    if not support:
        return 0j
    # each class r contributes q^-s * sum_j (j + r/q)^-s
    scale = len(support) * q**-s * max(abs(values[r]) for r in support)
    J = _em_cutoff(s, tol / 2, scale)
    total_re, total_im = [], []
    for r in support:
        x0 = (r if r else q) / q
        xs = x0 + np.arange(J, dtype=np.float64)
        head = math.fsum(xs**-s)
        tail, _ = _em_tail(x0 + J, s)
        part = complex(values[r]) * (head + tail) * q**-s
        total_re.append(part.real)
        total_im.append(part.imag)
    return complex(math.fsum(total_re), math.fsum(total_im))


def l_value(s: float, chi: DirichletCharacter, tol: float = 1e-13) -> complex:
    q = chi.q
    if chi.is_principal:
        z = zeta_real(s, tol / 2)
        for p in sympy.primefactors(q):
            z *= 1 - p**-s
        return complex(z)
    return periodic_l_value(s, chi.value_table, q, tol)


def _chi_power_values(chi: DirichletCharacter, p: int, upto: int) -> list[complex]:
    """chi(p)^j for j = 0..upto from exact angle arithmetic."""
    t = int(chi.angle_table[p % chi.q])
    if t < 0:
        return [1.0 + 0j] + [0j] * upto
    N = chi.group.exponent
    out = []
    for j in range(upto + 1):
        tj = (j * t) % N
        if tj == 0:
            out.append(1.0 + 0j)
        elif 2 * tj == N:
            out.append(-1.0 + 0j)
        else:
            out.append(complex(math.cos(2 * math.pi * tj / N), math.sin(2 * math.pi * tj / N)))
    return out


def local_factor_terms(p: int, s: float, chi: DirichletCharacter, k: int, m_terms: int = 200):
    """A_p(s) and a bound on its truncation error.

    Numerator: sum_{m>=0} chi(p)^(k+m) p^(1/(k+m) - (k+m)s), stopped once a
    term is below 1e-16 of the running sum (the ratio of successive terms is
    at most p^-s, which certifies the remainder).  Denominator:
    sum_{j<k} chi(p)^j p^(-j(s-1)).
    """
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")
    if s < 1 + 1 / k:
        raise InvalidArgument(f"s = {s} too small for the local series at k = {k}")
    t = int(chi.angle_table[p % chi.q])
    if t < 0:
        return 0j, 0.0
    powers = _chi_power_values(chi, p, k + m_terms)
    den = sum(powers[j] * p ** (-j * (s - 1)) for j in range(k))
    if abs(den) < 1e-14:
        raise SingularLocalFactor(f"denominator of A_{p}({s}) vanishes")
    ratio = p**-s
    num = 0j
    last = 0.0
    for m in range(m_terms):
        e = k + m
        term = powers[e] * p ** (1.0 / e - e * s)
        num += term
        last = abs(term)
        if last < 1e-16 * abs(num):
            break
    rem = last * ratio / (1 - ratio)
    return num / den, rem / abs(den)


def local_factor_A(p: int, s: float, chi: DirichletCharacter, k: int, m_terms: int = 200) -> complex:
    return local_factor_terms(p, s, chi, k, m_terms)[0]


@dataclass(frozen=True)
class EulerProductValue:
    s: float
    value: complex
    prime_cutoff: int
    tail_bound: float


def _tail_sigma(s: float, k: int) -> float:
    return k * s - 1.0 / k


def _tail_bound(P: int, s: float, k: int) -> float:
    # |A_p(s)| <= 4 p^-sigma for p >= 3; |log(1+A)| <= 2|A|; sum_{n>P} n^-sigma <= P^(1-sigma)/(sigma-1)
    sigma = _tail_sigma(s, k)
    return 8.0 * P ** (1 - sigma) / (sigma - 1)


def prime_cutoff_for(tol: float, s: float, k: int) -> int:
    sigma = _tail_sigma(s, k)
    P = math.ceil((8.0 / ((sigma - 1) * tol / 2)) ** (1 / (sigma - 1)))
    return max(P, 3)


def euler_product_M(
    s: float,
    chi: DirichletCharacter,
    k: int,
    tol: float = 1e-12,
    extra_primes=None,
) -> EulerProductValue:
    """prod_{p <= P} (1 + A_p(s)) with P chosen so the certified log-error <= tol.

    If tol would need P beyond MAX_PRIME_CUTOFF the product is cut there and
    the achieved (larger) tail bound is reported instead.
    """
    if s < 2:
        raise InvalidArgument(f"Euler products are evaluated at real s >= 2, got {s}")
    P = min(prime_cutoff_for(tol, s, k), MAX_PRIME_CUTOFF)
    primes = sympy.sieve.primerange(2, P + 1) if extra_primes is None else extra_primes
    logs_re, logs_im = [], []
    local_err = 0.0
    for p in primes:
        A, err = local_factor_terms(int(p), s, chi, k)
        if A == 0:
            continue
        if abs(A) >= 0.5:
            raise CertificateError(f"|A_{p}({s})| = {abs(A)} too large for the log bound")
        lg = np.log1p(A)
        logs_re.append(lg.real)
        logs_im.append(lg.imag)
        local_err += 2 * err
    bound = _tail_bound(P, s, k) + local_err
    value = complex(np.exp(complex(math.fsum(logs_re), math.fsum(logs_im))))
    if chi.is_principal:
        value = complex(value.real, 0.0)
    return EulerProductValue(s, value, P, bound)


@dataclass(frozen=True)
class CoeffVector:
    """Dirichlet coefficients a_1..a_D stored at a[1..D]; a[0] is unused (0)."""

    a: np.ndarray

    @property
    def D(self) -> int:
        return self.a.shape[0] - 1

    def __getitem__(self, n):
        return self.a[n]


def coeffs_direct(D: int, chi: DirichletCharacter, k: int, table: FactorizationTable) -> CoeffVector:
    if D > table.limit:
        raise OutOfRange(f"D={D} exceeds sieve limit {table.limit}")
    vals = table.ik_values(k)[: D + 1]
    out = chi.values_upto(D) * vals
    out[0] = 0
    return CoeffVector(out)


def dirichlet_convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    D = x.shape[0] - 1
    out = np.zeros(D + 1, dtype=np.result_type(x, y))
    for d in range(1, D + 1):
        xd = x[d]
        if xd == 0:
            continue
        m = D // d
        out[d :: d][:m] += xd * y[1 : m + 1]
    return out


def _local_M_series(p: int, chi: DirichletCharacter, k: int, emax: int) -> np.ndarray:
    """Coefficients of 1 + N(T)/Den(T) in T = p^-s up to T^emax."""
    c = _chi_power_values(chi, p, max(emax, k))
    num = np.zeros(emax + 1, dtype=np.complex128)
    for e in range(k, emax + 1):
        num[e] = c[e] * p ** (1.0 / e)
    den = np.zeros(emax + 1, dtype=np.complex128)
    for j in range(min(k, emax + 1)):
        den[j] = c[j] * float(p) ** j
    # power-series division, den[0] = 1
    quo = np.zeros(emax + 1, dtype=np.complex128)
    for e in range(emax + 1):
        acc = num[e]
        for j in range(1, min(e, k - 1) + 1):
            acc -= den[j] * quo[e - j]
        quo[e] = acc
    quo[0] += 1
    return quo


def coeffs_from_factorization(D: int, chi: DirichletCharacter, k: int) -> CoeffVector:
    """Coefficients of L(s-1, chi) * L(ks-k, chi^k)^-1 * M_{k,chi}(s) up to n = D."""
    if D < 1:
        raise InvalidArgument("D must be >= 1")
    table = build_spf_sieve(max(D, 2))
    chi_vals = chi.values_upto(D)
    n = np.arange(D + 1, dtype=np.float64)

    # L(s-1, chi): chi(n) n
    b = chi_vals * n
    b[0] = 0

    # 1 / L(ks-k, chi^k): mu(m) chi^k(m) m^k on n = m^k
    chik = chi.power(k)
    c = np.zeros(D + 1, dtype=np.complex128)
    m = 1
    while m**k <= D:
        mu = int(sympy.mobius(m))
        if mu:
            c[m**k] = mu * chik(m) * float(m) ** k
        m += 1

    # M_{k,chi}: multiplicative, value at p^e is the T^e coefficient of 1 + A_p(T)
    M = np.zeros(D + 1, dtype=np.complex128)
    M[1] = 1
    spf = table.spf
    local: dict[int, np.ndarray] = {}
    for nn in range(2, D + 1):
        p = int(spf[nn])
        rest = nn
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        ser = local.get(p)
        if ser is None:
            emax = int(math.log(D) / math.log(p)) + 1
            ser = _local_M_series(p, chi, k, emax)
            local[p] = ser
        M[nn] = M[rest] * ser[e]

    return CoeffVector(dirichlet_convolve(dirichlet_convolve(b, c), M))


def series_oracle_discrepancy(D: int, chi: DirichletCharacter, k: int, table: FactorizationTable) -> float:
    """max_{n <= D} |direct - factorized| / n."""
    direct = coeffs_direct(D, chi, k, table).a
    fact = coeffs_from_factorization(D, chi, k).a
    n = np.arange(1, D + 1, dtype=np.float64)
    return float(np.max(np.abs(direct[1:] - fact[1:]) / n))


@dataclass(frozen=True)
class ConstantsReport:
    q: int
    k: int
    c_unit: float
    c_zero: float | None
    total: float
    zeta_k: float
    L_k_chi0: float
    M_k_chi0: float
    M_k_trivial: float
    tail_bound: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def constants_report(q: int, k: int, tol: float = 1e-12, want_zero: bool = True) -> ConstantsReport:
    """c(q, a) for units a, the zero-class constant (prime q), and the Q^2
    coefficient of S_k(Q; 1, 0)."""
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")
    if q < 1:
        raise InvalidArgument(f"modulus must be >= 1, got {q}")
    if want_zero and q > 1 and not sympy.isprime(q):
        raise Unsupported("zero-class constant is only defined here for prime q")
    zeta_k = zeta_real(k, tol / 10)
    chi0 = principal_character(q)
    L0 = l_value(k, chi0, tol / 10).real
    Mq = euler_product_M(2.0, chi0, k, tol)
    M1 = euler_product_M(2.0, principal_character(1), k, tol)
    phi = len(chi0.group.units)
    unit_factor = math.prod(1 - 1 / p for p in sympy.primefactors(q))
    c_unit = Mq.value.real * unit_factor / (2 * phi * L0)
    total = M1.value.real / (2 * zeta_k)
    c_zero = total - phi * c_unit if (want_zero and q > 1) else None
    return ConstantsReport(
        q=q,
        k=k,
        c_unit=c_unit,
        c_zero=c_zero,
        total=total,
        zeta_k=zeta_k,
        L_k_chi0=L0,
        M_k_chi0=Mq.value.real,
        M_k_trivial=M1.value.real,
        tail_bound=max(Mq.tail_bound, M1.tail_bound),
    )
