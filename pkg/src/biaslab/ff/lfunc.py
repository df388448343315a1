"""Function-field L-functions as power series in u = q^-s, root location,
the Euler product M_k(s, chi), and the main-term constant for the summatory
function over F_p[X]."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..abelian import reduce_root_sum, root_sum_value
from ..errors import CertificateError, InvalidArgument, OutOfRange, RootFindingError
from .core import (
    FFCharacter,
    IrreducibleTable,
    ResidueRing,
    build_ff_characters,
    character_sum_exact_zero,
    exponent_class_counts,
    ff_summatory,
    necklace_count,
)
from .poly import Poly, gcd
from .sieve import offsets, residues_mod

CRITICAL_TOL = 1e-8
HALF_VALUE_FLOOR = 1e-8


@dataclass(frozen=True)
class USeries:
    q: int
    coeffs: np.ndarray = field(repr=False)
    exact: bool = False

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def truncate(self, D: int) -> "USeries":
        c = np.zeros(D + 1, dtype=np.complex128)
        n = min(D, self.degree) + 1
        c[:n] = self.coeffs[:n]
        return USeries(self.q, c, self.exact and D >= self.degree)

    def mul(self, other: "USeries", D: int) -> "USeries":
        a = self.truncate(D).coeffs
        b = other.truncate(D).coeffs
        return USeries(self.q, np.convolve(a, b)[: D + 1])

    def inverse(self, D: int) -> "USeries":
        a = self.truncate(D).coeffs
        if a[0] != 1:
            raise InvalidArgument("series inverse needs constant term 1")
        out = np.zeros(D + 1, dtype=np.complex128)
        out[0] = 1
        for n in range(1, D + 1):
            out[n] = -np.dot(a[1 : n + 1], out[n - 1 :: -1][:n])
        return USeries(self.q, out)

    def __call__(self, u: complex) -> complex:
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * u + c
        return complex(acc)

    def trimmed(self) -> np.ndarray:
        c = self.coeffs
        n = c.shape[0]
        while n > 1 and c[n - 1] == 0:
            n -= 1
        return c[:n]

    def format(self, digits: int = 12) -> str:
        terms = []
        for n, c in enumerate(self.trimmed()):
            if c == 0 and n:
                continue
            if c.imag == 0:
                s = f"{c.real:.{digits}g}"
            else:
                s = f"({c.real:.{digits}g}{c.imag:+.{digits}g}i)"
            terms.append(s if n == 0 else (f"{s}u" if n == 1 else f"{s}u^{n}"))
        return " + ".join(terms)


def zeta_u(q: int, D: int) -> USeries:
    """1/(1 - q u) to degree D: q^n monic polynomials of degree n."""
    return USeries(q, np.array([float(q) ** n for n in range(D + 1)], dtype=np.complex128), False)


def _monic_residue_counts(ring: ResidueRing, n_max: int) -> np.ndarray:
    """C[n, code] for monic f of degree n <= n_max."""
    p = ring.p
    off = offsets(p, n_max)
    res = residues_mod(p, n_max, ring.mulx, ring.one_code)
    C = np.zeros((n_max + 1, ring.size), dtype=np.int64)
    for n in range(n_max + 1):
        C[n] = np.bincount(res[off[n] : off[n + 1]], minlength=ring.size)
    return C


def _char_sum(chi: FFCharacter, counts_row: np.ndarray) -> complex:
    N = chi.group.exponent
    t = chi.angle_table
    mask = t >= 0
    w = np.bincount(t[mask], weights=counts_row[mask], minlength=N).astype(np.int64)
    return root_sum_value(w, N)


def prime_divisor_degrees(m: Poly) -> list[int]:
    return [P.degree for P in ResidueRing(m).prime_divisors]


def l_numerator(chi: FFCharacter) -> USeries:
    """Finite polynomial part: the L-polynomial for nonprincipal chi,
    prod_{P | m} (1 - u^deg P) for the principal character."""
    ring = chi.ring
    q = ring.p
    d = ring.m.degree
    if chi.is_principal:
        poly = np.array([1.0 + 0j])
        for e in prime_divisor_degrees(ring.m):
            fac = np.zeros(e + 1, dtype=np.complex128)
            fac[0], fac[e] = 1, -1
            poly = np.convolve(poly, fac)
        return USeries(q, poly, True)
    check_to = d + 3
    C = _monic_residue_counts(ring, check_to)
    for n in range(d, check_to + 1):
        if not character_sum_exact_zero(chi, C[n]):
            raise CertificateError(f"character sum at degree {n} does not vanish for {chi}")
    coeffs = np.array([_char_sum(chi, C[n]) for n in range(max(d, 1))], dtype=np.complex128)
    return USeries(q, coeffs, True)


def l_polynomial(chi: FFCharacter, D: int | None = None) -> USeries:
    """L(u, chi) = sum over monic f of chi(f) u^deg f.

    Finite of degree < deg m for nonprincipal chi (the vanishing of higher
    character sums is checked exactly, not assumed); for the principal
    character the series zeta_u * prod_{P|m}(1 - u^deg P) truncated at D.
    """
    num = l_numerator(chi)
    if not chi.is_principal:
        return num
    D = chi.ring.m.degree + 8 if D is None else D
    return num.mul(zeta_u(num.q, D), D)


@dataclass
class LPolyReport:
    chi: FFCharacter | None
    lpoly: USeries
    roots: list[complex]
    classification: list[str]
    half_value: complex
    half_ok: bool
    fe_ok: bool | None = None

    @property
    def anomalous(self) -> int:
        return self.classification.count("anomalous")

    @property
    def passed(self) -> bool:
        return self.anomalous == 0 and self.half_ok and self.fe_ok is not False

    def to_dict(self) -> dict:
        return {
            "character": None if self.chi is None else list(self.chi.exponents),
            "order": None if self.chi is None else self.chi.order,
            "lpoly": self.lpoly.format(),
            "roots": [[r.real, r.imag] for r in self.roots],
            "abs_roots": [abs(r) for r in self.roots],
            "classification": self.classification,
            "half_value": [self.half_value.real, self.half_value.imag],
            "half_ok": self.half_ok,
            "fe_ok": self.fe_ok,
            "passed": self.passed,
        }


def _polish(coeffs_high: np.ndarray, z: complex, mult: int) -> complex:
    # Newton on the (mult-1)-th derivative, which has a simple root there
    poly = np.poly1d(coeffs_high)
    for _ in range(mult - 1):
        poly = poly.deriv()
    dpoly = poly.deriv()
    for _ in range(20):
        fz, dz = poly(z), dpoly(z)
        if dz == 0:
            break
        step = fz / dz
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return complex(z)


def _vanishes_to_order(high: np.ndarray, z: complex, mult: int) -> bool:
    poly = np.poly1d(high)
    scale = float(np.max(np.abs(high))) * max(1.0, abs(z)) ** (len(high) - 1)
    for _ in range(mult):
        if abs(poly(z)) > 1e-7 * scale:
            return False
        poly = poly.deriv()
    return True


def find_roots(coeffs_low: np.ndarray) -> list[complex]:
    """Roots of sum c_n u^n, each multiple root listed with its multiplicity.

    A root of multiplicity m comes back from the eigenvalue solver smeared
    over a radius ~ eps^(1/m); such clusters are merged, replaced by their
    mean, accepted only if the first m derivatives vanish there, and then
    polished by Newton on the (m-1)-th derivative.
    """
    c = np.asarray(coeffs_low, dtype=np.complex128)
    n = c.shape[0]
    while n > 1 and c[n - 1] == 0:
        n -= 1
    c = c[:n]
    if n <= 1:
        return []
    high = c[::-1]
    raw = np.roots(high)
    if raw.shape[0] != n - 1 or not np.all(np.isfinite(raw)):
        raise RootFindingError(f"root finder failed on {list(c)}")
    clusters: list[list[complex]] = []
    for r in sorted(raw, key=lambda z: (abs(z), np.angle(z))):
        for cl in clusters:
            ctr = sum(cl) / len(cl)
            if abs(r - ctr) <= 1e-3 * max(1.0, abs(ctr)):
                cl.append(complex(r))
                break
        else:
            clusters.append([complex(r)])
    out = []
    for cl in clusters:
        ctr = sum(cl) / len(cl)
        if len(cl) > 1 and not _vanishes_to_order(high, ctr, len(cl)):
            groups = [[z] for z in cl]
        else:
            groups = [cl]
        for g in groups:
            z = _polish(high, sum(g) / len(g), len(g))
            out.extend([z] * len(g))
    scale = max(1.0, float(np.max(np.abs(c))))
    for z in out:
        if abs(np.polyval(high, z)) > 1e-8 * scale * max(1.0, abs(z)) ** (n - 1):
            raise RootFindingError(f"root {z} of {list(c)} did not converge")
    return out


def classify_root(z: complex, q: int, tol: float = CRITICAL_TOL) -> str:
    r = abs(z)
    if abs(r * math.sqrt(q) - 1) <= tol:
        return "critical"
    if abs(r - 1) <= tol:
        return "unit-circle"
    return "anomalous"


def rh_classify(lpoly: USeries, chi: FFCharacter | None = None, pole_factor: bool = False) -> LPolyReport:
    """Locate the roots of a finite L-polynomial and check L(q^-1/2) != 0.

    pole_factor: lpoly is the numerator of the principal L-function, whose
    full value also carries 1/(1 - q u).
    """
    if not lpoly.exact:
        raise InvalidArgument("rh_classify needs a finite polynomial")
    q = lpoly.q
    roots = find_roots(lpoly.coeffs)
    cls = [classify_root(z, q) for z in roots]
    u0 = q**-0.5
    half = lpoly(u0)
    if pole_factor:
        half /= 1 - q * u0
    fe_ok = None
    if chi is not None and not chi.is_principal and chi.is_odd and chi.is_primitive:
        c = lpoly.trimmed()
        d = c.shape[0] - 1
        fe_ok = bool(d == chi.ring.m.degree - 1) and bool(abs(abs(c[-1]) - q ** (d / 2)) <= CRITICAL_TOL * q ** (d / 2))
    return LPolyReport(chi, lpoly, roots, cls, half, bool(abs(half) > HALF_VALUE_FLOOR), fe_ok)


def lpoly_report(chi: FFCharacter) -> LPolyReport:
    return rh_classify(l_numerator(chi), chi, pole_factor=chi.is_principal)


# Euler product M_k(s, chi) --------------------------------------------------


def _angle_power_value(t: int, e: int, N: int) -> complex:
    te = (t * e) % N
    if te == 0:
        return 1.0 + 0j
    if 2 * te == N:
        return -1.0 + 0j
    return complex(math.cos(2 * math.pi * te / N), math.sin(2 * math.pi * te / N))


def local_M_factor(t: int, N: int, norm: int, k: int, E: int) -> np.ndarray:
    """1 + A_P as a series in v = u^deg P up to v^E, chi(P) = exp(2 pi i t / N)."""
    num = np.zeros(E + 1, dtype=np.complex128)
    for e in range(k, E + 1):
        num[e] = _angle_power_value(t, e, N) * float(norm) ** (1.0 / e)
    den = [_angle_power_value(t, j, N) * float(norm) ** j for j in range(k)]
    quo = np.zeros(E + 1, dtype=np.complex128)
    for e in range(E + 1):
        acc = num[e]
        for j in range(1, min(e, k - 1) + 1):
            acc -= den[j] * quo[e - j]
        quo[e] = acc
    quo[0] += 1
    return quo


def euler_M_series(k: int, chi: FFCharacter, D: int, irr: IrreducibleTable) -> USeries:
    """prod over monic irreducible P of (1 + A_P), as a series in u to degree D."""
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")
    if irr.max_degree < D // k:
        raise OutOfRange(f"need irreducibles to degree {D // k}, table has {irr.max_degree}")
    ring = chi.ring
    q = ring.p
    res = irr.residues(ring)
    N = chi.group.exponent
    out = np.zeros(D + 1, dtype=np.complex128)
    out[0] = 1
    for dP in range(1, D // k + 1):
        E = D // dP
        norm = q**dP
        for pid in irr.ids_of_degree(dP):
            t = int(chi.angle_table[res[pid]])
            if t < 0:
                continue
            loc = local_M_factor(t, N, norm, k, E)
            new = out.copy()
            for e in range(k, E + 1):
                if loc[e] != 0:
                    sh = e * dP
                    new[sh:] += loc[e] * out[: D + 1 - sh]
            out = new
    return USeries(q, out)


def _lseries_in(chi: FFCharacter, D: int) -> USeries:
    return l_polynomial(chi, D).truncate(D)


def series_rhs(chi: FFCharacter, k: int, D: int, irr: IrreducibleTable) -> USeries:
    """Coefficients of L(s-1, chi) / L(ks-k, chi^k) * M_k(s, chi) in u."""
    q = chi.ring.p
    L1 = _lseries_in(chi, D)
    a = np.array([L1[n] * float(q) ** n for n in range(D + 1)])
    chik = chi.power(k)
    Lk = _lseries_in(chik, D // k)
    b = np.zeros(D + 1, dtype=np.complex128)
    for n in range(D // k + 1):
        b[k * n] = Lk[n] * float(q) ** (k * n)
    inv_b = USeries(q, b).inverse(D)
    M = euler_M_series(k, chi, D, irr)
    return USeries(q, a).mul(inv_b, D).mul(M, D)


def direct_coefficients(chi: FFCharacter, k: int, D: int, irr: IrreducibleTable) -> np.ndarray:
    """A_n = sum over monic f of degree n of chi(f) F_k(f), n <= D.

    F_k(f) = p^(e/L) with integer e, so A_n is assembled exactly: for each
    fractional part of e/L the p-power-weighted root-of-unity sum is an
    element of Z[zeta_N], reduced exactly before the single float evaluation.
    Cancellations (true zeros included) are therefore exact.
    """
    ring = chi.ring
    p = ring.p
    L = irr.exponent_denominator
    N = chi.group.exponent
    angles = chi.angle_table
    roots = np.exp(2j * np.pi * np.arange(N) / N)
    out = np.zeros(D + 1, dtype=np.complex128)
    for n in range(D + 1):
        e, codes, cnt = exponent_class_counts(irr, ring, k, n)
        t = angles[codes]
        classes: dict[int, dict[int, int]] = {}
        for ei, ti, ci in zip(e.tolist(), t.tolist(), cnt.tolist()):
            if ti < 0:
                continue
            whole, frac = divmod(ei, L)
            w = classes.setdefault(frac, {})
            w[ti] = w.get(ti, 0) + ci * p**whole
        total = 0j
        for frac, w in sorted(classes.items()):
            red = reduce_root_sum(w, N)
            if not red:
                continue
            val = sum(complex(float(c)) * roots[j] for j, c in enumerate(red) if c)
            total += float(p) ** (frac / L) * val
        out[n] = total
    return out


def series_identity_check(chi: FFCharacter, k: int, D: int, irr: IrreducibleTable) -> float:
    lhs = direct_coefficients(chi, k, D, irr)
    rhs = series_rhs(chi, k, D, irr).coeffs
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))))


def unit_adjustment(chi: FFCharacter) -> complex:
    """sum over constants c in F_p* of chi(c)."""
    p = chi.ring.p
    if chi.ring.m.degree == 0:
        return complex(p - 1)
    return complex(sum(chi.value_table[c] for c in range(1, p)))


@dataclass(frozen=True)
class TwoRouteResult:
    N: int
    direct: float
    orthogonal: float
    rel_diff: float


def two_route_summatory(N: int, m: Poly, g: Poly, k: int, irr: IrreducibleTable, route: str = "series") -> TwoRouteResult:
    """S_k(N; m, g) by enumeration and by (1/Phi) sum_chi conj(chi(g)) (units) sum_n A_n(chi).

    route='series' takes A_n(chi) from the factorized series, 'direct' from
    the twisted enumeration.
    """
    direct = ff_summatory(N, m, g, k, irr).sum
    chars = build_ff_characters(m)
    total = 0j
    for chi in chars:
        adj = unit_adjustment(chi)
        if adj == 0:
            continue
        cg = chi(g)
        if cg == 0:
            continue
        if route == "series":
            A = series_rhs(chi, k, N, irr).coeffs
        elif route == "direct":
            A = direct_coefficients(chi, k, N, irr)
        else:
            raise InvalidArgument(f"unknown route {route!r}")
        total += np.conj(cg) * adj * complex(np.sum(A[: N + 1]))
    orth = total.real / len(chars)
    rel = abs(orth - direct) / max(abs(direct), 1e-300)
    return TwoRouteResult(N, direct, orth, rel)


# main-term constant -------------------------------------------------------


def _principal_local_A(x: float, k: int) -> float:
    """A_P(2) for the principal character, |P| = x."""
    num = 0.0
    for m in range(200):
        e = k + m
        term = x ** (1.0 / e - 2 * e)
        num += term
        if term < 1e-17 * num:
            break
    den = sum(x ** (-j) for j in range(k))
    return num / den


@dataclass(frozen=True)
class MValue:
    value: float
    max_degree: int
    tail_bound: float


def euler_M_principal_at_2(m: Poly, k: int, tol: float = 1e-13) -> MValue:
    """M_k(2, chi_0) mod m from necklace counts (A_P depends only on |P|),
    with the tail over deg P > D certified by |A_P| <= 2.25 |P|^-sigma."""
    q = m.p
    sigma = 2 * k - 1 / k
    r = q ** (1 - sigma)
    D = 1
    while 4.5 / (D + 1) * r ** (D + 1) / (1 - r) > tol:
        D += 1
    logs = [necklace_count(q, d) * math.log1p(_principal_local_A(float(q) ** d, k)) for d in range(1, D + 1)]
    for P in ResidueRing(m).prime_divisors:
        logs.append(-math.log1p(_principal_local_A(float(P.norm), k)))
    tail = 4.5 / (D + 1) * r ** (D + 1) / (1 - r)
    return MValue(math.exp(math.fsum(logs)), D, tail)


def l_principal_at(m: Poly, s: float) -> float:
    """L_q(s, chi_0) = prod_{P|m}(1 - |P|^-s) / (1 - q^(1-s))."""
    q = m.p
    val = 1 / (1 - q ** (1 - s))
    for P in ResidueRing(m).prime_divisors:
        val *= 1 - float(P.norm) ** -s
    return val


@dataclass
class MainTermReport:
    m: Poly
    g: Poly
    k: int
    phi: int
    unit_factor: float
    M_k_2: float
    L_k: float
    paper_constant: float
    series_constant: float
    tail_bound: float
    empirical_ratios: list[tuple[int, float]]
    normalized_errors: list[tuple[int, float]]

    def to_json(self) -> str:
        d = {
            "modulus": self.m.format(),
            "g": self.g.format(),
            "k": self.k,
            "Phi": self.phi,
            "unit_factor": self.unit_factor,
            "M_k_2": self.M_k_2,
            "L_k_chi0": self.L_k,
            "paper_constant": self.paper_constant,
            "series_constant": self.series_constant,
            "tail_bound": self.tail_bound,
            "empirical_ratios": [[n, r] for n, r in self.empirical_ratios],
            "ratio_to_paper_constant": [[n, r / self.paper_constant] for n, r in self.empirical_ratios],
            "ratio_to_series_constant": [[n, r / self.series_constant] for n, r in self.empirical_ratios],
            "normalized_errors": [[n, e] for n, e in self.normalized_errors],
        }
        return json.dumps(d, sort_keys=True)


def main_term_report(m: Poly, g: Poly, k: int, N_range, irr: IrreducibleTable, tol: float = 1e-13) -> MainTermReport:
    """Leading constants for S_k(N; m, g) and the empirical ratios S / q^2N.

    paper_constant is M_k(2,chi_0) prod(1-1/|P|) / (2 Phi L_q(k,chi_0) log q).
    series_constant is the coefficient read off the u-series itself: the
    simple pole at u = q^-2 gives A_n(chi_0) ~ R q^2n, summing degrees and
    the p-1 leading units gives R q^2 / ((q+1) Phi).
    """
    ring = ResidueRing(m)
    if gcd_is_nontrivial(g, ring):
        raise InvalidArgument("g must be coprime to m")
    q = m.p
    phi = ring.phi_formula
    unit_factor = math.prod(1 - 1 / P.norm for P in ring.prime_divisors)
    Mv = euler_M_principal_at_2(m, k, tol)
    Lk = l_principal_at(m, k)
    R = Mv.value * unit_factor / Lk
    stated = R / (2 * phi * math.log(q))
    series = R * q * q / ((q + 1) * phi)
    ratios, errs = [], []
    for N in N_range:
        S = ff_summatory(N, m, g, k, irr).sum
        ratios.append((N, S / float(q) ** (2 * N)))
        errs.append((N, (S - stated * float(q) ** (2 * N)) / float(q) ** (N * (1 + 1 / (2 * k)))))
    return MainTermReport(m, g, k, phi, unit_factor, Mv.value, Lk, stated, series, Mv.tail_bound, ratios, errs)


def gcd_is_nontrivial(g: Poly, ring: ResidueRing) -> bool:
    if g.is_zero:
        return ring.m.degree > 0
    return gcd(g, ring.m).degree > 0
