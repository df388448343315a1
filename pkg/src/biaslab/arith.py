"""Integer side: smallest-prime-factor sieve, the irrational factor function
I_k(n), and summatory functions S_k(Q; q, a) over residue classes.

Memory budget: a table of limit n costs 4 bytes (int32 spf) plus 8 bytes per
cached I_k value array, so 10^8 needs ~1.2 GB with one k cached.  The cap is
``BIASLAB_BUDGET_MB`` (default 4096).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .errors import InvalidArgument, OutOfRange, check_budget

# Summation blocks: ascending n inside a block, block totals Kahan-reduced in
# block order.  Fixed so sums are bit-identical across runs and thread counts.
BLOCK = 1 << 16


@njit(cache=True)
def _spf_sieve(limit):
    spf = np.zeros(limit + 1, dtype=np.int32)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            if i <= limit // i:
                for j in range(i * i, limit + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
    return spf


@njit(cache=True)
def _ik_values(spf, upto, k):
    # v[n] = v[n / p^a] * p^beta(a); products of integers stay exact in float64
    v = np.zeros(upto + 1, dtype=np.float64)
    if upto >= 1:
        v[1] = 1.0
    for n in range(2, upto + 1):
        p = spf[n]
        m = n // p
        a = 1
        while m % p == 0:
            m //= p
            a += 1
        if a < k:
            local = float(p) ** a
        else:
            local = float(p) ** (1.0 / a)
        v[n] = v[m] * local
    return v


@njit(cache=True)
def _kahan_block(values, q, a, lo, hi):
    """Kahan sum of values[n] for lo <= n <= hi, n = a (mod q), ascending n."""
    r = lo % q
    start = lo + ((a - r) % q)
    s = 0.0
    c = 0.0
    for n in range(start, hi + 1, q):
        y = values[n] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


@njit(cache=True, parallel=True)
def _block_sums(values, q, a, nblocks, block):
    out = np.zeros(nblocks, dtype=np.float64)
    for j in prange(nblocks):
        lo = j * block + 1
        hi = min((j + 1) * block, values.shape[0] - 1)
        out[j] = _kahan_block(values, q, a, lo, hi)
    return out


@njit(cache=True)
def _checkpoint_sums(values, q, a, block, block_totals, checkpoints):
    # checkpoints ascending; result[i] = Kahan(block_totals[:j]) (+) partial(block j)
    out = np.zeros(checkpoints.shape[0], dtype=np.float64)
    s = 0.0
    c = 0.0
    done = 0
    for i in range(checkpoints.shape[0]):
        Q = checkpoints[i]
        if Q < 1:
            out[i] = 0.0
            continue
        j = (Q - 1) // block
        while done < j:
            y = block_totals[done] - c
            t = s + y
            c = (t - s) - y
            s = t
            done += 1
        if Q == (j + 1) * block:
            partial = block_totals[j]
        else:
            partial = _kahan_block(values, q, a, j * block + 1, Q)
        y = partial - c
        out[i] = s + y
    return out


@dataclass(frozen=True, eq=False)
class FactorizationTable:
    """Smallest prime factor of every 2 <= n <= limit (immutable, shareable)."""

    limit: int
    spf: np.ndarray = field(repr=False)
    _ik_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def ik_values(self, k: int, upto: int | None = None) -> np.ndarray:
        """Array v with v[n] = I_k(n) for 1 <= n <= upto (v[0] = 0)."""
        upto = self.limit if upto is None else upto
        if upto > self.limit:
            raise OutOfRange(f"{upto} exceeds sieve limit {self.limit}")
        cached = self._ik_cache.get(k)
        if cached is None or cached.shape[0] <= upto:
            check_budget(8 * (self.limit + 1) * (len(self._ik_cache) + 1), "I_k value table")
            cached = _ik_values(self.spf, self.limit, k)
            cached.flags.writeable = False
            self._ik_cache[k] = cached
        return cached


def build_spf_sieve(limit: int) -> FactorizationTable:
    if limit < 2:
        raise InvalidArgument(f"sieve limit must be >= 2, got {limit}")
    check_budget(4 * (limit + 1), "smallest-prime-factor sieve")
    spf = _spf_sieve(int(limit))
    spf.flags.writeable = False
    return FactorizationTable(int(limit), spf)


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.factors)


def factorize(n: int, table: FactorizationTable) -> Factorization:
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    if n > table.limit:
        raise OutOfRange(f"{n} exceeds sieve limit {table.limit}")
    spf = table.spf
    out = []
    m = n
    while m > 1:
        p = int(spf[m])
        a = 0
        while m % p == 0:
            m //= p
            a += 1
        out.append((p, a))
    return Factorization(n, tuple(out))


def _check_k(k: int) -> None:
    if k < 2:
        raise InvalidArgument(f"order k must be >= 2, got {k}")


def beta(alpha: int, k: int) -> float:
    """Exponent rule: alpha below k is kept, alpha >= k becomes 1/alpha."""
    return float(alpha) if alpha < k else 1.0 / alpha


@dataclass(frozen=True)
class IrrationalFactorValue:
    log_value: float
    value: float


def irrational_factor(f: Factorization, k: int) -> IrrationalFactorValue:
    _check_k(k)
    whole = 1
    frac = 1.0
    log_value = 0.0
    for p, a in f.factors:
        if a < k:
            whole *= p**a
            log_value += a * math.log(p)
        else:
            frac *= p ** (1.0 / a)
            log_value += math.log(p) / a
    return IrrationalFactorValue(log_value, whole * frac)


def mu_k(f: Factorization, k: int) -> int:
    _check_k(k)
    return int(all(a < k for _, a in f.factors))


def is_k_full(f: Factorization, k: int) -> bool:
    return all(a >= k for _, a in f.factors)


def squarefree_part(f: Factorization) -> int:
    return math.prod(p for p, _ in f.factors)


@dataclass(frozen=True)
class SummatoryResult:
    Q: int
    q: int
    a: int
    k: int
    sum: float
    term_count: int


def class_sums(values: np.ndarray, q: int, a: int, checkpoints) -> np.ndarray:
    """Compensated sums of values[n] over n <= Q, n = a (mod q), for each Q.

    All callers go through here, so a race sample at Q and a standalone
    :func:`summatory` at Q agree bit for bit.
    """
    cps = np.asarray(checkpoints, dtype=np.int64)
    if cps.size and np.any(np.diff(cps) < 0):
        raise InvalidArgument("checkpoints must be ascending")
    top = int(cps.max()) if cps.size else 0
    if top >= values.shape[0]:
        raise OutOfRange(f"checkpoint {top} beyond value table")
    # blocks past the top checkpoint are never read
    nblocks = max(1, -(-top // BLOCK))
    totals = _block_sums(values, q, a % q, nblocks, BLOCK)
    return _checkpoint_sums(values, q, a % q, BLOCK, totals, cps)


def summatory(Q: int, q: int, a: int, k: int, table: FactorizationTable) -> SummatoryResult:
    _check_k(k)
    if q < 1:
        raise InvalidArgument(f"modulus must be >= 1, got {q}")
    if Q > table.limit:
        raise OutOfRange(f"Q={Q} exceeds sieve limit {table.limit}")
    a = a % q
    if Q < 1:
        return SummatoryResult(Q, q, a, k, 0.0, 0)
    values = table.ik_values(k)
    s = float(class_sums(values, q, a, [Q])[0])
    first = a if a >= 1 else q
    count = 0 if first > Q else (Q - first) // q + 1
    return SummatoryResult(Q, q, a, k, s, count)
