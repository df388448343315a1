"""Smallest-irreducible-factor sieve over all monic polynomials of degree <= D.

A monic polynomial of degree n with lower coefficients c_0..c_{n-1} has
index idx = sum c_i p^i and global id offset[n] + idx, offset[n] = sum_{m<n} p^m.
Id 0 is the constant polynomial 1.
"""
from __future__ import annotations

import numpy as np
from numba import njit


def offsets(p: int, D: int) -> np.ndarray:
    off = np.zeros(D + 2, dtype=np.int64)
    for n in range(1, D + 2):
        off[n] = off[n - 1] + p ** (n - 1)
    return off


@njit(cache=True)
def _decode(idx, n, p, out):
    for i in range(n):
        out[i] = idx % p
        idx //= p
    out[n] = 1


@njit(cache=True)
def _sieve(p, D, off):
    total = off[D + 1]
    spf = np.full(total, -1, dtype=np.int32)
    cof = np.zeros(total, dtype=np.int32)
    spf[0] = 0
    a_dig = np.zeros(D + 1, dtype=np.int64)
    b_dig = np.zeros(D + 1, dtype=np.int64)
    prod = np.zeros(D + 1, dtype=np.int64)
    for a in range(1, D + 1):
        for ia in range(p**a):
            pid = off[a] + ia
            if spf[pid] != -1:
                continue
            spf[pid] = pid
            cof[pid] = 0
            if 2 * a > D:
                continue
            _decode(ia, a, p, a_dig)
            # the cofactor of a polynomial whose smallest factor is P has degree >= deg P
            for b in range(a, D - a + 1):
                pb = off[b]
                for ib in range(p**b):
                    gid = pb + ib
                    _decode(ib, b, p, b_dig)
                    n = a + b
                    for i in range(n + 1):
                        prod[i] = 0
                    for i in range(a + 1):
                        ai = a_dig[i]
                        if ai == 0:
                            continue
                        for j in range(b + 1):
                            prod[i + j] += ai * b_dig[j]
                    idx = 0
                    for i in range(n - 1, -1, -1):
                        idx = idx * p + prod[i] % p
                    fid = off[n] + idx
                    if spf[fid] == -1:
                        spf[fid] = pid
                        cof[fid] = gid
    return spf, cof


@njit(cache=True)
def _multiplicity(spf, cof):
    # alpha = exponent of the smallest factor, rest = f / P^alpha
    total = spf.shape[0]
    alpha = np.zeros(total, dtype=np.int8)
    rest = np.zeros(total, dtype=np.int32)
    for f in range(1, total):
        g = cof[f]
        if g != 0 and spf[g] == spf[f]:
            alpha[f] = alpha[g] + 1
            rest[f] = rest[g]
        else:
            alpha[f] = 1
            rest[f] = g
    return alpha, rest


@njit(cache=True)
def _degrees(off, D):
    deg = np.zeros(off[D + 1], dtype=np.int8)
    for n in range(D + 1):
        for i in range(off[n], off[n + 1]):
            deg[i] = n
    return deg


@njit(cache=True)
def _factor_values(spf, alpha, rest, deg, p, k):
    """F_k for every id; F_k(f) = |P|^beta(alpha) F_k(rest)."""
    total = spf.shape[0]
    v = np.zeros(total, dtype=np.float64)
    v[0] = 1.0
    for f in range(1, total):
        a = alpha[f]
        norm = float(p) ** deg[spf[f]]
        if a < k:
            local = norm**a
        else:
            local = norm ** (1.0 / a)
        v[f] = v[rest[f]] * local
    return v


def residues_mod(p: int, D: int, mulx: np.ndarray, one_code: int) -> np.ndarray:
    """Residue code mod m of every monic id up to degree D.

    f = X*h + c0 with h monic of degree n-1 and id(f) = off[n] + c0 + p*idx(h),
    so residues of degree n follow from those of degree n-1 in one gather.
    """
    off = offsets(p, D)
    out = np.empty(off[D + 1], dtype=np.int32)
    out[0] = one_code
    if mulx.shape[0] == 1:
        out[:] = 0
        return out
    c0 = np.arange(p, dtype=np.int64)
    for n in range(1, D + 1):
        prev = out[off[n - 1] : off[n]].astype(np.int64)
        shifted = mulx[prev]
        low = shifted % p
        base = shifted - low
        block = base[:, None] + (low[:, None] + c0[None, :]) % p
        out[off[n] : off[n + 1]] = block.reshape(-1)
    return out


@njit(cache=True)
def _exponent_numerators(spf, alpha, rest, deg, k, L):
    """F_k(f) = p^(e(f)); returns e(f) * L as an integer (L = lcm(1..D))."""
    total = spf.shape[0]
    e = np.zeros(total, dtype=np.int64)
    for f in range(1, total):
        a = np.int64(alpha[f])
        d = np.int64(deg[spf[f]])
        if a < k:
            local = a * d * L
        else:
            local = d * (L // a)
        e[f] = e[rest[f]] + local
    return e
