"""Races S_k(Q; q, a1) - S_k(Q; q, a2), sampled on a stride, and their sign changes."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .arith import FactorizationTable, class_sums, summatory
from .errors import InvalidArgument, OutOfRange, Unsupported
from .euler import ConstantsReport


@dataclass(frozen=True)
class RaceConfig:
    q: int
    a1: int
    a2: int
    k: int
    Q_max: int
    sample_stride: int | None = None
    normalization_exponent: float | None = None

    def __post_init__(self):
        if self.q < 1:
            raise InvalidArgument(f"modulus must be >= 1, got {self.q}")
        if self.k < 2:
            raise InvalidArgument(f"order k must be >= 2, got {self.k}")
        if (self.a1 - self.a2) % self.q == 0:
            raise InvalidArgument(f"a1 = a2 (mod {self.q})")
        if self.Q_max < 0:
            raise InvalidArgument("Q_max must be >= 0")
        if self.sample_stride is None:
            object.__setattr__(self, "sample_stride", max(1, -(-self.Q_max // 1000)))
        elif self.sample_stride < 1:
            raise InvalidArgument("sample stride must be >= 1")
        if self.normalization_exponent is None:
            object.__setattr__(self, "normalization_exponent", 1 + 1 / (2 * self.k))

    def sample_points(self) -> np.ndarray:
        return np.arange(self.sample_stride, self.Q_max + 1, self.sample_stride, dtype=np.int64)


@dataclass(frozen=True)
class RacePoint:
    Q: int
    s1: float
    s2: float
    diff: float
    normalized: float


@dataclass(frozen=True)
class SignChangeReport:
    changes: tuple[int, ...]
    count: int
    max_normalized: float
    min_normalized: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def run_race(cfg: RaceConfig, table: FactorizationTable) -> list[RacePoint]:
    if cfg.Q_max > table.limit:
        raise OutOfRange(f"Q_max={cfg.Q_max} exceeds sieve limit {table.limit}")
    Qs = cfg.sample_points()
    if Qs.size == 0:
        return []
    values = table.ik_values(cfg.k)
    s1 = class_sums(values, cfg.q, cfg.a1 % cfg.q, Qs)
    s2 = class_sums(values, cfg.q, cfg.a2 % cfg.q, Qs)
    diff = s1 - s2
    norm = diff / Qs.astype(np.float64) ** cfg.normalization_exponent
    return [
        RacePoint(int(Q), float(x), float(y), float(d), float(z))
        for Q, x, y, d, z in zip(Qs, s1, s2, diff, norm)
    ]


def error_term(Q: int, q: int, a: int, k: int, c: ConstantsReport, table: FactorizationTable) -> float:
    """S_k(Q; q, a) - c(q, a) Q^2."""
    if c.q != q or c.k != k:
        raise InvalidArgument("constants report is for a different (q, k)")
    if Q <= 0:
        return 0.0
    if math.gcd(a, q) == 1:
        const = c.c_unit
    elif a % q == 0 and c.c_zero is not None:
        const = c.c_zero
    else:
        raise Unsupported(f"no main-term constant for class {a} mod {q}")
    return summatory(Q, q, a, k, table).sum - const * float(Q) ** 2


def detect_sign_changes(points) -> SignChangeReport:
    """Zeros carry the previous sign; a change is recorded at the first point
    strictly opposite to the last nonzero sign."""
    changes = []
    last = 0
    hi, lo = -math.inf, math.inf
    prev_Q = None
    for pt in points:
        if prev_Q is not None and pt.Q <= prev_Q:
            raise InvalidArgument("points must be strictly increasing in Q")
        prev_Q = pt.Q
        hi = max(hi, pt.normalized)
        lo = min(lo, pt.normalized)
        sgn = (pt.diff > 0) - (pt.diff < 0)
        if sgn == 0:
            continue
        if last and sgn != last:
            changes.append(pt.Q)
        last = sgn
    if prev_Q is None:
        hi = lo = 0.0
    return SignChangeReport(tuple(changes), len(changes), float(hi), float(lo))


def oscillation_stats(report: SignChangeReport, T: float) -> float:
    if T <= 1:
        raise InvalidArgument(f"T must exceed 1, got {T}")
    return report.count / math.log(T)


def race_csv(cfg: RaceConfig, points) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(asdict(cfg), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Q", "s1", "s2", "diff", "normalized"])
    for p in points:
        w.writerow([p.Q, f"{p.s1:.15g}", f"{p.s2:.15g}", f"{p.diff:.15g}", f"{p.normalized:.15g}"])
    return buf.getvalue()
