"""Dense polynomials over a prime field F_p."""
from __future__ import annotations

from dataclasses import dataclass

import sympy

from ..errors import InvalidArgument


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    """coeffs low degree first, reduced mod p, no trailing zeros; () is zero."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(int(c) % self.p for c in self.coeffs))

    @classmethod
    def from_coeffs(cls, p: int, coeffs) -> "Poly":
        return cls(p, tuple(coeffs))

    @classmethod
    def parse(cls, text: str, p: int | None = None) -> "Poly":
        """'c0,c1,...,cd@p'; the '@p' suffix may be omitted when p is given."""
        body, _, tail = text.strip().partition("@")
        if tail:
            q = int(tail)
            if p is not None and q != p:
                raise InvalidArgument(f"polynomial {text!r} is over F_{q}, expected F_{p}")
            p = q
        if p is None:
            raise InvalidArgument(f"no characteristic in {text!r}")
        if not sympy.isprime(p):
            raise InvalidArgument(f"{p} is not prime")
        try:
            coeffs = [int(c) for c in body.split(",")] if body.strip() else []
        except ValueError as exc:
            raise InvalidArgument(f"bad polynomial {text!r}") from exc
        return cls(p, tuple(coeffs))

    def format(self) -> str:
        return ",".join(str(c) for c in self.coeffs) + f"@{self.p}"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(reversed(terms))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def norm(self) -> int:
        """|f| = p^deg f."""
        if self.is_zero:
            raise InvalidArgument("norm of the zero polynomial")
        return self.p**self.degree

    def _check(self, other: "Poly"):
        if other.p != self.p:
            raise InvalidArgument(f"mixing F_{self.p} and F_{other.p}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(self.p, tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))

    def __neg__(self) -> "Poly":
        return Poly(self.p, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly(self.p, tuple(other * c for c in self.coeffs))
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(self.p, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(self.p, tuple(out))

    __rmul__ = __mul__

    def __divmod__(self, other: "Poly"):
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        d = other.degree
        inv = pow(other.lead, -1, p)
        qc = [0] * max(0, len(r) - d)
        b = other.coeffs
        for top in range(len(r) - 1, d - 1, -1):
            c = r[top] * inv % p
            if c:
                qc[top - d] = c
                for j in range(d + 1):
                    r[top - d + j] = (r[top - d + j] - c * b[j]) % p
        return Poly(p, tuple(qc)), Poly(p, tuple(r[:d]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero:
            raise InvalidArgument("zero polynomial has no monic form")
        return self * pow(self.lead, -1, self.p)

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        result = Poly(self.p, (1,)) % mod
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc


def one(p: int) -> Poly:
    return Poly(p, (1,))


def X(p: int) -> Poly:
    return Poly(p, (0, 1))


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero when both are zero)."""
    while not b.is_zero:
        a, b = b, a % b
    return a if a.is_zero else a.monic()


def residue_code(f: Poly, m: Poly) -> int:
    """f mod m as the integer sum r_i p^i, i < deg m."""
    r = f % m if m.degree > 0 else Poly(f.p, ())
    code = 0
    for c in reversed(r.coeffs):
        code = code * f.p + c
    return code


def poly_from_code(p: int, code: int) -> Poly:
    coeffs = []
    while code:
        code, c = divmod(code, p)
        coeffs.append(c)
    return Poly(p, tuple(coeffs))


def monic_from_index(p: int, n: int, idx: int) -> Poly:
    """Monic polynomial of degree n whose lower coefficients are the base-p digits of idx."""
    return poly_from_code(p, idx + p**n)


def monic_index(f: Poly) -> int:
    """Inverse of monic_from_index (f monic)."""
    code = 0
    for c in reversed(f.coeffs[:-1]):
        code = code * f.p + c
    return code
