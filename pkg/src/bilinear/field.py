"""Arithmetic in GF(p^s) with table lookups.

Elements are integer codes in [0, q).  The code of an element is the base-p
packing of its polynomial coefficients, constant term first, so code
``c0 + c1*p + ...`` stands for ``c0 + c1*t + ...`` modulo the field's
defining polynomial.  All arithmetic goes through q x q tables built once
per field, which is cheap for q <= 16 and lets numpy index whole arrays of
codes at a time.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError

Q_CAP = 16

# Conway polynomials, little-endian coefficient lists (monic, degree s).
CONWAY: dict[int, tuple[int, ...]] = {
    2: (1, 1),
    3: (1, 1),
    4: (1, 1, 1),
    5: (3, 1),
    7: (4, 1),
    8: (1, 1, 0, 1),
    9: (2, 2, 1),
    16: (1, 1, 0, 0, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n**0.5) + 1))


def _factor_prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            if not _is_prime(p):
                break
            s, r = 0, q
            while r % p == 0:
                r //= p
                s += 1
            if r == 1:
                return p, s
            break
    raise DomainError(f"q={q} is not a prime power")


def _poly_mod(a: list[int], b: tuple[int, ...], p: int) -> list[int]:
    """Remainder of a by monic-or-not b over F_p (little-endian lists)."""
    a = [c % p for c in a]
    db = len(b) - 1
    while db >= 0 and b[db] % p == 0:
        db -= 1
    inv_lead = pow(b[db], p - 2, p)
    while True:
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            return a
        shift = len(a) - 1 - db
        c = a[-1] * inv_lead % p
        for k in range(db + 1):
            a[shift + k] = (a[shift + k] - c * b[k]) % p


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..s-1."""
    s = len(modulus) - 1
    if s < 1 or modulus[-1] % p == 0:
        return False
    for deg in range(1, s):
        for low in itertools.product(range(p), repeat=deg):
            divisor = tuple(low) + (1,)
            if not _poly_mod(list(modulus), divisor, p):
                return False
    return True


@dataclass(frozen=True)
class FieldParams:
    """Order and defining polynomial of GF(q)."""

    q: int
    modulus: tuple[int, ...]
    p: int = field(init=False)
    s: int = field(init=False)

    def __post_init__(self) -> None:
        if not 2 <= self.q <= Q_CAP:
            raise DomainError(f"q={self.q} outside supported range [2, {Q_CAP}]")
        p, s = _factor_prime_power(self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)
        mod = tuple(int(c) % p for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != s + 1:
            raise DomainError(f"modulus must have degree {s} for q={self.q}")
        if mod[-1] != 1:
            raise DomainError("modulus must be monic")
        if not is_irreducible(mod, p):
            raise DomainError(f"modulus {mod} is reducible over F_{p}")

    @classmethod
    def default(cls, q: int) -> "FieldParams":
        if q not in CONWAY:
            raise DomainError(f"no shipped modulus for q={q}")
        return cls(q, CONWAY[q])

    @classmethod
    def parse(cls, text: str) -> "FieldParams":
        """Parse ``q=<int>,modulus=<c0,c1,...>`` (coefficients constant-first)."""
        text = text.strip()
        head, _, rest = text.partition(",")
        key, _, qval = head.partition("=")
        if key.strip() != "q":
            raise DomainError(f"expected 'q=' in {text!r}")
        q = int(qval)
        if not rest:
            return cls.default(q)
        mkey, _, coeffs = rest.partition("=")
        if mkey.strip() != "modulus":
            raise DomainError(f"expected 'modulus=' in {text!r}")
        return cls(q, tuple(int(c) for c in coeffs.split(",")))

    def format(self) -> str:
        return f"q={self.q},modulus={','.join(map(str, self.modulus))}"


class GF:
    """The finite field GF(q) as lookup tables over integer codes."""

    def __init__(self, params: FieldParams) -> None:
        self.params = params
        self.q = q = params.q
        self.p = p = params.p
        self.s = s = params.s
        codes = np.arange(q)
        digits = np.array([[(c // p**k) % p for k in range(s)] for c in codes], dtype=np.int64)
        self.digits = digits
        weights = p ** np.arange(s)

        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        self.sub = self.add[:, self.neg]

        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                prod = [0] * (2 * s - 1)
                for i in range(s):
                    for j in range(s):
                        prod[i + j] += digits[a, i] * digits[b, j]
                rem = _poly_mod(prod, params.modulus, p) if s > 1 else [prod[0] % p]
                rem = rem + [0] * (s - len(rem))
                mul[a, b] = sum(int(c) * p**k for k, c in enumerate(rem))
        self.mul = mul

        inv = np.full(q, -1, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv_table = inv

        trace = np.zeros(q, dtype=np.int64)
        for a in range(q):
            acc, power = 0, a
            for _ in range(s):
                acc = self.add[acc, power]
                power = self._pow(power, p)
            if acc >= p:
                raise AssertionError("trace left the prime subfield")
            trace[a] = acc
        self.trace_table = trace

        omega = cmath.exp(2j * cmath.pi / p)
        roots = np.array([omega**k for k in range(p)])
        self.roots = roots
        self.kernel = roots[trace[mul]]

    def _pow(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = int(self.mul[r, a])
        return r

    def __repr__(self) -> str:
        return f"GF({self.params.format()})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GF) and other.params == self.params

    def __hash__(self) -> int:
        return hash(self.params)

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise DomainError("inverse of zero")
        return int(self.inv_table[a])

    def trace(self, a: int) -> int:
        return int(self.trace_table[a])

    def character_kernel(self, a: int, x: int) -> complex:
        """omega^{trace(a*x)} with omega = exp(2 pi i / p)."""
        return complex(self.kernel[a, x])

    def element(self, code: int) -> "FieldElement":
        return FieldElement(self, code)

    def from_coeffs(self, coeffs) -> "FieldElement":
        code = sum((int(c) % self.p) * self.p**k for k, c in enumerate(coeffs))
        return FieldElement(self, code)


@lru_cache(maxsize=None)
def get_field(q: int, modulus: tuple[int, ...] | None = None) -> GF:
    params = FieldParams.default(q) if modulus is None else FieldParams(q, tuple(modulus))
    return GF(params)


@dataclass(frozen=True)
class FieldElement:
    """A single field element; convenient for scalar work and examples."""

    field: GF
    code: int

    def __post_init__(self) -> None:
        if not 0 <= self.code < self.field.q:
            raise DomainError(f"code {self.code} not in GF({self.field.q})")

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.digits[self.code])

    def _wrap(self, code) -> "FieldElement":
        return FieldElement(self.field, int(code))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return self._wrap(self.field.add[self.code, other.code])

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self._wrap(self.field.sub[self.code, other.code])

    def __neg__(self) -> "FieldElement":
        return self._wrap(self.field.neg[self.code])

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return self._wrap(self.field.mul[self.code, other.code])

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.code))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def trace(self) -> int:
        return self.field.trace(self.code)


def gf_add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def gf_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def gf_inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def trace(x: FieldElement) -> int:
    return x.trace()


def character_kernel(a: FieldElement, x: FieldElement) -> complex:
    return a.field.character_kernel(a.code, x.code)
