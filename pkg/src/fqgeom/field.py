"""Prime field arithmetic and the two characters used throughout.

``PrimeField(p)`` validates the modulus once; ``FieldElement`` values are
always canonical residues in ``[0, p)``.  The additive character is fixed
to ``x -> exp(2*pi*i*x/p)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_MODULUS = 2**31


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for sp in small:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_modulus(p: int) -> int:
    p = int(p)
    if not 3 <= p < MAX_MODULUS:
        raise ValueError(f"modulus {p} outside [3, 2^31)")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


def odd_primes(upto: int) -> list[int]:
    return [n for n in range(3, upto + 1) if is_prime(n)]


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        check_modulus(self.p)

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value, self)

    def __iter__(self):
        return (FieldElement(v, self) for v in range(self.p))

    def __len__(self):
        return self.p

    def nonzero(self):
        return (FieldElement(v, self) for v in range(1, self.p))


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    """Cached field constructor; primality is tested once per modulus."""
    return PrimeField(p)


class FieldElement:
    """Element of F_p; immutable, canonical residue in ``value``."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", int(value) % field.p)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def p(self) -> int:
        return self.field.p

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.p != self.field.p:
                raise ValueError(
                    f"mismatched moduli {self.field.p} and {other.field.p}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value + v, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value - v, self.field)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(v - self.value, self.field)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value * v, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self * inv(FieldElement(v, self.field))

    def __pow__(self, e: int):
        if e < 0:
            return inv(self) ** (-e)
        return FieldElement(pow(self.value, e, self.field.p), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElement({self.value}, p={self.field.p})"


def _same(a: FieldElement, b: FieldElement) -> None:
    if a.field.p != b.field.p:
        raise ValueError(f"mismatched moduli {a.field.p} and {b.field.p}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _same(a, b)
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    _same(a, b)
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _same(a, b)
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    if a.value == 0:
        raise ZeroDivisionError("no inverse of zero")
    return FieldElement(pow(a.value, a.field.p - 2, a.field.p), a.field)


def legendre_int(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def legendre(a: FieldElement) -> int:
    """Quadratic character by Euler's criterion: 0, +1 or -1."""
    return legendre_int(a.value, a.field.p)


def chi_int(a: int, p: int) -> complex:
    return cmath.exp(2j * math.pi * (a % p) / p)


def chi(a: FieldElement) -> complex:
    """The additive character exp(2*pi*i*a/p)."""
    return chi_int(a.value, a.field.p)


@lru_cache(maxsize=64)
def chi_table(p: int) -> np.ndarray:
    """All character values, indexed by residue."""
    table = np.exp(2j * np.pi * np.arange(p) / p)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    table = np.full(p, -1, dtype=np.int64)
    table[0] = 0
    table[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    table.setflags(write=False)
    return table


@lru_cache(maxsize=64)
def inverse_table(p: int) -> np.ndarray:
    """``table[a] = a^{-1} mod p``; entry 0 is a placeholder 0."""
    table = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        table[a] = pow(a, p - 2, p)
    table.setflags(write=False)
    return table
