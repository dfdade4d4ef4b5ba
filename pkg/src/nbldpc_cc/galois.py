"""Table-driven arithmetic over GF(2^p), 1 <= p <= 16.

Elements are plain integers whose bits are the coefficients of a polynomial
over GF(2).  Multiplication goes through log/antilog tables built once per
field; the tables are also exposed as numpy arrays so the decoder can permute
whole message vectors at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

# Default primitive polynomials (bitmask including the x^p term).
DEFAULT_PRIMITIVE_POLYS = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


class NonPrimitivePolynomial(ValueError):
    pass


class FieldTables:
    """Log/antilog tables of GF(2^p) generated by ``x`` (the integer 2).

    ``antilog[k] = x^k`` for ``k`` in ``[0, 2^p - 1)`` and ``log[a]`` is its
    inverse for nonzero ``a`` (``log[0]`` is unused and set to -1).
    """

    def __init__(self, p: int, primitive_poly: int | None = None):
        if not 1 <= p <= 16:
            raise ValueError(f"extension degree must be in [1, 16], got {p}")
        if primitive_poly is None:
            primitive_poly = DEFAULT_PRIMITIVE_POLYS[p]
        if primitive_poly >> p != 1:
            raise NonPrimitivePolynomial(
                f"polynomial {primitive_poly:#x} does not have degree {p}"
            )
        self.p = p
        self.q = 1 << p
        self.primitive_poly = primitive_poly
        order = self.q - 1

        antilog = np.zeros(order, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        a = 1
        for k in range(order):
            if log[a] != -1:
                raise NonPrimitivePolynomial(
                    f"x has order {k} < {order} modulo {primitive_poly:#x}"
                )
            antilog[k] = a
            log[a] = k
            a <<= 1
            if a & self.q:
                a ^= primitive_poly
        if a != 1:
            raise NonPrimitivePolynomial(f"{primitive_poly:#x} is not primitive")
        antilog.flags.writeable = False
        log.flags.writeable = False
        self.antilog = antilog
        self.log = log

    def __repr__(self):
        return f"FieldTables(p={self.p}, primitive_poly={self.primitive_poly:#x})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldTables)
            and self.p == other.p
            and self.primitive_poly == other.primitive_poly
        )

    def __hash__(self):
        return hash((self.p, self.primitive_poly))

    def _check(self, a):
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of GF(2^{self.p})")

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog[(self.log[a] + self.log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return int(self.antilog[(-self.log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            return 0 if n > 0 else 1
        return int(self.antilog[(self.log[a] * n) % (self.q - 1)])

    @property
    def mul_table(self) -> np.ndarray:
        """``q x q`` table with ``mul_table[a, b] = a*b``; cached, read-only."""
        return _mul_table(self.p, self.primitive_poly)

    @property
    def inv_table(self) -> np.ndarray:
        """``inv_table[a]``; entry 0 is 0 by convention."""
        return _inv_table(self.p, self.primitive_poly)


@lru_cache(maxsize=None)
def _mul_table(p, poly):
    gf = get_field(p, poly)
    q = gf.q
    nz = np.arange(1, q)
    logs = gf.log[nz]
    table = np.zeros((q, q), dtype=np.int64)
    table[1:, 1:] = gf.antilog[(logs[:, None] + logs[None, :]) % (q - 1)]
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def _inv_table(p, poly):
    gf = get_field(p, poly)
    q = gf.q
    table = np.zeros(q, dtype=np.int64)
    table[1:] = gf.antilog[(-gf.log[1:]) % (q - 1)]
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def get_field(p: int, primitive_poly: int | None = None) -> FieldTables:
    """Shared, immutable tables for GF(2^p)."""
    return FieldTables(p, primitive_poly)


def build_tables(p: int, primitive_poly: int | None = None) -> FieldTables:
    return get_field(p, primitive_poly)


@dataclass(frozen=True)
class FieldElement:
    """An element of a specific field; supports ``+``, ``*``, ``/`` and ``~`` (inverse)."""

    value: int
    field: FieldTables = field(repr=False, compare=True)

    def __post_init__(self):
        self.field._check(self.value)

    def __add__(self, other: FieldElement) -> FieldElement:
        return FieldElement(self.value ^ other.value, self.field)

    __sub__ = __add__

    def __mul__(self, other: FieldElement) -> FieldElement:
        return FieldElement(self.field.mul(self.value, other.value), self.field)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return FieldElement(self.field.div(self.value, other.value), self.field)

    def __invert__(self) -> FieldElement:
        return FieldElement(self.field.inv(self.value), self.field)

    def __int__(self):
        return self.value
