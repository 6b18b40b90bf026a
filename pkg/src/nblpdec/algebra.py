"""Finite ring arithmetic for Z_q and GF(2^m).

Elements are plain integers ``0 .. q-1``.  For GF(2^m) the integer is the
polynomial-basis bit pattern, so ``2`` is the primitive element ``zeta``.
All arithmetic is served from precomputed ``q x q`` tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

__all__ = [
    "RingSpec",
    "RingError",
    "build_ring",
    "ring_from_token",
    "add",
    "mul",
    "neg",
    "sub",
    "is_invertible",
]

# Defining polynomials, bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    1: 0b11,  # x + 1
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
}


class RingError(ValueError):
    """Unsupported ring kind/size or malformed ring token."""


@dataclass(frozen=True, eq=False)
class RingSpec:
    kind: str  # "Zq" or "GF2m"
    q: int
    m: int | None
    primitive_poly: int | None
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    invertible: np.ndarray = field(repr=False)

    @property
    def element_order(self) -> tuple[int, ...]:
        """Canonical order of the nonzero elements (ascending integer label)."""
        return tuple(range(1, self.q))

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def token(self) -> str:
        return f"Z{self.q}" if self.kind == "Zq" else f"GF{self.q}"

    def index(self, r: int) -> int:
        """Position of nonzero ``r`` inside a ``(q-1)``-block."""
        if not 0 < r < self.q:
            raise IndexError(f"{r} is not a nonzero element of {self.token}")
        return r - 1

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.q:
            raise IndexError(f"element {a} out of range for {self.token}")
        return a

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingSpec):
            return NotImplemented
        return (self.kind, self.q) == (other.kind, other.q)

    def __hash__(self) -> int:
        return hash((self.kind, self.q))

    def __reduce__(self):
        return (build_ring, (self.kind, self.q if self.kind == "Zq" else self.m))


def _gf_mul(a: int, b: int, m: int, poly: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return out


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_ring(kind: str, size: int) -> RingSpec:
    """Build ``Z_q`` (``kind="Zq"``, ``size=q``) or ``GF(2^m)`` (``kind="GF"``, ``size=m``)."""
    kind_norm = kind.strip().upper()
    if kind_norm in ("ZQ", "Z"):
        q = int(size)
        if q < 2:
            raise RingError(f"Z_q needs q >= 2, got {size}")
        el = np.arange(q)
        add_t = (el[:, None] + el[None, :]) % q
        mul_t = (el[:, None] * el[None, :]) % q
        neg_t = (-el) % q
        inv = np.array([gcd(int(a), q) == 1 for a in el])
        return RingSpec(
            "Zq", q, None, None,
            _freeze(add_t.astype(np.int64)),
            _freeze(mul_t.astype(np.int64)),
            _freeze(neg_t.astype(np.int64)),
            _freeze(inv),
        )
    if kind_norm in ("GF", "GF2M"):
        m = int(size)
        if m not in PRIMITIVE_POLYS:
            raise RingError(f"GF(2^m) supported for m in {sorted(PRIMITIVE_POLYS)}, got {size}")
        poly = PRIMITIVE_POLYS[m]
        q = 1 << m
        el = np.arange(q)
        add_t = el[:, None] ^ el[None, :]
        mul_t = np.array([[_gf_mul(a, b, m, poly) for b in range(q)] for a in range(q)])
        inv = el != 0
        return RingSpec(
            "GF2m", q, m, poly,
            _freeze(add_t.astype(np.int64)),
            _freeze(mul_t.astype(np.int64)),
            _freeze(el.astype(np.int64)),
            _freeze(inv),
        )
    raise RingError(f"unknown ring kind {kind!r}")


def ring_from_token(token: str) -> RingSpec:
    """Parse names like ``Z4``, ``GF4``, ``GF8``."""
    t = token.strip().upper()
    try:
        if t.startswith("GF"):
            q = int(t[2:])
            m = q.bit_length() - 1
            if q < 2 or (1 << m) != q:
                raise RingError(f"GF size must be a power of two: {token!r}")
            return build_ring("GF", m)
        if t.startswith("Z"):
            return build_ring("Zq", int(t[1:]))
    except ValueError as exc:
        if isinstance(exc, RingError):
            raise
        raise RingError(f"bad ring token {token!r}") from exc
    raise RingError(f"bad ring token {token!r}")


def add(ring: RingSpec, a: int, b: int) -> int:
    return int(ring.add_table[ring.check(a), ring.check(b)])


def mul(ring: RingSpec, a: int, b: int) -> int:
    return int(ring.mul_table[ring.check(a), ring.check(b)])


def neg(ring: RingSpec, a: int) -> int:
    return int(ring.neg_table[ring.check(a)])


def sub(ring: RingSpec, a: int, b: int) -> int:
    return add(ring, a, neg(ring, b))


def is_invertible(ring: RingSpec, a: int) -> bool:
    return bool(ring.invertible[ring.check(a)])
