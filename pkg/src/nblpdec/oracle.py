"""Exhaustive reference computations for desk-scale verification.

Everything here works on explicit codeword lists with its own ring
arithmetic, sharing nothing with the trellis code it is used to check.
"""

from __future__ import annotations

import functools
import math
from typing import Sequence

import numpy as np

from .algebra import RingSpec
from .code import ParityCheckMatrix

__all__ = [
    "OracleSizeError",
    "enumerate_spc",
    "enumerate_code",
    "brute_marginals",
    "brute_row_min",
    "brute_vn_min",
    "exhaustive_ml",
    "soft_min",
]

SPC_MAX_DEGREE = 8
ENUM_LIMIT = 10**7


class OracleSizeError(ValueError):
    """Requested enumeration exceeds the desk-scale guard."""


def soft_min(values: Sequence[float], kappa: float) -> float:
    """``-(1/kappa) log sum exp(-kappa z)``; plain ``min`` for infinite kappa."""
    values = list(values)
    if math.isinf(kappa):
        return min(values)
    zmin = min(values)
    return zmin - math.log(math.fsum(math.exp(-kappa * (z - zmin)) for z in values)) / kappa


def _gf_mul(ring: RingSpec, a, b):
    """Carry-less product reduced by the field polynomial (works on arrays)."""
    a = np.array(a, dtype=np.int64, copy=True)
    b = np.array(b, dtype=np.int64, copy=True)
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    for _ in range(ring.m):
        out ^= np.where(b & 1, a, 0)
        b >>= 1
        a <<= 1
        a = np.where(a >> ring.m, a ^ ring.primitive_poly, a)
    return out


def _syndromes(ring: RingSpec, coeffs, words: np.ndarray) -> np.ndarray:
    """Row checksum of every word in ``words`` (shape ``(N, d)``)."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    if ring.kind == "Zq":
        return (words * coeffs).sum(axis=1) % ring.q
    prods = _gf_mul(ring, words, coeffs[None, :])
    return np.bitwise_xor.reduce(prods, axis=1) if prods.shape[1] else np.zeros(len(words), np.int64)


@functools.lru_cache(maxsize=32)
def _all_words(q: int, d: int) -> np.ndarray:
    # lexicographic order, first position most significant
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.unravel_index(np.arange(q**d, dtype=np.int64), (q,) * d)
    out = np.stack(idx, axis=1).astype(np.int64)
    out.setflags(write=False)
    return out


def enumerate_spc(ring: RingSpec, coeffs: Sequence[int]) -> list[tuple[int, ...]]:
    return [tuple(w) for w in _spc_array(ring, coeffs).tolist()]


def _spc_array(ring: RingSpec, coeffs) -> np.ndarray:
    return _spc_cached(ring, tuple(int(h) for h in coeffs))


@functools.lru_cache(maxsize=256)
def _spc_cached(ring: RingSpec, coeffs: tuple[int, ...]) -> np.ndarray:
    d = len(coeffs)
    if d > SPC_MAX_DEGREE or ring.q ** max(d - 1, 0) > ENUM_LIMIT:
        raise OracleSizeError(f"row of degree {d} over {ring.token} too large to enumerate")
    words = _all_words(ring.q, d)
    out = words[_syndromes(ring, coeffs, words) == 0]
    out.setflags(write=False)
    return out


def enumerate_code(H: ParityCheckMatrix) -> list[tuple[int, ...]]:
    """All codewords in lexicographic order (tiny codes only)."""
    if H.n > 8 or H.ring.q**H.n > ENUM_LIMIT:
        raise OracleSizeError(f"code of length {H.n} over {H.ring.token} too large to enumerate")
    words = _all_words(H.ring.q, H.n)
    ok = np.ones(len(words), dtype=bool)
    for row in H.rows:
        cols = [i for i, _ in row]
        ok &= _syndromes(H.ring, [h for _, h in row], words[:, cols]) == 0
    return [tuple(w) for w in words[ok].tolist()]


def _weights(v: np.ndarray, words: np.ndarray) -> np.ndarray:
    """Per-position ``<v_t, xi(b_t)>`` for every word, shape ``(N, d)``."""
    pad = np.concatenate([np.zeros((v.shape[0], 1)), v], axis=1)
    return pad[np.arange(v.shape[0])[None, :], words]


def _soft_max_arr(z: np.ndarray, kappa: float) -> float:
    if z.size == 0:
        return -math.inf
    if math.isinf(kappa):
        return float(z.max())
    zmax = z.max()
    return float(zmax + math.log(math.fsum(np.exp(kappa * (z - zmax)).tolist())) / kappa)


def brute_marginals(ring: RingSpec, coeffs: Sequence[int], v, kappa: float):
    """C-terms by direct enumeration, shapes ``(d, q-1)`` each.

    ``C_r[t, r-1] = -softmin_{b: b_t = r} <-v~, Xi(b~)>`` (position ``t`` dropped) and
    ``C_rbar[t, r-1] = -softmin_{b: b_t != r} <-v, Xi(b)>``.  Words are grouped
    by their label at ``t``; each group is summed once with ``math.fsum`` and
    the label-excluded terms combine the group totals.
    """
    words = _spc_array(ring, coeffs)
    v = np.asarray(v, dtype=float)
    d, q = len(coeffs), ring.q
    w = _weights(v, words)
    total = w.sum(axis=1)
    c_r = np.empty((d, q - 1))
    c_rbar = np.empty((d, q - 1))
    for t in range(d):
        rest = total - w[:, t]
        groups = [words[:, t] == b for b in range(q)]
        full = np.array([_soft_max_arr(total[g], kappa) for g in groups])
        for r in range(1, q):
            c_r[t, r - 1] = _soft_max_arr(rest[groups[r]], kappa)
            others = np.delete(full, r)
            c_rbar[t, r - 1] = _soft_max_arr(others[np.isfinite(others)], kappa)
    return c_r, c_rbar


def brute_row_min(ring: RingSpec, coeffs: Sequence[int], v, kappa: float = math.inf):
    """(Soft-)minimum of ``<-v, Xi(b)>`` over the row code plus one minimizer."""
    words = _spc_array(ring, coeffs)
    costs = -_weights(np.asarray(v, dtype=float), words).sum(axis=1)
    best = int(np.argmin(costs))  # words are lexicographic, argmin keeps the first
    return soft_min(costs.tolist(), kappa), tuple(words[best].tolist())


def brute_vn_min(u_blocks, kappa: float = math.inf):
    """(Soft-)minimum of ``<-u, Xi(a)>`` over constant words ``a``.

    ``u_blocks`` lists every block of the column including the channel one.
    """
    u = np.asarray(u_blocks, dtype=float)
    q = u.shape[1] + 1
    costs = [0.0] + [-math.fsum(u[:, r - 1].tolist()) for r in range(1, q)]
    return soft_min(costs, kappa), int(min(range(q), key=lambda r: (costs[r], r)))


def exhaustive_ml(H: ParityCheckMatrix, llr, codewords=None) -> np.ndarray:
    """Codeword minimizing ``sum_i <lambda_i, xi(c_i)>``; lexicographic tie-break.

    ``codewords`` may hold a precomputed ``enumerate_code(H)`` result (in
    lexicographic order) to avoid repeating the enumeration.
    """
    llr = np.asarray(llr, dtype=float)
    if llr.shape != (H.n, H.ring.q - 1):
        raise ValueError(f"LLR shape {llr.shape} does not match ({H.n}, {H.ring.q - 1})")
    words = np.asarray(enumerate_code(H) if codewords is None else codewords, dtype=np.int64)
    costs = _weights(llr, words)
    # compensated row sums so exact ties resolve by word order alone
    total = [math.fsum(row) for row in costs.tolist()]
    return words[int(np.argmin(total))].copy()
