"""Parity-check matrices, Tanner graph index sets and the one-hot symbol maps.

Column/row indices are 0-based in memory.  The text format uses 1-based
column indices::

    Z4 3 5
    1:1 2:3 3:1
    2:1 4:1
    1:3 5:1
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import RingError, RingSpec, ring_from_token

__all__ = [
    "MatrixFormatError",
    "ParityCheckMatrix",
    "TannerGraph",
    "load_matrix",
    "read_matrix",
    "dump_matrix",
    "example_matrix",
    "from_dense",
    "build_tanner",
    "syndrome",
    "is_codeword",
    "xi",
    "big_xi",
    "inverse_xi",
]


class MatrixFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ParityCheckMatrix:
    ring: RingSpec
    m: int
    n: int
    rows: tuple[tuple[tuple[int, int], ...], ...]  # per row: (column, coefficient)

    def __post_init__(self):
        if len(self.rows) != self.m:
            raise MatrixFormatError(f"expected {self.m} rows, got {len(self.rows)}")
        for j, row in enumerate(self.rows):
            prev = -1
            for i, h in row:
                if not 0 <= i < self.n:
                    raise MatrixFormatError(f"row {j + 1}: column {i + 1} outside 1..{self.n}")
                if i <= prev:
                    raise MatrixFormatError(f"row {j + 1}: column indices must be strictly increasing")
                if not 0 <= h < self.ring.q:
                    raise MatrixFormatError(f"row {j + 1}: coefficient {h} not in {self.ring.token}")
                if h == 0:
                    raise MatrixFormatError(f"row {j + 1}: zero coefficient listed at column {i + 1}")
                prev = i

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.int64)
        for j, row in enumerate(self.rows):
            for i, h in row:
                H[j, i] = h
        return H


@dataclass(frozen=True)
class TannerGraph:
    H: ParityCheckMatrix
    I: tuple[tuple[int, ...], ...]  # columns of each row
    J: tuple[tuple[int, ...], ...]  # rows of each column
    edges: tuple[tuple[int, int], ...]  # (i, j), ordered by j then i
    degrees: tuple[int, ...]

    @property
    def ring(self) -> RingSpec:
        return self.H.ring

    @property
    def m(self) -> int:
        return self.H.m

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def d(self) -> int:
        return max(self.degrees, default=0)

    def coeffs(self, j: int) -> tuple[int, ...]:
        return tuple(h for _, h in self.H.rows[j])


def from_dense(ring: RingSpec, H: Sequence[Sequence[int]] | np.ndarray) -> ParityCheckMatrix:
    H = np.asarray(H, dtype=np.int64)
    if H.ndim != 2:
        raise MatrixFormatError("dense parity-check matrix must be 2-D")
    rows = tuple(
        tuple((int(i), int(H[j, i])) for i in np.flatnonzero(H[j])) for j in range(H.shape[0])
    )
    return ParityCheckMatrix(ring, H.shape[0], H.shape[1], rows)


def load_matrix(text: str) -> ParityCheckMatrix:
    """Parse the ``ring m n`` header plus ``col:coef`` rows."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    head = lines[0].split()
    if len(head) != 3:
        raise MatrixFormatError(f"header must be 'ring m n', got {lines[0]!r}")
    try:
        ring = ring_from_token(head[0])
    except RingError as exc:
        raise MatrixFormatError(str(exc)) from exc
    try:
        m, n = int(head[1]), int(head[2])
    except ValueError as exc:
        raise MatrixFormatError(f"bad dimensions in header {lines[0]!r}") from exc
    if m < 1 or n < 1:
        raise MatrixFormatError("matrix needs at least one row and one column")
    body = lines[1:]
    if len(body) != m:
        raise MatrixFormatError(f"header announces {m} rows, found {len(body)}")
    rows = []
    for j, ln in enumerate(body):
        entries = []
        for tok in ln.split():
            try:
                col, coef = tok.split(":")
                entries.append((int(col) - 1, int(coef)))
            except ValueError as exc:
                raise MatrixFormatError(f"row {j + 1}: bad entry {tok!r}") from exc
        if not entries:
            raise MatrixFormatError(f"row {j + 1} is empty")
        cols = [i for i, _ in entries]
        if len(set(cols)) != len(cols):
            raise MatrixFormatError(f"row {j + 1}: duplicate column index")
        rows.append(tuple(sorted(entries)))
    return ParityCheckMatrix(ring, m, n, tuple(rows))


def read_matrix(path) -> ParityCheckMatrix:
    with open(path, encoding="utf-8") as fh:
        return load_matrix(fh.read())


def dump_matrix(H: ParityCheckMatrix) -> str:
    out = [f"{H.ring.token} {H.m} {H.n}"]
    for row in H.rows:
        out.append(" ".join(f"{i + 1}:{h}" for i, h in row))
    return "\n".join(out) + "\n"


Z4_5_2 = """\
# length-5 code over Z4 with 16 codewords
Z4 3 5
1:1 2:3 3:1
2:1 4:1
1:3 5:1
"""


def example_matrix() -> ParityCheckMatrix:
    """The small (5, 2) code over Z4 used by the tests and demos."""
    return load_matrix(Z4_5_2)


def build_tanner(H: ParityCheckMatrix) -> TannerGraph:
    I = tuple(tuple(i for i, _ in row) for row in H.rows)
    J: list[list[int]] = [[] for _ in range(H.n)]
    for j, cols in enumerate(I):
        for i in cols:
            J[i].append(j)
    edges = tuple((i, j) for j, cols in enumerate(I) for i in cols)
    return TannerGraph(H, I, tuple(map(tuple, J)), edges, tuple(len(c) for c in I))


def syndrome(H: ParityCheckMatrix, c: Sequence[int]) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    if c.shape != (H.n,):
        raise ValueError(f"word length {c.shape} does not match n={H.n}")
    if c.min(initial=0) < 0 or c.max(initial=0) >= H.ring.q:
        raise ValueError("word contains symbols outside the ring")
    add_t, mul_t = H.ring.add_table, H.ring.mul_table
    s = np.zeros(H.m, dtype=np.int64)
    for j, row in enumerate(H.rows):
        acc = 0
        for i, h in row:
            acc = add_t[acc, mul_t[c[i], h]]
        s[j] = acc
    return s


def is_codeword(H: ParityCheckMatrix, c: Sequence[int]) -> bool:
    return not syndrome(H, c).any()


def xi(ring: RingSpec, r: int) -> np.ndarray:
    """One-hot image of ``r`` in R^(q-1); zero maps to the zero vector."""
    x = np.zeros(ring.q - 1)
    r = ring.check(r)
    if r:
        x[ring.index(r)] = 1.0
    return x


def big_xi(ring: RingSpec, c: Iterable[int]) -> np.ndarray:
    c = [ring.check(r) for r in c]
    x = np.zeros((len(c), ring.q - 1))
    for k, r in enumerate(c):
        if r:
            x[k, r - 1] = 1.0
    return x.ravel()


def inverse_xi(ring: RingSpec, f: np.ndarray) -> np.ndarray:
    """Invert ``big_xi`` for 0/1 blocks with at most one 1 each."""
    f = np.asarray(f).reshape(-1, ring.q - 1)
    if not np.isin(f, (0, 1)).all() or (f.sum(axis=1) > 1).any():
        raise ValueError("blocks must be 0/1 with at most one nonzero entry")
    return np.where(f.any(axis=1), f.argmax(axis=1) + 1, 0)
