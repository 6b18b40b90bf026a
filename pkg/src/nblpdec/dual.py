"""Dual variables shared by both decoders, and the symbol decision rule.

Only the variable-side blocks ``u[i, j]`` are stored.  The check-side blocks
are their negatives (``v[j, i] = -u[i, j]``), and the channel block of column
``i`` is fixed at ``-lambda_i``.  Each column also keeps the running sum
``S_i(r) = -lambda_i^(r) + sum_j u[i, j]^(r)``, so that ``-S_i(r)`` is the cost
of the constant word ``r`` in the column's repetition code.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .code import TannerGraph, build_tanner, is_codeword, ParityCheckMatrix
from .trellis import (
    OpCounter,
    Semiring,
    SpcTrellis,
    backward,
    branch_metrics,
    build_trellis,
    extrinsic,
    forward,
    row_value,
)

__all__ = [
    "ERASED",
    "Status",
    "DecoderGraph",
    "DualState",
    "DecodeResult",
    "prepare",
    "decision_rule",
    "vn_value",
    "dual_objective",
]

ERASED = -1


class Status(str, enum.Enum):
    CODEWORD = "CODEWORD"
    MAX_ITERS = "MAX_ITERS"
    EARLY_STOP = "EARLY_STOP"


@dataclass(frozen=True, eq=False)
class DecoderGraph:
    """Tanner graph plus the flat edge indexing the decoders work with."""

    tanner: TannerGraph
    trellises: tuple[SpcTrellis, ...]
    row_start: np.ndarray  # edges of row j are row_start[j]:row_start[j+1]
    edge_col: np.ndarray
    edge_row: np.ndarray
    col_edges: tuple[np.ndarray, ...]
    blocked: tuple[tuple[int, int], ...] = ()  # (row, column) pairs where some symbol is impossible

    @property
    def ring(self):
        return self.tanner.ring

    @property
    def q(self) -> int:
        return self.tanner.ring.q

    @property
    def m(self) -> int:
        return self.tanner.m

    @property
    def n(self) -> int:
        return self.tanner.n

    @property
    def num_edges(self) -> int:
        return len(self.edge_col)

    def row_slice(self, j: int) -> slice:
        return slice(int(self.row_start[j]), int(self.row_start[j + 1]))

    def edge_index(self, i: int, j: int) -> int:
        sl = self.row_slice(j)
        hit = np.flatnonzero(self.edge_col[sl] == i)
        if not len(hit):
            raise KeyError(f"({i}, {j}) is not an edge")
        return sl.start + int(hit[0])


def prepare(graph: TannerGraph | ParityCheckMatrix | DecoderGraph) -> DecoderGraph:
    if isinstance(graph, DecoderGraph):
        return graph
    if isinstance(graph, ParityCheckMatrix):
        graph = build_tanner(graph)
    ring = graph.ring
    trellises = tuple(build_trellis(ring, graph.coeffs(j), graph.I[j]) for j in range(graph.m))
    row_start = np.concatenate([[0], np.cumsum(graph.degrees)]).astype(np.int64)
    edge_col = np.array([i for i, _ in graph.edges], dtype=np.int64)
    edge_row = np.array([j for _, j in graph.edges], dtype=np.int64)
    col_edges = tuple(np.flatnonzero(edge_col == i) for i in range(graph.n))
    return DecoderGraph(graph, trellises, row_start, edge_col, edge_row, col_edges,
                        _blocked_positions(trellises))


def _blocked_positions(trellises) -> tuple[tuple[int, int], ...]:
    out = []
    for j, tr in enumerate(trellises):
        sr = Semiring(math.inf)
        g = branch_metrics(tr, np.zeros((tr.d, tr.q - 1)), sr)
        mu, nu = forward(tr, g, sr), backward(tr, g, sr)
        for t in range(tr.d):
            if np.isinf(extrinsic(tr, t, mu[t], nu[t + 1], sr)).any():
                out.append((j, tr.columns[t]))
    return tuple(out)


@dataclass
class DualState:
    graph: DecoderGraph
    llr: np.ndarray  # (n, q-1)
    u: np.ndarray  # (|E|, q-1)
    S: np.ndarray = field(repr=False)  # (n, q-1)

    @classmethod
    def zeros(cls, graph, llr) -> "DualState":
        graph = prepare(graph)
        llr = np.asarray(llr, dtype=float)
        if llr.shape != (graph.n, graph.q - 1):
            raise ValueError(f"LLR shape {llr.shape} does not match ({graph.n}, {graph.q - 1})")
        if not np.isfinite(llr).all():
            raise ValueError("LLRs must be finite")
        u = np.zeros((graph.num_edges, graph.q - 1))
        return cls(graph, llr.copy(), u, -llr.copy())

    @classmethod
    def from_duals(cls, graph, llr, u) -> "DualState":
        st = cls.zeros(graph, llr)
        st.u[...] = u
        st.recompute_sums()
        return st

    def copy(self) -> "DualState":
        return DualState(self.graph, self.llr.copy(), self.u.copy(), self.S.copy())

    @property
    def u0(self) -> np.ndarray:
        """Channel blocks ``u[i, 0]``; always ``-lambda``."""
        return -self.llr

    def v_row(self, j: int) -> np.ndarray:
        return -self.u[self.graph.row_slice(j)]

    def column_blocks(self, i: int) -> np.ndarray:
        """All blocks of column ``i``, channel block first."""
        return np.vstack([self.u0[i][None, :], self.u[self.graph.col_edges[i]]])

    def set_edge(self, e: int, value: np.ndarray) -> None:
        i = self.graph.edge_col[e]
        self.S[i] += value - self.u[e]
        self.u[e] = value

    def recompute_sums(self) -> None:
        self.S = -self.llr.copy()
        np.add.at(self.S, self.graph.edge_col, self.u)

    def sums_drift(self) -> float:
        ref = -self.llr.copy()
        np.add.at(ref, self.graph.edge_col, self.u)
        return float(np.abs(ref - self.S).max(initial=0.0))


@dataclass
class DecodeResult:
    symbols: np.ndarray  # ERASED marks undecided symbols
    status: Status
    iterations: int
    trace: list[float] = field(default_factory=list)
    counters: OpCounter = field(default_factory=OpCounter)

    @property
    def erasures(self) -> int:
        return int((self.symbols == ERASED).sum())


def decision_rule(state: DualState) -> np.ndarray:
    """Per-symbol argmin of ``x_i = (0, lambda_i - sum_j u_ij)``; ties -> ERASED."""
    x = np.concatenate([np.zeros((state.graph.n, 1)), -state.S], axis=1)
    best = x.min(axis=1, keepdims=True)
    hits = x == best
    return np.where(hits.sum(axis=1) == 1, hits.argmax(axis=1), ERASED)


def decided_codeword(state: DualState, symbols: np.ndarray) -> bool:
    return not (symbols == ERASED).any() and is_codeword(state.graph.tanner.H, symbols)


def vn_value(S_i: np.ndarray, sr: Semiring) -> float:
    """(Soft-)min over constant words of ``-S_i(a)``, with ``S_i(0) = 0``."""
    m = sr.sum(sr.branch(S_i))
    return float(sr.to_min(m))


def dual_objective(state: DualState, kappa: float = math.inf) -> float:
    """Sum of the column and row (soft-)minima of the dual program."""
    sr = Semiring(kappa)
    g = state.graph
    phi = sum(vn_value(state.S[i], sr) for i in range(g.n))
    theta = sum(row_value(g.trellises[j], state.v_row(j), kappa) for j in range(g.m))
    return float(phi + theta)
