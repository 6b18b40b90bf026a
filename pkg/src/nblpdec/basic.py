"""Coordinate-ascent ("basic") decoder on the smoothed dual LP.

Each step maximizes the (softened) dual objective over the variables of one
Tanner-graph edge while everything else is held fixed.  The check-side
terms come from the row trellis, the variable-side terms in closed form from
the column's running sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dual import (
    DecodeResult,
    DualState,
    Status,
    decided_codeword,
    decision_rule,
    dual_objective,
    prepare,
)
from .trellis import (
    OpCounter,
    Semiring,
    backward,
    branch_metrics,
    extrinsic,
    forward,
    forward_step,
)

__all__ = [
    "BasicConfig",
    "vn_terms",
    "cn_extrinsic",
    "edge_update",
    "coordinate_update",
    "sweep",
    "decode",
]

_PICKS = ("midpoint", "lower", "upper")


@dataclass(frozen=True)
class BasicConfig:
    """Options of the coordinate-ascent decoder.

    ``edge_mode`` picks how the ``q-1`` coordinates of an edge are set:

    * ``"block"``: the joint maximizer over the whole block, i.e. the point at
      which every coordinate satisfies its single-coordinate optimality
      condition at once.  Repeating the update changes nothing.
    * ``"sequential"``: one coordinate after another, each with refreshed
      terms (plain cyclic coordinate ascent).
    * ``"simultaneous"``: every coordinate from the same starting point.

    ``interval_pick`` only matters for infinite kappa in the last two modes.

    ``schedule="row"`` reuses one backward pass per row and extends the
    forward metrics edge by edge; ``"edge"`` recomputes the full row trellis
    for every edge.  Both schedules produce the same iterates.
    """

    kappa: float = math.inf
    max_iters: int = 100
    schedule: str = "edge"
    edge_mode: str = "block"
    interval_pick: str = "midpoint"
    track_objective: bool = False

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive (use math.inf for the min-sum limit)")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be at least 1")
        if self.schedule not in ("edge", "row"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.edge_mode not in ("block", "sequential", "simultaneous"):
            raise ValueError(f"unknown edge_mode {self.edge_mode!r}")
        if self.interval_pick not in _PICKS:
            raise ValueError(f"interval_pick must be one of {_PICKS}")


def _edge(state: DualState, e) -> int:
    """Flat edge index from an index or an ``(i, j)`` pair."""
    if isinstance(e, tuple):
        return state.graph.edge_index(*e)
    return int(e)


def vn_terms(state: DualState, e, kappa: float):
    """``(V_r, V_rbar)`` for edge ``e`` (index or ``(i, j)``), both of length ``q-1``.

    ``V_r`` is the column sum with this edge left out; ``V_rbar`` is the
    (soft-)max of the full column sums over symbols other than ``r``.
    """
    sr = Semiring(kappa)
    e = _edge(state, e)
    i = state.graph.edge_col[e]
    v_r = state.S[i] - state.u[e]
    v_rbar = sr.to_c(sr.sum_excluding(sr.branch(state.S[i])))
    return v_r, v_rbar


def cn_extrinsic(state: DualState, e, kappa: float, counter: OpCounter | None = None) -> np.ndarray:
    """Check-side extrinsic metrics of edge ``e`` for every label, as C-values.

    Entry ``b`` is the (soft-)max over row codewords with ``b`` at this
    position of ``<v, Xi>`` on the other positions.
    """
    g = state.graph
    e = _edge(state, e)
    j = g.edge_row[e]
    t = e - g.row_start[j]
    tr = g.trellises[j]
    sr = Semiring(kappa)
    bm = branch_metrics(tr, state.v_row(j), sr)
    mu = forward(tr, bm, sr, counter)
    nu = backward(tr, bm, sr, counter)
    ext = extrinsic(tr, t, mu[t], nu[t + 1], sr, counter)
    if counter is not None:
        counter.marginal_sets += 1
    return sr.to_c(ext)


def _solve_edge(S_i, u_e, cext, cfg: BasicConfig) -> np.ndarray:
    """New block for one edge from column sums and check extrinsics.

    ``cext[b]`` are the check-side C-values (label 0 included).  The update
    of coordinate ``r`` is the midpoint (or an endpoint) of the interval
    between ``V_rbar - V_r`` and ``C_r - C_rbar``; for finite kappa the
    midpoint is the unique maximizer.  In block mode all those conditions
    hold together at ``(C_r - C_0 - V_r) / 2``.
    """
    base = S_i - u_e  # V_r: column sum without this edge
    if cfg.edge_mode == "block":
        return 0.5 * ((cext[1:] - cext[0]) - base)
    x = u_e.copy()
    targets = np.empty(len(x))
    for k in range(len(x)):
        val = _coord_value(base, x, cext, k, cfg)
        if cfg.edge_mode == "sequential":
            x[k] = val
        else:
            targets[k] = val
    return targets if cfg.edge_mode == "simultaneous" else x


def _coord_value(base, x, cext, k, cfg: BasicConfig) -> float:
    """Single-coordinate optimum for coordinate ``k`` given the block ``x``."""
    sr = Semiring(cfg.kappa)
    q = len(cext)
    # weights of the other symbols under the current x
    var_w = np.concatenate([[0.0], base + x])
    chk_w = np.concatenate([[cext[0]], cext[1:] - x])
    keep = np.arange(q) != k + 1
    lo = _smax(var_w[keep], sr) - base[k]
    hi = cext[k + 1] - _smax(chk_w[keep], sr)
    if cfg.kappa == math.inf and cfg.interval_pick != "midpoint":
        a, b = sorted((lo, hi))
        return a if cfg.interval_pick == "lower" else b
    return 0.5 * (lo + hi)


def _smax(w: np.ndarray, sr: Semiring) -> float:
    if sr.minsum:
        return float(w.max())
    k = sr.kappa
    mx = w.max()
    return float(mx + np.log(np.exp(k * (w - mx)).sum()) / k)


def edge_update(state: DualState, e, cfg: BasicConfig | float = math.inf,
                counter: OpCounter | None = None, cext: np.ndarray | None = None) -> np.ndarray:
    """Maximize the dual objective over the block of edge ``e``, in place.

    ``e`` is a flat edge index or an ``(i, j)`` pair; ``cfg`` may be a bare
    kappa.
    """
    if not isinstance(cfg, BasicConfig):
        cfg = BasicConfig(kappa=cfg)
    e = _edge(state, e)
    if cext is None:
        cext = cn_extrinsic(state, e, cfg.kappa, counter)
    i = state.graph.edge_col[e]
    new = _solve_edge(state.S[i], state.u[e], cext, cfg)
    state.set_edge(e, new)
    if counter is not None:
        counter.vn_updates += 1
    return new


def coordinate_update(state: DualState, e, r: int, cfg: BasicConfig | float = math.inf) -> float:
    """Optimize the single coordinate ``u[e]^(r)`` (``r`` a nonzero symbol), in place."""
    if not isinstance(cfg, BasicConfig):
        cfg = BasicConfig(kappa=cfg)
    e = _edge(state, e)
    if not 0 < r < state.graph.q:
        raise ValueError(f"r must be a nonzero symbol, got {r}")
    cext = cn_extrinsic(state, e, cfg.kappa)
    i = state.graph.edge_col[e]
    new = state.u[e].copy()
    new[r - 1] = _coord_value(state.S[i] - state.u[e], state.u[e], cext, r - 1, cfg)
    state.set_edge(e, new)
    return float(new[r - 1])


def _row_pass(state: DualState, j: int, cfg: BasicConfig, counter: OpCounter | None) -> None:
    g = state.graph
    tr = g.trellises[j]
    sr = Semiring(cfg.kappa)
    start = int(g.row_start[j])
    bm = branch_metrics(tr, state.v_row(j), sr)
    nu = backward(tr, bm, sr, counter)
    mu_t = np.full(tr.q, sr.zero)
    mu_t[0] = sr.one
    for t in range(tr.d):
        # nu[t+1] only involves positions > t, which this pass has not touched yet
        ext = extrinsic(tr, t, mu_t, nu[t + 1], sr, counter)
        new = edge_update(state, start + t, cfg, counter, cext=sr.to_c(ext))
        g_t = sr.branch(-new)
        mu_t = forward_step(tr, t, mu_t, g_t, sr, counter)
    if counter is not None:
        counter.marginal_sets += 1


def sweep(state: DualState, cfg: BasicConfig, counter: OpCounter | None = None) -> None:
    """One iteration: every edge once, rows ascending, columns ascending within a row."""
    g = state.graph
    if cfg.schedule == "row":
        for j in range(g.m):
            _row_pass(state, j, cfg, counter)
    else:
        for e in range(g.num_edges):
            edge_update(state, e, cfg, counter)


def decode(graph, llr, cfg: BasicConfig | None = None) -> DecodeResult:
    """Run coordinate ascent from all-zero duals until a codeword or ``max_iters``."""
    cfg = cfg or BasicConfig()
    graph = prepare(graph)
    if graph.blocked:
        j, i = graph.blocked[0]
        raise ValueError(
            f"row {j + 1}: some symbol can never appear at column {i + 1}; "
            "the coordinate-ascent update is unbounded for such rows"
        )
    state = DualState.zeros(graph, llr)
    counter = OpCounter()
    trace: list[float] = []
    symbols = decision_rule(state)
    for it in range(1, cfg.max_iters + 1):
        sweep(state, cfg, counter)
        if cfg.track_objective:
            trace.append(dual_objective(state, cfg.kappa))
        symbols = decision_rule(state)
        if decided_codeword(state, symbols):
            return DecodeResult(symbols, Status.CODEWORD, it, trace, counter)
    return DecodeResult(symbols, Status.MAX_ITERS, cfg.max_iters, trace, counter)
