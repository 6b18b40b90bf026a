"""Incremental subgradient ascent on the (non-smoothed) dual program.

Every iteration visits all check nodes, then all variable nodes.  A check
node moves its dual blocks along ``-Xi(b*)`` where ``b*`` is the cheapest
row codeword (Viterbi); a variable node does the same with the cheapest
constant word of its repetition code.  The channel blocks stay at
``-lambda``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .dual import (
    DecodeResult,
    DualState,
    Status,
    decided_codeword,
    decision_rule,
    prepare,
    vn_value,
)
from .trellis import OpCounter, Semiring, viterbi_best

__all__ = [
    "StepSchedule",
    "SubgradConfig",
    "step_size",
    "default_schedule",
    "cn_step",
    "vn_step",
    "dual_value",
    "decode",
]

_MINSUM = Semiring(math.inf)
DEFAULT_THETA1 = {"staircase": 0.15, "constant": 0.08}


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes ``theta_l``, ``l = 1, 2, ...``.

    ``"constant"`` keeps ``theta1``.  ``"staircase"`` multiplies by ``factor``
    at every iteration index divisible by ``period``, so with the defaults
    ``theta_19 = theta1`` and ``theta_20 = 0.8 * theta1``.  ``"table"`` reads
    ``table[l-1]`` and repeats the last entry afterwards.
    """

    rule: str = "staircase"
    theta1: float = 0.15
    factor: float = 0.8
    period: int = 20
    table: tuple[float, ...] = ()

    def __post_init__(self):
        if self.rule not in ("constant", "staircase", "table"):
            raise ValueError(f"unknown step rule {self.rule!r}")
        if self.rule == "table":
            if not self.table or any(not t > 0 for t in self.table):
                raise ValueError("table rule needs a nonempty list of positive steps")
        elif not self.theta1 > 0:
            raise ValueError("theta1 must be positive")
        if self.period < 1 or not self.factor > 0:
            raise ValueError("period must be >= 1 and factor positive")


def default_schedule(rule: str = "staircase") -> StepSchedule:
    """Schedule with the usual starting step for ``rule`` (0.15 staircase, 0.08 constant)."""
    return StepSchedule(rule=rule, theta1=DEFAULT_THETA1[rule])


@dataclass(frozen=True)
class SubgradConfig:
    schedule: StepSchedule = field(default_factory=StepSchedule)
    max_iters: int = 100
    early_stop_eps: float = 0.0  # 0 disables

    def __post_init__(self):
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be at least 1")
        if self.early_stop_eps < 0:
            raise ValueError("early_stop_eps must be nonnegative")


def step_size(schedule: StepSchedule, l: int) -> float:
    if l < 1:
        raise ValueError("iteration index starts at 1")
    if schedule.rule == "constant":
        return schedule.theta1
    if schedule.rule == "table":
        return schedule.table[min(l, len(schedule.table)) - 1]
    # Work on the decimal values the user typed so that e.g. 0.15 * 0.8**2
    # comes out as the float nearest 0.096 instead of accumulating rounding.
    k = l // schedule.period
    exact = Fraction(repr(schedule.theta1)) * Fraction(repr(schedule.factor)) ** k
    return float(exact)


def cn_step(state: DualState, j: int, theta: float, counter: OpCounter | None = None):
    """Move row ``j`` along its subgradient; returns ``(b*, row minimum before the step)``."""
    g = state.graph
    tr = g.trellises[j]
    b, value = viterbi_best(tr, state.v_row(j), counter)
    sl = g.row_slice(j)
    nz = np.flatnonzero(b)
    # v <- v - theta*Xi(b*), i.e. u <- u + theta*Xi(b*)
    for t in nz:
        e = sl.start + int(t)
        new = state.u[e].copy()
        new[b[t] - 1] += theta
        state.set_edge(e, new)
    return b, value


def vn_step(state: DualState, i: int, theta: float, counter: OpCounter | None = None):
    """Move the free blocks of column ``i`` along its subgradient.

    Returns ``(a*, column minimum before the step)`` where ``a*`` is the
    symbol of the cheapest constant word (smallest symbol on ties).
    """
    S_i = state.S[i]
    costs = np.concatenate([[0.0], -S_i])
    a = int(costs.argmin())
    value = float(costs[a])
    if counter is not None:
        counter.vn_updates += 1
    if a:
        for e in state.graph.col_edges[i]:
            new = state.u[e].copy()
            new[a - 1] -= theta
            state.set_edge(int(e), new)
    return a, value


def dual_value(state: DualState) -> float:
    """Dual objective with hard minima, recomputed from the current state."""
    g = state.graph
    phi = sum(vn_value(state.S[i], _MINSUM) for i in range(g.n))
    theta = sum(viterbi_best(g.trellises[j], state.v_row(j))[1] for j in range(g.m))
    return float(phi + theta)


def decode(graph, llr, cfg: SubgradConfig | None = None) -> DecodeResult:
    """Subgradient decoding from all-zero duals.

    ``trace`` holds, per iteration, the sum of the node minima seen while the
    nodes were processed.  These values come for free from the node updates.
    Early stopping compares successive entries.
    """
    cfg = cfg or SubgradConfig()
    graph = prepare(graph)
    state = DualState.zeros(graph, llr)
    counter = OpCounter()
    trace: list[float] = []
    symbols = decision_rule(state)
    for l in range(1, cfg.max_iters + 1):
        theta = step_size(cfg.schedule, l)
        total = 0.0
        for j in range(graph.m):
            total += cn_step(state, j, theta, counter)[1]
        for i in range(graph.n):
            total += vn_step(state, i, theta, counter)[1]
        trace.append(total)
        symbols = decision_rule(state)
        if decided_codeword(state, symbols):
            return DecodeResult(symbols, Status.CODEWORD, l, trace, counter)
        if cfg.early_stop_eps > 0 and l > 1 and abs(trace[-1] - trace[-2]) < cfg.early_stop_eps:
            return DecodeResult(symbols, Status.EARLY_STOP, l, trace, counter)
    return DecodeResult(symbols, Status.MAX_ITERS, cfg.max_iters, trace, counter)
