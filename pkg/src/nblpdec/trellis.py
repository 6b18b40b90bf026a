"""Partial-syndrome trellis of a single parity-check row.

States at every depth are the ``q`` ring elements.  A branch labelled ``b``
joins state ``s`` at depth ``t`` to ``s + h_t*b`` at depth ``t+1``, so a
non-invertible coefficient yields parallel branches.

Two semirings are supported, selected by ``kappa``:

* finite ``kappa``: sum-product carried in the log domain.  A metric value
  ``x`` stands for ``exp(x)``; a branch labelled ``b`` weighs
  ``kappa * <v_t, xi(b)>``.  Zero is ``-inf``, one is ``0``.
* ``kappa = inf``: min-sum.  Branch costs are ``<-v_t, xi(b)>``; zero is
  ``+inf``, one is ``0``.

Depth ``t`` metrics follow the usual convention: ``mu[t]`` covers positions
``0..t-1`` and ``nu[t]`` covers positions ``t..d-1``, with ``nu[t](s)`` summing
paths that drive the partial syndrome from ``s`` back to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import RingSpec

__all__ = [
    "Semiring",
    "OpCounter",
    "SpcTrellis",
    "build_trellis",
    "branch_metrics",
    "forward",
    "forward_step",
    "backward",
    "alt_forward",
    "extrinsic",
    "marginals",
    "marginals_from_extrinsic",
    "row_value",
    "viterbi_best",
]


@dataclass
class OpCounter:
    """Instrumentation counters shared by the trellis routines and the decoders."""

    branch_ops: int = 0
    marginal_sets: int = 0
    viterbi_runs: int = 0
    vn_updates: int = 0

    def reset(self) -> None:
        self.branch_ops = self.marginal_sets = self.viterbi_runs = self.vn_updates = 0


class Semiring:
    """Log-domain sum-product (finite kappa) or min-sum (``kappa = inf``)."""

    def __init__(self, kappa: float):
        kappa = float(kappa)
        if not kappa > 0:
            raise ValueError(f"kappa must be positive, got {kappa}")
        self.kappa = kappa
        self.minsum = math.isinf(kappa)
        self.zero = math.inf if self.minsum else -math.inf
        self.one = 0.0

    def __repr__(self) -> str:
        return f"Semiring(kappa={self.kappa})"

    def sum(self, a: np.ndarray, axis: int = -1) -> np.ndarray:
        if self.minsum:
            return a.min(axis=axis)
        mx = a.max(axis=axis, keepdims=True)
        shift = np.where(np.isfinite(mx), mx, 0.0)
        with np.errstate(divide="ignore"):
            out = np.log(np.exp(a - shift).sum(axis=axis, keepdims=True)) + shift
        return np.squeeze(out, axis=axis)

    def sum_excluding(self, a: np.ndarray) -> np.ndarray:
        """For each nonzero ``r``, sum ``a[..., b]`` over ``b != r``.

        ``a`` has the ring elements on its last axis; the result has the
        ``q-1`` nonzero elements there instead.
        """
        q = a.shape[-1]
        keep = np.arange(q)[None, :] != np.arange(1, q)[:, None]
        full = np.where(keep, a[..., None, :], self.zero)
        return self.sum(full, axis=-1)

    def branch(self, v: np.ndarray) -> np.ndarray:
        """Branch metrics for every label given ``(..., q-1)`` dual blocks."""
        v = np.asarray(v, dtype=float)
        pad = np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)
        return -pad if self.minsum else self.kappa * pad

    def to_c(self, x):
        """Metric value -> C-term (``-min`` or ``-soft-min`` of the dual cost)."""
        return -x if self.minsum else x / self.kappa

    def to_min(self, x):
        """Metric value -> (soft-)minimum of ``<-v, Xi(b)>``."""
        return x if self.minsum else -x / self.kappa


@dataclass(frozen=True, eq=False)
class SpcTrellis:
    ring: RingSpec
    coeffs: tuple[int, ...]
    columns: tuple[int, ...]  # global column index of each position
    pred: np.ndarray = field(repr=False)  # (d, q, q): [t, b, s] -> s - h_t*b
    succ: np.ndarray = field(repr=False)  # (d, q, q): [t, b, s] -> s + h_t*b

    @property
    def d(self) -> int:
        return len(self.coeffs)

    @property
    def q(self) -> int:
        return self.ring.q

    def branches(self, t: int) -> list[tuple[int, int, int]]:
        """``(s, s_next, label)`` triples of section ``t``."""
        return [(s, int(self.succ[t, b, s]), b) for s in range(self.q) for b in range(self.q)]


def build_trellis(ring: RingSpec, coeffs: Sequence[int], columns: Sequence[int] | None = None) -> SpcTrellis:
    coeffs = tuple(int(h) for h in coeffs)
    if not coeffs:
        raise ValueError("a parity-check row needs at least one entry")
    if any(not 0 < h < ring.q for h in coeffs):
        raise ValueError(f"row coefficients must be nonzero elements of {ring.token}")
    columns = tuple(range(len(coeffs))) if columns is None else tuple(int(c) for c in columns)
    if len(columns) != len(coeffs):
        raise ValueError("columns and coeffs differ in length")
    el = np.arange(ring.q)
    hb = ring.mul_table[np.array(coeffs)][:, el]  # (d, q): h_t * b
    succ = ring.add_table[el[None, None, :], hb[:, :, None]]
    pred = ring.add_table[el[None, None, :], ring.neg_table[hb][:, :, None]]
    for a in (pred, succ):
        a.setflags(write=False)
    return SpcTrellis(ring, coeffs, columns, pred, succ)


def branch_metrics(trellis: SpcTrellis, v: np.ndarray, sr: Semiring) -> np.ndarray:
    """``(d, q)`` branch metrics from the row's ``(d, q-1)`` dual blocks ``v``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (trellis.d, trellis.q - 1):
        raise ValueError(f"expected dual blocks of shape {(trellis.d, trellis.q - 1)}, got {v.shape}")
    return sr.branch(v)


def _start(q: int, sr: Semiring) -> np.ndarray:
    x = np.full(q, sr.zero)
    x[0] = sr.one
    return x


def forward_step(trellis, t, mu_prev, g_t, sr, counter=None):
    if counter is not None:
        counter.branch_ops += trellis.q * trellis.q
    return sr.sum(mu_prev[trellis.pred[t]] + g_t[:, None], axis=0)


def forward(trellis: SpcTrellis, g: np.ndarray, sr: Semiring, counter: OpCounter | None = None) -> np.ndarray:
    """Forward metrics ``mu``, shape ``(d+1, q)``."""
    mu = np.empty((trellis.d + 1, trellis.q))
    mu[0] = _start(trellis.q, sr)
    for t in range(trellis.d):
        mu[t + 1] = forward_step(trellis, t, mu[t], g[t], sr, counter)
    return mu


def backward(trellis: SpcTrellis, g: np.ndarray, sr: Semiring, counter: OpCounter | None = None) -> np.ndarray:
    """Backward metrics ``nu``, shape ``(d+1, q)``."""
    d, q = trellis.d, trellis.q
    nu = np.empty((d + 1, q))
    nu[d] = _start(q, sr)
    for t in range(d - 1, -1, -1):
        if counter is not None:
            counter.branch_ops += q * q
        nu[t] = sr.sum(nu[t + 1][trellis.succ[t]] + g[t][:, None], axis=0)
    return nu


def alt_forward(trellis: SpcTrellis, g: np.ndarray, mu: np.ndarray, sr: Semiring,
                counter: OpCounter | None = None) -> np.ndarray:
    """Label-excluding forward metrics ``mu_bar``, shape ``(d+1, q, q-1)``.

    ``mu_bar[t+1][s, r-1]`` sums the paths into ``s`` whose last label is not
    ``r``; it is built from ``mu[t]``, never from ``mu_bar[t]``.
    """
    d, q = trellis.d, trellis.q
    mubar = np.full((d + 1, q, q - 1), sr.zero)
    for t in range(d):
        if counter is not None:
            counter.branch_ops += q * q * (q - 1)
        inc = mu[t][trellis.pred[t]] + g[t][:, None]  # (b, s)
        mubar[t + 1] = sr.sum_excluding(inc.T)
    return mubar


def extrinsic(trellis, t, mu_t, nu_next, sr, counter=None) -> np.ndarray:
    """``E_t(b) = sum_s mu[t](s - h_t b) * nu[t+1](s)`` for every label ``b``."""
    if counter is not None:
        counter.branch_ops += trellis.q * trellis.q
    return sr.sum(mu_t[trellis.pred[t]] + nu_next[None, :], axis=1)


def marginals_from_extrinsic(ext: np.ndarray, g_t: np.ndarray, sr: Semiring,
                             counter: OpCounter | None = None):
    """C-terms of one position from its extrinsic metrics.

    Returns ``(C_r, C_rbar)`` for ``r = 1..q-1``: the position-excluded
    marginal with label ``r`` forced, and the full marginal over labels
    other than ``r``.
    """
    q = ext.shape[-1]
    if counter is not None:
        counter.branch_ops += q * (q - 1)
    return sr.to_c(ext[1:]), sr.to_c(sr.sum_excluding(ext + g_t))


def marginals(trellis: SpcTrellis, v: np.ndarray, kappa: float, *, use_mubar: bool = False,
              counter: OpCounter | None = None):
    """All C-terms of a row, each of shape ``(d, q-1)``.

    ``v`` holds the check-side dual blocks ``v_{j,i}`` of the row.
    With ``use_mubar`` the label-excluded terms come from the alternative
    forward metric instead of the branch sum.
    """
    sr = Semiring(kappa)
    g = branch_metrics(trellis, v, sr)
    mu = forward(trellis, g, sr, counter)
    nu = backward(trellis, g, sr, counter)
    d, q = trellis.d, trellis.q
    c_r = np.empty((d, q - 1))
    c_rbar = np.empty((d, q - 1))
    if use_mubar:
        mubar = alt_forward(trellis, g, mu, sr, counter)
        for t in range(d):
            ext = extrinsic(trellis, t, mu[t], nu[t + 1], sr, counter)
            c_r[t] = sr.to_c(ext[1:])
            if counter is not None:
                counter.branch_ops += q * (q - 1)
            c_rbar[t] = sr.to_c(sr.sum(mubar[t + 1] + nu[t + 1][:, None], axis=0))
    else:
        for t in range(d):
            ext = extrinsic(trellis, t, mu[t], nu[t + 1], sr, counter)
            c_r[t], c_rbar[t] = marginals_from_extrinsic(ext, g[t], sr, counter)
    if counter is not None:
        counter.marginal_sets += 1
    return c_r, c_rbar


def row_value(trellis: SpcTrellis, v: np.ndarray, kappa: float) -> float:
    """(Soft-)minimum over the row's codewords ``b`` of ``<-v, Xi(b)>``."""
    sr = Semiring(kappa)
    mu = forward(trellis, branch_metrics(trellis, v, sr), sr)
    return float(sr.to_min(mu[-1, 0]))


def viterbi_best(trellis: SpcTrellis, v: np.ndarray, counter: OpCounter | None = None):
    """Minimizer of ``<-v, Xi(b)>`` over the row's codewords and its value.

    Ties go to the smallest label at each state; traceback starts from the
    zero state at full depth.
    """
    sr = Semiring(math.inf)
    g = branch_metrics(trellis, v, sr)
    d, q = trellis.d, trellis.q
    cost = _start(q, sr)
    back = np.empty((d, q), dtype=np.int64)
    for t in range(d):
        cand = cost[trellis.pred[t]] + g[t][:, None]  # (b, s)
        back[t] = cand.argmin(axis=0)
        cost = cand[back[t], np.arange(q)]
    if counter is not None:
        counter.branch_ops += d * q * q
        counter.viterbi_runs += 1
    b = np.empty(d, dtype=np.int64)
    s = 0
    for t in range(d - 1, -1, -1):
        b[t] = back[t, s]
        s = int(trellis.pred[t, b[t], s])
    return b, float(cost[0])
