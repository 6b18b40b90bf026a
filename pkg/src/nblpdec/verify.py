"""Self-checks of a build against the exhaustive oracle.

Each check returns a :class:`CheckResult`; ``run_all`` bundles them for the
``verify`` command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import basic
from .algebra import build_ring
from .code import example_matrix
from .dual import DualState, dual_objective, prepare
from .oracle import _spc_array, brute_marginals
from .trellis import build_trellis, marginals, viterbi_best

__all__ = [
    "CheckResult",
    "random_spc",
    "check_marginals",
    "check_ascent",
    "check_subgradient",
    "run_all",
]

RINGS = (("Zq", 2), ("Zq", 4), ("GF", 2), ("Zq", 8), ("GF", 3))
KAPPAS = (1.0, 10.0, math.inf)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def random_spc(rng: np.random.Generator, d_range=(2, 6)):
    """Random ring, row coefficients and check-side duals in [-5, 5]."""
    ring = build_ring(*RINGS[rng.integers(len(RINGS))])
    d = int(rng.integers(d_range[0], d_range[1] + 1))
    coeffs = rng.integers(1, ring.q, size=d)
    v = rng.uniform(-5.0, 5.0, size=(d, ring.q - 1))
    return ring, coeffs, v


def _max_err(a, b, rtol, atol):
    """Largest violation ratio; equal infinities count as a match."""
    same_inf = np.isinf(a) & np.isinf(b) & (np.sign(a) == np.sign(b))
    if (np.isinf(a) != np.isinf(b)).any():
        return math.inf
    fin = ~same_inf
    if not fin.any():
        return 0.0
    err = np.abs(a[fin] - b[fin]) / (atol + rtol * np.abs(b[fin]))
    return float(err.max())


def check_marginals(instances: int = 1000, seed: int = 0) -> list[CheckResult]:
    """Trellis marginals (both label-excluded forms) against enumeration."""
    rng = np.random.default_rng(seed)
    worst = worst_alt = 0.0
    for _ in range(instances):
        ring, coeffs, v = random_spc(rng)
        tr = build_trellis(ring, coeffs)
        for kappa in KAPPAS:
            want = brute_marginals(ring, coeffs, v, kappa)
            got = marginals(tr, v, kappa)
            alt = marginals(tr, v, kappa, use_mubar=True)
            rtol, atol = (0.0, 1e-12) if math.isinf(kappa) else (1e-9, 1e-12)
            for g, w in zip(got, want):
                worst = max(worst, _max_err(g, w, rtol, atol))
            worst_alt = max(worst_alt, _max_err(alt[1], got[1], 0.0, 1e-12))
    return [
        CheckResult("trellis marginals vs enumeration", worst <= 1.0,
                    f"{instances} rows x {len(KAPPAS)} kappas, worst error/tolerance {worst:.3g}"),
        CheckResult("label-excluding forward metric", worst_alt <= 1.0,
                    f"worst error/1e-12 {worst_alt:.3g}"),
    ]


def check_ascent(draws: int = 100, seed: int = 0, kappas=(1.0, 10.0)) -> CheckResult:
    """Dual objective never decreases across single edge updates."""
    rng = np.random.default_rng(seed)
    graph = prepare(example_matrix())
    worst = 0.0
    for _ in range(draws):
        llr = rng.normal(0.0, 2.0, size=(graph.n, graph.q - 1))
        for kappa in kappas:
            cfg = basic.BasicConfig(kappa=kappa)
            st = DualState.zeros(graph, llr)
            prev = dual_objective(st, kappa)
            for _sweep in range(3):
                for e in range(graph.num_edges):
                    basic.edge_update(st, e, cfg)
                    cur = dual_objective(st, kappa)
                    worst = max(worst, prev - cur)
                    prev = cur
    return CheckResult("monotone dual ascent", worst <= 1e-9,
                       f"{draws} LLR draws, largest decrease {worst:.3g}")


def _dyadic(rng, shape, scale=1024, lim=5):
    return rng.integers(-lim * scale, lim * scale + 1, size=shape) / scale


def _exact_min(words, v_frac):
    """min over words of <-v, Xi(b)> in rational arithmetic."""
    best = None
    for w in words:
        c = -sum((v_frac[t][b - 1] for t, b in enumerate(w) if b), Fraction(0))
        best = c if best is None or c < best else best
    return best


def check_subgradient(states: int = 200, perturbations: int = 100, seed: int = 0) -> CheckResult:
    """Row and column subgradient inequalities, in exact rational arithmetic."""
    rng = np.random.default_rng(seed)
    graph = prepare(example_matrix())
    rows = [_spc_array(graph.ring, tr.coeffs).tolist() for tr in graph.trellises]
    bad = 0
    for _ in range(states):
        llr = _dyadic(rng, (graph.n, graph.q - 1))
        st = DualState.from_duals(graph, llr, _dyadic(rng, (graph.num_edges, graph.q - 1)))
        for j, tr in enumerate(graph.trellises):
            v = st.v_row(j)
            b = viterbi_best(tr, v)[0]
            vf = [[Fraction(x) for x in row] for row in v.tolist()]
            m0 = _exact_min(rows[j], vf)
            for _p in range(perturbations):
                v2 = [[Fraction(x) for x in row] for row in _dyadic(rng, v.shape).tolist()]
                # s = -Xi(b*)
                lin = -sum((v2[t][bt - 1] - vf[t][bt - 1] for t, bt in enumerate(b) if bt), Fraction(0))
                bad += _exact_min(rows[j], v2) > m0 + lin
        for i in range(graph.n):
            blocks = st.column_blocks(i)
            a = int(np.concatenate([[0.0], -st.S[i]]).argmin())
            uf = [[Fraction(x) for x in row] for row in blocks.tolist()]

            def col_min(u):
                sums = [sum((row[r - 1] for row in u), Fraction(0)) for r in range(1, graph.q)]
                return min([Fraction(0)] + [-s for s in sums])

            m0 = col_min(uf)
            for _p in range(perturbations):
                u2 = [uf[0]] + [[Fraction(x) for x in row]
                                for row in _dyadic(rng, blocks[1:].shape).tolist()]
                lin = -sum((u2[k][a - 1] - uf[k][a - 1] for k in range(1, len(uf))), Fraction(0)) if a else 0
                bad += col_min(u2) > m0 + lin
    return CheckResult("subgradient inequalities", bad == 0,
                       f"{states} states x {perturbations} points, {bad} violations")


def run_all(instances: int = 1000, seed: int = 0) -> list[CheckResult]:
    out = check_marginals(instances, seed)
    out.append(check_ascent(max(1, instances // 10), seed))
    out.append(check_subgradient(max(1, instances // 5), 100, seed))
    return out
