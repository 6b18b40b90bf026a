"""Acceptance run: ten numbered criteria, one summary line each.

Run on its own with ``pytest tests/test_acceptance.py``; the terminal
summary lists ``criterion N PASS|FAIL``.
"""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from nblpdec import basic, subgradient
from nblpdec.algebra import build_ring
from nblpdec.channel import llr_matrix, psk, sigma_from_snr_db, transmit_awgn
from nblpdec.dual import DualState, Status, dual_objective
from nblpdec.oracle import enumerate_code, exhaustive_ml
from nblpdec.sim import SimConfig, frame_rng, run_sweep, write_csv
from nblpdec.trellis import OpCounter, build_trellis, marginals
from nblpdec.verify import check_ascent, check_marginals, check_subgradient

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def marginal_checks():
    return check_marginals(instances=1000, seed=1)


@pytest.mark.criterion(1, "trellis marginals equal exhaustive enumeration")
def test_criterion_1_marginals(marginal_checks):
    res = marginal_checks[0]
    print(res.line())
    assert res.passed, res.detail


@pytest.mark.criterion(2, "label-excluding forward path equals branch sums")
def test_criterion_2_mubar(marginal_checks):
    res = marginal_checks[1]
    print(res.line())
    assert res.passed, res.detail


# ---------------------------------------------------------------- criterion 3

@pytest.mark.criterion(3, "monotone dual ascent and golden-section agreement")
def test_criterion_3_monotone_ascent():
    res = check_ascent(draws=100, seed=3, kappas=(1.0, 10.0))
    print(res.line())
    assert res.passed, res.detail


def _coordinate_objective(state, e, r, kappa):
    """h(t): dual objective with coordinate r of edge e set to t."""
    def h(t):
        probe = state.copy()
        new = probe.u[e].copy()
        new[r - 1] = t
        probe.set_edge(e, new)
        return dual_objective(probe, kappa)
    return h


def _golden_max(h, start):
    res = minimize_scalar(lambda t: -h(t), bracket=(start - 1.0, start + 1.0), method="golden",
                          tol=1e-10)
    return -res.fun


@pytest.mark.criterion(3, "monotone dual ascent and golden-section agreement")
@pytest.mark.parametrize("kappa", [1.0, 10.0])
def test_criterion_3_golden_section(graph52, kappa):
    rng = np.random.default_rng(33)
    worst = 0.0
    for _ in range(50):
        llr = rng.normal(0, 2, size=(graph52.n, 3))
        st = DualState.from_duals(graph52, llr, rng.normal(0, 1, size=(graph52.num_edges, 3)))
        e = int(rng.integers(graph52.num_edges))
        r = int(rng.integers(1, 4))
        h = _coordinate_objective(st, e, r, kappa)
        best = _golden_max(h, st.u[e, r - 1])
        # single-coordinate update
        seq = st.copy()
        basic.coordinate_update(seq, e, r, basic.BasicConfig(kappa=kappa, edge_mode="sequential"))
        worst = max(worst, abs(dual_objective(seq, kappa) - best))
        # block update: afterwards no coordinate can be improved
        blk = st.copy()
        basic.edge_update(blk, e, kappa)
        h_blk = _coordinate_objective(blk, e, r, kappa)
        worst = max(worst, _golden_max(h_blk, blk.u[e, r - 1]) - dual_objective(blk, kappa))
    print(f"kappa={kappa}: worst gap to golden-section maximum {worst:.3g}")
    assert worst <= 1e-6


# ---------------------------------------------------------------- criterion 4

@pytest.mark.criterion(4, "subgradient inequalities hold exactly")
def test_criterion_4_subgradients():
    res = check_subgradient(states=200, perturbations=100, seed=4)
    print(res.line())
    assert res.passed, res.detail


# ---------------------------------------------------------------- criterion 5

@pytest.mark.criterion(5, "staircase step sizes are exact")
def test_criterion_5_staircase():
    s = subgradient.default_schedule("staircase")
    got = [subgradient.step_size(s, l) for l in (19, 20, 40)]
    print(f"theta_19, theta_20, theta_40 = {got}")
    assert got == [0.15, 0.12, 0.096]


# ---------------------------------------------------------------- criterion 6

@pytest.mark.criterion(6, "both decoders recover codewords at 40 dB")
def test_criterion_6_noiseless(H52, graph52):
    words = np.array(enumerate_code(H52))
    mod = psk(4)
    sigma = sigma_from_snr_db(40.0)
    rng = np.random.default_rng(6)
    errors = {"basic": 0, "subgrad": 0}
    for _ in range(100):
        c = words[rng.integers(len(words))]
        llr = llr_matrix(mod, transmit_awgn(mod.points[c], sigma, rng), sigma)
        for name, res in (("basic", basic.decode(graph52, llr)),
                          ("subgrad", subgradient.decode(graph52, llr))):
            ok = res.status is Status.CODEWORD and np.array_equal(res.symbols, c)
            errors[name] += not ok
    print(f"frame errors over 100 codewords: {errors}")
    assert errors == {"basic": 0, "subgrad": 0}


# ---------------------------------------------------------------- criterion 7

WATERFALL_FRAMES = 20_000


@pytest.mark.criterion(7, "desk-scale waterfall and agreement with ML")
def test_criterion_7_waterfall(H52):
    cfg = SimConfig(matrix=H52, decoder="basic", snr_db=(4.0, 6.0, 8.0), max_frames=WATERFALL_FRAMES,
                    target_frame_errors=None, source="random", seed=7, workers=4)
    pts = run_sweep(cfg)
    for p in pts:
        print(f"{p.snr_db:4.1f} dB  frames {p.frames}  frame errors {p.frame_errors}  FER {p.fer:.3g}")
    for a, b in zip(pts, pts[1:]):
        sa = math.sqrt(a.fer * (1 - a.fer) / a.frames)
        sb = math.sqrt(b.fer * (1 - b.fer) / b.frames)
        assert a.fer - b.fer > 2 * math.hypot(sa, sb), (a.snr_db, b.snr_db)


@pytest.mark.criterion(7, "desk-scale waterfall and agreement with ML")
def test_criterion_7_ml_agreement(H52, graph52):
    words = np.array(enumerate_code(H52))
    mod = psk(4)
    snr = 8.0
    sigma = sigma_from_snr_db(snr)
    frames = 10_000
    agree = 0
    for f in range(frames):
        rng = frame_rng(70, snr, f)
        c = words[rng.integers(len(words))]
        llr = llr_matrix(mod, transmit_awgn(mod.points[c], sigma, rng), sigma)
        agree += np.array_equal(basic.decode(graph52, llr).symbols, exhaustive_ml(H52, llr, words))
    print(f"basic decoder equals ML on {agree}/{frames} frames at {snr} dB")
    assert agree >= 0.95 * frames


# ---------------------------------------------------------------- criterion 8

def _branch_ops(ring, d):
    c = OpCounter()
    tr = build_trellis(ring, [1] * d)
    marginals(tr, np.zeros((d, ring.q - 1)), 1.0, counter=c)
    return c.branch_ops


def _slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@pytest.mark.criterion(8, "row cost linear in degree and quadratic in q")
def test_criterion_8_complexity():
    ds = np.arange(2, 13)
    z4 = build_ring("Zq", 4)
    slope_d = _slope(ds, [_branch_ops(z4, int(d)) for d in ds])
    qs = np.array([2, 4, 8, 16])
    rings = [build_ring("GF", int(math.log2(q))) for q in qs]
    slope_q = _slope(qs, [_branch_ops(r, 6) for r in rings])
    print(f"exponent in d: {slope_d:.4f}, exponent in q: {slope_q:.4f}")
    assert abs(slope_d - 1) <= 0.1
    assert abs(slope_q - 2) <= 0.2


# ---------------------------------------------------------------- criterion 9

@pytest.mark.criterion(9, "per-iteration call counts")
def test_criterion_9_call_counts(graph52):
    rng = np.random.default_rng(9)
    m, n, E = graph52.m, graph52.n, graph52.num_edges
    for _ in range(20):
        llr = rng.normal(0, 0.5, size=(n, 3))
        for iters in (1, 4, 25):
            res = subgradient.decode(graph52, llr, subgradient.SubgradConfig(max_iters=iters))
            assert res.counters.viterbi_runs == m * res.iterations
            assert res.counters.vn_updates == n * res.iterations
            for schedule, per_iter in (("edge", E), ("row", m)):
                cfg = basic.BasicConfig(schedule=schedule, max_iters=iters)
                res = basic.decode(graph52, llr, cfg)
                assert res.counters.marginal_sets == per_iter * res.iterations


# ---------------------------------------------------------------- criterion 10

@pytest.mark.criterion(10, "CSV identical for 1 and 4 workers")
@pytest.mark.parametrize("decoder", ["basic", "subgrad"])
def test_criterion_10_determinism(H52, decoder):
    cfg = SimConfig(matrix=H52, decoder=decoder, snr_db=(2.0, 4.0, 6.0), max_frames=3000,
                    target_frame_errors=60, source="random", seed=10, workers=1)
    one = write_csv(run_sweep(cfg))
    four = write_csv(run_sweep(SimConfig(**{**cfg.__dict__, "workers": 4})))
    print(one)
    assert one.encode() == four.encode()
