import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nblpdec import subgradient as sg
from nblpdec.algebra import build_ring
from nblpdec.channel import llr_matrix, psk, sigma_from_snr_db
from nblpdec.code import from_dense, is_codeword
from nblpdec.dual import DualState, Status, dual_objective, prepare
from nblpdec.oracle import brute_row_min, brute_vn_min, enumerate_code, exhaustive_ml
from nblpdec.trellis import OpCounter

Z4 = build_ring("Zq", 4)
FROZEN_LLR = np.array([[2.058, 3.284, 2.293], [-1.946, -2.786, 0.134], [1.723, 1.018, 3.621],
                       [1.502, 1.28, -1.463], [-2.215, 2.969, 0.098]])


# ------------------------------------------------------------- step sizes

def test_staircase_values():
    s = sg.StepSchedule()
    assert [sg.step_size(s, l) for l in (1, 19, 20, 39, 40)] == [0.15, 0.15, 0.12, 0.12, 0.096]


def test_constant_and_unit_factor():
    c = sg.default_schedule("constant")
    assert c.theta1 == 0.08
    assert {sg.step_size(c, l) for l in range(1, 200)} == {0.08}
    flat = sg.StepSchedule(factor=1.0)
    assert {sg.step_size(flat, l) for l in range(1, 200)} == {0.15}


def test_table_schedule():
    t = sg.StepSchedule(rule="table", table=(0.3, 0.2))
    assert [sg.step_size(t, l) for l in (1, 2, 3, 50)] == [0.3, 0.2, 0.2, 0.2]


@pytest.mark.parametrize("kw", [dict(rule="wolfe"), dict(theta1=0.0), dict(period=0),
                                dict(factor=-1.0), dict(rule="table")])
def test_schedule_validation(kw):
    with pytest.raises(ValueError):
        sg.StepSchedule(**kw)


def test_step_index_starts_at_one():
    with pytest.raises(ValueError):
        sg.step_size(sg.StepSchedule(), 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10_000), st.integers(1, 50))
def test_staircase_is_piecewise_constant(l, period):
    s = sg.StepSchedule(period=period)
    assert sg.step_size(s, l) == pytest.approx(0.15 * 0.8 ** (l // period), rel=1e-12)
    assert sg.step_size(s, l + 1) <= sg.step_size(s, l)


# ------------------------------------------------------------- node steps

def test_cn_step_example():
    g = prepare(from_dense(Z4, [[1, 1]]))
    st_ = DualState.zeros(g, np.zeros((2, 3)))
    st_.set_edge(0, [-10.0, 0.0, 0.0])
    st_.set_edge(1, [0.0, 0.0, -10.0])  # v favours b = (1, 3)
    b, val = sg.cn_step(st_, 0, 0.1)
    assert b.tolist() == [1, 3] and val == -20.0
    np.testing.assert_allclose(st_.u, [[-9.9, 0, 0], [0, 0, -9.9]])
    assert st_.sums_drift() < 1e-12


def test_cn_step_zero_codeword_is_a_no_op():
    g = prepare(from_dense(Z4, [[1, 1]]))
    st_ = DualState.zeros(g, np.ones((2, 3)))
    st_.set_edge(0, [3.0, 3.0, 3.0])  # every nonzero label costs more than 0
    before = st_.u.copy()
    b, val = sg.cn_step(st_, 0, 0.5)
    assert b.tolist() == [0, 0] and val == 0.0
    assert np.array_equal(st_.u, before)


def test_vn_step_examples(graph52):
    llr = np.zeros((5, 3))
    llr[1] = (1.0, -2.0, 0.5)  # column 2 prefers symbol 2
    st_ = DualState.zeros(graph52, llr)
    c = OpCounter()
    a, val = sg.vn_step(st_, 1, 0.25, c)
    assert (a, val) == (2, -2.0)
    assert c.vn_updates == 1
    for e in graph52.col_edges[1]:
        assert st_.u[e].tolist() == [0.0, -0.25, 0.0]
    np.testing.assert_allclose(st_.u0[1], -llr[1])  # channel block untouched
    # ties go to the smallest symbol, here 0, which moves nothing
    st0 = DualState.zeros(graph52, np.zeros((5, 3)))
    assert sg.vn_step(st0, 0, 1.0) == (0, 0.0)
    assert not st0.u.any()


def test_dual_value_at_zero(graph52):
    st_ = DualState.zeros(graph52, FROZEN_LLR)
    expect = sum(min(0.0, row.min()) for row in FROZEN_LLR)
    assert sg.dual_value(st_) == pytest.approx(expect, abs=1e-12)


def test_dual_value_matches_enumeration(graph52, rng):
    for _ in range(20):
        st_ = DualState.from_duals(graph52, rng.normal(0, 2, (5, 3)), rng.normal(0, 1, (7, 3)))
        ref = sum(brute_vn_min(st_.column_blocks(i))[0] for i in range(5))
        ref += sum(brute_row_min(Z4, graph52.tanner.coeffs(j), st_.v_row(j))[0] for j in range(3))
        assert sg.dual_value(st_) == pytest.approx(ref, abs=1e-12)
        assert sg.dual_value(st_) == pytest.approx(dual_objective(st_, math.inf), abs=1e-12)


def test_weak_duality(H52, graph52, rng):
    for _ in range(20):
        llr = rng.normal(0, 2, (5, 3))
        ml = exhaustive_ml(H52, llr)
        cost = sum(llr[i, x - 1] for i, x in enumerate(ml) if x)
        st_ = DualState.zeros(graph52, llr)
        for theta in (0.15, 0.1, 0.05):
            for j in range(3):
                sg.cn_step(st_, j, theta)
            for i in range(5):
                sg.vn_step(st_, i, theta)
            assert sg.dual_value(st_) <= cost + 1e-9


# ------------------------------------------------------------- decoding

def test_config_validation():
    with pytest.raises(ValueError):
        sg.SubgradConfig(max_iters=0)
    with pytest.raises(ValueError):
        sg.SubgradConfig(early_stop_eps=-1.0)


def test_noiseless_decoding(H52, graph52):
    mod = psk(4)
    sigma = sigma_from_snr_db(10.0)
    for c in enumerate_code(H52):
        llr = llr_matrix(mod, mod.points[list(c)], sigma)
        res = sg.decode(graph52, llr)
        assert res.status is Status.CODEWORD
        assert res.symbols.tolist() == list(c)


def test_runs_to_max_iters_without_early_stop(graph52):
    res = sg.decode(graph52, np.zeros((5, 3)), sg.SubgradConfig(max_iters=13))
    assert res.status is Status.MAX_ITERS
    assert res.iterations == 13 and len(res.trace) == 13
    assert res.counters.viterbi_runs == 3 * 13
    assert res.counters.vn_updates == 5 * 13


def test_early_stop(graph52):
    res = sg.decode(graph52, np.zeros((5, 3)), sg.SubgradConfig(max_iters=50, early_stop_eps=1e-6))
    assert res.status is Status.EARLY_STOP
    assert res.iterations < 50
    assert abs(res.trace[-1] - res.trace[-2]) < 1e-6


def test_decoding_is_deterministic(graph52, rng):
    llr = rng.normal(0, 1, (5, 3))
    a = sg.decode(graph52, llr, sg.SubgradConfig(max_iters=40))
    b = sg.decode(graph52, llr, sg.SubgradConfig(max_iters=40))
    assert a.symbols.tolist() == b.symbols.tolist() and a.trace == b.trace


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_codeword_status_implies_valid_word(seed):
    from nblpdec.code import example_matrix

    H = example_matrix()
    llr = np.random.default_rng(seed).normal(0, 1.5, (5, 3))
    res = sg.decode(H, llr, sg.SubgradConfig(max_iters=20))
    if res.status is Status.CODEWORD:
        assert res.erasures == 0 and is_codeword(H, res.symbols)
