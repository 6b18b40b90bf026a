import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nblpdec.algebra import build_ring
from nblpdec.code import (
    MatrixFormatError,
    ParityCheckMatrix,
    big_xi,
    build_tanner,
    dump_matrix,
    example_matrix,
    from_dense,
    inverse_xi,
    is_codeword,
    load_matrix,
    read_matrix,
    syndrome,
    xi,
)
from nblpdec.oracle import enumerate_code

Z4 = build_ring("Zq", 4)


def test_example_matrix_rows(H52):
    assert (H52.m, H52.n, H52.ring.token) == (3, 5, "Z4")
    assert H52.rows[0] == ((0, 1), (1, 3), (2, 1))
    assert H52.to_dense().tolist() == [[1, 3, 1, 0, 0], [0, 1, 0, 1, 0], [3, 0, 0, 0, 1]]


def test_tanner_index_sets(H52):
    T = build_tanner(H52)
    assert T.I[0] == (0, 1, 2)  # I_1 = {1, 2, 3}
    assert T.J[1] == (0, 1)  # J_2 = {1, 2}
    assert T.J[0] == (0, 2)
    assert T.degrees == (3, 2, 2) and T.d == 3
    assert T.edges == ((0, 0), (1, 0), (2, 0), (1, 1), (3, 1), (0, 2), (4, 2))
    assert T.coeffs(2) == (3, 1)


def test_tanner_trivial_shapes():
    T = build_tanner(from_dense(Z4, [[1]]))
    assert T.edges == ((0, 0),) and T.d == 1
    T = build_tanner(from_dense(Z4, [[1, 0], [0, 1]]))
    assert T.J == ((0,), (1,))


def test_syndrome_examples(H52):
    assert is_codeword(H52, [0] * 5)
    assert not syndrome(H52, [0] * 5).any()
    assert syndrome(H52, [1, 1, 0, 3, 1]).tolist() == [0, 0, 0]
    assert is_codeword(H52, [1, 1, 0, 3, 1])
    assert syndrome(H52, [1, 0, 0, 0, 0]).tolist() == [1, 0, 3]
    assert not is_codeword(H52, [1, 0, 0, 0, 0])


def test_syndrome_length_mismatch(H52):
    with pytest.raises(ValueError):
        syndrome(H52, [0, 0, 0])
    with pytest.raises(ValueError):
        syndrome(H52, [0, 0, 0, 0, 4])


@pytest.mark.parametrize(
    "text",
    [
        "",
        "Z4 0 3\n",
        "Z4 2 3\n1:1\n",  # row count mismatch
        "Z4 1 3\n\n",  # header without rows
        "Z4 1 3\n1:1 1:2\n",  # duplicate column
        "Z4 1 3\n1:0 2:1\n",  # zero coefficient listed
        "Z4 1 3\n1:4\n",  # coefficient outside the ring
        "Z4 1 3\n4:1\n",  # column out of range
        "Z4 1 3\n1-1\n",
        "Q4 1 1\n1:1\n",
        "Z4 1\n1:1\n",
    ],
)
def test_load_matrix_rejections(text):
    with pytest.raises(MatrixFormatError):
        load_matrix(text)


def test_load_matrix_comments_and_order():
    H = load_matrix("# comment\nGF8 1 4   # header\n4:3 1:2\n")
    assert H.rows == (((0, 2), (3, 3)),)
    assert H.ring.token == "GF8"


def test_direct_construction_validates():
    with pytest.raises(MatrixFormatError):
        ParityCheckMatrix(Z4, 1, 3, (((1, 1), (0, 1)),))


def test_dump_roundtrip(tmp_path, H52):
    p = tmp_path / "h.txt"
    p.write_text(dump_matrix(H52))
    assert read_matrix(p) == H52


def test_xi_examples():
    assert xi(Z4, 0).tolist() == [0, 0, 0]
    assert xi(Z4, 2).tolist() == [0, 1, 0]
    assert big_xi(Z4, (0, 3)).tolist() == [0, 0, 0, 0, 0, 1]
    assert inverse_xi(Z4, big_xi(Z4, (2, 0, 1, 3))).tolist() == [2, 0, 1, 3]
    with pytest.raises(ValueError):
        inverse_xi(Z4, [1, 1, 0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=7, max_size=7), st.integers(0, 7))
def test_selection_identity(block, r):
    ring = build_ring("GF", 3)
    x = np.array(block)
    expect = 0.0 if r == 0 else x[r - 1]
    assert float(x @ xi(ring, r)) == expect


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=5, max_size=5), st.lists(st.integers(0, 3), min_size=5, max_size=5))
def test_syndrome_linearity(c1, c2):
    H = example_matrix()
    s = H.ring.add_table[syndrome(H, c1), syndrome(H, c2)]
    total = H.ring.add_table[np.array(c1), np.array(c2)]
    assert np.array_equal(syndrome(H, total), s)


def test_codewords_closed_under_addition(H52):
    words = np.array(enumerate_code(H52))
    assert len(words) == 16
    add = H52.ring.add_table
    for a in words[::3]:
        for b in words[::5]:
            assert is_codeword(H52, add[a, b])
