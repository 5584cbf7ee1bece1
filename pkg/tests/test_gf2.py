from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exact_t.gf2 import (BitMatrix, BitVec, null_space_basis, rank_of_vectors, row_reduce, solve,
                         xor_assign)


def random_matrix(rng: random.Random, nrows: int, ncols: int, density: float = 0.5) -> BitMatrix:
    rows = []
    for _ in range(nrows):
        r = 0
        for j in range(ncols):
            if rng.random() < density:
                r |= 1 << j
        rows.append(r)
    return BitMatrix.from_rows(ncols, rows)


matrices = st.tuples(st.integers(1, 24), st.integers(1, 40), st.integers(0, 2**32)).map(
    lambda t: random_matrix(random.Random(t[2]), t[0], t[1], 0.4))


def test_bitvec_string_is_little_endian():
    v = BitVec.from_string("1101")
    assert v.to_list() == [1, 1, 0, 1]
    assert v.indices() == [0, 1, 3]
    assert v.popcount() == 3
    assert str(v) == "1101"


def test_bitvec_ops():
    a = BitVec.from_list([1, 0, 1, 1])
    b = BitVec.from_list([0, 1, 1, 0])
    assert (a ^ b).to_list() == [1, 1, 0, 1]
    assert (a & b).to_list() == [0, 0, 1, 0]
    assert a.dot(b) == 1
    assert not BitVec.zeros(5)


def test_xor_assign_length_mismatch():
    with pytest.raises(ValueError):
        xor_assign(BitVec.zeros(3), BitVec.zeros(4))


def test_identity_and_zero_rank():
    assert BitMatrix.identity(8).rank() == 8
    assert BitMatrix.zeros(4, 6).rank() == 0
    assert null_space_basis(BitMatrix.identity(5)) == []
    assert len(null_space_basis(BitMatrix.zeros(3, 4))) == 4


def test_duplicate_rows_rank():
    m = BitMatrix.from_lists([[1, 0, 1], [1, 0, 1], [0, 1, 1]])
    assert m.rank() == 2


def test_inconsistent_system_has_no_solution():
    a = BitMatrix.from_lists([[1, 1], [1, 1]])
    assert solve(a, BitVec.from_list([1, 0])) is None


def test_row_reduce_is_reduced_echelon():
    rng = random.Random(3)
    for _ in range(20):
        a = random_matrix(rng, 10, 14)
        r, pivots = row_reduce(a)
        assert len(pivots) == a.rank()
        for i, p in enumerate(pivots):
            assert r.column(p).indices() == [i]


def test_transpose_matmul():
    rng = random.Random(5)
    a = random_matrix(rng, 6, 9)
    b = random_matrix(rng, 9, 4)
    assert a.matmul(b).transpose().to_lists() == b.transpose().matmul(a.transpose()).to_lists()


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_rank_nullity(a):
    assert a.rank() + len(null_space_basis(a)) == a.ncols


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_null_basis_annihilated_and_independent(a):
    basis = null_space_basis(a)
    for v in basis:
        assert not a.matvec(v)
    assert rank_of_vectors([v.bits for v in basis], a.ncols) == len(basis)


@given(matrices, st.integers(0, 2**64))
@settings(max_examples=60, deadline=None)
def test_solve_consistent_rhs(a, seed):
    rng = random.Random(seed)
    x = BitVec(a.ncols, rng.getrandbits(a.ncols))
    b = a.matvec(x)
    got = solve(a, b)
    assert got is not None
    assert a.matvec(got) == b


@given(matrices)
@settings(max_examples=40, deadline=None)
def test_rank_of_transpose(a):
    assert a.rank() == a.transpose().rank()
