from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exact_t.phasepoly import (MonomialIndex, NonRealizablePhase, PhaseVecF2, ZetaPoly, build_phi,
                               monomial_count, parity_phase_f2, parity_phase_z8, reduce_f2, xor_lift)


def parity_value(mask: int, x: int) -> int:
    return bin(mask & x).count("1") & 1


def test_monomial_index_order():
    idx = MonomialIndex(3)
    assert idx.masks == (0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)
    assert idx.index(0b101) == 4
    with pytest.raises(KeyError):
        idx.index(0)


@pytest.mark.parametrize("n", range(1, 8))
def test_monomial_count(n):
    assert monomial_count(n) == len(MonomialIndex(n)) == sum(1 for d in (1, 2, 3) for _ in combinations(range(n), d))


def test_xor_lift_two_terms():
    # a xor b = a + b - 2ab
    assert xor_lift([0b01, 0b10]) == ZetaPoly({0b01: 1, 0b10: 1, 0b11: -2})


@pytest.mark.parametrize("mask", range(1, 64))
def test_parity_phase_matches_truth(mask):
    z = parity_phase_z8(mask)
    for x in range(64):
        assert z.evaluate(x) == parity_value(mask, x)


@pytest.mark.parametrize("mask", [0b111, 0b1011, 0b11111])
def test_parity_phase_closed_form_matches_lift(mask):
    bits = [1 << i for i in range(mask.bit_length()) if (mask >> i) & 1]
    assert parity_phase_z8(mask) == xor_lift(bits)


def test_reduce_f2_classes():
    idx = MonomialIndex(3)
    z = ZetaPoly({0b001: 3, 0b011: 2, 0b111: 4})
    assert reduce_f2(z, idx).monomials() == [0b001, 0b011, 0b111]
    assert not reduce_f2(ZetaPoly({0b001: 2, 0b011: 4}), idx)


def test_reduce_f2_rejects_bad_coefficients():
    idx = MonomialIndex(3)
    with pytest.raises(NonRealizablePhase):
        reduce_f2(ZetaPoly({0b011: 1}), idx)
    with pytest.raises(NonRealizablePhase):
        reduce_f2(ZetaPoly({0b111: 2}), idx)
    with pytest.raises(NonRealizablePhase):
        reduce_f2(ZetaPoly({0b1111: 4}), MonomialIndex(4))
    assert not reduce_f2(ZetaPoly({0b1111: 4}), MonomialIndex(4), strict=False)


def test_phi_n3_is_subset_inclusion():
    phi = build_phi(3)
    assert (phi.nrows, phi.ncols) == (7, 7)
    idx = MonomialIndex(3)
    for r, mono in enumerate(idx.masks):
        for k in range(1, 8):
            assert phi.to_lists()[r][k - 1] == int(mono & k == mono)
    assert phi.rank() == 7


@pytest.mark.parametrize("n,nullity", [(3, 0), (4, 1), (5, 6), (6, 22), (7, 64)])
def test_phi_full_row_rank(n, nullity):
    phi = build_phi(n)
    assert phi.rank() == phi.nrows
    assert phi.ncols - phi.rank() == nullity


def test_phi_over_limit():
    with pytest.raises(ValueError):
        build_phi(13)


def test_three_wire_phase_vector():
    # T on x1^x2 and on x1^x2^x3
    idx = MonomialIndex(3)
    total = parity_phase_z8(0b011) + parity_phase_z8(0b111)
    assert total == ZetaPoly({0b100: 1, 0b101: -2, 0b110: -2, 0b111: 4, 0b001: 2, 0b010: 2, 0b011: -4})
    assert reduce_f2(total, idx).monomials() == [0b100, 0b101, 0b110, 0b111]
    assert (parity_phase_f2(0b011, idx) ^ parity_phase_f2(0b111, idx)) == reduce_f2(total, idx)


@given(st.sets(st.integers(1, 31), max_size=8))
@settings(max_examples=80, deadline=None)
def test_sum_of_parities_reduces_like_phi(parities):
    idx = MonomialIndex(5)
    z = ZetaPoly()
    v = PhaseVecF2.zero(5)
    for p in parities:
        z = z + parity_phase_z8(p)
        v = v ^ parity_phase_f2(p, idx)
    assert reduce_f2(z, idx, strict=False) == v


@given(st.dictionaries(st.integers(0, 15), st.integers(0, 7)), st.integers(0, 15))
@settings(max_examples=80, deadline=None)
def test_multiplication_is_pointwise(coeffs, x):
    a = ZetaPoly(coeffs)
    b = ZetaPoly({m ^ 5: v for m, v in coeffs.items()})
    assert (a * b).evaluate(x) == a.evaluate(x) * b.evaluate(x) % 8
    assert (a + b).evaluate(x) == (a.evaluate(x) + b.evaluate(x)) % 8
