"""Product and quotient rule identities for the derivation and the
difference operators, checked on random decay instances."""

import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from decayinv import (IndexWindow, geometric_inverse_toeplitz,
                      invert_truncated, make_toeplitz, random_decay_matrix,
                      verify_identity, ToeplitzSymbol)
from decayinv.quotient import (IDENTITIES, compositions,
                               derivation_quotient_rhs, multinomial)
from decayinv.lattice import derivation_power, matmul

W = IndexWindow(-16, 15)


def instance(idx=0, r=2.0, eps=0.3):
    A = random_decay_matrix(W, r, eps, seed=[99, idx])
    return A, invert_truncated(A)


def test_composition_counts():
    assert compositions(4, 2) == [(1, 3), (2, 2), (3, 1)]
    assert compositions(3, 4) == []
    assert len(compositions(8, 3)) == math.comb(7, 2)


@seed(11)
@settings(max_examples=30, deadline=None)
@given(k=st.integers(min_value=1, max_value=10),
       m=st.integers(min_value=1, max_value=10))
def test_composition_count_formula(k, m):
    got = compositions(k, m)
    assert len(got) == (math.comb(k - 1, m - 1) if k >= m else 0)
    assert all(sum(p) == k and len(p) == m and min(p) >= 1 for p in got)
    assert len(set(got)) == len(got)


def test_multinomial_values():
    assert multinomial(4, (1, 3)) == 4
    assert multinomial(4, (2, 2)) == 6
    assert multinomial(6, (1, 2, 3)) == 60


def test_derivation_quotient_small_k_by_hand():
    # k = 1: D(A^{-1}) = -A^{-1} D(A) A^{-1}
    A, inv = instance(0)
    rhs = derivation_quotient_rhs(A, inv, 1)
    manual = -matmul(matmul(inv, derivation_power(A, 1)), inv).entries
    assert np.max(np.abs(rhs.entries - manual)) < 1e-14


@pytest.mark.parametrize("identity", IDENTITIES)
def test_identities_hold_to_roundoff(identity):
    A, inv = instance(1)
    B, _ = instance(2)
    for k in (1, 2, 4):
        res = verify_identity(A, identity, k, t=0.23, B=B, Ainv=inv,
                              margin=4)
        assert res["max_rel_err"] < 1e-12, (identity, k, res)


def test_identity_error_small_even_at_k8():
    A, inv = instance(3)
    res = verify_identity(A, "derivation_quotient", 8, Ainv=inv, margin=8)
    assert res["max_rel_err"] < 1e-9


def test_identities_on_toeplitz_resolvent():
    gamma = 0.5
    x = math.exp(-gamma)
    A = make_toeplitz(ToeplitzSymbol({0: 1.0, 1: -x}), W)
    inv = geometric_inverse_toeplitz(gamma, W)
    for identity in IDENTITIES:
        res = verify_identity(A, identity, 3, t=0.37, B=A, Ainv=inv,
                              margin=8)
        assert res["max_rel_err"] < 1e-12, identity


def test_verify_identity_result_fields():
    A, inv = instance(4)
    res = verify_identity(A, "telescoping", 2, t=0.11, Ainv=inv, margin=4)
    assert res["identity"] == "telescoping"
    assert res["k"] == 2 and res["t"] == 0.11
    assert res["max_abs_err"] <= res["scale"] * res["max_rel_err"] * (1 + 1e-12)


def test_verify_identity_rejects_unknown():
    A, inv = instance(5)
    with pytest.raises(ValueError):
        verify_identity(A, "nope", 1, Ainv=inv)
