from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from sl2orbit.core import IDENTITY, NTuple, commutator, conjugate_tuple, random_sl2, random_tuple, trace_word
from sl2orbit.errors import CoordinateUnavailable, NotSL2
from sl2orbit.invariants import (
    delta,
    delta_root,
    fingerprint,
    fingerprint_size,
    fingerprint_words,
    fingerprints_match,
    gram,
    invariant_table,
    magnus_index,
    nu,
    nu_z,
    sigma,
    sigma_entries,
    sigma_sl2,
    sigma_z,
    tau,
    tau_entries,
    tau_z,
    vn_fingerprint,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)

# A1 = diag(2, 1), A2 = (1, 1; 0, 2), A3 = (1, 0; -1, 2)
TRIPLE = NTuple([np.diag([2, 1]), [[1, 1], [0, 2]], [[1, 0], [-1, 2]]])


def vn_tuple(n, seed):
    rng = np.random.default_rng(seed)
    return NTuple(rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2)))


# -- worked values ---------------------------------------------------------------

def test_tau_identity_is_zero():
    assert tau(NTuple([IDENTITY, IDENTITY]), 1, 2) == 0


def test_tau_derived_pair():
    assert tau(TRIPLE, 1, 2) == pytest.approx(-0.5)


def test_nu_values():
    assert nu(NTuple([IDENTITY]), 1) == 0
    assert nu(NTuple([np.diag([2, 0.5])]), 1) == pytest.approx(1.125)
    assert nu(NTuple([[[1, 1], [0, 1]]]), 1) == 0


def test_sigma_upper_pair_vanishes():
    assert sigma(NTuple([np.diag([2, 0.5]), [[1, 1], [0, 1]]]), 1, 2) == 0


def test_sigma_rotation_pair():
    A = NTuple([np.diag([2, 0.5]), [[0, 1], [-1, 0]]])
    assert sigma(A, 1, 2) == pytest.approx(2.25)
    assert trace_word(commutator([1], [2]), A) - 2 == pytest.approx(2.25)


def test_delta_derived_triple():
    # A1 A2 A3 = (0, 4; -2, 4) and A3 A2 A1 = (2, 1; -2, 3) by hand
    assert trace_word([1, 2, 3], TRIPLE) == pytest.approx(4)
    assert trace_word([3, 2, 1], TRIPLE) == pytest.approx(5)
    assert delta(TRIPLE, 1, 2, 3) == pytest.approx(1)
    assert delta_root(TRIPLE, 1, 2, 3) == pytest.approx(-1)
    # equals e1^2 b2^2 c3^2 with e1 = 1, b2 = 1, c3 = -1
    assert delta(TRIPLE, 1, 2, 3) == pytest.approx(1 * 1 * 1)
    for j, k in [(1, 2), (1, 3), (2, 3)]:
        assert sigma(TRIPLE, j, k) == pytest.approx(0)


def test_delta_repeated_index():
    A = random_tuple(3, 0)
    assert abs(delta(A, 1, 1, 2)) <= 1e-20
    assert abs(delta(A, 2, 3, 2)) <= 1e-20


def test_gram_identity_zero():
    assert_allclose(gram(NTuple([IDENTITY] * 3), 1, 2, 3), 0)


def test_index_errors():
    A = random_tuple(2, 0)
    with pytest.raises(IndexError):
        tau(A, 1, 3)
    with pytest.raises(IndexError):
        delta(A, 0, 1, 2)


# -- identities over random inputs ------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(seeds)
def test_sigma_forms_agree_sl2(seed):
    A = random_tuple(2, seed)
    s = sigma(A, 1, 2)
    comm = trace_word(commutator([1], [2]), A) - 2
    scale = max(1, abs(s), abs(comm))
    assert abs(s - comm) <= 1e-9 * scale
    assert abs(s - sigma_sl2(A, 1, 2)) <= 1e-9 * scale


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_entry_forms_agree(seed):
    A = vn_tuple(2, seed)
    assert abs(tau(A, 1, 2) - tau_entries(A, 1, 2)) <= 1e-10 * max(1, abs(tau(A, 1, 2)))
    assert abs(sigma(A, 1, 2) - sigma_entries(A, 1, 2)) <= 1e-9 * max(1, abs(sigma(A, 1, 2)))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_gram_minor_and_determinant(seed):
    A = random_tuple(3, seed)
    G = gram(A, 1, 2, 3)
    s, d = sigma(A, 1, 2), delta(A, 1, 2, 3)
    assert abs(np.linalg.det(G[:2, :2]) + s) <= 1e-9 * max(1, abs(s))
    assert abs(np.linalg.det(G) + d / 2) <= 1e-9 * max(1, abs(d), np.abs(G).max() ** 3)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_symmetries(seed):
    A = random_tuple(3, seed)
    assert sigma(A, 1, 2) == pytest.approx(sigma(A, 2, 1))
    for j in (1, 2, 3):
        assert abs(sigma(A, j, j)) <= 1e-12 * max(1, abs(nu(A, j)) ** 2)
    d = delta(A, 1, 2, 3)
    for p in permutations((1, 2, 3)):
        assert abs(delta(A, *p) - d) <= 1e-9 * max(1, abs(d))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_invariants_conjugation_invariant(seed):
    A = random_tuple(3, seed)
    B = conjugate_tuple(random_sl2(seed ^ 0x5A5A, 1)[0], A)
    for f, idx in ((tau, (1, 3)), (sigma, (2, 3)), (delta, (1, 2, 3))):
        a, b = f(A, *idx), f(B, *idx)
        assert abs(a - b) <= 1e-7 * max(1, abs(a))
    assert fingerprints_match(fingerprint(A), fingerprint(B))


# -- Magnus coordinate helpers ---------------------------------------------------------

def test_magnus_layout():
    assert [magnus_index(j) for j in (1, 2, 3, 4)] == [0, 1, 3, 6]
    assert [magnus_index(1, 2), magnus_index(1, 3), magnus_index(2, 3), magnus_index(2, 4)] == [2, 4, 5, 8]
    with pytest.raises(CoordinateUnavailable):
        magnus_index(3, 4)


def test_sigma_z_values():
    assert sigma_z([2] * 6, 1, 2) == 0
    assert sigma_z([0, 0, 0], 1, 2) == -4
    assert nu_z([2, 1, 0], 1) == 0
    with pytest.raises(CoordinateUnavailable):
        sigma_z([0] * 9, 3, 4)


def test_tau_z_matches_tau():
    from sl2orbit.magnus import forward_Tn

    A = random_tuple(4, 3)
    z = forward_Tn(A)
    assert tau_z(z, 2, 4) == pytest.approx(tau(A, 2, 4))
    assert sigma_z(z, 1, 2) == pytest.approx(sigma(A, 1, 2))


# -- fingerprints -------------------------------------------------------------------------

def test_fingerprint_sizes():
    assert fingerprint_size(2) == 3
    assert fingerprint_size(3) == 7
    for n in range(1, 7):
        assert len(fingerprint_words(n)) == fingerprint_size(n)
        assert len(fingerprint(random_tuple(n, n)).values) == fingerprint_size(n)


def test_fingerprint_identity():
    assert_allclose(fingerprint(NTuple([IDENTITY] * 3)).values, [2] * 7)


def test_fingerprint_order():
    A = random_tuple(4, 5)
    want = [trace_word(w, A) for w in fingerprint_words(4)]
    assert_allclose(fingerprint(A).values, want, rtol=1e-12)
    assert [str(w) for w in fingerprint_words(3)][3:] == ["e1 e2", "e1 e3", "e2 e3", "e1 e2 e3"]


def test_fingerprint_needs_sl2():
    with pytest.raises(NotSL2):
        fingerprint(NTuple([np.diag([2, 1])]))


def test_fingerprint_tolerance():
    a = np.array([1.0, 1e6])
    assert fingerprints_match(a, a + [5e-8, 5e-2])
    assert not fingerprints_match(a, a + [5e-7, 0])
    assert not fingerprints_match(a, a[:1])


def test_vn_fingerprint_counts_words():
    A = vn_tuple(3, 1)
    assert len(vn_fingerprint(A).values) == 3 + 9 + 27
    assert vn_fingerprint(A).values[3] == pytest.approx(trace_word([1, 1], A))


def test_invariant_table_keys():
    t = invariant_table(random_tuple(3, 2))
    assert set(t["sigma"]) == {"1,2", "1,3", "2,3"}
    assert set(t["delta"]) == {"1,2,3"}
    assert set(t["nu"]) == {"1", "2", "3"}
