import numpy as np
import pytest
from hypothesis import given, strategies as st

from clustergen.basis import (
    DOWN,
    UP,
    FockBasis,
    Spin1Basis,
    SpinBasis,
    apply_fermion,
    build_fock_basis,
    has_doublon,
    is_singly_occupied,
    orbital,
    spin1_embedding,
    spin_half_embedding,
)
from clustergen.lattice import LatticeGeometry

from math import comb


def chain(L):
    return LatticeGeometry(extents=(L, 1, 1))


def test_fock_dimension():
    basis = build_fock_basis(chain(4), 4)
    assert basis.dim == comb(8, 4)


def test_index_roundtrip():
    basis = build_fock_basis(chain(3), 3)
    for i, st_ in enumerate(basis.states):
        assert basis.index_of(int(st_)) == i


def test_occupation_counts():
    basis = build_fock_basis(chain(3), 2)
    for st_ in basis.states:
        st_ = int(st_)
        assert bin(st_).count("1") == 2


def test_apply_fermion_pauli_blocking():
    # creating on an occupied orbital annihilates the state
    state = 1 << orbital(0, UP)
    assert apply_fermion(state, "create", 0, UP) is None
    assert apply_fermion(0, "annihilate", 0, UP) is None


def test_apply_fermion_sign_convention():
    # creating below an occupied orbital picks up no sign; above counts occupied
    state = 1 << orbital(0, UP)  # orbital 0 occupied
    new, sign = apply_fermion(state, "create", 0, DOWN)  # orbital 1, one below it occupied
    assert sign == -1
    assert new == state | (1 << orbital(0, DOWN))
    new2, sign2 = apply_fermion(1 << orbital(1, UP), "create", 0, UP)
    assert sign2 == 1


@given(st.integers(0, 2**8 - 1), st.integers(0, 3), st.sampled_from([UP, DOWN]))
def test_create_annihilate_are_adjoint(state, site, spin):
    created = apply_fermion(state, "create", site, spin)
    if created is None:
        return
    new, sign = created
    back, sign_back = apply_fermion(new, "annihilate", site, spin)
    assert back == state
    assert sign * sign_back == 1


@given(
    st.integers(0, 2**8 - 1),
    st.tuples(st.integers(0, 3), st.sampled_from([UP, DOWN])),
    st.tuples(st.integers(0, 3), st.sampled_from([UP, DOWN])),
)
def test_anticommutation_of_creation_ops(state, orb_a, orb_b):
    """c+_a c+_b = -c+_b c+_a on any state where both succeed."""
    if orb_a == orb_b:
        return

    def create2(st_, first, second):
        step = apply_fermion(st_, "create", *first)
        if step is None:
            return None
        mid, s1 = step
        step = apply_fermion(mid, "create", *second)
        if step is None:
            return None
        return step[0], s1 * step[1]

    ab = create2(state, orb_a, orb_b)
    ba = create2(state, orb_b, orb_a)
    if ab is None or ba is None:
        assert ab is None and ba is None
        return
    assert ab[0] == ba[0]
    assert ab[1] == -ba[1]


def test_is_singly_occupied_and_doublon():
    up0_dn1 = (1 << orbital(0, UP)) | (1 << orbital(1, DOWN))
    doublon = (1 << orbital(0, UP)) | (1 << orbital(0, DOWN))
    assert is_singly_occupied(up0_dn1, 2)
    assert not has_doublon(up0_dn1, 2)
    assert has_doublon(doublon, 2)
    assert not is_singly_occupied(doublon, 2)


def test_spin_half_embedding_covers_singly_occupied():
    basis = build_fock_basis(chain(3), 3)
    spins = SpinBasis(3)
    emb = spin_half_embedding(basis, spins)
    assert len(emb) == 2**3
    for spin_idx, fock_idx in enumerate(emb):
        assert is_singly_occupied(int(basis.states[fock_idx]), 3)


def test_spin_half_embedding_requires_half_filling():
    basis = build_fock_basis(chain(3), 2)
    with pytest.raises(ValueError):
        spin_half_embedding(basis, SpinBasis(3))


def test_spin1_embedding_is_doublon_free():
    basis = build_fock_basis(chain(3), 2)
    s1 = Spin1Basis(3)
    fidx, sidx = spin1_embedding(basis, s1)
    assert len(fidx) == len(sidx)
    for f in fidx:
        assert not has_doublon(int(basis.states[f]), 3)
    # one hole on 3 sites: 3 positions x 2^2 spin configurations
    assert len(fidx) == 3 * 4


def test_spin1_basis_digits():
    basis = Spin1Basis(2)
    assert basis.dim == 9
    # index 5 = digits (2, 1): site 0 m=-1, site 1 hole
    assert basis.digit(5, 0) == 2
    assert basis.digit(5, 1) == 1
