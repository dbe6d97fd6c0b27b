import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from clustergen.basis import Spin1Basis, SpinBasis, build_fock_basis, spin1_embedding
from clustergen.hamiltonian import (
    DivergenceError,
    HubbardParams,
    build_fermi_hubbard_gauged,
    build_fermi_hubbard_literal,
    build_ising,
    build_spin1_hole,
    build_superexchange,
    cluster_time,
    j_zz,
    spin1_direct_tunneling,
    superexchange_2site_full,
    superexchange_2site_oracle,
    two_site_downfolding,
)
from clustergen.lattice import LatticeGeometry

P = HubbardParams(J=1.0, U=56.0, Omega=66.0, dimensionality=1)


def chain(L, periodic=False):
    return LatticeGeometry(
        extents=(L, 1, 1), boundary=("periodic" if periodic else "open", "open", "open")
    )


# spin-1/2 basis order of {uu, ud, du, dd} used by the analytic 4x4 matrices
PERM_2SITE = [3, 1, 2, 0]


def test_params_validation():
    with pytest.raises(ValueError):
        HubbardParams(J=-1.0, U=10.0, Omega=5.0)
    with pytest.raises(ValueError):
        HubbardParams(J=1.0, U=0.0, Omega=5.0)


def test_jzz_value_and_cluster_time():
    p = HubbardParams(J=1.0, U=40.0, Omega=50.0, dimensionality=1)
    assert j_zz(p) == pytest.approx(4 * 40 / (50**2 - 40**2))
    assert cluster_time(p) == pytest.approx(np.pi / j_zz(p))


def test_jzz_diverges_at_resonance():
    with pytest.raises(DivergenceError):
        j_zz(HubbardParams(J=1.0, U=50.0, Omega=50.0))


def test_downfolding_matches_oracle():
    assert np.max(np.abs(two_site_downfolding(P) - superexchange_2site_oracle(P))) < 1e-14


def test_superexchange_builder_matches_two_site_matrix():
    H = build_superexchange(chain(2), P, SpinBasis(2)).dense()
    ref = superexchange_2site_full(P)
    assert np.max(np.abs(H[np.ix_(PERM_2SITE, PERM_2SITE)] - ref)) < 1e-14


def test_fermi_hubbard_low_spectrum_matches_superexchange():
    basis = build_fock_basis(chain(2), 2)
    ev_fh = np.sort(np.linalg.eigvalsh(build_fermi_hubbard_gauged(chain(2), P, basis).dense()))
    ev_se = np.sort(np.linalg.eigvalsh(superexchange_2site_full(P)))
    # the four dressed singly-occupied levels, to second order in J
    picked = [ev for ev in ev_fh if min(abs(ev - e) for e in ev_se) < 0.01]
    assert len(picked) == 4


def test_gauged_and_literal_frames_are_isospectral():
    geom = chain(3)
    basis = build_fock_basis(geom, 3)
    ev_g = np.sort(np.linalg.eigvalsh(build_fermi_hubbard_gauged(geom, P, basis).dense()))
    ev_l = np.sort(np.linalg.eigvalsh(build_fermi_hubbard_literal(geom, P, basis).dense()))
    assert np.max(np.abs(ev_g - ev_l)) < 1e-10


def test_ising_is_diagonal_with_quarter_eigenvalues():
    geom = chain(4)
    H = build_ising(geom, 1.0, SpinBasis(4)).matrix
    off = H - sp.diags(H.diagonal())
    assert abs(off).max() == 0.0
    diag = H.diagonal().real
    assert np.allclose(diag * 4, np.round(diag * 4))


def test_spin1_hole_free_subspace_equals_spin_half():
    geom = chain(4)
    H_half = build_superexchange(geom, P, SpinBasis(4)).dense()
    H_s1 = build_spin1_hole(geom, P, Spin1Basis(4)).dense()
    idx = []
    for s in range(16):
        n = 0
        for j in range(4):
            n += (0 if (s >> j) & 1 else 2) * 3**j
        idx.append(n)
    diff = H_s1[np.ix_(idx, idx)] - H_half
    shift = diff[0, 0]
    assert np.max(np.abs(diff - shift * np.eye(16))) < 1e-12


def test_spin1_string_signs_match_one_hole_fermi_hubbard():
    # 2x2 lattice: vertical bonds have one mid-site, so the string is active
    geom = LatticeGeometry(extents=(2, 2, 1), tunneling_axes=("x", "y"))
    p = P.replaced(dimensionality=2)
    fock = build_fock_basis(geom, 3)
    s1 = Spin1Basis(4)
    fidx, sidx = spin1_embedding(fock, s1)
    H_fh = build_fermi_hubbard_gauged(geom, p, fock).matrix.tocsr()
    hop = (H_fh - sp.diags(H_fh.diagonal()))[np.ix_(fidx, fidx)].toarray()
    direct = spin1_direct_tunneling(geom, p, s1).matrix.tocsr()[np.ix_(sidx, sidx)].toarray()
    assert np.max(np.abs(hop - direct)) < 1e-12


def test_builders_are_hermitian():
    geom = chain(3)
    ops = [
        build_fermi_hubbard_gauged(geom, P, build_fock_basis(geom, 3)),
        build_superexchange(geom, P, SpinBasis(3)),
        build_spin1_hole(geom, P, Spin1Basis(3)),
    ]
    for op in ops:
        m = op.matrix
        assert abs(m - m.getH()).max() < 1e-12


@settings(deadline=None, max_examples=20)
@given(
    st.floats(20.0, 200.0),
    st.floats(1.1, 1.8),  # stay below the Omega = 2U denominator resonance
)
def test_downfolding_matches_oracle_randomized(U, ratio):
    p = HubbardParams(J=1.0, U=U, Omega=ratio * U, dimensionality=1)
    assert np.max(np.abs(two_site_downfolding(p) - superexchange_2site_oracle(p))) < 1e-12


def test_downfolding_rejects_averaged_denominator_resonance():
    p = HubbardParams(J=1.0, U=20.0, Omega=40.0, dimensionality=1)
    with pytest.raises(DivergenceError):
        two_site_downfolding(p)


@settings(deadline=None, max_examples=15)
@given(st.integers(3, 5), st.floats(30.0, 120.0))
def test_superexchange_diag_matches_bond_sum(L, U):
    """Ising eigenvalues of the zz-only model follow the bond/field bookkeeping."""
    p = HubbardParams(J=1.0, U=U, Omega=1.2 * U, dimensionality=1)
    geom = chain(L)
    basis = SpinBasis(L)
    H = build_superexchange(geom, p, basis, include_flip_flop=False).matrix
    diag = H.diagonal().real
    jzz = j_zz(p)
    bond_field = 2 * p.J**2 * p.Omega / (p.Omega**2 - p.U**2)
    for state in range(basis.dim):
        sz = [0.5 if (state >> j) & 1 else -0.5 for j in range(L)]
        expect = sum(
            jzz * (sz[a] * sz[b] + 0.25) + bond_field * (sz[a] + sz[b])
            for a, b in zip(range(L - 1), range(1, L))
        ) + p.Omega * sum(sz)
        assert diag[state] == pytest.approx(expect, abs=1e-12)
