"""Model Hamiltonians as sparse Hermitian operators.

Builders: the gauged-frame Fermi-Hubbard (spin-flipping tunneling, uniform
drive), the lab-frame Fermi-Hubbard (spin-conserving tunneling, staggered
drive), the spin-1/2 superexchange model, the ideal Ising model, the spin-1
hole model with fermionic string factors, and the analytic two-site
superexchange matrix used as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .basis import (
    DOWN,
    UP,
    FockBasis,
    Spin1Basis,
    SpinBasis,
    apply_fermion,
)
from .lattice import LatticeGeometry, mid_sites, neighbor_pairs, stagger_sign
from .operators import OperatorError, SparseHermitianOperator, site_spin_matrix


class DivergenceError(ValueError):
    """Superexchange formulas diverge at Omega = U."""


@dataclass(frozen=True)
class HubbardParams:
    """Energy scales in angular-frequency units (hbar = 1)."""

    J: float
    U: float
    Omega: float
    dimensionality: int = 1

    def __post_init__(self):
        if self.J <= 0:
            raise ValueError(f"J must be positive, got {self.J}")
        if self.U <= 0:
            raise ValueError(f"U must be positive, got {self.U}")
        if self.Omega < 0:
            raise ValueError(f"Omega must be non-negative, got {self.Omega}")
        if self.dimensionality < 1:
            raise ValueError("dimensionality must be a positive integer")

    def replaced(self, **kw) -> "HubbardParams":
        return replace(self, **kw)

    @staticmethod
    def for_geometry(geom: LatticeGeometry, J: float, U: float, Omega: float):
        return HubbardParams(J=J, U=U, Omega=Omega, dimensionality=geom.dimensionality)


def _guard_divergence(params: HubbardParams):
    if params.Omega == params.U:
        raise DivergenceError("Omega = U: superexchange coupling diverges")


def j_zz(params: HubbardParams) -> float:
    """Ising coupling 4 J^2 U / (Omega^2 - U^2); positive for Omega > U."""
    _guard_divergence(params)
    return 4.0 * params.J**2 * params.U / (params.Omega**2 - params.U**2)


def cluster_time(params: HubbardParams) -> float:
    """Time pi / |J_zz| at which the Ising phase gates complete."""
    return math.pi / abs(j_zz(params))


# ---------------------------------------------------------------------------
# Fermi-Hubbard builders

def _check_fock(geom: LatticeGeometry, basis: FockBasis):
    if basis.geometry != geom:
        raise OperatorError("basis was built for a different geometry")


def _hubbard_matrix(geom, params, basis, gauged: bool) -> sp.csr_matrix:
    bonds = neighbor_pairs(geom)
    dim = basis.dim
    rows, cols, vals = [], [], []
    diag = np.zeros(dim, dtype=np.complex128)
    if gauged:
        signs = None
    else:
        signs = [stagger_sign(geom, s) for s in range(geom.site_count)]

    # tunneling: gauged frame flips the spin label with amplitude +J,
    # the lab frame conserves it with amplitude -J
    hops = []
    for (a, b) in bonds:
        if gauged:
            hops += [
                (a, UP, b, DOWN),
                (a, DOWN, b, UP),
                (b, UP, a, DOWN),
                (b, DOWN, a, UP),
            ]
        else:
            hops += [
                (a, UP, b, UP),
                (a, DOWN, b, DOWN),
                (b, UP, a, UP),
                (b, DOWN, a, DOWN),
            ]
    amp = params.J if gauged else -params.J

    for i, st in enumerate(basis.states):
        st = int(st)
        for dst_site, dst_spin, src_site, src_spin in hops:
            step = apply_fermion(st, "annihilate", src_site, src_spin)
            if step is None:
                continue
            mid, s1 = step
            step = apply_fermion(mid, "create", dst_site, dst_spin)
            if step is None:
                continue
            new, s2 = step
            rows.append(basis.index_of(new))
            cols.append(i)
            vals.append(amp * s1 * s2)
        for j in range(geom.site_count):
            n_up = (st >> (2 * j)) & 1
            n_dn = (st >> (2 * j + 1)) & 1
            diag[i] += params.U * n_up * n_dn
            drive = 0.5 * params.Omega * (n_up - n_dn)
            diag[i] += drive if gauged else signs[j] * drive
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    return mat + sp.diags(diag).tocsr()


def build_fermi_hubbard_gauged(
    geom: LatticeGeometry, params: HubbardParams, basis: FockBasis
) -> SparseHermitianOperator:
    """Gauged-frame Fermi-Hubbard: spin-flip tunneling, uniform drive."""
    _check_fock(geom, basis)
    return SparseHermitianOperator(basis, _hubbard_matrix(geom, params, basis, gauged=True))


def build_fermi_hubbard_literal(
    geom: LatticeGeometry, params: HubbardParams, basis: FockBasis
) -> SparseHermitianOperator:
    """Lab-frame Fermi-Hubbard: spin-conserving tunneling, staggered drive."""
    _check_fock(geom, basis)
    return SparseHermitianOperator(basis, _hubbard_matrix(geom, params, basis, gauged=False))


# ---------------------------------------------------------------------------
# spin models

def build_superexchange(
    geom: LatticeGeometry,
    params: HubbardParams,
    basis: SpinBasis,
    include_flip_flop: bool = True,
) -> SparseHermitianOperator:
    """Spin-1/2 superexchange model.

    Per bond: J_zz (Sz_a Sz_b + 1/4) plus the drive-dressing field
    (2 J^2 Omega / (Omega^2 - U^2)) (Sz_a + Sz_b); per site the bare drive
    Omega Sz.  On a bulk site with coordination 2D this reproduces the
    uniform field Omega + D * 4 J^2 Omega / (Omega^2 - U^2).  With
    ``include_flip_flop`` the equal-spin pair term
    (2 J^2 / U)(S+ S+ + S- S-) is added per bond.  Entrywise equal to the
    downfolded two-site oracle on a single bond.
    """
    _guard_divergence(params)
    if basis.n_sites != geom.site_count:
        raise OperatorError("spin basis size does not match geometry")
    L = geom.site_count
    dim = basis.dim
    states = np.arange(dim, dtype=np.int64)
    sz = [np.where((states >> j) & 1 == 1, 0.5, -0.5) for j in range(L)]
    jzz = j_zz(params)
    bond_field = 2.0 * params.J**2 * params.Omega / (params.Omega**2 - params.U**2)
    diag = np.zeros(dim)
    for a, b in neighbor_pairs(geom):
        diag += jzz * (sz[a] * sz[b] + 0.25)
        diag += bond_field * (sz[a] + sz[b])
    for j in range(L):
        diag += params.Omega * sz[j]
    mat = sp.diags(diag.astype(np.complex128)).tocsr()
    if include_flip_flop:
        coeff = 2.0 * params.J**2 / params.U
        for a, b in neighbor_pairs(geom):
            sp_a = site_spin_matrix(basis, a, "+")
            sp_b = site_spin_matrix(basis, b, "+")
            pair = sp_a @ sp_b
            mat = mat + coeff * (pair + pair.getH())
    return SparseHermitianOperator(basis, mat)


def build_ising(
    geom: LatticeGeometry, coupling: float, basis: SpinBasis
) -> SparseHermitianOperator:
    """Ideal Ising model: coupling * sum over bonds of Sz Sz (diagonal)."""
    if basis.n_sites != geom.site_count:
        raise OperatorError("spin basis size does not match geometry")
    states = np.arange(basis.dim, dtype=np.int64)
    diag = np.zeros(basis.dim)
    for a, b in neighbor_pairs(geom):
        sza = np.where((states >> a) & 1 == 1, 0.5, -0.5)
        szb = np.where((states >> b) & 1 == 1, 0.5, -0.5)
        diag += coupling * sza * szb
    return SparseHermitianOperator(basis, sp.diags(diag.astype(np.complex128)).tocsr())


# ---------------------------------------------------------------------------
# two-site analytics

def superexchange_2site_oracle(params: HubbardParams) -> np.ndarray:
    """Analytic two-site effective Hamiltonian on {up-up, up-dn, dn-up, dn-dn}.

    Corner entries 2J^2/(Omega-U), 2J^2/U, 2J^2/U, -2J^2/(Omega+U); all
    other entries vanish.
    """
    _guard_divergence(params)
    J, U, W = params.J, params.U, params.Omega
    mat = np.zeros((4, 4))
    mat[0, 0] = 2.0 * J**2 / (W - U)
    mat[3, 3] = -2.0 * J**2 / (W + U)
    mat[0, 3] = mat[3, 0] = 2.0 * J**2 / U
    return mat


def superexchange_2site_full(params: HubbardParams) -> np.ndarray:
    """Two-site superexchange including the bare drive field Omega(Sz1+Sz2)."""
    mat = superexchange_2site_oracle(params).astype(complex)
    # Sz1 + Sz2 is diagonal (1, 0, 0, -1) in the ordered two-site basis
    mat += params.Omega * np.diag([1.0, 0.0, 0.0, -1.0])
    return mat


def two_site_downfolding(params: HubbardParams) -> np.ndarray:
    """Second-order downfolding of the L=2 gauged Fermi-Hubbard model.

    Projects the tunneling onto the doublon manifold and divides by the
    energy denominators (E_i + E_j)/2 - U; independent numerical route to
    the analytic two-site matrix.
    """
    _guard_divergence(params)
    if abs(params.Omega - 2.0 * params.U) < 1e-9 * params.U:
        # (E_uu + E_ud)/2 - U = Omega/2 - U vanishes: the averaged-energy
        # denominator is resonant even though no single state is
        raise DivergenceError("Omega = 2U: averaged energy denominator vanishes")
    geom = LatticeGeometry(extents=(2, 1, 1), tunneling_axes=("x",))
    basis = FockBasis(geometry=geom, n_particles=2)
    H = build_fermi_hubbard_gauged(geom, params, basis).dense()
    diag = np.real(np.diag(H))
    H_J = H - np.diag(np.diag(H))
    # ordered singly-occupied manifold and the two doublons (bitmask from
    # orbital(site, spin) = 2*site + spin, up = 0)
    e0_masks = [0b0101, 0b1001, 0b0110, 0b1010]  # uu, ud, du, dd
    eu_masks = [0b0011, 0b1100]
    e0 = [basis.index_of(m) for m in e0_masks]
    eu = [basis.index_of(m) for m in eu_masks]
    out = np.zeros((4, 4), dtype=complex)
    for a, i in enumerate(e0):
        for b, j in enumerate(e0):
            for k in eu:
                denom = 0.5 * (diag[i] + diag[j]) - params.U
                out[a, b] += H_J[i, k] * H_J[k, j] / denom
    return out


# ---------------------------------------------------------------------------
# spin-1 hole model

_SQ2 = math.sqrt(2.0)
_S1_Z = np.diag([1.0, 0.0, -1.0])
_S1_P = _SQ2 * np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float)
_S1_M = _S1_P.T


def _transitions(mat3: np.ndarray):
    out = []
    for new in range(3):
        for old in range(3):
            if mat3[new, old] != 0.0:
                out.append((new, old, mat3[new, old]))
    return out


def _spin1_two_site_term(
    basis: Spin1Basis,
    j: int,
    k: int,
    mat_j: np.ndarray,
    mat_k: np.ndarray,
    mids: list[int],
    coeff: float,
):
    """COO triplets of coeff * M_j (x) M_k dressed by the mid-site string."""
    dim = basis.dim
    states = np.arange(dim, dtype=np.int64)
    dj = (states // 3**j) % 3
    dk = (states // 3**k) % 3
    if mids:
        parity = np.zeros(dim, dtype=np.int64)
        for p in mids:
            parity += ((states // 3**p) % 3 != 1).astype(np.int64)
        string = np.where(parity % 2 == 1, -1.0, 1.0)
    else:
        string = np.ones(dim)
    rows, cols, vals = [], [], []
    for nj, oj, aj in _transitions(mat_j):
        for nk, ok, ak in _transitions(mat_k):
            mask = (dj == oj) & (dk == ok)
            if not mask.any():
                continue
            src = states[mask]
            dst = src + (nj - oj) * 3**j + (nk - ok) * 3**k
            rows.append(dst)
            cols.append(src)
            vals.append(coeff * aj * ak * string[mask])
    if not rows:
        return np.array([]), np.array([]), np.array([])
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def build_spin1_hole(
    geom: LatticeGeometry, params: HubbardParams, basis: Spin1Basis
) -> SparseHermitianOperator:
    """Spin-1 model for a doped lattice: holes are the m_s = 0 state.

    Direct tunneling carries the diagonal string factor that counts
    particles between the bond endpoints in the Fock ordering, restoring
    fermionic statistics.  The bare drive (Omega/2) * sum of Sigma^z is
    included so the hole-free restriction reproduces the spin-1/2
    superexchange model including its field term.
    """
    _guard_divergence(params)
    if basis.n_sites != geom.site_count:
        raise OperatorError("spin-1 basis size does not match geometry")
    J, U, W = params.J, params.U, params.Omega
    dim = basis.dim
    rows, cols, vals = [], [], []

    def add(r, c, v):
        if len(r):
            rows.append(r)
            cols.append(c)
            vals.append(v)

    zz = _S1_Z
    z2 = _S1_Z @ _S1_Z
    for a, b in neighbor_pairs(geom):
        mids = mid_sites(geom, a, b)
        # direct tunneling; sign chosen to reproduce the +J first-order
        # hopping amplitude of the gauged Fermi-Hubbard model
        for mat_a, mat_b in (
            (zz @ _S1_P, _S1_P @ zz),
            (zz @ _S1_M, _S1_M @ zz),
        ):
            r, c, v = _spin1_two_site_term(basis, a, b, mat_a, mat_b, mids, -0.5 * J)
            add(r, c, v)
            r, c, v = _spin1_two_site_term(
                basis, a, b, mat_a.conj().T, mat_b.conj().T, mids, -0.5 * J
            )
            add(r, c, v)
        # equal-spin pair flip (superexchange, no string needed)
        pp = _S1_P @ _S1_P
        for mat_a, mat_b in ((pp, pp), (pp.T, pp.T)):
            r, c, v = _spin1_two_site_term(basis, a, b, mat_a, mat_b, [], J**2 / (2.0 * U))
            add(r, c, v)
        # diagonal interaction block
        denom = W**2 - U**2
        for mat_a, mat_b, coeff in (
            (zz, zz, U * J**2 / denom),
            (z2, z2, U * J**2 / denom),
            (z2, zz, W * J**2 / denom),
            (zz, z2, W * J**2 / denom),
        ):
            r, c, v = _spin1_two_site_term(basis, a, b, mat_a, mat_b, [], coeff)
            add(r, c, v)
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    # bare drive, kept from the original Hamiltonian
    states = np.arange(dim, dtype=np.int64)
    drive = np.zeros(dim)
    for j in range(geom.site_count):
        dj = (states // 3**j) % 3
        drive += 0.5 * W * np.where(dj == 0, 1.0, np.where(dj == 2, -1.0, 0.0))
    mat = mat + sp.diags(drive.astype(np.complex128)).tocsr()
    return SparseHermitianOperator(basis, mat)


def spin1_direct_tunneling(
    geom: LatticeGeometry, params: HubbardParams, basis: Spin1Basis
) -> SparseHermitianOperator:
    """Only the string-dressed direct-tunneling part of the spin-1 model."""
    if basis.n_sites != geom.site_count:
        raise OperatorError("spin-1 basis size does not match geometry")
    J = params.J
    dim = basis.dim
    rows, cols, vals = [], [], []
    zz = _S1_Z
    for a, b in neighbor_pairs(geom):
        mids = mid_sites(geom, a, b)
        for mat_a, mat_b in (
            (zz @ _S1_P, _S1_P @ zz),
            (zz @ _S1_M, _S1_M @ zz),
        ):
            for ma, mb in ((mat_a, mat_b), (mat_a.conj().T, mat_b.conj().T)):
                r, c, v = _spin1_two_site_term(basis, a, b, ma, mb, mids, -0.5 * J)
                if len(r):
                    rows.append(r)
                    cols.append(c)
                    vals.append(v)
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return SparseHermitianOperator(basis, mat)
