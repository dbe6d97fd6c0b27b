"""Sparse Hermitian operators over a basis, plus per-site spin operators.

All Hamiltonians and observables are ``SparseHermitianOperator`` instances.
Site spin operators dispatch on the basis type:

* spin-1/2 basis: the usual Pauli/2 matrices;
* Fock basis: fermionic bilinears (holes and doublons contribute zero);
* spin-1 basis: the spin-1/2 algebra embedded in the m_s = +-1 subspace,
  zero on the m_s = 0 (hole) state.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .basis import DOWN, UP, FockBasis, Spin1Basis, SpinBasis, apply_fermion

DENSE_DIM_LIMIT = 4096
HERMITICITY_RTOL = 1e-12


class OperatorError(ValueError):
    """Basis mismatch or non-Hermitian construction."""


class SparseHermitianOperator:
    """Sparse Hermitian matrix tied to a basis.

    Immutable after construction; matrix-vector products are safe to run
    concurrently from several evolution loops.
    """

    def __init__(self, basis, matrix, check: bool = True):
        matrix = sp.csr_matrix(matrix, dtype=np.complex128)
        if matrix.shape != (basis.dim, basis.dim):
            raise OperatorError(
                f"matrix shape {matrix.shape} does not match basis dim {basis.dim}"
            )
        if check:
            scale = abs(matrix).max() if matrix.nnz else 0.0
            dev = abs(matrix - matrix.getH()).max() if matrix.nnz else 0.0
            if dev > HERMITICITY_RTOL * max(scale, 1.0):
                raise OperatorError(
                    f"matrix is not Hermitian: max|H - H^| = {dev:.3e}"
                )
        self.basis = basis
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def expectation(self, vec: np.ndarray) -> complex:
        return complex(np.vdot(vec, self.matrix @ vec))

    def dense(self, force: bool = False) -> np.ndarray:
        if self.dim > DENSE_DIM_LIMIT and not force:
            raise OperatorError(
                f"refusing to densify dimension {self.dim} > {DENSE_DIM_LIMIT}"
            )
        return self.matrix.toarray()

    def _require_same_basis(self, other: "SparseHermitianOperator"):
        if self.basis is not other.basis and self.basis != other.basis:
            raise OperatorError("operators live on different bases")

    def __add__(self, other):
        self._require_same_basis(other)
        return SparseHermitianOperator(self.basis, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        self._require_same_basis(other)
        return SparseHermitianOperator(self.basis, self.matrix - other.matrix, check=False)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return SparseHermitianOperator(self.basis, self.matrix * scalar, check=False)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# spin-1/2 basis site operators (vectorized over the 2^L states)

def _spin_half_site_matrix(basis: SpinBasis, site: int, axis: str) -> sp.csr_matrix:
    dim = basis.dim
    states = np.arange(dim, dtype=np.int64)
    bit = (states >> site) & 1
    if axis == "z":
        return sp.diags(np.where(bit == 1, 0.5, -0.5).astype(np.complex128)).tocsr()
    flipped = states ^ (1 << site)
    if axis == "x":
        vals = np.full(dim, 0.5, dtype=np.complex128)
    elif axis == "y":
        # <up|Sy|down> = -i/2, <down|Sy|up> = +i/2
        vals = np.where(bit == 0, -0.5j, 0.5j).astype(np.complex128)
    elif axis == "+":
        keep = bit == 0
        return sp.csr_matrix(
            (np.ones(keep.sum(), dtype=np.complex128), (flipped[keep], states[keep])),
            shape=(dim, dim),
        )
    elif axis == "-":
        keep = bit == 1
        return sp.csr_matrix(
            (np.ones(keep.sum(), dtype=np.complex128), (flipped[keep], states[keep])),
            shape=(dim, dim),
        )
    else:
        raise ValueError(f"axis must be x|y|z|+|-, got {axis!r}")
    return sp.csr_matrix((vals, (flipped, states)), shape=(dim, dim))


# ---------------------------------------------------------------------------
# Fock basis site operators (fermionic bilinears)

def _fock_site_matrix(basis: FockBasis, site: int, axis: str) -> sp.csr_matrix:
    dim = basis.dim
    if axis == "z":
        diag = np.zeros(dim, dtype=np.complex128)
        for i, st in enumerate(basis.states):
            st = int(st)
            diag[i] = 0.5 * (
                ((st >> (2 * site)) & 1) - ((st >> (2 * site + 1)) & 1)
            )
        return sp.diags(diag).tocsr()
    rows, cols, vals = [], [], []

    def add_bilinear(create_spin, annihilate_spin, coeff):
        for i, st in enumerate(basis.states):
            step = apply_fermion(int(st), "annihilate", site, annihilate_spin)
            if step is None:
                continue
            mid, s1 = step
            step = apply_fermion(mid, "create", site, create_spin)
            if step is None:
                continue
            new, s2 = step
            rows.append(basis.index_of(new))
            cols.append(i)
            vals.append(coeff * s1 * s2)

    if axis == "x":
        add_bilinear(UP, DOWN, 0.5)
        add_bilinear(DOWN, UP, 0.5)
    elif axis == "y":
        add_bilinear(UP, DOWN, -0.5j)
        add_bilinear(DOWN, UP, 0.5j)
    elif axis == "+":
        add_bilinear(UP, DOWN, 1.0)
    elif axis == "-":
        add_bilinear(DOWN, UP, 1.0)
    else:
        raise ValueError(f"axis must be x|y|z|+|-, got {axis!r}")
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


# ---------------------------------------------------------------------------
# spin-1 basis: spin-1/2 algebra embedded in the m_s = +-1 subspace

def _spin1_site_matrix(basis: Spin1Basis, site: int, axis: str) -> sp.csr_matrix:
    dim = basis.dim
    states = np.arange(dim, dtype=np.int64)
    digit = (states // 3 ** site) % 3  # 0:+1, 1:hole, 2:-1
    if axis == "z":
        diag = np.where(digit == 0, 0.5, np.where(digit == 2, -0.5, 0.0))
        return sp.diags(diag.astype(np.complex128)).tocsr()
    up_like = states[digit == 0]
    dn_like = states[digit == 2]
    raise_mat = sp.csr_matrix(
        (
            np.ones(len(dn_like), dtype=np.complex128),
            (dn_like - 2 * 3 ** site, dn_like),
        ),
        shape=(dim, dim),
    )
    lower_mat = sp.csr_matrix(
        (
            np.ones(len(up_like), dtype=np.complex128),
            (up_like + 2 * 3 ** site, up_like),
        ),
        shape=(dim, dim),
    )
    if axis == "+":
        return raise_mat
    if axis == "-":
        return lower_mat
    if axis == "x":
        return ((raise_mat + lower_mat) * 0.5).tocsr()
    if axis == "y":
        return ((raise_mat - lower_mat) * (-0.5j)).tocsr()
    raise ValueError(f"axis must be x|y|z|+|-, got {axis!r}")


def site_spin_matrix(basis, site: int, axis: str) -> sp.csr_matrix:
    """Sparse matrix of the single-site spin operator on any supported basis."""
    if isinstance(basis, SpinBasis):
        return _spin_half_site_matrix(basis, site, axis)
    if isinstance(basis, FockBasis):
        return _fock_site_matrix(basis, site, axis)
    if isinstance(basis, Spin1Basis):
        return _spin1_site_matrix(basis, site, axis)
    raise OperatorError(f"unsupported basis type {type(basis).__name__}")


def site_spin_operator(basis, site: int, axis: str) -> SparseHermitianOperator:
    check = axis in ("x", "y", "z")
    return SparseHermitianOperator(basis, site_spin_matrix(basis, site, axis), check=check)


def collective_spin_operator(basis, axis: str, region=None) -> SparseHermitianOperator:
    """Sum of site spin operators over a region (all sites by default)."""
    n_sites = basis.n_sites
    if region is None:
        region = range(n_sites)
    region = sorted(set(int(s) for s in region))
    if any(s < 0 or s >= n_sites for s in region):
        raise OperatorError(f"region {region} outside [0, {n_sites})")
    total = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for s in region:
        total = total + site_spin_matrix(basis, s, axis)
    return SparseHermitianOperator(basis, total, check=axis in ("x", "y", "z"))
