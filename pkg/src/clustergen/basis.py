"""Hilbert-space bases: fermionic Fock sectors, spin-1/2 and spin-1 chains.

Fock states are bitmasks over 2L spin-orbitals with site-major ordering,
up before down within a site: orbital(site, spin) = 2*site + (0 if up else 1).
Fermionic signs count occupied orbitals below the target orbital.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .lattice import LatticeGeometry

UP, DOWN = 0, 1
SPIN_LABELS = {"up": UP, "down": DOWN, UP: UP, DOWN: DOWN}


class BasisError(ValueError):
    """Invalid basis construction or sector arguments."""


def orbital(site: int, spin: int) -> int:
    return 2 * site + spin


@dataclass(frozen=True)
class FockBasis:
    """Fixed total-number sector of lowest-band fermions on a lattice."""

    geometry: LatticeGeometry
    n_particles: int
    states: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        L = self.geometry.site_count
        if not (0 <= self.n_particles <= 2 * L):
            raise BasisError(
                f"particle number {self.n_particles} outside [0, {2 * L}]"
            )
        if self.states is None:
            orbs = range(2 * L)
            states = np.array(
                sorted(
                    sum(1 << o for o in occ)
                    for occ in itertools.combinations(orbs, self.n_particles)
                ),
                dtype=np.int64,
            )
            object.__setattr__(self, "states", states)

    @cached_property
    def _lookup(self) -> dict[int, int]:
        return {int(s): i for i, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def n_sites(self) -> int:
        return self.geometry.site_count

    def index_of(self, state: int) -> int:
        try:
            return self._lookup[int(state)]
        except KeyError:
            raise BasisError(f"state {state:b} not in sector") from None

    def occupation(self, state: int, site: int, spin: int) -> int:
        return (int(state) >> orbital(site, spin)) & 1


def build_fock_basis(geom: LatticeGeometry, total_particles: int) -> FockBasis:
    """Enumerate the full fixed-N Fock sector, sorted by bitmask value."""
    return FockBasis(geometry=geom, n_particles=total_particles)


def apply_fermion(state: int, op: str, site: int, spin) -> tuple[int, int] | None:
    """Apply a single creation/annihilation operator to a Fock bitmask.

    Returns (new_state, sign) or None when Pauli-blocked.  The sign is
    (-1)^(number of occupied orbitals below the target orbital).
    """
    spin = SPIN_LABELS[spin]
    orb = orbital(site, spin)
    occupied = (state >> orb) & 1
    if op == "create":
        if occupied:
            return None
        new = state | (1 << orb)
    elif op == "annihilate":
        if not occupied:
            return None
        new = state & ~(1 << orb)
    else:
        raise ValueError(f"op must be create|annihilate, got {op!r}")
    below = state & ((1 << orb) - 1)
    sign = -1 if bin(below).count("1") % 2 else 1
    return new, sign


@dataclass(frozen=True)
class SpinBasis:
    """Spin-1/2 product basis: state index = bitstring, bit j set means up."""

    n_sites: int

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def sz_value(self, state: int, site: int) -> float:
        return 0.5 if (state >> site) & 1 else -0.5


@dataclass(frozen=True)
class Spin1Basis:
    """Spin-1 product basis: base-3 digits, digit 0/1/2 = m_s +1/0/-1."""

    n_sites: int

    @property
    def dim(self) -> int:
        return 3 ** self.n_sites

    def digit(self, state: int, site: int) -> int:
        return (state // 3 ** site) % 3

    def ms_value(self, state: int, site: int) -> int:
        return (1, 0, -1)[self.digit(state, site)]

    def with_digit(self, state: int, site: int, digit: int) -> int:
        p = 3 ** site
        return state + (digit - self.digit(state, site)) * p


def is_singly_occupied(state: int, n_sites: int) -> bool:
    for j in range(n_sites):
        if ((state >> (2 * j)) & 1) + ((state >> (2 * j + 1)) & 1) != 1:
            return False
    return True


def has_doublon(state: int, n_sites: int) -> bool:
    for j in range(n_sites):
        if ((state >> (2 * j)) & 1) and ((state >> (2 * j + 1)) & 1):
            return True
    return False


def spin_half_embedding(fock: FockBasis, spins: SpinBasis) -> np.ndarray:
    """Map spin-1/2 basis indices onto the singly-occupied Fock states.

    Returns an array ``fock_index_of[spin_index]``.  Requires N = L; the
    image is exactly the singly-occupied subset of the sector.
    """
    L = fock.n_sites
    if spins.n_sites != L:
        raise BasisError("site-count mismatch between bases")
    if fock.n_particles != L:
        raise BasisError(
            "spin-1/2 embedding needs the half-filled sector (N = L); "
            f"got N = {fock.n_particles}"
        )
    out = np.empty(spins.dim, dtype=np.int64)
    for s in range(spins.dim):
        mask = 0
        for j in range(L):
            spin = UP if (s >> j) & 1 else DOWN
            mask |= 1 << orbital(j, spin)
        out[s] = fock.index_of(mask)
    return out


def spin1_embedding(fock: FockBasis, spin1: Spin1Basis) -> tuple[np.ndarray, np.ndarray]:
    """Pair up no-doublon Fock states with spin-1 configurations.

    Dictionary: up occupation -> m_s=+1, hole -> m_s=0, down -> m_s=-1.
    Returns aligned arrays (fock_indices, spin1_indices) covering every
    doublon-free state of the sector.
    """
    L = fock.n_sites
    if spin1.n_sites != L:
        raise BasisError("site-count mismatch between bases")
    fock_idx = []
    spin1_idx = []
    for i, st in enumerate(fock.states):
        st = int(st)
        if has_doublon(st, L):
            continue
        s1 = 0
        for j in range(L):
            up = (st >> (2 * j)) & 1
            dn = (st >> (2 * j + 1)) & 1
            digit = 0 if up else (2 if dn else 1)
            s1 += digit * 3 ** j
        fock_idx.append(i)
        spin1_idx.append(s1)
    return np.array(fock_idx, dtype=np.int64), np.array(spin1_idx, dtype=np.int64)
