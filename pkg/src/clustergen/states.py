"""State vectors and the product initial states used by the protocols."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .basis import DOWN, UP, FockBasis, Spin1Basis, SpinBasis, orbital

NORM_TOL = 1e-10


class StateError(ValueError):
    """Invalid state construction or basis mismatch."""


@dataclass
class StateVector:
    """Normalized complex amplitudes over a basis."""

    basis: object
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dim,):
            raise StateError(
                f"amplitude length {self.amplitudes.shape} does not match "
                f"basis dim {self.basis.dim}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0:
            raise StateError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / n)

    def inner(self, other: "StateVector") -> complex:
        if self.basis is not other.basis and self.basis != other.basis:
            raise StateError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes.copy())


def spin_left_product(basis: SpinBasis) -> StateVector:
    """|<- ... <-> on the spin-1/2 basis: each site (|up> - |down>)/sqrt(2)."""
    L = basis.n_sites
    states = np.arange(basis.dim, dtype=np.int64)
    n_down = np.zeros(basis.dim, dtype=np.int64)
    for j in range(L):
        n_down += 1 - ((states >> j) & 1)
    amps = ((-1.0) ** n_down) * 2.0 ** (-L / 2.0)
    return StateVector(basis, amps)


def fock_left_product(basis: FockBasis, vacancies=()) -> StateVector:
    """Product of transverse spins on occupied sites, holes on ``vacancies``.

    Expansion signs follow the site-major orbital ordering: creating one
    particle per site in increasing site order never reorders orbitals, so
    the only signs are the (-1) per down factor of |<->.
    """
    L = basis.n_sites
    vacancies = sorted(set(int(v) for v in vacancies))
    if any(v < 0 or v >= L for v in vacancies):
        raise StateError(f"vacancy site outside [0, {L})")
    occupied = [j for j in range(L) if j not in vacancies]
    if basis.n_particles != len(occupied):
        raise StateError(
            f"sector has N = {basis.n_particles} but {len(occupied)} occupied sites"
        )
    amps = np.zeros(basis.dim, dtype=np.complex128)
    scale = 2.0 ** (-len(occupied) / 2.0)
    for spins in itertools.product((UP, DOWN), repeat=len(occupied)):
        mask = 0
        for site, s in zip(occupied, spins):
            mask |= 1 << orbital(site, s)
        sign = -1.0 if sum(spins) % 2 else 1.0  # one factor -1 per down spin
        amps[basis.index_of(mask)] = sign * scale
    return StateVector(basis, amps)


def spin1_left_product(basis: Spin1Basis, vacancies=()) -> StateVector:
    """Transverse product state in the spin-1 encoding, m_s=0 at vacancies."""
    L = basis.n_sites
    vacancies = sorted(set(int(v) for v in vacancies))
    if any(v < 0 or v >= L for v in vacancies):
        raise StateError(f"vacancy site outside [0, {L})")
    occupied = [j for j in range(L) if j not in vacancies]
    amps = np.zeros(basis.dim, dtype=np.complex128)
    scale = 2.0 ** (-len(occupied) / 2.0)
    for digits in itertools.product((0, 2), repeat=len(occupied)):
        state = sum(3**v for v in vacancies)  # digit 1 = hole
        n_down = 0
        for site, d in zip(occupied, digits):
            state += d * 3**site
            n_down += d == 2
        amps[state] = ((-1.0) ** n_down) * scale
    return StateVector(basis, amps)
