"""Lattice geometry: site indexing, nearest-neighbor bonds, drive staggering.

Sites live on a cubic grid (Lx, Ly, Lz) with row-major linear indexing
idx(m, n, l) = m + Lx*n + Lx*Ly*l.  The linear index doubles as the 1D Fock
ordering used for fermionic sign strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

AXES = ("x", "y", "z")
BOUNDARIES = ("open", "periodic")


class GeometryError(ValueError):
    """Invalid lattice geometry or site arguments."""


@dataclass(frozen=True)
class LatticeGeometry:
    """Cubic lattice with a chosen subset of tunneling axes.

    Axes without tunneling must have extent 1.  ``boundary`` gives the
    boundary condition per axis (only meaningful on tunneling axes).
    """

    extents: tuple[int, int, int]
    tunneling_axes: tuple[str, ...] = ("x",)
    boundary: tuple[str, str, str] = ("open", "open", "open")

    def __post_init__(self):
        if len(self.extents) != 3:
            raise GeometryError("extents must be a 3-tuple (Lx, Ly, Lz)")
        if any(int(e) != e or e < 1 for e in self.extents):
            raise GeometryError(f"extents must be positive integers, got {self.extents}")
        for ax in self.tunneling_axes:
            if ax not in AXES:
                raise GeometryError(f"unknown axis {ax!r}")
        if len(set(self.tunneling_axes)) != len(self.tunneling_axes):
            raise GeometryError("duplicate tunneling axis")
        for b in self.boundary:
            if b not in BOUNDARIES:
                raise GeometryError(f"boundary must be open|periodic, got {b!r}")
        for i, ax in enumerate(AXES):
            if ax not in self.tunneling_axes and self.extents[i] != 1:
                raise GeometryError(
                    f"axis {ax!r} has extent {self.extents[i]} but no tunneling; "
                    "non-tunneling axes must have extent 1"
                )

    @property
    def site_count(self) -> int:
        ex = self.extents
        return ex[0] * ex[1] * ex[2]

    @property
    def dimensionality(self) -> int:
        return len(self.tunneling_axes)

    def index(self, m: int, n: int = 0, l: int = 0) -> int:
        """Row-major linear index of site (m, n, l)."""
        Lx, Ly, Lz = self.extents
        if not (0 <= m < Lx and 0 <= n < Ly and 0 <= l < Lz):
            raise GeometryError(f"site ({m},{n},{l}) outside extents {self.extents}")
        return m + Lx * n + Lx * Ly * l

    def coords(self, idx: int) -> tuple[int, int, int]:
        """Inverse of :meth:`index`."""
        Lx, Ly, Lz = self.extents
        if not (0 <= idx < self.site_count):
            raise GeometryError(f"site index {idx} out of range")
        m = idx % Lx
        n = (idx // Lx) % Ly
        l = idx // (Lx * Ly)
        return (m, n, l)

    @cached_property
    def _neighbor_pairs(self) -> tuple[tuple[int, int], ...]:
        pairs = set()
        for ax_i, ax in enumerate(AXES):
            if ax not in self.tunneling_axes:
                continue
            ext = self.extents[ax_i]
            if ext < 2:
                continue
            periodic = self.boundary[ax_i] == "periodic"
            for idx in range(self.site_count):
                c = list(self.coords(idx))
                c[ax_i] += 1
                if c[ax_i] == ext:
                    if not periodic:
                        continue
                    c[ax_i] = 0
                other = self.index(*c)
                # extent-2 periodic wrap coincides with the forward bond;
                # the set collapses it to a single bond
                pairs.add((min(idx, other), max(idx, other)))
        return tuple(sorted(pairs))

    def neighbors_of(self, site: int) -> tuple[int, ...]:
        """Nearest neighbors of a site along tunneling axes."""
        self.coords(site)
        out = []
        for a, b in self._neighbor_pairs:
            if a == site:
                out.append(b)
            elif b == site:
                out.append(a)
        return tuple(sorted(out))


def neighbor_pairs(geom: LatticeGeometry) -> list[tuple[int, int]]:
    """All nearest-neighbor bonds, each unordered pair exactly once.

    Ordered ascending by first site index, then second.
    """
    return list(geom._neighbor_pairs)


def stagger_sign(geom: LatticeGeometry, site: int) -> int:
    """Alternating drive sign (-1)^(m+n+l) of a site.

    Rejects geometries where a periodic tunneling axis has odd extent,
    since the alternating pattern would be frustrated across the wrap bond.
    """
    for ax_i, ax in enumerate(AXES):
        if (
            ax in geom.tunneling_axes
            and geom.boundary[ax_i] == "periodic"
            and geom.extents[ax_i] % 2 == 1
            and geom.extents[ax_i] > 1
        ):
            raise GeometryError(
                f"staggering is inconsistent on periodic axis {ax!r} with odd "
                f"extent {geom.extents[ax_i]}"
            )
    m, n, l = geom.coords(site)
    return 1 if (m + n + l) % 2 == 0 else -1


def mid_sites(geom: LatticeGeometry, j: int, k: int) -> list[int]:
    """Sites strictly between j and k in the linear Fock ordering.

    Only defined for nearest-neighbor pairs; empty when the bond connects
    adjacent linear indices.
    """
    pair = (min(j, k), max(j, k))
    if pair not in geom._neighbor_pairs:
        raise GeometryError(f"sites {j} and {k} are not nearest neighbors")
    lo, hi = pair
    return list(range(lo + 1, hi))
