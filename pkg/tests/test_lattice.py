import pytest
from hypothesis import given, strategies as st

from clustergen.lattice import (
    GeometryError,
    LatticeGeometry,
    mid_sites,
    neighbor_pairs,
    stagger_sign,
)


def g1d(L, periodic=False):
    return LatticeGeometry(
        extents=(L, 1, 1),
        tunneling_axes=("x",),
        boundary=("periodic" if periodic else "open", "open", "open"),
    )


def g2d(Lx, Ly, bx="open", by="open"):
    return LatticeGeometry(extents=(Lx, Ly, 1), tunneling_axes=("x", "y"), boundary=(bx, by, "open"))


def test_index_coords_roundtrip():
    geom = g2d(4, 3)
    for idx in range(geom.site_count):
        assert geom.index(*geom.coords(idx)) == idx


def test_index_rejects_out_of_range():
    geom = g1d(4)
    with pytest.raises(GeometryError):
        geom.index(4)
    with pytest.raises(GeometryError):
        geom.coords(4)


def test_nontunneling_axis_must_be_flat():
    with pytest.raises(GeometryError):
        LatticeGeometry(extents=(4, 2, 1), tunneling_axes=("x",))


def test_open_chain_bonds():
    assert neighbor_pairs(g1d(4)) == [(0, 1), (1, 2), (2, 3)]


def test_periodic_chain_adds_wrap_bond():
    assert neighbor_pairs(g1d(4, periodic=True)) == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_extent_two_periodic_collapses_double_bond():
    # the wrap bond coincides with the direct bond and must not double-count
    geom = LatticeGeometry(
        extents=(2, 1, 1), tunneling_axes=("x",), boundary=("periodic", "open", "open")
    )
    assert neighbor_pairs(geom) == [(0, 1)]


def test_2d_bond_count():
    geom = g2d(4, 4)
    assert len(neighbor_pairs(geom)) == 2 * 4 * 3  # 24 bonds on open 4x4


def test_neighbors_of_center_site():
    geom = g2d(3, 3)
    assert geom.neighbors_of(4) == (1, 3, 5, 7)
    assert geom.neighbors_of(0) == (1, 3)


def test_stagger_alternates_on_bonds():
    geom = g2d(4, 4)
    for a, b in neighbor_pairs(geom):
        assert stagger_sign(geom, a) == -stagger_sign(geom, b)


def test_stagger_1d_pattern():
    geom = g1d(4)
    assert [stagger_sign(geom, j) for j in range(4)] == [1, -1, 1, -1]


def test_stagger_rejects_odd_periodic():
    geom = g1d(5, periodic=True)
    with pytest.raises(GeometryError):
        stagger_sign(geom, 0)


def test_mid_sites_1d_adjacent_empty():
    geom = g1d(5)
    assert mid_sites(geom, 1, 2) == []


def test_mid_sites_2d_vertical_bond():
    geom = g2d(4, 2)
    # sites 1 and 5 are vertical neighbors; 2, 3, 4 sit between them linearly
    assert mid_sites(geom, 1, 5) == [2, 3, 4]
    assert mid_sites(geom, 5, 1) == [2, 3, 4]


def test_mid_sites_requires_neighbors():
    geom = g1d(5)
    with pytest.raises(GeometryError):
        mid_sites(geom, 0, 2)


@given(st.integers(2, 7), st.booleans())
def test_bond_sites_valid_and_sorted(L, periodic):
    geom = g1d(L, periodic and L % 2 == 0)
    pairs = neighbor_pairs(geom)
    assert pairs == sorted(pairs)
    for a, b in pairs:
        assert 0 <= a < b < L


@given(st.integers(2, 5), st.integers(2, 5))
def test_neighbor_symmetry(Lx, Ly):
    geom = g2d(Lx, Ly)
    for j in range(geom.site_count):
        for k in geom.neighbors_of(j):
            assert j in geom.neighbors_of(k)
