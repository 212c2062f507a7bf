import math

import pytest
from hypothesis import given, strategies as st

from critperc.lattice import (
    Half,
    LOWER_ORIGIN,
    LatticeGeometry,
    ORIGIN,
    SiteCoord,
    dist4,
    nearest_site,
    neighbors,
    position,
    reflect_lower,
)

coords = st.builds(SiteCoord, st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
meshes = st.floats(1e-3, 10.0)


def test_position_examples():
    assert position((0, 0), LatticeGeometry(1.0)) == 0j
    assert position((1, 0), LatticeGeometry(1.0)) == 1 + 0j
    w = position((0, 1), LatticeGeometry(0.5))
    assert w.real == pytest.approx(0.25)
    assert w.imag == pytest.approx(0.43301, abs=1e-5)


@given(meshes)
def test_origin_pinned(mesh):
    assert position(ORIGIN, LatticeGeometry(mesh)) == 0j


def test_neighbors_of_origin():
    assert set(neighbors((0, 0))) == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)}
    assert set(neighbors((2, 3))) == {(3, 3), (1, 3), (2, 4), (2, 2), (3, 2), (1, 4)}


@given(coords, meshes)
def test_neighbors_regular_symmetric_unit_distance(c, mesh):
    g = LatticeGeometry(mesh)
    nb = neighbors(c)
    assert len(set(nb)) == 6
    for n in nb:
        assert c in neighbors(n)
        assert abs(position(n, g) - position(c, g)) == pytest.approx(mesh, rel=1e-9)
        assert dist4(c, n) == 4


def test_reflect_examples():
    assert reflect_lower(ORIGIN) == LOWER_ORIGIN
    assert reflect_lower((2, 3)) == (5, -4)
    with pytest.raises(ValueError):
        reflect_lower((0, -1))


def test_reflect_exhaustive_patch():
    patch = [SiteCoord(i, j) for i in range(-25, 25) for j in range(0, 50)]
    images = [reflect_lower(c) for c in patch]
    assert len(set(images)) == len(patch)
    assert all(w.j <= -1 for w in images)
    for c in patch:
        rc = reflect_lower(c)
        for n in neighbors(c):
            if n.j >= 0:
                assert reflect_lower(n) in neighbors(rc)


def test_reflect_is_a_reflection():
    g = LatticeGeometry(1.0)
    tri = [position(c, g) for c in (ORIGIN, SiteCoord(1, 0), SiteCoord(0, 1))]
    img = [position(reflect_lower(c), g) for c in (ORIGIN, SiteCoord(1, 0), SiteCoord(0, 1))]

    def orientation(p):
        return ((p[1] - p[0]).conjugate() * (p[2] - p[0])).imag

    assert orientation(tri) > 0 > orientation(img)
    # distances are preserved
    a, b = SiteCoord(3, 7), SiteCoord(-4, 2)
    assert abs(position(a, g) - position(b, g)) == pytest.approx(
        abs(position(reflect_lower(a), g) - position(reflect_lower(b), g)))


def test_nearest_site_examples(unit):
    assert nearest_site(0j, unit) == (0, 0)
    assert nearest_site(0.9 + 0j, unit) == (1, 0)
    assert nearest_site(0.01j, unit, Half.UPPER) == (0, 0)


def test_nearest_site_tie_break(unit):
    # midpoint of (0,0) and (1,0): lexicographically smaller wins
    assert nearest_site(0.5 + 0j, unit) == (0, 0)


def test_nearest_site_restriction(unit):
    # just below the axis, the lower half-plane cannot pick row 0
    assert nearest_site(-0.01j, unit, Half.LOWER).j == -1
    with pytest.raises(ValueError):
        nearest_site(-1j, unit, Half.UPPER)


def _brute_nearest(z, g, restrict):
    best = None
    fi = z.real / g.mesh
    fj = z.imag / (g.mesh * math.sqrt(3) / 2)
    for j in range(math.floor(fj) - 3, math.floor(fj) + 4):
        if not restrict.admits(j):
            continue
        for i in range(math.floor(fi - j / 2) - 3, math.floor(fi - j / 2) + 4):
            d = abs(position((i, j), g) - z)
            key = (round(d, 9), i, j)
            best = min(best, key) if best else key
    return best[1], best[2]


@given(st.floats(-50, 50), st.floats(0, 50), meshes)
def test_nearest_site_matches_enumeration(x, y, mesh):
    g = LatticeGeometry(mesh)
    z = complex(x * mesh, y * mesh)
    for restrict in (Half.ANY, Half.UPPER):
        assert tuple(nearest_site(z, g, restrict)) == _brute_nearest(z, g, restrict)


@given(coords.filter(lambda c: abs(c.i) < 10**4 and abs(c.j) < 10**4), meshes)
def test_nearest_site_round_trip(c, mesh):
    g = LatticeGeometry(mesh)
    assert nearest_site(position(c, g), g) == c


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), meshes)
def test_nearest_site_within_one_mesh(x, y, mesh):
    g = LatticeGeometry(mesh)
    z = complex(x, y)
    assert abs(position(nearest_site(z, g), g) - z) <= mesh * (1 + 1e-9)
