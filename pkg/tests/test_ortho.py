import numpy as np
import pytest

from fqgeom.configs import HingeSpec
from fqgeom.field import legendre_int
from fqgeom.geom import DenseSet, Point, all_coords, enumerate_sphere, norm, random_dense_set
from fqgeom.limits import BudgetExceeded
from fqgeom.ortho import (dichotomy_rows, enumerate_orthogonal_group, expected_o2_order,
                          hinge_stabilizer_size, orbit, orbit_table, stabilizer_size)

import oracles


@pytest.mark.parametrize("p", [3, 5, 7])
def test_dimension_one(p):
    G = enumerate_orthogonal_group(p, 1)
    assert sorted(int(m[0, 0]) for m in G.elements) == [1, p - 1]


@pytest.mark.parametrize("p,d,order", [(3, 2, 8), (3, 3, 48)])
def test_orders_match_full_scan(p, d, order):
    G = enumerate_orthogonal_group(p, d)
    assert len(G) == order
    scan = {np.array(A, dtype=np.int64).tobytes() for A in oracles.orthogonal_scan(p, d)}
    assert G.keys() == scan


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_o2_order_formula(p):
    assert len(enumerate_orthogonal_group(p, 2)) == expected_o2_order(p) == \
        2 * (p - legendre_int(-1, p))


@pytest.mark.parametrize("p,d", [(3, 2), (5, 2), (3, 3), (5, 3)])
def test_group_closure(p, d):
    assert enumerate_orthogonal_group(p, d).check_closure(pairs=1000)


def test_budget(monkeypatch):
    with pytest.raises(BudgetExceeded):
        enumerate_orthogonal_group(11, 3)
    monkeypatch.setenv("FQGEOM_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        enumerate_orthogonal_group(3, 2)


def test_orbit_examples():
    G = enumerate_orthogonal_group(3, 2)
    zero = Point((0, 0), 3)
    assert orbit(G, zero) == {zero} and stabilizer_size(G, zero) == 8
    v = Point((1, 0), 3)
    assert orbit(G, v) == set(enumerate_sphere(3, 2, 1))
    assert stabilizer_size(G, v) == 2


@pytest.mark.parametrize("p,d", [(3, 2), (5, 2), (7, 2), (11, 2), (3, 3)])
def test_orbit_stabilizer_everywhere(p, d):
    G = enumerate_orthogonal_group(p, d)
    for idx in range(p**d):
        v = Point(tuple(all_coords(p, d)[idx]), p)
        orb = orbit(G, v)
        assert len(orb) * stabilizer_size(G, v) == len(G)
        assert all(norm(w) == norm(v) for w in orb)
    assert all(row["orbit_stabilizer_ok"] for row in orbit_table(G))


@pytest.mark.parametrize("p,d", [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3)])
def test_orbits_of_nonisotropic_vectors_fill_spheres(p, d):
    G = enumerate_orthogonal_group(p, d)
    for row in orbit_table(G):
        if row["norm"] != 0:
            assert row["orbit_size"] == row["sphere_size"]


def test_norm_preserved_exhaustively():
    G = enumerate_orthogonal_group(3, 2)
    coords = all_coords(3, 2)
    images = G.act(coords)
    assert np.array_equal((images**2).sum(axis=2) % 3,
                          np.broadcast_to((coords**2).sum(axis=1) % 3, images.shape[:2]))


def test_hinge_stabilizer_full_space():
    G = enumerate_orthogonal_group(5, 2)
    E = DenseSet.full(5, 2)
    st = hinge_stabilizer_size(G, E, Point((2, 2), 5), HingeSpec((1, 2), 5))
    assert st.size == len(G) and not st.empty_slice


def test_hinge_stabilizer_empty_slice():
    G = enumerate_orthogonal_group(5, 2)
    E = DenseSet.from_points(5, 2, [(0, 0), (1, 0)])
    st = hinge_stabilizer_size(G, E, Point((0, 0), 5), HingeSpec((1, 2), 5))
    assert st.empty_slice and st.size == len(G) and st.slice_sizes == (1, 0)


@pytest.mark.parametrize("p", [3, 5])
def test_hinge_stabilizer_random(p):
    G = enumerate_orthogonal_group(p, 2)
    for seed in range(5):
        E = random_dense_set(p, 2, 0.6, seed)
        x = E.points()[0]
        spec = HingeSpec((1, 2), p)
        st = hinge_stabilizer_size(G, E, x, spec)
        # brute force: keep A iff A maps each slice A_i - x into itself
        slices = [{tuple((np.array(y.coords) - x.coords) % p) for y in E
                   if oracles.qdist(x.coords, y.coords, p) == a} for a in spec.alphas]
        keep = []
        for A in G.elements:
            # an empty slice empties the hinge, which every element preserves
            if not all(slices) or all({tuple((A @ np.array(z)) % p) for z in s} == s for s in slices):
                keep.append(A)
        assert st.size == len(keep)
        assert any(np.array_equal(A, np.eye(2, dtype=np.int64)) for A in keep)
        keys = {A.tobytes() for A in keep}
        assert all(((A @ B) % p).tobytes() in keys for A in keep for B in keep)


def test_dichotomy_rows():
    G = enumerate_orthogonal_group(5, 2)
    E = random_dense_set(5, 2, 0.5, seed=1)
    rows = dichotomy_rows(G, E, HingeSpec((1, 1), 5), 0.5)
    assert len(rows) == len(E)
    for row in rows:
        assert row["branch"] == ("small" if row["stabilizer_size"] <= 0.5 * 5 else "large")
        assert row["configs_lower_bound"] * row["stabilizer_size"] == row["hinge_size"]
