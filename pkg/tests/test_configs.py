import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fqgeom.configs import (BudgetExceeded, DegenerateSimplexError, DistanceMismatchError,
                            DistanceVector, HingeSpec, count_congruent_copies,
                            count_hinges, distance_vector, hinge_main_term, hinge_report,
                            max_hinge_point, permutation_quotient, rank_of_simplex,
                            recover_isometry, simplex_census, sphere_intersection_counts,
                            two_hinge_check)
from fqgeom.geom import DenseSet, Point, norm_grid, random_dense_set, sphere_size
from fqgeom.ortho import enumerate_orthogonal_group

import oracles


def P(p, *c):
    return Point(c, p)


def pts_of(E):
    return [tuple(int(c) for c in x.coords) for x in E.points()]


# -- sphere intersections ------------------------------------------------------

def test_intersection_full_space():
    c = sphere_intersection_counts(DenseSet.full(3, 2), 1)
    assert np.array_equal(c, np.full(9, 4))


@pytest.mark.parametrize("t", [1, 2, 3])
def test_intersection_single_point(t):
    E = DenseSet.from_points(5, 2, [(0, 0)])
    c = sphere_intersection_counts(E, t)
    assert np.array_equal(c, (norm_grid(5, 2) == t).astype(np.int64))


def test_intersection_rejects_zero_radius():
    with pytest.raises(ValueError):
        sphere_intersection_counts(DenseSet.full(3, 2), 0)


@pytest.mark.parametrize("seed", range(5))
def test_intersection_methods_agree(seed, backend):
    E = random_dense_set(5, 2, 0.4, seed)
    for t in range(1, 5):
        direct = sphere_intersection_counts(E, t, backend=backend)
        spectral = sphere_intersection_counts(E, t, method="fourier")
        assert np.array_equal(direct, spectral)


def test_intersection_matches_definition():
    E = random_dense_set(7, 2, 0.5, seed=9)
    members = pts_of(E)
    c = sphere_intersection_counts(E, 3)
    for idx, x in enumerate(oracles.space(7, 2)):
        assert c[idx] == sum(1 for y in members if oracles.qdist(x, y, 7) == 3)


# -- hinges ----------------------------------------------------------------------

def test_hinge_examples():
    E = DenseSet.full(3, 2)
    assert count_hinges(E, HingeSpec((1,), 3)) == 36
    assert count_hinges(E, HingeSpec((1, 1), 3)) == 144
    single = DenseSet.from_points(5, 2, [(2, 3)])
    for alphas in [(1,), (1, 2), (3, 3, 4)]:
        assert count_hinges(single, HingeSpec(alphas, 5)) == 0


def test_hinge_spec_validation():
    with pytest.raises(ValueError):
        HingeSpec((1, 0), 5)
    with pytest.raises(ValueError):
        HingeSpec((5,), 5)
    with pytest.raises(ValueError):
        HingeSpec((), 5)
    with pytest.raises(ValueError):
        count_hinges(DenseSet.full(3, 1), HingeSpec((1,) * 8, 3))


@pytest.mark.parametrize("seed", range(8))
def test_hinges_match_nested_loop(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.choice([3, 5, 7]))
    E = random_dense_set(p, 2, float(rng.uniform(0.15, 0.5)), seed)
    for r in (2, 3, 4):
        alphas = tuple(int(a) for a in rng.integers(1, p, r - 1))
        if len(E) ** r > 2 * 10**5:
            continue
        assert count_hinges(E, HingeSpec(alphas, p)) == \
            oracles.hinge_nested_loop(pts_of(E), alphas, p)


def test_h3_identity_two_radii():
    E = random_dense_set(7, 2, 0.6, seed=2)
    c1 = sphere_intersection_counts(E, 1)[E.indices()]
    c3 = sphere_intersection_counts(E, 3)[E.indices()]
    assert count_hinges(E, HingeSpec((1, 3), 7)) == int((c1 * c3).sum())


def test_hinge_report_full_plane():
    E = DenseSet.full(3, 2)
    rep = hinge_report(E, HingeSpec((1,), 3))
    assert rep.exact == 36 and rep.main_term == 27
    # exact minus q^{-1}|E|^2 equals |E|^2 (|S| q^{-d} - q^{-1})
    assert rep.exact - rep.main_term == 81 * (Fraction(4, 9) - Fraction(1, 3))
    assert rep.sphere_main_term == 36


def test_hinge_report_singleton():
    E = DenseSet.from_points(5, 2, [(1, 1)])
    rep = hinge_report(E, HingeSpec((1, 2), 5))
    assert rep.exact == 0 and rep.main_term == Fraction(1, 25)
    assert hinge_main_term(1, 3, 5) == Fraction(1, 25)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_two_hinge_bound(p):
    for seed in range(20):
        E = random_dense_set(p, 2, 0.1 + 0.04 * seed, seed)
        for a in range(1, p):
            assert two_hinge_check(E, a).ok


def test_max_hinge_point_examples():
    x, count = max_hinge_point(DenseSet.full(3, 2), HingeSpec((1, 1), 3))
    assert count == 16
    E = DenseSet.from_points(5, 2, [(0, 0), (1, 0)])
    x, count = max_hinge_point(E, HingeSpec((1,), 5))
    assert count == 1 and x.coords in {(0, 0), (1, 0)}
    with pytest.raises(ValueError):
        max_hinge_point(DenseSet(5, 2, np.zeros(25, bool)), HingeSpec((1,), 5))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.floats(0.05, 1), st.integers(0, 10**6),
       st.lists(st.integers(1, 100), min_size=1, max_size=3))
def test_max_is_at_least_mean(p, rho, seed, raw):
    E = random_dense_set(p, 2, rho, seed)
    alphas = tuple(a % (p - 1) + 1 for a in raw)
    if len(E) == 0:
        return
    _, best = max_hinge_point(E, HingeSpec(alphas, p))
    assert best * len(E) >= count_hinges(E, HingeSpec(alphas, p))


# -- distance vectors, rank, isometries -------------------------------------------

def test_distance_vector_examples():
    x = P(5, 2, 3)
    assert distance_vector([x, x, x]).entries == (0, 0, 0)
    V = [P(5, 0, 0), P(5, 1, 0), P(5, 0, 1)]
    assert distance_vector(V).entries == (1, 1, 2)
    tau = P(5, 3, 4)
    assert distance_vector([v + tau for v in V]) == distance_vector(V)


def test_distance_vector_code_round_trip():
    a = DistanceVector((1, 4, 2, 0, 3, 3), 5)
    assert a.k == 3
    assert DistanceVector.from_code(a.code, 5, 3) == a
    assert a.matrix()[2][3] == 3 and a.matrix()[3][2] == 3
    with pytest.raises(ValueError):
        DistanceVector((1, 2), 5)


@pytest.mark.parametrize("p,d", [(3, 2), (5, 2), (3, 3)])
def test_distance_vector_isometry_invariant(p, d):
    G = enumerate_orthogonal_group(p, d)
    rng = np.random.default_rng(p + d)
    for _ in range(10):
        V = [Point(tuple(rng.integers(0, p, d)), p) for _ in range(d + 1)]
        a = distance_vector(V)
        for A in G.elements:
            moved = [Point(tuple(A @ np.array(v.coords)), p) for v in V]
            assert distance_vector(moved) == a


def test_rank_examples():
    assert rank_of_simplex([P(5, 1, 1), P(5, 1, 1), P(5, 0, 2)]) < 2
    assert rank_of_simplex([P(5, 0, 0), P(5, 1, 0), P(5, 2, 0)]) == 1
    assert rank_of_simplex([P(5, 0, 0), P(5, 1, 0), P(5, 0, 1)]) == 2
    assert rank_of_simplex([P(5, 4, 4)]) == 0


def test_recover_identity_for_translation():
    V = [P(7, 0, 0), P(7, 1, 3), P(7, 2, 5)]
    tau = P(7, 6, 1)
    iso = recover_isometry(V, [v + tau for v in V])
    assert np.array_equal(iso.matrix, np.eye(2, dtype=np.int64))
    assert iso.translation == tau


@pytest.mark.parametrize("p,d", [(5, 2), (7, 2), (5, 3)])
def test_recover_random_isometries(p, d):
    G = enumerate_orthogonal_group(p, d)
    rng = np.random.default_rng(100 + p + d)
    for _ in range(100):
        while True:
            V = [Point(tuple(rng.integers(0, p, d)), p) for _ in range(d + 1)]
            if rank_of_simplex(V) == d:
                break
        A = G.elements[rng.integers(len(G))]
        tau = Point(tuple(rng.integers(0, p, d)), p)
        W = [Point(tuple(A @ np.array(v.coords)), p) + tau for v in V]
        iso = recover_isometry(V, W)
        assert np.array_equal(iso.matrix, A)
        assert [iso(v) for v in V] == W


def test_recover_rejects_perturbed_and_degenerate():
    V = [P(5, 0, 0), P(5, 1, 0), P(5, 0, 1)]
    W = [P(5, 0, 0), P(5, 1, 0), P(5, 0, 2)]
    with pytest.raises(DistanceMismatchError, match="distance vectors differ"):
        recover_isometry(V, W)
    iso_line = [P(5, 0, 0), P(5, 1, 2), P(5, 2, 4)]
    collapsed = [P(5, 0, 0)] * 3
    assert distance_vector(iso_line) == distance_vector(collapsed)
    with pytest.raises(DegenerateSimplexError):
        recover_isometry(iso_line, collapsed)


# -- congruent copies and census ----------------------------------------------------

TRIANGLE = [(0, 0), (1, 0), (0, 1)]


def test_congruent_copies_examples():
    single = DenseSet.from_points(5, 2, [(3, 3)])
    assert count_congruent_copies(single, DistanceVector((1, 0, 0), 5)) == 0
    E = DenseSet.from_points(5, 2, TRIANGLE)
    got = count_congruent_copies(E, DistanceVector((1, 1, 2), 5))
    assert got >= 1
    assert got == oracles.congruent_copies(TRIANGLE, (1, 1, 2), 5, 2) == 2


@pytest.mark.parametrize("k", [1, 2])
def test_congruent_copies_partition_tuples(k):
    E = random_dense_set(5, 2, 0.3, seed=4)
    total = sum(count_congruent_copies(E, DistanceVector(a, 5))
                for a in itertools.product(range(5), repeat=k * (k + 1) // 2))
    assert total == len(E) ** (k + 1)


def test_congruent_copies_match_oracle():
    E = random_dense_set(7, 2, 0.3, seed=8)
    rng = np.random.default_rng(0)
    for _ in range(10):
        a = tuple(int(v) for v in rng.integers(0, 7, 3))
        assert count_congruent_copies(E, DistanceVector(a, 7)) == \
            oracles.congruent_copies(pts_of(E), a, 7, 2)


def test_congruent_copies_budget(monkeypatch):
    monkeypatch.setenv("FQGEOM_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        count_congruent_copies(DenseSet.full(5, 2), DistanceVector((1, 1, 1), 5))


def test_census_collinear(backend):
    E = DenseSet.from_points(5, 2, [(0, 0), (1, 0), (2, 0)])
    res = simplex_census(E, 2, backend=backend)
    assert res.distinct_classes == 0 and res.degenerate_tuples == 27


def test_census_triangle(backend):
    E = DenseSet.from_points(5, 2, TRIANGLE)
    res = simplex_census(E, 2, backend=backend)
    classes, degenerate = oracles.triangle_census(TRIANGLE, 5)
    assert res.distinct_classes == len(classes) == 3
    assert res.degenerate_tuples == degenerate == 21
    assert {c.entries for c in res.classes(5, 2)} == classes
    assert res.permutation_classes == 1


@pytest.mark.parametrize("p,expected", [(5, 60), (7, 126)])
def test_census_full_plane(p, expected, backend):
    res = simplex_census(DenseSet.full(p, 2), 2, backend=backend)
    assert res.distinct_classes == expected


@pytest.mark.parametrize("p,d,k,rho", [(5, 2, 1, 0.5), (3, 3, 3, 0.4), (5, 3, 2, 0.2),
                                       (3, 2, 2, 1.0), (5, 1, 1, 0.6)])
def test_census_matches_general_oracle(p, d, k, rho):
    E = random_dense_set(p, d, rho, seed=p * d + k)
    res = simplex_census(E, k)
    classes, degenerate = oracles.simplex_census(pts_of(E), p, k)
    assert res.distinct_classes == len(classes)
    assert res.degenerate_tuples == degenerate
    assert {c.entries for c in res.classes(p, k)} == classes


def test_census_sampled_is_lower_bound_and_seeded():
    E = random_dense_set(7, 2, 0.5, seed=1)
    exact = simplex_census(E, 2)
    a = simplex_census(E, 2, mode="sampled", samples=5000, seed=3)
    b = simplex_census(E, 2, mode="sampled", samples=5000, seed=3)
    assert a == b
    assert set(a.codes) <= set(exact.codes)
    assert a.samples == 5000 and a.tuples_examined == 5000
    with pytest.raises(ValueError):
        simplex_census(E, 2, mode="sampled", samples=0)


def test_census_budget(monkeypatch):
    monkeypatch.setenv("FQGEOM_BUDGET", "1000")
    with pytest.raises(BudgetExceeded):
        simplex_census(DenseSet.full(5, 2), 2)
    res = simplex_census(DenseSet.full(5, 2), 2, mode="sampled", samples=2000)
    assert res.distinct_classes <= 60


def test_census_dimension_checks():
    with pytest.raises(ValueError):
        simplex_census(DenseSet.full(3, 2), 3)
    with pytest.raises(ValueError):
        simplex_census(DenseSet.full(3, 2), 2, mode="fast")


def test_census_monotone_in_p():
    values = [simplex_census(DenseSet.full(p, 2), 2).distinct_classes for p in (3, 5, 7, 11)]
    assert values == sorted(values)


def test_permutation_quotient_bounds():
    res = simplex_census(DenseSet.full(5, 2), 2)
    assert res.distinct_classes / 6 <= res.permutation_classes <= res.distinct_classes
    brute = {min(tuple(DistanceVector(
        [m[s[i]][s[j]] for i, j in [(0, 1), (0, 2), (1, 2)]], 5).entries)
        for s in itertools.permutations(range(3)))
        for m in (c.matrix() for c in res.classes(5, 2))}
    assert res.permutation_classes == len(brute)
    assert permutation_quotient([], 5, 2) == 0
