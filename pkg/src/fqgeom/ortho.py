"""Brute-force orthogonal groups O_d(F_p) for tiny (d, p), and their actions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .configs import HingeSpec, _hinge_products
from .field import legendre_int
from .geom import (DenseSet, Point, all_coords, check_space, coords_to_index,
                   norm_grid, point_from_index)
from .limits import ENUMERATION_BUDGET, BudgetExceeded, budget


@dataclass(frozen=True, eq=False)
class OrthogonalGroup:
    p: int
    d: int
    elements: np.ndarray  # (n, d, d) int64, entries in [0, p)

    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def keys(self) -> set[bytes]:
        return {m.tobytes() for m in self.elements}

    def contains(self, M: np.ndarray) -> bool:
        M = np.asarray(M, dtype=np.int64) % self.p
        return bool(np.any(np.all(self.elements == M, axis=(1, 2))))

    def act(self, coords: np.ndarray) -> np.ndarray:
        """Images of an ``(m, d)`` point block under every element: ``(n, m, d)``."""
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, self.d)
        return np.einsum("nij,mj->nmi", self.elements, coords) % self.p

    def check_closure(self, pairs: int = 1000, seed: int = 0) -> bool:
        """Identity present, transpose is inverse, random products stay inside."""
        p, d = self.p, self.d
        keys = self.keys()
        if np.eye(d, dtype=np.int64).tobytes() not in keys:
            return False
        eye = np.eye(d, dtype=np.int64)
        for M in self.elements:
            if not np.array_equal((M.T @ M) % p, eye):
                return False
            if M.T.copy().tobytes() not in keys:
                return False
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, len(self), size=(pairs, 2))
        for i, j in idx:
            prod = (self.elements[i] @ self.elements[j]) % p
            if prod.tobytes() not in keys:
                return False
        return True


def enumerate_orthogonal_group(p: int, d: int) -> OrthogonalGroup:
    """Every d x d matrix A over F_p with A^T A = I.

    Columns are chosen one at a time from the unit sphere S_1, each new
    column orthogonal to the earlier ones; this is the full matrix scan
    with column-by-column early rejection.
    """
    check_space(p, d)
    if p ** (d * d) > budget(ENUMERATION_BUDGET):
        raise BudgetExceeded(f"p^(d^2) = {p}^{d * d} exceeds the enumeration budget")
    units = all_coords(p, d)[norm_grid(p, d) == 1]
    gram = (units @ units.T) % p
    found: list[tuple[int, ...]] = []

    def extend(chosen: list[int]) -> None:
        if len(chosen) == d:
            found.append(tuple(chosen))
            return
        ok = np.ones(len(units), dtype=bool)
        for c in chosen:
            ok &= gram[c] == 0
        for c in np.flatnonzero(ok):
            extend(chosen + [int(c)])

    extend([])
    elements = np.array([units[list(cols)].T for cols in found], dtype=np.int64)
    return OrthogonalGroup(p, d, elements.reshape(-1, d, d))


def expected_o2_order(p: int) -> int:
    """|O_2(F_p)| = 2 (p - eta(-1))."""
    return 2 * (p - legendre_int(-1, p))


def orbit(G: OrthogonalGroup, v: Point) -> set[Point]:
    images = G.act(np.array(v.coords))[:, 0, :]
    return {Point(tuple(row), G.p) for row in np.unique(images, axis=0)}


def stabilizer_size(G: OrthogonalGroup, v: Point) -> int:
    images = G.act(np.array(v.coords))[:, 0, :]
    return int(np.count_nonzero(np.all(images == np.array(v.coords), axis=1)))


def orbit_table(G: OrthogonalGroup) -> list[dict]:
    """Orbit sizes, stabilizer sizes and sphere sizes for every orbit of F_p^d."""
    p, d = G.p, G.d
    coords = all_coords(p, d)
    images = coords_to_index(G.act(coords), p)  # (n, p^d)
    stab = np.count_nonzero(images == np.arange(p**d), axis=0)
    norms = norm_grid(p, d)
    sphere_sizes = np.bincount(norms, minlength=p)
    rows = []
    done = np.zeros(p**d, dtype=bool)
    for v in range(p**d):
        if done[v]:
            continue
        members = np.unique(images[:, v])
        done[members] = True
        rows.append({
            "representative": point_from_index(v, p, d),
            "norm": int(norms[v]),
            "orbit_size": len(members),
            "stabilizer_size": int(stab[v]),
            "sphere_size": int(sphere_sizes[norms[v]]),
            "orbit_stabilizer_ok": len(members) * int(stab[v]) == len(G),
        })
    return rows


@dataclass(frozen=True)
class HingeStabilizer:
    size: int
    empty_slice: bool
    slice_sizes: tuple[int, ...]


def _slice_offsets(E: DenseSet, x: Point, t: int) -> np.ndarray:
    """The points y - x for y in E with ||x - y|| = t."""
    centre = np.array(x.coords, dtype=np.int64)
    pts = E.coords()
    rel = (pts - centre) % E.p
    return rel[(rel * rel).sum(axis=1) % E.p == t % E.p]


def hinge_stabilizer_size(G: OrthogonalGroup, E: DenseSet, x: Point,
                          spec: HingeSpec) -> HingeStabilizer:
    """|M_{x,alpha}|: elements mapping every slice A_i - x onto itself.

    If some slice is empty the hinge is empty and every element preserves it.
    """
    if (G.p, G.d) != (E.p, E.d):
        raise ValueError("group and set live on different spaces")
    slices = [_slice_offsets(E, x, a) for a in spec.alphas]
    sizes = tuple(len(s) for s in slices)
    if min(sizes) == 0:
        return HingeStabilizer(len(G), True, sizes)
    keep = np.ones(len(G), dtype=bool)
    for a, rel in zip(spec.alphas, slices):
        member = np.zeros(E.p**E.d, dtype=bool)
        member[coords_to_index(rel, E.p)] = True
        keep &= member[coords_to_index(G.act(rel), E.p)].all(axis=1)
    return HingeStabilizer(int(np.count_nonzero(keep)), False, sizes)


def dichotomy_rows(G: OrthogonalGroup, E: DenseSet, spec: HingeSpec,
                   rho: float) -> list[dict]:
    """Per centre x in E: hinge size, stabilizer size and which side of
    rho * p^{C(d,2)} the stabilizer falls."""
    d, p = E.d, E.p
    threshold = rho * p ** math.comb(d, 2)
    prods = _hinge_products(E, spec)
    rows = []
    for x_idx, hinge in zip(E.indices(), prods):
        x = point_from_index(int(x_idx), p, d)
        st = hinge_stabilizer_size(G, E, x, spec)
        rows.append({
            "x": x,
            "hinge_size": int(hinge),
            "stabilizer_size": st.size,
            "empty_slice": st.empty_slice,
            "threshold": threshold,
            "branch": "small" if st.size <= threshold else "large",
            "configs_lower_bound": Fraction(int(hinge), st.size),
        })
    return rows
