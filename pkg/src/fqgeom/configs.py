"""Hinge counts, distance vectors, isometry recovery and the simplex census.

A hinge with distances ``alphas = (a_1, ..., a_{r-1})`` is a tuple
``(x, x^1, ..., x^{r-1})`` of points of E with ``||x - x^i|| = a_i``.  Given
the centre, the outer points range independently, so

    |H_{r,alpha}| = sum_{x in E} prod_i c_{a_i}(x),   c_t(x) = |E n (x - S_t)|

and every count here reduces to the sphere-intersection grids ``c_t``.

Simplices are classified by their labeled distance vector
``(a_01, a_02, ..., a_0k, a_12, ..., a_{k-1,k})``, which is a complete
congruence invariant once the vertices span k dimensions.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .fourier import SpectralGrid, forward, inverse
from .geom import (DenseSet, Point, all_coords, norm_grid, point_from_index,
                   sphere_size)
from .limits import TUPLE_BUDGET, BudgetExceeded, budget

log = logging.getLogger(__name__)

MAX_HINGE_ORDER = 8
SEEN_ARRAY_CAP = 1 << 28
SAMPLE_BLOCK = 1 << 15
ROUNDING_TOLERANCE = 1e-6


class DegenerateSimplexError(ValueError):
    pass


class DistanceMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class HingeSpec:
    """Distances ``alphas`` from the hinge centre; ``r = len(alphas) + 1``."""

    alphas: tuple[int, ...]
    p: int

    def __post_init__(self):
        alphas = tuple(int(a) % self.p for a in self.alphas)
        if not alphas:
            raise ValueError("a hinge needs at least one distance (r >= 2)")
        if any(a == 0 for a in alphas):
            raise ValueError("hinge distances must be nonzero")
        object.__setattr__(self, "alphas", alphas)

    @property
    def r(self) -> int:
        return len(self.alphas) + 1


@dataclass(frozen=True)
class DistanceVector:
    entries: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(a) % self.p for a in self.entries))
        k = (math.isqrt(8 * len(self.entries) + 1) - 1) // 2
        if k * (k + 1) // 2 != len(self.entries):
            raise ValueError(f"{len(self.entries)} entries is not a triangular number")

    @property
    def k(self) -> int:
        return (math.isqrt(8 * len(self.entries) + 1) - 1) // 2

    @property
    def code(self) -> int:
        return sum(a * self.p**e for e, a in enumerate(self.entries))

    @classmethod
    def from_code(cls, code: int, p: int, k: int) -> DistanceVector:
        entries = []
        for _ in range(k * (k + 1) // 2):
            code, a = divmod(code, p)
            entries.append(a)
        return cls(tuple(entries), p)

    def matrix(self) -> list[list[int]]:
        """Symmetric (k+1) x (k+1) table with zero diagonal."""
        k = self.k
        m = [[0] * (k + 1) for _ in range(k + 1)]
        for (i, j), a in zip(pair_order(k), self.entries):
            m[i][j] = m[j][i] = a
        return m


def pair_order(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(k + 1) for j in range(i + 1, k + 1)]


# -- sphere intersections and hinges -----------------------------------------

def sphere_intersection_counts(E: DenseSet, t: int, method: str = "direct",
                               backend: str | None = None) -> np.ndarray:
    """``c_t(x) = sum_y E(y) S_t(x - y)`` for every x, as exact int64.

    ``method="fourier"`` convolves through the transform and rounds; if any
    entry sits further than 1e-6 from an integer the direct kernel is used
    instead.
    """
    p, d = E.p, E.d
    t = int(t) % p
    if t == 0:
        raise ValueError("sphere radius must be nonzero")
    if method == "fourier":
        S = SpectralGrid(p, d, (norm_grid(p, d) == t).astype(np.complex128))
        prod = forward(SpectralGrid.from_set(E)).values * forward(S).values * float(p) ** d
        raw = inverse(SpectralGrid(p, d, prod, "frequency")).values.real
        rounded = np.rint(raw)
        if np.abs(rounded - raw).max(initial=0.0) < ROUNDING_TOLERANCE:
            return rounded.astype(np.int64)
        log.warning("transform convolution failed integer validation; using direct")
    elif method != "direct":
        raise ValueError(f"unknown convolution method {method!r}")
    offsets = all_coords(p, d)[norm_grid(p, d) == t]
    return kernels.sphere_convolve(E.mask, offsets, p, d, backend=backend)


def _hinge_products(E: DenseSet, spec: HingeSpec, **kw) -> np.ndarray:
    """``prod_i c_{alpha_i}(x)`` over the members of E, as exact integers."""
    if spec.p != E.p:
        raise ValueError("hinge spec and set use different fields")
    if spec.r > MAX_HINGE_ORDER:
        raise ValueError(f"hinge order r={spec.r} exceeds {MAX_HINGE_ORDER}")
    cache: dict[int, np.ndarray] = {}
    idx = E.indices()
    factors = []
    for a in spec.alphas:
        if a not in cache:
            cache[a] = sphere_intersection_counts(E, a, **kw)[idx]
        factors.append(cache[a])
    peak = max((int(f.max(initial=0)) for f in factors), default=0)
    dtype = np.int64 if max(E.cardinality, 1) * peak ** len(factors) < 2**62 else object
    out = np.ones(len(idx), dtype=dtype)
    for f in factors:
        out = out * f.astype(dtype)
    return out


def count_hinges(E: DenseSet, spec: HingeSpec, **kw) -> int:
    return int(_hinge_products(E, spec, **kw).sum())


def hinge_main_term(set_size: int, r: int, q: int) -> Fraction:
    return Fraction(set_size**r, q ** (r - 1))


def sphere_main_term(E: DenseSet, spec: HingeSpec) -> Fraction:
    """|E|^r prod_i |S_{alpha_i}| / q^{d(r-1)}: the main term before |S| ~ q^{d-1}."""
    term = Fraction(E.cardinality**spec.r)
    for a in spec.alphas:
        term *= Fraction(sphere_size(E.p, E.d, a), E.p**E.d)
    return term


@dataclass(frozen=True)
class HingeReport:
    set_size: int
    exact: int
    main_term: Fraction
    relative_error: float | None
    sphere_main_term: Fraction


def hinge_report(E: DenseSet, spec: HingeSpec, **kw) -> HingeReport:
    exact = count_hinges(E, spec, **kw)
    main = hinge_main_term(E.cardinality, spec.r, E.p)
    rel = float(abs(exact / main - 1)) if main else None
    return HingeReport(E.cardinality, exact, main, rel, sphere_main_term(E, spec))


@dataclass(frozen=True)
class TwoHingeCheck:
    alpha: int
    exact: int
    deviation: Fraction
    bound: float
    ok: bool


def two_hinge_check(E: DenseSet, alpha: int, **kw) -> TwoHingeCheck:
    """|H_2 - q^{-d}|E|^2|S_alpha|| against 2 q^{(d-1)/2} |E|, compared exactly."""
    spec = HingeSpec((alpha,), E.p)
    exact = count_hinges(E, spec, **kw)
    deviation = abs(exact - sphere_main_term(E, spec))
    n, q, d = E.cardinality, E.p, E.d
    ok = deviation**2 <= 4 * n * n * q ** (d - 1)
    return TwoHingeCheck(spec.alphas[0], exact, deviation,
                         2 * q ** ((d - 1) / 2) * n, bool(ok))


def max_hinge_point(E: DenseSet, spec: HingeSpec, **kw) -> tuple[Point, int]:
    """The member of E with the most hinges centred on it (lowest index on ties)."""
    if E.cardinality == 0:
        raise ValueError("empty set has no hinge centre")
    prods = _hinge_products(E, spec, **kw)
    best = max(range(len(prods)), key=lambda i: (prods[i], -i))
    return point_from_index(int(E.indices()[best]), E.p, E.d), int(prods[best])


# -- simplices ---------------------------------------------------------------

def _check_tuple(points: Sequence[Point]) -> tuple[int, int]:
    if not points:
        raise ValueError("need at least one point")
    p, d = points[0].p, points[0].d
    for pt in points:
        if (pt.p, pt.d) != (p, d):
            raise ValueError("points live in different spaces")
    return p, d


def distance_vector(points: Sequence[Point]) -> DistanceVector:
    p, _ = _check_tuple(points)
    k = len(points) - 1
    entries = []
    for i, j in pair_order(k):
        diff = points[i] - points[j]
        entries.append(sum(c * c for c in diff.coords) % p)
    return DistanceVector(tuple(entries), p)


def _row_reduce(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod p and the pivot columns."""
    m = [list(r) for r in rows]
    pivots = []
    ncols = len(m[0]) if m else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        iv = pow(m[r][c], p - 2, p)
        m[r] = [v * iv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_of_simplex(points: Sequence[Point]) -> int:
    """Rank over F_p of the edge vectors ``V_i - V_0``."""
    p, _ = _check_tuple(points)
    rows = [list((v - points[0]).coords) for v in points[1:]]
    if not rows:
        return 0
    return len(_row_reduce(rows, p)[1])


def matinv_mod_p(M: np.ndarray, p: int) -> np.ndarray:
    n = len(M)
    aug = [list(map(int, M[i])) + [int(i == j) for j in range(n)] for i in range(n)]
    red, pivots = _row_reduce(aug, p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular mod p")
    return np.array([row[n:] for row in red], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Isometry:
    """The affine map ``x -> T x + tau`` over F_p, with T orthogonal."""

    matrix: np.ndarray
    translation: Point

    @property
    def p(self) -> int:
        return self.translation.p

    def __call__(self, x: Point) -> Point:
        moved = (self.matrix @ np.array(x.coords, dtype=np.int64)) % self.p
        return Point(tuple(moved), self.p) + self.translation


def recover_isometry(V: Sequence[Point], W: Sequence[Point]) -> Isometry:
    """The unique isometry carrying the spanning simplex V onto W.

    With ``A`` and ``B`` holding the edge vectors of V and W as columns,
    ``T = B A^{-1}``.  Equal distance vectors give equal Gram matrices
    (by polarization, p odd), which forces ``T^T T = I``.
    """
    p, d = _check_tuple(list(V) + list(W))
    if len(V) != len(W):
        raise ValueError("simplices have different vertex counts")
    k = len(V) - 1
    if k != d or rank_of_simplex(V) != d:
        raise DegenerateSimplexError(
            f"source simplex must span F_{p}^{d} with {d + 1} vertices")
    if distance_vector(V) != distance_vector(W):
        raise DistanceMismatchError("distance vectors differ")
    A = np.array([(v - V[0]).coords for v in V[1:]], dtype=np.int64).T
    B = np.array([(w - W[0]).coords for w in W[1:]], dtype=np.int64).T
    if not np.array_equal((A.T @ A) % p, (B.T @ B) % p):
        raise RuntimeError("Gram matrices differ despite equal distances")
    T = (B @ matinv_mod_p(A, p)) % p
    if not np.array_equal((T.T @ T) % p, np.eye(d, dtype=np.int64)):
        raise RuntimeError("recovered map is not orthogonal")
    TV0 = Point(tuple((T @ np.array(V[0].coords)) % p), p)
    return Isometry(T, W[0] - TV0)


def count_congruent_copies(E: DenseSet, a: DistanceVector) -> int:
    """|R_a(E)|: labeled tuples of E whose pairwise norms are exactly ``a``."""
    if a.p != E.p:
        raise ValueError("distance vector and set use different fields")
    k = a.k
    n = E.cardinality
    if n ** (k + 1) > budget(TUPLE_BUDGET):
        raise BudgetExceeded(
            f"|E|^{k + 1} = {n ** (k + 1)} tuples exceeds the budget; "
            "use the sampled census instead")
    if n == 0:
        return 0
    pts = E.coords()
    diff = pts[:, None, :] - pts[None, :, :]
    D = (diff * diff).sum(axis=2) % E.p
    req = a.matrix()

    def extend(chosen: list[int]) -> int:
        j = len(chosen)
        if j == k + 1:
            return 1
        mask = np.ones(n, dtype=bool)
        for i, y in enumerate(chosen):
            mask &= D[y] == req[i][j]
        cands = np.flatnonzero(mask)
        if j == k:
            return len(cands)
        return sum(extend(chosen + [int(y)]) for y in cands)

    return extend([])


# -- census ------------------------------------------------------------------

@dataclass(frozen=True)
class CensusResult:
    distinct_classes: int
    degenerate_tuples: int
    mode: str
    samples: int
    tuples_examined: int
    permutation_classes: int
    codes: tuple[int, ...] = field(repr=False, default=())

    def classes(self, p: int, k: int) -> list[DistanceVector]:
        return [DistanceVector.from_code(c, p, k) for c in self.codes]


def permutation_quotient(codes: np.ndarray, p: int, k: int) -> int:
    """Distinct classes once vertex relabelings are also identified."""
    codes = np.asarray(codes, dtype=np.int64)
    if len(codes) == 0:
        return 0
    pairs = pair_order(k)
    rem = codes.copy()
    entries = np.empty((len(codes), len(pairs)), dtype=np.int64)
    for e in range(len(pairs)):
        rem, entries[:, e] = np.divmod(rem, p)
    weights = p ** np.arange(len(pairs), dtype=np.int64)
    position = {pr: e for e, pr in enumerate(pairs)}
    best = None
    for perm in itertools.permutations(range(k + 1)):
        src = [position[tuple(sorted((perm[i], perm[j])))] for i, j in pairs]
        relabeled = entries[:, src] @ weights
        best = relabeled if best is None else np.minimum(best, relabeled)
    return int(len(np.unique(best)))


def simplex_census(E: DenseSet, k: int, mode: str = "exact", samples: int = 0,
                   seed: int = 0, backend: str | None = None) -> CensusResult:
    """Distinct labeled distance vectors among spanning (k+1)-tuples of E.

    ``mode="exact"`` walks all |E|^{k+1} ordered tuples; ``mode="sampled"``
    classifies ``samples`` uniform tuples and so yields a lower bound.
    """
    if not 0 <= k <= E.d:
        raise ValueError(f"simplex dimension k={k} must lie in [0, d={E.d}]")
    p = E.p
    pts = E.coords()
    n = len(pts)
    space = p ** (k * (k + 1) // 2)
    if mode == "exact":
        total = n ** (k + 1)
        if total > budget(TUPLE_BUDGET):
            raise BudgetExceeded(
                f"{total} tuples exceeds the exact-census budget; use mode='sampled'")
        if space <= SEEN_ARRAY_CAP:
            seen, degenerate = kernels.census_scan(pts, p, k, backend=backend)
            codes = np.flatnonzero(seen)
        else:
            codes, degenerate = _chunked_census(pts, p, k, backend)
        examined = total
    elif mode == "sampled":
        if samples <= 0:
            raise ValueError("sampled census needs samples > 0")
        codes, degenerate = _sampled_census(pts, p, k, samples, seed, backend)
        examined = samples
    else:
        raise ValueError(f"unknown census mode {mode!r}")
    codes = np.asarray(codes, dtype=np.int64)
    return CensusResult(
        distinct_classes=int(len(codes)),
        degenerate_tuples=int(degenerate),
        mode=mode,
        samples=samples if mode == "sampled" else 0,
        tuples_examined=int(examined),
        permutation_classes=permutation_quotient(codes, p, k),
        codes=tuple(int(c) for c in codes),
    )


def _chunked_census(pts, p, k, backend):
    n = len(pts)
    found: set[int] = set()
    degenerate = 0
    total = n ** (k + 1)
    for start in range(0, total, SAMPLE_BLOCK):
        flat = np.arange(start, min(start + SAMPLE_BLOCK, total), dtype=np.int64)
        tuples = np.empty((len(flat), k + 1), dtype=np.int64)
        for pos in range(k, -1, -1):
            flat, tuples[:, pos] = np.divmod(flat, n)
        codes = kernels.classify_tuples(pts, tuples, p, backend=backend)
        degenerate += int(np.count_nonzero(codes < 0))
        found.update(codes[codes >= 0].tolist())
    return sorted(found), degenerate


def _sampled_census(pts, p, k, samples, seed, backend):
    """Fixed-size blocks, each drawn from its own child of the master seed."""
    n = len(pts)
    if n == 0:
        return [], samples
    nblocks = -(-samples // SAMPLE_BLOCK)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    found: set[int] = set()
    degenerate = 0
    for b, child in enumerate(children):
        m = min(SAMPLE_BLOCK, samples - b * SAMPLE_BLOCK)
        tuples = np.random.default_rng(child).integers(0, n, size=(m, k + 1))
        codes = kernels.classify_tuples(pts, tuples, p, backend=backend)
        degenerate += int(np.count_nonzero(codes < 0))
        found.update(codes[codes >= 0].tolist())
    return sorted(found), degenerate

