"""Points of F_p^d, the norm form, spheres and dense subsets.

Every point of F_p^d has a flat index ``sum_j x_j * p**j`` (little-endian
base p).  Dense sets and spectral grids are stored as flat arrays in this
order; ``grid_view`` reshapes them so that ``grid[x_0, ..., x_{d-1}]``
addresses the same entry.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .field import FieldElement, GF, check_modulus

MAX_DIM = 6
MAX_POINTS = 2**26


class FqsetParseError(ValueError):
    """Malformed fqset input; the message names the offending line."""


def check_space(p: int, d: int) -> None:
    check_modulus(p)
    if not 1 <= d <= MAX_DIM:
        raise ValueError(f"dimension {d} outside [1, {MAX_DIM}]")
    if p**d > MAX_POINTS:
        raise ValueError(f"p^d = {p}^{d} exceeds the dense cap 2^26")


@dataclass(frozen=True)
class Point:
    """A point of F_p^d with canonical integer coordinates."""

    coords: tuple[int, ...]
    p: int

    def __post_init__(self):
        coords = tuple(int(c) % self.p for c in self.coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, p: int, *coords: int) -> Point:
        return cls(tuple(coords), p)

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def elements(self) -> tuple[FieldElement, ...]:
        F = GF(self.p)
        return tuple(F(c) for c in self.coords)

    def _check(self, other: Point) -> None:
        if self.p != other.p or self.d != other.d:
            raise ValueError(
                f"dimension mismatch: F_{self.p}^{self.d} vs F_{other.p}^{other.d}")

    def __add__(self, other: Point) -> Point:
        self._check(other)
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)), self.p)

    def __sub__(self, other: Point) -> Point:
        self._check(other)
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)), self.p)

    def __neg__(self) -> Point:
        return Point(tuple(-a for a in self.coords), self.p)

    def scale(self, c: int) -> Point:
        return Point(tuple(c * a for a in self.coords), self.p)

    def dot(self, other: Point) -> int:
        self._check(other)
        return sum(a * b for a, b in zip(self.coords, other.coords)) % self.p

    @property
    def index(self) -> int:
        return point_index(self.coords, self.p)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __repr__(self):
        return f"Point({self.coords}, p={self.p})"


def point_index(coords: Sequence[int], p: int) -> int:
    idx = 0
    for j, c in enumerate(coords):
        idx += (int(c) % p) * p**j
    return idx


def point_from_index(idx: int, p: int, d: int) -> Point:
    coords = []
    for _ in range(d):
        idx, c = divmod(idx, p)
        coords.append(c)
    return Point(tuple(coords), p)


@lru_cache(maxsize=32)
def all_coords(p: int, d: int) -> np.ndarray:
    """``(p**d, d)`` array: row i holds the coordinates of point index i."""
    idx = np.arange(p**d, dtype=np.int64)
    out = np.empty((p**d, d), dtype=np.int64)
    for j in range(d):
        out[:, j] = (idx // p**j) % p
    out.setflags(write=False)
    return out


def coords_to_index(coords: np.ndarray, p: int) -> np.ndarray:
    """Vectorized ``point_index`` over the last axis."""
    coords = np.asarray(coords, dtype=np.int64) % p
    weights = p ** np.arange(coords.shape[-1], dtype=np.int64)
    return coords @ weights


@lru_cache(maxsize=32)
def norm_grid(p: int, d: int) -> np.ndarray:
    """Flat array of ``||x||`` for every point index."""
    grid = (all_coords(p, d) ** 2).sum(axis=1) % p
    grid.setflags(write=False)
    return grid


def grid_view(flat: np.ndarray, p: int, d: int) -> np.ndarray:
    return flat.reshape((p,) * d, order="F")


def flatten_grid(grid: np.ndarray) -> np.ndarray:
    return grid.reshape(-1, order="F")


def norm(x: Point) -> FieldElement:
    return GF(x.p)(sum(c * c for c in x.coords))


def dist(x: Point, y: Point) -> FieldElement:
    return norm(x - y)


def sphere_indicator(p: int, d: int, t: int) -> np.ndarray:
    """Boolean flat indicator of S_t."""
    return norm_grid(p, d) == int(t) % p


def enumerate_sphere(p: int, d: int, t: int | FieldElement) -> list[Point]:
    """All points of norm ``t`` in index order.

    ``t = 0`` is allowed here; theorem-checking entry points reject it.
    """
    check_space(p, d)
    idx = np.flatnonzero(sphere_indicator(p, d, int(t)))
    coords = all_coords(p, d)
    return [Point(tuple(coords[i]), p) for i in idx]


def sphere_size(p: int, d: int, t: int) -> int:
    return int(np.count_nonzero(sphere_indicator(p, d, t)))


@dataclass(frozen=True, eq=False)
class DenseSet:
    """A subset E of F_p^d stored as a boolean indicator over all points."""

    p: int
    d: int
    mask: np.ndarray = field(repr=False)
    cardinality: int = field(init=False)

    def __post_init__(self):
        check_space(self.p, self.d)
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        if mask.shape != (self.p**self.d,):
            raise ValueError(f"indicator must have {self.p**self.d} entries")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "cardinality", int(np.count_nonzero(mask)))

    @classmethod
    def from_points(cls, p: int, d: int, points: Iterable) -> DenseSet:
        mask = np.zeros(p**d, dtype=bool)
        for pt in points:
            coords = pt.coords if isinstance(pt, Point) else tuple(pt)
            if len(coords) != d:
                raise ValueError(f"point {coords} is not in dimension {d}")
            mask[point_index(coords, p)] = True
        return cls(p, d, mask)

    @classmethod
    def full(cls, p: int, d: int) -> DenseSet:
        return cls(p, d, np.ones(p**d, dtype=bool))

    def __len__(self):
        return self.cardinality

    def __contains__(self, pt) -> bool:
        coords = pt.coords if isinstance(pt, Point) else tuple(pt)
        return bool(self.mask[point_index(coords, self.p)])

    def __iter__(self):
        return iter(self.points())

    def __eq__(self, other):
        if not isinstance(other, DenseSet):
            return NotImplemented
        return (self.p, self.d) == (other.p, other.d) and np.array_equal(
            self.mask, other.mask)

    def __hash__(self):
        return hash((self.p, self.d, self.mask.tobytes()))

    @property
    def size(self) -> int:
        return self.p**self.d

    @property
    def density(self) -> float:
        return self.cardinality / self.size

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def coords(self) -> np.ndarray:
        """``(|E|, d)`` int64 array of member coordinates, index order."""
        return np.ascontiguousarray(all_coords(self.p, self.d)[self.indices()])

    def points(self) -> list[Point]:
        return [Point(tuple(c), self.p) for c in self.coords()]

    def sphere_slice(self, x: Point, t: int) -> SphereSlice:
        return SphereSlice(x, int(t) % self.p, members=[
            y for y in self.points() if dist(x, y) == t])


@dataclass(frozen=True)
class SphereSlice:
    """Points of E on the sphere of radius ``t`` about ``center``."""

    center: Point
    t: int
    members: list[Point]

    def __len__(self):
        return len(self.members)


def random_dense_set(p: int, d: int, rho: float, seed: int = 0) -> DenseSet:
    """Bernoulli(rho) subset of F_p^d from a seeded PCG64 stream."""
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    check_space(p, d)
    rng = np.random.default_rng(seed)
    return DenseSet(p, d, rng.random(p**d) < rho)


def dumps_set(E: DenseSet) -> str:
    lines = [f"{E.p} {E.d}"]
    lines.extend(" ".join(str(int(c)) for c in row) for row in E.coords())
    return "\n".join(lines) + "\n"


def loads_set(text: str) -> DenseSet:
    header = None
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise FqsetParseError(f"non-integer token at line {lineno}") from None
        if header is None:
            if len(values) != 2:
                raise FqsetParseError(f"header must be 'p d' at line {lineno}")
            p, d = values
            try:
                check_space(p, d)
            except ValueError as exc:
                raise FqsetParseError(f"{exc} at line {lineno}") from None
            header = (p, d)
            continue
        p, d = header
        if len(values) != d:
            raise FqsetParseError(
                f"expected {d} coordinates, got {len(values)} at line {lineno}")
        for v in values:
            if v < 0:
                raise FqsetParseError(f"negative coordinate at line {lineno}")
            if v >= p:
                raise FqsetParseError(f"coordinate ≥ p at line {lineno}")
        points.append(values)
    if header is None:
        raise FqsetParseError("missing 'p d' header at line 1")
    return DenseSet.from_points(header[0], header[1], points)


def save_set(E: DenseSet, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps_set(E), encoding="utf-8")


def load_set(path: str | os.PathLike) -> DenseSet:
    return loads_set(Path(path).read_text(encoding="utf-8"))
