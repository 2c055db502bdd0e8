"""Numpy implementations of the compiled kernels, same signatures.

Tuple classification decides rank through k x k minors rather than the
elimination used by the compiled path, so the two backends cross-check.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

CHUNK = 1 << 16


def sphere_convolve(mask, offsets, p, d):
    mask = np.asarray(mask, dtype=bool)
    grid = mask.reshape((p,) * d, order="F")
    counts = np.zeros((p,) * d, dtype=np.int64)
    for s in np.asarray(offsets, dtype=np.int64):
        counts += np.roll(grid, shift=tuple(int(c) for c in s), axis=tuple(range(d)))
    return counts.reshape(-1, order="F")


@lru_cache(maxsize=None)
def _permutations(k):
    perms = []
    for perm in itertools.permutations(range(k)):
        inversions = sum(1 for i in range(k) for j in range(i + 1, k)
                         if perm[i] > perm[j])
        perms.append((perm, -1 if inversions % 2 else 1))
    return perms


def _full_rank(diffs, p):
    """True where the k rows of each (k, d) matrix are independent mod p."""
    n, k, d = diffs.shape
    if k == 0:
        return np.ones(n, dtype=bool)
    if k > d:
        return np.zeros(n, dtype=bool)
    ok = np.zeros(n, dtype=bool)
    for cols in itertools.combinations(range(d), k):
        sub = diffs[:, :, cols]
        det = np.zeros(n, dtype=np.int64)
        for perm, sign in _permutations(k):
            term = np.ones(n, dtype=np.int64)
            for i in range(k):
                term = (term * sub[:, i, perm[i]]) % p
            det = (det + sign * term) % p
        ok |= det != 0
    return ok


def _codes(pts, p):
    """Distance codes for an (N, k+1, d) coordinate block; -1 if degenerate."""
    n, kp1, _ = pts.shape
    diffs = (pts[:, 1:, :] - pts[:, :1, :]) % p
    good = _full_rank(diffs, p)
    code = np.zeros(n, dtype=np.int64)
    weight = 1
    for i in range(kp1):
        for j in range(i + 1, kp1):
            delta = pts[:, i, :] - pts[:, j, :]
            code += ((delta * delta).sum(axis=1) % p) * weight
            weight *= p
    code[~good] = -1
    return code


def classify_tuples(coords, tuples, p, invtab=None):
    coords = np.asarray(coords, dtype=np.int64)
    tuples = np.asarray(tuples, dtype=np.int64)
    out = np.empty(len(tuples), dtype=np.int64)
    for start in range(0, len(tuples), CHUNK):
        block = tuples[start:start + CHUNK]
        out[start:start + len(block)] = _codes(coords[block], p)
    return out


def census_scan(coords, p, k, invtab=None):
    coords = np.asarray(coords, dtype=np.int64)
    n = len(coords)
    seen = np.zeros(p ** ((k + 1) * k // 2), dtype=np.uint8)
    if n == 0:
        return seen, 0
    total = n ** (k + 1)
    degenerate = 0
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        # digit 0 is the most significant, matching the compiled odometer
        digits = np.empty((len(flat), k + 1), dtype=np.int64)
        rem = flat
        for pos in range(k, -1, -1):
            rem, digits[:, pos] = np.divmod(rem, n)
        codes = _codes(coords[digits], p)
        degenerate += int(np.count_nonzero(codes < 0))
        seen[codes[codes >= 0]] = 1
    return seen, degenerate
