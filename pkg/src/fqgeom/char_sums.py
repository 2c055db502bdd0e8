"""Gauss sums, Kloosterman/Salie sums and the closed-form sphere transform."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .field import FieldElement, chi_table, inverse_table, legendre_table
from .fourier import SpectralGrid, forward
from .geom import Point, norm_grid, sphere_indicator


class MultChar(enum.Enum):
    """The multiplicative characters a Kloosterman sum is twisted by."""

    TRIVIAL = "trivial"
    QUADRATIC = "quadratic"

    def table(self, p: int) -> np.ndarray:
        if self is MultChar.TRIVIAL:
            t = np.ones(p, dtype=np.int64)
            t[0] = 0
            return t
        return legendre_table(p)


def _residue(x) -> tuple[int, int | None]:
    if isinstance(x, FieldElement):
        return x.value, x.p
    return int(x), None


def gauss_sum(j: FieldElement | int, p: int | None = None) -> complex:
    """sum_{c in F_p} chi(j c^2), for j != 0."""
    j, fp = _residue(j)
    p = p or fp
    if p is None:
        raise ValueError("modulus required for an integer argument")
    if j % p == 0:
        raise ValueError("gauss_sum needs j != 0 (the sum degenerates to p)")
    c = np.arange(p, dtype=np.int64)
    return complex(chi_table(p)[(j * c * c) % p].sum())


def quadratic_gauss_constant(p: int) -> complex:
    """Q = gauss_sum(1) / sqrt(p): a unit in {1, -1, i, -i}."""
    return gauss_sum(1, p) / math.sqrt(p)


def kloosterman(a: FieldElement | int, psi: MultChar = MultChar.TRIVIAL,
                p: int | None = None) -> complex:
    """K(a) = sum_{s != 0} chi(a s + s^{-1}) psi(s)."""
    a, fp = _residue(a)
    p = p or fp
    if p is None:
        raise ValueError("modulus required for an integer argument")
    s = np.arange(1, p, dtype=np.int64)
    phase = (a * s + inverse_table(p)[s]) % p
    return complex((chi_table(p)[phase] * psi.table(p)[s]).sum())


def kloosterman_all(p: int, psi: MultChar) -> np.ndarray:
    """K(a) for every a in F_p, as a length-p complex array."""
    s = np.arange(1, p, dtype=np.int64)
    a = np.arange(p, dtype=np.int64)[:, None]
    phase = (a * s + inverse_table(p)[s]) % p
    return (chi_table(p)[phase] * psi.table(p)[s]).sum(axis=1)


def _sphere_kernel_sum(p: int, d: int, t: int, l_norms: np.ndarray) -> np.ndarray:
    """sum_{j != 0} chi(||l||/(4j) + j t) eta^d(-j), vectorized over ||l||."""
    j = np.arange(1, p, dtype=np.int64)
    inv4j = inverse_table(p)[(4 * j) % p]
    phase = (np.asarray(l_norms, dtype=np.int64)[:, None] * inv4j + j * t) % p
    eta = legendre_table(p)[(-j) % p] ** (d % 2)
    return (chi_table(p)[phase] * eta).sum(axis=1)


def sphere_hat_closed_form(t: FieldElement | int, l: Point) -> complex:
    """Fourier coefficient of the sphere S_t at frequency l, in closed form.

    Evaluates  p^{-1} delta(l) + Q^d p^{-(d+2)/2} sum_{j != 0}
    chi(||l||/(4j) + j t) eta^d(-j)  with Q computed from gauss_sum(1).
    """
    p, d = l.p, l.d
    t = int(t) % p
    lnorm = sum(c * c for c in l.coords) % p
    delta = 1.0 if not any(l.coords) else 0.0
    Qd = quadratic_gauss_constant(p) ** d
    s = _sphere_kernel_sum(p, d, t, np.array([lnorm]))[0]
    return complex(delta / p + Qd * p ** (-(d + 2) / 2) * s)


def sphere_hat_closed_form_grid(p: int, d: int, t: int) -> np.ndarray:
    """Closed form evaluated at every frequency, flat index order."""
    norms = norm_grid(p, d)
    per_norm = _sphere_kernel_sum(p, d, t % p, np.arange(p))
    Qd = quadratic_gauss_constant(p) ** d
    out = Qd * p ** (-(d + 2) / 2) * per_norm[norms]
    out[0] += 1.0 / p
    return out


def sphere_hat_direct(p: int, d: int, t: int, method: str = "naive") -> np.ndarray:
    """Forward transform of the sphere indicator."""
    f = SpectralGrid(p, d, sphere_indicator(p, d, t).astype(np.complex128))
    return forward(f, method).values


@dataclass(frozen=True)
class DecayAudit:
    p: int
    d: int
    max_ratio: float
    argmax_t: int
    argmax_m: int
    closed_form_error: float
    per_t: tuple[float, ...]

    @property
    def ok(self) -> bool:
        return self.max_ratio <= 2 + 1e-6


def sphere_hat_decay_audit(p: int, d: int) -> DecayAudit:
    """Max over t != 0, m != 0 of p^{(d+1)/2} |S_t^(m)|, via the direct transform.

    Also records the largest deviation between the direct transform and the
    closed form over the same (t, m) range, including m = 0.
    """
    scale = p ** ((d + 1) / 2)
    best = (-1.0, 0, 0)
    err = 0.0
    per_t = []
    for t in range(1, p):
        direct = sphere_hat_direct(p, d, t)
        err = max(err, float(np.abs(direct - sphere_hat_closed_form_grid(p, d, t)).max()))
        mags = np.abs(direct[1:]) * scale
        k = int(np.argmax(mags))
        per_t.append(float(mags[k]))
        if mags[k] > best[0]:
            best = (float(mags[k]), t, k + 1)
    return DecayAudit(p, d, best[0], best[1], best[2], err, tuple(per_t))


def weil_ratio(p: int, psi: MultChar) -> tuple[float, int]:
    """max_{a != 0} |K(a)| / sqrt(p) and the maximizing a."""
    mags = np.abs(kloosterman_all(p, psi)[1:])
    k = int(np.argmax(mags))
    return float(mags[k] / math.sqrt(p)), k + 1

