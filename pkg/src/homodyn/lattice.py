"""Primitive integer vectors modulo sign: enumeration, annular sector counts,
gap constants, and the slope-interval packing used by the fractal builder.

The vector set is the orbit of (1, 0) under the modular group acting on R^2,
which is exactly the primitive integer pairs identified with their negatives.
Sign normalization: beta > 0, or beta = 0 and alpha > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_RADIUS_GUARD = 1e5
_COUNT_GUARD = 5 * 10**7  # secondary memory guard (density ~ 0.955 / unit area)


class CapacityError(ValueError):
    """Requested enumeration exceeds the configured guards."""


class SectorError(ValueError):
    """Sector incompatible with the enumeration or the canonical half-plane."""


@dataclass(frozen=True, slots=True)
class PrimitiveVectorSet:
    """All sign-canonical primitive pairs with Euclidean norm <= radius."""

    radius: float
    alphas: np.ndarray  # int64, ordered by (beta, alpha)
    betas: np.ndarray

    def __len__(self) -> int:
        return int(self.alphas.size)

    def norms(self) -> np.ndarray:
        return np.hypot(self.alphas.astype(float), self.betas.astype(float))

    def angles(self) -> np.ndarray:
        return np.arctan2(self.betas.astype(float), self.alphas.astype(float))


@dataclass(frozen=True, slots=True)
class SectorQuery:
    """Annular sector l <= r <= 2l, theta1 < theta < theta2 (polar coords)."""

    l: float
    theta1: float
    theta2: float

    def __post_init__(self):
        if not (self.l > 0.0 and 0.0 <= self.theta1 <= self.theta2 < 2.0 * math.pi):
            raise SectorError("need l > 0 and 0 <= theta1 <= theta2 < 2*pi")


def enumerate_orbit(R: float) -> PrimitiveVectorSet:
    """All normalized primitive pairs of norm <= R, by gcd sieve."""
    if not (1.0 <= R <= _RADIUS_GUARD):
        raise CapacityError(f"radius {R} outside [1, {_RADIUS_GUARD:g}]")
    est = 0.955 * R * R
    if est > _COUNT_GUARD:
        raise CapacityError(f"~{est:.2g} vectors exceed the memory guard")
    alphas = [np.array([1], dtype=np.int64)]
    betas = [np.array([0], dtype=np.int64)]
    for b in range(1, int(R) + 1):
        amax = int(math.isqrt(int(R * R - b * b)))
        a = np.arange(-amax, amax + 1, dtype=np.int64)
        a = a[np.gcd(np.abs(a), b) == 1]
        alphas.append(a)
        betas.append(np.full(a.shape, b, dtype=np.int64))
    return PrimitiveVectorSet(
        radius=float(R),
        alphas=np.concatenate(alphas),
        betas=np.concatenate(betas),
    )


def sector_count(vecs: PrimitiveVectorSet, q: SectorQuery) -> int:
    """Exact member count in the annular sector (strict angular inequalities)."""
    if 2.0 * q.l > vecs.radius:
        raise SectorError(
            f"sector outer radius {2 * q.l:g} exceeds enumeration radius {vecs.radius:g}"
        )
    if q.theta2 > math.pi:
        raise SectorError("sector must lie inside the canonical half-plane")
    a = vecs.alphas.astype(float)
    b = vecs.betas.astype(float)
    r2 = a * a + b * b
    theta = np.arctan2(b, a)
    mask = (r2 >= q.l * q.l) & (r2 <= 4.0 * q.l * q.l)
    mask &= (theta > q.theta1) & (theta < q.theta2)
    return int(mask.sum())


def gap_constants(vecs: PrimitiveVectorSet) -> tuple[float, float]:
    """(min |beta| over beta != 0, min nonzero |a1 b2 - a2 b1| over pairs).

    The cross-determinant minimum is scanned over angularly adjacent pairs
    with early exit at 1, the floor for integer orbits (cross-determinants of
    distinct members are nonzero integers).
    """
    if len(vecs) == 0:
        raise ValueError("empty vector set")
    b = vecs.betas
    nz = b[b != 0]
    c_second = float(np.min(np.abs(nz))) if nz.size else math.inf
    order = np.argsort(np.arctan2(b.astype(float), vecs.alphas.astype(float)),
                       kind="stable")
    a_s = vecs.alphas[order]
    b_s = vecs.betas[order]
    cross = np.abs(a_s[:-1] * b_s[1:] - a_s[1:] * b_s[:-1])
    cross = cross[cross != 0]
    c_cross = float(cross.min()) if cross.size else math.inf
    return c_second, c_cross


@dataclass(frozen=True, slots=True)
class PackResult:
    """Child slope intervals packed inside one parent interval."""

    parent: tuple
    intervals: tuple   # ((lo, hi), ...) sorted by slope
    count: int
    disjoint: bool
    ratio: float       # count / (l^2 / beta^(kappa+1))
    l: float
    exact: bool        # endpoints compared in rational arithmetic


def _half_width(beta, kappa: float, C, exact: bool):
    if exact:
        return Fraction(C, 18) / Fraction(int(beta)) ** (int(kappa) + 1)
    return (C / 18.0) * float(beta) ** (-(kappa + 1.0))


def pack_subintervals(alpha: int, beta: int, kappa: float, l: float, C: float,
                      vecs: PrimitiveVectorSet) -> PackResult:
    """Intervals [a/b +- (C/18) b^-(kappa+1)] from sector vectors whose slope
    falls in the parent interval around alpha/beta; verifies disjointness.

    Endpoint arithmetic is exact (Fractions) when kappa and C are integral
    and the denominators stay small enough; float otherwise.
    """
    if beta <= 0 or not (0 < alpha / beta < 1):
        raise ValueError("parent slope must lie in (0, 1)")
    if 2.0 * l > vecs.radius:
        raise SectorError("sector needs 2l <= enumeration radius")
    exact = float(kappa).is_integer() and float(C).is_integer() and vecs.radius <= 1e4
    if exact:
        kappa_i, C_i = int(kappa), int(C)
        w = _half_width(beta, kappa_i, C_i, True)
        lo, hi = Fraction(alpha, beta) - w, Fraction(alpha, beta) + w
    else:
        w = _half_width(beta, kappa, C, False)
        lo, hi = alpha / beta - w, alpha / beta + w
    if not (0 < lo and hi < 1):
        raise ValueError("parent interval must sit inside (0, 1)")

    a = vecs.alphas.astype(float)
    b = vecs.betas.astype(float)
    r2 = a * a + b * b
    theta = np.arctan2(b, a)
    mask = (r2 >= l * l) & (r2 <= 4.0 * l * l)
    mask &= (theta > math.pi / 4.0) & (theta < math.pi / 2.0)
    mask &= (a > float(lo) * b - 1.0) & (a < float(hi) * b + 1.0)  # coarse cut
    cand_a = vecs.alphas[mask]
    cand_b = vecs.betas[mask]

    children = []
    for ca, cb in zip(cand_a.tolist(), cand_b.tolist()):
        if exact:
            slope = Fraction(ca, cb)
            if not (lo <= slope <= hi):
                continue
            cw = _half_width(cb, kappa_i, C_i, True)
        else:
            slope = ca / cb
            if not (lo <= slope <= hi):
                continue
            cw = _half_width(cb, kappa, C, False)
        children.append((slope - cw, slope + cw))
    children.sort()
    disjoint = all(x1_hi <= x2_lo for (_, x1_hi), (x2_lo, _) in zip(children, children[1:]))
    ratio = len(children) / (l * l / float(beta) ** (kappa + 1.0))
    return PackResult(
        parent=(lo, hi),
        intervals=tuple(children),
        count=len(children),
        disjoint=disjoint,
        ratio=ratio,
        l=float(l),
        exact=exact,
    )
