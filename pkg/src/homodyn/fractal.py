"""Tree-like interval families from slope packings, the density/diameter
lower bound for Hausdorff dimension, cover-sum upper bounds, and the
closed-form dimension of the non-Diophantine locus."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

_LEVEL_GUARD = 5
_L_GUARD = 5e4        # per-level sector radius guard (2l <= 1e5)
_CHILD_GUARD = 2 * 10**6
_FLOAT_MARGIN = 1e-11  # float pre-check band around exact comparisons


class EmptyLevelError(RuntimeError):
    """Some parent interval received no children (schedule too aggressive)."""


@dataclass
class TreeLikeFamily:
    """Nested disjoint closed-interval levels with density/diameter data.

    levels[j] is a list of (lo, hi) endpoint pairs (Fractions in exact mode,
    floats otherwise); level 0 is [0, 1].  d_j is the largest diameter at
    level j; Delta_j the smallest child-mass fraction over level-j parents.
    """

    kappa: float
    eps: float
    l_schedule: list
    levels: list
    diameters: list
    densities: list
    exact: bool

    def level_count(self) -> int:
        return len(self.levels) - 1


def _child_endpoints_int(a: int, b: int, e: int):
    """Exact endpoints of [a/b +- (1/18) b^-e] as integer pairs (p, q)."""
    q = 18 * b**e
    core = 18 * a * b ** (e - 1)
    return (core - 1, q), (core + 1, q)


def _leq(p1, q1, p2, q2) -> bool:
    """Exact p1/q1 <= p2/q2 for positive denominators."""
    return p1 * q2 <= p2 * q1


def _sector_children(l: float, parent, e, exact: bool):
    """(a, b) pairs of S(l, pi/4, pi/2) whose child interval sits fully
    inside the parent, sorted by slope.

    Targeted sieve over the second coordinate: the alpha-window per beta is
    tiny, so this stays cheap even at sector scales where a full enumeration
    would not fit in memory.  Filtering runs in floats with a safety margin;
    candidates near a boundary are settled by exact integer comparison.
    """
    if exact:
        (plo, qlo), (phi, qhi) = parent
        lo_f, hi_f = plo / qlo, phi / qhi
    else:
        lo_f, hi_f = parent
    b_min = max(1, int(math.floor(l * math.sqrt(0.5))))
    b_max = int(math.ceil(2.0 * l))
    betas = np.arange(b_min, b_max + 1, dtype=np.int64)
    bf = betas.astype(float)
    a_lo = np.ceil(lo_f * bf - 1e-6)
    a_lo = np.maximum(a_lo, 1.0)
    a_lo = np.maximum(a_lo, np.ceil(np.sqrt(np.maximum(l * l - bf * bf, 0.0)) - 1e-9))
    a_hi = np.floor(hi_f * bf + 1e-6)
    a_hi = np.minimum(a_hi, bf - 1.0)
    a_hi = np.minimum(a_hi, np.floor(np.sqrt(4.0 * l * l - bf * bf) + 1e-9))
    sel = np.nonzero(a_lo <= a_hi)[0]
    out = []
    l2, l4 = l * l, 4.0 * l * l
    for i in sel.tolist():
        b = int(betas[i])
        w = (1.0 / 18.0) * float(b) ** (-float(e))
        for a in range(int(a_lo[i]), int(a_hi[i]) + 1):
            r2 = a * a + b * b
            if not (l2 <= r2 <= l4) or math.gcd(a, b) != 1:
                continue
            s = a / b
            if s - w < lo_f - _FLOAT_MARGIN or s + w > hi_f + _FLOAT_MARGIN:
                continue
            if exact and (s - w < lo_f + _FLOAT_MARGIN or s + w > hi_f - _FLOAT_MARGIN):
                (clo_p, clo_q), (chi_p, chi_q) = _child_endpoints_int(a, b, e)
                if not (_leq(plo, qlo, clo_p, clo_q) and _leq(chi_p, chi_q, phi, qhi)):
                    continue
            elif not exact and (s - w < lo_f or s + w > hi_f):
                continue
            out.append((a, b))
    out.sort(key=lambda ab: ab[0] / ab[1])
    return out


def build_tree(kappa: float, eps: float, level_count: int, l_schedule) -> TreeLikeFamily:
    """Recursive slope-interval construction approximating the set of reals
    with approximation exponent kappa + eps, one sector scale per level."""
    if kappa < 1.0 or eps < 0.0:
        raise ValueError("need kappa >= 1 and eps >= 0")
    if not (1 <= level_count <= _LEVEL_GUARD):
        raise ValueError(f"level_count must be in [1, {_LEVEL_GUARD}]")
    l_schedule = [float(l) for l in l_schedule]
    if len(l_schedule) != level_count:
        raise ValueError("schedule length must equal level_count")
    if any(l2 <= l1 for l1, l2 in zip(l_schedule, l_schedule[1:])):
        raise ValueError("schedule must be increasing")
    if any(l > _L_GUARD for l in l_schedule):
        raise ValueError(f"schedule exceeds the enumeration guard 2l <= {2 * _L_GUARD:g}")
    exact = float(kappa + eps).is_integer()
    e = int(kappa + eps) + 1 if exact else kappa + eps + 1.0
    root = ((0, 1), (1, 1)) if exact else (0.0, 1.0)
    parents = [root]
    pair_levels = [[]]  # (a, b) per interval, per level; root has none
    diameters = [1.0]
    densities = []
    total_children = 0
    for l in l_schedule:
        level_pairs = []
        worst_density = math.inf
        max_diam = 0.0
        for parent in parents:
            children = _sector_children(l, parent, e, exact)
            if not children:
                if exact:
                    (plo, qlo), (phi, qhi) = parent
                    span = (plo / qlo, phi / qhi)
                else:
                    span = parent
                raise EmptyLevelError(
                    f"parent ({span[0]:.6g}, {span[1]:.6g}) got no children "
                    f"at sector scale l={l:g}"
                )
            total_children += len(children)
            if total_children > _CHILD_GUARD:
                raise ValueError("tree exceeds the interval-count guard")
            widths = [2.0 / 18.0 * float(b) ** (-float(e)) for _, b in children]
            if exact:
                (plo, qlo), (phi, qhi) = parent
                parent_len = phi / qhi - plo / qlo
            else:
                parent_len = parent[1] - parent[0]
            worst_density = min(worst_density, sum(widths) / parent_len)
            max_diam = max(max_diam, max(widths))
            level_pairs.extend(children)
        level_pairs.sort(key=lambda ab: ab[0] / ab[1])
        # disjointness across parents: float gap with exact fallback
        if exact:
            for (a1, b1), (a2, b2) in zip(level_pairs, level_pairs[1:]):
                gap = a2 / b2 - a1 / b1
                w12 = (1.0 / 18.0) * (float(b1) ** (-e) + float(b2) ** (-e))
                if gap > w12 + _FLOAT_MARGIN:
                    continue
                (_, _), (hi1_p, hi1_q) = _child_endpoints_int(a1, b1, e)
                (lo2_p, lo2_q), (_, _) = _child_endpoints_int(a2, b2, e)
                if not _leq(hi1_p, hi1_q, lo2_p, lo2_q):
                    raise RuntimeError("child intervals overlap across parents")
        else:
            for (a1, b1), (a2, b2) in zip(level_pairs, level_pairs[1:]):
                w12 = (1.0 / 18.0) * (float(b1) ** (-e) + float(b2) ** (-e))
                if a2 / b2 - a1 / b1 < w12 - _FLOAT_MARGIN:
                    raise RuntimeError("child intervals overlap across parents")
        pair_levels.append(level_pairs)
        densities.append(worst_density)
        diameters.append(max_diam)
        if exact:
            parents = [_child_endpoints_int(a, b, e) for a, b in level_pairs]
        else:
            parents = [
                (a / b - (1.0 / 18.0) * float(b) ** (-e),
                 a / b + (1.0 / 18.0) * float(b) ** (-e))
                for a, b in level_pairs
            ]
    # materialize stored endpoints
    levels = [[(Fraction(0), Fraction(1))] if exact else [(0.0, 1.0)]]
    for level_pairs in pair_levels[1:]:
        if exact:
            stored = []
            for a, b in level_pairs:
                (lo_p, lo_q), (hi_p, hi_q) = _child_endpoints_int(a, b, e)
                stored.append((Fraction(lo_p, lo_q), Fraction(hi_p, hi_q)))
        else:
            stored = [
                (a / b - (1.0 / 18.0) * float(b) ** (-e),
                 a / b + (1.0 / 18.0) * float(b) ** (-e))
                for a, b in level_pairs
            ]
        levels.append(stored)
    return TreeLikeFamily(
        kappa=kappa, eps=eps, l_schedule=l_schedule, levels=levels,
        diameters=diameters, densities=densities, exact=exact,
    )


class DimensionBound(NamedTuple):
    value: float
    series: tuple  # per-depth bounds, one entry per usable level


def dimension_lower_bound(fam_or_data, ambient_dim: float = 1.0) -> DimensionBound:
    """Finite-depth evaluation of the density/diameter dimension bound.

    dim >= ambient - sum_i log(1/Delta_i) / log(1/d_(j+1)), evaluated at each
    available depth; the reported value is the deepest one (the limsup of the
    infinite construction is replaced by the last finite level, and the whole
    series is returned so convergence is visible).
    """
    if isinstance(fam_or_data, TreeLikeFamily):
        densities = fam_or_data.densities
        diameters = fam_or_data.diameters
    else:
        densities, diameters = fam_or_data
    if len(densities) < 1 or len(diameters) < len(densities) + 1:
        raise ValueError("need at least two levels (one density, two diameters)")
    series = []
    acc = 0.0
    for j, delta in enumerate(densities):
        acc += math.log(1.0 / delta)
        d_next = diameters[j + 1]
        series.append(ambient_dim - acc / math.log(1.0 / d_next))
    return DimensionBound(series[-1], tuple(series))


@dataclass(frozen=True, slots=True)
class CoverSumResult:
    partial: float
    tail_estimate: float
    exponent: float       # delta (kappa+1) - 2; positive iff convergent
    convergent: bool
    R: float

    @property
    def total(self) -> float:
        return self.partial + self.tail_estimate


def cover_sum(kappa: float, delta: float, R: float) -> CoverSumResult:
    """Partial cover sum over slope intervals of width 2 b^-(kappa+1).

    sum over primitive (a, b), a/b in (0, 1), b <= R of diam^delta, plus a
    geometric tail calibrated on the last dyadic block; flags convergence by
    the sign of delta (kappa+1) - 2.
    """
    if not (0.0 < delta <= 1.0) or kappa < 1.0:
        raise ValueError("need delta in (0, 1] and kappa >= 1")
    R = int(R)
    if not (4 <= R <= 10**5):
        raise ValueError("need 4 <= R <= 1e5")
    # totient sieve
    phi = np.arange(R + 1, dtype=np.int64)
    for p in range(2, R + 1):
        if phi[p] == p:  # prime
            phi[p::p] -= phi[p::p] // p
    b = np.arange(2, R + 1, dtype=float)
    terms = phi[2:].astype(float) * (2.0 * b ** (-(kappa + 1.0))) ** delta
    partial = float(terms.sum())
    e = delta * (kappa + 1.0) - 2.0
    convergent = e > 0.0
    last_block = float(terms[b >= R / 2.0].sum())
    tail = last_block * (2.0 ** -e) / (1.0 - 2.0 ** -e) if convergent else math.inf
    return CoverSumResult(partial=partial, tail_estimate=tail, exponent=e,
                          convergent=convergent, R=float(R))


def assembled_dimension(kappa_list) -> float:
    """Hausdorff dimension of the locus of points failing the vector
    condition at exponents (kappa_1, ..., kappa_k): 2 + 2/min(kappa_j + 1)."""
    ks = [float(k) for k in kappa_list]
    if not ks or any(k < 1.0 for k in ks):
        raise ValueError("exponents must be >= 1")
    return 2.0 + 2.0 / (min(ks) + 1.0)
