"""Tree families, the dimension lower bound, cover sums, closed forms."""

import math
from fractions import Fraction

import pytest

from homodyn.fractal import (
    EmptyLevelError,
    assembled_dimension,
    build_tree,
    cover_sum,
    dimension_lower_bound,
)
from homodyn.lattice import enumerate_orbit


def test_single_level_tree_is_root():
    fam = build_tree(1.0, 0.0, 1, [50.0])
    assert fam.levels[0] == [(Fraction(0), Fraction(1))]
    assert fam.level_count() == 1
    assert len(fam.levels[1]) > 0


def test_two_level_tree_kappa_one():
    from bisect import bisect_right

    fam = build_tree(1.0, 0.0, 2, [50.0, 2500.0])
    # every level-1 interval received children (construction would raise)
    assert len(fam.levels[2]) >= len(fam.levels[1])
    # containment and disjointness at every level (parents are sorted)
    for parents, children in zip(fam.levels, fam.levels[1:]):
        lows = [float(lo) for lo, _ in parents]
        for c_lo, c_hi in children:
            i = bisect_right(lows, float(c_lo) + 1e-15) - 1
            lo, hi = parents[max(i, 0)]
            assert lo <= c_lo and c_hi <= hi
        for (a_lo, a_hi), (b_lo, b_hi) in zip(children, children[1:]):
            assert a_hi <= b_lo
    assert fam.exact
    # diameters strictly decreasing, densities in (0, 1]
    assert all(d2 < d1 for d1, d2 in zip(fam.diameters, fam.diameters[1:]))
    assert all(0.0 < d <= 1.0 for d in fam.densities)


def test_tree_determinism():
    a = build_tree(1.0, 0.0, 2, [50.0, 2500.0])
    b = build_tree(1.0, 0.0, 2, [50.0, 2500.0])
    assert a.levels == b.levels


def test_tree_matches_packing():
    # level-2 children of one tree parent against the packing op on the same
    # parent vector and sector scale: identical intervals up to the tree's
    # stricter full-containment filter at the parent boundary
    from homodyn.lattice import pack_subintervals

    fam = build_tree(1.0, 0.0, 2, [10.0, 300.0])
    lo, hi = fam.levels[1][0]
    mid = (lo + hi) / 2  # parent slope a/b by construction
    a, b = mid.numerator, mid.denominator
    tree_children = {
        iv for iv in fam.levels[2] if lo <= iv[0] and iv[1] <= hi
    }
    packed = pack_subintervals(a, b, 1.0, 300.0, 1.0, enumerate_orbit(600.0))
    packed_set = set(packed.intervals)
    assert tree_children <= packed_set
    # only boundary-straddling intervals may differ
    assert len(packed_set - tree_children) <= 4


def test_empty_level_raises():
    with pytest.raises(EmptyLevelError):
        build_tree(3.0, 0.0, 2, [50.0, 2500.0])


def test_schedule_guards():
    with pytest.raises(ValueError):
        build_tree(1.0, 0.0, 2, [50.0, 125000.0])
    with pytest.raises(ValueError):
        build_tree(1.0, 0.0, 6, [2, 4, 8, 16, 32, 64])
    with pytest.raises(ValueError):
        build_tree(1.0, 0.0, 2, [100.0, 50.0])


def test_dimension_bound_full_density():
    bound = dimension_lower_bound(([1.0, 1.0], [1.0, 0.5, 0.25]), ambient_dim=1.0)
    assert bound.value == 1.0
    assert bound.series == (1.0, 1.0)


def test_dimension_bound_two_level_arithmetic():
    # Delta_0 = 1/4, d_1 = 1/16 -> 1 - log 4 / log 16 = 1/2
    bound = dimension_lower_bound(([0.25], [1.0, 1.0 / 16.0]))
    assert bound.value == pytest.approx(0.5, rel=1e-12)


def test_dimension_bound_never_exceeds_ambient():
    fam = build_tree(1.0, 0.0, 2, [50.0, 2500.0])
    bound = dimension_lower_bound(fam)
    assert bound.value <= 1.0
    assert all(v <= 1.0 for v in bound.series)


def test_deepest_level_certificate():
    # every deepest-level interval is within its own half-width of a slope
    # a/b with b in the last sector band: true by construction, checked on
    # endpoints via the stored interval midpoints
    fam = build_tree(1.0, 0.0, 2, [50.0, 2500.0])
    l_last = fam.l_schedule[-1]
    for lo, hi in fam.levels[-1][:200]:
        mid = (lo + hi) / 2  # = a/b by construction
        b = mid.denominator
        assert l_last * math.sqrt(0.5) - 1 <= b <= 2 * l_last
        assert (hi - lo) == 2 * Fraction(1, 18) / Fraction(b) ** 2


def test_cover_sum_threshold_flags():
    for kappa in (1.0, 2.0, 3.0):
        crit = 2.0 / (kappa + 1.0)
        assert not cover_sum(kappa, crit, 1000).convergent  # harmonic-type
        assert not cover_sum(kappa, crit - 0.05, 1000).convergent
        if crit + 0.05 <= 1.0:  # kappa = 1 has its threshold at the delta cap
            assert cover_sum(kappa, crit + 0.05, 1000).convergent


def test_cover_sum_convergent_cauchy():
    a = cover_sum(3.0, 0.6, 1000)
    b = cover_sum(3.0, 0.6, 10000)
    assert abs(b.partial - a.partial) <= 0.05 * b.total
    assert b.partial > a.partial  # monotone in R


def test_cover_sum_divergent_growth():
    # delta (kappa+1) = 1.6 < 2: partial sums grow like R^0.4
    vals = [cover_sum(3.0, 0.4, R).partial for R in (1000, 4000, 16000)]
    slopes = [
        math.log(v2 / v1) / math.log(4.0) for v1, v2 in zip(vals, vals[1:])
    ]
    assert all(s > 0.3 for s in slopes)


def test_assembled_dimension():
    assert assembled_dimension([1.0]) == pytest.approx(3.0)
    assert assembled_dimension([3.0]) == pytest.approx(2.5)
    assert assembled_dimension([1.0, 3.0]) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        assembled_dimension([0.5])
