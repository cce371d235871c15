"""Fundamental-domain reduction, cusp norm, flows, and the cusp geometry."""

import math

import numpy as np
import pytest

from homodyn.psl2 import GroupElement, IwasawaNAK, identity, unipotent, diagonal_flow
from homodyn.surface import (
    SEPARATION_RADIUS,
    cusp_norm,
    dist,
    dist_vs_norm_check,
    excursion_profile,
    geodesic_flow,
    horocycle_flow,
    in_S_delta,
    r_factor,
    reduce,
    standard_cusp,
)

from helpers import (
    brute_force_cusp_norm,
    brute_force_reduce,
    gamma_to_element,
    random_element,
    random_gamma_word,
    rng,
)


def from_point(x, y):
    """Element whose orbit point is x + iy (n(x) a(sqrt(y)))."""
    return IwasawaNAK(x, math.sqrt(y), 0.0).recompose()


def test_reduce_identity_and_integer_translate():
    assert reduce(identity()).z_reduced == complex(0.0, 1.0)
    p = reduce(unipotent(1.0))
    assert abs(p.z_reduced - complex(0.0, 1.0)) < 1e-12


def test_reduce_against_word_search_oracle():
    cases = [(100.3, 0.8), (0.49, 0.2), (-3.71, 0.05), (12.125, 37.0)]
    for x, y in cases:
        got = reduce(from_point(x, y)).z_reduced
        want = brute_force_reduce(complex(x, y))
        assert abs(got - want) < 1e-9
    # frozen reference value
    z = reduce(from_point(100.3, 0.8)).z_reduced
    assert z.real == pytest.approx(-0.4110, abs=5e-5)
    assert z.imag == pytest.approx(1.0959, abs=5e-5)


def test_reduce_invariants_and_integer_word():
    r = rng(10)
    for _ in range(300):
        g = random_element(r, y_low=1e-3, y_high=1e3)
        p = reduce(g)
        assert abs(p.z_reduced.real) <= 0.5 + 1e-9
        assert abs(p.z_reduced) >= 1.0 - 1e-9
        # reduced_rep = gamma * rep with integer gamma
        gm = np.array([[p.reduced_rep.a, p.reduced_rep.b],
                       [p.reduced_rep.c, p.reduced_rep.d]])
        inv = np.array([[g.d, -g.b], [-g.c, g.a]])
        word = gm @ inv
        signed = word if abs(word[0, 0] - round(word[0, 0])) < 0.5 else -word
        assert np.abs(signed - np.round(signed)).max() < 1e-6


def test_reduce_idempotent():
    r = rng(11)
    for _ in range(200):
        p = reduce(random_element(r, y_low=1e-3, y_high=1e3))
        q = reduce(p.reduced_rep)
        assert abs(p.z_reduced - q.z_reduced) < 1e-9


def test_reduce_gamma_invariance():
    r = rng(12)
    for _ in range(300):
        g = random_element(r, y_low=1e-2, y_high=1e2)
        gamma = gamma_to_element(random_gamma_word(r))
        assert abs(reduce(gamma @ g).z_reduced - reduce(g).z_reduced) < 1e-8


def test_dist_examples():
    assert dist(reduce(identity())) == 0.0
    assert dist(reduce(from_point(0.0, math.e))) == pytest.approx(1.0)
    assert dist(reduce(from_point(0.0, 2.0))) == pytest.approx(math.log(2.0))


def test_cusp_norm_examples():
    assert cusp_norm(reduce(identity())) == pytest.approx(1.0)
    for t in (0.0, 1.0, 3.3, 7.0):
        p = reduce(diagonal_flow(t))
        assert cusp_norm(p) == pytest.approx(math.exp(-t / 2.0), rel=1e-12)


def test_cusp_norm_matches_enumeration_oracle():
    r = rng(13)
    for _ in range(120):
        g = random_element(r, y_low=5e-2, y_high=20.0)
        lam = cusp_norm(reduce(g))
        if lam <= 2.0:
            assert lam == pytest.approx(brute_force_cusp_norm(g, bound=50), rel=1e-9)


def test_cusp_norm_gamma_invariant():
    r = rng(14)
    for _ in range(200):
        g = random_element(r)
        gamma = gamma_to_element(random_gamma_word(r))
        assert cusp_norm(reduce(gamma @ g)) == pytest.approx(
            cusp_norm(reduce(g)), rel=1e-8
        )


def test_separation_at_most_one_short_vector():
    # at most one cusp-orbit vector of norm <= 0.5, by enumeration
    r = rng(15)
    for _ in range(150):
        g = random_element(r, y_low=1e-2, y_high=50.0)
        count = 0
        for m in range(-40, 41):
            for n in range(0, 41):
                if n == 0 and m <= 0:
                    continue
                if math.gcd(abs(m), n) != 1:
                    continue
                x = g.d * m - g.b * n
                y = g.a * n - g.c * m
                if math.hypot(x, y) <= SEPARATION_RADIUS:
                    count += 1
        assert count <= 1
    assert standard_cusp().d_j == SEPARATION_RADIUS


def test_flows():
    p = reduce(from_point(0.3, 1.7))
    assert abs(geodesic_flow(p, 0.0).z_reduced - p.z_reduced) < 1e-12
    q = horocycle_flow(reduce(identity()), 1.0)
    assert abs(q.z_reduced - complex(0.0, 1.0)) < 1e-12
    for t in (0.5, 1.0, 2.5):
        assert dist(geodesic_flow(reduce(identity()), t)) == pytest.approx(t)
    # flow composition
    r = rng(16)
    for _ in range(100):
        p = reduce(random_element(r))
        s, t = r.uniform(-3, 3), r.uniform(-3, 3)
        a = geodesic_flow(geodesic_flow(p, s), t)
        b = geodesic_flow(p, s + t)
        assert abs(a.z_reduced - b.z_reduced) < 1e-8


def test_in_S_delta():
    p0 = reduce(identity())
    assert not in_S_delta(p0, 0.5)
    assert in_S_delta(p0, 1.0)  # boundary inclusive
    assert in_S_delta(geodesic_flow(p0, 4.0), 0.5)  # norm e^-2


def test_r_factor():
    p0 = reduce(identity())
    for T in (2.0, 10.0, 1e3):
        assert r_factor(p0, T) == pytest.approx(1.0, rel=1e-9)
    r = rng(17)
    for _ in range(50):
        q = reduce(random_element(r))
        T = math.exp(r.uniform(0.1, 6.0))
        assert r_factor(q, T) <= T * (1 + 1e-12)


def test_excursion_profile_identity_orbit():
    ts, vals = excursion_profile(reduce(identity()), 8.0, 401)
    assert (vals >= 0.0).all()
    gate_t = 2.0 * math.log(2.0)
    inside = ts >= gate_t + 0.05
    assert np.allclose(vals[inside], ts[inside], atol=1e-8)
    assert (vals[ts < gate_t - 0.05] == 0.0).all()


def test_dist_vs_norm_report():
    rep = dist_vs_norm_check(3000, seed=7)
    assert rep.rows, "no samples fell in the cusp region"
    used, rmin, rmax, rmean, spread = rep.rows[0]
    assert used >= 300
    assert 0.0 < rmin <= rmax
    assert spread <= 10.0
    # on-axis closed form: ratio == 1 at height y >= 2 exactly
    for y in (4.0, 9.0, 25.0):
        p = reduce(from_point(0.0, y))
        assert math.exp(dist(p)) * cusp_norm(p) ** 2 == pytest.approx(1.0, rel=1e-9)


def test_reduce_rejects_degenerate_input():
    import pytest as _pytest
    from homodyn.surface import ReductionError
    from homodyn.psl2 import GroupElement

    g = GroupElement(1e200, 0.0, 0.0, 1e-200)  # orbit point overflows
    with _pytest.raises(ReductionError):
        reduce(g)
