"""Continued fractions, Diophantine type of reals and of surface points,
geodesic-excursion type fitting, and the explicit exponent calculators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .psl2 import GroupElement
from .surface import SurfacePoint, excursion_profile

_Q_GUARD = 2**62  # convergent denominators stay below this (exact int range)
_NOISE_FLOOR = 1e-15


class DivergentOrbitError(RuntimeError):
    """Geodesic orbit escapes to the cusp linearly (rational direction)."""


# Horizon up to which a float base point tracks the true geodesic: the
# contracting coordinate shrinks like e^{-t} and falls under the double
# epsilon of the slope near t = -ln(2^-52) ~ 36.
_T_RELIABLE = 35.0


@dataclass(frozen=True, slots=True)
class ContinuedFraction:
    """Partial quotients and convergents of a real number.

    quotients[0] is the integer part a0; convergents hold exact integer
    pairs (p_n, q_n).  exact_value is set when the expansion came from a
    prescribed quotient list (then x is its float image).
    """

    x: float
    quotients: tuple
    convergents: tuple
    exact_value: Optional[Fraction] = None
    terminated: bool = False  # stopped at the noise floor / rational input

    def value(self):
        return self.exact_value if self.exact_value is not None else self.x


def _convergents(quotients):
    ps, qs = [], []
    p0, p1 = 1, quotients[0]
    q0, q1 = 0, 1
    ps.append(p1)
    qs.append(q1)
    for a in quotients[1:]:
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        ps.append(p1)
        qs.append(q1)
    return tuple(zip(ps, qs))


def cf_expand(x: float, depth: int) -> ContinuedFraction:
    """Partial quotients of x to the requested depth.

    Stops early at the floating noise floor (|x - p/q| < 1e-15) or when the
    denominators would leave the exact integer range; early termination is
    flagged on the result (rational-input notice).
    """
    if not math.isfinite(x) or depth < 1:
        raise ValueError("need finite x and depth >= 1")
    quotients = [math.floor(x)]
    frac = x - quotients[0]
    terminated = False
    t = frac
    for _ in range(depth):
        conv = _convergents(quotients)
        p, q = conv[-1]
        if abs(x - p / q) < _NOISE_FLOOR or q > _Q_GUARD:
            terminated = True
            break
        if t <= 0.0:
            terminated = True
            break
        t = 1.0 / t
        a = math.floor(t)
        if a < 1:
            terminated = True
            break
        quotients.append(a)
        t -= a
    return ContinuedFraction(
        x=x,
        quotients=tuple(quotients),
        convergents=_convergents(quotients),
        terminated=terminated,
    )


def cf_from_quotients(quotients) -> ContinuedFraction:
    """Exact continued fraction from a prescribed quotient list."""
    quotients = [int(a) for a in quotients]
    if len(quotients) < 1 or any(a < 1 for a in quotients[1:]):
        raise ValueError("quotients after a0 must be positive integers")
    conv = _convergents(quotients)
    if conv[-1][1] > _Q_GUARD:
        raise ValueError("denominators exceed the exact-integer guard")
    p, q = conv[-1]
    val = Fraction(p, q)
    return ContinuedFraction(
        x=float(val), quotients=tuple(quotients), convergents=conv,
        exact_value=val, terminated=True,
    )


def planted_quotients(zeta: float, q_cap: int = 10**9):
    """Quotient list with a_{n+1} ~ q_n^(zeta-1), so |q_n x - p_n| ~ q_n^-zeta."""
    if zeta < 1.0:
        raise ValueError("type exponent must be >= 1")
    quotients = [0, 2]
    q0, q1 = 1, 2
    while True:
        a = max(1, round(q1 ** (zeta - 1.0)))
        q0, q1 = q1, a * q1 + q0
        if q1 > q_cap:
            break
        quotients.append(a)
    return quotients


class TypeEstimate(NamedTuple):
    value: float
    series: tuple  # (n, q_n, zeta_n) per admissible index


def type_estimate(cf: ContinuedFraction) -> TypeEstimate:
    """Approximation-exponent estimate from the convergents.

    zeta_n = -log|q_n x - p_n| / log q_n per index; the reported value is the
    deepest admissible index (terminal exact-zero errors are skipped).  For a
    number of type zeta the series settles toward [1, zeta].
    """
    if len(cf.convergents) < 3:
        raise ValueError("need at least 3 convergents")
    xval = cf.value()
    exact = isinstance(xval, Fraction)
    series = []
    for n, (p, q) in enumerate(cf.convergents):
        if q < 2:
            continue
        if exact:
            num = abs(q * xval.numerator - p * xval.denominator)
            if num == 0:
                continue  # terminal convergent of a rational
            log_err = math.log(num) - math.log(xval.denominator)
        else:
            err = abs(q * xval - p)
            if err <= 0.0:
                continue
            log_err = math.log(err)
        series.append((n, q, -log_err / math.log(q)))
    if not series:
        raise ValueError("no admissible convergent index")
    return TypeEstimate(series[-1][2], tuple(series))


@dataclass(frozen=True, slots=True)
class DiophantineWitness:
    """Bounded-search report on the cusp-orbit vector set of a point.

    Never a proof: the condition ranges over infinitely many vectors, this
    records the extremes seen up to the search bound.
    """

    kappa: float
    search_bound: int
    mu: float            # min |b| over enumerated vectors (0 if an axis vector)
    nu: float            # min |a|^kappa |b| over enumerated vectors
    symmetric: float     # min over vectors of max(|b|, |a|^kappa |b|)
    mu_vector: tuple     # (m, n, a, b) achieving mu
    nu_vector: tuple
    axis_vectors: tuple  # integer (m, n) with b-component exactly ~0
    vectors_checked: int

    @property
    def diophantine_ok(self) -> bool:
        return len(self.axis_vectors) == 0

    def violations(self, mu: float, nu: float, a_comp, b_comp):
        bad = (np.abs(b_comp) < mu) & (np.abs(a_comp) ** self.kappa * np.abs(b_comp) < nu)
        return int(bad.sum())


def _primitive_pairs(bound: int):
    """Sign-canonical primitive integer pairs (m, n), |m|,|n| <= bound."""
    ms, ns = [], []
    # n = 0 row: only (1, 0)
    ms.append(np.array([1], dtype=np.int64))
    ns.append(np.array([0], dtype=np.int64))
    m_range = np.arange(-bound, bound + 1, dtype=np.int64)
    for n in range(1, bound + 1):
        mask = np.gcd(np.abs(m_range), n) == 1
        mm = m_range[mask]
        ms.append(mm)
        ns.append(np.full(mm.shape, n, dtype=np.int64))
    return np.concatenate(ms), np.concatenate(ns)


def point_type_check(p: SurfacePoint, kappa: float, search_bound: int) -> tuple:
    """Witness report for the type-kappa condition at p, plus the raw columns.

    Enumerates the cusp-orbit vectors g^{-1}(m, n) over sign-canonical
    primitive (m, n) up to the bound and reports the per-branch minima, the
    largest symmetric pair value, and any vectors sitting on the b = 0 axis
    (those defeat every positive (mu, nu) outright: periodic horocycle).
    """
    if kappa < 1.0 or search_bound < 10:
        raise ValueError("need kappa >= 1 and search_bound >= 10")
    g = p.rep
    m, n = _primitive_pairs(search_bound)
    # g^{-1} (m, n) = (d m - b n, a n - c m)
    a_comp = g.d * m - g.b * n
    b_comp = g.a * n - g.c * m
    abs_b = np.abs(b_comp)
    prod = np.abs(a_comp) ** kappa * abs_b
    axis = abs_b < 1e-12
    axis_vectors = tuple((int(mm), int(nn)) for mm, nn in zip(m[axis][:16], n[axis][:16]))
    i_mu = int(np.argmin(abs_b))
    i_nu = int(np.argmin(prod))
    sym = np.maximum(abs_b, prod)
    witness = DiophantineWitness(
        kappa=kappa,
        search_bound=search_bound,
        mu=float(abs_b[i_mu]) if not axis.any() else 0.0,
        nu=float(prod[i_nu]) if not axis.any() else 0.0,
        symmetric=float(sym.min()) if not axis.any() else 0.0,
        mu_vector=(int(m[i_mu]), int(n[i_mu]), float(a_comp[i_mu]), float(b_comp[i_mu])),
        nu_vector=(int(m[i_nu]), int(n[i_nu]), float(a_comp[i_nu]), float(b_comp[i_nu])),
        axis_vectors=axis_vectors,
        vectors_checked=int(m.size),
    )
    return witness, a_comp, b_comp


def excursion_type_estimate(p: SurfacePoint, t_max: float, steps: int = 0) -> tuple:
    """Type exponent from the gated excursion profile of the geodesic orbit.

    Fits the record-peak envelope slope m and inverts kappa = (1+m)/(1-m).
    A profile that never enters the cusp gate reports kappa = 1 (bounded
    orbit at this horizon).  A single never-completed excursion rising at
    unit slope raises DivergentOrbitError (rational direction).
    """
    if t_max < 10.0:
        raise ValueError("need t_max >= 10")
    # beyond e^{-t} ~ machine epsilon the float orbit leaves the true one and
    # manufactures spurious excursions; the fit only uses samples before that
    t_fit = min(t_max, _T_RELIABLE)
    if steps <= 0:
        steps = max(500, int(t_fit / 0.05))
    ts, vals = excursion_profile(p, t_fit, steps)
    peaks = []
    run_best = None  # (t, v) best of the current excursion
    for t, v in zip(ts, vals):
        if v > 0.0:
            if run_best is None or v > run_best[1]:
                run_best = (t, v)
        else:
            if run_best is not None:
                peaks.append(run_best)
                run_best = None
    if run_best is not None:
        # excursion still open at the horizon
        if vals[-1] < run_best[1] - 0.5:
            # max already passed, the orbit is descending: a genuine peak
            peaks.append(run_best)
        else:
            t0 = run_best[0] - run_best[1]  # linear ascent started near here
            slope = run_best[1] / (ts[-1] - t0) if ts[-1] > t0 else 1.0
            if not peaks and slope >= 1.0 - 1e-3:
                raise DivergentOrbitError(
                    f"orbit ascends the cusp with slope {slope:.6f} through t_max"
                )
    if not peaks:
        if float(np.max(vals)) == 0.0:
            return 1.0, []  # never entered the gate: bounded, type 1
        raise ValueError("no completed excursion below t_max; increase t_max")
    if len(peaks) == 1:
        t1, v1 = peaks[0]
        slope = max(0.0, v1 / t1 if t1 > 0 else 0.0)
    else:
        arr = np.asarray(peaks)
        slope = float(np.polyfit(arr[:, 0], arr[:, 1], 1)[0])
    slope = min(max(slope, 0.0), 1.0 - 1e-9)
    return (1.0 + slope) / (1.0 - slope), peaks


@dataclass(frozen=True, slots=True)
class ExponentBundle:
    """The explicit exponents: spectral parameter, mixing rate, and the
    sparse-power threshold computed along both published routes."""

    s: float
    epsilon: float
    kappa_mix: float
    beta: float
    gamma0_spectral: float     # min_j s^2 / ((s+4)(kappa_j+4))
    gamma0_progression: float  # min_j 2 beta / (kappa_j+4)
    kappa_list: tuple = field(default=())


def exponent_bundle(s: float, kappa_list, epsilon: float = 1e-3) -> ExponentBundle:
    """Evaluate the exponent chain for spectral parameter s and cusp types.

    epsilon is the slack in the mixing exponent kappa_mix = 2s - epsilon;
    epsilon = 0 is allowed so the two gamma_0 routes can be compared exactly
    (they coincide algebraically at kappa_mix = 2s).
    """
    if not (0.0 < s <= 0.5):
        raise ValueError("spectral parameter must lie in (0, 1/2]")
    if not (0.0 <= epsilon < 2.0 * s):
        raise ValueError("need 0 <= epsilon < 2s")
    kappa_list = tuple(float(k) for k in kappa_list)
    if not kappa_list or any(k < 1.0 for k in kappa_list):
        raise ValueError("cusp exponents must be >= 1")
    kappa_mix = 2.0 * s - epsilon
    beta = s * kappa_mix / (2.0 * (8.0 + kappa_mix))
    g_spec = min(s * s / ((s + 4.0) * (k + 4.0)) for k in kappa_list)
    g_prog = min(2.0 * beta / (k + 4.0) for k in kappa_list)
    return ExponentBundle(
        s=s, epsilon=epsilon, kappa_mix=kappa_mix, beta=beta,
        gamma0_spectral=g_spec, gamma0_progression=g_prog, kappa_list=kappa_list,
    )


def slope_base(x: float) -> GroupElement:
    """A determinant-one representative with top-left/bottom-left ratio x."""
    return GroupElement(x, -1.0, 1.0, 0.0)
