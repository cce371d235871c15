"""The modular surface: quotient of PSL(2,R) by PSL(2,Z).

Fundamental-domain reduction, the distance-to-base-point functional, the
shortest-cusp-vector norm d(p), cusp regions S_delta, and the geodesic and
horocycle flows projected to the quotient.

The lattice is fixed to PSL(2,Z): one cusp at i*infinity, represented by the
identity scaling matrix, width one.  The CuspData record keeps the k-cusp
shape of the interfaces so finite-index subgroups can be added later.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .psl2 import (
    GroupElement,
    IwasawaNAK,
    diagonal_flow,
    hyperbolic_distance,
    identity,
    unipotent,
)
from .report import ExperimentReport

BASE_POINT = complex(0.0, 1.0)  # reference point p0 = i
# Radius below which at most one cusp-orbit vector can live (separation
# constant of the single cusp); also the cusp-neighborhood gate for the
# excursion profile.  0.5 < 1 = the unimodular covolume bound.
SEPARATION_RADIUS = 0.5
CUSP_GATE = 0.5

_MAX_REDUCE_STEPS = 10_000


class ReductionError(RuntimeError):
    """Fundamental-domain reduction failed to converge (degenerate input)."""


@dataclass(frozen=True, slots=True)
class CuspData:
    """Per-cusp data: scaling matrix, horocyclic width, separation radius."""

    sigma: GroupElement
    omega_width: float
    d_j: float

    def __post_init__(self):
        if self.d_j <= 0.0:
            raise ValueError("separation radius must be positive")


def standard_cusp() -> CuspData:
    return CuspData(identity(), 1.0, SEPARATION_RADIUS)


def _reduce_xy(x: float, y: float):
    """Drive z = x + iy into {|Re| <= 1/2, |z| >= 1} by T/S moves.

    Returns (x', y', m11, m12, m21, m22) where the m's are the exact integer
    word matrix applied on the left.  Deterministic: same floats, same path.
    """
    m11 = 1
    m12 = 0
    m21 = 0
    m22 = 1
    for _ in range(_MAX_REDUCE_STEPS):
        k = round(x)
        if k:
            x -= k
            m11 -= k * m21
            m12 -= k * m22
        n2 = x * x + y * y
        if n2 < 1.0 - 1e-12:
            x, y = -x / n2, y / n2
            m11, m12, m21, m22 = -m21, -m22, m11, m12
        else:
            return x, y, m11, m12, m21, m22
    raise ReductionError(f"no convergence after {_MAX_REDUCE_STEPS} steps (y ~ {y:.3g})")


def _lattice_min_sq(u1: float, u2: float, v1: float, v2: float) -> float:
    """Squared length of the shortest nonzero vector of the lattice (u, v).

    Plain Lagrange/Gauss reduction of a planar basis; O(log) iterations.
    """
    nu = u1 * u1 + u2 * u2
    nv = v1 * v1 + v2 * v2
    for _ in range(256):
        if nu < nv:
            u1, u2, v1, v2 = v1, v2, u1, u2
            nu, nv = nv, nu
        mu = round((u1 * v1 + u2 * v2) / nv)
        if mu == 0:
            return nv
        u1 -= mu * v1
        u2 -= mu * v2
        nu = u1 * u1 + u2 * u2
    return min(nu, nv)


def cusp_norm_entries(a: float, b: float, c: float, d: float) -> float:
    """d(p) for the point with representative (a, b; c, d).

    Equals the shortest-vector length of the lattice g^{-1} Z^2 (the minimum
    of the cusp-orbit vector set is attained on a primitive vector), computed
    by Gauss reduction of the columns of g^{-1}.
    """
    # g^{-1} = (d, -b; -c, a); columns (d, -c) and (-b, a)
    return math.sqrt(_lattice_min_sq(d, -c, -b, a))


@dataclass(frozen=True, slots=True)
class SurfacePoint:
    """A point of the quotient with a cached fundamental-domain representative."""

    rep: GroupElement
    reduced_rep: GroupElement
    z_reduced: complex
    iwasawa: IwasawaNAK

    def dist(self) -> float:
        """Hyperbolic distance from the base point i to the projected point."""
        return hyperbolic_distance(BASE_POINT, self.z_reduced)

    def cusp_norm(self) -> float:
        g = self.rep
        return cusp_norm_entries(g.a, g.b, g.c, g.d)

    def translate(self, h: GroupElement) -> "SurfacePoint":
        return reduce(self.rep.compose(h))


def reduce(g: GroupElement) -> SurfacePoint:
    """Reduce Gamma*g: pick the representative over the standard domain."""
    try:
        z = g.mobius(BASE_POINT)
    except ZeroDivisionError:
        raise ReductionError("orbit point under/overflows double range") from None
    if not (z.imag > 0.0 and math.isfinite(z.imag) and math.isfinite(z.real)):
        raise ReductionError(f"degenerate orbit point {z}")
    x, y, m11, m12, m21, m22 = _reduce_xy(z.real, z.imag)
    word = GroupElement(float(m11), float(m12), float(m21), float(m22))
    reduced = word.compose(g)
    return SurfacePoint(g, reduced, complex(x, y), reduced.iwasawa())


def dist(p: SurfacePoint) -> float:
    return p.dist()


def cusp_norm(p) -> float:
    """d(p): minimal Euclidean norm over the cusp-orbit vectors of p.

    Accepts a SurfacePoint or a raw GroupElement representative.
    """
    if isinstance(p, SurfacePoint):
        return p.cusp_norm()
    return cusp_norm_entries(p.a, p.b, p.c, p.d)


def in_S_delta(p, delta: float) -> bool:
    """Membership in the cusp region S_delta = {d(p) <= delta} (boundary in)."""
    if delta <= 0.0:
        return False
    return cusp_norm(p) <= delta


def geodesic_flow(p: SurfacePoint, t: float) -> SurfacePoint:
    return reduce(p.rep.compose(diagonal_flow(t)))


def horocycle_flow(p: SurfacePoint, t: float) -> SurfacePoint:
    return reduce(p.rep.compose(unipotent(t)))


def r_factor(q: SurfacePoint, T: float) -> float:
    """Equidistribution quality parameter T * exp(-dist(g_{log T} q))."""
    if T < 1.0:
        raise ValueError("r_factor needs T >= 1")
    return T * math.exp(-geodesic_flow(q, math.log(T)).dist())


def excursion_profile(p: SurfacePoint, t_max: float, steps: int):
    """Sampled cusp-excursion height along the geodesic orbit.

    Returns (times, values) where values[i] is dist(g_t p) when the orbit is
    inside the gated cusp neighborhood {d <= CUSP_GATE} and 0 outside.
    """
    if t_max <= 0.0 or steps < 2:
        raise ValueError("need t_max > 0 and steps >= 2")
    ts = np.linspace(0.0, t_max, steps)
    vals = np.empty(steps)
    g = p.rep
    for i, t in enumerate(ts):
        e = math.exp(0.5 * t)
        # right-translate by diag(e, 1/e) without building objects
        a, b, c, d = g.a * e, g.b / e, g.c * e, g.d / e
        if cusp_norm_entries(a, b, c, d) <= CUSP_GATE:
            den = c * c + d * d
            x = (a * c + b * d) / den
            y = 1.0 / den
            xr, yr, *_ = _reduce_xy(x, y)
            vals[i] = hyperbolic_distance(BASE_POINT, complex(xr, yr))
        else:
            vals[i] = 0.0
    return ts, vals


def random_points(sample_count: int, rng: np.random.Generator):
    """Iwasawa-coordinate samples approximating truncated Haar measure.

    x uniform on [-1/2, 1/2], theta uniform on [0, pi), y with density 1/y^2
    on [sqrt(3)/2, 100].
    """
    xs = rng.uniform(-0.5, 0.5, sample_count)
    thetas = rng.uniform(0.0, math.pi, sample_count)
    a = math.sqrt(3.0) / 2.0
    bnd = 100.0
    u = rng.uniform(0.0, 1.0, sample_count)
    ys = 1.0 / (1.0 / a - u * (1.0 / a - 1.0 / bnd))
    points = []
    for x, y, th in zip(xs, ys, thetas):
        g = IwasawaNAK(float(x), math.sqrt(float(y)), float(th)).recompose()
        points.append(reduce(g))
    return points


def dist_vs_norm_check(sample_count: int, seed: int = 0) -> ExperimentReport:
    """Empirical two-sided comparison of exp(dist(p)) with 1/d(p)^2.

    Samples truncated-Haar points, restricts to d(p) <= 0.5, and reports the
    ratio exp(dist) * d^2 (min / max / mean).  The comparability constant is
    empirical; only positivity and boundedness are structural.
    """
    if sample_count < 100:
        raise ValueError("need sample_count >= 100")
    rng = np.random.default_rng(np.random.Philox(seed))
    ratios = []
    for p in random_points(sample_count, rng):
        dn = p.cusp_norm()
        if dn <= 0.5:
            ratios.append(math.exp(p.dist()) * dn * dn)
    rep = ExperimentReport(
        name="dist_vs_norm",
        params={"sample_count": sample_count, "seed": seed, "used": len(ratios)},
        columns=["used", "ratio_min", "ratio_max", "ratio_mean", "spread"],
        notes=(
            "sampling law: x ~ U[-1/2,1/2], theta ~ U[0,pi), "
            "y ~ 1/y^2 on [sqrt(3)/2, 100]; restricted to d(p) <= 0.5"
        ),
    )
    if ratios:
        arr = np.asarray(ratios)
        rep.add_row(
            len(ratios),
            float(arr.min()),
            float(arr.max()),
            float(arr.mean()),
            float(arr.max() / arr.min()),
        )
    return rep
