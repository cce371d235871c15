"""Orbit generation and the averaging constructs: sparse polynomial-time
samples, Haar-reference discrepancy, twisted and progression averages, the
triangle-kernel Fourier identity, and the block decomposition of sparse
index ranges around cusp visits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .psl2 import unipotent
from .report import ExperimentReport
from .surface import SurfacePoint, _reduce_xy, reduce, r_factor
from .goodfn import curve_hit_ratios

FUNDAMENTAL_AREA = math.pi / 3.0
_Y_CUT = 1e6          # cusp truncation for the Haar quadrature
_CHUNK = 8192         # fixed work-partition size, independent of thread count

golden_ratio = (1.0 + math.sqrt(5.0)) / 2.0


class TestFunction:
    """A bounded observable on the quotient, evaluated in reduced coordinates.

    The fixed suite (height band, hyperbolic disc, smooth bump, frame-angle
    weight) keeps every Haar reference integral precomputable; haar_mean is
    the exact (or high-order quadrature) value of the normalized integral.
    """

    def __init__(self, name, kind, params, haar_mean):
        self.name = name
        self.kind = kind
        self.params = params
        self.haar_mean = haar_mean

    def __repr__(self):
        return f"TestFunction({self.name})"

    def values(self, x, y, theta):
        """Vectorized evaluation at reduced coordinates (x, y, theta)."""
        kind = self.kind
        if kind == "height_band":
            return (np.asarray(y) >= self.params["h"]).astype(float)
        if kind == "angle_weight":
            return np.cos(2.0 * np.asarray(theta))
        x0, y0, r = self.params["x0"], self.params["y0"], self.params["r"]
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        dx = x - x0
        dy = y - y0
        arg = 1.0 + (dx * dx + dy * dy) / (2.0 * y * y0)
        d = np.arccosh(np.maximum(arg, 1.0))
        if kind == "hyperbolic_disc":
            return (d <= r).astype(float)
        if kind == "smooth_bump":
            w = np.maximum(1.0 - (d / r) ** 2, 0.0)
            return w * w
        raise ValueError(f"unknown kind {kind}")

    def at_point(self, p: SurfacePoint) -> float:
        z = p.z_reduced
        return float(self.values(z.real, z.imag, p.iwasawa.k_angle))


def _check_disc_embedded(x0, y0, r):
    # Euclidean picture of the hyperbolic disc: center (x0, y0 cosh r),
    # radius y0 sinh r; it must stay inside the fundamental domain
    cx, cy = x0, y0 * math.cosh(r)
    rad = y0 * math.sinh(r)
    if abs(cx) + rad > 0.5 or math.hypot(cx, cy) - rad < 1.0:
        raise ValueError("disc/bump support must embed in the fundamental domain")


def height_band(h: float) -> TestFunction:
    if h < 1.0:
        raise ValueError("height band needs h >= 1")
    return TestFunction(f"band{h:g}", "height_band", {"h": h},
                        haar_mean=3.0 / (math.pi * h))


def angle_weight() -> TestFunction:
    return TestFunction("cos2theta", "angle_weight", {}, haar_mean=0.0)


def hyperbolic_disc(x0: float, y0: float, r: float) -> TestFunction:
    _check_disc_embedded(x0, y0, r)
    mean = 4.0 * math.pi * math.sinh(r / 2.0) ** 2 / FUNDAMENTAL_AREA
    return TestFunction(f"disc({x0:g};{y0:g};{r:g})", "hyperbolic_disc",
                        {"x0": x0, "y0": y0, "r": r}, haar_mean=mean)


def smooth_bump(x0: float, y0: float, r: float) -> TestFunction:
    _check_disc_embedded(x0, y0, r)
    # mean = (2 pi / area) * int_0^r (1 - (d/r)^2)^2 sinh(d) dd  (Gauss-Legendre)
    nodes, weights = np.polynomial.legendre.leggauss(64)
    d = 0.5 * r * (nodes + 1.0)
    vals = (1.0 - (d / r) ** 2) ** 2 * np.sinh(d)
    integral = 0.5 * r * float(weights @ vals)
    return TestFunction(f"bump({x0:g};{y0:g};{r:g})", "smooth_bump",
                        {"x0": x0, "y0": y0, "r": r},
                        haar_mean=2.0 * math.pi * integral / FUNDAMENTAL_AREA)


def default_suite() -> list:
    return [height_band(2.0), hyperbolic_disc(0.0, 2.0, 0.2),
            smooth_bump(0.0, 1.8, 0.25), angle_weight()]


def haar_integral(f: TestFunction, grid=(128, 128, 16), y_cut: float = _Y_CUT) -> float:
    """Midpoint quadrature of f against the normalized invariant measure.

    Coordinates (x, v=1/y, theta): the y-measure dy/y^2 is exactly dv, so the
    cell weights are uniform per x-slab.  The cusp is truncated at y_cut
    (omitted mass < 1e-6 of the total for bounded f).
    """
    nx, ny, ntheta = grid
    if nx < 64 or ny < 64 or ntheta < 16:
        raise ValueError("grid must be at least (64, 64, 16)")
    xs = (np.arange(nx) + 0.5) / nx - 0.5
    thetas = (np.arange(ntheta) + 0.5) * (math.pi / ntheta)
    total = 0.0
    v_cut = 1.0 / y_cut
    for x in xs:
        v_top = 1.0 / math.sqrt(1.0 - x * x)
        v = v_cut + (np.arange(ny) + 0.5) * (v_top - v_cut) / ny
        y = 1.0 / v
        vals = f.values(np.full((ny, ntheta), x), y[:, None], thetas[None, :])
        vals = np.broadcast_to(np.asarray(vals), (ny, ntheta))
        total += vals.sum() * (v_top - v_cut) / ny
    total *= (1.0 / nx) * (math.pi / ntheta)
    return total / (FUNDAMENTAL_AREA * math.pi)


@dataclass
class OrbitSeries:
    """A reduced orbit sample: strictly increasing times and the reduced
    coordinates of every visited point (arrays, one entry per time)."""

    base: SurfacePoint
    gamma: float
    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    thetas: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return int(self.times.size)

    def __post_init__(self):
        n = self.times.size
        if not (self.xs.size == self.ys.size == self.thetas.size == n):
            raise ValueError("coordinate arrays must match the time grid")
        if n > 1 and not (np.diff(self.times) > 0).all():
            raise ValueError("times must be strictly increasing")


def _fill_sparse(rep, times, xs, ys, thetas, lo, hi):
    r11, r12, r21, r22 = rep
    atan2 = math.atan2
    pi = math.pi
    for i in range(lo, hi):
        t = times[i]
        h12 = r11 * t + r12
        h22 = r21 * t + r22
        den = r21 * r21 + h22 * h22
        x = (r11 * r21 + h12 * h22) / den
        y = 1.0 / den
        x, y, m11, m12, m21, m22 = _reduce_xy(x, y)
        xs[i] = x
        ys[i] = y
        thetas[i] = atan2(m21 * r11 + m22 * r21, m21 * h12 + m22 * h22) % pi


def _fill_curve(rep, times, xs, ys, thetas, lo, hi, gamma):
    r11, r12, r21, r22 = rep
    atan2 = math.atan2
    pi = math.pi
    q_exp = 0.75 + gamma
    for i in range(lo, hi):
        xv = times[i]
        quarter = xv ** 0.25
        shear = xv ** q_exp
        h11 = r11 * quarter
        h12 = r11 * shear + r12 / quarter
        h21 = r21 * quarter
        h22 = r21 * shear + r22 / quarter
        den = h21 * h21 + h22 * h22
        x = (h11 * h21 + h12 * h22) / den
        y = 1.0 / den
        x, y, m11, m12, m21, m22 = _reduce_xy(x, y)
        xs[i] = x
        ys[i] = y
        thetas[i] = atan2(m21 * h11 + m22 * h21, m21 * h12 + m22 * h22) % pi


def _run_chunks(fill, n, threads):
    chunks = [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(lambda c: fill(*c), chunks))
    else:
        for c in chunks:
            fill(*c)


def sample_sparse(p: SurfacePoint, gamma: float, N: int, threads: int = 1) -> OrbitSeries:
    """The orbit points p u(n^(1+gamma)) for n = 0..N-1, reduced."""
    if not (0.0 <= gamma <= 0.5) or N < 1:
        raise ValueError("need 0 <= gamma <= 0.5 and N >= 1")
    times = np.arange(N, dtype=float) ** (1.0 + gamma)
    xs = np.empty(N)
    ys = np.empty(N)
    thetas = np.empty(N)
    rep = p.rep.entries
    _run_chunks(lambda lo, hi: _fill_sparse(rep, times, xs, ys, thetas, lo, hi),
                N, threads)
    return OrbitSeries(p, gamma, times, xs, ys, thetas,
                       meta={"kind": "sparse", "N": N, "threads": threads})


def sample_curve(p: SurfacePoint, gamma: float, x_grid, threads: int = 1) -> OrbitSeries:
    """The expanding-translate curve points p (x^(1/4), x^(3/4+gamma); 0, x^(-1/4))."""
    if not (0.0 <= gamma < 0.25):
        raise ValueError("need 0 <= gamma < 1/4")
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.size < 1 or x_grid[0] < 1.0 or (np.diff(x_grid) <= 0).any():
        raise ValueError("x_grid must be increasing with x >= 1")
    n = x_grid.size
    xs = np.empty(n)
    ys = np.empty(n)
    thetas = np.empty(n)
    rep = p.rep.entries
    _run_chunks(
        lambda lo, hi: _fill_curve(rep, x_grid, xs, ys, thetas, lo, hi, gamma),
        n, threads)
    return OrbitSeries(p, gamma, x_grid, xs, ys, thetas,
                       meta={"kind": "curve", "N": n, "threads": threads})


def discrepancy(series: OrbitSeries, suite, dyadic: bool = True) -> ExperimentReport:
    """|empirical mean - Haar mean| per test function and dyadic prefix."""
    n = len(series)
    if n == 0:
        raise ValueError("empty series")
    if dyadic:
        prefixes = [2 ** k for k in range(3, 64) if 2 ** k < n] + [n]
    else:
        prefixes = [n]
    rep = ExperimentReport(
        name="discrepancy",
        params={"N": n, "gamma": series.gamma, **series.meta},
        columns=["function", "N_prefix", "empirical_mean", "haar_mean", "discrepancy"],
    )
    for f in suite:
        vals = f.values(series.xs, series.ys, series.thetas)
        csum = np.cumsum(vals)
        for m in prefixes:
            mean = float(csum[m - 1]) / m
            rep.add_row(f.name, m, mean, f.haar_mean, abs(mean - f.haar_mean))
    return rep


def _orbit_value(rep_entries, t, f: TestFunction) -> float:
    r11, r12, r21, r22 = rep_entries
    h12 = r11 * t + r12
    h22 = r21 * t + r22
    den = r21 * r21 + h22 * h22
    x = (r11 * r21 + h12 * h22) / den
    x, y, m11, m12, m21, m22 = _reduce_xy(x, 1.0 / den)
    theta = math.atan2(m21 * r11 + m22 * r21, m21 * h12 + m22 * h22) % math.pi
    return float(f.values(x, y, theta))


def twisted_average(q: SurfacePoint, T: float, frequency: float, f: TestFunction,
                    quad_points: int = 1000) -> complex:
    """(1/T) int_0^T e^(2 pi i freq t) f(q u(t)) dt by composite midpoint.

    The step honors the oscillation: <= min(0.05, 0.1/|freq|).
    """
    if T < 10.0 or quad_points < 1000:
        raise ValueError("need T >= 10 and quad_points >= 1000")
    if abs(frequency) * T / quad_points > 20.0:
        raise ValueError("undersampled oscillation: raise quad_points")
    step_cap = 0.05 if frequency == 0.0 else min(0.05, 0.1 / abs(frequency))
    m = max(quad_points, int(math.ceil(T / step_cap)))
    h = T / m
    rep = q.rep.entries
    w = 2.0 * math.pi * frequency
    total = 0.0 + 0.0j
    for i in range(m):
        t = (i + 0.5) * h
        total += complex(math.cos(w * t), math.sin(w * t)) * _orbit_value(rep, t, f)
    return total * (h / T)


def progression_average(q: SurfacePoint, K: float, T: float, f: TestFunction) -> float:
    """Centered discrete average of f along the progression {u(K j) : 0 <= Kj < T}."""
    if not (T > K > 0.0):
        raise ValueError("need T > K > 0")
    count = int(math.ceil(T / K))
    rep = q.rep.entries
    total = 0.0
    for j in range(count):
        total += _orbit_value(rep, K * j, f)
    return total / count - f.haar_mean


def progression_point_count(K: float, T: float) -> int:
    return int(math.ceil(T / K))


def fejer_coefficient_check(delta: float, K: float, k_max: int) -> ExperimentReport:
    """Fourier coefficients of the K-periodized triangle kernel.

    The kernel g_delta(x) = max(delta^-2 (delta - |x|), 0) has unit mass;
    its periodization g satisfies sum_k |a_k| = g(0) = 1/delta.  Coefficients
    come from a Riemann-sum DFT at M >> k_max points (aliasing < 1e-9).
    """
    if not (0.0 < delta < K / 2.0) or k_max < 1000:
        raise ValueError("need 0 < delta < K/2 and k_max >= 1000")
    M = 1 << max(18, (16 * k_max - 1).bit_length())
    xj = np.arange(M) * (K / M)
    dist = np.minimum(xj, K - xj)  # distance to the nearest lattice point K*j
    gj = np.maximum(delta - dist, 0.0) / (delta * delta)
    coeffs = np.fft.rfft(gj) / M
    a = coeffs.real
    assert np.abs(coeffs.imag).max() < 1e-9
    g0 = float(gj[0])
    a0 = float(a[0])
    sum_abs = a0 + 2.0 * float(np.abs(a[1 : k_max + 1]).sum())
    rep = ExperimentReport(
        name="fejer_coefficients",
        params={
            "delta": delta, "K": K, "k_max": k_max, "dft_points": M,
            "g_zero": g0, "one_over_delta": 1.0 / delta, "a0": a0,
            "sum_abs": sum_abs, "min_coeff": float(a[: k_max + 1].min()),
        },
        columns=["k", "a_k"],
    )
    for k in range(0, min(k_max, 32) + 1):
        rep.add_row(k, float(a[k]))
    return rep


def piece_decomposition(p: SurfacePoint, gamma: float, eps: float, N: int,
                        kappa: float) -> ExperimentReport:
    """Greedy block cover of [1, N] anchored at indices whose expanding
    translate stays out of the shrinking cusp region.

    Indices n with the curve point inside S_(eps * n^(-1/4 + 1/(kappa+4)))
    are the obstruction set; blocks [M, M + M^(1/2-gamma)/(1+gamma)] start at
    the first good index after the previous block.  Reports covered fraction,
    per-block quality factors r_i, and the sharp quadratic Taylor residual of
    the time parametrization over each block.
    """
    if not (0.0 < gamma < 1.0 / (kappa + 4.0)):
        raise ValueError("need 0 < gamma < 1/(kappa+4)")
    if N < 10:
        raise ValueError("need N >= 10")
    ratios = curve_hit_ratios(p, gamma, kappa, N)
    good = ratios > eps  # outside the shrinking cusp region
    blocks = []
    n = 1
    while n <= N:
        if good[n - 1]:
            length = int(math.floor(n ** (0.5 - gamma) / (1.0 + gamma)))
            end = min(n + length, N)
            blocks.append((n, end))
            n = end + 1
        else:
            n += 1
    covered = sum(end - start + 1 for start, end in blocks)
    rep = ExperimentReport(
        name="piece_decomposition",
        params={
            "gamma": gamma, "eps": eps, "N": N, "kappa": kappa,
            "blocks": len(blocks), "covered_fraction": covered / N,
            "uncovered_fraction": 1.0 - covered / N,
            "obstructed_fraction": float((~good).mean()),
        },
        columns=["M", "block_end", "block_len", "r_i", "taylor_residual",
                 "taylor_bound"],
    )
    one_plus = 1.0 + gamma
    for start, end in blocks:
        M = float(start)
        q_i = reduce(p.rep.compose(unipotent(M ** one_plus)))
        r_i = r_factor(q_i, math.sqrt(M))
        ks = np.arange(0, end - start + 1, dtype=float)
        resid = np.abs((M + ks) ** one_plus - M ** one_plus - one_plus * M ** gamma * ks)
        bound = gamma / (2.0 * one_plus) * M ** (-gamma)
        rep.add_row(start, end, end - start + 1, r_i,
                    float(resid.max()), bound * (1.0 + 1e-9))
    return rep
