"""Shared oracles and generators for the test suite.

Oracles here are deliberately independent of the library code paths they
check (brute-force searches, direct formula evaluation, numpy matmul).
"""

import math

import numpy as np

from homodyn.psl2 import GroupElement, IwasawaNAK

SEED = 20250809


def rng(salt: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.Philox(SEED + salt))


def random_element(r: np.random.Generator, y_low=1e-2, y_high=1e2) -> GroupElement:
    """Random element via Iwasawa coordinates, y log-uniform."""
    x = r.uniform(-5.0, 5.0)
    y = math.exp(r.uniform(math.log(y_low), math.log(y_high)))
    th = r.uniform(0.0, math.pi)
    return IwasawaNAK(float(x), math.sqrt(y), float(th)).recompose()


def random_gamma_word(r: np.random.Generator, max_len: int = 20):
    """Random word in T, T^-1, S as an exact integer matrix (m11, m12, m21, m22)."""
    m = (1, 0, 0, 1)
    for _ in range(int(r.integers(1, max_len + 1))):
        choice = int(r.integers(0, 3))
        if choice == 0:  # T
            m = (m[0] + m[2], m[1] + m[3], m[2], m[3])
        elif choice == 1:  # T^-1
            m = (m[0] - m[2], m[1] - m[3], m[2], m[3])
        else:  # S
            m = (-m[2], -m[3], m[0], m[1])
    return m


def gamma_to_element(m) -> GroupElement:
    return GroupElement(float(m[0]), float(m[1]), float(m[2]), float(m[3]))


def np_mat(g: GroupElement) -> np.ndarray:
    return np.array([[g.a, g.b], [g.c, g.d]])


def psl_allclose(g: GroupElement, h: GroupElement, tol=1e-9) -> bool:
    A, B = np_mat(g), np_mat(h)
    return min(np.abs(A - B).max(), np.abs(A + B).max()) <= tol


def brute_force_reduce(z: complex, depth: int = 30) -> complex:
    """Oracle: drive z into the fundamental domain by exhaustive T/S greed.

    Independent of the library loop: repeatedly applies the classical
    translation/inversion moves on the complex number only.
    """
    for _ in range(depth * 200):
        moved = False
        k = round(z.real)
        if k != 0:
            z = complex(z.real - k, z.imag)
            moved = True
        if abs(z) < 1.0 - 1e-12:
            z = -1.0 / z
            moved = True
        if not moved:
            return z
    raise RuntimeError("oracle failed to reduce")


def brute_force_cusp_norm(g: GroupElement, bound: int = 60) -> float:
    """Oracle: min |g^{-1}(m, n)| over primitive |m|, |n| <= bound."""
    best = math.inf
    for m in range(-bound, bound + 1):
        for n in range(0, bound + 1):
            if n == 0 and m <= 0:
                continue
            if math.gcd(abs(m), n) != 1:
                continue
            x = g.d * m - g.b * n
            y = g.a * n - g.c * m
            best = min(best, math.hypot(x, y))
    return best
