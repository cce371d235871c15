"""Arithmetic of PSL(2,R) and hyperbolic-plane primitives.

Group elements are plain 2x2 float matrices of determinant one, stored
modulo global sign.  Everything here is a pure value: elements are
immutable by convention and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

# |det - 1| tolerated after any operation; beyond the trigger the matrix is
# rescaled by 1/sqrt(det) (long orbit loops accumulate rounding, so we repair
# drift instead of rejecting).
DET_TOL = 1e-9
_RENORM_TRIGGER = 1e-12


class GroupError(ValueError):
    """Invalid group element or invalid parameters for a group operation."""


class GroupElement:
    """A 2x2 real matrix (a, b; c, d) with ad - bc = 1, modulo sign.

    The stored representative has its first nonzero entry (in the order
    a, b, c, d) positive, which pins the PSL representative deterministically.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: float, b: float, c: float, d: float):
        det = a * d - b * c
        if not math.isfinite(det) or det <= 0.0:
            raise GroupError(f"matrix is not in PSL(2,R): det = {det}")
        if abs(det - 1.0) > _RENORM_TRIGGER:
            r = math.sqrt(det)
            a /= r
            b /= r
            c /= r
            d /= r
        # canonical sign: first nonzero of (a, b, c, d) positive
        if a != 0.0:
            flip = a < 0.0
        elif b != 0.0:
            flip = b < 0.0
        elif c != 0.0:
            flip = c < 0.0
        else:
            flip = d < 0.0
        if flip:
            a, b, c, d = -a, -b, -c, -d
        self.a = a
        self.b = b
        self.c = c
        self.d = d

    @property
    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def compose(self, other: "GroupElement") -> "GroupElement":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return GroupElement(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    __matmul__ = compose

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def mobius(self, z: complex) -> complex:
        """Fractional-linear action on the upper half-plane.

        The imaginary part is computed as y/|cz+d|^2, which keeps it
        strictly positive even deep in the cusp.
        """
        den = self.c * z + self.d
        n2 = den.real * den.real + den.imag * den.imag
        num = (self.a * z + self.b) * den.conjugate()
        return complex(num.real / n2, z.imag / n2)

    def vector_act(self, v: tuple[float, float]) -> tuple[float, float]:
        """Linear action on R^2, result canonicalized modulo sign."""
        x = self.a * v[0] + self.b * v[1]
        y = self.c * v[0] + self.d * v[1]
        if x < 0.0 or (x == 0.0 and y < 0.0):
            x, y = -x, -y
        return (x, y)

    def iwasawa(self) -> "IwasawaNAK":
        """Unique decomposition g = n(s) a(alpha) k(theta), theta in [0, pi)."""
        c, d = self.c, self.d
        r2 = c * c + d * d
        s = (self.a * c + self.b * d) / r2
        theta = math.atan2(c, d) % math.pi
        if theta >= math.pi:  # fold the float boundary case back to 0
            theta = 0.0
        return IwasawaNAK(s, 1.0 / math.sqrt(r2), theta)

    def almost_equal(self, other: "GroupElement", tol: float = 1e-9) -> bool:
        """Entrywise closeness modulo global sign."""
        dp = max(abs(x - y) for x, y in zip(self.entries, other.entries))
        dm = max(abs(x + y) for x, y in zip(self.entries, other.entries))
        return min(dp, dm) <= tol

    def __repr__(self) -> str:
        return f"GroupElement({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


class IwasawaNAK(NamedTuple):
    """NAK coordinates: g = n(s) a(alpha) k(theta) with alpha > 0, theta in [0, pi)."""

    n_shift: float
    a_scale: float
    k_angle: float

    def recompose(self) -> GroupElement:
        s, alpha, theta = self
        ct, st = math.cos(theta), math.sin(theta)
        inv = 1.0 / alpha
        return GroupElement(
            alpha * ct + s * inv * st,
            -alpha * st + s * inv * ct,
            inv * st,
            inv * ct,
        )


@dataclass(frozen=True, slots=True)
class UpperHalfPoint:
    """A point x + iy of the hyperbolic upper half-plane (y > 0 strictly)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and self.y > 0.0):
            raise GroupError(f"not an upper half-plane point: {self.x} + {self.y}i")

    @property
    def as_complex(self) -> complex:
        return complex(self.x, self.y)


def identity() -> GroupElement:
    return GroupElement(1.0, 0.0, 0.0, 1.0)


def unipotent(t: float) -> GroupElement:
    """The horocyclic shear u(t) = (1, t; 0, 1)."""
    if not math.isfinite(t):
        raise GroupError(f"non-finite flow time {t}")
    return GroupElement(1.0, t, 0.0, 1.0)


def diagonal_flow(t: float) -> GroupElement:
    """The geodesic-flow element diag(e^{t/2}, e^{-t/2})."""
    if not math.isfinite(t):
        raise GroupError(f"non-finite flow time {t}")
    e = math.exp(0.5 * t)
    return GroupElement(e, 0.0, 0.0, 1.0 / e)


def rotation(theta: float) -> GroupElement:
    """The rotation k(theta), taken modulo sign (k(theta) = k(theta + pi))."""
    if not math.isfinite(theta):
        raise GroupError(f"non-finite angle {theta}")
    return GroupElement(math.cos(theta), -math.sin(theta), math.sin(theta), math.cos(theta))


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return g.compose(h)


def inverse(g: GroupElement) -> GroupElement:
    return g.inverse()


def mobius_act(g: GroupElement, z: UpperHalfPoint) -> UpperHalfPoint:
    w = g.mobius(z.as_complex)
    return UpperHalfPoint(w.real, w.imag)


def vector_act(g: GroupElement, v: tuple[float, float]) -> tuple[float, float]:
    return g.vector_act(v)


def iwasawa_nak(g: GroupElement) -> IwasawaNAK:
    return g.iwasawa()


def hyperbolic_distance(z1, z2) -> float:
    """Hyperbolic distance on the upper half-plane.

    Accepts UpperHalfPoint or complex arguments.
    """
    if isinstance(z1, UpperHalfPoint):
        z1 = z1.as_complex
    if isinstance(z2, UpperHalfPoint):
        z2 = z2.as_complex
    dx = z1.real - z2.real
    dy = z1.imag - z2.imag
    arg = 1.0 + (dx * dx + dy * dy) / (2.0 * z1.imag * z2.imag)
    return math.acosh(max(arg, 1.0))
