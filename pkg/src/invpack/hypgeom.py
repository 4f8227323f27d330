"""Poincare disk primitives.

Points are Python complex numbers. Circles are kept in Euclidean form
(:class:`EuclideanCircle`); :class:`HyperbolicCircle` is the same point set
described by its hyperbolic centre and radius.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

CONTAIN_TOL = 1e-12
COLLINEAR_TOL = 1e-8


class DiskError(ValueError):
    """A point or circle is not where the operation requires it to be."""


def as_point(p) -> complex:
    if isinstance(p, complex):
        return p
    if isinstance(p, (int, float)):
        return complex(p)
    x, y = p
    return complex(x, y)


def _require_in_disk(*pts: complex) -> None:
    for p in pts:
        if not abs(p) < 1.0:
            raise DiskError(f"point {p} is not in the open unit disk")


@dataclass(frozen=True)
class EuclideanCircle:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")

    def inside_disk(self, tol: float = CONTAIN_TOL) -> bool:
        return abs(self.center) + self.radius < 1.0 - tol

    def meets_disk(self) -> bool:
        """True when the circle has points in the open unit disk."""
        return abs(self.center) - self.radius < 1.0


@dataclass(frozen=True)
class HyperbolicCircle:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        _require_in_disk(self.center)
        if not self.radius > 0:
            raise ValueError(f"hyperbolic radius must be positive, got {self.radius}")


# -- distances ---------------------------------------------------------------

def hyp_distance(p, q) -> float:
    """Hyperbolic distance in the Poincare disk."""
    p, q = as_point(p), as_point(q)
    _require_in_disk(p, q)
    s = abs(p - q) / math.sqrt((1.0 - abs(p) ** 2) * (1.0 - abs(q) ** 2))
    return 2.0 * math.asinh(s)


def _cosh_hyp_distance(p: complex, q: complex) -> float:
    s2 = abs(p - q) ** 2 / ((1.0 - abs(p) ** 2) * (1.0 - abs(q) ** 2))
    return 1.0 + 2.0 * s2


# -- Mobius automorphisms ----------------------------------------------------

@dataclass(frozen=True)
class DiskMobius:
    """z -> exp(i theta) (z - a) / (1 - conj(a) z)."""

    a: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        if not abs(self.a) < 1.0:
            raise DiskError(f"translation parameter {self.a} must lie in the open disk")

    @property
    def pole(self) -> complex | None:
        if self.a == 0:
            return None
        p = 1.0 / self.a.conjugate()
        # subnormal a puts the pole at infinity
        return p if cmath.isfinite(p) else None

    def __call__(self, z) -> complex:
        return apply_mobius(self, z)

    def inverse(self) -> "DiskMobius":
        # inverse of e^{it}(z-a)/(1-conj(a)z) is e^{-it}(w+b)/(1+conj(b)w), b = a e^{it}
        rot = cmath.exp(1j * self.theta)
        return DiskMobius(-self.a * rot, -self.theta)


def mobius_to_origin(a, theta: float = 0.0) -> DiskMobius:
    return DiskMobius(as_point(a), theta)


def apply_mobius(m: DiskMobius, p) -> complex:
    z = as_point(p)
    den = 1.0 - m.a.conjugate() * z
    if den == 0:
        raise DiskError(f"point {z} is the pole of the transformation")
    return cmath.exp(1j * m.theta) * (z - m.a) / den


def circumcircle(p1: complex, p2: complex, p3: complex) -> EuclideanCircle:
    d = 2.0 * ((p2 - p1).conjugate() * (p3 - p1)).imag
    if d == 0:
        raise DiskError("points are collinear")
    a2, b2 = abs(p2 - p1) ** 2, abs(p3 - p1) ** 2
    w = (p2 - p1) * b2 - (p3 - p1) * a2
    c = p1 + 1j * w / d
    return EuclideanCircle(c, abs(c - p1))


def apply_mobius_circle(m: DiskMobius, C: EuclideanCircle, method: str = "diametral") -> EuclideanCircle:
    """Image of a Euclidean circle under a disk automorphism.

    The line through the circle centre and the pole is orthogonal to the
    circle and maps to a line, so the images of the two points of the circle
    on it are diametrically opposite on the image circle.
    """
    pole = m.pole
    if pole is not None and abs(abs(pole - C.center) - C.radius) <= 1e-15 * max(1.0, abs(pole)):
        raise DiskError("circle passes through the pole of the transformation")
    if method == "three-point":
        pts = [C.center + C.radius * cmath.exp(2j * math.pi * k / 3) for k in range(3)]
        return circumcircle(*(apply_mobius(m, z) for z in pts))
    if method != "diametral":
        raise ValueError(f"unknown method {method!r}")
    if pole is None:
        direction = 1.0 + 0j
    else:
        gap = pole - C.center
        if abs(gap) < COLLINEAR_TOL:
            return apply_mobius_circle(m, C, "three-point")
        direction = gap / abs(gap)
    z1 = apply_mobius(m, C.center + C.radius * direction)
    z2 = apply_mobius(m, C.center - C.radius * direction)
    return EuclideanCircle((z1 + z2) / 2.0, abs(z1 - z2) / 2.0)


# -- circle conversions --------------------------------------------------------

def _axis_to_tanh_half_radius(x: float, y: float) -> float:
    """tanh(r/2) of the circle meeting the real axis at x < y inside (-1, 1)."""
    return (y - x) / (1.0 - x * y + math.sqrt((1.0 - x * x) * (1.0 - y * y)))


def _direction(z: complex) -> complex:
    return z / abs(z) if z != 0 else 1.0 + 0j


def hyp_to_euc_circle(c: HyperbolicCircle) -> EuclideanCircle:
    d = 2.0 * math.atanh(abs(c.center))
    lo = math.tanh((d - c.radius) / 2.0)
    hi = math.tanh((d + c.radius) / 2.0)
    u = _direction(c.center)
    return EuclideanCircle(u * (lo + hi) / 2.0, (hi - lo) / 2.0)


def euc_to_hyp_circle(C: EuclideanCircle) -> HyperbolicCircle:
    if not C.inside_disk():
        raise DiskError(f"{C} is not strictly inside the unit disk")
    L = abs(C.center)
    x, y = L - C.radius, L + C.radius
    rho = _axis_to_tanh_half_radius(x, y)
    m = math.tanh((math.atanh(x) + math.atanh(y)) / 2.0)
    return HyperbolicCircle(_direction(C.center) * m, 2.0 * math.atanh(rho))


# -- inversive distance --------------------------------------------------------

def inversive_distance_euc(C1: EuclideanCircle, C2: EuclideanCircle) -> float:
    L2 = abs(C1.center - C2.center) ** 2
    return (L2 - C1.radius ** 2 - C2.radius ** 2) / (2.0 * C1.radius * C2.radius)


def inversive_distance_hyp(c1: HyperbolicCircle, c2: HyperbolicCircle) -> float:
    cl = _cosh_hyp_distance(c1.center, c2.center)
    r1, r2 = c1.radius, c2.radius
    return (cl - math.cosh(r1) * math.cosh(r2)) / (math.sinh(r1) * math.sinh(r2))


# -- generalized radii ---------------------------------------------------------

@functools.total_ordering
@dataclass(frozen=True)
class GeneralizedRadius:
    """Either a finite value in (0, 1) or the symbol infinity**exponent.

    Every finite value is below every infinite one; infinities are ordered
    by exponent.
    """

    value: float
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            if not self.value >= 0:
                raise ValueError(f"infinite exponent must be >= 0, got {self.value}")
        elif not 0.0 < self.value < 1.0:
            raise ValueError(f"finite generalized radius must lie in (0, 1), got {self.value}")

    @classmethod
    def finite(cls, rho: float) -> "GeneralizedRadius":
        return cls(float(rho), False)

    @classmethod
    def infinity(cls, alpha: float) -> "GeneralizedRadius":
        return cls(float(alpha), True)

    @property
    def exponent(self) -> float:
        if not self.infinite:
            raise AttributeError("finite generalized radius has no exponent")
        return self.value

    def _key(self):
        return (self.infinite, self.value)

    def __lt__(self, other: "GeneralizedRadius") -> bool:
        return self._key() < other._key()

    def __repr__(self) -> str:
        if self.infinite:
            return f"GeneralizedRadius(inf**{self.value!r})"
        return f"GeneralizedRadius({self.value!r})"


class _Indeterminate:
    """Ratio of two infinities with the same exponent."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INDETERMINATE"


INDETERMINATE = _Indeterminate()


def generalized_radius(C: EuclideanCircle) -> GeneralizedRadius:
    if C.inside_disk():
        L = abs(C.center)
        return GeneralizedRadius.finite(_axis_to_tanh_half_radius(L - C.radius, L + C.radius))
    L = abs(C.center)
    eta_v = (L * L - C.radius ** 2 - 1.0) / (2.0 * C.radius)
    # circles in the containment collar are tangent up to rounding
    return GeneralizedRadius.infinity(max(eta_v + 1.0, 0.0))


def gen_radius_ratio(num: GeneralizedRadius, den: GeneralizedRadius):
    """num / den as a float, ``math.inf``, or :data:`INDETERMINATE`."""
    if not den.infinite and den.value == 0:
        raise ZeroDivisionError("zero generalized radius in denominator")
    if not num.infinite and not den.infinite:
        return num.value / den.value
    if not num.infinite:
        return 0.0
    if not den.infinite:
        return math.inf
    if num.value > den.value:
        return math.inf
    if num.value < den.value:
        return 0.0
    return INDETERMINATE


def gen_radius_compare(a: GeneralizedRadius, b: GeneralizedRadius) -> int:
    """-1, 0 or 1 as a is below, equal to, or above b."""
    return (a > b) - (a < b)


def scale_circle(lam: float, C: EuclideanCircle) -> EuclideanCircle:
    if not lam > 0:
        raise ValueError(f"scale factor must be positive, got {lam}")
    return EuclideanCircle(lam * C.center, lam * C.radius)
