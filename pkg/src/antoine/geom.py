"""Geometric primitives in R^3: planes, circles, solid tori, tubes, similarities.

Every value type is immutable; arrays stored on them are read-only copies.
Points and directions are plain ``numpy`` arrays of shape ``(3,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import singledispatch

import numpy as np
from scipy.optimize import minimize_scalar

UNIT_TOL = 1e-12
CIRCLE_DISTANCE_TOL = 1e-9
CIRCLE_DISTANCE_SEEDS = 256
GAUSS_ACCEPT_RESIDUAL = 0.05
GAUSS_REJECT_RESIDUAL = 0.1
GAUSS_START_NODES = 32
GAUSS_MAX_NODES = 2048
GAUSS_CHUNK = 256


class GeometryError(ValueError):
    pass


class CirclesIntersect(GeometryError):
    pass


class NonConvergent(GeometryError):
    pass


def as_point(x) -> np.ndarray:
    p = np.array(x, dtype=float).reshape(3)
    if not np.all(np.isfinite(p)):
        raise GeometryError(f"non-finite coordinates {p}")
    p.setflags(write=False)
    return p


def as_unit(x) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise GeometryError(f"cannot normalise {v}")
    if abs(n - 1.0) > UNIT_TOL:
        # unit inputs pass through unchanged, so serialised directions round-trip
        v = v / n
    v.setflags(write=False)
    return v


def perpendicular_frame(normal) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair (u, v) with u x v = normal."""
    n = as_unit(normal)
    a = np.zeros(3)
    a[int(np.argmin(np.abs(n)))] = 1.0
    u = a - np.dot(a, n) * n
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    u.setflags(write=False)
    v.setflags(write=False)
    return u, v


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Line3:
    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", as_point(self.base))
        object.__setattr__(self, "direction", as_unit(self.direction))

    def distance(self, points) -> np.ndarray:
        d = np.asarray(points, dtype=float) - self.base
        return np.linalg.norm(np.cross(d, self.direction), axis=-1)


@dataclass(frozen=True, eq=False)
class Plane3:
    """Affine m-plane (m = 1 or 2) given by an origin and an orthonormal basis."""

    origin: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", as_point(self.origin))
        b = np.array(self.basis, dtype=float).reshape(-1, 3)
        if b.shape[0] not in (1, 2):
            raise GeometryError("plane dimension must be 1 or 2")
        if np.max(np.abs(b @ b.T - np.eye(b.shape[0]))) > UNIT_TOL:
            raise GeometryError("plane basis is not orthonormal")
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def normal(self) -> np.ndarray:
        if self.dim != 2:
            raise GeometryError("only 2-planes have a normal")
        return as_unit(np.cross(self.basis[0], self.basis[1]))

    @classmethod
    def from_normal(cls, origin, normal) -> Plane3:
        u, v = perpendicular_frame(normal)
        return cls(origin, np.stack([u, v]))

    @classmethod
    def line(cls, origin, direction) -> Plane3:
        return cls(origin, as_unit(direction)[None, :])

    @classmethod
    def xy(cls) -> Plane3:
        return cls(np.zeros(3), np.eye(3)[:2])

    @classmethod
    def xz(cls) -> Plane3:
        return cls(np.zeros(3), np.eye(3)[[0, 2]])

    def lift(self, coords) -> np.ndarray:
        """Inverse of :func:`project` on the plane itself."""
        return self.origin + np.asarray(coords, dtype=float) @ self.basis


def project(point, target: Plane3) -> np.ndarray:
    """Orthogonal projection, returned in ``target`` coordinates.

    Accepts a single point ``(3,)`` or a batch ``(N, 3)``.
    """
    return (np.asarray(point, dtype=float) - target.origin) @ target.basis.T


@dataclass(frozen=True, eq=False)
class Circle3:
    center: np.ndarray
    radius: float
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "normal", as_unit(self.normal))
        if not self.radius > 0:
            raise GeometryError(f"circle radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "_frame", perpendicular_frame(self.normal))

    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        return self._frame

    def points(self, theta) -> np.ndarray:
        u, v = self.frame()
        theta = np.asarray(theta, dtype=float)[..., None]
        return self.center + self.radius * (np.cos(theta) * u + np.sin(theta) * v)

    def tangents(self, theta) -> np.ndarray:
        u, v = self.frame()
        theta = np.asarray(theta, dtype=float)[..., None]
        return self.radius * (-np.sin(theta) * u + np.cos(theta) * v)

    def sample(self, n: int) -> np.ndarray:
        return self.points(np.arange(n) * (2.0 * np.pi / n))


@dataclass(frozen=True, eq=False)
class SolidTorus:
    """Solid torus of revolution: the ``minor_radius``-neighbourhood of ``core``."""

    core: Circle3
    minor_radius: float

    def __post_init__(self):
        r = float(self.minor_radius)
        if not 0 < r < self.core.radius:
            raise GeometryError(
                f"need 0 < r < R, got r={r}, R={self.core.radius}")
        object.__setattr__(self, "minor_radius", r)

    @property
    def major_radius(self) -> float:
        return self.core.radius

    @property
    def center(self) -> np.ndarray:
        return self.core.center

    @property
    def diameter(self) -> float:
        return 2.0 * (self.core.radius + self.minor_radius)

    def implicit(self, points) -> np.ndarray:
        """(rho - R)^2 + h^2 - r^2 in core-adapted cylindrical coordinates."""
        d = np.asarray(points, dtype=float) - self.core.center
        h = d @ self.core.normal
        rho = np.linalg.norm(d - h[..., None] * self.core.normal, axis=-1)
        return (rho - self.core.radius) ** 2 + h ** 2 - self.minor_radius ** 2

    def contains(self, points) -> np.ndarray:
        return self.implicit(points) <= 0.0


@dataclass(frozen=True, eq=False)
class Tube:
    axis: Line3
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError(f"tube radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, points) -> np.ndarray:
        return self.axis.distance(points) <= self.radius


@dataclass(frozen=True, eq=False)
class Strip2:
    """Closed strip in a 2-plane: points within ``half_width`` of a line.

    ``point`` and ``direction`` are 2-vectors in ``plane`` coordinates.
    """

    plane: Plane3
    point: np.ndarray
    direction: np.ndarray
    half_width: float

    def __post_init__(self):
        object.__setattr__(self, "point", _frozen(np.reshape(self.point, 2)))
        d = np.reshape(np.array(self.direction, dtype=float), 2)
        object.__setattr__(self, "direction", _frozen(d / np.linalg.norm(d)))
        if not self.half_width > 0:
            raise GeometryError("strip half-width must be positive")
        object.__setattr__(self, "half_width", float(self.half_width))

    def distance(self, coords) -> np.ndarray:
        d = np.asarray(coords, dtype=float) - self.point
        return np.abs(d[..., 0] * self.direction[1] - d[..., 1] * self.direction[0])

    def contains(self, coords) -> np.ndarray:
        return self.distance(coords) <= self.half_width


@dataclass(frozen=True, eq=False)
class Disk2:
    plane: Plane3
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(np.reshape(self.center, 2)))
        object.__setattr__(self, "radius", float(self.radius))

    def distance(self, coords) -> np.ndarray:
        return np.linalg.norm(np.asarray(coords, dtype=float) - self.center, axis=-1)

    def contains(self, coords) -> np.ndarray:
        return self.distance(coords) <= self.radius


@dataclass(frozen=True, eq=False)
class Similarity3:
    """x -> scale * rotation @ x + translation, with a proper rotation."""

    scale: float = 1.0
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not self.scale > 0:
            raise GeometryError("similarity scale must be positive")
        q = np.array(self.rotation, dtype=float).reshape(3, 3)
        if np.max(np.abs(q @ q.T - np.eye(3))) > UNIT_TOL or np.linalg.det(q) < 0:
            raise GeometryError("rotation must be a proper orthonormal frame")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "rotation", _frozen(q))
        object.__setattr__(self, "translation", as_point(self.translation))

    def __call__(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return self.scale * p @ self.rotation.T + self.translation

    def rotate(self, vectors) -> np.ndarray:
        return np.asarray(vectors, dtype=float) @ self.rotation.T

    def compose(self, inner: Similarity3) -> Similarity3:
        """``self ∘ inner``: apply ``inner`` first."""
        return Similarity3(
            self.scale * inner.scale,
            self.rotation @ inner.rotation,
            self(inner.translation),
        )

    def inverse(self) -> Similarity3:
        rt = self.rotation.T
        return Similarity3(1.0 / self.scale, rt, -(rt @ self.translation) / self.scale)


def rotation_between(a, b) -> np.ndarray:
    """A proper rotation taking unit vector ``a`` to unit vector ``b``."""
    a, b = as_unit(a), as_unit(b)
    v = np.cross(a, b)
    c = float(np.dot(a, b))
    if np.linalg.norm(v) < 1e-15:
        if c > 0:
            return np.eye(3)
        u, _ = perpendicular_frame(a)
        return 2.0 * np.outer(u, u) - np.eye(3)
    k = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + k + k @ k / (1.0 + c)


@singledispatch
def apply_similarity(x, s: Similarity3):
    """Image of a geometric object (or raw point array) under ``s``."""
    return s(x)


@apply_similarity.register
def _(x: Line3, s: Similarity3) -> Line3:
    return Line3(s(x.base), s.rotate(x.direction))


@apply_similarity.register
def _(x: Plane3, s: Similarity3) -> Plane3:
    return Plane3(s(x.origin), s.rotate(x.basis))


@apply_similarity.register
def _(x: Circle3, s: Similarity3) -> Circle3:
    return Circle3(s(x.center), s.scale * x.radius, s.rotate(x.normal))


@apply_similarity.register
def _(x: SolidTorus, s: Similarity3) -> SolidTorus:
    return SolidTorus(apply_similarity(x.core, s), s.scale * x.minor_radius)


@apply_similarity.register
def _(x: Tube, s: Similarity3) -> Tube:
    return Tube(apply_similarity(x.axis, s), s.scale * x.radius)


def point_circle_distance(points, circle: Circle3) -> np.ndarray:
    """Exact distance from each point to a circle (a curve, not a disk)."""
    d = np.asarray(points, dtype=float) - circle.center
    h = d @ circle.normal
    rho = np.linalg.norm(d - h[..., None] * circle.normal, axis=-1)
    return np.hypot(rho - circle.radius, h)


def _one_sided_distance(a: Circle3, b: Circle3) -> float:
    # min over points of a of the closed-form distance to b
    n = CIRCLE_DISTANCE_SEEDS
    step = 2.0 * np.pi / n
    theta = np.arange(n) * step
    d = point_circle_distance(a.points(theta), b)
    is_min = (d <= np.roll(d, 1)) & (d <= np.roll(d, -1))
    seeds = np.flatnonzero(is_min)
    seeds = seeds[np.argsort(d[seeds])][:8]
    best = float(d.min())
    u, v = a.frame()
    c0 = a.center - b.center
    ra, rb, nb = a.radius, b.radius, b.normal
    # scalar projections so the objective avoids array allocation
    cu, cv, cn = float(c0 @ nb), float(u @ nb), float(v @ nb)
    cc, c_u, c_v = float(c0 @ c0), float(c0 @ u), float(c0 @ v)
    for i in seeds:
        t0 = theta[i]

        def f(dt, t0=t0):
            co, si = math.cos(t0 + dt), math.sin(t0 + dt)
            h = cu + ra * (co * cv + si * cn)
            sq = cc + 2.0 * ra * (co * c_u + si * c_v) + ra * ra
            rho = math.sqrt(max(sq - h * h, 0.0))
            return (rho - rb) ** 2 + h * h

        res = minimize_scalar(f, bounds=(-step, step), method="bounded",
                              options={"xatol": 1e-14})
        best = min(best, math.sqrt(max(res.fun, 0.0)))
    return best


def circle_distance(a: Circle3, b: Circle3) -> float:
    """Minimum distance between two circles in R^3.

    The inner minimisation over ``b`` is closed form, which leaves a 1-D
    problem over the parameter of ``a``: dense seeding, then bounded Brent
    refinement of every seeded local minimum.  Both orders are evaluated and
    the smaller value kept, which makes the result exactly symmetric.
    """
    return min(_one_sided_distance(a, b), _one_sided_distance(b, a))


def torus_separation(a: SolidTorus, b: SolidTorus) -> float:
    """Core distance minus both minor radii.

    Positive implies the solids are disjoint.  For tori of revolution (which
    are exact tubular neighbourhoods of their cores) the converse also holds.
    """
    return circle_distance(a.core, b.core) - a.minor_radius - b.minor_radius


def _gauss_integral(a: Circle3, b: Circle3, n: int) -> float:
    t = np.arange(n) * (2.0 * np.pi / n)
    pa, ta = a.points(t), a.tangents(t)
    pb, tb = b.points(t), b.tangents(t)
    total = 0.0
    for lo in range(0, n, GAUSS_CHUNK):
        sl = slice(lo, lo + GAUSS_CHUNK)
        r = pa[sl, None, :] - pb[None, :, :]
        cr = np.cross(ta[sl, None, :], tb[None, :, :])
        num = np.einsum("ijk,ijk->ij", cr, r)
        total += float(np.sum(num / np.linalg.norm(r, axis=-1) ** 3))
    h = 2.0 * np.pi / n
    return total * h * h / (4.0 * np.pi)


def gauss_linking_value(a: Circle3, b: Circle3, nodes: int) -> float:
    """Raw trapezoid estimate of the Gauss linking integral."""
    return _gauss_integral(a, b, nodes)


def linking_number(a: Circle3, b: Circle3) -> int:
    """Linking number of two disjoint circles via the Gauss double integral.

    The periodic trapezoid rule is refined by doubling the node count until two
    successive estimates round to the same integer with residual below
    ``GAUSS_ACCEPT_RESIDUAL``.
    """
    if circle_distance(a, b) <= CIRCLE_DISTANCE_TOL:
        raise CirclesIntersect("linking number undefined for intersecting circles")
    n = GAUSS_START_NODES
    prev = None
    while True:
        val = _gauss_integral(a, b, n)
        k = round(val)
        if (prev is not None and abs(val - k) < GAUSS_ACCEPT_RESIDUAL
                and round(prev) == k and abs(val - prev) < GAUSS_ACCEPT_RESIDUAL):
            return int(k)
        if n >= GAUSS_MAX_NODES:
            if abs(val - k) < GAUSS_REJECT_RESIDUAL:
                return int(k)
            raise NonConvergent(f"Gauss integral {val!r} not near an integer at n={n}")
        prev = val
        n *= 2
