"""Planar Cantor sets whose line shadows equal those of a polygon.

The shadow of a convex polygon on the line at angle ``theta`` is the interval
of its vertex projections, so every check in this module is closed form on
vertices.  Coverage at finitely many directions is exact when the direction
set contains every angle where two projected vertices swap order (between two
such angles the order, hence the covering pattern, is fixed).  When there are
too many vertices for that, a Lipschitz sweep over the half circle certifies
the remaining directions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import shapely
from shapely import STRtree
from shapely.geometry import Polygon

from .shadow import Interval1

CONVEX_TOL = 1e-12
COVER_TOL = 1e-12          # relative to the largest vertex norm
GRID_STEP_DEG = 1.0
VERTEX_PAIR_LIMIT = 600
SWEEP_MAX_ANGLES = 1 << 20
ANGLE_CHUNK = 256


class PlanarError(ValueError):
    pass


class CoverBroken(PlanarError):
    def __init__(self, message, level=None, verdict=None):
        super().__init__(message)
        self.level = level
        self.verdict = verdict


class CollarFail(PlanarError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True, eq=False)
class ConvexPoly2:
    """Convex polygon with counterclockwise vertices and nonempty interior."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) < 3 or not np.all(np.isfinite(v)):
            raise PlanarError("a polygon needs at least three finite vertices")
        e = np.roll(v, -1, axis=0) - v
        turn = _cross(e, np.roll(e, -1, axis=0))
        scale = float(np.max(np.abs(v - v.mean(axis=0)))) ** 2
        area = 0.5 * float(np.sum(_cross(v, np.roll(v, -1, axis=0))))
        if not area > CONVEX_TOL * scale:
            raise PlanarError(f"polygon must be counterclockwise with positive area, got {area!r}")
        if np.any(turn < -CONVEX_TOL * scale):
            raise PlanarError("polygon is not convex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def regular(cls, n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0):
        k = np.arange(n) * (2.0 * np.pi / n) + phase
        return cls(np.asarray(center, dtype=float) + radius * np.stack([np.cos(k), np.sin(k)], 1))

    @property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * float(np.sum(_cross(v, np.roll(v, -1, axis=0))))

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def diameter(self) -> float:
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def width(self) -> float:
        """Smallest extent over edge normals, which is where the width is attained."""
        e = self.edges
        n = np.stack([-e[:, 1], e[:, 0]], 1) / np.linalg.norm(e, axis=1)[:, None]
        p = self.vertices @ n.T
        return float((p.max(axis=0) - p.min(axis=0)).min())

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        """Closed containment, allowing ``tol`` outside each edge line."""
        p = np.asarray(points, dtype=float).reshape(-1, 2)
        e = self.edges
        s = _cross(e[None], p[:, None, :] - self.vertices[None]) / np.linalg.norm(e, axis=1)
        return np.all(s >= -tol, axis=1)

    def to_shapely(self) -> Polygon:
        return Polygon(self.vertices)


@dataclass(frozen=True, eq=False)
class AffineMap2:
    """x -> A x + b."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float).reshape(2, 2)
        b = np.array(self.b, dtype=float).reshape(2)
        if abs(np.linalg.det(A)) <= 1e-15:
            raise PlanarError("affine map is not injective")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_rows(cls, rows) -> AffineMap2:
        m = np.array(rows, dtype=float).reshape(2, 3)
        return cls(m[:, :2], m[:, 2])

    @classmethod
    def homothety(cls, center, ratio: float) -> AffineMap2:
        c = np.asarray(center, dtype=float)
        return cls(ratio * np.eye(2), (1.0 - ratio) * c)

    @classmethod
    def from_points(cls, src, dst) -> AffineMap2:
        """The affine map taking three source points to three targets."""
        s = np.hstack([np.asarray(src, dtype=float).reshape(3, 2), np.ones((3, 1))])
        m = np.linalg.solve(s, np.asarray(dst, dtype=float).reshape(3, 2)).T
        return cls(m[:, :2], m[:, 2])

    def rows(self) -> list[list[float]]:
        return np.hstack([self.A, self.b[:, None]]).tolist()

    @property
    def lipschitz(self) -> float:
        return float(np.linalg.norm(self.A, 2))

    def __call__(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.A.T + self.b

    def compose(self, inner: AffineMap2) -> AffineMap2:
        """``self ∘ inner``."""
        return AffineMap2(self.A @ inner.A, self.A @ inner.b + self.b)

    def inverse(self) -> AffineMap2:
        Ai = np.linalg.inv(self.A)
        return AffineMap2(Ai, -Ai @ self.b)

    def apply(self, p: ConvexPoly2) -> ConvexPoly2:
        v = self(p.vertices)
        return ConvexPoly2(v if np.linalg.det(self.A) > 0 else v[::-1])


@dataclass(frozen=True, eq=False)
class PlanarIFS:
    root: ConvexPoly2
    maps: tuple[AffineMap2, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise PlanarError("an IFS needs at least one map")
        if not self.contraction < 1.0:
            raise PlanarError(f"maps must be contractions, got factor {self.contraction}")

    @property
    def contraction(self) -> float:
        return max(m.lipschitz for m in self.maps)

    def pieces(self) -> list[ConvexPoly2]:
        return [m.apply(self.root) for m in self.maps]

    def conjugate(self, g: AffineMap2) -> PlanarIFS:
        """The same pattern carried by ``g``: root g(R), maps g f g^-1."""
        gi = g.inverse()
        return PlanarIFS(g.apply(self.root), tuple(g.compose(m).compose(gi) for m in self.maps),
                         dict(self.meta))


def poly_line_shadow(p: ConvexPoly2, angle: float) -> Interval1:
    """Projection onto the line through the origin at ``angle``, in line coordinates."""
    t = p.vertices @ np.array([math.cos(angle), math.sin(angle)])
    return Interval1(float(t.min()), float(t.max()))


@dataclass(frozen=True)
class CoverVerdict:
    covered: bool
    certified: bool
    exact: bool
    angles_checked: int
    critical_angles: int
    witness_angle: float | None = None
    witness_gap: tuple[float, float] | None = None
    min_margin: float | None = None
    sweep_angles: int = 0

    def to_dict(self) -> dict:
        return {"covered": self.covered, "certified": self.certified, "exact": self.exact,
                "angles_checked": self.angles_checked,
                "critical_angles": self.critical_angles,
                "witness_angle": self.witness_angle,
                "witness_gap": None if self.witness_gap is None else list(self.witness_gap),
                "min_margin": self.min_margin, "sweep_angles": self.sweep_angles}


def _as_list(parent) -> list[ConvexPoly2]:
    return [parent] if isinstance(parent, ConvexPoly2) else list(parent)


def _stack(polys):
    verts = np.concatenate([p.vertices for p in polys])
    starts = np.cumsum([0] + [len(p.vertices) for p in polys])[:-1]
    return verts, starts


def _unique_angles(theta) -> np.ndarray:
    t = np.mod(np.asarray(theta, dtype=float), np.pi)
    t = np.unique(np.round(t, 13))
    return t[t < np.pi]


def critical_angles(polys, vertex_pair_limit: int = VERTEX_PAIR_LIMIT) -> tuple[np.ndarray, bool]:
    """Edge-normal angles, plus vertex-pair angles when the vertex count allows.

    Returns the angles in [0, pi) and whether vertex pairs were included.
    """
    out = []
    for p in polys:
        e = p.edges
        out.append(np.arctan2(e[:, 1], e[:, 0]) + np.pi / 2)
    verts = np.unique(np.round(np.concatenate([p.vertices for p in polys]), 13), axis=0)
    full = len(verts) <= vertex_pair_limit
    if full:
        i, j = np.triu_indices(len(verts), 1)
        d = verts[j] - verts[i]
        out.append(np.arctan2(d[:, 1], d[:, 0]) + np.pi / 2)
    return _unique_angles(np.concatenate(out)), full


def _intervals(verts, starts, theta):
    """Per-angle piece intervals, shape (angles, pieces)."""
    d = np.stack([np.cos(theta), np.sin(theta)])
    proj = verts @ d                       # (vertices, angles)
    lo = np.minimum.reduceat(proj, starts, axis=0).T
    hi = np.maximum.reduceat(proj, starts, axis=0).T
    return lo, hi


def _first_gaps(lo, hi, a, b, tol):
    """Per angle: the first uncovered subinterval of [a, b], or nan."""
    # pieces of other parents may lie outside [a, b]; clipping makes them harmless
    lo = np.clip(lo, a[:, None], b[:, None])
    hi = np.clip(hi, a[:, None], b[:, None])
    order = np.argsort(lo, axis=1)
    slo = np.take_along_axis(lo, order, 1)
    reach = np.maximum.accumulate(np.take_along_axis(hi, order, 1), axis=1)
    na = lo.shape[0]
    gap_lo = np.full(na, np.nan)
    gap_hi = np.full(na, np.nan)
    # gap before the first piece
    start = slo[:, 0] > a + tol
    gap_lo[start], gap_hi[start] = a[start], slo[start, 0]
    # internal gaps, only inside [a, b]
    inner = (slo[:, 1:] > reach[:, :-1] + tol) & (reach[:, :-1] < b[:, None] - tol)
    has = inner.any(axis=1) & ~start
    k = np.argmax(inner, axis=1) if inner.shape[1] else np.zeros(na, dtype=int)
    idx = np.flatnonzero(has)
    gap_lo[idx] = reach[idx, k[idx]]
    gap_hi[idx] = np.minimum(slo[idx, k[idx] + 1], b[idx])
    end = (reach[:, -1] < b - tol) & np.isnan(gap_lo)
    gap_lo[end], gap_hi[end] = reach[end, -1], b[end]
    return gap_lo, gap_hi


def _margins(lo, hi, left, right):
    """min over x in [left, right] of max over pieces of the tent min(x - lo, hi - x).

    Sorted by tent peak, the descending envelope on the i-th gap between peaks
    comes from the prefix maximum of ``hi`` and the ascending one from the
    suffix minimum of ``lo``; the minimum of their maximum is closed form.
    """
    mid = 0.5 * (lo + hi)
    order = np.argsort(mid, axis=1)
    m = np.take_along_axis(mid, order, 1)
    slo = np.take_along_axis(lo, order, 1)
    shi = np.take_along_axis(hi, order, 1)
    na, n = lo.shape
    big = np.inf
    H = np.concatenate([np.full((na, 1), -big), np.maximum.accumulate(shi, axis=1)], 1)
    Lo = np.concatenate([np.minimum.accumulate(slo[:, ::-1], axis=1)[:, ::-1],
                         np.full((na, 1), big)], 1)
    seg_lo = np.concatenate([np.full((na, 1), -big), m], 1)
    seg_hi = np.concatenate([m, np.full((na, 1), big)], 1)
    x0 = np.maximum(seg_lo, left[:, None])
    x1 = np.minimum(seg_hi, right[:, None])
    valid = x0 <= x1
    with np.errstate(invalid="ignore"):
        xs = np.where(np.isfinite(H) & np.isfinite(Lo), 0.5 * (H + Lo),
                      np.where(np.isfinite(H), big, -big))
    xc = np.clip(xs, x0, x1)
    with np.errstate(invalid="ignore"):
        val = np.maximum(H - xc, xc - Lo)
    val = np.where(valid, val, big)
    return val.min(axis=1)


class _Cover:
    """Vertex data and margin evaluation for one parent against all pieces."""

    def __init__(self, parent: ConvexPoly2, pieces, origin, tol):
        self.parent = parent
        self.origin = origin
        self.tol = tol
        self.verts, self.starts = _stack(pieces)
        self.verts = self.verts - origin
        self.pv = parent.vertices - origin
        # pieces holding each parent vertex pin the shadow extremes for every angle
        holders = []
        for v in parent.vertices:
            hit = [k for k, p in enumerate(pieces) if p.contains(v, tol)[0]]
            holders.append(hit)
        self.pinned = all(holders)
        self.eta = 0.5 * min((pieces[h[0]].width for h in holders if h), default=0.0)

    def parent_interval(self, theta):
        d = np.stack([np.cos(theta), np.sin(theta)])
        p = self.pv @ d
        return p.min(axis=0), p.max(axis=0)

    def gaps(self, theta):
        a, b = self.parent_interval(theta)
        lo, hi = _intervals(self.verts, self.starts, theta)
        return _first_gaps(lo, hi, a, b, self.tol)

    def margin(self, theta):
        a, b = self.parent_interval(theta)
        lo, hi = _intervals(self.verts, self.starts, theta)
        return _margins(lo, hi, a + self.eta, b - self.eta)


def _chunked(fn, theta):
    outs = [fn(theta[i:i + ANGLE_CHUNK]) for i in range(0, len(theta), ANGLE_CHUNK)]
    if isinstance(outs[0], tuple):
        return tuple(np.concatenate(x) for x in zip(*outs))
    return np.concatenate(outs)


def _sweep(covers, lip, max_angles):
    """Certify [0, pi] by bisection: m(t) > 2 L |t - t0| keeps the cover at t."""
    theta = np.linspace(0.0, np.pi, 181)
    m = np.min([_chunked(c.margin, theta) for c in covers], axis=0)
    pending = [(theta[i], theta[i + 1], m[i], m[i + 1]) for i in range(len(theta) - 1)]
    total, worst = len(theta), float(m.min())
    while pending:
        if worst <= 0:
            return False, worst, total
        todo = [(t0, t1, m0, m1) for t0, t1, m0, m1 in pending
                if m0 + m1 <= 2.0 * lip * (t1 - t0)]
        if not todo:
            return True, worst, total
        if total + len(todo) > max_angles:
            return False, worst, total
        mids = np.array([0.5 * (t0 + t1) for t0, t1, _, _ in todo])
        mm = np.min([_chunked(c.margin, mids) for c in covers], axis=0)
        total += len(mids)
        worst = min(worst, float(mm.min()))
        pending = []
        for (t0, t1, m0, m1), tm, mv in zip(todo, mids, mm):
            pending.append((t0, tm, m0, mv))
            pending.append((tm, t1, mv, m1))
    return True, worst, total


def shadow_cover_check(parent, pieces, angles=None, grid_step_deg: float = GRID_STEP_DEG,
                       vertex_pair_limit: int = VERTEX_PAIR_LIMIT, certify: bool = True,
                       max_sweep_angles: int = SWEEP_MAX_ANGLES) -> CoverVerdict:
    """Do the pieces' line shadows cover the parent's, direction by direction?

    ``parent`` is a polygon or a list of polygons (their union).  Pieces are
    assumed to lie inside the parent union, so cover means equality.  Angles
    checked: ``angles`` if given, else critical angles, midpoints between
    them, and a uniform grid.  ``exact`` reports whether the critical set was
    complete; ``certified`` whether the Lipschitz sweep covered every
    direction.
    """
    parents = _as_list(parent)
    pieces = list(pieces)
    if not parents or not pieces:
        raise PlanarError("need at least one parent and one piece")
    allv = np.concatenate([p.vertices for p in parents])
    origin = allv.mean(axis=0)
    lip = float(max(np.linalg.norm(np.concatenate([p.vertices for p in parents + pieces])
                                   - origin, axis=1).max(), 1e-300))
    tol = COVER_TOL * lip
    crit, full = critical_angles(parents + pieces, vertex_pair_limit)
    if angles is None:
        ext = np.concatenate([crit, [crit[0] + np.pi]])
        mids = 0.5 * (ext[:-1] + ext[1:])
        grid = np.deg2rad(np.arange(0.0, 180.0, grid_step_deg))
        theta = _unique_angles(np.concatenate([crit, mids, grid]))
    else:
        theta = _unique_angles(angles)
        full = False
    covers = [_Cover(p, pieces, origin, tol) for p in parents]
    for c in covers:
        glo, ghi = _chunked(c.gaps, theta)
        bad = np.flatnonzero(~np.isnan(glo))
        if bad.size:
            k = bad[0]
            return CoverVerdict(False, False, full, len(theta), len(crit),
                                float(theta[k]), (float(glo[k]), float(ghi[k])))
    certified, worst, n_sweep = False, None, 0
    if certify and all(c.pinned for c in covers):
        certified, worst, n_sweep = _sweep(covers, lip, max_sweep_angles)
    return CoverVerdict(True, certified, full, len(theta), len(crit),
                        min_margin=worst, sweep_angles=n_sweep)


@dataclass(frozen=True)
class Separation:
    pairwise: float           # smallest distance between two pieces
    inside: float             # smallest distance from a piece to the container boundary


def separation_margin(pieces, container=None) -> Separation:
    geoms = np.array([p.to_shapely() for p in pieces], dtype=object)
    if len(geoms) < 2:
        pair = math.inf
    else:
        tree = STRtree(geoms)
        _, dist = tree.query_nearest(geoms, exclusive=True, return_distance=True,
                                     all_matches=False)
        pair = float(dist.min())
    inside = math.inf
    if container is not None:
        cont = _as_list(container)
        for p, g in zip(pieces, geoms):
            scale = max(float(np.abs(c.vertices).max()) for c in cont)
            holders = [c for c in cont if c.contains(p.vertices, COVER_TOL * scale).all()]
            if not holders:
                return Separation(pair, -math.inf)
            inside = min(inside, float(holders[0].to_shapely().exterior.distance(g)))
    return Separation(pair, inside)


def build_planar_cantor(ifs: PlanarIFS, depth: int, check: bool = True,
                        certify: bool = False) -> list[ConvexPoly2]:
    """Images of the root under all ``depth``-fold compositions, in word order."""
    if depth < 0:
        raise PlanarError("depth must be non-negative")
    pieces = [ifs.root]
    for level in range(1, depth + 1):
        pieces = [p for q in pieces for p in (m.apply(q) for m in ifs.maps)]
        if check:
            v = shadow_cover_check(ifs.root, pieces, certify=certify)
            if not v.covered:
                raise CoverBroken(f"level {level} leaves gap {v.witness_gap} at angle "
                                  f"{v.witness_angle}", level=level, verdict=v)
    return pieces


def compositions(ifs: PlanarIFS, depth: int) -> list[AffineMap2]:
    words = [AffineMap2(np.eye(2), np.zeros(2))]
    for _ in range(depth):
        words = [w.compose(m) for w in words for m in ifs.maps]
    return words


def hexagon(center=(0.0, 0.0), radius: float = 1.0) -> ConvexPoly2:
    """Regular flat-top hexagon: vertices at angles k * 60 degrees."""
    return ConvexPoly2.regular(6, radius, center)


REFERENCE_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def load_collar(path=None) -> list[AffineMap2]:
    """Maps from the unit hexagon onto the collar of the reference triangle.

    The shipped collar was found by scripts/search_triangle_collar.py.
    """
    if path is None:
        from importlib import resources
        text = resources.files("antoine").joinpath("data/triangle_collar.json").read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    if not np.allclose(doc["triangle"], REFERENCE_TRIANGLE, rtol=0, atol=1e-15):
        raise PlanarError("collar file uses a different reference triangle")
    return [AffineMap2.from_rows(r) for r in doc["maps"]]


def triangle_collar(simplex: ConvexPoly2, collar=None) -> list[AffineMap2]:
    """The reference collar carried onto ``simplex`` by the affine map between them."""
    if len(simplex.vertices) != 3:
        raise PlanarError("collars are built for triangles")
    g = AffineMap2.from_points(REFERENCE_TRIANGLE, simplex.vertices)
    return [g.compose(m) for m in (collar if collar is not None else load_collar())]


@dataclass(frozen=True, eq=False)
class TriangleCantor:
    pieces: list
    collars: list
    verdict: CoverVerdict
    separation: Separation


def triangle_union_cantor(simplices, depth: int, ifs: PlanarIFS | None = None,
                          certify: bool = True, collar=None) -> TriangleCantor:
    """Per simplex, a hexagon collar carrying the hexagon IFS; pieces at ``depth``.

    Each hexagon ``g(H)`` holds the Cantor set ``g(K)`` with the hexagon's
    shadows, so the union has the simplices' shadows once the collars do.
    """
    simplices = list(simplices)
    if not simplices:
        raise PlanarError("need at least one simplex")
    for s in simplices:
        if len(s.vertices) != 3:
            raise PlanarError("simplices must be triangles")
    ifs = ifs or load_ifs()
    collar = collar if collar is not None else load_collar()
    words = compositions(ifs, depth)
    unit = AffineMap2.from_points(hexagon().vertices[[0, 1, 5]], ifs.root.vertices[[0, 1, 5]])
    unit_inv = unit.inverse()
    collars, pieces = [], []
    for s in simplices:
        maps = triangle_collar(s, collar)
        collars.append([m.apply(hexagon()) for m in maps])
        for g in maps:
            h = g.compose(unit_inv)
            pieces.extend(h.compose(w).apply(ifs.root) for w in words)
    hexes = [h for c in collars for h in c]
    sep = separation_margin(hexes, simplices)
    if not (sep.pairwise > 0 and sep.inside >= 0):
        raise CollarFail(f"collar hexagons overlap or leave the simplices: {sep}")
    verdict = shadow_cover_check(simplices, pieces, certify=certify)
    if not verdict.covered:
        raise CollarFail(f"gap {verdict.witness_gap} at angle {verdict.witness_angle}",
                         witness=(verdict.witness_angle, verdict.witness_gap))
    return TriangleCantor(pieces, collars, verdict, sep)


def ifs_to_dict(ifs: PlanarIFS) -> dict:
    return {"version": 1, "root": ifs.root.vertices.tolist(),
            "maps": [m.rows() for m in ifs.maps], "meta": ifs.meta}


def ifs_from_dict(d: dict) -> PlanarIFS:
    return PlanarIFS(ConvexPoly2(d["root"]), tuple(AffineMap2.from_rows(r) for r in d["maps"]),
                     dict(d.get("meta", {})))


def save_ifs(ifs: PlanarIFS, path) -> None:
    Path(path).write_text(json.dumps(ifs_to_dict(ifs), indent=1, sort_keys=True) + "\n")


def load_ifs(path=None) -> PlanarIFS:
    """Load a pattern file; without a path, the shipped hexagon pattern."""
    if path is None:
        from importlib import resources
        text = resources.files("antoine").joinpath("data/hexagon_ifs.json").read_text()
    else:
        text = Path(path).read_text()
    return ifs_from_dict(json.loads(text))


def corner_ifs(ratio: float, root: ConvexPoly2 | None = None) -> PlanarIFS:
    """Homotheties of ratio ``ratio`` about each root vertex."""
    root = root or hexagon()
    return PlanarIFS(root, tuple(AffineMap2.homothety(v, ratio) for v in root.vertices),
                     {"ratio": ratio})


def polygons_svg(polys, size: int = 512) -> str:
    allv = np.concatenate([p.vertices for p in polys])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    s = size / float(max(hi - lo))
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    for p in polys:
        pts = " ".join(f"{(x - lo[0]) * s:.4f},{(hi[1] - y) * s:.4f}" for x, y in p.vertices)
        lines.append(f'<polygon points="{pts}" fill="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def pairwise_disjoint(pieces) -> bool:
    return separation_margin(pieces).pairwise > 0

