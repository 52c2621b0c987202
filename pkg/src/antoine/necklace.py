"""Simple chains of solid tori and Antoine necklace defining sequences.

A chain places ``q`` congruent tori with centres on the parent's central
circle.  Core planes alternate between (tangent, parent normal) and
(tangent, radial), so each child threads its two neighbours once.  Child core
radius is ``child_major_scale`` times the half-chord between adjacent centres;
values in (1, 2) are needed for neighbours to interleave.

Chain parameters are scale free: they depend only on the parent's ``r/R``.
Defaults come from ``data/chain_defaults.json`` (written by
``scripts/make_chain_defaults.py``) and otherwise from a live search.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources

import numpy as np

from . import geom
from .certify import PlankCertificate, check_certificate
from .geom import (Circle3, Line3, Plane3, SolidTorus, Tube, circle_distance,
                   linking_number, point_circle_distance)

log = logging.getLogger(__name__)

CONTAINMENT_MARGIN = 1e-6          # times the parent minor radius
CENTER_PLANE_TOL = 1e-9
REGULAR_TOL = 1e-9                 # times the parent major radius
CONGRUENCE_TOL = 1e-12             # relative
CORE_SAMPLE_REL = 1e-3             # core sampling step, times parent minor radius
EXHAUSTIVE_MAX_Q = 32
THIN_FRACTION = 0.7                # thinned r / sagitta; evidence margins need <= 0.75
DEGENERATE_REL = 1e-9
MAX_CHILD_MINOR_RATIO = 0.25
SCALE_GRID = tuple(np.round(np.arange(1.04, 1.97, 0.02), 2))


class NecklaceError(ValueError):
    pass


class BadRadii(NecklaceError):
    pass


class CenterOffPlane(NecklaceError):
    pass


class Infeasible(NecklaceError):
    def __init__(self, message, level=None, index=None, report=None):
        super().__init__(message)
        self.level = level
        self.index = index
        self.report = report


class Degenerate(NecklaceError):
    pass


@dataclass(frozen=True)
class ChainParams:
    q: int
    child_major_scale: float
    child_minor_ratio: float
    orientation_pattern: str = "alternating"

    def __post_init__(self):
        if self.q < 3:
            raise NecklaceError(f"a simple chain needs q >= 3, got {self.q}")
        if self.orientation_pattern != "alternating":
            raise NecklaceError(f"unknown orientation pattern {self.orientation_pattern!r}")
        if self.q % 2:
            raise NecklaceError("alternating orientation needs an even q")
        if not 0 < self.child_minor_ratio < 1:
            raise NecklaceError("child_minor_ratio must lie in (0, 1)")
        if not self.child_major_scale > 0:
            raise NecklaceError("child_major_scale must be positive")


@dataclass(frozen=True, eq=False)
class Chain:
    parent: SolidTorus
    children: tuple[SolidTorus, ...]
    params: ChainParams | None = None


@dataclass
class ChainReport:
    disjoint: bool
    contained: bool
    regular_polygon: bool
    linking_pattern: bool
    null_homotopy_proxy: bool
    congruent: bool
    min_separation: float
    min_containment_margin: float
    linking: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (self.disjoint and self.contained and self.regular_polygon
                and self.linking_pattern and self.null_homotopy_proxy and self.congruent)

    def summary(self) -> dict:
        return {
            "disjoint": self.disjoint, "contained": self.contained,
            "regular_polygon": self.regular_polygon,
            "linking_pattern": self.linking_pattern,
            "null_homotopy_proxy": self.null_homotopy_proxy,
            "congruent": self.congruent,
            "min_separation": self.min_separation,
            "min_containment_margin": self.min_containment_margin,
            "violations": {k: list(v) if isinstance(v, tuple) else v
                           for k, v in self.violations.items()},
        }


def make_standard_torus(plane: Plane3, center, R: float, r: float) -> SolidTorus:
    """Torus of revolution whose central circle lies in ``plane``."""
    if not (r > 0 and R > r):
        raise BadRadii(f"need R > r > 0, got R={R}, r={r}")
    if plane.dim != 2:
        raise NecklaceError("make_standard_torus needs a 2-plane")
    center = geom.as_point(center)
    off = abs(float(np.dot(center - plane.origin, plane.normal)))
    if off > CENTER_PLANE_TOL * max(1.0, R):
        raise CenterOffPlane(f"center is {off:g} away from the plane")
    return SolidTorus(Circle3(center, R, plane.normal), r)


def containment_margin(child: SolidTorus, parent: SolidTorus) -> float:
    """Lower bound on r_parent - max_{x in child} dist(x, parent core).

    The child is the ``r_c``-neighbourhood of its core; the core is sampled and
    the half-step between samples is charged against the bound (distance to
    the parent core is 1-Lipschitz).
    """
    rho = child.core.radius
    n = max(256, math.ceil(2.0 * math.pi * rho / (CORE_SAMPLE_REL * parent.minor_radius)))
    step = 2.0 * math.pi * rho / n
    d = point_circle_distance(child.core.sample(n), parent.core)
    return parent.minor_radius - (float(d.max()) + 0.5 * step + child.minor_radius)


def _expected_link(i: int, j: int, q: int) -> int:
    return 1 if (j - i) % q in (1, q - 1) else 0


def verify_chain(c: Chain, exhaustive: bool | None = None) -> ChainReport:
    """Check the four simple-chain conditions plus disjointness and congruence.

    With ``exhaustive`` false, pairs whose bounding balls are disjoint are
    settled without quadrature: a separating plane gives positive separation
    and linking number zero.  ``None`` means exhaustive for ``q <= 32``.
    """
    kids = c.children
    q = len(kids)
    if exhaustive is None:
        exhaustive = q <= EXHAUSTIVE_MAX_Q
    P = c.parent
    R, r = P.major_radius, P.minor_radius
    violations: dict = {}
    centers = np.array([k.center for k in kids])
    rho = np.array([k.core.radius for k in kids])
    rmin = np.array([k.minor_radius for k in kids])

    congruent = bool(np.all(np.abs(rho - rho[0]) <= CONGRUENCE_TOL * rho[0])
                     and np.all(np.abs(rmin - rmin[0]) <= CONGRUENCE_TOL * rmin[0]))
    if not congruent:
        violations["congruent"] = int(np.argmax(np.abs(rho - rho[0]) + np.abs(rmin - rmin[0])))

    # regular q-gon on the parent's central circle, in order
    u, v = P.core.frame()
    rel = centers - P.center
    radial = np.linalg.norm(rel - np.outer(rel @ P.core.normal, P.core.normal), axis=1)
    height = np.abs(rel @ P.core.normal)
    ang = np.arctan2(rel @ v, rel @ u)
    steps = np.mod(np.diff(np.append(ang, ang[0])), 2.0 * np.pi)
    tol = REGULAR_TOL * R
    on_circle = np.all(np.abs(radial - R) <= tol) and np.all(height <= tol)
    step = 2.0 * np.pi / q
    regular = bool(on_circle and (np.all(np.abs(steps - step) <= tol / R)
                                  or np.all(np.abs(steps - (2.0 * np.pi - step)) <= tol / R)))
    if not regular:
        violations["regular_polygon"] = int(np.argmax(np.abs(radial - R) + height))

    # containment and the ball proxy for null-homotopy
    margins = np.array([containment_margin(k, P) for k in kids])
    need = CONTAINMENT_MARGIN * r
    contained = bool(np.all(margins > need))
    if not contained:
        violations["contained"] = int(np.argmin(margins))
    ball = r - (point_circle_distance(centers, P.core) + rho)
    null_proxy = bool(np.all(ball > need))
    if not null_proxy:
        violations["null_homotopy_proxy"] = int(np.argmin(ball))

    # pairwise separation and linking
    reach = rho + rmin
    min_sep = np.inf
    disjoint, pattern = True, True
    linking = {}
    for i in range(q):
        for j in range(i + 1, q):
            gap = float(np.linalg.norm(centers[i] - centers[j]))
            sep = gap - reach[i] - reach[j]
            if exhaustive or sep <= 0:
                sep = geom.torus_separation(kids[i], kids[j])
            min_sep = min(min_sep, sep)
            if sep <= 0 and disjoint:
                disjoint = False
                violations["disjoint"] = (i, j)
            want = _expected_link(i, j, q)
            if not exhaustive and gap > rho[i] + rho[j]:
                lk = 0
            else:
                try:
                    lk = linking_number(kids[i].core, kids[j].core)
                except geom.GeometryError:
                    lk = None
                linking[(i, j)] = lk
            if (lk is None or abs(lk) != want) and pattern:
                pattern = False
                violations["linking_pattern"] = (i, j)

    return ChainReport(disjoint, contained, regular, pattern, null_proxy, congruent,
                       float(min_sep), float(margins.min()), linking, violations)


def chain_children(parent: SolidTorus, params: ChainParams) -> tuple[SolidTorus, ...]:
    q = params.q
    R = parent.major_radius
    rho = params.child_major_scale * R * math.sin(math.pi / q)
    r_child = params.child_minor_ratio * rho
    u, v = parent.core.frame()
    n = parent.core.normal
    kids = []
    for k in range(q):
        phi = 2.0 * math.pi * k / q
        radial = math.cos(phi) * u + math.sin(phi) * v
        normal = radial if k % 2 == 0 else n
        kids.append(SolidTorus(Circle3(parent.center + R * radial, rho, normal), r_child))
    return tuple(kids)


def build_simple_chain(parent: SolidTorus, params: ChainParams,
                       exhaustive: bool | None = None) -> Chain:
    """Place and verify a simple chain; raises :class:`Infeasible` on any failed flag."""
    try:
        kids = chain_children(parent, params)
    except geom.GeometryError as exc:
        raise Infeasible(f"children are not valid tori: {exc}") from exc
    chain = Chain(parent, kids, params)
    report = verify_chain(chain, exhaustive)
    if not report.ok:
        raise Infeasible(f"chain fails verification: {report.violations}", report=report)
    return chain


def _unit_parent(ratio: float) -> SolidTorus:
    return SolidTorus(Circle3(np.zeros(3), 1.0, (0.0, 0.0, 1.0)), ratio)


def _screen(parent: SolidTorus, params: ChainParams) -> float:
    """Cheap feasibility score using the chain's rotational symmetry.

    Rotation by two steps maps the chain onto itself, so pairs involving
    children 0 and 1 represent every pair class.  Returns the smallest
    normalised slack (negative when infeasible).
    """
    kids = chain_children(parent, params)
    q = params.q
    r = parent.minor_radius
    slack = min(containment_margin(kids[0], parent), containment_margin(kids[1], parent)) / r
    rho, rc = kids[0].core.radius, kids[0].minor_radius
    if slack <= 0:
        return slack
    for i in (0, 1):
        for j in range(q):
            if j == i:
                continue
            gap = float(np.linalg.norm(kids[i].center - kids[j].center))
            if gap > 2.0 * (rho + rc):
                continue
            dist = circle_distance(kids[i].core, kids[j].core)
            slack = min(slack, (dist - 2.0 * rc) / (2.0 * rc))
            if slack <= 0:
                return slack
            if gap <= 2.0 * rho:
                want = _expected_link(i, j, q)
                if abs(linking_number(kids[i].core, kids[j].core)) != want:
                    return -1.0
    return slack


def _q_lower_bound(ratio: float, beta: float) -> int:
    # children must interleave (rho > half-chord) and fit: rho (1 + beta) < r
    s = min(1.0, ratio / (1.0 + beta))
    q = math.ceil(math.pi / math.asin(s)) if s < 1 else 4
    q = max(q, 4)
    return q + (q % 2)


def search_chain_params(ratio: float, child_minor_ratio: float | None = None,
                        max_q: int = 100_000) -> ChainParams:
    """Smallest even ``q`` admitting a verified chain; best-slack scale for that ``q``."""
    if not 0 < ratio < 1:
        raise NecklaceError(f"parent ratio must lie in (0, 1), got {ratio}")
    beta = child_minor_ratio if child_minor_ratio is not None else min(ratio, MAX_CHILD_MINOR_RATIO)
    parent = _unit_parent(ratio)
    q = _q_lower_bound(ratio, beta)
    while q <= max_q:
        scored = []
        for scale in SCALE_GRID:
            p = ChainParams(q, float(scale), beta)
            try:
                s = _screen(parent, p)
            except geom.GeometryError:
                continue
            if s > 0:
                scored.append((s, p))
        for s, p in sorted(scored, key=lambda t: -t[0]):
            try:
                build_simple_chain(parent, p, exhaustive=False)
            except Infeasible:
                continue
            log.info("chain params for r/R=%.6g: %s (slack %.3g)", ratio, p, s)
            return p
        q += 2
    raise Infeasible(f"no feasible chain for r/R={ratio} with q <= {max_q}")


@lru_cache(maxsize=None)
def _defaults_table() -> dict[float, ChainParams]:
    try:
        text = resources.files("antoine").joinpath("data/chain_defaults.json").read_text()
    except FileNotFoundError:
        return {}
    table = {}
    for row in json.loads(text)["entries"]:
        table[round(float(row["ratio"]), 9)] = ChainParams(
            int(row["q"]), float(row["child_major_scale"]), float(row["child_minor_ratio"]))
    return table


@lru_cache(maxsize=256)
def _searched(ratio: float) -> ChainParams:
    return search_chain_params(ratio)


def default_chain_params(parent: SolidTorus) -> ChainParams:
    """Shipped defaults for the parent's ``r/R`` when tabulated, else searched."""
    ratio = round(parent.minor_radius / parent.major_radius, 9)
    table = _defaults_table()
    if ratio in table:
        return table[ratio]
    return _searched(ratio)


@dataclass(frozen=True, eq=False)
class DefiningSequence:
    """Finite stages M_1 ⊃ M_2 ⊃ ... of a necklace.

    ``stages[i]`` lists the tori of stage ``i + 1``; ``parents[i][k]`` is the
    index in ``stages[i - 1]`` of the torus containing ``stages[i][k]``.
    """

    stages: tuple[tuple[SolidTorus, ...], ...]
    parents: tuple[tuple[int, ...], ...]
    params: tuple[ChainParams | None, ...] = ()
    thinned: tuple[int, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.stages)

    def max_diameters(self) -> list[float]:
        return [max(t.diameter for t in stage) for stage in self.stages]

    @property
    def decay_ratio(self) -> float:
        """Largest ratio of max component diameters between consecutive stages."""
        d = self.max_diameters()
        if len(d) < 2:
            return 0.0
        return max(b / a for a, b in zip(d, d[1:]))

    def children_of(self, level: int, index: int) -> list[int]:
        """Indices in stage ``level + 1`` of the children of stage-``level`` torus ``index``."""
        return [k for k, p in enumerate(self.parents[level]) if p == index]

    def chain(self, level: int, index: int) -> Chain:
        """The chain inside torus ``index`` of stage ``level`` (1-based level)."""
        kids = tuple(self.stages[level][k] for k in self.children_of(level, index))
        p = self.params[level - 1] if level - 1 < len(self.params) else None
        return Chain(self.stages[level - 1][index], kids, p)

    def chains(self, level: int):
        for i in range(len(self.stages[level - 1])):
            yield self.chain(level, i)

    def nesting_margins(self) -> list[float]:
        """Per stage i >= 2, the smallest containment margin of a torus in its parent."""
        out = []
        for i in range(1, self.depth):
            out.append(min(containment_margin(t, self.stages[i - 1][p])
                           for t, p in zip(self.stages[i], self.parents[i])))
        return out


def _extend(seq: DefiningSequence, params: ChainParams | None, level: int,
            exhaustive: bool | None = None) -> DefiningSequence:
    new, parents = [], []
    used = set()
    for idx, torus in enumerate(seq.stages[-1]):
        p = params or default_chain_params(torus)
        used.add(p)
        try:
            chain = build_simple_chain(torus, p, exhaustive)
        except Infeasible as exc:
            raise Infeasible(f"level {level}, torus {idx}: {exc}",
                             level=level, index=idx, report=exc.report) from exc
        new.extend(chain.children)
        parents.extend([idx] * len(chain.children))
    return replace(seq, stages=seq.stages + (tuple(new),),
                   parents=seq.parents + (tuple(parents),),
                   params=seq.params + (used.pop() if len(used) == 1 else None,))


def build_necklace(seed: SolidTorus, params_per_level=None, depth: int = 1,
                   exhaustive: bool | None = None) -> DefiningSequence:
    """Stage 1 is ``seed``; each further stage puts a simple chain in every torus.

    ``params_per_level[i]`` is used to build stage ``i + 2``; ``None`` entries
    (or a missing list) mean per-parent defaults.
    """
    if depth < 1:
        raise NecklaceError("depth must be at least 1")
    params_per_level = list(params_per_level or [])
    seq = DefiningSequence(((seed,),), ((),))
    for level in range(2, depth + 1):
        p = params_per_level[level - 2] if level - 2 < len(params_per_level) else None
        seq = _extend(seq, p, level, exhaustive)
    return seq


def cover_total_width(radius: float, n: int) -> float:
    """Total width of the n-gon side-line tube family around a circle."""
    return 8.0 * n * radius * math.sin(math.pi / (2 * n)) ** 2


def cover_count(radius: float, eps: float) -> int:
    """Minimal N >= 3 with total cover width below ``eps`` (width decreases in N)."""
    if not eps > 0:
        raise NecklaceError("eps must be positive")
    if cover_total_width(radius, 3) < eps:
        return 3
    lo, hi = 3, 6
    while not cover_total_width(radius, hi) < eps:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cover_total_width(radius, mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def circle_tube_cover(circle: Circle3, eps: float) -> list[Tube]:
    """Tubes around the side lines of an inscribed regular N-gon.

    Each tube has radius 2R(1 - cos(pi/N)), twice the sagitta of one side, so
    the tube interiors cover the circle; N is minimal with total width < eps.
    """
    n = cover_count(circle.radius, eps)
    t = 4.0 * circle.radius * math.sin(math.pi / (2 * n)) ** 2
    verts = circle.sample(n)
    nxt = np.roll(verts, -1, axis=0)
    return [Tube(Line3(0.5 * (a + b), b - a), t) for a, b in zip(verts, nxt)]


def thin_to_tubes(seq: DefiningSequence, level: int, eps: float,
                  exhaustive: bool | None = None) -> tuple[DefiningSequence, PlankCertificate]:
    """Shrink the minor radii of stage ``level`` into a cheap tube cover.

    Every core circle at the level gets a tube cover with budget
    ``eps / count``; the torus keeps its core and is shrunk to
    ``THIN_FRACTION`` times the cover's sagitta, which leaves the sampling
    margin the certificate records.  The total tube width is below ``eps``, so
    the certificate claims no shadow disk of radius ``eps / 2``.

    Stages below ``level`` are rebuilt with default chains inside the thinned
    tori: their old cores reach farther from the parent core than the thinned
    radius, so they cannot be kept.
    """
    if not 1 <= level <= seq.depth:
        raise NecklaceError(f"level must be in [1, {seq.depth}], got {level}")
    if not eps > 0:
        raise NecklaceError("eps must be positive")
    tori = seq.stages[level - 1]
    budget = eps / len(tori)
    tubes, thin, t_min = [], [], math.inf
    for k, torus in enumerate(tori):
        n = cover_count(torus.major_radius, budget)
        sagitta = torus.major_radius * (1.0 - math.cos(math.pi / n))
        r_new = min(torus.minor_radius, THIN_FRACTION * sagitta)
        if level > 1:
            scale = seq.stages[level - 2][seq.parents[level - 1][k]].major_radius
        else:
            scale = torus.major_radius
        if r_new < DEGENERATE_REL * scale:
            raise Degenerate(f"torus {k} would need minor radius {r_new:g}")
        cover = circle_tube_cover(torus.core, budget)
        thin.append(SolidTorus(torus.core, r_new))
        tubes.extend(cover)
        t_min = min(t_min, cover[0].radius)
    stages = seq.stages[:level - 1] + (tuple(thin),)
    out = replace(seq, stages=stages, parents=seq.parents[:level],
                  params=seq.params[:level - 1],
                  thinned=tuple(sorted(set(seq.thinned) | {level})))
    if level > 1:
        for chain in out.chains(level - 1):
            report = verify_chain(chain, exhaustive)
            if not report.ok:
                raise Infeasible(f"thinned chain fails verification: {report.violations}",
                                 level=level, report=report)
    for deeper in range(level + 1, seq.depth + 1):
        out = _extend(out, None, deeper, exhaustive)
    cert = PlankCertificate(tuple(tubes), level, eps / 2.0, t_min / 8.0, t_min / 16.0,
                            {"circles": len(tori), "per_circle_budget": budget})
    check_certificate(cert, thin)
    return out, cert


def build_thinned_necklace(seed: SolidTorus, depth: int, schedule=None,
                           exhaustive: bool | None = None):
    """Alternate chain building and thinning, stage by stage.

    ``schedule(i)`` gives the width budget of stage ``i``; the default
    ``2 / i`` certifies that no shadow of stage ``i`` holds a disk of radius
    ``1 / i``.  Returns the sequence and one certificate per stage.
    """
    schedule = schedule or (lambda i: 2.0 / i)
    seq = build_necklace(seed, depth=1)
    certs = []
    for level in range(1, depth + 1):
        if level > 1:
            seq = _extend(seq, None, level, exhaustive)
        seq, cert = thin_to_tubes(seq, level, schedule(level), exhaustive)
        certs.append(cert)
    return seq, certs
