"""Plank-theorem bookkeeping for tube families.

A certificate records a finite family of tubes whose interiors cover a set and
whose total width is below ``2 * claimed_eps``.  The planar plank theorem
(Tarski for the plane, Bang in general) then forbids any orthogonal shadow of
the covered set from containing a disk of radius ``claimed_eps``: each tube
projects into a strip of the tube's width, and a disk of radius ``eps`` cannot
be covered by strips of total width below ``2 * eps``.  The theorem itself is
taken as given; only its hypotheses are checked here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import singledispatch
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .geom import (Circle3, Disk2, Line3, Plane3, SolidTorus, Strip2, Tube,
                   apply_similarity)

NEAREST_TUBES = 12
SMALL_FAMILY = 64


class CertificateError(Exception):
    pass


class Unsupported(CertificateError, TypeError):
    pass


class CoverageFail(CertificateError):
    def __init__(self, message, witness=None, item=None):
        super().__init__(message)
        self.witness = witness
        self.item = item


class WidthFail(CertificateError):
    pass


class Contradiction(CertificateError):
    pass


@singledispatch
def width(x) -> float:
    """Minimal distance between two parallel planes enclosing ``x``."""
    raise Unsupported(f"no width rule for {type(x).__name__}")


@width.register
def _(x: Tube) -> float:
    return 2.0 * x.radius


@width.register
def _(x: Strip2) -> float:
    return 2.0 * x.half_width


@width.register
def _(x: SolidTorus) -> float:
    # extent along unit u is 2(R|u_parallel| + r); minimised along the core normal
    return 2.0 * x.minor_radius


@dataclass(frozen=True, eq=False)
class PlankCertificate:
    tubes: tuple[Tube, ...]
    covered_level: int
    claimed_eps: float
    sample_spacing: float
    margin: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tubes", tuple(self.tubes))

    @property
    def total_width(self) -> float:
        return math.fsum(2.0 * t.radius for t in self.tubes)

    @property
    def min_tube_radius(self) -> float:
        return min(t.radius for t in self.tubes)


@dataclass(frozen=True)
class CertificateVerdict:
    valid: bool
    total_width: float
    claimed_eps: float
    samples: int
    min_slack: float


def _core_and_radius(item):
    if isinstance(item, SolidTorus):
        return item.core, item.minor_radius
    if isinstance(item, Circle3):
        return item, 0.0
    raise Unsupported(f"cannot certify coverage of {type(item).__name__}")


class _TubeIndex:
    def __init__(self, tubes):
        self.base = np.array([t.axis.base for t in tubes])
        self.dir = np.array([t.axis.direction for t in tubes])
        self.radius = np.array([t.radius for t in tubes])
        self.tree = cKDTree(self.base) if len(tubes) > SMALL_FAMILY else None

    def slack(self, points, idx=None) -> np.ndarray:
        """max over tubes of (radius - distance to axis), per point."""
        if idx is None:
            idx = np.broadcast_to(np.arange(len(self.radius)), (len(points), len(self.radius)))
        d = points[:, None, :] - self.base[idx]
        dist = np.linalg.norm(np.cross(d, self.dir[idx]), axis=-1)
        return np.max(self.radius[idx] - dist, axis=1)

    def best_slack(self, points) -> np.ndarray:
        if self.tree is None:
            return self.slack(points)
        k = min(NEAREST_TUBES, len(self.radius))
        _, idx = self.tree.query(points, k=k)
        return self.slack(points, idx)

    def slack_near(self, points, center, reach) -> np.ndarray:
        """Slack against every tube based within ``reach`` of ``center``."""
        if self.tree is None:
            return self.slack(points)
        idx = np.array(self.tree.query_ball_point(center, reach), dtype=int)
        if idx.size == 0:
            return np.full(len(points), -np.inf)
        return self.slack(points, np.broadcast_to(idx, (len(points), idx.size)))


def check_certificate(c: PlankCertificate, items, chunk: int = 200_000) -> CertificateVerdict:
    """Verify the certificate's hypotheses against ``items`` (tori or circles).

    Coverage: each item is the ``r``-neighbourhood of a core circle, sampled at
    arc spacing ``<= c.sample_spacing``.  Any item point lies within
    ``r + spacing/2`` of a sample, so a sample whose best tube satisfies
    ``dist(axis) + r + spacing/2 <= radius - margin`` certifies its whole
    neighbourhood.  Restricting the search to nearby tubes can only make the
    check stricter; a failing sample is retried against every tube based
    within reach before a witness is reported.
    """
    if not c.tubes:
        raise CoverageFail("empty tube family")
    if not (c.sample_spacing > 0 and c.margin > 0):
        raise CoverageFail("coverage evidence needs positive spacing and margin")
    index = _TubeIndex(c.tubes)
    max_tube = float(index.radius.max())
    n_samples = 0
    min_slack = np.inf
    for k, item in enumerate(items):
        core, r = _core_and_radius(item)
        n = max(16, math.ceil(2.0 * math.pi * core.radius / c.sample_spacing))
        spacing = 2.0 * math.pi * core.radius / n
        need = r + 0.5 * spacing + c.margin
        for lo in range(0, n, chunk):
            theta = np.arange(lo, min(n, lo + chunk)) * (2.0 * np.pi / n)
            pts = core.points(theta)
            slack = index.best_slack(pts) - need
            bad = np.flatnonzero(slack < 0)
            if bad.size:
                reach = 2.0 * core.radius + r + max_tube
                retry = index.slack_near(pts[bad], core.center, reach) - need
                slack[bad] = retry
                still = bad[retry < 0]
                if still.size:
                    w = pts[still[0]]
                    raise CoverageFail(
                        f"item {k}: core point {w.tolist()} not covered with margin",
                        witness=w, item=k)
            min_slack = min(min_slack, float(slack.min()))
        n_samples += n
    total = c.total_width
    if not total < 2.0 * c.claimed_eps:
        raise WidthFail(f"total width {total!r} is not < 2*eps = {2.0 * c.claimed_eps!r}")
    return CertificateVerdict(True, total, c.claimed_eps, n_samples, min_slack + c.margin)


def shadow_strips(c: PlankCertificate, plane: Plane3) -> list[Strip2]:
    """One covering strip per tube in ``plane``; widths equal the tube widths."""
    from .shadow import project_tube

    strips = []
    for t in c.tubes:
        s = project_tube(t, plane)
        if isinstance(s, Disk2):
            s = Strip2(plane, s.center, (1.0, 0.0), s.radius)
        strips.append(s)
    return strips


@dataclass(frozen=True)
class CrossCheckReport:
    radii: tuple[float, ...]
    bound: float

    @property
    def max_radius(self) -> float:
        return max(self.radii)


def empirical_cross_check(c: PlankCertificate, items, planes, pixel: float) -> CrossCheckReport:
    """Rasterise the items' shadows and compare inscribed disks to the claim."""
    from .shadow import max_inscribed_disk, union_shadow

    bound = c.claimed_eps + pixel * math.sqrt(2.0)
    radii = []
    for k, plane in enumerate(planes):
        raster = union_shadow(items, plane, pixel, mode="outer", check_resolution=False)
        rad = max_inscribed_disk(raster).radius
        radii.append(rad)
        if rad > bound:
            raise Contradiction(
                f"plane {k}: inscribed radius {rad:.6g} exceeds certified {bound:.6g}")
    return CrossCheckReport(tuple(radii), bound)


def transform_certificate(c: PlankCertificate, s) -> PlankCertificate:
    return PlankCertificate(
        tuple(apply_similarity(t, s) for t in c.tubes), c.covered_level,
        c.claimed_eps * s.scale, c.sample_spacing * s.scale, c.margin * s.scale,
        dict(c.meta))


def certificate_to_dict(c: PlankCertificate, verdict: CertificateVerdict | None = None) -> dict:
    return {
        "tubes": [{"base": t.axis.base.tolist(), "direction": t.axis.direction.tolist(),
                   "radius": t.radius} for t in c.tubes],
        "covered_level": c.covered_level,
        "total_width": c.total_width,
        "claimed_eps": c.claimed_eps,
        "evidence": {"sample_spacing": c.sample_spacing, "margin": c.margin},
        "meta": c.meta,
        "verdict": None if verdict is None else ("VALID" if verdict.valid else "INVALID"),
    }


def certificate_from_dict(d: dict) -> PlankCertificate:
    tubes = tuple(Tube(Line3(t["base"], t["direction"]), t["radius"]) for t in d["tubes"])
    c = PlankCertificate(tubes, int(d["covered_level"]), float(d["claimed_eps"]),
                         float(d["evidence"]["sample_spacing"]),
                         float(d["evidence"]["margin"]), dict(d.get("meta", {})))
    if "total_width" in d and d["total_width"] != c.total_width:
        raise CertificateError("stored total_width disagrees with the tube radii")
    return c


def save_certificate(c: PlankCertificate, path, verdict=None) -> None:
    Path(path).write_text(json.dumps(certificate_to_dict(c, verdict), indent=1))


def load_certificate(path) -> PlankCertificate:
    return certificate_from_dict(json.loads(Path(path).read_text()))

