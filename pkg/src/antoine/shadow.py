"""Orthogonal shadows of tori and tubes: rasters, components, disks, intervals.

A torus is the ``r``-neighbourhood of its core circle, so its shadow on a
2-plane is the ``r``-neighbourhood of the projected core (an ellipse, possibly
degenerate).  Pixel decisions use the distance from the pixel centre to a
sampling of that ellipse.  An outer pixel is set when its cell may meet the
shadow (sampling error and half-diagonal added); an inner pixel is set only
when its centre is certainly in the shadow.  A tube's shadow is a strip or a disk and its
distance function is exact.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .geom import Disk2, Plane3, SolidTorus, Strip2, Tube, as_unit, project

RESOLUTION_FACTOR = 4         # pixel must not exceed minor radius / this
SAMPLE_FRACTION = 0.25        # core sample spacing, in pixels
AXIS_PERP_TOL = 1e-12
SQRT2 = math.sqrt(2.0)
HALF_DIAG = SQRT2 / 2.0


class ShadowError(ValueError):
    pass


class ResolutionTooCoarse(ShadowError):
    pass


class DegenerateFit(ShadowError):
    pass


def worker_count() -> int:
    """cKDTree worker count; ``NECKLACE_THREADS`` caps it."""
    env = os.environ.get("NECKLACE_THREADS")
    if env:
        return max(1, int(env))
    return 1


@dataclass(frozen=True)
class RasterFrame:
    """Pixel grid: pixel (i, j) has centre ``lower + h * (j + 1/2, i + 1/2)``."""

    lower: tuple[float, float]
    pixel: float
    width: int
    height: int

    def __post_init__(self):
        if not self.pixel > 0:
            raise ShadowError("pixel size must be positive")
        if self.width < 1 or self.height < 1:
            raise ShadowError("frame must have at least one pixel")

    @classmethod
    def around(cls, lo, hi, pixel: float) -> RasterFrame:
        """Smallest grid covering the box ``[lo, hi]``, padded by one pixel."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        n = np.maximum(np.ceil((hi - lo) / pixel).astype(int), 1) + 2
        return cls((float(lo[0] - pixel), float(lo[1] - pixel)), float(pixel),
                   int(n[0]), int(n[1]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def xs(self, j0: int = 0, j1: int | None = None) -> np.ndarray:
        j1 = self.width if j1 is None else j1
        return self.lower[0] + self.pixel * (np.arange(j0, j1) + 0.5)

    def ys(self, i0: int = 0, i1: int | None = None) -> np.ndarray:
        i1 = self.height if i1 is None else i1
        return self.lower[1] + self.pixel * (np.arange(i0, i1) + 0.5)

    def centers(self, i0=0, i1=None, j0=0, j1=None) -> np.ndarray:
        x, y = np.meshgrid(self.xs(j0, j1), self.ys(i0, i1))
        return np.stack([x, y], axis=-1)

    def window(self, lo, hi) -> tuple[int, int, int, int]:
        """Index ranges of pixels whose centres may fall in ``[lo, hi]``."""
        h = self.pixel
        j0 = max(0, int(math.floor((lo[0] - self.lower[0]) / h - 0.5)))
        j1 = min(self.width, int(math.ceil((hi[0] - self.lower[0]) / h + 0.5)))
        i0 = max(0, int(math.floor((lo[1] - self.lower[1]) / h - 0.5)))
        i1 = min(self.height, int(math.ceil((hi[1] - self.lower[1]) / h + 0.5)))
        return i0, i1, j0, j1


@dataclass(frozen=True, eq=False)
class ShadowRaster:
    plane: Plane3
    frame: RasterFrame
    bits: np.ndarray
    mode: str

    def __post_init__(self):
        if self.mode not in ("outer", "inner"):
            raise ShadowError(f"unknown raster mode {self.mode!r}")
        if self.bits.shape != self.frame.shape:
            raise ShadowError("bit grid does not match the frame")

    @property
    def pixel(self) -> float:
        return self.frame.pixel

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def occupied_centers(self) -> np.ndarray:
        i, j = np.nonzero(self.bits)
        f = self.frame
        return np.stack([f.lower[0] + f.pixel * (j + 0.5),
                         f.lower[1] + f.pixel * (i + 0.5)], axis=-1)


@dataclass(frozen=True)
class Interval1:
    min: float
    max: float

    def __post_init__(self):
        if not self.min <= self.max:
            raise ShadowError(f"interval needs min <= max, got [{self.min}, {self.max}]")

    @property
    def length(self) -> float:
        return self.max - self.min

    def contains(self, x, tol: float = 0.0) -> bool:
        return self.min - tol <= x <= self.max + tol


def _plane_2d(target: Plane3) -> Plane3:
    if target.dim != 2:
        raise ShadowError("shadows are taken on 2-planes")
    return target


def _torus_extent(t: SolidTorus, target: Plane3):
    """Projected centre and half-extents of the core ellipse along the axes."""
    c = project(t.center, target)
    u, v = t.core.frame()
    a, b = target.basis @ u, target.basis @ v
    half = t.major_radius * np.hypot(a, b)
    return c, half


def _item_box(item, target: Plane3):
    if isinstance(item, SolidTorus):
        c = project(item.center, target)
        reach = item.major_radius + item.minor_radius
        return c - reach, c + reach
    if isinstance(item, Tube):
        s = project_tube(item, target)
        if isinstance(s, Disk2):
            return s.center - s.radius, s.center + s.radius
        raise ShadowError("a tube not perpendicular to the plane has an unbounded shadow; "
                          "pass an explicit frame")
    raise ShadowError(f"cannot project {type(item).__name__}")


def default_frame(items, target: Plane3, pixel: float) -> RasterFrame:
    """Bounding box of the projected bounding spheres, padded by one pixel."""
    boxes = [_item_box(x, target) for x in items]
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    return RasterFrame.around(lo, hi, pixel)


def core_samples(t: SolidTorus, target: Plane3, spacing: float) -> tuple[np.ndarray, float]:
    """Projected core samples with 3-D arc spacing at most ``spacing``.

    Projection is 1-Lipschitz, so every point of the projected core lies within
    half the returned spacing of a sample.
    """
    n = max(8, math.ceil(2.0 * math.pi * t.major_radius / spacing))
    return project(t.core.sample(n), target), 2.0 * math.pi * t.major_radius / n


def _paint_torus(bits, t: SolidTorus, target: Plane3, frame: RasterFrame, mode: str) -> None:
    h = frame.pixel
    samples, sigma = core_samples(t, target, SAMPLE_FRACTION * h)
    r = t.minor_radius
    if mode == "outer":
        # distance to the true core is at least the sampled distance minus sigma/2
        thr = r + HALF_DIAG * h + 0.5 * sigma
    else:
        # sampled distance bounds the true one from above
        thr = r
    c, half = _torus_extent(t, target)
    i0, i1, j0, j1 = frame.window(c - half - thr, c + half + thr)
    if i0 >= i1 or j0 >= j1:
        return
    pts = frame.centers(i0, i1, j0, j1).reshape(-1, 2)
    d, _ = cKDTree(samples).query(pts, distance_upper_bound=thr * (1 + 1e-12) + 1e-300,
                                  workers=worker_count())
    bits[i0:i1, j0:j1] |= (d <= thr).reshape(i1 - i0, j1 - j0)


def project_tube(t: Tube, target: Plane3) -> Strip2 | Disk2:
    """Strip of half-width r about the projected axis, or a disk if the axis is normal."""
    _plane_2d(target)
    p = project(t.axis.base, target)
    d = target.basis @ t.axis.direction
    if np.hypot(*d) <= AXIS_PERP_TOL:
        return Disk2(target, p, t.radius)
    return Strip2(target, p, d, t.radius)


def _paint_tube(bits, t: Tube, target: Plane3, frame: RasterFrame, mode: str) -> None:
    shape = project_tube(t, target)
    h = frame.pixel
    thr = shape.radius if isinstance(shape, Disk2) else shape.half_width
    if mode == "outer":
        thr += HALF_DIAG * h
    if isinstance(shape, Disk2):
        i0, i1, j0, j1 = frame.window(shape.center - thr, shape.center + thr)
    else:
        i0, i1, j0, j1 = 0, frame.height, 0, frame.width
    if i0 >= i1 or j0 >= j1:
        return
    d = shape.distance(frame.centers(i0, i1, j0, j1))
    bits[i0:i1, j0:j1] |= d <= thr


def _check_resolution(items, pixel: float) -> None:
    for k, x in enumerate(items):
        if isinstance(x, SolidTorus) and pixel > x.minor_radius / RESOLUTION_FACTOR:
            raise ResolutionTooCoarse(
                f"item {k}: pixel {pixel:g} exceeds minor radius / {RESOLUTION_FACTOR} "
                f"= {x.minor_radius / RESOLUTION_FACTOR:g}")


def union_shadow(items, target: Plane3, pixel: float, mode: str = "outer",
                 frame: RasterFrame | None = None,
                 check_resolution: bool = True) -> ShadowRaster:
    """Pixelwise OR of the shadows of tori and tubes."""
    items = list(items)
    if not items:
        raise ShadowError("union_shadow needs at least one item")
    _plane_2d(target)
    if mode not in ("outer", "inner"):
        raise ShadowError(f"unknown raster mode {mode!r}")
    if check_resolution:
        _check_resolution(items, pixel)
    if frame is None:
        frame = default_frame(items, target, pixel)
    elif not math.isclose(frame.pixel, pixel, rel_tol=1e-12):
        raise ShadowError("frame pixel size differs from the requested pixel")
    bits = np.zeros(frame.shape, dtype=bool)
    for x in items:
        if isinstance(x, SolidTorus):
            _paint_torus(bits, x, target, frame, mode)
        elif isinstance(x, Tube):
            _paint_tube(bits, x, target, frame, mode)
        else:
            raise ShadowError(f"cannot project {type(x).__name__}")
    return ShadowRaster(target, frame, bits, mode)


def project_torus(t: SolidTorus, target: Plane3, pixel: float, mode: str = "outer",
                  frame: RasterFrame | None = None,
                  check_resolution: bool = True) -> ShadowRaster:
    if not pixel > 0:
        raise ResolutionTooCoarse("pixel size must be positive")
    return union_shadow([t], target, pixel, mode, frame, check_resolution)


@dataclass(frozen=True, eq=False)
class Components:
    count: int
    labels: np.ndarray


FOUR_NEIGHBOURS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def connected_components(r: ShadowRaster) -> Components:
    """4-connected labelling of occupied pixels.

    On outer rasters, pieces closer than a pixel can merge, so the count is a
    lower bound for the true number of components.
    """
    labels, n = ndimage.label(r.bits, structure=FOUR_NEIGHBOURS)
    return Components(int(n), labels)


@dataclass(frozen=True)
class InscribedDisk:
    radius: float
    center: tuple[float, float]
    error_bound: float


def max_inscribed_disk(r: ShadowRaster) -> InscribedDisk:
    """Largest distance from an occupied pixel centre to an empty one.

    The raster is padded with empty pixels, so shapes touching the frame are
    bounded by it.  Relative to the set the raster approximates, the value is
    off by at most ``pixel * sqrt(2)``.
    """
    if not r.bits.any():
        return InscribedDisk(0.0, (math.nan, math.nan), r.pixel * SQRT2)
    padded = np.pad(r.bits, 1)
    dist = ndimage.distance_transform_edt(padded)[1:-1, 1:-1]
    i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
    f = r.frame
    center = (f.lower[0] + f.pixel * (j + 0.5), f.lower[1] + f.pixel * (i + 0.5))
    return InscribedDisk(float(dist[i, j]) * f.pixel, center, r.pixel * SQRT2)


def item_line_interval(item, line: Plane3) -> Interval1:
    """Exact projection of a torus or tube onto a line, in line coordinates."""
    u = line.basis[0]
    c = float((item.center if isinstance(item, SolidTorus) else item.axis.base) @ u
              - line.origin @ u)
    if isinstance(item, SolidTorus):
        nu = float(item.core.normal @ u)
        half = item.major_radius * math.sqrt(max(0.0, 1.0 - nu * nu)) + item.minor_radius
        return Interval1(c - half, c + half)
    if isinstance(item, Tube):
        du = float(item.axis.direction @ u)
        if abs(du) > AXIS_PERP_TOL:
            return Interval1(-math.inf, math.inf)
        return Interval1(c - item.radius, c + item.radius)
    raise ShadowError(f"cannot project {type(item).__name__}")


@dataclass(frozen=True)
class LineProjection:
    interval: Interval1
    gaps: tuple[tuple[float, float], ...]
    resolution: float
    uncovered_grid_points: int

    @property
    def connected(self) -> bool:
        return not self.gaps and self.uncovered_grid_points == 0


def merge_intervals(intervals) -> list[Interval1]:
    out: list[list[float]] = []
    for iv in sorted(intervals, key=lambda x: (x.min, x.max)):
        if out and iv.min <= out[-1][1]:
            out[-1][1] = max(out[-1][1], iv.max)
        else:
            out.append([iv.min, iv.max])
    return [Interval1(a, b) for a, b in out]


def line_projection_interval(items, line: Plane3, resolution: float = 1e-3,
                             samples: int = 64) -> LineProjection:
    """Hull of the items' projections onto a line, with a gap report.

    Per-item intervals are exact.  Gaps are the holes of their union; a grid
    scan at ``resolution`` counts uncovered grid points as an independent check.
    ``samples`` core points per torus are also checked to fall in the hull.
    """
    items = list(items)
    if not items:
        raise ShadowError("line_projection_interval needs at least one item")
    if line.dim != 1:
        raise ShadowError("target must be a line (1-plane)")
    ivs = [item_line_interval(x, line) for x in items]
    merged = merge_intervals(ivs)
    hull = Interval1(merged[0].min, merged[-1].max)
    gaps = tuple((a.max, b.min) for a, b in zip(merged, merged[1:]))
    u = line.basis[0]
    for x in items:
        if isinstance(x, SolidTorus):
            t = (x.core.sample(samples) - line.origin) @ u
            if t.min() < hull.min - 1e-9 or t.max() > hull.max + 1e-9:
                raise ShadowError("sampled core point outside the analytic hull")
    uncovered = 0
    if math.isfinite(hull.length):
        n = int(math.floor(hull.length / resolution)) + 1
        grid = hull.min + resolution * np.arange(n)
        lo = np.array([m.min for m in merged])
        hi = np.array([m.max for m in merged])
        k = np.searchsorted(lo, grid, side="right") - 1
        uncovered = int(np.count_nonzero((k < 0) | (grid > hi[np.maximum(k, 0)])))
    return LineProjection(hull, gaps, float(resolution), uncovered)


@dataclass(frozen=True)
class BoxCountFit:
    slope: float
    intercept: float
    residual: float
    sizes: tuple[float, ...]
    counts: tuple[int, ...]


def box_counts(bits: np.ndarray, k: int) -> int:
    h, w = bits.shape
    H, W = -(-h // k) * k, -(-w // k) * k
    padded = np.zeros((H, W), dtype=bool)
    padded[:h, :w] = bits
    return int(padded.reshape(H // k, k, W // k, k).any(axis=(1, 3)).sum())


def box_counting_dimension(r: ShadowRaster, scales=None) -> BoxCountFit:
    """Least-squares slope of log N(s) against log(1/s).

    ``scales`` are box sizes in pixels; the default is powers of two up to an
    eighth of the smaller frame side.
    """
    if scales is None:
        top = max(1, min(r.frame.shape) // 8)
        scales = [2 ** k for k in range(int(math.log2(top)) + 1)]
    scales = sorted({int(s) for s in scales})
    if len(scales) < 4 or scales[0] < 1 or scales[-1] < 4 * scales[0]:
        raise DegenerateFit("need at least 4 box sizes spanning 2 octaves")
    counts = [box_counts(r.bits, k) for k in scales]
    if min(counts) == 0:
        raise DegenerateFit("empty raster")
    sizes = np.array(scales, dtype=float) * r.pixel
    x, y = np.log(1.0 / sizes), np.log(np.array(counts, dtype=float))
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return BoxCountFit(float(coef[0]), float(coef[1]), res, tuple(sizes.tolist()), tuple(counts))


def random_planes(k: int, seed: int) -> list[Plane3]:
    """``k`` planes through the origin with uniform normals, one RNG stream each."""
    streams = np.random.SeedSequence(seed).spawn(k)
    return [Plane3.from_normal(np.zeros(3), as_unit(np.random.default_rng(s).normal(size=3)))
            for s in streams]


def random_lines(k: int, seed: int) -> list[Plane3]:
    streams = np.random.SeedSequence(seed).spawn(k)
    return [Plane3.line(np.zeros(3), np.random.default_rng(s).normal(size=3)) for s in streams]


def _fmt(a) -> str:
    return " ".join(repr(float(x)) for x in np.ravel(a))


def write_pgm(r: ShadowRaster, path) -> None:
    """Binary PGM; the top row is the largest y.  Comments carry the frame."""
    f = r.frame
    header = (
        "P5\n"
        f"# origin {_fmt(r.plane.origin)}\n"
        f"# basis {_fmt(r.plane.basis)}\n"
        f"# pixel {f.pixel!r}\n"
        f"# lower {_fmt(f.lower)}\n"
        f"# mode {r.mode}\n"
        f"{f.width} {f.height}\n255\n")
    body = np.where(r.bits[::-1], 255, 0).astype(np.uint8).tobytes()
    Path(path).write_bytes(header.encode("ascii") + body)


def read_pgm(path) -> ShadowRaster:
    data = Path(path).read_bytes()
    meta, tokens, pos = {}, [], 0
    # header: magic, comments, width, height, maxval, then one whitespace byte
    while len(tokens) < 4:
        m = re.compile(rb"\s*(#[^\n]*\n|\S+)").match(data, pos)
        if m is None:
            raise ShadowError("truncated PGM header")
        tok = m.group(1)
        pos = m.end()
        if tok.startswith(b"#"):
            key, _, val = tok[1:].decode("ascii").strip().partition(" ")
            meta[key] = val
        else:
            tokens.append(tok)
    if tokens[0] != b"P5":
        raise ShadowError("not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    pix = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos + 1).reshape(h, w)
    bits = pix[::-1] > maxval // 2
    plane = Plane3([float(x) for x in meta["origin"].split()],
                   np.array([float(x) for x in meta["basis"].split()]).reshape(-1, 3))
    lower = tuple(float(x) for x in meta["lower"].split())
    frame = RasterFrame(lower, float(meta["pixel"]), w, h)
    return ShadowRaster(plane, frame, np.ascontiguousarray(bits), meta.get("mode", "outer"))
