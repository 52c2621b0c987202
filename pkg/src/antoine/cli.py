"""Command-line front end.

    necklace build|thin|shadow|mesh|planar --config scene.json [--level N]
             [--random K] [--seed S]

Each run writes into the config's ``output_dir`` with fixed file names, and
every JSON output carries the sha256 of the canonical config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import certify, necklace, planar, shadow
from .geom import Circle3, GeometryError, SolidTorus

log = logging.getLogger("antoine.cli")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_RASTER_SIDE = 4096


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SeedTorus:
    center: tuple = (0.0, 0.0, 0.0)
    normal: tuple = (0.0, 0.0, 1.0)
    major_radius: float = 1.0
    minor_radius: float = 0.2


@dataclass(frozen=True)
class PlanarConfig:
    pattern: str | None = None
    depth: int = 4
    grid_step_deg: float = 1.0


@dataclass(frozen=True)
class SceneConfig:
    seed: SeedTorus = field(default_factory=SeedTorus)
    params: object = "auto"            # "auto" or a list of per-level dicts / "auto"
    depth: int = 2
    schedule: tuple | None = None      # eps per level; None means 2 / i
    pixel: float | None = None         # None: min minor radius / 4, capped in size
    rng_seed: int = 0
    planes: int = 3
    output_dir: str = "out"
    tessellation: tuple = (32, 16)
    exhaustive: bool | None = None
    planar: PlanarConfig = field(default_factory=PlanarConfig)

    def __post_init__(self):
        if not isinstance(self.depth, int) or self.depth < 1:
            raise ConfigError("depth must be an integer >= 1")
        if self.pixel is not None and not self.pixel > 0:
            raise ConfigError("pixel must be positive")
        if self.schedule is not None:
            eps = list(self.schedule)
            if any(not e > 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
                raise ConfigError("schedule must be positive and strictly decreasing")
        rings, segs = self.tessellation
        if int(rings) < 3 or int(segs) < 3:
            raise ConfigError("tessellation needs at least 3 rings and 3 segments")
        if self.planes < 1:
            raise ConfigError("planes must be >= 1")

    def eps(self, level: int) -> float:
        if self.schedule is None:
            return 2.0 / level
        if level > len(self.schedule):
            raise ConfigError(f"schedule has no entry for level {level}")
        return float(self.schedule[level - 1])

    def level_params(self):
        if self.params in (None, "auto"):
            return None
        if not isinstance(self.params, (list, tuple)):
            raise ConfigError("params must be 'auto' or a list")
        out = []
        for p in self.params:
            out.append(None if p in (None, "auto") else necklace.ChainParams(**p))
        return out

    def seed_torus(self) -> SolidTorus:
        s = self.seed
        return SolidTorus(Circle3(s.center, s.major_radius, s.normal), s.minor_radius)


def _build(cls, data, name):
    if not isinstance(data, dict):
        raise ConfigError(f"{name} must be an object")
    known = set(cls.__dataclass_fields__)
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown {name} keys: {sorted(extra)}")
    return data


def load_config(path) -> tuple[SceneConfig, str]:
    """Parse and validate; returns the config and its canonical hash."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        d = dict(_build(SceneConfig, raw, "config"))
        if "seed" in d:
            d["seed"] = SeedTorus(**_build(SeedTorus, d["seed"], "seed"))
        if "planar" in d:
            d["planar"] = PlanarConfig(**_build(PlanarConfig, d["planar"], "planar"))
        for key in ("schedule", "tessellation"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        cfg = SceneConfig(**d)
        cfg.seed_torus()
        cfg.level_params()
    except (TypeError, ValueError, GeometryError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, config_hash(raw)


def config_hash(raw: dict) -> str:
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(text.encode()).hexdigest()


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def torus_to_dict(t: SolidTorus) -> dict:
    return {"center": t.center.tolist(), "normal": t.core.normal.tolist(),
            "major_radius": t.major_radius, "minor_radius": t.minor_radius}


def torus_from_dict(d: dict) -> SolidTorus:
    return SolidTorus(Circle3(d["center"], d["major_radius"], d["normal"]), d["minor_radius"])


def sequence_to_dict(seq: necklace.DefiningSequence) -> dict:
    return {
        "stages": [[torus_to_dict(t) for t in st] for st in seq.stages],
        "parents": [list(p) for p in seq.parents],
        "params": [None if p is None else asdict(p) for p in seq.params],
        "thinned": list(seq.thinned),
    }


def sequence_from_dict(d: dict) -> necklace.DefiningSequence:
    return necklace.DefiningSequence(
        tuple(tuple(torus_from_dict(t) for t in st) for st in d["stages"]),
        tuple(tuple(int(i) for i in p) for p in d["parents"]),
        tuple(None if p is None else necklace.ChainParams(**p) for p in d["params"]),
        tuple(int(i) for i in d.get("thinned", [])))


def _load_sequence(out: Path):
    path = out / "sequence.json"
    try:
        doc = json.loads(path.read_text())
        return sequence_from_dict(doc), doc
    except FileNotFoundError as exc:
        raise ConfigError(f"{path} not found; run 'build' first") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def _verification(seq, exhaustive) -> tuple[list, bool]:
    reports, ok = [], True
    for level in range(2, seq.depth + 1):
        for idx, chain in enumerate(seq.chains(level - 1)):
            rep = necklace.verify_chain(chain, exhaustive)
            ok &= rep.ok
            reports.append({"level": level, "parent": idx, "ok": rep.ok, **rep.summary()})
    return reports, ok


def cmd_build(cfg: SceneConfig, h: str, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        seq = necklace.build_necklace(cfg.seed_torus(), cfg.level_params(), cfg.depth,
                                      cfg.exhaustive)
    except necklace.Infeasible as exc:
        log.error("infeasible at level %s, torus %s: %s", exc.level, exc.index, exc)
        return EXIT_FAIL
    reports, ok = _verification(seq, cfg.exhaustive)
    doc = sequence_to_dict(seq)
    doc.update(config_hash=h, verification=reports,
               nesting_margins=seq.nesting_margins(), max_diameters=seq.max_diameters())
    _dump(out / "sequence.json", doc)
    log.info("built %s stages: %s tori", seq.depth, [len(s) for s in seq.stages])
    return EXIT_OK if ok else EXIT_FAIL


def _load_certificates(out: Path) -> dict:
    path = out / "certificate.json"
    if not path.exists():
        return {}
    try:
        doc = json.loads(path.read_text())
        return {int(c["covered_level"]): c for c in doc["certificates"]}
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def cmd_thin(cfg: SceneConfig, h: str, args) -> int:
    out = Path(cfg.output_dir)
    seq, _ = _load_sequence(out)
    levels = [args.level] if args.level is not None else list(range(1, seq.depth + 1))
    certs = _load_certificates(out)
    for level in levels:
        try:
            seq, cert = necklace.thin_to_tubes(seq, level, cfg.eps(level), cfg.exhaustive)
            verdict = certify.check_certificate(cert, seq.stages[level - 1])
        except (necklace.Degenerate, necklace.Infeasible, certify.CertificateError) as exc:
            log.error("level %d: %s", level, exc)
            return EXIT_FAIL
        # thinning rebuilds deeper stages, so their certificates are stale
        certs = {k: v for k, v in certs.items() if k < level}
        certs[level] = certify.certificate_to_dict(cert, verdict)
        log.info("level %d: %d tubes, total width %.6g < 2 * %.6g", level, len(cert.tubes),
                 cert.total_width, cert.claimed_eps)
    doc = sequence_to_dict(seq)
    doc["config_hash"] = h
    _dump(out / "sequence.json", doc)
    _dump(out / "certificate.json",
          {"config_hash": h, "certificates": [certs[k] for k in sorted(certs)]})
    return EXIT_OK


def stage_pixel(cfg: SceneConfig, stage) -> tuple[float, bool]:
    """Pixel for a stage and whether the r/4 resolution rule can be enforced."""
    r_min = min(t.minor_radius for t in stage)
    extent = max(float(np.linalg.norm(t.center)) + t.major_radius + t.minor_radius
                 for t in stage) * 2.0
    floor = extent / MAX_RASTER_SIDE
    pixel = cfg.pixel if cfg.pixel is not None else max(r_min / shadow.RESOLUTION_FACTOR, floor)
    return pixel, pixel <= r_min / shadow.RESOLUTION_FACTOR


def cmd_shadow(cfg: SceneConfig, h: str, args) -> int:
    out = Path(cfg.output_dir)
    seq, _ = _load_sequence(out)
    certs = _load_certificates(out)
    k_planes = args.random if args.random is not None else cfg.planes
    rng_seed = args.seed if args.seed is not None else cfg.rng_seed
    planes = shadow.random_planes(k_planes, rng_seed)
    levels = [args.level] if args.level is not None else list(range(1, seq.depth + 1))
    metrics, ok, k = [], True, 0
    for level in levels:
        if not 1 <= level <= seq.depth:
            raise ConfigError(f"level {level} outside 1..{seq.depth}")
        stage = seq.stages[level - 1]
        pixel, strict = stage_pixel(cfg, stage)
        cert = certs.get(level)
        for j, plane in enumerate(planes):
            try:
                raster = shadow.union_shadow(stage, plane, pixel, "outer",
                                             check_resolution=strict or level not in seq.thinned)
            except shadow.ResolutionTooCoarse as exc:
                log.error("level %d: %s", level, exc)
                return EXIT_FAIL
            shadow.write_pgm(raster, out / f"shadow_{k}.pgm")
            comps = shadow.connected_components(raster).count
            disk = shadow.max_inscribed_disk(raster)
            try:
                slope = shadow.box_counting_dimension(raster).slope
            except shadow.DegenerateFit:
                slope = None
            row = {"file": f"shadow_{k}.pgm", "level": level, "plane": j,
                   "origin": plane.origin.tolist(), "basis": plane.basis.tolist(),
                   "pixel": pixel, "resolution_rule": strict, "components": comps,
                   "inscribed_radius": disk.radius, "box_slope": slope}
            if cert is not None:
                bound = cert["claimed_eps"] + pixel * math.sqrt(2.0)
                row["certified_bound"] = bound
                row["within_certificate"] = disk.radius <= bound
                ok &= row["within_certificate"]
            metrics.append(row)
            k += 1
    _dump(out / "metrics.json", {"config_hash": h, "rng_seed": rng_seed, "shadows": metrics})
    return EXIT_OK if ok else EXIT_FAIL


def torus_mesh(t: SolidTorus, rings: int, segments: int):
    """Vertices (rings * segments) and triangles of a torus surface."""
    u, v = t.core.frame()
    n = t.core.normal
    a = np.arange(rings) * (2.0 * np.pi / rings)
    b = np.arange(segments) * (2.0 * np.pi / segments)
    radial = np.cos(a)[:, None] * u + np.sin(a)[:, None] * v            # (rings, 3)
    ring_c = t.center + t.major_radius * radial
    off = (np.cos(b)[None, :, None] * radial[:, None, :]
           + np.sin(b)[None, :, None] * n[None, None, :]) * t.minor_radius
    verts = (ring_c[:, None, :] + off).reshape(-1, 3)
    i, j = np.meshgrid(np.arange(rings), np.arange(segments), indexing="ij")
    p00 = i * segments + j
    p10 = ((i + 1) % rings) * segments + j
    p01 = i * segments + (j + 1) % segments
    p11 = ((i + 1) % rings) * segments + (j + 1) % segments
    tris = np.concatenate([np.stack([p00, p10, p11], -1).reshape(-1, 3),
                           np.stack([p00, p11, p01], -1).reshape(-1, 3)])
    return verts, tris


def write_obj(tori, path, rings: int, segments: int, header: str = "") -> None:
    lines = [f"# {header}"] if header else []
    base = 1
    for k, t in enumerate(tori):
        verts, tris = torus_mesh(t, rings, segments)
        lines.append(f"g torus_{k}")
        lines.extend(f"v {x!r} {y!r} {z!r}" for x, y, z in verts.tolist())
        lines.extend(f"f {a + base} {b + base} {c + base}" for a, b, c in tris.tolist())
        base += len(verts)
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_mesh(cfg: SceneConfig, h: str, args) -> int:
    out = Path(cfg.output_dir)
    seq, _ = _load_sequence(out)
    level = args.level if args.level is not None else seq.depth
    if not 1 <= level <= seq.depth:
        raise ConfigError(f"level {level} outside 1..{seq.depth}")
    rings, segs = (int(x) for x in cfg.tessellation)
    write_obj(seq.stages[level - 1], out / f"mesh_{level}.obj", rings, segs,
              header=f"config_hash {h}")
    return EXIT_OK


def cmd_planar(cfg: SceneConfig, h: str, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        ifs = planar.load_ifs(cfg.planar.pattern)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load pattern: {exc}") from exc
    depth = args.level if args.level is not None else cfg.planar.depth
    pieces = [ifs.root]
    for _ in range(depth):
        pieces = [m.apply(p) for p in pieces for m in ifs.maps]
    verdict = planar.shadow_cover_check(ifs.root, pieces, grid_step_deg=cfg.planar.grid_step_deg)
    sep = planar.separation_margin(pieces, ifs.root) if depth > 0 else None
    doc = {"config_hash": h, "depth": depth, "pieces": len(pieces),
           "contraction": ifs.contraction, "verdict": verdict.to_dict(),
           "separation": None if sep is None else {"pairwise": sep.pairwise,
                                                   "inside": sep.inside}}
    _dump(out / "planar.json", doc)
    (out / "planar.svg").write_text(planar.polygons_svg(pieces))
    if not verdict.covered:
        log.error("gap %s at angle %s", verdict.witness_gap, verdict.witness_angle)
        return EXIT_FAIL
    return EXIT_OK


COMMANDS = {"build": cmd_build, "thin": cmd_thin, "shadow": cmd_shadow,
            "mesh": cmd_mesh, "planar": cmd_planar}


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="necklace", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="scene config (JSON)")
    p.add_argument("--level", type=int, help="stage to thin, project or mesh")
    p.add_argument("--random", type=int, help="number of random planes for 'shadow'")
    p.add_argument("--seed", type=int, help="override the config's RNG seed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, h = load_config(args.config)
        return COMMANDS[args.command](cfg, h, args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"necklace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
