"""Search for a hexagon collar of the reference triangle.

A collar is a family of disjoint affine hexagons inside the triangle whose
line shadows cover the triangle's in every direction.  Candidates: one
affine hexagon per corner (hexagon vertex 0 on the corner, vertices 1 and 5
a fraction ``cs`` along the two edges), ``k`` regular hexagons per edge with
a flat side parallel to it, and an optional regular hexagon at the centroid.
The best candidate by min(separation, cover margin) is written out.
"""

import argparse
import json
import math
import time
from pathlib import Path

import numpy as np

from antoine.planar import (REFERENCE_TRIANGLE, AffineMap2, ConvexPoly2, hexagon,
                            separation_margin, shadow_cover_check)

OUT = Path(__file__).resolve().parents[1] / "src" / "antoine" / "data" / "triangle_collar.json"
TRI = ConvexPoly2(REFERENCE_TRIANGLE)


def collar_maps(cs, k, side, spread, offset, rho, phase):
    H = hexagon().vertices
    T = REFERENCE_TRIANGLE
    maps = []
    for i in range(3):
        c, nxt, prv = T[i], T[(i + 1) % 3], T[(i + 2) % 3]
        maps.append(AffineMap2.from_points(
            H[[0, 1, 5]], [c, c + cs * (nxt - c), c + cs * (prv - c)]))
    positions = [0.5] if k == 1 else list(np.linspace(0.5 - spread, 0.5 + spread, k))
    for i in range(3):
        a, b = T[i], T[(i + 1) % 3]
        e = (b - a) / np.linalg.norm(b - a)
        n = np.array([-e[1], e[0]])
        rot = np.stack([e, n], axis=1)
        for t in positions:
            center = a + t * (b - a) + (side * math.sqrt(3.0) / 2.0 + offset) * n
            maps.append(AffineMap2(side * rot, center))
    if rho > 0:
        c, s = math.cos(phase), math.sin(phase)
        maps.append(AffineMap2(rho * np.array([[c, -s], [s, c]]), T.mean(axis=0)))
    return maps


def score(maps):
    hexes = [m.apply(hexagon()) for m in maps]
    sep = separation_margin(hexes, TRI)
    if sep.pairwise <= 0 or sep.inside < 0:
        return None
    v = shadow_cover_check(TRI, hexes, certify=False, vertex_pair_limit=0)
    if not v.covered:
        return None
    v = shadow_cover_check(TRI, hexes)
    if not (v.covered and v.certified):
        return None
    return min(sep.pairwise, v.min_margin), sep.pairwise, v.min_margin


def draw(rng):
    return (rng.uniform(0.1, 0.25), int(rng.integers(0, 4)), rng.uniform(0.03, 0.2),
            rng.uniform(0.0, 0.3), rng.uniform(0.0, 0.1),
            rng.uniform(0.02, 0.2) if rng.random() < 0.5 else 0.0,
            float(rng.choice([0.0, math.pi / 6])))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seconds", type=float, default=120.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--round", type=int, default=3)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    best = None
    t0 = time.time()
    tried = 0
    while time.time() - t0 < args.seconds:
        x = draw(rng)
        x = tuple(round(v, args.round) if isinstance(v, float) else v for v in x)
        tried += 1
        try:
            s = score(collar_maps(*x))
        except ValueError:
            continue
        if s and (best is None or s[0] > best[1][0]):
            best = (x, s)
            print(best)
    if best is None:
        raise SystemExit(f"no collar found in {tried} candidates")
    x, s = best
    names = ("corner_scale", "edge_count", "edge_side", "edge_spread", "edge_offset",
             "center_ratio", "center_phase")
    doc = {"version": 1, "triangle": REFERENCE_TRIANGLE.tolist(),
           "maps": [m.rows() for m in collar_maps(*x)],
           "meta": {"family": dict(zip(names, x)), "separation": s[1], "cover_margin": s[2],
                    "note": "found by scripts/search_triangle_collar.py"}}
    args.out.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(json.dumps(doc["meta"], indent=1))


if __name__ == "__main__":
    main()
