import json
import math

import numpy as np
import pytest
from scipy.optimize import minimize

from antoine.certify import (Contradiction, CoverageFail, PlankCertificate, Unsupported,
                             WidthFail, certificate_from_dict, certificate_to_dict,
                             check_certificate, empirical_cross_check, load_certificate,
                             save_certificate, shadow_strips, transform_certificate, width)
from antoine.geom import (Circle3, Line3, Plane3, Similarity3, SolidTorus, Strip2, Tube,
                          apply_similarity, as_unit, project)
from antoine.necklace import thin_to_tubes
from antoine.shadow import random_planes


def test_width_tube_and_strip():
    assert width(Tube(Line3([0, 0, 0], [1, 0, 0]), 0.3)) == 0.6
    assert width(Strip2(Plane3.xy(), [0, 0], [1, 0], 1.0)) == 2.0


def test_width_torus_matches_numeric_minimum():
    t = SolidTorus(Circle3([0, 0, 0], 2, [0, 0, 1]), 0.5)
    pts = t.core.sample(4000)

    def extent(angles):
        a, b = angles
        u = np.array([math.sin(a) * math.cos(b), math.sin(a) * math.sin(b), math.cos(a)])
        s = pts @ u
        return s.max() - s.min() + 2 * t.minor_radius

    best = min(minimize(extent, x0, method="Nelder-Mead").fun
               for x0 in ([0.3, 0.1], [1.2, 2.0], [2.5, -1.0]))
    assert width(t) == pytest.approx(1.0)
    assert best == pytest.approx(width(t), abs=1e-6)


def test_width_unsupported():
    with pytest.raises(Unsupported):
        width("not a shape")


def small_torus():
    return SolidTorus(Circle3([0, 0, 0], 0.2, [0, 0, 1]), 0.05)


def axis_tube(radius):
    return Tube(Line3([0, 0, 0], [0, 0, 1]), radius)


def test_single_tube_valid():
    c = PlankCertificate((axis_tube(0.4),), 1, 0.5, 0.01, 0.005)
    v = check_certificate(c, [small_torus()])
    assert v.valid and v.total_width == pytest.approx(0.8) and v.min_slack > 0


def test_width_boundary_fails():
    c = PlankCertificate((axis_tube(0.5),), 1, 0.5, 0.01, 0.005)
    with pytest.raises(WidthFail):
        check_certificate(c, [small_torus()])


def test_coverage_fail_has_witness():
    c = PlankCertificate((axis_tube(0.2),), 1, 0.5, 0.01, 0.005)
    with pytest.raises(CoverageFail) as info:
        check_certificate(c, [small_torus()])
    w = info.value.witness
    assert w is not None and np.hypot(w[0], w[1]) == pytest.approx(0.2)


def test_evidence_must_be_positive():
    c = PlankCertificate((axis_tube(0.4),), 1, 0.5, 0.01, 0.0)
    with pytest.raises(CoverageFail):
        check_certificate(c, [small_torus()])


def test_deterministic():
    c = PlankCertificate((axis_tube(0.4),), 1, 0.5, 0.01, 0.005)
    assert check_certificate(c, [small_torus()]) == check_certificate(c, [small_torus()])


@pytest.fixture(scope="module")
def thinned(necklace2):
    seq, cert = thin_to_tubes(necklace2, 2, 1.0)
    return list(seq.stages[1]), cert


def test_thinned_level_valid(thinned):
    items, cert = thinned
    v = check_certificate(cert, items)
    assert v.valid and v.claimed_eps == 0.5 and v.total_width < 1.0


def test_similarity_covariance(thinned):
    items, cert = thinned
    q, _ = np.linalg.qr(np.random.default_rng(2).normal(size=(3, 3)))
    q *= np.sign(np.linalg.det(q))
    s = Similarity3(2.5, q, [1, -2, 0.5])
    moved = transform_certificate(cert, s)
    v = check_certificate(moved, [apply_similarity(t, s) for t in items])
    assert v.valid
    assert moved.claimed_eps == pytest.approx(2.5 * cert.claimed_eps)
    assert moved.total_width == pytest.approx(2.5 * cert.total_width)


def test_shadow_strips_total_and_containment(thinned):
    _, cert = thinned
    rng = np.random.default_rng(4)
    for plane in random_planes(5, 7):
        strips = shadow_strips(cert, plane)
        assert math.fsum(2 * s.half_width for s in strips) < 2 * cert.claimed_eps
        for tube, strip in list(zip(cert.tubes, strips))[::50]:
            # random points of the tube near its base
            t = rng.uniform(-1, 1, 200)
            off = rng.normal(size=(200, 3))
            off -= np.outer(off @ tube.axis.direction, tube.axis.direction)
            off *= tube.radius * rng.uniform(0, 1, (200, 1)) / np.linalg.norm(
                off, axis=1, keepdims=True)
            pts = tube.axis.base + np.outer(t, tube.axis.direction) + off
            assert np.all(strip.distance(project(pts, plane)) <= strip.half_width + 1e-12)


def test_json_round_trip(tmp_path, thinned):
    items, cert = thinned
    path = tmp_path / "cert.json"
    save_certificate(cert, path, check_certificate(cert, items))
    back = load_certificate(path)
    assert certificate_to_dict(back) == certificate_to_dict(cert)
    assert back.total_width == cert.total_width
    doc = json.loads(path.read_text())
    assert doc["verdict"] == "VALID"
    assert set(doc) >= {"tubes", "total_width", "claimed_eps", "evidence", "covered_level"}


def test_tampered_total_width_rejected(thinned):
    _, cert = thinned
    d = certificate_to_dict(cert)
    d["total_width"] /= 2
    with pytest.raises(Exception):
        certificate_from_dict(d)


def fat_scene():
    # a fat torus whose tilted shadow has a hole-free core of radius about 2r
    t = SolidTorus(Circle3([0, 0, 0], 0.1, [0, 0, 1]), 0.09)
    cert = PlankCertificate((axis_tube(0.2),), 1, 0.21, 0.002, 0.001)
    tilt = math.acos(0.9)
    plane = Plane3([0, 0, 0], [[1, 0, 0], [0, math.cos(tilt), math.sin(tilt)]])
    return t, cert, plane


def test_cross_check_passes_on_valid():
    t, cert, plane = fat_scene()
    assert check_certificate(cert, [t]).valid
    rep = empirical_cross_check(cert, [t], [plane, Plane3.xy(), Plane3.xz()], 0.005)
    assert rep.max_radius <= rep.bound
    assert rep.max_radius > 0.15


def test_cross_check_detects_corrupted_certificate():
    t, cert, plane = fat_scene()
    bad = PlankCertificate(tuple(Tube(x.axis, x.radius / 2) for x in cert.tubes), 1,
                           cert.claimed_eps / 2, cert.sample_spacing, cert.margin)
    with pytest.raises(Contradiction):
        empirical_cross_check(bad, [t], [plane], 0.005)


def test_cross_check_thinned_axis_planes(thinned):
    items, cert = thinned
    planes = [Plane3.xy(), Plane3.xz(), Plane3.from_normal([0, 0, 0], [1, 0, 0])]
    rep = empirical_cross_check(cert, items, planes, 0.01)
    assert rep.max_radius <= rep.bound


def test_cross_check_thinned_random_planes(thinned):
    items, cert = thinned
    rep = empirical_cross_check(cert, items, random_planes(5, 11), 0.01)
    assert len(rep.radii) == 5 and rep.max_radius <= 0.5 + 0.01 * math.sqrt(2)


def test_unit_direction_check():
    assert np.allclose(as_unit([0, 0, 3]), [0, 0, 1])
