import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import cKDTree
from oracles import brute_circle_distance, disk_crossings

from antoine.geom import (CIRCLE_DISTANCE_TOL, Circle3, CirclesIntersect, GeometryError,
                          Line3, Plane3, Similarity3, SolidTorus, Tube, apply_similarity,
                          as_unit, circle_distance, gauss_linking_value, linking_number,
                          perpendicular_frame, point_circle_distance, project,
                          rotation_between, torus_separation)

coord = st.floats(-3, 3, allow_nan=False)
vec3 = st.tuples(coord, coord, coord)
nonzero3 = vec3.filter(lambda v: np.linalg.norm(v) > 1e-3)


def random_rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.linalg.det(q))


def random_similarity(rng):
    return Similarity3(rng.uniform(0.2, 3), random_rotation(rng), rng.normal(size=3))


# projection

def test_project_axis_aligned():
    assert np.allclose(project([0, 0, 5], Plane3.xy()), [0, 0])


def test_project_idempotent_on_plane(rng):
    plane = Plane3.from_normal(rng.normal(size=3), rng.normal(size=3))
    p = plane.lift([0.3, -1.2])
    assert np.allclose(project(p, plane), [0.3, -1.2], atol=1e-12)


def test_project_matches_least_squares():
    n = as_unit([1, 1, 1])
    plane = Plane3.from_normal([0, 0, 0], n)
    v = np.array([1.0, 2.0, 3.0])
    closed = v - (v @ n) * n
    # least squares: coordinates c minimising |B^T c - v|
    c, *_ = np.linalg.lstsq(plane.basis.T, v, rcond=None)
    assert np.allclose(plane.lift(project(v, plane)), closed, atol=1e-12)
    assert np.allclose(project(v, plane), c, atol=1e-12)


@given(vec3, vec3, nonzero3)
def test_project_is_1_lipschitz(x, y, n):
    plane = Plane3.from_normal([0, 0, 0], n)
    assert (np.linalg.norm(project(x, plane) - project(y, plane))
            <= np.linalg.norm(np.subtract(x, y)) + 1e-12)


def test_plane_rejects_bad_basis():
    with pytest.raises(GeometryError):
        Plane3([0, 0, 0], [[1, 0, 0], [1, 1, 0]])


@given(nonzero3)
def test_perpendicular_frame_right_handed(n):
    u, v = perpendicular_frame(n)
    assert np.allclose(np.cross(u, v), as_unit(n), atol=1e-12)


# circle distance

def test_coaxial_circles_distance_one():
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    b = Circle3([0, 0, 1], 1, [0, 0, 1])
    assert circle_distance(a, b) == pytest.approx(1.0, abs=CIRCLE_DISTANCE_TOL)


def test_concentric_coplanar_distance_two():
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    b = Circle3([0, 0, 0], 3, [0, 0, 1])
    assert circle_distance(a, b) == pytest.approx(2.0, abs=CIRCLE_DISTANCE_TOL)


def test_skew_pair_matches_brute_force(rng):
    for _ in range(5):
        a = Circle3(rng.normal(size=3), rng.uniform(0.5, 2), rng.normal(size=3))
        b = Circle3(rng.normal(size=3), rng.uniform(0.5, 2), rng.normal(size=3))
        ref = brute_circle_distance(a, b)
        d = circle_distance(a, b)
        assert d <= ref + 1e-9
        assert d == pytest.approx(ref, abs=1e-6)


def test_circle_distance_symmetric(rng):
    a = Circle3(rng.normal(size=3), 1.3, rng.normal(size=3))
    b = Circle3(rng.normal(size=3), 0.7, rng.normal(size=3))
    assert circle_distance(a, b) == pytest.approx(circle_distance(b, a), abs=1e-12)


def test_linked_unit_pair_distance_one():
    # every point of b is at distance one from a
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    b = Circle3([1, 0, 0], 1, [0, 1, 0])
    assert circle_distance(a, b) == pytest.approx(1.0, abs=CIRCLE_DISTANCE_TOL)


def test_intersecting_circles_distance_zero():
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    b = Circle3([1, 0, 1], 1, [0, 1, 0])
    assert circle_distance(a, b) == pytest.approx(0.0, abs=CIRCLE_DISTANCE_TOL)


# membership and torus separation

def test_torus_membership_matches_core_distance(rng):
    t = SolidTorus(Circle3(rng.normal(size=3), 1.5, rng.normal(size=3)), 0.4)
    pts = t.center + rng.uniform(-2.2, 2.2, size=(4000, 3))
    # brute-force core discretisation; the nearest sample is within half a spacing
    n = 20000
    d = cKDTree(t.core.sample(n)).query(pts)[0]
    slack = math.pi * 1.5 / n
    exact = point_circle_distance(pts, t.core)
    assert np.all(exact <= d + 1e-12) and np.all(d <= exact + slack)
    clear = np.abs(d - 0.4) > slack
    assert np.array_equal(t.contains(pts)[clear], (d <= 0.4)[clear])


def test_torus_separation_far_and_self():
    a = SolidTorus(Circle3([0, 0, 0], 1, [0, 0, 1]), 0.2)
    b = SolidTorus(Circle3([0, 0, 5], 1, [0, 0, 1]), 0.2)
    assert torus_separation(a, b) > 0
    assert torus_separation(a, a) == pytest.approx(-0.4, abs=1e-9)


# linking number

def test_hopf_link():
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    with pytest.raises(CirclesIntersect):
        linking_number(a, Circle3([1, 0, 1], 1, [0, 1, 0]))
    assert abs(linking_number(a, Circle3([1, 0, 0], 1, [0, 1, 0]))) == 1
    assert abs(linking_number(a, Circle3([0.5, 0, 0], 1, [0, 1, 0]))) == 1


def test_coplanar_disjoint_unlinked():
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    b = Circle3([3, 0, 0], 1, [0, 0, 1])
    assert linking_number(a, b) == 0


def test_linking_matches_disk_crossings(rng):
    hits = 0
    for _ in range(30):
        a = Circle3(rng.normal(scale=0.5, size=3), 1, rng.normal(size=3))
        b = Circle3(rng.normal(scale=0.5, size=3), 1, rng.normal(size=3))
        if circle_distance(a, b) < 0.05:
            continue
        lk = linking_number(a, b)
        assert lk == disk_crossings(a, b)
        hits += lk != 0
    assert hits > 0


def test_linking_symmetric_and_similarity_invariant(rng):
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    b = Circle3([0.5, 0, 0.1], 0.9, [0.2, 1, 0])
    lk = linking_number(a, b)
    assert linking_number(b, a) == lk
    for _ in range(3):
        s = random_similarity(rng)
        assert linking_number(apply_similarity(a, s), apply_similarity(b, s)) == lk


def test_gauss_value_close_to_integer():
    a = Circle3([0, 0, 0], 1, [0, 0, 1])
    b = Circle3([0.5, 0, 0], 1, [0, 1, 0])
    v = gauss_linking_value(a, b, 512)
    assert abs(abs(v) - 1) < 1e-3


# similarities

def test_identity_similarity():
    t = SolidTorus(Circle3([1, 2, 3], 2, [0, 1, 1]), 0.5)
    u = apply_similarity(t, Similarity3())
    assert np.allclose(u.center, t.center) and np.allclose(u.core.normal, t.core.normal)
    assert (u.major_radius, u.minor_radius) == (2, 0.5)


def test_half_scale_torus():
    t = SolidTorus(Circle3([0, 0, 0], 2, [0, 0, 1]), 0.5)
    u = apply_similarity(t, Similarity3(0.5))
    assert (u.major_radius, u.minor_radius) == (1.0, 0.25)


def test_composition_matches_sequential(rng):
    s1, s2 = random_similarity(rng), random_similarity(rng)
    pts = rng.normal(size=(100, 3))
    assert np.allclose(s2.compose(s1)(pts), s2(s1(pts)), atol=1e-10)
    assert np.allclose(s1.inverse()(s1(pts)), pts, atol=1e-10)


def test_similarity_scales_distances(rng):
    s = random_similarity(rng)
    p, q = rng.normal(size=(2, 3))
    assert np.linalg.norm(s(p) - s(q)) == pytest.approx(s.scale * np.linalg.norm(p - q),
                                                        abs=1e-9)


def test_similarity_maps_tubes_and_lines(rng):
    s = random_similarity(rng)
    t = Tube(Line3([0, 0, 0], [1, 0, 0]), 0.3)
    u = apply_similarity(t, s)
    assert u.radius == pytest.approx(0.3 * s.scale)
    p = np.array([[0.5, 0.1, 0.0]])
    assert u.axis.distance(s(p))[0] == pytest.approx(s.scale * t.axis.distance(p)[0])


@given(nonzero3, nonzero3)
def test_rotation_between(a, b):
    q = rotation_between(a, b)
    assert np.allclose(q @ as_unit(a), as_unit(b), atol=1e-9)
    assert np.allclose(q @ q.T, np.eye(3), atol=1e-9)


def test_invalid_shapes_rejected():
    with pytest.raises(GeometryError):
        Circle3([0, 0, 0], 0, [0, 0, 1])
    with pytest.raises(GeometryError):
        SolidTorus(Circle3([0, 0, 0], 1, [0, 0, 1]), 1.0)
    with pytest.raises(GeometryError):
        Circle3([0, 0, 0], 1, [0, 0, 0])
