import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import cover_count_scan

from antoine.certify import check_certificate
from antoine.geom import (Circle3, Plane3, Similarity3, SolidTorus, apply_similarity,
                          linking_number, point_circle_distance, torus_separation)
from antoine.necklace import (BadRadii, CenterOffPlane, Chain, ChainParams, Degenerate,
                              Infeasible, NecklaceError, build_necklace,
                              build_simple_chain, build_thinned_necklace, chain_children,
                              circle_tube_cover, containment_margin, cover_count,
                              cover_total_width, default_chain_params, make_standard_torus,
                              search_chain_params, thin_to_tubes, verify_chain)


# standard tori

def test_standard_torus_membership():
    t = make_standard_torus(Plane3.xy(), [0, 0, 0], 2, 0.5)
    rng = np.random.default_rng(0)
    p = rng.uniform(-3, 3, size=(5000, 3))
    closed = (np.hypot(p[:, 0], p[:, 1]) - 2) ** 2 + p[:, 2] ** 2 <= 0.25
    assert np.array_equal(t.contains(p), closed)


def test_bad_radii_and_off_plane():
    with pytest.raises(BadRadii):
        make_standard_torus(Plane3.xy(), [0, 0, 0], 1, 1)
    with pytest.raises(CenterOffPlane):
        make_standard_torus(Plane3.xy(), [0, 0, 1], 2, 0.5)


def test_scaled_copy_matches_direct():
    t = make_standard_torus(Plane3.xy(), [0, 0, 0], 2, 0.5)
    s = apply_similarity(t, Similarity3(3.0, np.eye(3), [1, 0, 0]))
    d = make_standard_torus(Plane3.from_normal([1, 0, 0], [0, 0, 1]), [1, 0, 0], 6, 1.5)
    assert np.allclose(s.center, d.center)
    assert (s.major_radius, s.minor_radius) == pytest.approx((d.major_radius, d.minor_radius))


# chains

def test_q_must_be_at_least_three():
    with pytest.raises(NecklaceError):
        ChainParams(2, 1.3, 0.2)


def test_alternating_needs_even_q():
    with pytest.raises(NecklaceError):
        ChainParams(7, 1.3, 0.2)


@pytest.fixture(scope="module")
def chain(seed_torus):
    return build_simple_chain(seed_torus, default_chain_params(seed_torus))


def test_default_chain_passes(chain):
    rep = verify_chain(chain)
    assert rep.ok and rep.disjoint and rep.contained and rep.regular_polygon
    assert rep.linking_pattern and rep.null_homotopy_proxy and rep.congruent
    assert rep.min_separation > 0 and rep.min_containment_margin > 0


def test_chain_linking_pattern(chain):
    q = len(chain.children)
    for i in range(q):
        for j in range(i + 1, q):
            lk = linking_number(chain.children[i].core, chain.children[j].core)
            assert abs(lk) == (1 if (j - i) % q in (1, q - 1) else 0)


def test_chain_neighbours_separated(chain):
    kids = chain.children
    for a, b in zip(kids, kids[1:] + kids[:1]):
        assert torus_separation(a, b) > 0


def test_chain_geometry(chain, seed_torus):
    q = len(chain.children)
    centers = np.array([k.center for k in chain.children])
    assert np.allclose(np.linalg.norm(centers, axis=1), seed_torus.major_radius)
    ang = np.mod(np.arctan2(centers[:, 1], centers[:, 0]), 2 * np.pi)
    assert np.allclose(ang, 2 * np.pi * np.arange(q) / q)


def test_translated_child_not_contained(chain):
    kids = list(chain.children)
    kids[3] = SolidTorus(Circle3(kids[3].center + [5, 0, 0], kids[3].core.radius,
                                 kids[3].core.normal), kids[3].minor_radius)
    rep = verify_chain(Chain(chain.parent, tuple(kids)))
    assert not rep.contained and "contained" in rep.violations


def test_reordered_children_break_pattern(chain):
    perm = np.random.default_rng(3).permutation(len(chain.children))
    rep = verify_chain(Chain(chain.parent, tuple(chain.children[k] for k in perm)))
    assert not rep.linking_pattern


def test_too_few_tori_infeasible(seed_torus):
    with pytest.raises(Infeasible):
        build_simple_chain(seed_torus, ChainParams(6, 1.3, 0.2))


def test_fat_children_infeasible(seed_torus):
    with pytest.raises(Infeasible):
        build_simple_chain(seed_torus, ChainParams(26, 1.3, 0.9))


def test_defaults_match_search():
    t = make_standard_torus(Plane3.xy(), [0, 0, 0], 1, 0.2)
    assert default_chain_params(t) == search_chain_params(0.2)


def test_defaults_scale_free():
    a = make_standard_torus(Plane3.xy(), [0, 0, 0], 1, 0.2)
    b = make_standard_torus(Plane3.xy(), [0, 0, 0], 7, 1.4)
    assert default_chain_params(a) == default_chain_params(b)


def test_chain_similarity_covariant(chain, seed_torus):
    s = Similarity3(0.3, np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1.0]]), [1, 2, 3])
    parent = apply_similarity(seed_torus, s)
    moved = tuple(apply_similarity(k, s) for k in chain.children)
    assert verify_chain(Chain(parent, moved), exhaustive=False).ok
    kids = chain_children(parent, chain.params)
    assert kids[0].core.radius == pytest.approx(moved[0].core.radius)
    assert verify_chain(Chain(parent, kids), exhaustive=False).ok


# defining sequences

def test_depth_one_is_seed(seed_torus):
    seq = build_necklace(seed_torus, depth=1)
    assert seq.depth == 1 and seq.stages[0] == (seed_torus,)


def test_depth_zero_rejected(seed_torus):
    with pytest.raises(NecklaceError):
        build_necklace(seed_torus, depth=0)


def test_stage_counts_and_tree(necklace2):
    q = len(necklace2.stages[1])
    assert [len(s) for s in necklace2.stages] == [1, q]
    assert necklace2.children_of(1, 0) == list(range(q))


def test_stage_counts_depth3():
    seed = make_standard_torus(Plane3.xy(), [0, 0, 0], 1, 0.3)
    seq = build_necklace(seed, depth=3, exhaustive=False)
    # children have their own r/R, so each level has its own q
    q2, q3 = seq.params[0].q, seq.params[1].q
    assert [len(s) for s in seq.stages] == [1, q2, q2 * q3]
    for level in (1, 2):
        for c in seq.chains(level):
            assert verify_chain(c, exhaustive=False).ok


def test_every_chain_verified(necklace2):
    for c in necklace2.chains(1):
        assert verify_chain(c).ok


def test_nesting_and_decay(necklace2):
    assert all(m > 0 for m in necklace2.nesting_margins())
    d = necklace2.max_diameters()
    assert d[1] < d[0]
    lam = necklace2.decay_ratio
    assert 0 < lam < 1
    for i, di in enumerate(d):
        assert di <= d[0] * lam ** i * (1 + 1e-12)


def test_infeasible_names_level(seed_torus):
    with pytest.raises(Infeasible) as info:
        build_necklace(seed_torus, [None, ChainParams(6, 1.3, 0.2)], depth=3)
    assert info.value.level == 3


def test_containment_margin_sign(seed_torus):
    inner = SolidTorus(Circle3([1, 0, 0], 0.1, [0, 1, 0]), 0.02)
    outer = SolidTorus(Circle3([1, 0, 0], 0.3, [0, 1, 0]), 0.02)
    assert containment_margin(inner, seed_torus) > 0
    assert containment_margin(outer, seed_torus) < 0


# circle covers

def test_cover_count_examples():
    assert cover_count(1.0, 0.1) == 198
    assert cover_total_width(1.0, 198) == pytest.approx(0.0997, abs=5e-5)
    assert cover_total_width(1.0, 197) > 0.1 > cover_total_width(1.0, 198)
    assert cover_count(1.0, 6.5) == 3
    assert cover_total_width(1.0, 3) == pytest.approx(6.0, abs=1e-12)


def test_cover_width_linear_in_radius():
    assert cover_total_width(2.0, 17) == pytest.approx(2 * cover_total_width(1.0, 17))


@given(st.floats(1e-3, 10.0))
def test_cover_count_matches_scan(eps):
    if eps < 0.01:
        eps = 0.01
    assert cover_count(1.0, eps) == cover_count_scan(eps)


def test_cover_width_strictly_decreasing():
    n = np.unique(np.geomspace(3, 1e6, 4000).astype(int))
    w = np.array([cover_total_width(1.0, int(k)) for k in n])
    assert np.all(np.diff(w) < 0)


def test_circle_cover_covers_densely():
    c = Circle3([0.3, -1, 2], 1.7, [1, 2, 3])
    tubes = circle_tube_cover(c, 0.05)
    assert sum(2 * t.radius for t in tubes) < 0.05
    pts = c.sample(60_000)
    d = np.min(np.stack([t.axis.distance(pts) for t in tubes]), axis=0)
    radius = tubes[0].radius
    assert np.all(d < radius)


def test_cover_rejects_nonpositive_eps():
    with pytest.raises(NecklaceError):
        cover_count(1.0, 0.0)


# thinning

@pytest.fixture(scope="module")
def thinned(necklace2):
    return thin_to_tubes(necklace2, 2, 1.0)


def test_thinning_certifies_half_eps(thinned):
    seq, cert = thinned
    assert cert.claimed_eps == 0.5
    assert check_certificate(cert, list(seq.stages[1])).valid


def test_thinning_keeps_cores_and_tree(necklace2, thinned):
    seq, _ = thinned
    assert seq.parents == necklace2.parents
    for a, b in zip(necklace2.stages[1], seq.stages[1]):
        assert a.core is b.core or (np.array_equal(a.center, b.center)
                                    and a.core.radius == b.core.radius)
        assert b.minor_radius <= a.minor_radius


def test_thinned_chains_verify(thinned):
    seq, _ = thinned
    for c in seq.chains(1):
        assert verify_chain(c).ok


def test_thinned_tori_inside_tubes(thinned):
    seq, cert = thinned
    rng = np.random.default_rng(1)
    for t in seq.stages[1][:4]:
        # random points of the solid torus
        th = rng.uniform(0, 2 * np.pi, 4000)
        core = t.core.points(th)
        off = rng.normal(size=(4000, 3))
        off *= (t.minor_radius * rng.uniform(0, 1, (4000, 1)) ** (1 / 3)
                / np.linalg.norm(off, axis=1, keepdims=True))
        p = core + off
        assert np.all(point_circle_distance(p, t.core) <= t.minor_radius + 1e-12)
        d = np.min(np.stack([tb.axis.distance(p) - tb.radius for tb in cert.tubes]), axis=0)
        assert np.all(d < 0)


def test_thin_level_one_identity_cores(seed_torus):
    seq = build_necklace(seed_torus, depth=1)
    out, cert = thin_to_tubes(seq, 1, 2.0)
    assert out.stages[0][0].core is seed_torus.core
    assert cert.claimed_eps == 1.0


def test_thin_rebuilds_deeper_levels(seed_torus):
    seq = build_necklace(seed_torus, depth=2)
    out, _ = thin_to_tubes(seq, 1, 2.0)
    assert out.depth == 2
    assert all(m > 0 for m in out.nesting_margins())


def test_thin_degenerate(necklace2):
    with pytest.raises(Degenerate):
        thin_to_tubes(necklace2, 2, 1e-9)


def test_thin_bad_level(necklace2):
    with pytest.raises(NecklaceError):
        thin_to_tubes(necklace2, 3, 1.0)
    with pytest.raises(NecklaceError):
        thin_to_tubes(necklace2, 1, -1.0)


def test_build_thinned_necklace_schedule():
    seed = make_standard_torus(Plane3.xy(), [0, 0, 0], 0.1, 0.02)
    seq, certs = build_thinned_necklace(seed, 2)
    assert [c.claimed_eps for c in certs] == [1.0, 0.5]
    for level, cert in enumerate(certs, start=1):
        assert check_certificate(cert, list(seq.stages[level - 1])).valid
    assert seq.thinned == (1, 2)


def test_replace_keeps_sequence_frozen(necklace2):
    with pytest.raises(Exception):
        necklace2.stages = ()
    assert replace(necklace2).stages == necklace2.stages


def test_chain_children_count():
    p = SolidTorus(Circle3([0, 0, 0], 1, [0, 0, 1]), 0.2)
    kids = chain_children(p, ChainParams(26, 1.3, 0.2))
    assert len(kids) == 26
    rho = 1.3 * math.sin(math.pi / 26)
    assert all(k.core.radius == pytest.approx(rho) for k in kids)
