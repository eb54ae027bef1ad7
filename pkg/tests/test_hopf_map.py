import math
from fractions import Fraction

import numpy as np
import pytest

from eclift.cm_order import fixed_lattice, frobenius_alpha, lattice_tau
from eclift.errors import OutOfDomain, ShearMisaligned
from eclift.hopf_map import (
    build_embedding_ctx, embed_point, generate_mesh, map_scene, shear_fraction, sphere_points,
)
from eclift.modclass import find_embedding_class
from eclift.sphere_curve import SphereCurveParams, solve_curve

SQRT3 = math.sqrt(3)


def make_ctx(tau, k=3, **kwargs):
    cls = find_embedding_class(tau)
    return build_embedding_ctx(solve_curve(cls.a_star, cls.l_star, k), cls, **kwargs)


@pytest.fixture(scope="module")
def clifford():
    return make_ctx(1j)


@pytest.fixture(scope="module")
def hexagonal():
    return make_ctx(complex(0.5, SQRT3 / 2))


def test_clifford_context_totals(clifford):
    assert clifford.l_tot == pytest.approx(2 * math.pi, abs=1e-8)
    assert clifford.f_tot == pytest.approx(math.pi, abs=1e-8)
    assert np.all(np.diff(clifford.arc_table) > 0)


def test_near_pole_context_totals():
    # tau = (1 + i*sqrt(35))/2 needs a wobble passing within 0.03 rad of the poles at k = 6
    ctx = make_ctx(complex(0.5, math.sqrt(35) / 2), k=6)
    assert ctx.curve.pole_distance() < 0.05
    assert ctx.l_tot == pytest.approx(2 * math.pi * math.sqrt(35), abs=1e-8)
    assert ctx.f_tot == pytest.approx(math.pi, abs=1e-8)
    assert np.all(np.diff(ctx.arc_table) > 0)


def test_embed_origin_of_latitude_circle(clifford):
    phi0 = clifford.curve.phi0
    assert embed_point(clifford, 0.0, 0.0) == pytest.approx([math.sin(phi0 / 2), 0.0, math.cos(phi0 / 2)])


def test_embed_clifford_antipodal_fibre_point(clifford):
    half = math.sqrt(2) / 2
    assert embed_point(clifford, math.pi, 0.0) == pytest.approx([-half, 0.0, -half], abs=1e-12)


def test_fibre_periodicity(hexagonal):
    s = np.linspace(0, 2 * math.pi, 7)
    t = np.full_like(s, 1.3)
    assert np.allclose(embed_point(hexagonal, s + 2 * math.pi, t), embed_point(hexagonal, s, t), atol=1e-9)


def test_out_of_domain(hexagonal):
    with pytest.raises(OutOfDomain):
        embed_point(hexagonal, 0.0, hexagonal.l_tot / 2)
    with pytest.raises(OutOfDomain):
        embed_point(hexagonal, 0.0, -1e-3)


def test_sphere_points_are_unit_and_isometric(hexagonal):
    s, t = (g.ravel() for g in np.meshgrid(np.linspace(0, 6, 9), np.linspace(0, hexagonal.l_tot / 2 - 0.01, 9)))
    h = sphere_points(hexagonal, s, t)
    assert np.allclose(np.linalg.norm(h, axis=1), 1, atol=1e-9)
    step = 1e-5
    hs = (sphere_points(hexagonal, s + step, t) - h) / step
    ht = (sphere_points(hexagonal, s, t + step) - h) / step
    assert np.allclose(np.linalg.norm(hs, axis=1), 1, atol=1e-4)
    assert np.allclose(np.linalg.norm(ht, axis=1), 1, atol=1e-4)
    assert np.max(np.abs(np.sum(hs * ht, axis=1))) < 1e-4


def test_linear_sine_twist_breaks_orthogonality():
    cls = find_embedding_class(complex(0.5, SQRT3 / 2))
    curve = solve_curve(cls.a_star, cls.l_star, 3)
    ctx = build_embedding_ctx(curve, cls, twist_power=1)
    s, t = np.zeros(5), np.linspace(0.5, 2.5, 5)
    step = 1e-5
    h = sphere_points(ctx, s, t)
    hs = (sphere_points(ctx, s + step, t) - h) / step
    ht = (sphere_points(ctx, s, t + step) - h) / step
    assert np.max(np.abs(np.sum(hs * ht, axis=1))) > 1e-2


def test_seam_matches_twisted_bottom_row(hexagonal):
    s = np.linspace(0, 2 * math.pi, 16, endpoint=False)
    top = embed_point(hexagonal, s, np.full_like(s, hexagonal.l_tot / 2 - 1e-10))
    bottom = embed_point(hexagonal, s - hexagonal.cls.a_star / 2, np.zeros_like(s))
    assert np.allclose(top, bottom, atol=1e-6)


def test_rotation_moves_points_but_keeps_norms(hexagonal):
    cls, curve = hexagonal.cls, hexagonal.curve
    rotated = build_embedding_ctx(curve, cls, rotation=(1.0, 1.0, 0.0, 0.0))
    s, t = np.array([0.3, 1.2]), np.array([0.2, 0.9])
    a, b = sphere_points(hexagonal, s, t), sphere_points(rotated, s, t)
    assert np.allclose(np.linalg.norm(b, axis=1), 1)
    assert not np.allclose(a, b)
    # isometry: pairwise distances survive
    assert np.linalg.norm(a[0] - a[1]) == pytest.approx(np.linalg.norm(b[0] - b[1]))


def test_context_rejects_wrong_class(clifford):
    hex_cls = find_embedding_class(complex(0.5, SQRT3 / 2))
    with pytest.raises(ValueError):
        build_embedding_ctx(SphereCurveParams(clifford.curve.phi0, 0.0, 3), hex_cls)


def test_clifford_mesh(clifford):
    mesh = generate_mesh(clifford, 64, 32)
    assert len(mesh.vertices) == 2048
    assert len(mesh.quads) == 2048
    assert mesh.euler_characteristic() == 0
    assert np.all(np.isfinite(mesh.vertices))


def test_hexagonal_mesh_shear(hexagonal):
    assert shear_fraction(hexagonal.cls) == Fraction(1, 2)
    mesh = generate_mesh(hexagonal, 64, 16)
    top_row_first_quad = mesh.quads[15 * 64]
    # top vertices come from row 0 shifted back by 32 indices
    assert list(top_row_first_quad) == [15 * 64, 15 * 64 + 1, (1 - 32) % 64, (0 - 32) % 64]
    assert mesh.euler_characteristic() == 0


def test_mesh_errors(hexagonal):
    with pytest.raises(ShearMisaligned):
        generate_mesh(hexagonal, 63, 16)
    with pytest.raises(ValueError):
        generate_mesh(hexagonal, 64, 4)


def test_every_edge_has_two_faces(hexagonal):
    mesh = generate_mesh(hexagonal, 16, 8)
    q = mesh.quads
    edges = np.concatenate([q[:, [0, 1]], q[:, [1, 2]], q[:, [2, 3]], q[:, [3, 0]]])
    _, counts = np.unique(np.sort(edges, axis=1), axis=0, return_counts=True)
    assert np.all(counts == 2)


def test_map_scene_square5(clifford, square5):
    alpha = frobenius_alpha(square5).alpha
    level = fixed_lattice(alpha, 1, lattice_tau(alpha))
    scene = map_scene(clifford, level)
    assert len(scene.markers) == 10
    assert [m.is_identity for m in scene.markers].count(True) == 1
    assert scene.markers[0].position == pytest.approx(embed_point(clifford, 0.0, 0.0))
    assert len(scene.edges) == 10
    assert all(len(edge.positions) == 33 for edge in scene.edges)


def test_map_scene_edges_join_their_endpoints(hexagonal, hex7):
    alpha = frobenius_alpha(hex7).alpha
    level = fixed_lattice(alpha, 2, lattice_tau(alpha))
    scene = map_scene(hexagonal, level)
    assert len(scene.markers) == 39
    for (source, target, _), edge in zip(level.edges, scene.edges):
        assert edge.positions[0] == pytest.approx(scene.markers[source].position, abs=1e-9)
        assert edge.positions[-1] == pytest.approx(scene.markers[target].position, abs=1e-7)
