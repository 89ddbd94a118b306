import math

import pytest

from lenspec.errors import InvalidSpaceError
from lenspec.gh import correspondence_distortion, gh_upper_bound
from lenspec.meshspace import (MeshSurface, doubled_disk_mapping,
                               doubled_disk_mesh, ellipsoid_mesh,
                               equator_curve)
from lenspec.spaces import NetSample, build_net

TET_V = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
TET_F = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]


def test_tetrahedron_valid():
    mesh = MeshSurface(TET_V, TET_F, steiner=2)
    d = mesh.distance(mesh.vertex_point(0), mesh.vertex_point(1))
    edge = 2 * math.sqrt(2)
    assert d == pytest.approx(edge, abs=1e-9)


def test_open_mesh_rejected():
    with pytest.raises(InvalidSpaceError):
        MeshSurface(TET_V, TET_F[:3])  # boundary edges remain


def test_disconnected_or_degenerate_rejected():
    with pytest.raises(InvalidSpaceError):
        MeshSurface([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 1)])


def test_ellipsoid_equator_geometry():
    mesh = ellipsoid_mesh(1.0)
    eq = equator_curve(mesh)
    # inscribed polygon length is slightly below 2*pi
    assert eq.length == pytest.approx(2 * math.pi, abs=0.1)
    assert eq.length < 2 * math.pi


def test_round_equator_passes_third_check():
    eq = equator_curve(ellipsoid_mesh(1.0))
    assert eq.check_one_over_k(3).holds


def test_flattened_equator_exits_third_spectrum():
    # the chord across the flattening cap undercuts the equator arc
    margins = []
    for c in (1.0, 0.5, 0.25):
        eq = equator_curve(ellipsoid_mesh(c))
        res = eq.check_one_over_k(3)
        margins.append(res.margin if res.violated else 0.0)
    assert margins[0] == 0.0
    assert margins[1] > 0.05
    assert margins[2] > margins[1]


def test_doubled_disk_boundary_shortcut_certified():
    # the glued boundary circle is not minimizing over quarter spans:
    # the straight chord through a disk beats the arc by a certified margin
    dd = doubled_disk_mesh()
    bd = equator_curve(dd)
    res = bd.check_one_over_k(4)
    assert res.violated
    arc = bd.length / 4
    chord = 2 * math.sin(math.pi / 4)
    assert res.margin == pytest.approx(arc - chord, abs=3 * dd.metric_slack)


def test_doubled_disk_diameter():
    dd = doubled_disk_mesh()
    assert dd.diameter() == pytest.approx(2.0, abs=0.05)


def test_ellipsoid_to_disk_correspondence_shrinks():
    dd = doubled_disk_mesh()
    prev = None
    for c in (0.5, 0.25):
        mesh = ellipsoid_mesh(c)
        net = build_net(mesh, 0.6)
        mapping = doubled_disk_mapping(mesh, dd)
        image = NetSample(dd, [mapping(p) for p in net.points], 0.6)
        rel = [(i, i) for i in range(len(net.points))]
        dis = correspondence_distortion(net, image, rel)
        if prev is not None:
            assert dis <= prev + 0.1
        prev = dis
    assert prev < 1.2  # flattened ellipsoid sits close to the disk


def test_mesh_net_and_probe_machinery():
    mesh = ellipsoid_mesh(1.0)
    net = build_net(mesh, 0.8)
    assert net.verify(0.2)
    b = gh_upper_bound(mesh, mesh, 0.8)
    assert b.bound <= 1.6 + 1e-9


def test_mesh_barycentric_points():
    mesh = MeshSurface(TET_V, TET_F, steiner=2)
    p = mesh.point(0, (1 / 3, 1 / 3, 1 / 3))
    q = mesh.point(0, (0.7, 0.2, 0.1))
    same_face = mesh.distance(p, q)
    import numpy as np
    assert same_face == pytest.approx(
        float(np.linalg.norm(mesh.xyz(p) - mesh.xyz(q))), abs=1e-12)
    r = mesh.point(3, (1 / 3, 1 / 3, 1 / 3))
    cross = mesh.distance(p, r)
    assert cross > 0
    # triangle inequality through a shared vertex
    assert cross <= mesh.distance(p, mesh.vertex_point(1)) + \
        mesh.distance(mesh.vertex_point(1), r) + 1e-9


def test_mesh_energy_unsupported():
    from lenspec.energy import energy_gradient, is_rotating_critical
    from lenspec.errors import UnsupportedOperationError
    mesh = MeshSurface(TET_V, TET_F, steiner=2)
    pts = [mesh.vertex_point(i) for i in range(3)]
    with pytest.raises(UnsupportedOperationError):
        energy_gradient(mesh, pts)
    with pytest.raises(UnsupportedOperationError):
        is_rotating_critical(mesh, pts)
