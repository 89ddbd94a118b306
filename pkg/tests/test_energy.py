import math

import numpy as np
import pytest

from lenspec.energy import (_chart, energy_gradient, find_critical_points,
                            gradient_norm, hessian_index,
                            is_rotating_critical, open_index_search,
                            tuple_to_curve, uniform_energy)
from lenspec.errors import CutLocusError, UnsupportedOperationError
from lenspec.graphspace import interval_graph
from lenspec.spaces import Circle, FlatTorus, RoundSphere
from lenspec.spectra import sphere_equator_curve

from oracles import central_gradient


def even_triple(circle):
    c = circle.circumference
    return [circle.point(0.0), circle.point(c / 3), circle.point(2 * c / 3)]


# ------------------------------------------------------------------ values

def test_circle_triple_energy(circle_pi):
    assert uniform_energy(circle_pi, even_triple(circle_pi)) == \
        pytest.approx(4 * math.pi ** 2, abs=1e-9)


def test_collapsed_energy_zero(circle_pi):
    p = circle_pi.point(1.0)
    assert uniform_energy(circle_pi, [p, p, p]) == 0.0


def test_torus_pair_energy():
    t = FlatTorus([math.pi, math.pi])
    pts = [t.point([0, 0]), t.point([math.pi, 0])]
    assert uniform_energy(t, pts) == pytest.approx(4 * math.pi ** 2, abs=1e-9)


def test_weighted_energy_spec(circle_pi):
    from lenspec.energy import EnergySpec, ProductPoint
    pts = even_triple(circle_pi)
    spec = EnergySpec.uniform(circle_pi, 3)
    assert spec.energy(pts) == pytest.approx(uniform_energy(circle_pi, pts))
    assert spec.weight_sum == pytest.approx(1.0)
    # equal segment/weight ratios at a smooth critical point
    assert spec.balance_residual(pts) < 1e-12
    skew = EnergySpec(circle_pi, (0.5, 0.25, 0.25))
    assert skew.energy(pts) > spec.energy(pts)
    with pytest.raises(ValueError):
        EnergySpec(circle_pi, (0.5, -0.5))
    with pytest.raises(ValueError):
        ProductPoint(circle_pi, (circle_pi.point(0.0),))


def test_find_critical_points_threaded_deterministic(circle_pi):
    a = find_critical_points(circle_pi, 3, n_starts=16, seed=4, threads=1)
    b = find_critical_points(circle_pi, 3, n_starts=16, seed=4, threads=4)
    assert a.to_json() == b.to_json()


# --------------------------------------------------------------- gradients

def test_gradient_zero_at_even_triple(circle_pi):
    grads = energy_gradient(circle_pi, even_triple(circle_pi))
    assert gradient_norm(grads) < 1e-10


def test_gradient_nonzero_off_critical(circle_pi):
    grads = energy_gradient(circle_pi, [circle_pi.point(0),
                                        circle_pi.point(math.pi / 2)])
    assert gradient_norm(grads) > 1.0


def test_gradient_cut_locus_error(circle_pi):
    with pytest.raises(CutLocusError):
        energy_gradient(circle_pi, [circle_pi.point(0),
                                    circle_pi.point(math.pi)])


def _fd_check(space, k, rng, n_cfg, rel_tol=1e-6):
    chart = _chart(space)
    dim = chart.dim
    checked = 0
    while checked < n_cfg:
        pts = [space.random_point(rng) for _ in range(k)]
        try:
            grads = energy_gradient(space, pts, chart)
        except CutLocusError:
            continue
        if any(chart.near_cut(pts[i], pts[(i + 1) % k]) for i in range(k)):
            continue
        # keep away from the cut locus so central differences stay smooth
        if min(space.distance(pts[i], pts[(i + 1) % k]) for i in range(k)) > \
           0.95 * space.diameter():
            continue

        def f(u, i):
            moved = list(pts)
            moved[i] = chart.step(pts[i], u)
            return uniform_energy(space, moved)

        for i in range(k):
            fd = central_gradient(lambda u: f(u, i), np.zeros(dim), h=1e-6)
            scale = max(1.0, float(np.linalg.norm(fd)))
            assert np.linalg.norm(grads[i] - fd) / scale < rel_tol
        checked += 1


def test_gradient_matches_finite_differences_everywhere():
    rng = np.random.default_rng(11)
    _fd_check(Circle(math.pi), 3, rng, 25)
    _fd_check(FlatTorus([math.pi, math.pi / 2]), 3, rng, 25)
    _fd_check(RoundSphere(2), 3, rng, 25)
    _fd_check(interval_graph(), 4, rng, 25)


# ------------------------------------------------------------- conversions

def test_tuple_to_curve_circle(circle_pi):
    cur = tuple_to_curve(circle_pi, even_triple(circle_pi))
    assert cur.length == pytest.approx(2 * math.pi, abs=1e-12)


def test_tuple_to_curve_sphere(sphere2):
    pts = [sphere2.point([1, 0, 0]),
           sphere2.point([-0.5, math.sqrt(3) / 2, 0]),
           sphere2.point([-0.5, -math.sqrt(3) / 2, 0])]
    cur = tuple_to_curve(sphere2, pts)
    assert cur.length == pytest.approx(2 * math.pi, abs=1e-9)
    assert cur.same_geodesic(sphere_equator_curve(sphere2), tol=1e-6,
                             orientation_matters=False)


def test_tuple_to_curve_torus_line():
    t = FlatTorus([math.pi, math.pi])
    pts = [t.point([2 * math.pi * i / 3, 0.5]) for i in range(3)]
    cur = tuple_to_curve(t, pts)
    assert cur.length == pytest.approx(2 * math.pi, abs=1e-9)
    for i in range(3):
        assert t.distance(pts[i], pts[(i + 1) % 3]) == \
            pytest.approx(cur.length / 3, abs=1e-9)
    assert cur.eval(0.0).pos[1] == pytest.approx(0.5, abs=1e-9)


# ----------------------------------------------------------- rotating test

def test_rotating_circle_triple(circle_pi):
    assert is_rotating_critical(circle_pi, even_triple(circle_pi))


def test_rotating_sphere_equator_k4(sphere2):
    eq = sphere_equator_curve(sphere2)
    pts = [eq.eval(i * math.pi / 2) for i in range(4)]
    assert is_rotating_critical(sphere2, pts)


def test_rotating_rejects_nongeodesic_tuple(sphere2):
    # corners of a spherical square off any great circle: the induced
    # curve has corners, so resampled tuples are far from critical
    pts = [sphere2.point([1, 0, 0.3]), sphere2.point([0, 1, 0.3]),
           sphere2.point([-1, 0, 0.3]), sphere2.point([0, -1, 0.3])]
    assert not is_rotating_critical(sphere2, pts, tol_grad=1e-7)


# ---------------------------------------------------------------- hessians

def test_circle_triple_hessian(circle_pi):
    rep = hessian_index(circle_pi, even_triple(circle_pi))
    assert rep.index == 0
    assert rep.nullity >= 1
    assert max(rep.eigenvalues) == pytest.approx(18.0, abs=1e-3)


def test_torus_line_hessian():
    t = FlatTorus([math.pi, math.pi])
    pts = [t.point([2 * math.pi * i / 3, 0.5]) for i in range(3)]
    rep = hessian_index(t, pts)
    assert rep.index == 0
    assert rep.nullity >= 2  # translation + rotation degeneracy


def test_sphere_equator_hessian_index_bounded(sphere2):
    eq = sphere_equator_curve(sphere2)
    pts = [eq.eval(2 * math.pi * i / 3) for i in range(3)]
    rep = hessian_index(sphere2, pts)
    assert rep.nullity >= 1
    assert rep.index <= (2 - 1) * 3  # Morse bound with opind = 3


# ------------------------------------------------------------------ search

def test_circle_search_k2_only_collapses(circle_pi):
    rep = find_critical_points(circle_pi, 2, n_starts=64, seed=7)
    assert rep.records == []
    assert rep.collapsed > 0


def test_circle_search_k3_two_orientations(circle_pi):
    rep = find_critical_points(circle_pi, 3, n_starts=64, seed=7)
    assert len(rep.records) == 2
    for rec in rep.records:
        assert rec.rotating
        assert rec.energy == pytest.approx(4 * math.pi ** 2, abs=1e-6)
        assert rec.curve.length == pytest.approx(2 * math.pi, abs=1e-6)
        assert rec.segment_residual < 1e-6
    a, b = (r.curve for r in rep.records)
    assert not a.same_geodesic(b)
    assert a.same_geodesic(b, orientation_matters=False)


def test_interval_has_no_critical_points():
    iv = interval_graph()
    for k in range(2, 7):
        rep = find_critical_points(iv, k, n_starts=16, seed=3)
        assert rep.records == []


def test_energy_length_identity_on_searches(sphere2):
    t = FlatTorus([math.pi, math.pi])
    for space in (Circle(math.pi), t, sphere2):
        rep = find_critical_points(space, 3, n_starts=16, seed=5)
        for rec in rep.rotating_records:
            assert rec.energy == pytest.approx(rec.curve.length ** 2,
                                               rel=1e-8)


def test_descent_monotonicity(circle_pi):
    from lenspec.energy import _descend
    chart = _chart(circle_pi)
    rng = np.random.default_rng(2)
    start = [circle_pi.random_point(rng) for _ in range(3)]
    energies = []
    orig = uniform_energy

    # wrap to trace accepted energies
    import lenspec.energy as en
    def traced(space, pts):
        val = orig(space, pts)
        energies.append(val)
        return val
    en.uniform_energy = traced
    try:
        _descend(circle_pi, chart, start, 1e-10)
    finally:
        en.uniform_energy = orig
    # accepted energies (the subsequence actually kept) never increase
    kept = [energies[0]]
    for e in energies[1:]:
        if e < kept[-1]:
            kept.append(e)
    assert kept == sorted(kept, reverse=True)


def test_open_index_search_values(circle_pi, sphere2):
    assert open_index_search(circle_pi, 6, n_starts=32, seed=7) == 3
    assert open_index_search(sphere2, 5, n_starts=24, seed=7) == 3
    assert open_index_search(FlatTorus([math.pi, math.pi]), 5,
                             n_starts=24, seed=7) == 3
    assert open_index_search(interval_graph(), 6, n_starts=8, seed=1) is None


def test_unsupported_space_errors(theta):
    with pytest.raises(UnsupportedOperationError):
        energy_gradient(theta, [theta.vertex(0), theta.vertex(1)])


def test_rotating_implies_openly(circle_pi, sphere2):
    for space in (circle_pi, sphere2):
        rep = find_critical_points(space, 3, n_starts=16, seed=9)
        for rec in rep.rotating_records:
            assert rec.curve.is_openly(3)


def test_openly_implies_rotating_samples(sphere2):
    # witnesses of the open 1/3 spectrum resample to critical tuples
    from lenspec.spectra import spectrum_open_1_over_k
    sp = spectrum_open_1_over_k(sphere2, 3, R=7.0)
    chart = _chart(sphere2)
    for entry in sp.entries:
        cur = entry.witnesses[0]
        for t0 in np.linspace(0, 2 * math.pi / 3, 8, endpoint=False):
            tup = [cur.eval(t0 + 2 * math.pi * i / 3) for i in range(3)]
            assert gradient_norm(energy_gradient(sphere2, tup, chart)) < 1e-7


def test_search_report_json(circle_pi):
    rep = find_critical_points(circle_pi, 3, n_starts=8, seed=1,
                               with_hessians=True)
    data = rep.to_json()
    assert data["k"] == 3 and data["starts"] == 8
    for rec in data["rotating"]:
        assert rec["hessian_index"] is not None
        assert rec["nullity"] >= 1
