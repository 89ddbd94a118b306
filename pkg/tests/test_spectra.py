import math
from fractions import Fraction

import numpy as np
import pytest

from lenspec.errors import EnumerationCapError, SystoleUndefinedError
from lenspec.graphspace import MetricGraph, interval_graph
from lenspec.spaces import Circle, FiniteMetricSpace, FlatTorus, RoundSphere
from lenspec.spectra import (enumerate_graph_geodesics, min_length_bounds,
                             space_injrad, space_minind, spectrum,
                             spectrum_1_over_k, spectrum_open_1_over_k,
                             systole, torus_classes)

from oracles import enumerate_walks, check_one_over_k_exact


# ------------------------------------------------------------- enumeration

def test_theta_enumeration(theta):
    enum = enumerate_graph_geodesics(theta, 2.5)
    assert [c.length for c in enum.curves] == [2.0, 2.0, 2.0]
    assert enum.complete
    # edge pairs {0,1}, {0,2}, {1,2}
    pairs = {frozenset(e for e, _ in c.walk) for c in enum.curves}
    assert pairs == {frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2})}


def test_doubled_square_enumeration(doubled_square):
    # four vertex-pair digons; rotation/reversal identified (hand count)
    enum = enumerate_graph_geodesics(doubled_square, 2.5)
    assert [c.length for c in enum.curves] == [2.0] * 4
    oracle = enumerate_walks(4, [(i // 2, ((i // 2) + 1) % 4, Fraction(1))
                                 for i in range(8)], Fraction(5, 2))
    assert len(oracle) == 4


def test_loop_iterates(loop_graph):
    enum = enumerate_graph_geodesics(loop_graph, 3.5)
    assert [c.length for c in enum.curves] == [1.0, 2.0, 3.0]


def test_enumeration_matches_oracle(theta):
    edges = [(0, 1, Fraction(1))] * 3
    for radius in (2, 4, 6):
        enum = enumerate_graph_geodesics(theta, radius)
        oracle = enumerate_walks(2, edges, Fraction(radius))
        assert sorted(c.exact_length for c in enum.curves) == \
            sorted(ln for ln, _ in oracle.values())


def test_enumeration_cap(theta):
    with pytest.raises(EnumerationCapError):
        enumerate_graph_geodesics(theta, 40.0, cap=100)


# ----------------------------------------------------------------- spectra

def test_torus_spectrum_truncated():
    t = FlatTorus([math.pi, math.pi / 2])
    sp = spectrum(t, 7.0)
    assert sp.lengths == pytest.approx([math.pi, 2 * math.pi], abs=1e-9)


def test_circle_spectrum(circle_pi):
    assert spectrum(circle_pi, 7.0).lengths == pytest.approx([2 * math.pi])
    assert spectrum(circle_pi, 13.0).lengths == pytest.approx(
        [2 * math.pi, 4 * math.pi])


def test_theta_spectrum(theta):
    sp = spectrum(theta, 4.5)
    assert sp.lengths == [2.0, 4.0]
    assert [e.exact_length for e in sp.entries] == [2, 4]


def test_finite_spectrum_empty():
    fm = FiniteMetricSpace([[0, 1], [1, 0]])
    assert spectrum(fm, 5.0).entries == []


def test_sphere_even_spectra(sphere2):
    for k in (1, 2, 3):
        sp = spectrum_1_over_k(sphere2, 2 * k, R=2 * k * math.pi + 1)
        assert sp.lengths == pytest.approx(
            [2 * math.pi * n for n in range(1, k + 1)], abs=1e-6)


def test_torus_k_spectrum_formula():
    for j in (1, 2, 4, 8):
        t = FlatTorus([math.pi, math.pi / j])
        for k in (2, 4, 5):
            want = sorted({math.sqrt((2 * math.pi * a) ** 2 +
                                     (2 * math.pi * b / j) ** 2)
                           for a in range(k // 2 + 1)
                           for b in range(k // 2 + 1) if (a, b) != (0, 0)})
            want = [x for x in want if x <= 10.0 + 1e-9]
            got = spectrum_1_over_k(t, k, R=10.0).lengths
            assert got == pytest.approx(want, abs=1e-9)


def test_theta_half_spectrum(theta):
    sp = spectrum_1_over_k(theta, 2, R=4.5)
    assert sp.lengths == [2.0]
    assert sp.entries[0].minind == 2
    assert sp.entries[0].opind == 3
    assert len(sp.entries[0].witnesses) == 3


def test_open_spectra():
    c = Circle(math.pi)
    s = RoundSphere(2)
    assert spectrum_open_1_over_k(c, 2, R=7.0).entries == []
    assert spectrum_open_1_over_k(c, 3, R=7.0).lengths == pytest.approx([2 * math.pi])
    assert spectrum_open_1_over_k(s, 3, R=7.0).lengths == pytest.approx([2 * math.pi])


def test_graph_open_spectrum(theta, doubled_square):
    assert spectrum_open_1_over_k(theta, 2, R=4.5).entries == []
    assert spectrum_open_1_over_k(theta, 3, R=4.5).lengths == [2.0]
    sp = spectrum_open_1_over_k(doubled_square, 4, R=4.5)
    assert 4.0 in sp.lengths  # the zig-zag loops are openly 1/4


# ------------------------------------------------------- nesting/sandwich

def test_spectrum_nesting_in_k(theta, sphere2):
    spaces = [theta, FlatTorus([math.pi, math.pi / 2]), sphere2]
    for space in spaces:
        prev = set()
        for k in range(2, 7):
            cur = set(spectrum_1_over_k(space, k, R=9.0).lengths)
            assert prev <= cur
            prev = cur


def test_open_sandwich(theta):
    for k in (3, 4, 5):
        lower = set(spectrum_1_over_k(theta, k - 1, R=6.0).lengths)
        mid = set(spectrum_open_1_over_k(theta, k, R=6.0).lengths)
        upper = set(spectrum_1_over_k(theta, k, R=6.0).lengths)
        assert lower <= mid <= upper


def test_diameter_truncation(theta):
    for k in (2, 3, 4):
        sp = spectrum_1_over_k(theta, k)  # default R = k * diam
        assert all(ln <= k * theta.diameter() + 1e-9 for ln in sp.lengths)


def test_union_property_exact(theta):
    # L(M) = union of the 1/k spectra once k exceeds R / injrad
    radius = Fraction(9, 2)
    inj = space_injrad(theta)
    kcap = math.ceil(float(radius) / inj)
    full = set(e.exact_length for e in spectrum(theta, radius).entries)
    union = set()
    for k in range(2, kcap + 1):
        union |= set(e.exact_length
                     for e in spectrum_1_over_k(theta, k, R=radius).entries)
    assert union == full


def test_pipeline_vs_oracle_small_graph():
    g = MetricGraph(["a", "b", "c"],
                    [("a", "b", 1), ("b", "c", Fraction(1, 2)),
                     ("c", "a", 1), ("b", "c", 1)])
    edges = [(0, 1, Fraction(1)), (1, 2, Fraction(1, 2)),
             (2, 0, Fraction(1)), (1, 2, Fraction(1))]
    radius = 3 * g.diameter_exact()
    oracle = enumerate_walks(3, edges, radius)
    full = spectrum(g, radius)
    assert sorted(set(ln for ln, _ in oracle.values())) == \
        [e.exact_length for e in full.entries]
    for k in (2, 3, 4):
        want = sorted({ln for ln, walk in oracle.values()
                       if check_one_over_k_exact(3, edges, walk, k)})
        got = [e.exact_length for e in spectrum_1_over_k(g, k, R=radius).entries]
        assert got == want


# ----------------------------------------------------------------- systole

def test_systole_examples(theta, doubled_square, loop_graph):
    for g, want in ((theta, 2.0), (doubled_square, 2.0), (loop_graph, 1.0)):
        ln, wit = systole(g)
        assert ln == want
        assert wit.check_one_over_k(2).holds
        assert ln <= 2 * g.diameter() + 1e-9


def test_systole_membership_in_half_spectrum(theta):
    ln, _ = systole(theta)
    assert ln in spectrum_1_over_k(theta, 2, R=2 * theta.diameter()).lengths


def test_tree_systole_undefined():
    with pytest.raises(SystoleUndefinedError):
        systole(interval_graph())


# ------------------------------------------------------------- space index

def test_space_minind(sphere2, torus_half, theta):
    assert space_minind(sphere2) == 2
    assert space_minind(torus_half) == 2
    assert space_minind(theta) == 2
    assert space_minind(FiniteMetricSpace([[0, 1], [1, 0]])) is None
    assert space_minind(interval_graph()) is None


def test_min_length_bounds_examples(sphere2, theta):
    lower, upper = min_length_bounds(sphere2)
    assert upper == pytest.approx(2 * math.pi, abs=1e-9)
    assert upper <= 2 * sphere2.diameter() + 1e-9
    assert lower == pytest.approx(2 * math.pi, abs=1e-9)

    lower, upper = min_length_bounds(theta)
    assert (lower, upper) == (2.0, 2.0)

    lower, upper = min_length_bounds(FlatTorus([math.pi, math.pi / 8]))
    assert upper == pytest.approx(math.pi / 4, abs=1e-12)
    assert lower == pytest.approx(math.pi / 4, abs=1e-12)


def test_space_injrad_values(circle_pi, sphere2, theta):
    assert space_injrad(circle_pi) == math.pi
    assert space_injrad(sphere2) == math.pi
    assert space_injrad(theta) == 1.0
    assert space_injrad(FlatTorus([math.pi, math.pi / 8])) == math.pi / 8
    assert space_injrad(interval_graph()) == math.inf


def test_graph_injrad_short_segments_minimal(theta):
    # grid cross-check of the systole/2 closed form: every non-backtracking
    # segment of length <= injrad is minimizing
    inj = space_injrad(theta)
    for cur in enumerate_graph_geodesics(theta, 4.0).curves:
        t = np.linspace(0, 2 * math.pi, 64, endpoint=False)
        g = cur.chord(t, inj)
        assert (g >= inj - 1e-9).all() or cur.length < 2 * inj - 1e-9


# --------------------------------------------------------------- metadata

def test_spectrum_entry_dedup_keeps_witnesses():
    t = FlatTorus([1.0, 1.0])
    sp = spectrum_1_over_k(t, 2, R=3.0)
    # the two unit classes (1,0) and (0,1) share the length 2
    entry = sp.entries[0]
    assert entry.length == pytest.approx(2.0)
    assert len(entry.witnesses) == 2


def test_torus_classes_orientation_dedup():
    t = FlatTorus([1.0, 1.0])
    vecs = [v for v, _, _ in torus_classes(t, 3.0)]
    assert (1, 0) in vecs and (0, 1) in vecs
    assert (-1, 0) not in vecs
    assert all(next(x for x in v if x) > 0 for v in vecs)


def test_torus_formula_minind_matches_grid_checks():
    # spectra take the lattice closed form; the grid machinery must agree
    from lenspec.spectra import torus_curve
    rng = np.random.default_rng(17)
    for _ in range(20):
        t = FlatTorus([float(rng.uniform(0.8, 2.5)), float(rng.uniform(0.8, 2.5))])
        a = int(rng.integers(-3, 4))
        b = int(rng.integers(-3, 4))
        if a == 0 and b == 0:
            continue
        cur = torus_curve(t, (a, b))
        assert cur.minimizing_index(k_max=8) == 2 * max(abs(a), abs(b))


def test_three_factor_torus():
    from lenspec.spectra import torus_curve
    t = FlatTorus([1.0, 1.0, 1.0])
    sp = spectrum(t, 2.5)
    assert sp.lengths == pytest.approx([2.0])
    assert len(sp.entries[0].witnesses) == 3  # three unit classes
    assert sp.entries[0].minind == 2
    diag = torus_curve(t, (1, 1, 1))
    assert diag.length == pytest.approx(2 * math.sqrt(3))
    assert diag.minimizing_index() == 2
    assert space_minind(t) == 2
