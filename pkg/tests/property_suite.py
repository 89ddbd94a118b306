"""Randomized instance pool and property checks shared by the property
tests and the acceptance suite.

Instances are (space, curve) pairs drawn deterministically from metric
graphs, flat tori and round spheres (plus circles for the energy-length
identity, which needs smooth structure).
"""

import math

import numpy as np

from lenspec.curves import ClosedCurve
from lenspec.energy import uniform_energy
from lenspec.errors import EnumerationCapError
from lenspec.graphspace import MetricGraph
from lenspec.spaces import Circle, FlatTorus, RoundSphere
from lenspec.spectra import (circle_curve, enumerate_graph_geodesics,
                             torus_curve)

from oracles import random_rational_graph

K_MAX = 12


def _graph_instances(rng, want):
    out = []
    while len(out) < want:
        nv, edges = random_rational_graph(rng, need_cycle=True)
        try:
            g = MetricGraph([f"v{i}" for i in range(nv)], edges)
        except Exception:
            continue
        if g.first_betti() < 1:
            continue
        try:
            enum = enumerate_graph_geodesics(g, 2.5 * g.diameter(), cap=20000)
        except EnumerationCapError:
            continue
        if not enum.curves:
            continue
        picks = rng.choice(len(enum.curves), size=min(3, len(enum.curves)),
                           replace=False)
        for i in sorted(int(x) for x in picks):
            out.append((g, enum.curves[i]))
    return out[:want]


def _torus_instances(rng, want):
    out = []
    while len(out) < want:
        d1 = float(rng.uniform(0.7, 3.0))
        d2 = float(rng.uniform(0.7, 3.0))
        t = FlatTorus([d1, d2])
        a = int(rng.integers(-3, 4))
        b = int(rng.integers(-3, 4))
        if a == 0 and b == 0:
            continue
        base = [float(rng.uniform(0, c)) for c in t.circ]
        out.append((t, torus_curve(t, (a, b), base=base)))
    return out


def _sphere_instances(rng, want):
    s = RoundSphere(2)
    out = []
    while len(out) < want:
        frame = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        u, v = frame[:, 0], frame[:, 1]
        pts = [s.point(math.cos(th) * u + math.sin(th) * v)
               for th in (0.0, 2 * math.pi / 3, 4 * math.pi / 3)]
        n = int(rng.integers(1, 4))
        out.append((s, ClosedCurve(s, pts).iterate(n)))
    return out


def _circle_instances(rng, want):
    out = []
    for _ in range(want):
        c = Circle(float(rng.uniform(0.7, 3.0)))
        out.append((c, circle_curve(c, int(rng.integers(1, 4)))))
    return out


def build_pool(seed=2024, per_kind=70):
    rng = np.random.default_rng(seed)
    pool = (_graph_instances(rng, per_kind)
            + _torus_instances(rng, per_kind)
            + _sphere_instances(rng, per_kind))
    return pool


def build_smooth_pool(seed=2025, per_kind=70):
    rng = np.random.default_rng(seed)
    return (_torus_instances(rng, per_kind)
            + _sphere_instances(rng, per_kind)
            + _circle_instances(rng, per_kind))


# -------------------------------------------------------------- properties

def check_nesting(space, curve):
    """Once the 1/k condition holds it holds for every larger k."""
    held = False
    for k in range(2, K_MAX + 1):
        holds = curve.check_one_over_k(k).holds
        if held and not holds:
            return False
        held = held or holds
    return True


def check_diam_truncation(space, curve):
    """minind >= L / diam, up to one unit of grid slack."""
    k = curve.minimizing_index(K_MAX)
    if k is None:
        return True
    return k >= curve.length / space.diameter() - 1 - 1e-6


def check_back_sandwich(space, curve):
    """holds(k-1) implies openly(k) implies holds(k)."""
    for k in range(3, K_MAX + 1):
        if curve.check_one_over_k(k - 1).holds and not curve.is_openly(k):
            return False
        if curve.is_openly(k) and not curve.check_one_over_k(k).holds:
            return False
    return True


def check_injrad_sandwich(space, curve):
    """L/minind <= injrad < L/(minind - 1), within the grid certificate."""
    k = curve.minimizing_index(K_MAX)
    if k is None:
        return True
    rho = curve.injectivity_radius()
    tol = curve.injrad_certificate() + 1e-6
    if curve.length / k > rho + tol:
        return False
    if k >= 2 and rho >= curve.length / (k - 1) + tol:
        return False
    return True


def check_iteration_interval(space, curve):
    """minind of the n-fold iterate lies in [n(k-1), nk] cap [2n, inf)."""
    k = curve.minimizing_index(K_MAX)
    if k is None or k > 5:
        return True  # the iterate's index would leave the scan range
    for n in (2, 3):
        kn = curve.iterate(n).minimizing_index(K_MAX * n)
        if kn is None:
            return False
        if not (max(n * (k - 1), 2 * n) <= kn <= n * k):
            return False
    return True


def check_index_gap(space, curve):
    """minind <= opind <= minind + 1."""
    k = curve.minimizing_index(K_MAX)
    if k is None:
        return True
    opind = None
    for kk in range(max(3, k), k + 2):
        if curve.is_openly(kk):
            opind = kk
            break
    return opind is not None and k <= opind <= k + 1


def check_energy_length_identity(space, curve):
    """Evenly resampled tuples of a 1/k geodesic have energy L^2."""
    k = curve.minimizing_index(K_MAX)
    if k is None:
        return True
    k = max(3, k + 1)  # keep the samples strictly inside the cut radius
    pts = [curve.eval(2 * math.pi * i / k) for i in range(k)]
    energy = uniform_energy(space, pts)
    return abs(energy - curve.length ** 2) <= 1e-8 * curve.length ** 2
