"""Truncated length spectra, systoles and space-level minimizing indices.

Closed geodesics are enumerated exhaustively on metric graphs
(non-backtracking closed edge walks), in closed form on circles, flat
tori and round spheres (lattice classes and iterates), and heuristically
on meshes.  Spectra are sets of lengths; witness multiplicity is kept as
per-entry metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curves import ClosedCurve, _canonical_walk
from .defaults import EPS_LEN, K_MAX_DEFAULT, WALK_CAP
from .errors import (EnumerationCapError, SystoleUndefinedError,
                     UnsupportedOperationError)
from .graphspace import MetricGraph, _as_fraction
from .spaces import Circle, FlatTorus, RoundSphere


@dataclass
class SpectrumEntry:
    length: float
    minind: int | None = None     # min over witnesses; None = not computed/exceeds
    opind: int | None = None
    open_flag: bool | None = None  # openness at the spectrum's k
    witnesses: list = field(default_factory=list)
    exact_length: Fraction | None = None

    def to_json(self):
        return {
            "length": self.length,
            "minind": self.minind,
            "opind": self.opind,
            "open": self.open_flag,
            "witnesses": len(self.witnesses),
        }


@dataclass
class Spectrum:
    space_label: str
    k: int | None
    R: float
    entries: list
    undecided: list = field(default_factory=list)
    complete: bool = True

    @property
    def lengths(self):
        return [e.length for e in self.entries]

    @property
    def exact_lengths(self):
        return [e.exact_length for e in self.entries]

    def to_json(self):
        return {
            "space": self.space_label,
            "k": self.k,
            "R": self.R,
            "entries": [e.to_json() for e in self.entries],
            "undecided": [e.to_json() for e in self.undecided],
            "complete": self.complete,
        }


@dataclass
class GeodesicEnumeration:
    space: object
    R: float
    curves: list
    complete: bool


# ------------------------------------------------- graph walk enumeration

def enumerate_graph_geodesics(graph, R, cap=WALK_CAP) -> GeodesicEnumeration:
    """All closed non-backtracking edge walks of length <= R, canonical form.

    On a metric graph these are exactly the closed geodesics.  Walks
    related by rotation or orientation reversal are identified.
    """
    if R <= 0:
        raise ValueError("truncation radius must be positive")
    r_exact = _as_fraction(R)
    out_edges = [[] for _ in range(graph.nv)]
    for e in range(graph.ne):
        out_edges[int(graph.eu[e])].append((e, 1))
        out_edges[int(graph.ev[e])].append((e, -1))

    def head(d):
        e, dr = d
        return int(graph.ev[e]) if dr == 1 else int(graph.eu[e])

    def idx(d):
        return 2 * d[0] + (0 if d[1] == 1 else 1)

    found = {}
    expanded = 0

    def dfs(start, seq, total):
        nonlocal expanded
        expanded += 1
        if expanded > cap:
            raise EnumerationCapError(
                f"walk enumeration exceeded the cap of {cap} states")
        if len(seq) > 900:
            raise EnumerationCapError(
                "walk enumeration exceeded the depth guard; "
                "lower R or raise the minimum edge length")
        last = seq[-1]
        v = head(last)
        if v == start_vertex:
            first = seq[0]
            if not (last[0] == first[0] and last[1] == -first[1]):
                key = _canonical_walk(seq)
                if key not in found:
                    found[key] = (total, list(seq))
        for d in out_edges[v]:
            if d[0] == last[0] and d[1] == -last[1]:
                continue  # backtrack
            if idx(d) < idx(start):
                continue  # each class is started from its minimal directed edge
            nd = total + graph.elen_exact[d[0]]
            if nd <= r_exact:
                seq.append(d)
                dfs(start, seq, nd)
                seq.pop()

    for e in range(graph.ne):
        for dr in (1, -1):
            d0 = (e, dr)
            start_vertex = int(graph.eu[e]) if dr == 1 else int(graph.ev[e])
            ln = graph.elen_exact[e]
            if ln <= r_exact:
                dfs(d0, [d0], ln)

    items = sorted(found.items(), key=lambda kv: (kv[1][0], kv[0]))
    curves = [ClosedCurve.from_edge_walk(graph, walk) for _, (_, walk) in items]
    return GeodesicEnumeration(graph, float(R), curves, complete=True)


# --------------------------------------------------- analytic class lists

def circle_curve(space, n=1, base=0.0):
    """The n-fold wrap of a circle as a closed curve."""
    m = 2 * n + 1
    c = space.circumference
    pts = [space.point(base + j * (n * c) / m) for j in range(m)]
    arcs = [(n * c) / m] * m
    return ClosedCurve(space, pts, witnesses=arcs)


def torus_curve(space, avec, base=None):
    """Closed geodesic of the lattice class avec on a flat torus."""
    avec = [int(a) for a in avec]
    if all(a == 0 for a in avec):
        raise ValueError("the zero class is not a curve")
    m = 2 * max(abs(a) for a in avec) + 1
    base = np.zeros(space.m) if base is None else np.asarray(base, dtype=np.float64)
    disp = np.array([space.circ[i] * avec[i] for i in range(space.m)])
    pts = [space.point(base + disp * (j / m)) for j in range(m)]
    wit = [disp / m] * m
    return ClosedCurve(space, pts, witnesses=wit)


def sphere_equator_curve(space, n=1):
    """n-fold iterate of a great circle in the xy-plane."""
    pts = [space.point([1.0, 0.0, 0.0]),
           space.point([-0.5, math.sqrt(3) / 2, 0.0]),
           space.point([-0.5, -math.sqrt(3) / 2, 0.0])]
    return ClosedCurve(space, pts).iterate(n)


def torus_classes(space, R):
    """Canonical lattice classes with length <= R: (avec, length, minind)."""
    bounds = [int(math.floor((R + EPS_LEN) / c)) for c in space.circ]
    out = []

    def rec(i, vec):
        if i == space.m:
            if any(vec):
                first = next(v for v in vec if v != 0)
                if first > 0:  # orientation-reversed classes identified
                    ln = math.sqrt(sum((space.circ[j] * vec[j]) ** 2
                                       for j in range(space.m)))
                    if ln <= R + EPS_LEN:
                        out.append((tuple(vec), ln, 2 * max(abs(v) for v in vec)))
            return
        for a in range(-bounds[i], bounds[i] + 1):
            rec(i + 1, vec + [a])

    rec(0, [])
    return sorted(out, key=lambda t: (t[1], t[0]))


# ----------------------------------------------------- spectrum assembly

def _group_entries(items, k=None, delta=None):
    """items: (length float, exact or None, minind, opind, witness)."""
    items = sorted(items, key=lambda t: t[0])
    entries = []
    for ln, exact, mind, opind, wit in items:
        if entries and (
            (exact is not None and entries[-1].exact_length == exact)
            or (exact is None and abs(entries[-1].length - ln) <= EPS_LEN)
        ):
            e = entries[-1]
            e.witnesses.append(wit)
            if mind is not None and (e.minind is None or mind < e.minind):
                e.minind = mind
            if opind is not None and (e.opind is None or opind < e.opind):
                e.opind = opind
            continue
        entries.append(SpectrumEntry(length=ln, minind=mind, opind=opind,
                                     witnesses=[wit], exact_length=exact))
    if k is not None:
        for e in entries:
            e.open_flag = (e.opind is not None and e.opind <= k)
    return entries


def spectrum(space, R, delta=None, with_indices=False, seed=0):
    """Full truncated length spectrum L(M) in (0, R]."""
    if R <= 0:
        raise ValueError("truncation radius must be positive")
    label = space.label()
    if isinstance(space, Circle):
        c = space.circumference
        items = [(n * c, None, 2 * n, 2 * n + 1, circle_curve(space, n))
                 for n in range(1, int(math.floor((R + EPS_LEN) / c)) + 1)]
        return Spectrum(label, None, R, _group_entries(items))
    if isinstance(space, FlatTorus):
        items = [(ln, None, mind, mind + 1, torus_curve(space, vec))
                 for vec, ln, mind in torus_classes(space, R)]
        return Spectrum(label, None, R, _group_entries(items))
    if isinstance(space, RoundSphere):
        if space.dim != 2:
            raise UnsupportedOperationError("spectra implemented for S^2 only")
        items = [(2 * math.pi * n, None, 2 * n, 2 * n + 1, sphere_equator_curve(space, n))
                 for n in range(1, int(math.floor((R + EPS_LEN) / (2 * math.pi))) + 1)]
        return Spectrum(label, None, R, _group_entries(items))
    if isinstance(space, MetricGraph):
        enum = enumerate_graph_geodesics(space, R)
        items = []
        for cv in enum.curves:
            mind = cv.minimizing_index(K_MAX_DEFAULT, delta) if with_indices else None
            items.append((cv.length, cv.exact_length, mind, None, cv))
        return Spectrum(label, None, R, _group_entries(items))
    if space.kind == "finite":
        return Spectrum(label, None, R, [])
    if space.kind == "mesh":
        curves = _mesh_geodesic_search(space, R, seed=seed)
        items = [(cv.length, None, None, None, cv) for cv in curves]
        return Spectrum(label, None, R, _group_entries(items), complete=False)
    raise UnsupportedOperationError(f"spectrum unsupported on {space.kind}")


def spectrum_1_over_k(space, k, R=None, delta=None, seed=0):
    """The 1/k length spectrum, truncated to (0, R] (default R = k diam).

    On flat tori the minimizing index of the class (a_1..a_m) is
    2*max|a_i|, always even, so each odd-k spectrum coincides with the
    preceding even one; circles and round spheres behave the same way
    through their iterates.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if R is None:
        R = k * space.diameter()
    label = space.label()
    if isinstance(space, Circle):
        c = space.circumference
        items = [(n * c, None, 2 * n, 2 * n + 1, circle_curve(space, n))
                 for n in range(1, int(math.floor((R + EPS_LEN) / c)) + 1)
                 if 2 * n <= k]
        return Spectrum(label, k, R, _group_entries(items, k=k))
    if isinstance(space, FlatTorus):
        items = [(ln, None, mind, mind + 1, torus_curve(space, vec))
                 for vec, ln, mind in torus_classes(space, R) if mind <= k]
        return Spectrum(label, k, R, _group_entries(items, k=k))
    if isinstance(space, RoundSphere):
        if space.dim != 2:
            raise UnsupportedOperationError("spectra implemented for S^2 only")
        items = [(2 * math.pi * n, None, 2 * n, 2 * n + 1,
                  sphere_equator_curve(space, n))
                 for n in range(1, int(math.floor((R + EPS_LEN) / (2 * math.pi))) + 1)
                 if 2 * n <= k]
        return Spectrum(label, k, R, _group_entries(items, k=k))
    if isinstance(space, MetricGraph):
        enum = enumerate_graph_geodesics(space, R)
        items = []
        undecided = []
        for cv in enum.curves:
            res = cv.check_one_over_k(k, delta=delta)
            if res.status == "undecided":
                undecided.append(SpectrumEntry(length=cv.length, witnesses=[cv],
                                               exact_length=cv.exact_length))
                continue
            if not res.holds:
                continue
            mind = cv.minimizing_index(k, delta)
            opind = None
            if mind is not None:
                for kk in range(max(3, mind), mind + 2):
                    if cv.is_openly(kk, delta):
                        opind = kk
                        break
            items.append((cv.length, cv.exact_length, mind, opind, cv))
        return Spectrum(label, k, R, _group_entries(items, k=k), undecided)
    if space.kind == "finite":
        return Spectrum(label, k, R, [])
    if space.kind == "mesh":
        curves = _mesh_geodesic_search(space, R, seed=seed)
        items = []
        undecided = []
        for cv in curves:
            res = cv.check_one_over_k(k, delta=delta)
            if res.status == "undecided":
                undecided.append(SpectrumEntry(length=cv.length, witnesses=[cv]))
            elif res.holds:
                items.append((cv.length, None, None, None, cv))
        return Spectrum(label, k, R, _group_entries(items, k=k), undecided,
                        complete=False)
    raise UnsupportedOperationError(f"spectra unsupported on {space.kind}")


def spectrum_open_1_over_k(space, k, R=None, delta=None, seed=0):
    """Lengths of openly 1/k geodesics; empty for k = 2."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if R is None:
        R = k * space.diameter()
    label = space.label()
    if k == 2:
        return Spectrum(label, k, R, [])  # no openly 1/2 geodesics exist
    if isinstance(space, (Circle, FlatTorus, RoundSphere)):
        # on these homogeneous spaces injrad(curve) = L/minind exactly,
        # so openly 1/k is equivalent to minind <= k-1
        base = spectrum_1_over_k(space, k - 1, R, delta)
        sp = Spectrum(label, k, R, base.entries, base.undecided)
        for e in sp.entries:
            e.open_flag = True
        return sp
    if isinstance(space, MetricGraph):
        enum = enumerate_graph_geodesics(space, R)
        items = []
        for cv in enum.curves:
            if cv.is_openly(k, delta):
                mind = cv.minimizing_index(k, delta)
                items.append((cv.length, cv.exact_length, mind, None, cv))
        sp = Spectrum(label, k, R, _group_entries(items, k=k))
        for e in sp.entries:
            e.open_flag = True
        return sp
    if space.kind == "finite":
        return Spectrum(label, k, R, [])
    if space.kind == "mesh":
        curves = _mesh_geodesic_search(space, R, seed=seed)
        items = [(cv.length, None, None, None, cv) for cv in curves
                 if cv.is_openly(k, delta)]
        return Spectrum(label, k, R, _group_entries(items, k=k), complete=False)
    raise UnsupportedOperationError(f"spectra unsupported on {space.kind}")


# ----------------------------------------------------------- systole etc.

def systole(graph):
    """Length and witness of the shortest non-backtracking closed walk."""
    if not isinstance(graph, MetricGraph):
        raise UnsupportedOperationError("systole implemented for metric graphs")
    if graph.first_betti() < 1:
        raise SystoleUndefinedError("systole undefined: the graph has no cycles")
    ln, walk = graph.shortest_cycle()
    curve = ClosedCurve.from_edge_walk(graph, walk)
    assert curve.check_one_over_k(2).holds, "systole witness must be a 1/2 geodesic"
    return float(ln), curve


def space_injrad(space):
    """Injectivity radius of the space (None when unsupported)."""
    if isinstance(space, Circle):
        return 0.5 * space.circumference
    if isinstance(space, FlatTorus):
        return 0.5 * float(space.circ.min())
    if isinstance(space, RoundSphere):
        return math.pi
    if isinstance(space, MetricGraph):
        if graph_has_cycle(space):
            ln, _ = space.shortest_cycle()
            return 0.5 * float(ln)
        return math.inf  # trees: every local geodesic is minimal
    return None


def graph_has_cycle(graph):
    return graph.first_betti() >= 1


def space_minind(space, k_max=K_MAX_DEFAULT, delta=None, seed=0):
    """Smallest k with a 1/k geodesic of length <= k*diam; None = exceeds."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    if isinstance(space, (Circle, FlatTorus, RoundSphere)):
        return 2  # a shortest prime class is a 1/2 geodesic
    if isinstance(space, MetricGraph):
        if not graph_has_cycle(space):
            return None
        for k in range(2, k_max + 1):
            sp = spectrum_1_over_k(space, k, R=k * space.diameter(), delta=delta)
            if sp.entries:
                return k
        return None
    if space.kind == "finite":
        return None
    if space.kind == "mesh":
        for k in range(2, k_max + 1):
            sp = spectrum_1_over_k(space, k, R=k * space.diameter(), delta=delta,
                                   seed=seed)
            if sp.entries:
                return k  # heuristic upper bound
        return None
    raise UnsupportedOperationError(f"minimizing index unsupported on {space.kind}")


def min_length_bounds(space, k_max=K_MAX_DEFAULT, delta=None):
    """(lower, upper) bounds for the shortest closed geodesic length."""
    k = space_minind(space, k_max, delta)
    if k is None:
        raise UnsupportedOperationError(
            "no geodesics of index <= k_max were found")
    sp = spectrum_1_over_k(space, k, R=k * space.diameter(), delta=delta)
    upper = min(sp.lengths)
    assert upper <= k * space.diameter() + EPS_LEN
    inj = space_injrad(space)
    lower = None if inj is None else min(k * inj, upper)
    return lower, upper


# ------------------------------------------------------- mesh heuristics

def _mesh_geodesic_search(mesh, R, seed=0, n_starts=8, tuple_size=6,
                          iters=60):
    """Birkhoff-style midpoint shortening; completeness is heuristic."""
    rng = np.random.default_rng(seed)
    seeds = []
    if hasattr(mesh, "equator_vertices"):
        seeds.append([mesh.vertex_point(v) for v in mesh.equator_vertices])
    for _ in range(n_starts):
        seeds.append([mesh.random_point(rng) for _ in range(tuple_size)])
    curves = []
    for pts in seeds:
        pts = list(pts)
        ok = True
        for _ in range(iters):
            moved = 0.0
            for parity in (0, 1):
                for i in range(parity, len(pts), 2):
                    a, b = pts[i - 1], pts[(i + 1) % len(pts)]
                    if a.node == b.node:
                        ok = False
                        break
                    mid = _polyline_midpoint(mesh, a, b)
                    moved = max(moved, mesh.distance(pts[i], mid))
                    pts[i] = mid
                if not ok:
                    break
            if not ok or moved < 1e-9:
                break
        if not ok:
            continue
        dedup = [pts[0]]
        for p in pts[1:]:
            if p.node != dedup[-1].node:
                dedup.append(p)
        if len(dedup) < 3 or dedup[0].node == dedup[-1].node:
            continue
        try:
            cv = ClosedCurve(mesh, dedup)
        except Exception:
            continue
        if cv.length > R + EPS_LEN or cv.length < 8 * mesh.metric_slack:
            continue  # below the resolution noise floor
        if not cv.is_closed_geodesic():
            continue
        if not any(cv.same_geodesic(c, tol=2 * mesh.metric_slack,
                                    orientation_matters=False) for c in curves):
            curves.append(cv)
    return sorted(curves, key=lambda c: c.length)


def _polyline_midpoint(mesh, a, b):
    poly = mesh.shortest_polyline(a, b)
    total = 0.0
    lens = []
    for i in range(len(poly) - 1):
        step = float(np.linalg.norm(np.array(poly[i + 1][0]) - np.array(poly[i][0])))
        lens.append(step)
        total += step
    half = 0.5 * total
    acc = 0.0
    for i, step in enumerate(lens):
        if acc + step >= half:
            f = (half - acc) / step if step > 0 else 0.0
            xyz = (1 - f) * np.array(poly[i][0]) + f * np.array(poly[i + 1][0])
            return mesh.surface_point(xyz, hint_nodes=(poly[i][1], poly[i + 1][1]))
        acc += step
    return mesh.node_point(poly[-1][1])
