"""Metric graphs: exact rational distances, diameters and shortest cycles.

Edge lengths are stored both as floats (for the vectorized kernels) and
as exact ``Fraction`` values; every float is a dyadic rational, so the
exact lane is always available.  Point-to-point distances combine edge
offsets with an all-pairs vertex table.
"""

from __future__ import annotations

import heapq
import itertools
import math
from fractions import Fraction

import numpy as np

from . import kernels
from .defaults import EPS_LEN
from .errors import InvalidSpaceError, SpaceMismatchError
from .spaces import GraphPoint, LengthSpace


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)  # exact value of the float


# --------------------------------------------------- piecewise-linear max

def _line_intersections(lines, eps):
    pts = []
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if eps == 0:
            if det == 0:
                continue
        elif abs(det) <= eps:
            continue
        s = (c1 * b2 - c2 * b1) / det
        t = (a1 * c2 - a2 * c1) / det
        pts.append((s, t))
    return pts


def maxmin_linear_2d(cands, constraints, eps=0):
    """Maximize min_i (A_i s + B_i t + C_i) over {a s + b t <= c}.

    The objective is concave piecewise linear, so the optimum lies on an
    intersection of two lines drawn from the tie lines between candidate
    functions and the constraint boundaries.  Exact when inputs are
    Fractions (eps=0).
    """
    lines = [(a, b, c) for (a, b, c) in constraints]
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(cands, 2):
        lines.append((a1 - a2, b1 - b2, c2 - c1))
    best = None
    arg = None
    for s, t in _line_intersections(lines, eps):
        if any(a * s + b * t > c + eps for a, b, c in constraints):
            continue
        val = min(a * s + b * t + c for a, b, c in cands)
        if best is None or val > best:
            best, arg = val, (s, t)
    return best, arg


def maxmin_linear_1d(cands, lo, hi, eps=0):
    """Maximize min_i (A_i t + C_i) over [lo, hi]."""
    ts = [lo, hi]
    for (a1, c1), (a2, c2) in itertools.combinations(cands, 2):
        da = a1 - a2
        if (da == 0) if eps == 0 else (abs(da) <= eps):
            continue
        t = (c2 - c1) / da
        if lo <= t <= hi:
            ts.append(t)
    best = None
    arg = None
    for t in ts:
        val = min(a * t + c for a, c in cands)
        if best is None or val > best:
            best, arg = val, t
    return best, arg


# ------------------------------------------------------------ the variant

class MetricGraph(LengthSpace):
    """Connected undirected multigraph with positive edge lengths."""

    kind = "graph"
    point_type = GraphPoint

    def __init__(self, vertices, edges, name=None):
        """vertices: list of names; edges: triples (u, v, length) by name or index."""
        self.vertex_names = [str(v) for v in vertices]
        self.nv = len(self.vertex_names)
        if self.nv == 0:
            raise InvalidSpaceError("graph needs at least one vertex")
        index = {n: i for i, n in enumerate(self.vertex_names)}
        if len(index) != self.nv:
            raise InvalidSpaceError("duplicate vertex names")

        eu, ev, elen_exact = [], [], []
        for u, v, ln in edges:
            ui = index[u] if isinstance(u, str) else int(u)
            vi = index[v] if isinstance(v, str) else int(v)
            if not (0 <= ui < self.nv and 0 <= vi < self.nv):
                raise InvalidSpaceError("edge endpoint out of range")
            lf = _as_fraction(ln)
            if lf <= 0:
                raise InvalidSpaceError("edge lengths must be positive")
            eu.append(ui)
            ev.append(vi)
            elen_exact.append(lf)
        self.ne = len(eu)
        self.eu = np.array(eu, dtype=np.int64)
        self.ev = np.array(ev, dtype=np.int64)
        self.elen_exact = elen_exact
        self.elen = np.array([float(x) for x in elen_exact])
        self.name = name

        self.dmat_exact = self._floyd_warshall()
        self.dmat = np.array([[float(x) for x in row] for row in self.dmat_exact])
        self._diam_exact = None

    # ---------------------------------------------------------- skeleton

    def _floyd_warshall(self):
        n = self.nv
        inf = None
        d = [[None] * n for _ in range(n)]
        for i in range(n):
            d[i][i] = Fraction(0)
        for e in range(self.ne):
            u, v, ln = int(self.eu[e]), int(self.ev[e]), self.elen_exact[e]
            if u == v:
                continue
            if d[u][v] is None or ln < d[u][v]:
                d[u][v] = ln
                d[v][u] = ln
        for k in range(n):
            dk = d[k]
            for i in range(n):
                dik = d[i][k]
                if dik is inf:
                    continue
                di = d[i]
                for j in range(n):
                    if dk[j] is inf:
                        continue
                    via = dik + dk[j]
                    if di[j] is inf or via < di[j]:
                        di[j] = via
        if any(x is inf for row in d for x in row):
            raise InvalidSpaceError("graph is not connected")
        return d

    def first_betti(self):
        return self.ne - self.nv + 1

    def is_single_edge_path(self):
        return self.nv == 2 and self.ne == 1 and self.eu[0] != self.ev[0]

    # ------------------------------------------------------------ points

    def vertex(self, v) -> GraphPoint:
        if isinstance(v, str):
            v = self.vertex_names.index(v)
        if not 0 <= v < self.nv:
            raise SpaceMismatchError(f"vertex {v} out of range")
        return GraphPoint(vertex=int(v))

    def point(self, edge, offset) -> GraphPoint:
        """Canonicalized edge point: endpoint offsets become vertices."""
        if not 0 <= edge < self.ne:
            raise SpaceMismatchError(f"edge {edge} out of range")
        exact = isinstance(offset, (int, Fraction))
        ln = self.elen_exact[edge] if exact else float(self.elen[edge])
        tol = 0 if exact else EPS_LEN
        if offset < -tol or offset > ln + tol:
            raise SpaceMismatchError("offset outside the edge")
        if offset <= tol:
            return GraphPoint(vertex=int(self.eu[edge]))
        if offset >= ln - tol:
            return GraphPoint(vertex=int(self.ev[edge]))
        return GraphPoint(edge=int(edge), offset=offset)

    def check_point(self, p):
        super().check_point(p)
        if p.vertex is None and p.edge is None:
            raise SpaceMismatchError("graph point needs a vertex or an edge")

    def _ends(self, p, exact):
        """(vertex, cost) pairs for the routes leaving through each end."""
        if p.vertex is not None:
            zero = Fraction(0) if exact else 0.0
            return [(int(p.vertex), zero)]
        off = _as_fraction(p.offset) if exact else float(p.offset)
        ln = self.elen_exact[p.edge] if exact else float(self.elen[p.edge])
        return [(int(self.eu[p.edge]), off), (int(self.ev[p.edge]), ln - off)]

    def _dist(self, p, q, exact):
        d = self.dmat_exact if exact else self.dmat
        best = None
        for a, ca in self._ends(p, exact):
            for b, cb in self._ends(q, exact):
                val = ca + d[a][b] + cb if exact else ca + d[a, b] + cb
                if best is None or val < best:
                    best = val
        if p.edge is not None and p.edge == q.edge:
            off_p = _as_fraction(p.offset) if exact else float(p.offset)
            off_q = _as_fraction(q.offset) if exact else float(q.offset)
            best = min(best, abs(off_p - off_q))
        return best

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        return float(self._dist(p, q, exact=False))

    def distance_exact(self, p, q) -> Fraction:
        self.check_point(p)
        self.check_point(q)
        return self._dist(p, q, exact=True)

    # --------------------------------------------------- packed interface

    def pack(self, points):
        n = len(points)
        e1 = np.empty(n, dtype=np.int64)
        c1 = np.empty(n)
        e2 = np.empty(n, dtype=np.int64)
        c2 = np.empty(n)
        ide = np.empty(n, dtype=np.int64)
        off = np.empty(n)
        for i, p in enumerate(points):
            if p.vertex is not None:
                e1[i] = e2[i] = p.vertex
                c1[i] = c2[i] = 0.0
                ide[i] = -1
                off[i] = 0.0
            else:
                e = p.edge
                o = float(p.offset)
                e1[i], c1[i] = self.eu[e], o
                e2[i], c2[i] = self.ev[e], self.elen[e] - o
                ide[i], off[i] = e, o
        return (e1, c1, e2, c2, ide, off)

    def pdist(self, packed_a, packed_b):
        return kernels.graph_pdist(packed_a, packed_b, self.dmat)

    def pair_dist(self, packed_a, packed_b):
        return kernels.graph_dist(*packed_a, *packed_b, self.dmat)

    def random_point(self, rng):
        w = self.elen / self.elen.sum()
        e = int(rng.choice(self.ne, p=w))
        return self.point(e, float(rng.uniform(0.0, self.elen[e])))

    # ------------------------------------------------- diameter and radius

    def probe_points(self, density):
        if density <= 0:
            raise ValueError("probe density must be positive")
        pts = [self.vertex(i) for i in range(self.nv)]
        for e in range(self.ne):
            ln = float(self.elen[e])
            n = max(1, math.ceil(ln / density))
            for j in range(1, n):
                pts.append(self.point(e, j * ln / n))
        return pts

    def _pair_candidates(self, e, f, exact=True):
        d = self.dmat_exact if exact else self.dmat
        u1, v1 = int(self.eu[e]), int(self.ev[e])
        u2, v2 = int(self.eu[f]), int(self.ev[f])
        l1 = self.elen_exact[e] if exact else float(self.elen[e])
        l2 = self.elen_exact[f] if exact else float(self.elen[f])
        dd = (lambda a, b: d[a][b]) if exact else (lambda a, b: d[a, b])
        one = Fraction(1) if exact else 1.0
        cands = [
            (one, one, dd(u1, u2)),
            (one, -one, dd(u1, v2) + l2),
            (-one, one, dd(v1, u2) + l1),
            (-one, -one, dd(v1, v2) + l1 + l2),
        ]
        return cands, l1, l2, one

    def diameter(self, probe_density=None):
        return float(self.diameter_exact())

    def diameter_exact(self) -> Fraction:
        """Exact sup of pairwise distances via per-edge-pair PL maximization."""
        if self._diam_exact is not None:
            return self._diam_exact
        zero = Fraction(0)
        best = zero
        for e in range(self.ne):
            for f in range(e, self.ne):
                cands, l1, l2, one = self._pair_candidates(e, f)
                box = [(-one, zero, zero), (one, zero, l1),
                       (zero, -one, zero), (zero, one, l2)]
                if e == f:
                    # |s - t| candidate: split the square along s = t
                    for extra_cand, extra_con in (((-one, one, zero), (one, -one, zero)),
                                                  ((one, -one, zero), (-one, one, zero))):
                        val, _ = maxmin_linear_2d(cands + [extra_cand],
                                                  box + [extra_con])
                        if val is not None and val > best:
                            best = val
                else:
                    val, _ = maxmin_linear_2d(cands, box)
                    if val is not None and val > best:
                        best = val
        self._diam_exact = best
        return best

    def _sup_dist_from(self, p):
        """Exact sup_q d(p, q); p may be any graph point."""
        ends = self._ends(p, exact=True)
        zero = Fraction(0)
        best = zero
        for f in range(self.ne):
            u2, v2 = int(self.eu[f]), int(self.ev[f])
            l2 = self.elen_exact[f]
            cands = []
            for a, ca in ends:
                cands.append((Fraction(1), ca + self.dmat_exact[a][u2]))
                cands.append((Fraction(-1), ca + self.dmat_exact[a][v2] + l2))
            if p.edge is not None and p.edge == f:
                s = _as_fraction(p.offset)
                lo_val, _ = maxmin_linear_1d(cands + [(Fraction(-1), s)], zero, s)
                hi_val, _ = maxmin_linear_1d(cands + [(Fraction(1), -s)], s, l2)
                val = max(v for v in (lo_val, hi_val) if v is not None)
            else:
                val, _ = maxmin_linear_1d(cands, zero, l2)
            if val is not None and val > best:
                best = val
        return best

    def radius(self, probe_density=None):
        """inf over a probe grid of the exact farthest-point distance."""
        if probe_density is None:
            probe_density = float(self.elen.min()) / 4
        best = None
        for p in self.probe_points(probe_density):
            val = self._sup_dist_from(p)
            if best is None or val < best:
                best = val
        return float(best)

    # --------------------------------------------------- paths and cycles

    def _adjacency(self):
        adj = [[] for _ in range(self.nv)]
        for e in range(self.ne):
            u, v = int(self.eu[e]), int(self.ev[e])
            adj[u].append((v, e))
            if u != v:
                adj[v].append((u, e))
        return adj

    def shortest_vertex_path(self, a, b, skip_edge=None):
        """Exact Dijkstra; returns (dist, [(edge, dir), ...]) or (None, None)."""
        dist = [None] * self.nv
        parent = [None] * self.nv  # (prev vertex, edge, dir)
        dist[a] = Fraction(0)
        heap = [(Fraction(0), a)]
        adj = self._adjacency()
        done = [False] * self.nv
        while heap:
            da, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, e in adj[u]:
                if e == skip_edge or u == v:
                    continue
                nd = da + self.elen_exact[e]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    parent[v] = (u, e, 1 if int(self.eu[e]) == u else -1)
                    heapq.heappush(heap, (nd, v))
        if dist[b] is None:
            return None, None
        path = []
        v = b
        while v != a:
            u, e, dr = parent[v]
            path.append((e, dr))
            v = u
        path.reverse()
        return dist[b], path

    def count_shortest_vertex_paths(self, a, b, cap=4):
        """Number of shortest a->b walks over the skeleton, capped."""
        dist = [self.dmat_exact[a][j] for j in range(self.nv)]
        order = sorted(range(self.nv), key=lambda j: dist[j])
        count = [0] * self.nv
        count[a] = 1
        for v in order:
            if v == a:
                continue
            total = 0
            for e in range(self.ne):
                u1, v1 = int(self.eu[e]), int(self.ev[e])
                ln = self.elen_exact[e]
                for u, w in ((u1, v1), (v1, u1)):
                    if w == v and u != v and dist[u] + ln == dist[v]:
                        total += count[u]
            count[v] = min(total, cap)
        return count[b]

    def shortest_cycle(self):
        """Shortest non-backtracking closed walk: (exact length, walk) or (None, None)."""
        best = None
        best_walk = None
        for e in range(self.ne):
            u, v = int(self.eu[e]), int(self.ev[e])
            if u == v:
                ln = self.elen_exact[e]
                if best is None or ln < best:
                    best, best_walk = ln, [(e, 1)]
                continue
            d, path = self.shortest_vertex_path(v, u, skip_edge=e)
            if d is None:
                continue
            total = d + self.elen_exact[e]
            if best is None or total < best:
                best, best_walk = total, [(e, 1)] + path
        return best, best_walk

    def label(self):
        return self.name or f"graph:{self.nv}v{self.ne}e"

    @classmethod
    def from_json(cls, data, name=None):
        """{"vertices": ["v1", ...], "edges": [{"a": ..., "b": ..., "len": ...}]}"""
        vertices = data["vertices"]
        edges = [(e["a"], e["b"], e["len"]) for e in data["edges"]]
        return cls(vertices, edges, name=name)

    def to_json(self):
        return {
            "vertices": list(self.vertex_names),
            "edges": [{"a": self.vertex_names[int(self.eu[e])],
                       "b": self.vertex_names[int(self.ev[e])],
                       "len": float(self.elen[e])}
                      for e in range(self.ne)],
        }


def interval_graph(length=1.0) -> MetricGraph:
    """The interval [0, length] as a two-vertex metric graph."""
    return MetricGraph(["a", "b"], [("a", "b", length)], name="interval")
