"""Closed constant-speed curves and their geodesy checks.

A curve is a cyclic breakpoint chain joined by minimizing segments,
parametrized with constant speed L/(2pi) over [0, 2pi).  The central
check is the chord condition d(c(t), c(t+2pi/k)) = L/k for all t,
discharged on a parameter grid with a Lipschitz certificate, or exactly
(piecewise linear analysis) on metric graphs.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .defaults import DELTA_DEFAULT, DELTA_FLOOR, EPS_LEN, K_MAX_DEFAULT
from .errors import (AmbiguousSegmentError, InvalidSpaceError,
                     SpaceMismatchError, UnsupportedOperationError)
from .graphspace import MetricGraph, _as_fraction
from .spaces import Circle, FlatTorus, RoundSphere, SpherePoint

TWO_PI = 2.0 * math.pi


@dataclass
class CheckResult:
    """Outcome of a certified chord check at one k."""

    status: str          # "holds" | "violated" | "undecided"
    margin: float        # L/k - min g over the inspected grid
    t_star: float | None
    delta: float         # final grid step (0.0 for exact checks)
    tol_cert: float
    exact: bool = False

    @property
    def holds(self):
        return self.status == "holds"

    @property
    def violated(self):
        return self.status == "violated"


# ------------------------------------------------------ segment builders

def _circle_segment(space, p, q, witness):
    c = space.circumference
    if witness is not None:
        arc = float(witness)
        if abs((p.pos + arc - q.pos) % c) > EPS_LEN and \
           abs(c - (p.pos + arc - q.pos) % c) > EPS_LEN:
            raise AmbiguousSegmentError("circle witness arc does not reach the endpoint")
        if abs(arc) > 0.5 * c + EPS_LEN:
            raise AmbiguousSegmentError("circle witness arc is not minimal")
        return abs(arc), arc
    delta = (q.pos - p.pos) % c
    if abs(delta - 0.5 * c) <= EPS_LEN:
        raise AmbiguousSegmentError(
            "antipodal circle breakpoints: supply a signed arc witness")
    arc = delta if delta < 0.5 * c else delta - c
    return abs(arc), arc


def _torus_segment(space, p, q, witness):
    circ = space.circ
    if witness is not None:
        arcs = np.asarray(witness, dtype=np.float64)
        if arcs.shape != (space.m,):
            raise AmbiguousSegmentError("torus witness must give one arc per factor")
        for i in range(space.m):
            residue = (p.pos[i] + arcs[i] - q.pos[i]) % circ[i]
            if min(residue, circ[i] - residue) > EPS_LEN:
                raise AmbiguousSegmentError("torus witness does not reach the endpoint")
            if abs(arcs[i]) > 0.5 * circ[i] + EPS_LEN:
                raise AmbiguousSegmentError("torus witness arc is not minimal")
    else:
        arcs = np.empty(space.m)
        for i in range(space.m):
            delta = (q.pos[i] - p.pos[i]) % circ[i]
            if abs(delta - 0.5 * circ[i]) <= EPS_LEN:
                raise AmbiguousSegmentError(
                    "antipodal factor coordinate: supply a lift witness")
            arcs[i] = delta if delta < 0.5 * circ[i] else delta - circ[i]
    return float(np.linalg.norm(arcs)), arcs


def _sphere_segment(space, p, q, witness):
    u = np.array(p.vec)
    v = np.array(q.vec)
    theta = math.acos(float(np.clip(u @ v, -1.0, 1.0)))
    if witness is not None:
        w = np.asarray(witness.vec if isinstance(witness, SpherePoint) else witness,
                       dtype=np.float64)
        w = w / np.linalg.norm(w)
        t1 = math.acos(float(np.clip(u @ w, -1.0, 1.0)))
        t2 = math.acos(float(np.clip(w @ v, -1.0, 1.0)))
        # arccos resolves angles near pi only to ~sqrt(eps)
        if abs((t1 + t2) - theta) > 1e-6:
            raise AmbiguousSegmentError("sphere witness is not on a minimizing arc")
        return t1 + t2, [(u, w, t1), (w, v, t2)]
    if theta >= math.pi - 1e-7:
        # also keeps slerp away from the 1/sin(theta) blowup
        raise AmbiguousSegmentError(
            "antipodal sphere breakpoints: supply a via-point witness")
    return theta, [(u, v, theta)]


def _graph_segment(space, p, q, witness):
    """Pieces [(edge, o_from, o_to)] of a minimizing path, exact offsets."""
    d = space.distance_exact(p, q)
    if d == 0:
        raise InvalidSpaceError("repeated consecutive breakpoints")
    if witness is not None:
        pieces = _pieces_from_walk(space, p, q, witness)
        total = sum(abs(b - a) for _, a, b in pieces)
        if total != d:
            raise AmbiguousSegmentError(
                f"witness walk has length {total}, distance is {d}")
        return float(d), pieces

    def ends_with_target(pt):
        # (vertex, cost, offset of that end), loops keep both entries
        if pt.vertex is not None:
            return [(int(pt.vertex), Fraction(0), None)]
        off = _as_fraction(pt.offset)
        ln = space.elen_exact[pt.edge]
        return [(int(space.eu[pt.edge]), off, Fraction(0)),
                (int(space.ev[pt.edge]), ln - off, ln)]

    routes = []
    if p.edge is not None and p.edge == q.edge:
        o1, o2 = _as_fraction(p.offset), _as_fraction(q.offset)
        if abs(o1 - o2) == d:
            routes.append(((p.edge, o1, o2),))
    for a, ca, target in ends_with_target(p):
        for b, cb, start in ends_with_target(q):
            if ca + space.dmat_exact[a][b] + cb != d:
                continue
            if space.count_shortest_vertex_paths(a, b) > 1:
                raise AmbiguousSegmentError(
                    "multiple shortest skeleton paths: supply an edge-walk witness")
            _, walk = space.shortest_vertex_path(a, b)
            pieces = []
            if p.edge is not None and target != _as_fraction(p.offset):
                pieces.append((p.edge, _as_fraction(p.offset), target))
            for e, dr in walk:
                ln = space.elen_exact[e]
                pieces.append((e, Fraction(0), ln) if dr == 1 else (e, ln, Fraction(0)))
            if q.edge is not None and start != _as_fraction(q.offset):
                pieces.append((q.edge, start, _as_fraction(q.offset)))
            routes.append(tuple(pieces))
    distinct = sorted(set(routes))
    if not distinct:
        raise InvalidSpaceError("no minimizing route found (internal error)")
    if len(distinct) > 1:
        raise AmbiguousSegmentError(
            "minimizing segment is not unique: supply an edge-walk witness")
    return float(d), list(distinct[0])


def _pieces_from_walk(space, p, q, walk):
    """Expand an edge walk [(edge, dir), ...] between two graph points."""
    pieces = []
    if p.edge is not None:
        raise AmbiguousSegmentError(
            "edge-walk witnesses require vertex breakpoints")
    cur = p.vertex
    for e, dr in walk:
        u, v = int(space.eu[e]), int(space.ev[e])
        ln = space.elen_exact[e]
        if dr == 1:
            if cur != u:
                raise AmbiguousSegmentError("witness walk is not connected")
            pieces.append((e, Fraction(0), ln))
            cur = v
        else:
            if cur != v:
                raise AmbiguousSegmentError("witness walk is not connected")
            pieces.append((e, ln, Fraction(0)))
            cur = u
    if q.vertex is None or cur != q.vertex:
        raise AmbiguousSegmentError("witness walk does not end at the breakpoint")
    return pieces


def _mesh_segment(space, p, q, witness):
    poly = space.shortest_polyline(p, q)
    length = 0.0
    for i in range(len(poly) - 1):
        length += float(np.linalg.norm(np.array(poly[i + 1][0]) - np.array(poly[i][0])))
    return length, poly


# ------------------------------------------------------------- the curve

class ClosedCurve:
    """Cyclic breakpoint chain with minimizing segments, speed L/(2pi)."""

    def __init__(self, space, breakpoints, witnesses=None):
        if len(breakpoints) < 1:
            raise InvalidSpaceError("a closed curve needs at least one breakpoint")
        for p in breakpoints:
            space.check_point(p)
        if witnesses is not None and len(witnesses) != len(breakpoints):
            raise InvalidSpaceError("need one witness slot per segment")
        self.space = space
        self.breakpoints = list(breakpoints)
        self.witnesses = list(witnesses) if witnesses is not None else None
        self._build()

    @classmethod
    def from_edge_walk(cls, graph, walk):
        """Closed curve tracing [(edge, +-1), ...]; may backtrack."""
        if not isinstance(graph, MetricGraph):
            raise SpaceMismatchError("edge walks require a metric graph")
        if not walk:
            raise InvalidSpaceError("empty walk")
        verts = []
        cur = int(graph.eu[walk[0][0]]) if walk[0][1] == 1 else int(graph.ev[walk[0][0]])
        for e, dr in walk:
            u, v = int(graph.eu[e]), int(graph.ev[e])
            a, b = (u, v) if dr == 1 else (v, u)
            if a != cur:
                raise InvalidSpaceError("walk is not vertex-connected")
            verts.append(cur)
            cur = b
        if cur != verts[0]:
            raise InvalidSpaceError("walk is not closed")
        obj = cls.__new__(cls)
        obj.space = graph
        obj.breakpoints = [graph.vertex(v) for v in verts]
        obj.witnesses = None
        obj.walk = [(int(e), int(dr)) for e, dr in walk]
        pieces = []
        for e, dr in obj.walk:
            ln = graph.elen_exact[e]
            pieces.append((e, Fraction(0), ln) if dr == 1 else (e, ln, Fraction(0)))
        obj._assemble_graph(pieces, seg_piece_counts=[1] * len(pieces))
        return obj

    # ------------------------------------------------------------ build

    def _build(self):
        space = self.space
        n = len(self.breakpoints)
        wit = self.witnesses or [None] * n
        pairs = [(self.breakpoints[i], self.breakpoints[(i + 1) % n], wit[i])
                 for i in range(n)]
        if isinstance(space, Circle):
            arcs, lens = [], []
            for p, q, w in pairs:
                ln, arc = _circle_segment(space, p, q, w)
                if ln <= 0:
                    raise InvalidSpaceError("repeated consecutive breakpoints")
                arcs.append(arc)
                lens.append(ln)
            self.kind = kernels.KIND_CIRCLE
            self.walk = None
            self.seg_lengths = np.array(lens)
            self.length = float(self.seg_lengths.sum())
            cum = np.concatenate([[0.0], np.cumsum(self.seg_lengths)])
            lift = np.concatenate([[self.breakpoints[0].pos],
                                   self.breakpoints[0].pos + np.cumsum(arcs)])
            self._kdata = (cum, lift, space.circumference, self.length)
            self._node_cums = cum
        elif isinstance(space, FlatTorus):
            arcs, lens = [], []
            for p, q, w in pairs:
                ln, arc = _torus_segment(space, p, q, w)
                if ln <= 0:
                    raise InvalidSpaceError("repeated consecutive breakpoints")
                arcs.append(arc)
                lens.append(ln)
            self.kind = kernels.KIND_TORUS
            self.walk = None
            self.seg_lengths = np.array(lens)
            self.length = float(self.seg_lengths.sum())
            cum = np.concatenate([[0.0], np.cumsum(self.seg_lengths)])
            start = np.array(self.breakpoints[0].pos)
            lifts = np.vstack([start, start + np.cumsum(np.vstack(arcs), axis=0)])
            self._kdata = (cum, lifts, space.circ, self.length)
            self._node_cums = cum
        elif isinstance(space, RoundSphere):
            if space.dim != 2:
                raise UnsupportedOperationError("curves implemented on S^2 only")
            nodes, thetas, lens = [], [], []
            for p, q, w in pairs:
                ln, subarcs = _sphere_segment(space, p, q, w)
                if ln <= 0:
                    raise InvalidSpaceError("repeated consecutive breakpoints")
                lens.append(ln)
                for u, v, th in subarcs:
                    nodes.append(u)
                    thetas.append(th)
            nodes.append(np.array(self.breakpoints[0].vec))
            self.kind = kernels.KIND_SPHERE
            self.walk = None
            self.seg_lengths = np.array(lens)
            self.length = float(self.seg_lengths.sum())
            th = np.array(thetas)
            cum = np.concatenate([[0.0], np.cumsum(th)])
            self._kdata = (cum, np.vstack(nodes), th, self.length)
            self._node_cums = np.concatenate([[0.0], np.cumsum(self.seg_lengths)])
        elif isinstance(space, MetricGraph):
            pieces = []
            counts = []
            for p, q, w in pairs:
                _, segp = _graph_segment(space, p, q, w)
                pieces.extend(segp)
                counts.append(len(segp))
            self._assemble_graph(pieces, counts)
            self.walk = None
        elif space.kind == "mesh":
            polys, lens = [], []
            for p, q, w in pairs:
                ln, poly = _mesh_segment(space, p, q, w)
                if ln <= 0:
                    raise InvalidSpaceError("repeated consecutive breakpoints")
                lens.append(ln)
                polys.append(poly)
            self.kind = None
            self.walk = None
            self.seg_lengths = np.array(lens)
            self.length = float(self.seg_lengths.sum())
            self._polylines = polys
            self._build_mesh_nodes()
        else:
            raise UnsupportedOperationError(f"curves unsupported on {space.kind}")

    def _assemble_graph(self, pieces, seg_piece_counts):
        g = self.space
        self.kind = kernels.KIND_GRAPH
        self._graph_pieces = [(int(e), _as_fraction(a), _as_fraction(b))
                              for e, a, b in pieces]
        plen = [abs(b - a) for _, a, b in self._graph_pieces]
        self.exact_length = sum(plen, Fraction(0))
        self.exact_cums = [Fraction(0)]
        for ln in plen:
            self.exact_cums.append(self.exact_cums[-1] + ln)
        # float mirrors
        piece_len = np.array([float(x) for x in plen])
        self.length = float(self.exact_length)
        cum = np.concatenate([[0.0], np.cumsum(piece_len)])
        eidx = np.array([e for e, _, _ in self._graph_pieces], dtype=np.int64)
        soff = np.array([float(a) for _, a, _ in self._graph_pieces])
        sgn = np.array([1.0 if b > a else -1.0 for _, a, b in self._graph_pieces])
        self._kdata = (cum, eidx, soff, sgn, g.eu, g.ev, g.elen, g.dmat, self.length)
        self._node_cums = cum
        # per-breakpoint segment lengths
        lens, i = [], 0
        for cnt in seg_piece_counts:
            lens.append(float(sum(plen[i:i + cnt], Fraction(0))))
            i += cnt
        self.seg_lengths = np.array(lens)

    def _build_mesh_nodes(self):
        pts, cums = [], [0.0]
        for poly in self._polylines:
            for i in range(len(poly) - 1):
                pts.append(poly[i])
                step = float(np.linalg.norm(np.array(poly[i + 1][0]) - np.array(poly[i][0])))
                cums.append(cums[-1] + step)
        pts.append(self._polylines[0][0])
        self._mesh_nodes = pts         # [(xyz, node_id or None), ...]
        self._node_cums = np.array(cums)

    # ------------------------------------------------------------- eval

    @property
    def speed(self):
        return self.length / TWO_PI

    def _arc(self, t):
        return (np.asarray(t, dtype=np.float64) * self.speed) % self.length

    def eval(self, t):
        """Point at parameter t (reduced mod 2pi)."""
        a = np.atleast_1d(self._arc(t))
        space = self.space
        if self.kind == kernels.KIND_CIRCLE:
            pos = kernels.circle_eval(self._kdata[0], self._kdata[1], a)
            pts = [space.point(x) for x in pos]
        elif self.kind == kernels.KIND_TORUS:
            xs = kernels.torus_eval(self._kdata[0], self._kdata[1], space.circ, a)
            pts = [space.point(row) for row in xs]
        elif self.kind == kernels.KIND_SPHERE:
            xs = kernels.sphere_eval(self._kdata[0], self._kdata[1], self._kdata[2], a)
            pts = [space.point(row) for row in xs]
        elif self.kind == kernels.KIND_GRAPH:
            es, offs = kernels.graph_eval(*self._kdata[:4], a)
            pts = [space.point(int(e), min(max(o, 0.0), float(space.elen[e])))
                   for e, o in zip(es, offs)]
        else:
            pts = [self._mesh_eval(x) for x in a]
        return pts[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else pts

    def _mesh_eval(self, a):
        cums = self._node_cums
        j = min(max(bisect.bisect_right(cums, a) - 1, 0), len(self._mesh_nodes) - 2)
        seg = cums[j + 1] - cums[j]
        f = (a - cums[j]) / seg if seg > 0 else 0.0
        x0, n0 = self._mesh_nodes[j]
        x1, n1 = self._mesh_nodes[j + 1]
        xyz = (1 - f) * np.array(x0) + f * np.array(x1)
        return self.space.surface_point(xyz, hint_nodes=(n0, n1))

    def chord(self, t, shift_len):
        """d(c(t), c(t + 2pi*shift_len/L)) for parameter array t."""
        a = self._arc(t)
        if self.kind is not None:
            return kernels.chord_eval(self.kind, self._kdata, a, shift_len)
        s = np.broadcast_to(np.asarray(shift_len, dtype=np.float64), a.shape)
        return np.array([self.space.polyline_distance(self._mesh_point_at(x),
                                                      self._mesh_point_at((x + si) % self.length))
                         for x, si in zip(np.atleast_1d(a), np.atleast_1d(s))])

    def _mesh_point_at(self, a):
        cums = self._node_cums
        j = min(max(bisect.bisect_right(cums, a) - 1, 0), len(self._mesh_nodes) - 2)
        seg = cums[j + 1] - cums[j]
        f = (a - cums[j]) / seg if seg > 0 else 0.0
        x0, n0 = self._mesh_nodes[j]
        x1, n1 = self._mesh_nodes[j + 1]
        xyz = (1 - f) * np.array(x0) + f * np.array(x1)
        return (xyz, (n0, n1), (float(np.linalg.norm(xyz - np.array(x0))),
                                float(np.linalg.norm(xyz - np.array(x1)))))

    # ------------------------------------------------------------ checks

    def _grid(self, delta, shift_param=None):
        base = np.arange(0.0, TWO_PI, delta)
        nodes = self._node_cums / self.speed
        parts = [base, nodes % TWO_PI]
        if shift_param is not None:
            parts.append((nodes - shift_param) % TWO_PI)
        return np.unique(np.concatenate(parts))

    def _hold_slack(self):
        return (EPS_LEN + getattr(self.space, "oracle_eps", 0.0)
                + getattr(self.space, "metric_slack", 0.0))

    def check_one_over_k(self, k, delta=None, floor=None) -> CheckResult:
        """Certified test of the 1/k chord condition."""
        if k < 2:
            raise ValueError("k must be at least 2")
        if self.kind == kernels.KIND_GRAPH:
            return self._check_exact(k)
        delta = DELTA_DEFAULT if delta is None else float(delta)
        floor = DELTA_FLOOR if floor is None else float(floor)
        if delta <= 0 or floor <= 0:
            raise ValueError("grid steps must be positive")
        target = self.length / k
        slack = self._hold_slack()
        best = math.inf
        best_t = None
        while True:
            t = self._grid(delta, shift_param=TWO_PI / k)
            g = self.chord(t, target)
            if g.max() > target + slack + 1e-12 * self.length:
                raise InvalidSpaceError(
                    "chord exceeded the arclength bound: inconsistent metric")
            i = int(np.argmin(g))
            if g[i] < best:
                best, best_t = float(g[i]), float(t[i])
            tol_cert = (self.length / math.pi) * delta
            if best < target - tol_cert:
                return CheckResult("violated", target - best, best_t, delta, tol_cert)
            if best >= target - slack:
                return CheckResult("holds", max(0.0, target - best), best_t,
                                   delta, tol_cert)
            if delta <= floor * (1 + 1e-12):
                return CheckResult("undecided", target - best, best_t, delta, tol_cert)
            delta *= 0.5

    def _check_exact(self, k) -> CheckResult:
        length = self.exact_length
        h = length / k
        cums = self.exact_cums
        events = set()
        for c in cums:
            events.add(c % length)
            events.add((c - h) % length)
        ev = sorted(events)
        ev.append(ev[0] + length)
        g = self.space
        pieces = self._graph_pieces
        best = None
        best_a = None

        def point_at(a):
            a = a % length
            j = bisect.bisect_right(cums, a) - 1
            j = min(max(j, 0), len(pieces) - 1)
            e, o_from, o_to = pieces[j]
            sgn = 1 if o_to > o_from else -1
            return g.point(e, o_from + sgn * (a - cums[j])), j

        for i in range(len(ev) - 1):
            a0, a1 = ev[i], ev[i + 1]
            if a1 == a0:
                continue
            mid = (a0 + a1) / 2
            _, jx = point_at(mid)
            _, jy = point_at(mid + h)
            samples = [a0, a1]
            ex, xf, xt = pieces[jx]
            ey, yf, yt = pieces[jy]
            if ex == ey:
                sx = 1 if xt > xf else -1
                sy = 1 if yt > yf else -1
                if sx != sy:
                    # offsets cross: ox(a) = oy(a) pinpoints the dip of |ox-oy|
                    ox0 = xf + sx * (mid - cums[jx])
                    oy0 = yf + sy * ((mid + h) % length - cums[jy])
                    astar = mid + (oy0 - ox0) / (sx - sy)
                    if a0 < astar < a1:
                        samples.append(astar)
            for a in samples:
                px, _ = point_at(a)
                py, _ = point_at(a + h)
                d = g.distance_exact(px, py)
                if best is None or d < best:
                    best, best_a = d, a
        assert best <= h, "chord exceeded the arclength bound"
        t_star = float(best_a % length) / float(length) * TWO_PI
        if best == h:
            return CheckResult("holds", 0.0, t_star, 0.0, 0.0, exact=True)
        return CheckResult("violated", float(h - best), t_star, 0.0, 0.0, exact=True)

    def minimizing_index(self, k_max=K_MAX_DEFAULT, delta=None):
        """Smallest k in [2, k_max] passing the 1/k check, else None."""
        for k in range(2, k_max + 1):
            if self.check_one_over_k(k, delta=delta).holds:
                return k
        return None

    def injectivity_radius(self, delta=None):
        """inf over grid basepoints of the largest minimality span (arclength)."""
        delta = self._default_delta() if delta is None else float(delta)
        if delta <= 0:
            raise ValueError("grid step must be positive")
        t = self._grid(delta)
        a = self._arc(t)
        slack = self._hold_slack()
        if self.kind is not None:
            h = kernels.injrad_scan(self.kind, self._kdata, a, self.length, slack, 50)
            return float(h.min())
        best = 0.5 * self.length
        for ai in a:
            best = min(best, self._mesh_h(ai, slack))
        return best

    def _mesh_h(self, a, slack):
        half = 0.5 * self.length
        if self.chord(np.array([a / self.speed]), half)[0] >= half - slack:
            return half
        lo, hi = 0.0, half
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            if self.chord(np.array([a / self.speed]), mid)[0] >= mid - slack:
                lo = mid
            else:
                hi = mid
        return lo

    def _default_delta(self):
        return DELTA_DEFAULT if self.kind is not None else TWO_PI / 128

    def injrad_certificate(self, delta=None):
        delta = self._default_delta() if delta is None else float(delta)
        return (self.length / math.pi) * delta

    def is_openly(self, k, delta=None):
        """1/k holds and the curve injectivity radius strictly exceeds L/k."""
        if k < 2:
            raise ValueError("k must be at least 2")
        res = self.check_one_over_k(k, delta=delta)
        if not res.holds:
            return False
        tol = self.injrad_certificate(delta)
        return self.injectivity_radius(delta) > self.length / k + tol

    def iterate(self, n):
        """Curve of length n*L traversing the breakpoint cycle n times."""
        if n < 1 or int(n) != n:
            raise ValueError("iteration count must be a positive integer")
        n = int(n)
        if n == 1:
            return self
        if self.kind == kernels.KIND_GRAPH:
            obj = ClosedCurve.__new__(ClosedCurve)
            obj.space = self.space
            obj.breakpoints = self.breakpoints * n
            obj.witnesses = None
            obj.walk = self.walk * n if self.walk is not None else None
            counts = [1] * (len(self._graph_pieces) * n)
            obj._assemble_graph(self._graph_pieces * n, counts)
            return obj
        wit = self._iteration_witnesses()
        return ClosedCurve(self.space, self.breakpoints * n,
                           wit * n if wit is not None else None)

    def _iteration_witnesses(self):
        space = self.space
        n = len(self.breakpoints)
        if self.kind == kernels.KIND_CIRCLE:
            cum, lift = self._kdata[0], self._kdata[1]
            return [lift[i + 1] - lift[i] for i in range(n)]
        if self.kind == kernels.KIND_TORUS:
            lifts = self._kdata[1]
            return [lifts[i + 1] - lifts[i] for i in range(n)]
        return self.witnesses

    def is_closed_geodesic(self, delta=None):
        """Locally length minimizing everywhere, per the chord test."""
        min_span = float(self.seg_lengths.min())
        k = max(2, math.ceil(self.length / min_span))
        return self.check_one_over_k(k, delta=delta).holds

    # ----------------------------------------------------- identification

    def eval_packed(self, t):
        pts = self.eval(np.atleast_1d(np.asarray(t, dtype=np.float64)))
        if not isinstance(pts, list):
            pts = [pts]
        return self.space.pack(pts)

    def param_nearest(self, point, coarse=512, refine=60):
        """Parameters (t, dist) of local closest approaches to a point."""
        nodes = (self._node_cums / self.speed) % TWO_PI
        grid = np.unique(np.concatenate(
            [np.linspace(0.0, TWO_PI, coarse, endpoint=False), nodes]))
        d = self.space.pair_dist(self.eval_packed(grid),
                                 self.space.pack([point] * len(grid)))
        lip_slack = (self.length / math.pi) * (TWO_PI / coarse)
        keep = np.where(d <= d.min() + lip_slack)[0]
        # cluster contiguous grid indices, refine each bracket by ternary search
        out = []
        cluster = [keep[0]]
        for i in keep[1:]:
            if i == cluster[-1] + 1:
                cluster.append(i)
            else:
                out.append(self._refine_nearest(grid, cluster, point, refine))
                cluster = [i]
        out.append(self._refine_nearest(grid, cluster, point, refine))
        return sorted(out, key=lambda p: p[1])

    def _refine_nearest(self, grid, cluster, point, iters):
        n = len(grid)
        lo = grid[(cluster[0] - 1) % n] - (TWO_PI if cluster[0] == 0 else 0.0)
        hi_i = (cluster[-1] + 1) % n
        hi = grid[hi_i] + (TWO_PI if hi_i == 0 else 0.0)
        pk = self.space.pack([point])

        def f(t):
            return float(self.space.pair_dist(self.eval_packed([t]), pk)[0])

        a, b = lo, hi
        for _ in range(iters):
            m1 = a + (b - a) / 3
            m2 = b - (b - a) / 3
            if f(m1) <= f(m2):
                b = m2
            else:
                a = m1
        t = 0.5 * (a + b)
        return t % TWO_PI, f(t)

    def same_geodesic(self, other, tol=1e-6, orientation_matters=True):
        """Same curve image with matching constant-speed parametrization,
        up to a parameter rotation (and optionally a reversal)."""
        if self.space is not other.space:
            return False
        if abs(self.length - other.length) > tol:
            return False
        base = other.eval(0.0)
        tgrid = np.unique(np.concatenate(
            [np.linspace(0.0, TWO_PI, 32, endpoint=False),
             (other._node_cums / other.speed) % TWO_PI]))
        other_pk = other.eval_packed(tgrid)
        orientations = (1.0,) if orientation_matters else (1.0, -1.0)
        for t0, d0 in self.param_nearest(base):
            if d0 > tol:
                break
            for o in orientations:
                mine = self.eval_packed(t0 + o * tgrid)
                if float(self.space.pair_dist(mine, other_pk).max()) <= tol:
                    return True
        return False

    def canonical_walk(self):
        if self.walk is None:
            return None
        return _canonical_walk(self.walk)

    def equivalent_to(self, other, tol=1e-7, orientation_matters=True):
        """Same curve up to rotation (and optionally reversal) of breakpoints."""
        if self.space is not other.space:
            return False
        if abs(self.length - other.length) > max(tol, EPS_LEN):
            return False
        if self.walk is not None and other.walk is not None:
            if _canonical_walk(self.walk) == _canonical_walk(other.walk):
                return True
            if orientation_matters:
                return False
            return _canonical_walk(self.walk, reversal=True) == \
                _canonical_walk(other.walk, reversal=True)
        a, b = self.breakpoints, other.breakpoints
        if len(a) != len(b):
            return False
        n = len(a)
        orders = [b, b[::-1]] if not orientation_matters else [b]
        for bb in orders:
            for shift in range(n):
                if all(self.space.distance(a[i], bb[(i + shift) % n]) <= tol
                       for i in range(n)):
                    return True
        return False


def _canonical_walk(walk, reversal=True):
    """Lexicographically minimal rotation over both orientations."""
    def rotations(seq):
        return [tuple(seq[i:] + seq[:i]) for i in range(len(seq))]

    cands = rotations(list(walk))
    if reversal:
        rev = [(e, -d) for e, d in reversed(walk)]
        cands += rotations(rev)
    return min(cands)


# ------------------------------------------------------------ the report

@dataclass
class CurveReport:
    """Summary of the geodesy checks for one curve."""

    length: float
    is_geodesic: bool
    minind: int | None
    opind: int | None
    injrad: float
    injrad_cert: float
    margins: dict          # k -> deficit margin (0.0 when the check holds)
    k_max: int

    def to_json(self):
        return {
            "length": self.length,
            "is_geodesic": self.is_geodesic,
            "minind": self.minind if self.minind is not None else "exceeds",
            "opind": self.opind if self.opind is not None else "exceeds",
            "injrad": self.injrad,
            "injrad_cert": self.injrad_cert,
            "margins": {str(k): v for k, v in sorted(self.margins.items())},
            "k_max": self.k_max,
        }


def curve_report(curve, k_max=K_MAX_DEFAULT, delta=None) -> CurveReport:
    margins = {}
    minind = None
    for k in range(2, k_max + 1):
        res = curve.check_one_over_k(k, delta=delta)
        margins[k] = 0.0 if res.holds else res.margin
        if minind is None and res.holds:
            minind = k
    opind = None
    if minind is not None:
        for k in range(max(3, minind), min(minind + 1, k_max) + 1):
            if curve.is_openly(k, delta=delta):
                opind = k
                break
    injrad = curve.injectivity_radius(delta)
    return CurveReport(
        length=curve.length,
        is_geodesic=curve.is_closed_geodesic(delta),
        minind=minind,
        opind=opind,
        injrad=injrad,
        injrad_cert=curve.injrad_certificate(delta),
        margins=margins,
        k_max=k_max,
    )
