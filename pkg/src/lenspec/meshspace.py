"""Triangulated closed surfaces with Dijkstra distances.

Distances run over a refined graph (vertices plus Steiner points on
every edge, complete within each face), which yields a deterministic
upper bound with error O(max edge length / (steiner + 1)).  The bound is
stored in ``metric_slack`` and consumed by the certified curve checks.
Row caches fill lazily with idempotent writes, so concurrent readers
stay safe.
"""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .defaults import STEINER_DEFAULT
from .errors import InvalidSpaceError, SpaceMismatchError
from .spaces import LengthSpace, MeshPoint


class MeshSurface(LengthSpace):
    """Closed, connected, edge-manifold triangulation of a surface."""

    kind = "mesh"
    point_type = MeshPoint

    def __init__(self, vertices, triangles, steiner=STEINER_DEFAULT, name=None):
        v = np.asarray(vertices, dtype=np.float64)
        f = np.asarray(triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InvalidSpaceError("vertices must be an (n, 3) array")
        if f.ndim != 2 or f.shape[1] != 3:
            raise InvalidSpaceError("triangles must be an (m, 3) array")
        if f.min(initial=0) < 0 or f.max(initial=-1) >= len(v):
            raise InvalidSpaceError("triangle index out of range")
        self.v = v
        self.f = f
        self.steiner = int(steiner)
        self.name = name
        self._validate()
        self._refine()
        self._dcache = {}
        self._pred_cache = {}
        self._dall = None
        edge_lens = np.linalg.norm(v[self._edges[:, 0]] - v[self._edges[:, 1]], axis=1)
        self.metric_slack = float(edge_lens.max()) / (self.steiner + 1)

    def _validate(self):
        count = defaultdict(int)
        for tri in self.f:
            a, b, c = sorted(int(x) for x in tri)
            if a == b or b == c:
                raise InvalidSpaceError("degenerate triangle")
            for e in ((a, b), (b, c), (a, c)):
                count[e] += 1
        if any(c != 2 for c in count.values()):
            raise InvalidSpaceError("mesh must be closed and edge-manifold "
                                    "(every edge in exactly two triangles)")
        self._edges = np.array(sorted(count.keys()), dtype=np.int64)
        # connectivity over shared edges
        adj = defaultdict(set)
        for tri in self.f:
            for i in range(3):
                adj[int(tri[i])].add(int(tri[(i + 1) % 3]))
                adj[int(tri[(i + 1) % 3])].add(int(tri[i]))
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.v):
            raise InvalidSpaceError("mesh is not connected")

    def _refine(self):
        nv = len(self.v)
        s = self.steiner
        coords = [self.v]
        edge_nodes = {}
        next_id = nv
        for a, b in self._edges:
            ids = []
            for j in range(1, s + 1):
                t = j / (s + 1)
                coords.append(((1 - t) * self.v[a] + t * self.v[b])[None, :])
                ids.append(next_id)
                next_id += 1
            edge_nodes[(int(a), int(b))] = ids
        self.node_xyz = np.vstack(coords) if len(coords) > 1 else self.v.copy()
        self._edge_nodes = edge_nodes

        self._face_nodes = []
        pair_w = {}
        for tri in self.f:
            a, b, c = (int(x) for x in tri)
            nodes = [a, b, c]
            for e in ((a, b), (b, c), (a, c)):
                key = (min(e), max(e))
                nodes.extend(edge_nodes[key])
            self._face_nodes.append(nodes)
            for i in range(len(nodes)):
                for j in range(i + 1, len(nodes)):
                    key = (nodes[i], nodes[j]) if nodes[i] < nodes[j] \
                        else (nodes[j], nodes[i])
                    if key in pair_w:
                        continue  # an edge shared by two faces must not double
                    pair_w[key] = float(np.linalg.norm(self.node_xyz[key[0]] -
                                                       self.node_xyz[key[1]]))
        rows = [k[0] for k in pair_w] + [k[1] for k in pair_w]
        cols = [k[1] for k in pair_w] + [k[0] for k in pair_w]
        vals = list(pair_w.values()) * 2
        n = len(self.node_xyz)
        self._csgraph = csr_matrix((vals, (rows, cols)), shape=(n, n))
        # smallest-id face containing each node, for canonical points
        self._node_face = [None] * n
        for fid, nodes in enumerate(self._face_nodes):
            for nd in nodes:
                if self._node_face[nd] is None:
                    self._node_face[nd] = fid

    # ------------------------------------------------------------ points

    def node_point(self, node) -> MeshPoint:
        fid = self._node_face[node]
        xyz = self.node_xyz[node]
        return MeshPoint(face=fid, bary=self._bary(fid, xyz), node=int(node))

    def vertex_point(self, v) -> MeshPoint:
        return self.node_point(int(v))

    def point(self, face, bary) -> MeshPoint:
        if not 0 <= face < len(self.f):
            raise SpaceMismatchError(f"face {face} out of range")
        b = np.asarray(bary, dtype=np.float64)
        if b.shape != (3,) or (b < -1e-12).any():
            raise SpaceMismatchError("barycentric coordinates must be a nonnegative triple")
        b = b / b.sum()
        xyz = b @ self.v[self.f[face]]
        node = None
        for nd in self._face_nodes[face]:
            if np.linalg.norm(self.node_xyz[nd] - xyz) < 1e-12:
                node = int(nd)
                break
        return MeshPoint(face=int(face), bary=tuple(b), node=node)

    def _bary(self, face, xyz):
        tri = self.v[self.f[face]]
        t = tri[1:] - tri[0]
        m = t @ t.T
        rhs = t @ (xyz - tri[0])
        try:
            uv = np.linalg.solve(m, rhs)
        except np.linalg.LinAlgError:
            uv = np.zeros(2)
        b = np.array([1.0 - uv.sum(), uv[0], uv[1]])
        b = np.clip(b, 0.0, 1.0)
        return tuple(b / b.sum())

    def surface_point(self, xyz, hint_nodes=()):
        """Nearest refined node snapped to a canonical MeshPoint."""
        best, bd = None, None
        for nd in hint_nodes:
            if nd is None:
                continue
            d = float(np.linalg.norm(self.node_xyz[nd] - xyz))
            if bd is None or d < bd:
                best, bd = nd, d
        if best is None:
            best = int(np.argmin(np.linalg.norm(self.node_xyz - xyz, axis=1)))
        return self.node_point(best)

    def xyz(self, p) -> np.ndarray:
        if p.node is not None:
            return self.node_xyz[p.node]
        return np.asarray(p.bary) @ self.v[self.f[p.face]]

    # --------------------------------------------------------- distances

    def _row(self, node):
        if self._dall is not None:
            return self._dall[node]
        if node not in self._dcache:
            self._dcache[node] = dijkstra(self._csgraph, indices=node)
        return self._dcache[node]

    def _row_with_pred(self, node):
        if node not in self._pred_cache:
            self._pred_cache[node] = dijkstra(self._csgraph, indices=node,
                                              return_predecessors=True)
        return self._pred_cache[node]

    def _all_rows(self):
        if self._dall is None:
            self._dall = dijkstra(self._csgraph)
        return self._dall

    def _anchors(self, p):
        """(node, euclidean cost) pairs connecting p to the refined graph."""
        if p.node is not None:
            return [(p.node, 0.0)]
        xyz = self.xyz(p)
        return [(nd, float(np.linalg.norm(self.node_xyz[nd] - xyz)))
                for nd in self._face_nodes[p.face]]

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        if p.node is not None and q.node is not None:
            return float(self._row(p.node)[q.node])
        best = math.inf
        if p.face == q.face:
            best = float(np.linalg.norm(self.xyz(p) - self.xyz(q)))
        rows = {a: self._row(a) for a, _ in self._anchors(p)}
        for a, ca in self._anchors(p):
            for b, cb in self._anchors(q):
                best = min(best, ca + float(rows[a][b]) + cb)
        return best

    def polyline_distance(self, a, b):
        """Distance between two curve samples given as (xyz, nodes, costs)."""
        xa, na, ca = a
        xb, nb, cb = b
        best = math.inf
        if set(na) == set(nb):
            best = float(np.linalg.norm(np.asarray(xa) - np.asarray(xb)))
        for i in range(2):
            row = self._row(na[i])
            for j in range(2):
                best = min(best, ca[i] + float(row[nb[j]]) + cb[j])
        return best

    def shortest_polyline(self, p, q):
        """Dijkstra path as [(xyz, node), ...] from p to q."""
        if p.node is None or q.node is None:
            raise SpaceMismatchError(
                "mesh curve breakpoints must be node-backed points")
        if p.node == q.node:
            raise InvalidSpaceError("repeated consecutive breakpoints")
        dist, pred = self._row_with_pred(p.node)
        if not np.isfinite(dist[q.node]):
            raise InvalidSpaceError("mesh is not connected")
        path = [q.node]
        while path[-1] != p.node:
            path.append(int(pred[path[-1]]))
        path.reverse()
        return [(self.node_xyz[nd].copy(), int(nd)) for nd in path]

    # ------------------------------------------------------ net machinery

    def probe_points(self, density=None):
        return [self.node_point(nd) for nd in range(len(self.node_xyz))]

    def pack(self, points):
        nodes = []
        for p in points:
            if p.node is None:
                raise SpaceMismatchError("packed mesh points must be node-backed")
            nodes.append(p.node)
        return np.array(nodes, dtype=np.int64)

    def pdist(self, packed_a, packed_b):
        if self._dall is None and len(packed_a) <= 16:
            rows = np.vstack([self._row(int(n)) for n in packed_a])
            return rows[:, packed_b]
        return self._all_rows()[np.ix_(packed_a, packed_b)]

    def pair_dist(self, packed_a, packed_b):
        return self._all_rows()[packed_a, packed_b]

    def diameter(self, probe_density=None):
        return float(self._all_rows().max())

    def radius(self, probe_density=None):
        return float(self._all_rows().max(axis=1).min())

    def random_point(self, rng):
        return self.node_point(int(rng.integers(len(self.node_xyz))))

    def label(self):
        return self.name or f"mesh:{len(self.v)}v{len(self.f)}f"


# --------------------------------------------------------- mesh builders

def ellipsoid_mesh(c, n_theta=16, n_phi=8, steiner=3):
    """Ellipsoid x^2 + y^2 + (z/c)^2 = 1, with a vertex ring on the equator."""
    if n_phi % 2 != 0:
        n_phi += 1  # keep the equator on a vertex ring
    verts = [(0.0, 0.0, c)]
    rows = []
    for i in range(1, n_phi):
        phi = math.pi * i / n_phi
        row = []
        for j in range(n_theta):
            th = 2.0 * math.pi * j / n_theta
            row.append(len(verts))
            verts.append((math.sin(phi) * math.cos(th),
                          math.sin(phi) * math.sin(th),
                          c * math.cos(phi)))
        rows.append(row)
    south = len(verts)
    verts.append((0.0, 0.0, -c))
    tris = []
    for j in range(n_theta):
        tris.append((0, rows[0][j], rows[0][(j + 1) % n_theta]))
        tris.append((south, rows[-1][(j + 1) % n_theta], rows[-1][j]))
    for i in range(len(rows) - 1):
        for j in range(n_theta):
            a, b = rows[i][j], rows[i][(j + 1) % n_theta]
            cc, d = rows[i + 1][j], rows[i + 1][(j + 1) % n_theta]
            tris.append((a, b, d))
            tris.append((a, d, cc))
    mesh = MeshSurface(verts, tris, steiner=steiner, name=f"ellipsoid:{c:g}")
    mesh.equator_vertices = rows[len(rows) // 2]
    return mesh


def doubled_disk_mesh(n_theta=16, n_r=4, steiner=3):
    """Two flat unit disks glued along their boundary circle."""
    verts = [(0.0, 0.0, 0.0)]
    rings = []
    for i in range(1, n_r + 1):
        r = i / n_r
        ring = []
        for j in range(n_theta):
            th = 2.0 * math.pi * j / n_theta
            ring.append(len(verts))
            verts.append((r * math.cos(th), r * math.sin(th), 0.0))
        rings.append(ring)
    # lower copy shares the boundary ring; interior duplicated
    lower_center = len(verts)
    verts.append((0.0, 0.0, 0.0))
    lower_rings = []
    for i in range(1, n_r + 1):
        if i == n_r:
            lower_rings.append(rings[-1])
            continue
        ring = []
        for j in range(n_theta):
            th = 2.0 * math.pi * j / n_theta
            ring.append(len(verts))
            verts.append(((i / n_r) * math.cos(th), (i / n_r) * math.sin(th), 0.0))
        lower_rings.append(ring)

    def disk(center, ringlist, flip):
        tris = []
        for j in range(n_theta):
            t = (center, ringlist[0][j], ringlist[0][(j + 1) % n_theta])
            tris.append((t[0], t[2], t[1]) if flip else t)
        for i in range(len(ringlist) - 1):
            for j in range(n_theta):
                a, b = ringlist[i][j], ringlist[i][(j + 1) % n_theta]
                cc, d = ringlist[i + 1][j], ringlist[i + 1][(j + 1) % n_theta]
                t1, t2 = (a, b, d), (a, d, cc)
                if flip:
                    t1, t2 = (t1[0], t1[2], t1[1]), (t2[0], t2[2], t2[1])
                tris.extend([t1, t2])
        return tris

    tris = disk(0, rings, flip=False) + disk(lower_center, lower_rings, flip=True)
    mesh = MeshSurface(verts, tris, steiner=steiner, name="doubled-disk")
    mesh.equator_vertices = rings[-1]

    # the two sheets coincide in R^3; record which nodes belong to which
    ring = set(rings[-1])
    upper = {0} | {v for r in rings for v in r}
    lower = {lower_center} | {v for r in lower_rings for v in r}
    sides = {"upper": set(upper), "lower": set(lower), "ring": set(ring)}
    for (a, b), ids in mesh._edge_nodes.items():
        if a in ring and b in ring:
            sides["upper"].update(ids)
            sides["lower"].update(ids)
            sides["ring"].update(ids)
        elif a in upper and b in upper:
            sides["upper"].update(ids)
        else:
            sides["lower"].update(ids)
    mesh.node_sides = {k: np.array(sorted(v), dtype=np.int64)
                       for k, v in sides.items()}
    return mesh


def doubled_disk_mapping(source_mesh, disk_mesh):
    """Point map realizing (x, y, z) -> (x, y, sgn z) onto the doubled disk."""
    xy = {side: disk_mesh.node_xyz[nodes][:, :2]
          for side, nodes in disk_mesh.node_sides.items()}

    def mapping(p):
        xyz = source_mesh.xyz(p)
        z = xyz[2]
        side = "ring" if abs(z) < 1e-9 else ("upper" if z > 0 else "lower")
        nodes = disk_mesh.node_sides[side]
        d = np.linalg.norm(xy[side] - xyz[:2], axis=1)
        return disk_mesh.node_point(int(nodes[int(np.argmin(d))]))

    return mapping


def equator_curve(mesh):
    """Closed curve through the mesh's equator vertex ring."""
    from .curves import ClosedCurve
    pts = [mesh.vertex_point(v) for v in mesh.equator_vertices]
    return ClosedCurve(mesh, pts)
