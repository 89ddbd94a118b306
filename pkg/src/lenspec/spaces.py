"""Concrete compact length spaces with a uniform distance oracle.

Variants: finite metric spaces, metric graphs, circles, flat tori, round
spheres and triangulated surfaces.  Every space exposes point
construction/canonicalization, a symmetric distance, diameter/radius,
deterministic probe sets, and farthest-point nets.  The analytic
variants additionally expose log/exp maps used by the energy module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .defaults import EPS_LEN, TOL_CUT_REL
from .errors import (CutLocusError, InvalidSpaceError, SpaceMismatchError,
                     UnsupportedOperationError)


# ------------------------------------------------------------ point types

@dataclass(frozen=True)
class FinitePoint:
    index: int


@dataclass(frozen=True)
class GraphPoint:
    """Either a skeleton vertex or an interior point of an edge."""
    vertex: int | None = None
    edge: int | None = None
    offset: object = None  # float, int or Fraction


@dataclass(frozen=True)
class CirclePoint:
    pos: float  # arc position in [0, circumference)


@dataclass(frozen=True)
class TorusPoint:
    pos: tuple  # per-factor arc positions


@dataclass(frozen=True)
class SpherePoint:
    vec: tuple  # unit vector


@dataclass(frozen=True)
class MeshPoint:
    face: int
    bary: tuple
    node: int | None = None  # refined-graph node id when the point is one


class LengthSpace:
    """Base class; concrete variants implement the distance oracle."""

    kind = "abstract"
    point_type: type = object

    # systematic slack of the distance oracle (nonzero only for meshes)
    metric_slack = 0.0
    # floating-point accuracy of the oracle (sqrt-conditioned near pi on spheres)
    oracle_eps = 0.0

    def check_point(self, p):
        if not isinstance(p, self.point_type):
            raise SpaceMismatchError(
                f"{type(p).__name__} is not a point of a {self.kind} space")

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def diameter(self, probe_density=None) -> float:
        raise NotImplementedError

    def radius(self, probe_density=None) -> float:
        raise NotImplementedError

    def probe_points(self, density) -> list:
        raise NotImplementedError

    def pack(self, points):
        """Columnar representation consumed by the distance kernels."""
        raise NotImplementedError

    def pdist(self, packed_a, packed_b) -> np.ndarray:
        raise NotImplementedError

    def pair_dist(self, packed_a, packed_b) -> np.ndarray:
        """Elementwise distances between two packed arrays of equal length."""
        raise NotImplementedError

    def random_point(self, rng):
        raise NotImplementedError

    def label(self) -> str:
        return self.kind

    # --- smooth structure (circle / torus / sphere only) ---------------

    def log_map(self, p, q):
        raise UnsupportedOperationError(f"log_map unsupported on {self.kind}")

    def exp_map(self, p, v):
        raise UnsupportedOperationError(f"exp_map unsupported on {self.kind}")

    def near_cut(self, p, q) -> bool:
        raise UnsupportedOperationError(f"cut locus test unsupported on {self.kind}")


# ---------------------------------------------------------- finite metric

class FiniteMetricSpace(LengthSpace):
    """n points with an explicit distance matrix."""

    kind = "finite"
    point_type = FinitePoint

    def __init__(self, matrix):
        d = np.asarray(matrix, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidSpaceError("distance matrix must be square")
        n = d.shape[0]
        if n == 0:
            raise InvalidSpaceError("empty space")
        if not np.allclose(d, d.T, atol=EPS_LEN, rtol=0):
            raise InvalidSpaceError("distance matrix must be symmetric")
        if np.abs(np.diag(d)).max() > EPS_LEN:
            raise InvalidSpaceError("distance matrix must have zero diagonal")
        if (d < -EPS_LEN).any():
            raise InvalidSpaceError("negative distances")
        for k in range(n):
            if (d > d[:, k, None] + d[None, k, :] + EPS_LEN).any():
                raise InvalidSpaceError("triangle inequality violated")
        self.matrix = d
        self.n = n

    def point(self, index) -> FinitePoint:
        if not 0 <= index < self.n:
            raise SpaceMismatchError(f"index {index} out of range")
        return FinitePoint(int(index))

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        return float(self.matrix[p.index, q.index])

    def diameter(self, probe_density=None):
        return float(self.matrix.max())

    def radius(self, probe_density=None):
        return float(self.matrix.max(axis=1).min())

    def probe_points(self, density=None):
        return [FinitePoint(i) for i in range(self.n)]

    def pack(self, points):
        return np.array([p.index for p in points], dtype=np.int64)

    def pdist(self, packed_a, packed_b):
        return self.matrix[np.ix_(packed_a, packed_b)]

    def pair_dist(self, packed_a, packed_b):
        return self.matrix[packed_a, packed_b]

    def random_point(self, rng):
        return FinitePoint(int(rng.integers(self.n)))

    def label(self):
        return f"finite:{self.n}"


# ----------------------------------------------------------------- circle

class Circle(LengthSpace):
    """Circle of a given diameter, i.e. circumference = 2 * diameter."""

    kind = "circle"
    point_type = CirclePoint

    def __init__(self, diameter):
        if diameter <= 0:
            raise InvalidSpaceError("diameter must be positive")
        self.diam = float(diameter)
        self.circumference = 2.0 * self.diam

    def point(self, pos) -> CirclePoint:
        return CirclePoint(float(pos) % self.circumference)

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        d = abs(p.pos - q.pos) % self.circumference
        return min(d, self.circumference - d)

    def diameter(self, probe_density=None):
        return self.diam

    def radius(self, probe_density=None):
        return self.diam

    def probe_points(self, density):
        if density <= 0:
            raise ValueError("probe density must be positive")
        n = max(4, math.ceil(self.circumference / density))
        step = self.circumference / n
        return [CirclePoint(i * step) for i in range(n)]

    def pack(self, points):
        return np.array([p.pos for p in points], dtype=np.float64)

    def pdist(self, packed_a, packed_b):
        return kernels.circle_pdist(packed_a, packed_b, self.circumference)

    def pair_dist(self, packed_a, packed_b):
        return kernels.circle_dist(packed_a, packed_b, self.circumference)

    def random_point(self, rng):
        return CirclePoint(float(rng.uniform(0.0, self.circumference)))

    def log_map(self, p, q):
        self.check_point(p)
        self.check_point(q)
        c = self.circumference
        delta = (q.pos - p.pos) % c
        if abs(delta - 0.5 * c) <= TOL_CUT_REL * c:
            raise CutLocusError("antipodal points on the circle: ambiguous direction")
        return delta if delta < 0.5 * c else delta - c

    def exp_map(self, p, v):
        return self.point(p.pos + float(v))

    def near_cut(self, p, q):
        c = self.circumference
        delta = (q.pos - p.pos) % c
        return abs(delta - 0.5 * c) <= TOL_CUT_REL * c

    def tangent_dim(self):
        return 1

    def label(self):
        return f"circle:{self.diam:g}"


# ------------------------------------------------------------- flat torus

class FlatTorus(LengthSpace):
    """Isometric product of circles given by their diameters."""

    kind = "torus"
    point_type = TorusPoint

    def __init__(self, diameters):
        diams = [float(d) for d in diameters]
        if len(diams) < 1 or any(d <= 0 for d in diams):
            raise InvalidSpaceError("diameters must be positive")
        self.diams = tuple(diams)
        self.circ = np.array([2.0 * d for d in diams])
        self.m = len(diams)

    def point(self, pos) -> TorusPoint:
        pos = np.asarray(pos, dtype=np.float64)
        if pos.shape != (self.m,):
            raise SpaceMismatchError(f"expected {self.m} coordinates")
        return TorusPoint(tuple(pos % self.circ))

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        d = np.abs(np.array(p.pos) - np.array(q.pos)) % self.circ
        d = np.minimum(d, self.circ - d)
        return float(np.sqrt((d * d).sum()))

    def diameter(self, probe_density=None):
        return float(np.sqrt(sum(d * d for d in self.diams)))

    def radius(self, probe_density=None):
        return self.diameter()

    def probe_points(self, density):
        if density <= 0:
            raise ValueError("probe density must be positive")
        # per-factor density scaled so the grid cell diagonal stays <= density
        per = density / math.sqrt(self.m)
        axes = []
        for c in self.circ:
            n = max(2, math.ceil(c / per))
            axes.append(np.arange(n) * (c / n))
        grids = np.meshgrid(*axes, indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)
        return [TorusPoint(tuple(row)) for row in coords]

    def pack(self, points):
        return np.array([p.pos for p in points], dtype=np.float64)

    def pdist(self, packed_a, packed_b):
        return kernels.torus_pdist(packed_a, packed_b, self.circ)

    def pair_dist(self, packed_a, packed_b):
        return kernels.torus_dist(packed_a, packed_b, self.circ)

    def random_point(self, rng):
        return TorusPoint(tuple(rng.uniform(0.0, c) for c in self.circ))

    def log_map(self, p, q):
        self.check_point(p)
        self.check_point(q)
        out = np.empty(self.m)
        for i in range(self.m):
            c = self.circ[i]
            delta = (q.pos[i] - p.pos[i]) % c
            if abs(delta - 0.5 * c) <= TOL_CUT_REL * c:
                raise CutLocusError("antipodal factor coordinate: ambiguous direction")
            out[i] = delta if delta < 0.5 * c else delta - c
        return out

    def exp_map(self, p, v):
        return self.point(np.array(p.pos) + np.asarray(v))

    def near_cut(self, p, q):
        for i in range(self.m):
            c = self.circ[i]
            delta = (q.pos[i] - p.pos[i]) % c
            if abs(delta - 0.5 * c) <= TOL_CUT_REL * c:
                return True
        return False

    def tangent_dim(self):
        return self.m

    def label(self):
        return "torus:" + ",".join(f"{d:g}" for d in self.diams)


# ------------------------------------------------------------ round sphere

class RoundSphere(LengthSpace):
    """Unit round sphere S^n with the intrinsic (angle) metric."""

    kind = "sphere"
    point_type = SpherePoint
    oracle_eps = 1e-7  # arccos near antipodal pairs resolves only to ~sqrt(eps)

    def __init__(self, dim=2):
        if dim < 1:
            raise InvalidSpaceError("dimension must be >= 1")
        self.dim = int(dim)

    def point(self, vec) -> SpherePoint:
        v = np.asarray(vec, dtype=np.float64)
        if v.shape != (self.dim + 1,):
            raise SpaceMismatchError(f"expected a vector in R^{self.dim + 1}")
        n = np.linalg.norm(v)
        if n < 1e-12:
            raise SpaceMismatchError("zero vector cannot be normalized")
        return SpherePoint(tuple(v / n))

    def distance(self, p, q):
        # chordal form: well conditioned near 0, exact on identical points
        self.check_point(p)
        self.check_point(q)
        half = 0.5 * float(np.linalg.norm(np.array(p.vec) - np.array(q.vec)))
        return 2.0 * math.asin(min(1.0, half))

    def diameter(self, probe_density=None):
        return math.pi

    def radius(self, probe_density=None):
        return math.pi

    def probe_points(self, density):
        if density <= 0:
            raise ValueError("probe density must be positive")
        if self.dim != 2:
            raise UnsupportedOperationError("probe sets implemented for S^2 only")
        n = max(16, math.ceil((3.0 / density) ** 2))
        golden = math.pi * (3.0 - math.sqrt(5.0))
        pts = []
        for i in range(n):
            z = 1.0 - 2.0 * (i + 0.5) / n
            r = math.sqrt(max(0.0, 1.0 - z * z))
            th = golden * i
            pts.append(SpherePoint((r * math.cos(th), r * math.sin(th), z)))
        return pts

    def pack(self, points):
        return np.array([p.vec for p in points], dtype=np.float64)

    def pdist(self, packed_a, packed_b):
        return kernels.sphere_pdist(packed_a, packed_b)

    def pair_dist(self, packed_a, packed_b):
        return kernels.sphere_dist(packed_a, packed_b)

    def random_point(self, rng):
        v = rng.normal(size=self.dim + 1)
        return SpherePoint(tuple(v / np.linalg.norm(v)))

    def log_map(self, p, q):
        self.check_point(p)
        self.check_point(q)
        pv = np.array(p.vec)
        qv = np.array(q.vec)
        dot = float(np.clip(pv @ qv, -1.0, 1.0))
        theta = math.acos(dot)
        if theta >= math.pi * (1.0 - TOL_CUT_REL):
            raise CutLocusError("antipodal points on the sphere: ambiguous direction")
        w = qv - dot * pv
        nw = np.linalg.norm(w)
        if nw < 1e-15:
            return np.zeros(self.dim + 1)
        return theta * w / nw

    def exp_map(self, p, v):
        pv = np.array(p.vec)
        v = np.asarray(v, dtype=np.float64)
        nv = np.linalg.norm(v)
        if nv < 1e-15:
            return SpherePoint(tuple(pv))
        out = math.cos(nv) * pv + math.sin(nv) * (v / nv)
        return SpherePoint(tuple(out / np.linalg.norm(out)))

    def near_cut(self, p, q):
        dot = float(np.clip(np.dot(p.vec, q.vec), -1.0, 1.0))
        return math.acos(dot) >= math.pi * (1.0 - TOL_CUT_REL)

    def tangent_basis(self, p):
        pv = np.array(p.vec)
        axis = np.zeros(self.dim + 1)
        axis[int(np.argmin(np.abs(pv)))] = 1.0
        b1 = np.cross(pv, axis) if self.dim == 2 else None
        if self.dim != 2:
            raise UnsupportedOperationError("tangent bases implemented for S^2 only")
        b1 = b1 / np.linalg.norm(b1)
        b2 = np.cross(pv, b1)
        return np.stack([b1, b2])

    def tangent_dim(self):
        return self.dim

    def label(self):
        return f"sphere{self.dim}"


# ------------------------------------------------------------------- nets

@dataclass
class NetSample:
    """Finite r-net on a space together with its resolution."""

    space: LengthSpace
    points: list
    r: float

    def packed(self):
        return self.space.pack(self.points)

    def matrix(self):
        p = self.packed()
        return self.space.pdist(p, p)

    def verify(self, probe_density):
        """Check the r-net property against a fresh probe set."""
        probes = self.space.probe_points(probe_density)
        d = self.space.pdist(self.space.pack(probes), self.packed())
        return float(d.min(axis=1).max()) <= self.r + EPS_LEN


def build_net(space, r, probe_density=None) -> NetSample:
    """Greedy farthest-point sampling over the probe set until covered."""
    if r < 0 or (r == 0 and space.kind != "finite"):
        raise ValueError("net radius must be positive")
    if probe_density is None:
        probe_density = r / 4 if r > 0 else None
    if space.kind != "finite":
        if probe_density <= 0 or probe_density > r / 4:
            raise ValueError("probe density must lie in (0, r/4]")
    probes = space.probe_points(probe_density)
    packed = space.pack(probes)
    chosen = [0]
    dmin = space.pdist(space.pack([probes[0]]), packed)[0].copy()
    while len(chosen) < len(probes):
        i = int(np.argmax(dmin))
        if dmin[i] <= r:
            break
        chosen.append(i)
        dmin = np.minimum(dmin, space.pdist(space.pack([probes[i]]), packed)[0])
    return NetSample(space, [probes[i] for i in chosen], r)
