"""Uniform energy on the k-fold product and its critical points.

E(x_1..x_k) = k * sum d(x_i, x_{i+1})^2 (cyclic). Nonzero rotating
critical tuples correspond to openly 1/k geodesics; the search combines
monotone gradient descent (finds transverse minima and collapses) with a
Levenberg-Marquardt root solve on the gradient field, which also reaches
saddle-type critical tuples such as evenly spaced points on a sphere
equator.  Supported spaces: circle, flat torus, round 2-sphere, and
single-edge path graphs (intervals) with smooth-interior handling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import ClosedCurve
from .defaults import (BACKTRACK_FACTOR, MAX_DESCENT_ITERS, TOL_GRAD)
from .errors import (AmbiguousSegmentError, CutLocusError,
                     UnsupportedOperationError)
from .graphspace import MetricGraph
from .spaces import Circle, FlatTorus, RoundSphere

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ProductPoint:
    space: object
    points: tuple

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("a product point needs k >= 2 factors")
        for p in self.points:
            self.space.check_point(p)

    @property
    def k(self):
        return len(self.points)


@dataclass(frozen=True)
class EnergySpec:
    """Segment weights r_1..r_k; E(x) = sum d(x_i, x_{i+1})^2 / r_i."""

    space: object
    weights: tuple

    def __post_init__(self):
        if len(self.weights) < 2 or any(r <= 0 for r in self.weights):
            raise ValueError("need k >= 2 positive segment weights")

    @classmethod
    def uniform(cls, space, k):
        return cls(space, (1.0 / k,) * k)

    @property
    def weight_sum(self):
        return float(sum(self.weights))

    def energy(self, points) -> float:
        pts = list(points.points if isinstance(points, ProductPoint) else points)
        if len(pts) != len(self.weights):
            raise ValueError("point count must match the weight count")
        k = len(pts)
        return sum(self.space.distance(pts[i], pts[(i + 1) % k]) ** 2 / r
                   for i, r in enumerate(self.weights))

    def balance_residual(self, points) -> float:
        """max deviation of d(x_i, x_{i+1})/r_i from its mean; zero at
        smooth critical points."""
        pts = list(points.points if isinstance(points, ProductPoint) else points)
        k = len(pts)
        ratios = [self.space.distance(pts[i], pts[(i + 1) % k]) / r
                  for i, r in enumerate(self.weights)]
        mean = sum(ratios) / k
        return max(abs(x - mean) for x in ratios)


# ----------------------------------------------------------------- charts

class _CircleChart:
    def __init__(self, space):
        self.space = space
        self.dim = 1

    def log(self, p, q):
        return np.array([self.space.log_map(p, q)])

    def step(self, p, v):
        return self.space.exp_map(p, float(v[0]))

    def near_cut(self, p, q):
        return self.space.near_cut(p, q)


class _TorusChart:
    def __init__(self, space):
        self.space = space
        self.dim = space.m

    def log(self, p, q):
        return self.space.log_map(p, q)

    def step(self, p, v):
        return self.space.exp_map(p, v)

    def near_cut(self, p, q):
        return self.space.near_cut(p, q)


class _SphereChart:
    def __init__(self, space):
        self.space = space
        self.dim = space.dim

    def log(self, p, q):
        basis = self.space.tangent_basis(p)
        return basis @ self.space.log_map(p, q)

    def step(self, p, v):
        basis = self.space.tangent_basis(p)
        return self.space.exp_map(p, np.asarray(v) @ basis)

    def near_cut(self, p, q):
        return self.space.near_cut(p, q)


class _IntervalChart:
    """Single-edge path graph: smooth interior, clamped boundary steps."""

    def __init__(self, space):
        self.space = space
        self.dim = 1
        self.len = float(space.elen[0])

    def _coord(self, p):
        if p.vertex is not None:
            return 0.0 if p.vertex == int(self.space.eu[0]) else self.len
        return float(p.offset)

    def log(self, p, q):
        return np.array([self._coord(q) - self._coord(p)])

    def step(self, p, v):
        s = min(max(self._coord(p) + float(v[0]), 0.0), self.len)
        return self.space.point(0, s)

    def near_cut(self, p, q):
        return False


def _chart(space):
    if isinstance(space, Circle):
        return _CircleChart(space)
    if isinstance(space, FlatTorus):
        return _TorusChart(space)
    if isinstance(space, RoundSphere):
        if space.dim != 2:
            raise UnsupportedOperationError("energy implemented on S^2 only")
        return _SphereChart(space)
    if isinstance(space, MetricGraph) and space.is_single_edge_path():
        return _IntervalChart(space)
    raise UnsupportedOperationError(
        f"uniform energy gradients unsupported on {space.kind}")


# ---------------------------------------------------------- energy values

def uniform_energy(space, points) -> float:
    """k * sum of squared consecutive distances (cyclic)."""
    pts = list(points.points if isinstance(points, ProductPoint) else points)
    k = len(pts)
    if k < 2:
        raise ValueError("need at least two points")
    return k * sum(space.distance(pts[i], pts[(i + 1) % k]) ** 2
                   for i in range(k))


def energy_gradient(space, points, chart=None):
    """Per-point chart coordinates of grad E; raises CutLocusError when
    a consecutive pair is (numerically) antipodal."""
    pts = list(points.points if isinstance(points, ProductPoint) else points)
    k = len(pts)
    chart = chart or _chart(space)
    grads = []
    for i in range(k):
        fwd = chart.log(pts[i], pts[(i + 1) % k])
        bwd = chart.log(pts[i], pts[(i - 1) % k])
        grads.append(-2.0 * k * (fwd + bwd))
    return grads


def gradient_norm(grads) -> float:
    return math.sqrt(sum(float(g @ g) for g in grads))


# ----------------------------------------------------------------- search

@dataclass
class _LaneResult:
    status: str  # "critical" | "nonsmooth" | "stalled" | "maxiter"
    points: list
    energy: float
    grad_norm: float
    trajectory_monotone: bool = True


def _any_near_cut(chart, pts):
    k = len(pts)
    return any(chart.near_cut(pts[i], pts[(i + 1) % k]) for i in range(k))


def _descend(space, chart, start, tol_grad, max_iters=MAX_DESCENT_ITERS,
             backtrack=BACKTRACK_FACTOR):
    pts = list(start)
    if _any_near_cut(chart, pts):
        return _LaneResult("nonsmooth", pts, math.nan, math.nan)
    energy = uniform_energy(space, pts)
    k = len(pts)
    step = 0.25 / (k * k)
    for _ in range(max_iters):
        try:
            grads = energy_gradient(space, pts, chart)
        except CutLocusError:
            return _LaneResult("nonsmooth", pts, energy, math.nan)
        gn = gradient_norm(grads)
        if gn <= tol_grad:
            return _LaneResult("critical", pts, energy, gn)
        moved = False
        while step > 1e-18:
            cand = [chart.step(p, -step * g) for p, g in zip(pts, grads)]
            if not _any_near_cut(chart, cand):
                cand_energy = uniform_energy(space, cand)
                if cand_energy < energy:
                    pts, energy = cand, cand_energy
                    step = min(step * 1.5, 1.0)
                    moved = True
                    break
            step *= backtrack
        if not moved:
            return _LaneResult("stalled", pts, energy, gn)
    return _LaneResult("maxiter", pts, energy, gradient_norm(grads))


def _lm_polish(space, chart, start, tol_grad, max_iters=150, fd_step=1e-6):
    """Levenberg-Marquardt on the gradient field; finds saddles too."""
    pts = list(start)
    k = len(pts)
    dim = chart.dim
    n = k * dim

    def residual(ps):
        return np.concatenate(energy_gradient(space, ps, chart))

    try:
        r = residual(pts)
    except CutLocusError:
        return _LaneResult("nonsmooth", pts, math.nan, math.nan,
                           trajectory_monotone=False)
    lam = 1e-3
    for _ in range(max_iters):
        rn = float(np.linalg.norm(r))
        if rn <= tol_grad:
            return _LaneResult("critical", pts, uniform_energy(space, pts), rn,
                               trajectory_monotone=False)
        jac = np.empty((n, n))
        try:
            col = 0
            for i in range(k):
                for j in range(dim):
                    ev = np.zeros(dim)
                    ev[j] = fd_step
                    pp = list(pts)
                    pp[i] = chart.step(pts[i], ev)
                    pm = list(pts)
                    pm[i] = chart.step(pts[i], -ev)
                    jac[:, col] = (residual(pp) - residual(pm)) / (2 * fd_step)
                    col += 1
        except CutLocusError:
            return _LaneResult("nonsmooth", pts, uniform_energy(space, pts), rn,
                               trajectory_monotone=False)
        improved = False
        while lam < 1e12:
            a = jac.T @ jac + lam * np.eye(n)
            try:
                delta = np.linalg.solve(a, -jac.T @ r)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            cand = [chart.step(pts[i], delta[i * dim:(i + 1) * dim])
                    for i in range(k)]
            if _any_near_cut(chart, cand):
                lam *= 10
                continue
            try:
                rc = residual(cand)
            except CutLocusError:
                lam *= 10
                continue
            if np.linalg.norm(rc) < rn:
                pts, r = cand, rc
                lam = max(lam * 0.3, 1e-12)
                improved = True
                break
            lam *= 10
        if not improved:
            return _LaneResult("stalled", pts, uniform_energy(space, pts), rn,
                               trajectory_monotone=False)
    return _LaneResult("maxiter", pts, uniform_energy(space, pts),
                       float(np.linalg.norm(r)), trajectory_monotone=False)


# ----------------------------------------------------------- conversions

def tuple_to_curve(space, points) -> ClosedCurve:
    """Join a critical tuple by its minimizing segments."""
    pts = list(points.points if isinstance(points, ProductPoint) else points)
    return ClosedCurve(space, pts)


def is_rotating_critical(space, points, n_shifts=8, tol_grad=1e-7, curve=None):
    """All curve-resampled shifts of the tuple stay critical."""
    pts = list(points.points if isinstance(points, ProductPoint) else points)
    k = len(pts)
    chart = _chart(space)
    try:
        curve = curve or tuple_to_curve(space, pts)
    except (AmbiguousSegmentError, CutLocusError):
        return False
    for j in range(n_shifts):
        t0 = (j / n_shifts) * (TWO_PI / k)
        tup = [curve.eval(t0 + i * TWO_PI / k) for i in range(k)]
        try:
            grads = energy_gradient(space, tup, chart)
        except CutLocusError:
            return False
        if gradient_norm(grads) > tol_grad:
            return False
    return True


@dataclass
class HessianReport:
    index: int
    nullity: int
    eigenvalues: tuple
    flagged: bool = False


def hessian_index(space, points, h_fd=1e-4) -> HessianReport:
    """Finite-difference Hessian of the uniform energy in product charts."""
    pts = list(points.points if isinstance(points, ProductPoint) else points)
    k = len(pts)
    chart = _chart(space)
    dim = chart.dim
    n = k * dim

    def at(u):
        moved = [chart.step(pts[i], u[i * dim:(i + 1) * dim]) for i in range(k)]
        return uniform_energy(space, moved)

    f0 = at(np.zeros(n))
    hess = np.empty((n, n))
    eye = np.eye(n) * h_fd
    for i in range(n):
        for j in range(i, n):
            if i == j:
                val = (at(eye[i]) - 2.0 * f0 + at(-eye[i])) / (h_fd * h_fd)
            else:
                val = (at(eye[i] + eye[j]) - at(eye[i] - eye[j])
                       - at(-eye[i] + eye[j]) + at(-eye[i] - eye[j]))
                val /= 4.0 * h_fd * h_fd
            hess[i, j] = hess[j, i] = val
    flagged = not np.all(np.isfinite(hess))
    if flagged:
        return HessianReport(0, 0, (), flagged=True)
    eigs = np.linalg.eigvalsh(0.5 * (hess + hess.T))
    tau = 100.0 * h_fd * h_fd * max(1.0, float(np.abs(eigs).max()))
    index = int((eigs < -tau).sum())
    nullity = int((np.abs(eigs) <= tau).sum())
    return HessianReport(index, nullity, tuple(float(x) for x in eigs))


# ------------------------------------------------------------ the search

@dataclass
class CriticalPointRecord:
    point: ProductPoint
    energy: float
    grad_norm: float
    rotating: bool
    curve: ClosedCurve | None
    hessian: HessianReport | None
    segment_residual: float

    def to_json(self):
        return {
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "rotating": self.rotating,
            "length": self.curve.length if self.curve is not None else None,
            "hessian_index": self.hessian.index if self.hessian else None,
            "nullity": self.hessian.nullity if self.hessian else None,
            "segment_residual": self.segment_residual,
        }


@dataclass
class SearchReport:
    space_label: str
    k: int
    n_starts: int
    seed: int
    records: list = field(default_factory=list)  # nonzero critical, deduped
    collapsed: int = 0
    rejected_nonsmooth: int = 0
    nonconverged: int = 0

    @property
    def rotating_records(self):
        return [r for r in self.records if r.rotating]

    def to_json(self):
        return {
            "space": self.space_label,
            "k": self.k,
            "starts": self.n_starts,
            "seed": self.seed,
            "converged": len(self.records) + self.collapsed,
            "rotating": [r.to_json() for r in self.rotating_records],
            "nonrotating": [r.to_json() for r in self.records if not r.rotating],
            "collapsed": self.collapsed,
            "rejected_nonsmooth": self.rejected_nonsmooth,
            "nonconverged": self.nonconverged,
        }


def find_critical_points(space, k, n_starts=64, seed=0, tol_grad=TOL_GRAD,
                         saddle_search=True, with_hessians=False,
                         threads=1) -> SearchReport:
    """Multi-start search for critical tuples of the uniform energy.

    Each seeded start runs a strictly monotone descent; with
    ``saddle_search`` the raw start additionally runs the LM root solve,
    which can reach saddle-type critical tuples the descent flows past.
    Starts are independent; with ``threads`` > 1 they run in a pool and
    are merged in start order, so results do not depend on the pool.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if n_starts < 1:
        raise ValueError("need at least one start")
    chart = _chart(space)
    report = SearchReport(space.label(), k, n_starts, seed)
    zero_tol = 1e-6 * space.diameter() ** 2

    def run_start(s):
        rng = np.random.default_rng((seed, s))
        start = [space.random_point(rng) for _ in range(k)]
        lanes = [_descend(space, chart, start, tol_grad)]
        if saddle_search:
            lanes.append(_lm_polish(space, chart, start, tol_grad))
        return lanes

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_lanes = list(pool.map(run_start, range(n_starts)))
    else:
        all_lanes = [run_start(s) for s in range(n_starts)]
    for lanes in all_lanes:
        for res in lanes:
            if res.status == "critical":
                _record(space, report, res, zero_tol, tol_grad, with_hessians)
            elif res.status == "nonsmooth":
                report.rejected_nonsmooth += 1
            else:
                report.nonconverged += 1
    report.records.sort(key=lambda r: (r.energy, r.curve.length))
    return report


def _record(space, report, res, zero_tol, tol_grad, with_hessians):
    if res.energy <= zero_tol:
        report.collapsed += 1
        return
    try:
        curve = tuple_to_curve(space, res.points)
    except (AmbiguousSegmentError, CutLocusError):
        report.rejected_nonsmooth += 1
        return
    for other in report.records:
        if curve.same_geodesic(other.curve, tol=1e-6):
            return
    k = report.k
    target = curve.length / k
    seg_residual = max(abs(space.distance(res.points[i], res.points[(i + 1) % k])
                           - target) for i in range(k))
    rec = CriticalPointRecord(
        point=ProductPoint(space, tuple(res.points)),
        energy=res.energy,
        grad_norm=res.grad_norm,
        rotating=is_rotating_critical(space, res.points, curve=curve),
        curve=curve,
        hessian=hessian_index(space, res.points) if with_hessians else None,
        segment_residual=seg_residual,
    )
    report.records.append(rec)


def open_index_search(space, k_max, n_starts=64, seed=0, tol_grad=TOL_GRAD):
    """Smallest k in [3, k_max] with a rotating nonzero critical point.

    The result is an upper bound for the open index (the search is
    heuristic); for circles the absence at k = 2 is analytic, so the
    value is exact there.  None means nothing was found up to k_max.
    """
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    for k in range(3, k_max + 1):
        rep = find_critical_points(space, k, n_starts=n_starts, seed=seed,
                                   tol_grad=tol_grad)
        if rep.rotating_records:
            return k
    return None
