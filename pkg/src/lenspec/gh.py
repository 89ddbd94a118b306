"""Hausdorff / Gromov-Hausdorff estimates and convergence experiments.

The GH distance itself is never computed (NP-hard); the module produces
certified upper bounds through r-nets and low-distortion correspondences
(bound = 2r + distortion), and runs spectrum-convergence experiments
that test containment of member spectra in a neighborhood of the limit
spectrum augmented with {0}.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .defaults import EPS_LEN
from .errors import LengthSpaceError, UnsupportedOperationError
from .spaces import NetSample, build_net
from .spectra import spectrum_1_over_k


class RelationCoverageError(LengthSpaceError):
    """A correspondence fails to cover one of its sides."""


# ------------------------------------------------------- Hausdorff on R

def hausdorff_distance_reals(a, b) -> float:
    """max sup-inf distance between two finite sets of lengths."""
    a = np.sort(np.asarray(list(a), dtype=np.float64))
    b = np.sort(np.asarray(list(b), dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Hausdorff distance needs nonempty sets")

    def one_sided(x, y):
        idx = np.clip(np.searchsorted(y, x), 1, len(y) - 1) if len(y) > 1 else \
            np.zeros(len(x), dtype=int)
        if len(y) == 1:
            return float(np.abs(x - y[0]).max())
        left = np.abs(x - y[idx - 1])
        right = np.abs(x - y[idx])
        return float(np.minimum(left, right).max())

    return max(one_sided(a, b), one_sided(b, a))


# -------------------------------------------------------- correspondences

def _as_matrix(sample):
    if isinstance(sample, NetSample):
        return sample.matrix()
    if hasattr(sample, "matrix") and not isinstance(sample, np.ndarray):
        m = sample.matrix
        return m() if callable(m) else m
    return np.asarray(sample, dtype=np.float64)


@dataclass
class Correspondence:
    sample_a: object
    sample_b: object
    relation: list  # index pairs (i, j)
    distortion: float = 0.0

    def __post_init__(self):
        da = _as_matrix(self.sample_a)
        db = _as_matrix(self.sample_b)
        ia = {i for i, _ in self.relation}
        ib = {j for _, j in self.relation}
        if ia != set(range(len(da))) or ib != set(range(len(db))):
            raise RelationCoverageError(
                "relation must cover every point on both sides")
        self.distortion = correspondence_distortion(da, db, self.relation)


def correspondence_distortion(sample_a, sample_b, relation) -> float:
    """max over pairs of pairs of the pairwise-distance deviation."""
    da = _as_matrix(sample_a)
    db = _as_matrix(sample_b)
    ia = {i for i, _ in relation}
    ib = {j for _, j in relation}
    if ia != set(range(len(da))) or ib != set(range(len(db))):
        raise RelationCoverageError("relation must cover every point on both sides")
    i = np.array([p[0] for p in relation])
    j = np.array([p[1] for p in relation])
    return float(np.abs(da[np.ix_(i, i)] - db[np.ix_(j, j)]).max())


def _greedy_relation(da, db):
    """Sequential low-distortion pairing covering both sides."""
    n, m = len(da), len(db)
    relation = [(0, 0)]
    used_b = {0}
    for i in range(1, n):
        best_j, best_val = 0, math.inf
        for j in range(m):
            val = max(abs(da[i, p] - db[j, q]) for p, q in relation)
            if val < best_val:
                best_j, best_val = j, val
        relation.append((i, best_j))
        used_b.add(best_j)
    for j in range(m):
        if j in used_b:
            continue
        best_i, best_val = 0, math.inf
        for i in range(n):
            val = max(abs(da[i, p] - db[j, q]) for p, q in relation)
            if val < best_val:
                best_i, best_val = i, val
        relation.append((best_i, j))
    return relation


@dataclass
class GHBound:
    bound: float          # 2r + distortion, the certified composite bound
    distortion: float
    r: float
    method: str
    net_size_a: int
    net_size_b: int
    half_distortion_bound: float = 0.0  # tighter 2r + distortion/2, informational

    def to_json(self):
        return {
            "bound": self.bound,
            "distortion": self.distortion,
            "r": self.r,
            "method": self.method,
            "net_size_a": self.net_size_a,
            "net_size_b": self.net_size_b,
            "half_distortion_bound": self.half_distortion_bound,
        }


def gh_upper_bound(space_a, space_b, r, method="greedy", mapping=None,
                   probe_density=None) -> GHBound:
    """Certified upper bound 2r + distortion via r-nets.

    method: "exact" (brute-force bijection, equal net sizes <= 8),
    "greedy" (sequential pairing), or "map" (a provided point map from
    space_a onto space_b; its net image is verified to be an r-net).
    """
    if r <= 0:
        raise ValueError("net radius must be positive")
    aliases = {"exact-bijection": "exact", "provided-map": "map"}
    method = aliases.get(method, method)
    net_a = build_net(space_a, r, probe_density)
    if method == "map":
        if mapping is None:
            raise ValueError("method='map' needs a mapping")
        images = [mapping(p) for p in net_a.points]
        net_b = NetSample(space_b, images, r)
        if not net_b.verify(r / 4):
            raise LengthSpaceError("mapped net does not cover the target space")
        relation = [(i, i) for i in range(len(images))]
    else:
        net_b = build_net(space_b, r, probe_density)
        da, db = net_a.matrix(), net_b.matrix()
        if method == "exact":
            if len(da) != len(db):
                raise UnsupportedOperationError(
                    "exact method needs nets of equal cardinality; use greedy")
            if len(da) > 8:
                raise UnsupportedOperationError(
                    "exact method is limited to nets of <= 8 points; use greedy")
            best_perm, best_val = None, math.inf
            for perm in itertools.permutations(range(len(db))):
                val = float(np.abs(da - db[np.ix_(perm, perm)]).max())
                if val < best_val:
                    best_perm, best_val = perm, val
            relation = [(i, best_perm[i]) for i in range(len(da))]
        elif method == "greedy":
            relation = _greedy_relation(da, db)
        else:
            raise ValueError(f"unknown method {method!r}")
    dis = correspondence_distortion(net_a, net_b, relation)
    return GHBound(bound=2 * r + dis, distortion=dis, r=r, method=method,
                   net_size_a=len(net_a.points), net_size_b=len(net_b.points),
                   half_distortion_bound=2 * r + 0.5 * dis)


# -------------------------------------------------------------- gap check

@dataclass
class GapResult:
    gap: bool
    interval: tuple
    witnesses: list  # offending entries when occupied

    def to_json(self):
        return {"gap": self.gap, "interval": list(self.interval),
                "witnesses": [e.to_json() for e in self.witnesses]}


def gap_check(spec, a, b, eps) -> GapResult:
    """Is [a+eps, b-eps] free of spectrum entries?"""
    if a >= b:
        raise ValueError("need a < b")
    lo, hi = a + eps, b - eps
    offenders = [e for e in spec.entries if lo <= e.length <= hi]
    return GapResult(gap=not offenders, interval=(lo, hi), witnesses=offenders)


# --------------------------------------------------- convergence harness

@dataclass
class MemberRecord:
    param: float
    label: str
    lengths: list
    hausdorff: float
    gh_bound: GHBound | None
    inclusion: str          # "true" | "false" | "inconclusive"
    undecided: int = 0
    complete: bool = True
    extra: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "param": self.param,
            "space": self.label,
            "lengths": self.lengths,
            "hausdorff": self.hausdorff,
            "gh_bound": self.gh_bound.to_json() if self.gh_bound else None,
            "inclusion": self.inclusion,
            "undecided": self.undecided,
            "complete": self.complete,
            **self.extra,
        }


@dataclass
class ConvergenceReport:
    family: str
    limit_label: str
    k: int
    R: float
    eps: float
    limit_lengths: list
    members: list
    hausdorff_nonincreasing: bool = False
    hausdorff_strictly_decreasing: bool = False

    def to_json(self):
        return {
            "family": self.family,
            "limit": self.limit_label,
            "k": self.k,
            "R": self.R,
            "eps": self.eps,
            "limit_lengths": self.limit_lengths,
            "members": [m.to_json() for m in self.members],
            "hausdorff_nonincreasing": self.hausdorff_nonincreasing,
            "hausdorff_strictly_decreasing": self.hausdorff_strictly_decreasing,
        }

    def plot_rows(self):
        return [(m.param, m.hausdorff,
                 m.gh_bound.bound if m.gh_bound else "") for m in self.members]


def convergence_experiment(family, limit, k, R, eps, members, delta=None,
                           gh_r=None, mapping_factory=None, family_label="family",
                           member_extra=None, threads=1) -> ConvergenceReport:
    """Per member: 1/k spectrum, inclusion in T_eps(limit spectrum + {0}),
    Hausdorff distance to that augmented limit set, and a GH bound.

    ``family`` maps a parameter to a space; ``mapping_factory`` (optional)
    maps a parameter to a point map member -> limit used for the GH bound.
    The family is assumed ordered toward the limit; monotonicity of the
    Hausdorff distances is reported, not assumed.
    """
    limit_spec = spectrum_1_over_k(limit, k, R, delta)
    limit_set = sorted({0.0} | {ln for ln in limit_spec.lengths if ln <= R + EPS_LEN})

    def run(param):
        space = family(param)
        sp = spectrum_1_over_k(space, k, R, delta)
        lengths = [ln for ln in sp.lengths if ln <= R + EPS_LEN]
        dh = hausdorff_distance_reals(lengths + [0.0], limit_set)
        if sp.undecided:
            inclusion = "inconclusive"
        else:
            ok = all(min(abs(ln - x) for x in limit_set) <= eps for ln in lengths)
            inclusion = "true" if ok else "false"
        bound = None
        if gh_r is not None:
            if mapping_factory is not None:
                bound = gh_upper_bound(space, limit, gh_r, method="map",
                                       mapping=mapping_factory(param))
            else:
                bound = gh_upper_bound(space, limit, gh_r, method="greedy")
        extra = member_extra(param, space, sp) if member_extra else {}
        return MemberRecord(param=param, label=space.label(), lengths=lengths,
                            hausdorff=dh, gh_bound=bound, inclusion=inclusion,
                            undecided=len(sp.undecided), complete=sp.complete,
                            extra=extra)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run, members))
    else:
        records = [run(p) for p in members]

    dhs = [m.hausdorff for m in records]
    report = ConvergenceReport(
        family=family_label, limit_label=limit.label(), k=k, R=R, eps=eps,
        limit_lengths=list(limit_set), members=records,
        hausdorff_nonincreasing=all(y <= x + EPS_LEN for x, y in zip(dhs, dhs[1:])),
        hausdorff_strictly_decreasing=all(y < x - EPS_LEN for x, y in zip(dhs, dhs[1:])),
    )
    return report
