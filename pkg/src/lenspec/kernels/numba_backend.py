"""Numba-jitted implementations of the hot kernels.

Signature-compatible with ``numpy_backend``; scalar inner loops let the
bisection scans exit early per basepoint instead of running all lanes.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _locate(cum, a):
    lo = 0
    hi = cum.shape[0] - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cum[mid] <= a:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------- circle

@njit(cache=True, inline="always")
def _circle_dist1(a, b, c):
    d = abs(a - b) % c
    if d > c - d:
        d = c - d
    return d


@njit(cache=True)
def circle_dist(a, b, c):
    out = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        out[i] = _circle_dist1(a[i], b[i], c)
    return out


@njit(cache=True)
def circle_pdist(a, b, c):
    out = np.empty((a.shape[0], b.shape[0]))
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i, j] = _circle_dist1(a[i], b[j], c)
    return out


@njit(cache=True, inline="always")
def _pl_eval(cum, lift, a):
    j = _locate(cum, a)
    seg = cum[j + 1] - cum[j]
    if seg <= 0.0:
        return lift[j]
    f = (a - cum[j]) / seg
    return lift[j] + (lift[j + 1] - lift[j]) * f


@njit(cache=True)
def circle_eval(cum, lift, a):
    out = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        out[i] = _pl_eval(cum, lift, a[i])
    return out


@njit(cache=True, inline="always")
def _circle_chord1(cum, lift, c, length, t, s):
    x = _pl_eval(cum, lift, t % length)
    y = _pl_eval(cum, lift, (t + s) % length)
    return _circle_dist1(x, y, c)


@njit(cache=True)
def circle_chord(cum, lift, c, length, t, s):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _circle_chord1(cum, lift, c, length, t[i], s[i])
    return out


# ----------------------------------------------------------------- torus

@njit(cache=True, inline="always")
def _torus_dist1(a, b, circ):
    acc = 0.0
    for q in range(circ.shape[0]):
        d = _circle_dist1(a[q], b[q], circ[q])
        acc += d * d
    return math.sqrt(acc)


@njit(cache=True)
def torus_dist(a, b, circ):
    out = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        out[i] = _torus_dist1(a[i], b[i], circ)
    return out


@njit(cache=True)
def torus_pdist(a, b, circ):
    out = np.empty((a.shape[0], b.shape[0]))
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i, j] = _torus_dist1(a[i], b[j], circ)
    return out


@njit(cache=True)
def torus_eval(cum, lifts, circ, a):
    out = np.empty((a.shape[0], lifts.shape[1]))
    for i in range(a.shape[0]):
        j = _locate(cum, a[i])
        seg = cum[j + 1] - cum[j]
        f = (a[i] - cum[j]) / seg if seg > 0.0 else 0.0
        for q in range(lifts.shape[1]):
            out[i, q] = lifts[j, q] + (lifts[j + 1, q] - lifts[j, q]) * f
    return out


@njit(cache=True, inline="always")
def _torus_chord1(cum, lifts, circ, length, t, s):
    a = t % length
    b = (t + s) % length
    ja = _locate(cum, a)
    jb = _locate(cum, b)
    sega = cum[ja + 1] - cum[ja]
    segb = cum[jb + 1] - cum[jb]
    fa = (a - cum[ja]) / sega if sega > 0.0 else 0.0
    fb = (b - cum[jb]) / segb if segb > 0.0 else 0.0
    acc = 0.0
    for q in range(lifts.shape[1]):
        xa = lifts[ja, q] + (lifts[ja + 1, q] - lifts[ja, q]) * fa
        xb = lifts[jb, q] + (lifts[jb + 1, q] - lifts[jb, q]) * fb
        d = _circle_dist1(xa, xb, circ[q])
        acc += d * d
    return math.sqrt(acc)


@njit(cache=True)
def torus_chord(cum, lifts, circ, length, t, s):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _torus_chord1(cum, lifts, circ, length, t[i], s[i])
    return out


# ---------------------------------------------------------------- sphere

@njit(cache=True)
def sphere_dist(u, v):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        d = u[i, 0] * v[i, 0] + u[i, 1] * v[i, 1] + u[i, 2] * v[i, 2]
        if d > 1.0:
            d = 1.0
        elif d < -1.0:
            d = -1.0
        out[i] = math.acos(d)
    return out


@njit(cache=True)
def sphere_pdist(u, v):
    out = np.empty((u.shape[0], v.shape[0]))
    for i in range(u.shape[0]):
        for j in range(v.shape[0]):
            d = u[i, 0] * v[j, 0] + u[i, 1] * v[j, 1] + u[i, 2] * v[j, 2]
            if d > 1.0:
                d = 1.0
            elif d < -1.0:
                d = -1.0
            out[i, j] = math.acos(d)
    return out


@njit(cache=True, inline="always")
def _sphere_eval1(cum, nodes, thetas, a, out):
    j = _locate(cum, a)
    seg = cum[j + 1] - cum[j]
    f = (a - cum[j]) / seg if seg > 0.0 else 0.0
    th = thetas[j]
    if th < 1e-12:
        w0 = 1.0 - f
        w1 = f
    else:
        s = math.sin(th)
        w0 = math.sin((1.0 - f) * th) / s
        w1 = math.sin(f * th) / s
    nrm = 0.0
    for q in range(3):
        out[q] = w0 * nodes[j, q] + w1 * nodes[j + 1, q]
        nrm += out[q] * out[q]
    nrm = math.sqrt(nrm)
    for q in range(3):
        out[q] /= nrm


@njit(cache=True)
def sphere_eval(cum, nodes, thetas, a):
    out = np.empty((a.shape[0], 3))
    for i in range(a.shape[0]):
        _sphere_eval1(cum, nodes, thetas, a[i], out[i])
    return out


@njit(cache=True, inline="always")
def _sphere_chord1(cum, nodes, thetas, length, t, s, bufx, bufy):
    _sphere_eval1(cum, nodes, thetas, t % length, bufx)
    _sphere_eval1(cum, nodes, thetas, (t + s) % length, bufy)
    d = bufx[0] * bufy[0] + bufx[1] * bufy[1] + bufx[2] * bufy[2]
    if d > 1.0:
        d = 1.0
    elif d < -1.0:
        d = -1.0
    return math.acos(d)


@njit(cache=True)
def sphere_chord(cum, nodes, thetas, length, t, s):
    out = np.empty(t.shape[0])
    bufx = np.empty(3)
    bufy = np.empty(3)
    for i in range(t.shape[0]):
        out[i] = _sphere_chord1(cum, nodes, thetas, length, t[i], s[i], bufx, bufy)
    return out


# ----------------------------------------------------------------- graph

@njit(cache=True, inline="always")
def _graph_dist1(e1a, c1a, e2a, c2a, ida, offa,
                 e1b, c1b, e2b, c2b, idb, offb, dmat):
    d = c1a + dmat[e1a, e1b] + c1b
    d2 = c1a + dmat[e1a, e2b] + c2b
    if d2 < d:
        d = d2
    d2 = c2a + dmat[e2a, e1b] + c1b
    if d2 < d:
        d = d2
    d2 = c2a + dmat[e2a, e2b] + c2b
    if d2 < d:
        d = d2
    if ida == idb and ida >= 0:
        d2 = abs(offa - offb)
        if d2 < d:
            d = d2
    return d


@njit(cache=True)
def graph_dist(e1a, c1a, e2a, c2a, ida, offa, e1b, c1b, e2b, c2b, idb, offb, dmat):
    out = np.empty(e1a.shape[0])
    for i in range(e1a.shape[0]):
        out[i] = _graph_dist1(e1a[i], c1a[i], e2a[i], c2a[i], ida[i], offa[i],
                              e1b[i], c1b[i], e2b[i], c2b[i], idb[i], offb[i], dmat)
    return out


@njit(cache=True)
def graph_pdist(pa, pb, dmat):
    e1a, c1a, e2a, c2a, ida, offa = pa
    e1b, c1b, e2b, c2b, idb, offb = pb
    out = np.empty((e1a.shape[0], e1b.shape[0]))
    for i in range(e1a.shape[0]):
        for j in range(e1b.shape[0]):
            out[i, j] = _graph_dist1(e1a[i], c1a[i], e2a[i], c2a[i], ida[i], offa[i],
                                     e1b[j], c1b[j], e2b[j], c2b[j], idb[j], offb[j],
                                     dmat)
    return out


@njit(cache=True)
def graph_eval(cum, eidx, soff, sgn, a):
    n = a.shape[0]
    eout = np.empty(n, dtype=np.int64)
    oout = np.empty(n)
    for i in range(n):
        j = _locate(cum, a[i])
        eout[i] = eidx[j]
        oout[i] = soff[j] + sgn[j] * (a[i] - cum[j])
    return eout, oout


@njit(cache=True, inline="always")
def _graph_chord1(cum, eidx, soff, sgn, eu, ev, elen, dmat, length, t, s):
    a = t % length
    b = (t + s) % length
    ja = _locate(cum, a)
    jb = _locate(cum, b)
    ea = eidx[ja]
    eb = eidx[jb]
    oa = soff[ja] + sgn[ja] * (a - cum[ja])
    ob = soff[jb] + sgn[jb] * (b - cum[jb])
    return _graph_dist1(eu[ea], oa, ev[ea], elen[ea] - oa, ea, oa,
                        eu[eb], ob, ev[eb], elen[eb] - ob, eb, ob, dmat)


@njit(cache=True)
def graph_chord(cum, eidx, soff, sgn, eu, ev, elen, dmat, length, t, s):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _graph_chord1(cum, eidx, soff, sgn, eu, ev, elen, dmat,
                               length, t[i], s[i])
    return out


# ------------------------------------------------------- injrad bisection

@njit(cache=True)
def _circle_injrad(cum, lift, c, length, t, slack, iters):
    out = np.empty(t.shape[0])
    half = 0.5 * length
    for i in range(t.shape[0]):
        ti = t[i]
        if _circle_chord1(cum, lift, c, length, ti, half) >= half - slack:
            out[i] = half
            continue
        lo = 0.0
        hi = half
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if _circle_chord1(cum, lift, c, length, ti, mid) >= mid - slack:
                lo = mid
            else:
                hi = mid
        out[i] = lo
    return out


@njit(cache=True)
def _torus_injrad(cum, lifts, circ, length, t, slack, iters):
    out = np.empty(t.shape[0])
    half = 0.5 * length
    for i in range(t.shape[0]):
        ti = t[i]
        if _torus_chord1(cum, lifts, circ, length, ti, half) >= half - slack:
            out[i] = half
            continue
        lo = 0.0
        hi = half
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if _torus_chord1(cum, lifts, circ, length, ti, mid) >= mid - slack:
                lo = mid
            else:
                hi = mid
        out[i] = lo
    return out


@njit(cache=True)
def _sphere_injrad(cum, nodes, thetas, length, t, slack, iters):
    out = np.empty(t.shape[0])
    bufx = np.empty(3)
    bufy = np.empty(3)
    half = 0.5 * length
    for i in range(t.shape[0]):
        ti = t[i]
        if _sphere_chord1(cum, nodes, thetas, length, ti, half, bufx, bufy) >= half - slack:
            out[i] = half
            continue
        lo = 0.0
        hi = half
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if _sphere_chord1(cum, nodes, thetas, length, ti, mid, bufx, bufy) >= mid - slack:
                lo = mid
            else:
                hi = mid
        out[i] = lo
    return out


@njit(cache=True)
def _graph_injrad(cum, eidx, soff, sgn, eu, ev, elen, dmat, length, t, slack, iters):
    out = np.empty(t.shape[0])
    half = 0.5 * length
    for i in range(t.shape[0]):
        ti = t[i]
        if _graph_chord1(cum, eidx, soff, sgn, eu, ev, elen, dmat, length, ti, half) >= half - slack:
            out[i] = half
            continue
        lo = 0.0
        hi = half
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if _graph_chord1(cum, eidx, soff, sgn, eu, ev, elen, dmat, length, ti, mid) >= mid - slack:
                lo = mid
            else:
                hi = mid
        out[i] = lo
    return out


def chord_eval(kind, data, t, s):
    """d(c(t), c(t+s)) for arclength arrays t, s on a packed curve."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    s = np.ascontiguousarray(np.broadcast_to(np.asarray(s, dtype=np.float64), t.shape))
    if kind == 0:
        cum, lift, c, length = data
        return circle_chord(cum, lift, c, length, t, s)
    if kind == 1:
        cum, lifts, circ, length = data
        return torus_chord(cum, lifts, circ, length, t, s)
    if kind == 2:
        cum, nodes, thetas, length = data
        return sphere_chord(cum, nodes, thetas, length, t, s)
    cum, eidx, soff, sgn, eu, ev, elen, dmat, length = data
    return graph_chord(cum, eidx, soff, sgn, eu, ev, elen, dmat, length, t, s)


def injrad_scan(kind, data, t, length, slack, iters):
    t = np.ascontiguousarray(t, dtype=np.float64)
    if kind == 0:
        cum, lift, c, _ = data
        return _circle_injrad(cum, lift, c, length, t, slack, iters)
    if kind == 1:
        cum, lifts, circ, _ = data
        return _torus_injrad(cum, lifts, circ, length, t, slack, iters)
    if kind == 2:
        cum, nodes, thetas, _ = data
        return _sphere_injrad(cum, nodes, thetas, length, t, slack, iters)
    cum, eidx, soff, sgn, eu, ev, elen, dmat, _ = data
    return _graph_injrad(cum, eidx, soff, sgn, eu, ev, elen, dmat,
                         length, t, slack, iters)
