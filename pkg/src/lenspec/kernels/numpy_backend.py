"""Pure-numpy implementations of the hot kernels.

Every function here has a twin in ``numba_backend`` with identical
signature and semantics; the package-level ``kernels`` namespace picks
one of the two at import time.  All inputs are plain float64/int64
ndarrays, all angles are arc positions (lengths along the circle), all
curve parameters are arclengths in [0, L].
"""

import numpy as np


# ---------------------------------------------------------------- circle

def circle_dist(a, b, c):
    d = np.abs(np.asarray(a) - np.asarray(b)) % c
    return np.minimum(d, c - d)


def circle_pdist(a, b, c):
    return circle_dist(np.asarray(a)[:, None], np.asarray(b)[None, :], c)


def circle_eval(cum, lift, a):
    # lift is piecewise linear in arclength with slopes +-1
    return np.interp(a, cum, lift)


def circle_chord(cum, lift, c, length, t, s):
    x = np.interp(np.mod(t, length), cum, lift)
    y = np.interp(np.mod(t + s, length), cum, lift)
    return circle_dist(x, y, c)


# ----------------------------------------------------------------- torus

def torus_dist(a, b, circ):
    d = np.abs(np.asarray(a) - np.asarray(b)) % circ
    d = np.minimum(d, circ - d)
    return np.sqrt((d * d).sum(axis=-1))


def torus_pdist(a, b, circ):
    return torus_dist(np.asarray(a)[:, None, :], np.asarray(b)[None, :, :], circ)


def torus_eval(cum, lifts, circ, a):
    out = np.empty((len(a), lifts.shape[1]))
    for j in range(lifts.shape[1]):
        out[:, j] = np.interp(a, cum, lifts[:, j])
    return out


def torus_chord(cum, lifts, circ, length, t, s):
    x = torus_eval(cum, lifts, circ, np.mod(t, length))
    y = torus_eval(cum, lifts, circ, np.mod(t + s, length))
    return torus_dist(x, y, circ)


# ---------------------------------------------------------------- sphere

def sphere_dist(u, v):
    dots = np.clip((np.asarray(u) * np.asarray(v)).sum(axis=-1), -1.0, 1.0)
    return np.arccos(dots)


def sphere_pdist(u, v):
    dots = np.clip(np.asarray(u) @ np.asarray(v).T, -1.0, 1.0)
    return np.arccos(dots)


def sphere_eval(cum, nodes, thetas, a):
    a = np.asarray(a)
    j = np.clip(np.searchsorted(cum, a, side="right") - 1, 0, len(thetas) - 1)
    seg = cum[j + 1] - cum[j]
    f = np.where(seg > 0.0, (a - cum[j]) / np.where(seg > 0.0, seg, 1.0), 0.0)
    th = thetas[j]
    small = th < 1e-12
    sin_th = np.where(small, 1.0, np.sin(th))
    w0 = np.where(small, 1.0 - f, np.sin((1.0 - f) * th) / sin_th)
    w1 = np.where(small, f, np.sin(f * th) / sin_th)
    out = w0[:, None] * nodes[j] + w1[:, None] * nodes[j + 1]
    norms = np.sqrt((out * out).sum(axis=1))
    return out / norms[:, None]


def sphere_chord(cum, nodes, thetas, length, t, s):
    x = sphere_eval(cum, nodes, thetas, np.mod(t, length))
    y = sphere_eval(cum, nodes, thetas, np.mod(t + s, length))
    return sphere_dist(x, y)


# ----------------------------------------------------------------- graph
#
# Packed graph points are six parallel arrays:
#   end1, cost1, end2, cost2 : nearest skeleton vertices and offsets
#   edge, off                : edge id (-1 for a vertex point) and raw offset

def graph_dist(e1a, c1a, e2a, c2a, ida, offa, e1b, c1b, e2b, c2b, idb, offb, dmat):
    d = c1a + dmat[e1a, e1b] + c1b
    d = np.minimum(d, c1a + dmat[e1a, e2b] + c2b)
    d = np.minimum(d, c2a + dmat[e2a, e1b] + c1b)
    d = np.minimum(d, c2a + dmat[e2a, e2b] + c2b)
    same = (ida == idb) & (ida >= 0)
    return np.where(same, np.minimum(d, np.abs(offa - offb)), d)


def graph_pdist(pa, pb, dmat):
    e1a, c1a, e2a, c2a, ida, offa = (x[:, None] for x in pa)
    e1b, c1b, e2b, c2b, idb, offb = (x[None, :] for x in pb)
    return graph_dist(e1a, c1a, e2a, c2a, ida, offa,
                      e1b, c1b, e2b, c2b, idb, offb, dmat)


def graph_eval(cum, eidx, soff, sgn, a):
    j = np.clip(np.searchsorted(cum, a, side="right") - 1, 0, len(eidx) - 1)
    off = soff[j] + sgn[j] * (a - cum[j])
    return eidx[j], off


def graph_chord(cum, eidx, soff, sgn, eu, ev, elen, dmat, length, t, s):
    ea, oa = graph_eval(cum, eidx, soff, sgn, np.mod(t, length))
    eb, ob = graph_eval(cum, eidx, soff, sgn, np.mod(t + s, length))
    return graph_dist(eu[ea], oa, ev[ea], elen[ea] - oa, ea, oa,
                      eu[eb], ob, ev[eb], elen[eb] - ob, eb, ob, dmat)


# ------------------------------------------------------- unified dispatch

def chord_eval(kind, data, t, s):
    """d(c(t), c(t+s)) for arclength arrays t, s on a packed curve."""
    t = np.asarray(t, dtype=np.float64)
    s = np.broadcast_to(np.asarray(s, dtype=np.float64), t.shape)
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


_chord = chord_eval


def injrad_scan(kind, data, t, length, slack, iters):
    """Per-basepoint largest h with d(c(t), c(t+h)) = h, by bisection.

    The predicate is monotone in h; h is an arclength in [0, L/2].
    """
    t = np.asarray(t, dtype=np.float64)
    half = np.full_like(t, 0.5 * length)
    ok_at_half = _chord(kind, data, t, half) >= half - slack
    lo = np.zeros_like(t)
    hi = half.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        good = _chord(kind, data, t, mid) >= mid - slack
        lo = np.where(good, mid, lo)
        hi = np.where(good, hi, mid)
    return np.where(ok_at_half, half, lo)
