"""Hot numeric kernels with a numba fast path and a numpy fallback.

The backend is chosen once at import time from the ``LSL_KERNELS``
environment variable:

    LSL_KERNELS=numba   use the jitted kernels (error message if unavailable)
    LSL_KERNELS=numpy   force the pure-numpy fallback
    unset / auto        numba when importable, numpy otherwise

``benchmarks/bench_kernels.py`` times the two implementations against
each other; ``tests/test_kernels.py`` asserts they agree.
"""

import os
import warnings

from . import numpy_backend

_requested = os.environ.get("LSL_KERNELS", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    warnings.warn(f"LSL_KERNELS={_requested!r} not recognized, using auto")
    _requested = "auto"

if _requested == "numpy":
    _impl = numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import numba_backend as _impl
        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            warnings.warn("LSL_KERNELS=numba but numba is not importable; "
                          "falling back to numpy kernels")
        _impl = numpy_backend
        BACKEND = "numpy"

circle_dist = _impl.circle_dist
circle_pdist = _impl.circle_pdist
circle_eval = _impl.circle_eval
circle_chord = _impl.circle_chord
torus_dist = _impl.torus_dist
torus_pdist = _impl.torus_pdist
torus_eval = _impl.torus_eval
torus_chord = _impl.torus_chord
sphere_dist = _impl.sphere_dist
sphere_pdist = _impl.sphere_pdist
sphere_eval = _impl.sphere_eval
sphere_chord = _impl.sphere_chord
graph_dist = _impl.graph_dist
graph_pdist = _impl.graph_pdist
graph_eval = _impl.graph_eval
graph_chord = _impl.graph_chord
chord_eval = _impl.chord_eval
injrad_scan = _impl.injrad_scan

# curve-kind codes used by chord_eval / injrad_scan dispatch
KIND_CIRCLE = 0
KIND_TORUS = 1
KIND_SPHERE = 2
KIND_GRAPH = 3


def backend_name():
    return BACKEND


def warmup():
    """Trigger jit compilation of every kernel on tiny inputs."""
    import numpy as np

    cum = np.array([0.0, 1.0, 2.0])
    lift = np.array([0.0, 1.0, 2.0])
    t = np.array([0.1, 0.7])
    s = np.array([0.3, 0.3])
    circle_dist(t, s, 2.0)
    circle_pdist(t, s, 2.0)
    circle_eval(cum, lift, t)
    chord_eval(KIND_CIRCLE, (cum, lift, 2.0, 2.0), t, s)
    injrad_scan(KIND_CIRCLE, (cum, lift, 2.0, 2.0), t, 2.0, 1e-9, 4)

    lifts = np.stack([lift, lift], axis=1)
    circ = np.array([2.0, 2.0])
    pts = np.array([[0.1, 0.2], [0.5, 0.6]])
    torus_dist(pts, pts, circ)
    torus_pdist(pts, pts, circ)
    torus_eval(cum, lifts, circ, t)
    chord_eval(KIND_TORUS, (cum, lifts, circ, 2.0), t, s)
    injrad_scan(KIND_TORUS, (cum, lifts, circ, 2.0), t, 2.0, 1e-9, 4)

    nodes = np.array([[1.0, 0, 0], [0, 1.0, 0], [-1.0, 0, 0]])
    thetas = np.array([np.pi / 2, np.pi / 2])
    u = nodes[:2]
    sphere_dist(u, u)
    sphere_pdist(u, u)
    sphere_eval(cum * (np.pi / 2), nodes, thetas, t)
    sdata = (cum * (np.pi / 2), nodes, thetas, np.pi)
    chord_eval(KIND_SPHERE, sdata, t, s)
    injrad_scan(KIND_SPHERE, sdata, t, np.pi, 1e-9, 4)

    dmat = np.array([[0.0, 1.0], [1.0, 0.0]])
    eu = np.array([0, 0], dtype=np.int64)
    ev = np.array([1, 1], dtype=np.int64)
    elen = np.array([1.0, 1.0])
    eidx = np.array([0, 1], dtype=np.int64)
    soff = np.array([0.0, 1.0])
    sgn = np.array([1.0, -1.0])
    pa = (eu, soff, ev, elen - soff, eidx, soff)
    graph_dist(*pa, *pa, dmat)
    graph_pdist(pa, pa, dmat)
    graph_eval(cum, eidx, soff, sgn, t)
    gdata = (cum, eidx, soff, sgn, eu, ev, elen, dmat, 2.0)
    chord_eval(KIND_GRAPH, gdata, t, s)
    injrad_scan(KIND_GRAPH, gdata, t, 2.0, 1e-9, 4)
