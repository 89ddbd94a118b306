"""Benchmark the numba kernels against the pure-numpy fallback.

Runs every hot kernel on representative inputs for both backends and
prints a timing table.  Usage: python benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from lenspec.kernels import numpy_backend

try:
    from lenspec.kernels import numba_backend
except ImportError:
    numba_backend = None

TWO_PI = 2.0 * math.pi


def make_cases(n_grid=65536):
    rng = np.random.default_rng(0)
    t = rng.uniform(0.0, TWO_PI, n_grid)
    s = np.full(n_grid, TWO_PI / 4)

    cum = np.array([0.0, TWO_PI / 3, 2 * TWO_PI / 3, TWO_PI])
    lift = np.array([0.0, TWO_PI / 3, 2 * TWO_PI / 3, TWO_PI])
    circle_data = (cum, lift, TWO_PI, TWO_PI)

    lifts = np.stack([lift, 0.5 * lift], axis=1)
    torus_data = (cum, lifts, np.array([TWO_PI, math.pi]), TWO_PI)

    ang = np.array([0.0, TWO_PI / 3, 2 * TWO_PI / 3, TWO_PI])
    nodes = np.stack([np.cos(ang), np.sin(ang), np.zeros_like(ang)], axis=1)
    thetas = np.diff(ang)
    sphere_data = (cum, nodes, thetas, TWO_PI)

    # theta graph digon traversed repeatedly
    dmat = np.array([[0.0, 1.0], [1.0, 0.0]])
    eu = np.array([0, 0, 0], dtype=np.int64)
    ev = np.array([1, 1, 1], dtype=np.int64)
    elen = np.array([1.0, 1.0, 1.0])
    gcum = np.array([0.0, 1.0, 2.0])
    eidx = np.array([0, 1], dtype=np.int64)
    soff = np.array([0.0, 1.0])
    sgn = np.array([1.0, -1.0])
    graph_data = (gcum, eidx, soff, sgn, eu, ev, elen, dmat, 2.0)

    pts = rng.uniform(0.0, TWO_PI, 1024)
    torus_pts = rng.uniform(0.0, TWO_PI, (1024, 2))
    sph = rng.normal(size=(1024, 3))
    sph /= np.linalg.norm(sph, axis=1)[:, None]

    ge = rng.integers(0, 3, 1024)
    go = rng.uniform(0.0, 1.0, 1024)
    gpacked = (eu[ge], go, ev[ge], elen[ge] - go, ge.astype(np.int64), go)

    cases = [
        ("circle_chord", lambda b: b.chord_eval(0, circle_data, t, s)),
        ("torus_chord", lambda b: b.chord_eval(1, torus_data, t, s)),
        ("sphere_chord", lambda b: b.chord_eval(2, sphere_data, t, s)),
        ("graph_chord", lambda b: b.chord_eval(3, graph_data, t % 2.0, s % 2.0)),
        ("circle_pdist", lambda b: b.circle_pdist(pts, pts, TWO_PI)),
        ("torus_pdist", lambda b: b.torus_pdist(torus_pts, torus_pts,
                                                np.array([TWO_PI, math.pi]))),
        ("sphere_pdist", lambda b: b.sphere_pdist(sph, sph)),
        ("graph_pdist", lambda b: b.graph_pdist(gpacked, gpacked, dmat)),
        ("injrad_circle", lambda b: b.injrad_scan(0, circle_data, t[:4096],
                                                  TWO_PI, 1e-9, 50)),
        ("injrad_graph", lambda b: b.injrad_scan(3, graph_data, t[:4096] % 2.0,
                                                 2.0, 1e-9, 50)),
    ]
    return cases


def bench(fn, backend, repeat=5):
    fn(backend)  # warmup / jit compile
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    cases = make_cases()
    print(f"{'kernel':<16} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, fn in cases:
        t_np = bench(fn, numpy_backend)
        if numba_backend is None:
            print(f"{name:<16} {t_np * 1e3:9.3f}ms {'n/a':>10} {'':>8}")
            continue
        t_nb = bench(fn, numba_backend)
        print(f"{name:<16} {t_np * 1e3:9.3f}ms {t_nb * 1e3:9.3f}ms "
              f"{t_np / t_nb:7.1f}x")
    # cross-check both backends agree (arccos amplifies last-ulp dot
    # differences near +-1, hence the looser sphere tolerance)
    if numba_backend is not None:
        for name, fn in cases:
            tol = 1e-6 if name.startswith("sphere") else 1e-12
            a = np.asarray(fn(numpy_backend), dtype=np.float64)
            b = np.asarray(fn(numba_backend), dtype=np.float64)
            if not np.allclose(a, b, atol=tol, rtol=0):
                raise SystemExit(f"backend mismatch in {name}")
        print("backends agree on every case")


if __name__ == "__main__":
    main()
