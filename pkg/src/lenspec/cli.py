"""Command-line interface.

Subcommands: spectrum, minind, systole, energy, gh, converge, gap.
Outputs are deterministic for a fixed config and seed; every artifact
embeds the resolved config and the tool version.  Exit codes: 0 success,
2 success with undecided entries, 1 error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .defaults import K_MAX_DEFAULT, TOL_GRAD
from .energy import find_critical_points, open_index_search
from .errors import LengthSpaceError
from .gh import convergence_experiment, gap_check, gh_upper_bound
from .graphspace import MetricGraph
from .meshspace import (doubled_disk_mapping, doubled_disk_mesh, ellipsoid_mesh,
                        equator_curve)
from .serialize import dump_json, parse_number, parse_space_spec, plot_csv, \
    spectrum_csv
from .spaces import Circle, FlatTorus
from .spectra import (min_length_bounds, space_minind, spectrum,
                      spectrum_1_over_k, spectrum_open_1_over_k, systole)


def _write(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("LSL_THREADS")
    return max(1, int(env)) if env else 1


def cmd_spectrum(args):
    space = parse_space_spec(args.space)
    r = parse_number(args.R) if args.R is not None else None
    config = {"command": "spectrum", "space": args.space, "k": args.k,
              "R": r, "delta": args.delta, "open": args.open,
              "format": args.format, "seed": args.seed}
    if args.k is None:
        if r is None:
            raise LengthSpaceError("a full spectrum needs an explicit --R")
        sp = spectrum(space, r, delta=args.delta, with_indices=True,
                      seed=args.seed)
    elif args.open:
        sp = spectrum_open_1_over_k(space, args.k, r, delta=args.delta,
                                    seed=args.seed)
    else:
        sp = spectrum_1_over_k(space, args.k, r, delta=args.delta,
                               seed=args.seed)
    if args.format == "csv":
        _write(spectrum_csv(sp), args.out)
    else:
        _write(dump_json(config, sp.to_json()), args.out)
    return 2 if sp.undecided else 0


def cmd_minind(args):
    space = parse_space_spec(args.space)
    config = {"command": "minind", "space": args.space, "kmax": args.kmax,
              "delta": args.delta, "seed": args.seed}
    value = space_minind(space, args.kmax, delta=args.delta, seed=args.seed)
    payload = {"minind": value if value is not None else "exceeds",
               "heuristic": space.kind == "mesh"}
    if value is not None:
        lower, upper = min_length_bounds(space, args.kmax, delta=args.delta)
        payload["min_length_lower"] = lower
        payload["min_length_upper"] = upper
    _write(dump_json(config, payload), args.out)
    return 0


def cmd_systole(args):
    space = parse_space_spec(args.space)
    if not isinstance(space, MetricGraph):
        raise LengthSpaceError("systole is implemented for metric graphs")
    config = {"command": "systole", "space": args.space, "seed": None}
    length, witness = systole(space)
    payload = {"systole": length, "witness_walk": [[e, d] for e, d in witness.walk]}
    _write(dump_json(config, payload), args.out)
    return 0


def cmd_energy(args):
    space = parse_space_spec(args.space)
    config = {"command": "energy", "space": args.space, "k": args.k,
              "kmax": args.kmax, "starts": args.starts, "seed": args.seed,
              "tol_grad": args.tol_grad, "hessians": args.hessians,
              "threads": _threads(args)}
    if args.k is not None:
        rep = find_critical_points(space, args.k, n_starts=args.starts,
                                   seed=args.seed, tol_grad=args.tol_grad,
                                   with_hessians=args.hessians,
                                   threads=_threads(args))
        _write(dump_json(config, rep.to_json()), args.out)
        return 0
    if args.kmax is None:
        raise LengthSpaceError("energy needs --k or --kmax")
    value = open_index_search(space, args.kmax, n_starts=args.starts,
                              seed=args.seed, tol_grad=args.tol_grad)
    payload = {"open_index": value if value is not None else "exceeds",
               "certified": isinstance(space, Circle) and value is not None}
    _write(dump_json(config, payload), args.out)
    return 0


def cmd_gh(args):
    space_a = parse_space_spec(args.space_a)
    space_b = parse_space_spec(args.space_b)
    r = parse_number(args.r)
    config = {"command": "gh", "space_a": args.space_a, "space_b": args.space_b,
              "r": r, "method": args.method, "seed": None}
    bound = gh_upper_bound(space_a, space_b, r, method=args.method)
    _write(dump_json(config, bound.to_json()), args.out)
    return 0


def _make_family(name):
    if name == "torus-collapse":
        limit = Circle(math.pi)

        def fam(j):
            return FlatTorus([math.pi, math.pi / j])

        def mapf(j):
            return lambda p: limit.point(p.pos[0])

        return fam, limit, mapf, None
    if name == "constant":
        limit = Circle(math.pi)

        def fam(_):
            return limit

        def mapf(_):
            return lambda p: p

        return fam, limit, mapf, None
    if name == "ellipsoid-flatten":
        limit = doubled_disk_mesh()
        cache = {}

        def fam(c):
            if c not in cache:
                cache[c] = ellipsoid_mesh(c)
            return cache[c]

        def mapf(c):
            return doubled_disk_mapping(fam(c), limit)

        def extra(param, space, sp):
            eq = equator_curve(space)
            res = eq.check_one_over_k(sp.k)
            return {"equator_length": eq.length, "equator_status": res.status,
                    "equator_margin": res.margin}

        return fam, limit, mapf, extra
    raise LengthSpaceError(f"unknown family {name!r}")


def cmd_converge(args):
    fam, limit, mapf, extra = _make_family(args.family)
    params = [parse_number(x) for x in args.params.split(",")]
    r = parse_number(args.R)
    eps = parse_number(args.eps)
    gh_r = parse_number(args.gh_r) if args.gh_r is not None else None
    config = {"command": "converge", "family": args.family, "params": params,
              "k": args.k, "R": r, "eps": eps, "gh_r": gh_r,
              "threads": _threads(args), "seed": args.seed}
    report = convergence_experiment(
        fam, limit, args.k, r, eps, params, delta=args.delta, gh_r=gh_r,
        mapping_factory=mapf, family_label=args.family, member_extra=extra,
        threads=_threads(args))
    _write(dump_json(config, report.to_json()), args.out)
    if args.plot_csv:
        _write(plot_csv(report), args.plot_csv)
    if any(m.inclusion == "inconclusive" for m in report.members):
        return 2
    return 0


def cmd_gap(args):
    space = parse_space_spec(args.space)
    r = parse_number(args.R) if args.R is not None else None
    a, b, eps = parse_number(args.a), parse_number(args.b), parse_number(args.eps)
    config = {"command": "gap", "space": args.space, "k": args.k, "R": r,
              "a": a, "b": b, "eps": eps, "seed": None}
    sp = spectrum_1_over_k(space, args.k, r, delta=args.delta)
    result = gap_check(sp, a, b, eps)
    payload = result.to_json()
    payload["spectrum"] = sp.to_json()
    _write(dump_json(config, payload), args.out)
    if sp.undecided:
        return 2
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="lenspec",
                                description="length spectra on compact length spaces")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--delta", type=float, default=None,
                        help="parameter grid step for certified checks")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker cap (falls back to LSL_THREADS)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("spectrum", help="length spectrum / 1-k spectrum")
    s.add_argument("--space", required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--R", default=None)
    s.add_argument("--open", action="store_true",
                   help="openly-1/k spectrum instead of the 1/k spectrum")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    common(s)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("minind", help="space minimizing index and length bounds")
    s.add_argument("--space", required=True)
    s.add_argument("--kmax", type=int, default=K_MAX_DEFAULT)
    common(s)
    s.set_defaults(func=cmd_minind)

    s = sub.add_parser("systole", help="shortest noncontractible geodesic (graphs)")
    s.add_argument("--space", required=True)
    common(s, seed=False)
    s.set_defaults(func=cmd_systole)

    s = sub.add_parser("energy", help="uniform-energy critical point search")
    s.add_argument("--space", required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--kmax", type=int, default=None)
    s.add_argument("--starts", type=int, default=64)
    s.add_argument("--tol-grad", type=float, default=TOL_GRAD)
    s.add_argument("--hessians", action="store_true")
    common(s)
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("gh", help="certified Gromov-Hausdorff upper bound")
    s.add_argument("--space-a", required=True)
    s.add_argument("--space-b", required=True)
    s.add_argument("--r", required=True, help="net radius")
    s.add_argument("--method", choices=("exact", "greedy"), default="greedy")
    common(s, seed=False)
    s.set_defaults(func=cmd_gh)

    s = sub.add_parser("converge", help="spectrum convergence experiment")
    s.add_argument("--family", required=True,
                   choices=("torus-collapse", "constant", "ellipsoid-flatten"))
    s.add_argument("--params", required=True, help="comma-separated parameters")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--R", required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--gh-r", default=None)
    s.add_argument("--plot-csv", default=None)
    common(s)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("gap", help="interval gap test on a 1/k spectrum")
    s.add_argument("--space", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--R", default=None)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--eps", required=True)
    common(s, seed=False)
    s.set_defaults(func=cmd_gap)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LengthSpaceError, ValueError, OSError, KeyError) as exc:
        print(f"lenspec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
