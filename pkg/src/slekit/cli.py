"""Command-line frontend.

Exit codes: 0 on success, 1 on a numeric failure or a failing verification
report, 2 on invalid arguments.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, formulas, io
from .errors import DomainError, NumericError

FORMATS = ("csv", "json", "svg", "png")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _points_json(points) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(points, dtype=complex)]


def _png(points, path, **kw) -> Path:
    from .plotting import trace_figure

    return trace_figure(points, path, **kw)


# ---------------------------------------------------------------------------
# simulation commands


def cmd_trace(args) -> list[Path]:
    from .loewner import chordal_trace, sample_driver

    d = sample_driver(args.kappa, args.horizon, args.steps, args.seed, args.index)
    tr = chordal_trace(d)
    out = _outdir(args)
    files = [io.write_trace_csv(out / "trace.csv", tr)]
    if args.format == "svg":
        files.append(io.trace_svg(tr, out / "trace.svg"))
    elif args.format == "png":
        files.append(_png(tr.points, out / "trace.png", title=f"kappa = {args.kappa:g}"))
    elif args.format == "json":
        files.append(io.write_json(out / "trace.json", {
            "kappa": args.kappa, "seed": args.seed, "index": args.index,
            "times": [float(t) for t in tr.times], "points": _points_json(tr.points),
            "driver": [float(u) for u in d.values]}))
    return files


def cmd_radial(args) -> list[Path]:
    from .loewner import radial_trace

    tr = radial_trace(args.kappa, args.horizon, args.steps, args.seed, args.index,
                      rotate=args.rotate)
    out = _outdir(args)
    files = [io.write_trace_csv(out / "radial.csv", tr)]
    if args.format == "svg":
        files.append(io.trace_svg(tr, out / "radial.svg", radial=True))
    elif args.format == "png":
        files.append(_png(tr.points, out / "radial.png", radial=True,
                          title=f"radial, kappa = {args.kappa:g}"))
    elif args.format == "json":
        files.append(io.write_json(out / "radial.json", {
            "kappa": args.kappa, "seed": args.seed, "times": [float(t) for t in tr.times],
            "points": _points_json(tr.points)}))
    return files


def _hex_outputs(args, stem, path, coloring) -> list[Path]:
    out = _outdir(args)
    files = [io.write_points_csv(out / f"{stem}.csv", path.vertices,
                                 {"turn": np.concatenate([[0], path.turns, [0]])}),
             io.write_coloring_csv(out / f"{stem}_colors.csv", coloring)]
    if args.format == "svg":
        files.append(io.hex_svg(coloring, path, out / f"{stem}.svg"))
    elif args.format == "json":
        files.append(io.write_json(out / f"{stem}.json", {
            "width": coloring.width, "height": coloring.height, "seed": args.seed,
            "vertices": _points_json(path.vertices),
            "turns": [int(t) for t in path.turns]}))
    return files


def cmd_explore(args) -> list[Path]:
    from .discrete.hexlattice import HexColoring, percolation_explore

    dom = HexColoring.rhombus(args.width, args.height)
    path, col = percolation_explore(dom, args.seed, args.index, args.p_blue)
    return _hex_outputs(args, "explore", path, col)


def cmd_harmonic(args) -> list[Path]:
    from .discrete.hexlattice import HexColoring, run_harmonic_explorer

    dom = HexColoring.rhombus(args.width, args.height)
    path, col, _ = run_harmonic_explorer(dom, args.tol, args.seed, args.index)
    return _hex_outputs(args, "harmonic", path, col)


def cmd_lerw(args) -> list[Path]:
    from .discrete.graphs import grid_graph, lerw

    N = args.size
    if N < 3:
        raise DomainError("grid size must be at least 3")
    g = grid_graph(N, N)
    V = [v for v in range(N * N) if v % N in (0, N - 1) or v // N in (0, N - 1)]
    p = lerw(g, N // 2 + N * (N // 2), V, args.seed, args.index)
    pts = g.coords[p]
    out = _outdir(args)
    files = [io.write_points_csv(out / "lerw.csv", pts, {"vertex": np.asarray(p)})]
    if args.format == "svg":
        files.append(io.path_svg(pts, out / "lerw.svg"))
    elif args.format == "png":
        files.append(_png(pts, out / "lerw.png", baseline=False))
    elif args.format == "json":
        files.append(io.write_json(out / "lerw.json", {
            "size": N, "seed": args.seed, "vertices": [int(v) for v in p]}))
    return files


def cmd_ust(args) -> list[Path]:
    from .discrete.graphs import grid_graph, wilson_ust

    g = grid_graph(args.nx, args.ny)
    t = wilson_ust(g, args.seed, args.index)
    out = _outdir(args)
    files = [io.write_tree_csv(out / "ust.csv", t, g.coords)]
    if args.format == "svg":
        segs = [(g.coords[a], g.coords[b]) for a, b in t.edges()]
        files.append(io.tree_svg(segs, out / "ust.svg"))
    elif args.format == "json":
        files.append(io.write_json(out / "ust.json", {
            "nx": args.nx, "ny": args.ny, "seed": args.seed,
            "parent": [int(p) for p in t.parent]}))
    return files


def cmd_peano(args) -> list[Path]:
    from .discrete.graphs import wilson_ust
    from .discrete.peano import PeanoDomain, peano_curve

    dom = PeanoDomain(args.nx, args.ny)
    t = wilson_ust(dom.primal, args.seed, args.index, root=dom.R)
    curve = peano_curve(dom, t)
    out = _outdir(args)
    files = [io.write_points_csv(out / "peano.csv", curve.points),
             io.write_tree_csv(out / "peano_tree.csv", t, dom.primal.coords)]
    if args.format == "svg":
        segs = []
        for a, b in t.edges():
            if b == dom.R:
                # edges into the wired side drop straight down
                za = dom.primal.coords[a]
                segs.append((za, complex(za.real, 0.0)))
            else:
                segs.append((dom.primal.coords[a], dom.primal.coords[b]))
        segs.append((complex(0, 0), complex(args.nx, 0)))
        files.append(io.tree_svg(segs, out / "peano.svg", curve=curve.points))
    elif args.format == "png":
        files.append(_png(curve.points, out / "peano.png"))
    elif args.format == "json":
        files.append(io.write_json(out / "peano.json", {
            "nx": args.nx, "ny": args.ny, "seed": args.seed,
            "curve": _points_json(curve.points), "parent": [int(p) for p in t.parent]}))
    return files


# ---------------------------------------------------------------------------
# formulas


def _formula_value(args) -> float:
    name = args.name
    if name == "left-passage":
        return formulas.left_passage(args.x0, args.y0, args.kappa)
    if name == "schramm":
        return formulas.schramm_theta(args.theta)
    if name == "cardy":
        return formulas.cardy_crossing(args.xi, args.kappa)
    if name == "one-sided":
        return formulas.one_sided_exponent(args.kappa, args.lam)
    if name == "annulus":
        return formulas.annulus_exponent(args.kappa, args.lam)
    if name == "arm":
        return float(formulas.arm_exponent(args.k, args.geometry))
    if name == "hausdorff":
        return formulas.hausdorff_dims(args.kappa).trace_dim
    if name == "restriction":
        from .conformal import restriction_derivative_halfdisk

        return formulas.restriction_prob(restriction_derivative_halfdisk(args.x0, args.r))
    raise DomainError(f"unknown formula {name!r}")


def cmd_formula(args) -> list[Path]:
    v = _formula_value(args)
    print(f"{v:.12g}")
    return []


# ---------------------------------------------------------------------------
# verification


def _single_experiment(args):
    from . import montecarlo as mc
    from .discrete.graphs import cycle_graph, grid_graph

    kw = dict(seed=args.seed)
    if args.samples is not None:
        kw["n_samples"] = args.samples
    exp = args.experiment
    if exp == "left-passage":
        if args.steps is not None:
            kw["n_steps"] = args.steps
        return [mc.verify_left_passage(args.kappa, complex(args.x0, args.y0),
                                       workers=args.workers, **kw)]
    if exp == "cardy":
        return [mc.verify_cardy(args.xi, workers=args.workers, **kw)]
    if exp == "restriction":
        if args.steps is not None:
            kw["n_steps"] = args.steps
        return [mc.verify_restriction(args.x0, args.r, workers=args.workers, **kw)]
    if exp == "ust":
        n = args.samples or 100_000
        return [mc.verify_ust_uniform(cycle_graph(4), n, args.seed, name="ust C4"),
                mc.verify_ust_uniform(grid_graph(3, 2), n, args.seed, name="ust grid 2x3")]
    raise DomainError(f"unknown experiment {exp!r}")


def cmd_verify(args) -> list[Path]:
    from . import montecarlo as mc
    from .plotting import report_figure

    if args.experiment == "suite":
        reports = mc.default_suite(args.seed, quick=args.quick, workers=args.workers)
    else:
        reports = _single_experiment(args)
    records = [r.record(timing=args.timing) for r in reports]
    out = _outdir(args)
    meta = {"version": __version__, "suite": args.experiment, "quick": bool(args.quick),
            "seed": args.seed}
    io.write_reports(out / "report.json", out / "report.csv", records, meta)
    report_figure(records, out / "report.png")
    for r in records:
        z = "nan" if r["z"] is None else f"{r['z']:+.2f}"
        print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['name']}: mean={r['mean']:.5f} "
              f"exact={r['exact']:.5f} se={r['std_err']:.5f} z={z}")
    args._failed = not all(r["pass"] for r in records)
    return [out / "report.json", out / "report.csv", out / "report.png"]


# ---------------------------------------------------------------------------
# parser


def _add_common(p, stochastic=True, formats=FORMATS):
    if stochastic:
        p.add_argument("--seed", type=int, required=True, help="random seed")
        p.add_argument("--index", type=int, default=0, help="sample index within the seed")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    if formats:
        p.add_argument("--format", choices=formats, default="csv",
                       help="extra output beside the CSV (default: csv only)")


def _positive(kind):
    def conv(s):
        v = kind(s)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {s}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slekit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("trace", help="chordal SLE trace in the upper half-plane")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--steps", type=_positive(int), default=1000)
    p.add_argument("--horizon", type=_positive(float), default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("radial", help="radial SLE trace in the unit disk")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--steps", type=_positive(int), default=1000)
    p.add_argument("--horizon", type=_positive(float), default=1.0)
    p.add_argument("--rotate", action="store_true", help="uniform random starting point")
    _add_common(p)
    p.set_defaults(func=cmd_radial)

    for name, fn, hlp in (("explore", cmd_explore, "percolation exploration path"),
                          ("harmonic", cmd_harmonic, "harmonic explorer path")):
        p = sub.add_parser(name, help=f"{hlp} in a hexagonal rhombus")
        p.add_argument("--width", type=int, default=20)
        p.add_argument("--height", type=int, default=20)
        if name == "explore":
            p.add_argument("--p-blue", type=float, default=0.5)
        else:
            p.add_argument("--tol", type=float, default=1e-10)
        _add_common(p, formats=FORMATS[:3])
        p.set_defaults(func=fn)

    p = sub.add_parser("lerw", help="loop-erased walk from the centre of a square grid")
    p.add_argument("--size", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_lerw)

    p = sub.add_parser("ust", help="uniform spanning tree of a grid (Wilson)")
    p.add_argument("--nx", type=_positive(int), default=10)
    p.add_argument("--ny", type=_positive(int), default=10)
    _add_common(p, formats=FORMATS[:3])
    p.set_defaults(func=cmd_ust)

    p = sub.add_parser("peano", help="UST Peano curve in a rectangle wired at the bottom")
    p.add_argument("--nx", type=_positive(int), default=10)
    p.add_argument("--ny", type=_positive(int), default=10)
    _add_common(p)
    p.set_defaults(func=cmd_peano)

    p = sub.add_parser("formula", help="evaluate an exact formula")
    p.add_argument("name", choices=["left-passage", "schramm", "cardy", "one-sided",
                                    "annulus", "arm", "hausdorff", "restriction"])
    p.add_argument("--kappa", type=float, default=6.0)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=math.pi)
    p.add_argument("--xi", type=float, default=0.5)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--geometry", choices=[formulas.HALF_PLANE, formulas.PLANE],
                   default=formulas.HALF_PLANE)
    p.add_argument("--r", type=float, default=1.0)
    p.set_defaults(func=cmd_formula)

    for name in ("verify", "suite"):
        p = sub.add_parser(name, help="Monte Carlo verification against exact values"
                           if name == "verify" else "run the default verification suite")
        if name == "verify":
            p.add_argument("experiment", choices=["suite", "left-passage", "cardy",
                                                  "restriction", "ust"])
        else:
            p.set_defaults(experiment="suite")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--quick", action="store_true", help="small samples, for smoke tests")
        p.add_argument("--timing", action="store_true", help="record runtimes in the report")
        p.add_argument("--workers", type=int, default=None,
                       help="thread count (default: SLE_KIT_THREADS or min(8, cpus))")
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--steps", type=int, default=None)
        p.add_argument("--kappa", type=float, default=4.0)
        p.add_argument("--x0", type=float, default=1.0)
        p.add_argument("--y0", type=float, default=1.0)
        p.add_argument("--xi", type=float, default=0.5)
        p.add_argument("--r", type=float, default=1.0)
        p.add_argument("--out", default=".")
        p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        files = args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f"wrote {f}", file=sys.stderr)
    return 1 if getattr(args, "_failed", False) else 0


if __name__ == "__main__":
    sys.exit(main())
