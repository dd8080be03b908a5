"""Command line: ``alleedyn {equilibria,basins,nullclines,simulate,verify}
--scenario FILE [--out DIR] [--threads N] [--seed S]``.

Exit codes: 0 success, 1 internal or input error, 2 hypothesis or theorem
violation, 3 basin budget exhausted (Undetermined fraction above threshold).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels, export, suites
from .basins import basin_grid, build_registry, topology_summary
from .errors import HypothesisError
from .planar import equilibria, iterate, nullclines
from .scalar import asymptotic_class, classify_allee, find_equilibria_scalar, simulate_scalar
from .numerics import lyapunov_1d
from .scenario import Scenario, ScenarioError

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS, EXIT_BUDGET = 0, 1, 2, 3


def _comments(scenario, *extra):
    return export.header(scenario.to_text(), extra)


def _eig_fields(eigs):
    vals = list(eigs) + [float("nan")] * (2 - len(eigs))
    out = []
    for v in vals[:2]:
        if isinstance(v, complex) and v.imag != 0:
            out.append("%.17g%+.17gj" % (v.real, v.imag))
        else:
            out.append(float(np.real(v)))
    return out


def cmd_equilibria(sc: Scenario, out: Path, args) -> int:
    m = sc.model()
    if not sc.planar:
        eq = find_equilibria_scalar(m, tol=sc.get("tol", 1e-14))
        regime = classify_allee(m)
        rows = [(r.value, r.role.value, r.stability.value, r.slope) for r in eq.roots]
        export.write_csv(out / "equilibria.csv", ["u", "role", "stability", "slope"], rows,
                         _comments(sc, f"regime: {regime.regime.value}"))
        print(f"{m.family.value}: {len(eq.roots)} fixed points, Allee regime {regime.regime.value}")
        for r in eq.roots:
            print(f"  u={r.value:.12g}  {r.role.value:<16} {r.stability.value}  H'={r.slope:.6g}")
        if eq.possibly_missed:
            print("  warning: a tangential root may have been missed")
        return EXIT_OK

    eq = equilibria(m, tol=sc.get("tol", 1e-10))
    rows = []
    for e in eq.all:
        rows.append([e.x, e.y, e.role] + _eig_fields(e.eigenvalues) + [e.stability.value])
    extra = []
    if eq.h1 is False:
        extra.append("hypothesis H1 violated: boundary list is partial")
    for a in eq.ambiguous:
        extra.append(f"ambiguous near-tangency at ({a[0]!r}, {a[1]!r})")
    export.write_csv(out / "equilibria.csv", ["x", "y", "role", "lambda1", "lambda2", "class"],
                     rows, _comments(sc, *extra))
    print(f"{m.family.value}: {len(eq.boundary)} boundary and {len(eq.interior)} interior equilibria")
    for e in eq.all:
        print(f"  ({e.x:.10g}, {e.y:.10g})  {e.role:<9} {e.stability.value}")
    for line in extra:
        print(f"  {line}")
    if eq.h1 is False:
        print("hypothesis H1 violated (delta_i > 1 and r_i > r_crit on both axes)", file=sys.stderr)
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_basins(sc: Scenario, out: Path, args) -> int:
    m = sc.model()
    if not sc.planar:
        raise ScenarioError("basins needs a planar model")
    window = sc.get_tuple("window", (0.0, 4.0, 0.0, 4.0))
    resolution = sc.get_tuple("resolution", (200, 200), int)
    max_steps = sc.get("max_steps", 5000, int)
    radius = sc.get("match_radius", 1e-6)
    threshold = sc.get("undetermined_threshold", 0.01)
    registry = build_registry(m, match_radius=radius)
    raster = basin_grid(m, registry, window, resolution, (max_steps, None), threads=args.threads)

    legend = [f"label {e.id}: {e.kind.value} at ({e.point[0]!r}, {e.point[1]!r})"
              for e in registry.entries] + ["label -1: Undetermined"]
    comments = _comments(sc, f"window: {window}", f"resolution: {resolution}",
                         f"budget: max_steps={max_steps} match_radius={radius!r}", *legend)
    xs, ys = raster.xs, raster.ys
    rows = ((i, j, xs[i], ys[j], raster.labels[i, j])
            for i in range(raster.resolution[0]) for j in range(raster.resolution[1]))
    export.write_csv(out / "basins.csv", ["i", "j", "x", "y", "label"], rows, comments)
    kinds = {e.id: e.kind.value for e in registry.entries}
    export.write_ppm(out / "basins.ppm", raster.labels, kinds, comments,
                     binary=sc.options.get("pixmap", "P6") != "P3")
    summary = topology_summary(raster)
    summary.update(window=list(window), resolution=list(resolution), max_steps=max_steps,
                   match_radius=radius)
    export.write_json(out / "basins_summary.json", summary, sc.to_text())

    print(f"basins on {window} at {resolution[0]}x{resolution[1]}")
    for i, info in summary["labels"].items():
        print(f"  label {i} {info['kind']:<12} area {info['area']:.6g}  "
              f"components {info['components']}  touches far edge {info['touches_far_edge']}")
    frac = summary["undetermined_fraction"]
    print(f"  undetermined fraction {frac:.6g}")
    if frac > threshold:
        print(f"undetermined fraction {frac:.6g} exceeds {threshold}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_nullclines(sc: Scenario, out: Path, args) -> int:
    m = sc.model()
    if not sc.planar or not m.is_bh:
        raise ScenarioError("nullclines needs a Beverton-Holt planar model")
    na = nullclines(m, samples=sc.get("samples", 400, int))
    rows = []
    for name, (cx, cy) in na.curves.items():
        rows.extend((name, k, x, y) for k, (x, y) in enumerate(zip(cx, cy)))
    rows.extend(("crossing", k, e.x, e.y) for k, e in enumerate(na.located))
    extra = [f"x_c = {na.x_c!r}", f"y_c = {na.y_c!r}", f"F1(x_c) = {na.F1_at_xc!r}",
             f"F2(y_c) = {na.F2_at_yc!r}", f"predicted: {na.predicted_count.value}"]
    export.write_csv(out / "nullclines.csv", ["curve", "index", "x", "y"], rows,
                     _comments(sc, *extra))
    print(f"F1(x_c) = {na.F1_at_xc:.6g} at x_c = {na.x_c:.6g}; "
          f"F2(y_c) = {na.F2_at_yc:.6g} at y_c = {na.y_c:.6g}")
    print(f"predicted: {na.predicted_count.value}; located {len(na.located)} crossings")
    for e in na.located:
        print(f"  ({e.x:.10g}, {e.y:.10g})  {e.stability.value}")
    return EXIT_OK


def cmd_simulate(sc: Scenario, out: Path, args) -> int:
    m = sc.model()
    steps = sc.get("steps", 1000, int)
    if sc.planar:
        s0 = sc.get_tuple("initial", (1.0, 1.0))
        orbit = iterate(m, s0, steps)
        verdict = asymptotic_class(orbit, equilibria(m).points())
        extra = [f"asymptotics: {verdict.kind}" + (f" period {verdict.period}" if verdict.period else "")]
        rows = ((t, x, y) for t, (x, y) in enumerate(orbit))
        export.write_csv(out / "simulate.csv", ["t", "x", "y"], rows, _comments(sc, *extra))
    else:
        u0 = sc.get("initial", 1.0)
        traj = simulate_scalar(m, u0, steps)
        verdict = asymptotic_class(traj, find_equilibria_scalar(m))
        extra = [f"asymptotics: {verdict.kind}" + (f" period {verdict.period}" if verdict.period else "")]
        burn_in = sc.get("burn_in", None, int)
        if not traj.diverged and u0 > 0:
            lyap = lyapunov_1d(m, u0, steps, burn_in)
            extra.append(f"lyapunov: {lyap.exponent!r} over {lyap.samples} samples "
                         f"({lyap.skipped} skipped)")
        rows = ((t, u) for t, u in enumerate(traj.values))
        export.write_csv(out / "simulate.csv", ["t", "u"], rows, _comments(sc, *extra))
    for line in extra:
        print(line)
    return EXIT_OK


def cmd_verify(sc: Scenario, out: Path, args) -> int:
    names = [s.strip() for s in sc.options.get("suites", ",".join(suites.SUITES)).split(",")]
    seed = sc.seed_value(args.seed)
    reports = []
    for name in names:
        if name not in suites.SUITES:
            raise ScenarioError(f"unknown suite {name!r}; choose from {sorted(suites.SUITES)}")
        kwargs = {"seed": seed}
        if name in ("thm3", "thm5-convergence", "thm6", "thm7") and "draws" in sc.options:
            kwargs["draws"] = sc.get("draws", kind=int)
        if name in ("thm3", "thm5-convergence"):
            for key in ("orbits", "steps"):
                if key in sc.options:
                    kwargs[key] = sc.get(key, kind=int)
        if name == "containment":
            for key in ("samples", "extra_draws", "steps"):
                if key in sc.options:
                    kwargs[key] = sc.get(key, kind=int)
        if name in ("thm3", "thm5-convergence", "containment"):
            kwargs["threads"] = args.threads
        rep = suites.SUITES[name](**kwargs)
        count = len(rep["violations"])
        rep["violation_count"] = count
        rep["violations"] = rep["violations"][:50]
        rep["suite"] = name
        reports.append(rep)
        print(f"{name}: {rep['samples']} samples, {count} violations")
    export.write_json(out / "verify.json", {"seed": seed, "suites": reports}, sc.to_text())
    return EXIT_HYPOTHESIS if any(r["violation_count"] for r in reports) else EXIT_OK


COMMANDS = {
    "equilibria": cmd_equilibria,
    "basins": cmd_basins,
    "nullclines": cmd_nullclines,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="alleedyn", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"alleedyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True, type=Path)
        p.add_argument("--out", default=Path("."), type=Path)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = Scenario.load(args.scenario)
        if sc.command != args.command:
            raise ScenarioError(f"scenario is for '{sc.command}', not '{args.command}'")
        if args.seed is not None:
            if args.seed < 0 or args.seed >= 2 ** 64:
                raise ScenarioError("--seed must fit in an unsigned 64-bit integer")
        args.out.mkdir(parents=True, exist_ok=True)
        _kernels.set_threads(args.threads)
        return COMMANDS[args.command](sc, args.out, args)
    except HypothesisError as exc:
        print(f"hypothesis {exc.condition} violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ScenarioError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
