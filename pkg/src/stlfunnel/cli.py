"""Command-line front end.

    stlfunnel simulate --config P --out D [--seed N] [--no-noise] [--theta0 R] [--controller aug|prac]
    stlfunnel monitor --trace P --formula S --predicates P
    stlfunnel sweep --config P --out D --axis theta0=...|seeds=N|controllers=...

Exit codes: 0 ok (or satisfied), 1 violated (monitor only), 2 usage or
input error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import svg, traceio
from .scenario import ScenarioError, load_predicates, load_scenario, theta_steps
from .simulator import SimulationError, run, run_batch
from .stl import InsufficientHorizonError, StlParseError, eval_robustness, parse_formula

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("stlfunnel")


class UsageError(Exception):
    pass


def _controller_kind(scenario):
    kinds = sorted({t.controller.kind for t in scenario.bundle.tasks})
    return kinds[0] if len(kinds) == 1 else ",".join(kinds)


def _aug_series(scenario, traj):
    out = []
    for i, task in enumerate(scenario.bundle.tasks):
        if task.controller.kind == "unicycle-aug":
            lo, hi = task.controller.aug_funnel_bounds()
            n = len(traj.times)
            out.append((f"{task.name} aug", traj.rho_aug[:, i], np.full(n, lo), np.full(n, hi)))
    return out


def _summary(scenario, traj, trace_path):
    """Robustness of the scenario formula evaluated on the written CSV."""
    table = traceio.read_trace(trace_path)
    rv = eval_robustness(scenario.formula, table.to_sampled(), float(table.times[0]))
    return {
        "scenario": scenario.name,
        "controller": _controller_kind(scenario),
        "seed": scenario.sim.seed,
        "noise": bool(scenario.sim.noise and scenario.model.noise.active),
        "theta0": scenario.x0[2] if len(scenario.x0) == 3 else None,
        "formula": scenario.formula_text,
        "robustness": rv.value,
        "active_leaf": rv.leaf,
        "active_time": rv.time,
        "satisfied": rv.satisfied,
        "min_rho": {name: float(v) for name, v in zip(traj.task_names, traj.min_rho())},
        "min_margin": {name: float(v) for name, v in zip(traj.task_names, traj.min_margin())},
        "final_state": [float(v) for v in traj.states[-1]],
    }


def _load(config, **overrides):
    try:
        sc = load_scenario(config)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc
    except ScenarioError as exc:
        raise UsageError(f"{config}: {exc}") from exc
    try:
        return sc.with_overrides(**overrides)
    except ScenarioError as exc:
        raise UsageError(str(exc)) from exc


def cmd_simulate(args):
    sc = _load(
        args.config,
        seed=args.seed,
        noise=False if args.no_noise else None,
        theta0=args.theta0,
        controller=args.controller,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj = run(sc)
    trace_path = out / "trace.csv"
    traceio.write_trace(traj, trace_path)
    svg.write(out / "trajectory.svg", svg.trajectory_svg([traj], sc.predicates.values(), sc.plot_bounds, title=sc.name))
    svg.write(out / "robustness.svg", svg.robustness_svg(traj, _aug_series(sc, traj), title=sc.name))
    summary = _summary(sc, traj, trace_path)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    verdict = "satisfied" if summary["satisfied"] else "violated"
    print(f"{sc.name}: robustness {summary['robustness']:.6g} ({verdict}); wrote {out}")
    return EXIT_OK


def cmd_monitor(args):
    try:
        table = traceio.read_trace(args.trace)
        preds = load_predicates(args.predicates)
        phi = parse_formula(args.formula, preds)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rv = eval_robustness(phi, table.to_sampled(), float(table.times[0]))
    verdict = "satisfied" if rv.satisfied else "violated"
    print(f"robustness {rv.value:.9g} {verdict} (active {rv.leaf} at t={rv.time:.6g})")
    return EXIT_OK if rv.satisfied else EXIT_VIOLATED


def parse_axis(text):
    """``theta0=a,b,...``, ``seeds=N`` or ``controllers=aug,prac``."""
    key, sep, val = text.partition("=")
    key = key.strip()
    if not sep or not val.strip():
        raise UsageError(f"bad --axis {text!r}: expected name=values")
    if key == "theta0":
        try:
            return key, theta_steps(val)
        except ValueError as exc:
            raise UsageError(f"bad theta0 list {val!r}") from exc
    if key == "seeds":
        try:
            n = int(val)
        except ValueError as exc:
            raise UsageError(f"seeds needs an integer, got {val!r}") from exc
        if n < 1:
            raise UsageError("seeds must be >= 1")
        return key, list(range(n))
    if key == "controllers":
        return key, [c.strip() for c in val.split(",") if c.strip()]
    raise UsageError(f"unknown sweep axis {key!r}")


def cmd_sweep(args):
    axes = dict(parse_axis(a) for a in args.axis)
    base = _load(args.config, noise=False if args.no_noise else None)
    names = list(axes)
    combos = list(itertools.product(*(axes[k] for k in names)))
    runs = []
    for combo in combos:
        ov = dict(zip(names, combo))
        try:
            runs.append(base.with_overrides(seed=ov.get("seeds"), theta0=ov.get("theta0"), controller=ov.get("controllers")))
        except ScenarioError as exc:
            raise UsageError(str(exc)) from exc
    trajs = run_batch(runs, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    task_names = list(trajs[0].task_names)
    rows = []
    labels = []
    for i, (sc, tr) in enumerate(zip(runs, trajs)):
        rv = eval_robustness(sc.formula, tr, float(tr.times[0]))
        row = {
            "run": i,
            "controller": _controller_kind(sc),
            "seed": sc.sim.seed,
            "theta0": format(sc.x0[2], ".9g") if len(sc.x0) == 3 else "",
            "noise": int(bool(sc.sim.noise and sc.model.noise.active)),
            "robustness": format(rv.value, ".9g"),
            "satisfied": int(rv.satisfied),
        }
        for name, v in zip(task_names, tr.min_rho()):
            row[f"min_rho_{name}"] = format(float(v), ".9g")
        rows.append(row)
        labels.append(", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in zip(names, combos[i])))
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    traj_svg = svg.trajectory_svg(trajs, base.predicates.values(), base.plot_bounds, labels=labels, title=f"{base.name} sweep")
    svg.write(out / "sweep.svg", traj_svg)
    n_ok = sum(r["satisfied"] for r in rows)
    print(f"{base.name}: {n_ok}/{len(rows)} runs satisfied; wrote {out}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="stlfunnel", description="STL funnel controllers: simulate, monitor, sweep.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one scenario and write trace, plots and summary")
    s.add_argument("--config", required=True, help="scenario JSON path or bundled name")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--no-noise", action="store_true")
    s.add_argument("--theta0", type=float)
    s.add_argument("--controller", choices=["aug", "prac"])
    s.set_defaults(func=cmd_simulate)

    m = sub.add_parser("monitor", help="evaluate an STL formula on a trace CSV")
    m.add_argument("--trace", required=True)
    m.add_argument("--formula", required=True)
    m.add_argument("--predicates", required=True, help="JSON predicate table or scenario file")
    m.set_defaults(func=cmd_monitor)

    w = sub.add_parser("sweep", help="run a family of simulations")
    w.add_argument("--config", required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--axis", action="append", required=True, help="theta0=...|seeds=N|controllers=...; repeat for a product")
    w.add_argument("--no-noise", action="store_true")
    w.add_argument("--workers", type=int, default=1)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore", UserWarning)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StlParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SimulationError, InsufficientHorizonError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
