"""Command-line interface.

Exit codes: 0 ok, 2 invalid input, 3 infeasible plan, 4 file I/O error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from agcvg import planner, sim
from agcvg.assignment import TMAX_MODES
from agcvg.export import export_mission
from agcvg.frames import FRAMES
from agcvg.grid_world import ScenarioError, load_scenario, save_scenario
from agcvg.render import render_svg

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


@dataclass
class RunConfig:
    scenario: str = ""
    strategy: str = "agcvg"
    tmax_mode: str = "nearest"
    budget_formula: str = "T_minus_2tmax"
    recharge_time: float = 0.0
    output: str = "."
    render: bool = False

    def planner_kwargs(self):
        return dict(tmax_mode=self.tmax_mode, budget_formula=self.budget_formula,
                    recharge_time=self.recharge_time)


def _strategies(name):
    return planner.STRATEGIES if name == "both" else (name,)


def _load_scenario(path):
    try:
        return load_scenario(path)
    except ScenarioError as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from exc
    except OSError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from exc


def _load_plan(path):
    try:
        return planner.load_plan(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_INVALID, f"{path}: not a valid plan file ({exc})") from exc


def _write(path, text):
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from exc
    return path


def cmd_plan(cfg):
    sc = _load_scenario(cfg.scenario)
    stem = Path(cfg.scenario).stem
    written = []
    paths = planner.coverage_paths(sc)
    for strategy in _strategies(cfg.strategy):
        try:
            p = planner.plan(sc, strategy, paths=paths, **cfg.planner_kwargs())
        except planner.InfeasibleError as exc:
            raise CliError(EXIT_INFEASIBLE, f"{cfg.scenario}: infeasible: {exc}") from exc
        out = _write(Path(cfg.output) / f"{stem}.{strategy}.plan.json", planner.plan_to_json(p))
        written.append(out)
        print(f"{out}: {strategy} L1={p.L1:.3f} m L2={p.L2:.3f} m overhead={p.overhead:.4f} "
              f"rendezvous={p.n_rendezvous}")
        if cfg.render:
            written.append(_write(out.with_suffix("").with_suffix(".svg"), render_svg(sc, p)))
    return written


def cmd_simulate(plan_path, scenario_path, output, recharge_time=None):
    sc = _load_scenario(scenario_path)
    p = _load_plan(plan_path)
    try:
        tl = sim.simulate(p, sc, recharge_time=recharge_time)
    except sim.EnergyExhaustedError as exc:
        raise CliError(EXIT_INFEASIBLE, f"{plan_path}: {exc}") from exc
    except sim.PlanConsistencyError as exc:
        raise CliError(EXIT_INVALID, f"{plan_path}: {exc}") from exc
    m = sim.compute_metrics(p, tl, sc)
    stem = Path(plan_path).name.removesuffix(".plan.json").removesuffix(".json")
    out = Path(output)
    a = _write(out / f"{stem}.timeline.csv", tl.to_csv())
    b = _write(out / f"{stem}.metrics.txt", sim.metrics_to_text(m))
    print(f"{a}\n{b}\nmission_time={tl.mission_time:.3f} s overhead={m.overhead:.4f} "
          f"wait={m.total_wait:.3f} s")
    return m


def _compare_one(args):
    path, kwargs = args
    try:
        sc = load_scenario(path)
    except (ScenarioError, OSError) as exc:
        return sim.Comparison(Path(path).stem, None, None, f"load: {exc}")
    c = sim.compare(sc, **kwargs)
    return sim.Comparison(Path(path).stem, c.agcvg, c.greedy, c.error)


def _scenario_files(inputs):
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        elif p.exists():
            files.append(p)
        else:
            raise CliError(EXIT_IO, f"{item}: no such file or directory")
    return files


def cmd_compare(inputs, output=None, workers=1, **kwargs):
    files = _scenario_files(inputs)
    if not files:
        raise CliError(EXIT_INVALID, "no scenario files found")
    jobs = [(str(f), kwargs) for f in files]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_compare_one, jobs))
    else:
        results = [_compare_one(j) for j in jobs]
    table = sim.comparisons_to_csv([sim.comparison_row(c) for c in results])
    if output:
        _write(output, table)
    else:
        sys.stdout.write(table)
    ok = [c for c in results if c.ok]
    gaps = [c.gap for c in ok]
    mean = float(np.mean(gaps)) if gaps else float("nan")
    worst = max(gaps) if gaps else float("nan")
    print(f"summary: {len(ok)}/{len(results)} scenarios compared, mean gap (greedy - agcvg) "
          f"{mean:.3f} pp, max {worst:.3f} pp, positive on {sum(g > 0 for g in gaps)}",
          file=sys.stderr if not output else sys.stdout)
    return results


def cmd_render(plan_path, scenario_path, output):
    sc = _load_scenario(scenario_path)
    p = _load_plan(plan_path) if plan_path else None
    try:
        svg = render_svg(sc, p)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    return _write(output, svg)


def cmd_export(plan_path, frame, output, launch_offset=None, vehicle=None):
    p = _load_plan(plan_path)
    if frame not in FRAMES:
        raise CliError(EXIT_INVALID, f"unknown frame {frame!r}")
    return _write(output, export_mission(p, frame, launch_offset, vehicle))


def cmd_generate(output, count, seed, size, density, clusters, kind="random"):
    from agcvg import suite

    out = Path(output)
    if kind == "random":
        scenarios = suite.scenario_batch(seed, count, size=size, density=density,
                                         clusters=clusters)
    elif kind == "suite":
        scenarios = suite.comparison_suite(seed, count)
    else:
        scenarios = [suite.field_scenario(**suite.FIELD_LARGE),
                     suite.field_scenario(**suite.FIELD_SMALL)]
    written = []
    for sc in scenarios:
        path = out / f"{sc.name}.json"
        try:
            out.mkdir(parents=True, exist_ok=True)
            save_scenario(sc, path)
        except OSError as exc:
            raise CliError(EXIT_IO, f"{path}: {exc}") from exc
        written.append(path)
    print(f"wrote {len(written)} scenarios to {out}")
    return written


def _common(p):
    p.add_argument("--tmax-mode", choices=TMAX_MODES, default="nearest",
                   help="worst-case rendezvous bound (default: nearest)")
    p.add_argument("--budget-formula", choices=planner.BUDGET_FORMULAS, default="T_minus_2tmax",
                   help="aerial cluster budget (default: T_minus_2tmax)")
    p.add_argument("--recharge-time", type=float, default=0.0,
                   help="seconds spent recharging at each rendezvous (default: 0)")


def build_parser():
    ap = argparse.ArgumentParser(prog="agcvg", description=
                                 "Coverage planning for a UAV recharged by a covering UGV.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan one scenario")
    p.add_argument("scenario")
    p.add_argument("--strategy", choices=("agcvg", "greedy", "both"), default="agcvg")
    p.add_argument("-o", "--output", default=".", help="output directory (default: .)")
    p.add_argument("--render", action="store_true", help="also write an SVG per plan")
    _common(p)

    p = sub.add_parser("simulate", help="simulate a plan; writes timeline CSV and metrics")
    p.add_argument("plan")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", default=".")
    p.add_argument("--recharge-time", type=float, default=None,
                   help="override the recharge time stored in the plan")

    p = sub.add_parser("compare", help="compare both strategies over scenarios")
    p.add_argument("inputs", nargs="+", help="scenario files or directories")
    p.add_argument("-o", "--output", help="CSV table path (default: stdout)")
    p.add_argument("-j", "--workers", type=int, default=1)
    _common(p)

    p = sub.add_parser("render", help="SVG of a scenario and plan")
    p.add_argument("plan", nargs="?", help="plan file (omit for the map only)")
    p.add_argument("--scenario", required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("export", help="mission waypoint file in a vehicle frame")
    p.add_argument("plan")
    p.add_argument("--frame", choices=sorted(FRAMES), default="uav_lhr")
    p.add_argument("--vehicle", choices=("aerial", "ground"),
                   help="default: ground for ugv_rhr, aerial for uav_lhr")
    p.add_argument("--launch-offset", type=float, nargs=2, metavar=("X", "Y"),
                   help="UAV launch point in the UGV frame, meters (default: from the plan)")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("generate", help="write seeded random scenarios")
    p.add_argument("output")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--kind", choices=("random", "suite", "field"), default="random",
                   help="random batch, the filtered comparison suite, or the two field layouts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, nargs=2, default=(10, 30), metavar=("MIN", "MAX"))
    p.add_argument("--density", type=float, nargs=2, default=(0.0, 0.2), metavar=("MIN", "MAX"))
    p.add_argument("--clusters", type=int, nargs=2, default=(2, 6), metavar=("MIN", "MAX"))
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            cmd_plan(RunConfig(args.scenario, args.strategy, args.tmax_mode, args.budget_formula,
                               args.recharge_time, args.output, args.render))
        elif args.command == "simulate":
            cmd_simulate(args.plan, args.scenario, args.output, args.recharge_time)
        elif args.command == "compare":
            cmd_compare(args.inputs, args.output, args.workers, tmax_mode=args.tmax_mode,
                        budget_formula=args.budget_formula, recharge_time=args.recharge_time)
        elif args.command == "render":
            cmd_render(args.plan, args.scenario, args.output)
        elif args.command == "export":
            cmd_export(args.plan, args.frame, args.output, args.launch_offset, args.vehicle)
        elif args.command == "generate":
            cmd_generate(args.output, args.count, args.seed, tuple(args.size),
                         tuple(args.density), tuple(args.clusters), args.kind)
    except CliError as exc:
        print(f"agcvg: error: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
