import json
import logging
import os
import sys
from typing import List, Optional

import numpy as np
from rich.console import Console
from rich.table import Table
from transformers import HfArgumentParser

from Control.controller import check_rank
from Geometry.stereographic import project, unproject
from Navigation.navigation_function import scan_critical_points
from Selfcheck.suites import run_suites
from Simulation.basin import run_basin
from Simulation.scenario import Scenario, load_scenario
from Simulation.simulator import Simulator
from Simulation.trajectory_io import write_trajectory
from World.sphere_world import ValidationReport, prepare, validate
from utils.exceptions import (
    ConicNavError,
    SafetyViolationError,
    ScenarioLoadError,
    ScenarioValidationError,
)

from arguments_classes.module_arguments import ModuleArguments
from arguments_classes.basin_arguments import BasinArguments
from arguments_classes.selfcheck_arguments import SelfcheckArguments
from arguments_classes.scan_arguments import ScanArguments

console = Console()
logger = logging.getLogger("sphere_nav")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_SAFETY = 3

SUBCOMMANDS = ("validate", "world", "simulate", "basin", "selfcheck", "scan")
ARGUMENT_CLASSES = (ModuleArguments, BasinArguments, SelfcheckArguments, ScanArguments)
# numbering of the constraint assumptions in reports
ITEM_NUMBERS = {"rank": 1, "separation": 2, "alignment": 3, "start": 4, "target": 4}

USAGE = (
    "usage: sphere_nav.py {" + ",".join(SUBCOMMANDS) + "} [--scenario PATH] [--out PATH] "
    "[--seed N] [--jobs N] [--log_level LEVEL] ..."
)


def _is_arguments_file(path: str) -> bool:
    """A lone .json argument is an arguments file unless it reads like a scenario."""
    with open(path) as f:
        doc = json.load(f)
    known = {name for cls in ARGUMENT_CLASSES for name in cls.__dataclass_fields__}
    return isinstance(doc, dict) and set(doc) <= known


def parse_arguments(argv: List[str]):
    parser = HfArgumentParser(ARGUMENT_CLASSES)
    if len(argv) == 1 and argv[0].endswith(".json"):
        path = os.path.abspath(argv[0])
        if _is_arguments_file(path):
            return parser.parse_json_file(json_file=path)
        argv = ["--scenario", argv[0]]
    return parser.parse_args_into_dataclasses(args=argv)


def setup_logger(level: str):
    logging.basicConfig(
        level=level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )


def _fmt(v) -> str:
    return np.array2string(np.asarray(v, dtype=float), precision=6, floatmode="fixed", separator=", ")


def _require_scenario(module_kwargs: ModuleArguments) -> Scenario:
    if not module_kwargs.scenario:
        raise ScenarioLoadError("--scenario is required for this subcommand", invalid_fields=["scenario"])
    return load_scenario(module_kwargs.scenario)


def print_report(report: ValidationReport):
    table = Table(title="Constraint assumptions")
    table.add_column("item")
    table.add_column("check")
    table.add_column("result")
    table.add_column("offending")
    table.add_column("details")
    for name, check in report.items():
        details = {k: v for k, v in check.details.items() if k != "rotation"}
        table.add_row(
            str(ITEM_NUMBERS[name]),
            name,
            "[green]pass[/green]" if check.passed else "[red]FAIL[/red]",
            ", ".join(map(str, check.offending)),
            _short(details),
        )
    console.print(table)


def _short(details: dict) -> str:
    parts = []
    for key, value in details.items():
        if isinstance(value, float):
            parts.append(f"{key}={value:.3e}")
        elif isinstance(value, dict):
            parts.append(f"{key}=" + " ".join(f"{k}:{v:.3e}" for k, v in value.items()))
        elif isinstance(value, (list, tuple)):
            parts.append(f"{key}=[" + ", ".join(f"{v:.3e}" for v in value) + "]")
        else:
            parts.append(f"{key}={value}")
    return "; ".join(parts)


def cmd_validate(module_kwargs: ModuleArguments) -> int:
    scenario = _require_scenario(module_kwargs)
    report = validate(scenario.constraints, scenario.x0, scenario.xd)
    report.rank = check_rank(scenario.make_model(), seed=module_kwargs.seed)
    print_report(report)
    if report.passed:
        console.print("[green]all constraint assumptions hold[/green]")
        return EXIT_OK
    console.print(f"[red]failing items: {', '.join(report.failures())}[/red]")
    return EXIT_FAILURE


def cmd_world(module_kwargs: ModuleArguments) -> int:
    scenario = _require_scenario(module_kwargs)
    world = prepare(scenario.constraints, scenario.x0, scenario.xd).world
    console.print(f"workspace radius: {world.workspace_radius:.6f}")
    table = Table(title=f"{len(world.obstacles)} obstacles")
    table.add_column("i")
    table.add_column("center")
    table.add_column("radius")
    table.add_column("workspace clearance")
    gaps = world.clearances()
    for i, (ob, gap) in enumerate(zip(world.obstacles, gaps["workspace"]), start=1):
        table.add_row(str(i), _fmt(ob.center.coords), f"{ob.radius:.6f}", f"{gap:.6f}")
    if world.obstacles:
        console.print(table)
    for (i, j), gap in gaps["pairwise"].items():
        console.print(f"clearance between obstacles {i} and {j}: {gap:.6f}")
    return EXIT_OK


def cmd_simulate(module_kwargs: ModuleArguments) -> int:
    scenario = _require_scenario(module_kwargs)
    traj = Simulator(scenario).simulate()
    path = module_kwargs.out or scenario.output_path
    if path:
        fmt = "json" if path.endswith(".json") else scenario.output_format
        write_trajectory(traj, path, fmt)

    s = traj.summary
    table = Table(title="Simulation summary")
    table.add_column("quantity")
    table.add_column("value")
    table.add_row("converged", str(s.converged))
    table.add_row("t_converge", "-" if s.t_converge is None else f"{s.t_converge:.3f}")
    table.add_row("final_distance", f"{s.final_distance:.3e}")
    table.add_row("min_margin_overall", f"{s.min_margin_overall:.3e}")
    table.add_row("max_control_norm", f"{s.max_control_norm:.3e}")
    table.add_row("steps", str(s.steps))
    table.add_row("max_norm_drift", f"{s.max_norm_drift:.3e}")
    if s.safety_violation:
        table.add_row("abort_reason", s.abort_reason)
    console.print(table)

    if s.safety_violation:
        return EXIT_SAFETY
    return EXIT_OK if s.converged else EXIT_FAILURE


def cmd_basin(module_kwargs: ModuleArguments, basin_kwargs: BasinArguments) -> int:
    scenario = _require_scenario(module_kwargs)
    report = run_basin(scenario, basin_kwargs.grid_density, module_kwargs.jobs, basin_kwargs.basin_dt)
    console.print(f"starts: {report.count}")
    console.print(f"converged fraction: {report.converged_fraction:.4f}")
    console.print(f"safety violation fraction: {report.violation_fraction:.4f}")

    missed = report.non_converged()
    if missed:
        table = Table(title=f"{len(missed)} starts did not converge")
        table.add_column("index")
        table.add_column("start")
        table.add_column("final distance")
        table.add_column("note")
        for o in missed:
            table.add_row(str(o.index), _fmt(o.start), f"{o.final_distance:.3e}", o.error or "")
        console.print(table)

    if module_kwargs.out:
        with open(module_kwargs.out, "w") as f:
            json.dump(
                [
                    {
                        "index": o.index,
                        "start": o.start.tolist(),
                        "converged": o.converged,
                        "safety_violation": o.safety_violation,
                        "t_converge": o.t_converge,
                        "final_distance": o.final_distance,
                        "error": o.error,
                    }
                    for o in report.outcomes
                ],
                f,
                indent=1,
            )
    return EXIT_SAFETY if report.violation_fraction > 0 else EXIT_OK


def cmd_selfcheck(module_kwargs: ModuleArguments, selfcheck_kwargs: SelfcheckArguments) -> int:
    results = run_suites(
        selfcheck_kwargs.n_list,
        module_kwargs.seed,
        selfcheck_kwargs.samples,
        selfcheck_kwargs.perturbation,
    )
    table = Table(title=f"Self-check (seed {module_kwargs.seed})")
    table.add_column("suite")
    table.add_column("result")
    table.add_column("checks")
    table.add_column("worst / tolerance")
    for r in results:
        table.add_row(
            r.name,
            "[green]pass[/green]" if r.passed else "[red]FAIL[/red]",
            str(r.checked),
            "\n".join(f"{m}: {v:.2e} / {t:.0e}" for m, (v, t) in r.worst.items()),
        )
    console.print(table)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


def cmd_scan(module_kwargs: ModuleArguments, scan_kwargs: ScanArguments) -> int:
    scenario = _require_scenario(module_kwargs)
    problem = prepare(scenario.constraints, scenario.x0, scenario.xd)
    scan = scan_critical_points(
        problem.world,
        project(problem.xd).coords,
        scenario.params,
        samples=scan_kwargs.scan_samples,
        seed=module_kwargs.seed,
        threshold=scan_kwargs.scan_threshold,
    )
    console.print(f"interior samples: {scan.samples}, median |grad phi|: {scan.median_grad_norm:.3e}")
    table = Table(title=f"{len(scan.candidates)} near-stationary samples")
    table.add_column("xi")
    table.add_column("x (user frame)")
    table.add_column("|grad phi|")
    table.add_column("phi")
    for xi, norm, value in scan.candidates[:20]:
        x = problem.to_user_frame(unproject(xi).coords)
        table.add_row(_fmt(xi), _fmt(x), f"{norm:.3e}", f"{value:.4f}")
    console.print(table)
    return EXIT_OK


def run(command: str, argv: List[str]) -> int:
    module_kwargs, basin_kwargs, selfcheck_kwargs, scan_kwargs = parse_arguments(argv)
    setup_logger(module_kwargs.log_level)
    try:
        if command == "validate":
            return cmd_validate(module_kwargs)
        if command == "world":
            return cmd_world(module_kwargs)
        if command == "simulate":
            return cmd_simulate(module_kwargs)
        if command == "basin":
            return cmd_basin(module_kwargs, basin_kwargs)
        if command == "selfcheck":
            return cmd_selfcheck(module_kwargs, selfcheck_kwargs)
        return cmd_scan(module_kwargs, scan_kwargs)
    except ScenarioLoadError as e:
        console.print(f"[red]input error:[/red] {e}")
        return EXIT_INPUT
    except ScenarioValidationError as e:
        console.print(f"[red]{e}[/red]")
        if e.report is not None:
            print_report(e.report)
        return EXIT_FAILURE
    except SafetyViolationError as e:
        console.print(f"[red]{e}[/red]")
        return EXIT_SAFETY
    except ConicNavError as e:
        console.print(f"[red]{type(e).__name__}:[/red] {e}")
        return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        console.print(USAGE)
        return EXIT_INPUT
    try:
        return run(argv[0], argv[1:])
    except SystemExit as e:
        # argparse reports bad flags by exiting with 2, --help with 0
        return EXIT_INPUT if e.code else EXIT_OK
    except (OSError, json.JSONDecodeError, ValueError) as e:
        console.print(f"[red]input error:[/red] {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
