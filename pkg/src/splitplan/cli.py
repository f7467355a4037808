"""Command-line front end.

Exit codes: 0 success, 1 unreadable or malformed input, 2 no feasible
split, 3 invalid values (bad profile chain, bad device parameters, bad
flags).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any, Optional, Sequence

from .baselines import BaselineKind, run_baseline
from .errors import NoFeasibleSolution, ParseError, SplitPlanError
from .nsga2 import GaConfig
from .oracle import enumerate_splits, true_pareto_set
from .planner import plan_split
from .problem import DEFAULT_MEMORY_CAP, ProblemInstance, default_devices_path, load_devices
from .profile import BUNDLED_PROFILES, ModelProfile, bundled_path, load_profile_file, read_json
from .topsis import NORMALIZATIONS, select_best

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3

SWEEP_COLUMNS = ("l1", "l2", "f1_s", "f2_mJ", "f3_bytes", "feasible", "pareto", "chosen")
COMPARE_COLUMNS = ("algorithm", "l1", "f1_s", "f2_mJ", "f3_bytes", "outside_feasible")
PLANNER_NAME = "NSGA2-TOPSIS"


def _resolve_model(spec: str) -> ModelProfile:
    path = Path(spec)
    if not path.exists() and spec in BUNDLED_PROFILES:
        path = bundled_path(spec)
    return load_profile_file(path)


def build_instance(args: argparse.Namespace) -> ProblemInstance:
    model = _resolve_model(args.model)
    client, server, network = load_devices(read_json(args.devices or default_devices_path()))
    if args.bandwidth is not None:
        # overriding the bandwidth keeps the link saturated
        network = replace(
            network, bandwidth_mbps=args.bandwidth, tau_u_mbps=args.bandwidth, tau_d_mbps=args.bandwidth
        )
    return ProblemInstance(model, client, server, network, memory_cap=args.memory_cap)


def _config(args: argparse.Namespace) -> GaConfig:
    return GaConfig(
        population_size=args.pop,
        generations=args.gens,
        mutation_rate=args.mutation,
        crossover_rate=args.crossover,
        seed=args.seed,
    )


def _objective_fields(vector) -> dict[str, Any]:
    return {"f1_s": vector.f1, "f2_mJ": vector.f2, "f3_bytes": vector.f3}


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def render_table(rows: list[dict[str, Any]], columns: Sequence[str]) -> str:
    cells = [[_fmt(row[c]) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) if cells else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells)
    return "\n".join(lines) + "\n"


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)  # bit-exact on re-parse
    return _fmt(value)


def render_csv(rows: list[dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


def _json(document: Any) -> str:
    return json.dumps(document, indent=2) + "\n"


def cmd_optimize(args: argparse.Namespace) -> str:
    instance = build_instance(args)
    plan = plan_split(instance, _config(args), args.normalization)
    pareto_rows = [
        {"l1": m.l1, "l2": m.candidate.l2, **_objective_fields(m.objectives), "feasible": m.feasible}
        for m in plan.pareto
    ]
    if args.output == "table":
        header = (
            f"{instance.model.name}: split after layer {plan.l1} of {instance.total_layers} "
            f"({plan.l1} on client, {plan.l2} on server)\n"
        )
        return header + render_table(pareto_rows, ("l1", "l2", "f1_s", "f2_mJ", "f3_bytes", "feasible"))
    if args.output == "csv":
        return render_csv(pareto_rows, ("l1", "l2", "f1_s", "f2_mJ", "f3_bytes", "feasible"))
    return _json(
        {
            "model": instance.model.name,
            "total_layers": instance.total_layers,
            "chosen_l1": plan.l1,
            "chosen_l2": plan.l2,
            "objectives": _objective_fields(plan.chosen.objectives),
            "breakdown": plan.breakdown.to_dict(),
            "pareto_set": pareto_rows,
            "ga_config": asdict(plan.config),
            "seed": plan.config.seed,
            "normalization": plan.normalization,
            "memory_cap": instance.memory_cap,
        }
    )


def sweep_rows(instance: ProblemInstance, normalization: str = "vector") -> list[dict[str, Any]]:
    entries = enumerate_splits(instance)
    pareto = true_pareto_set(instance)
    try:
        chosen: Optional[int] = select_best(pareto, instance, normalization).l1
    except NoFeasibleSolution:
        chosen = None
    on_front = set(pareto.l1s)
    return [
        {
            "l1": e.l1,
            "l2": e.candidate.l2,
            **_objective_fields(e.objectives),
            "feasible": e.feasible,
            "pareto": e.l1 in on_front,
            "chosen": e.l1 == chosen,
        }
        for e in entries
    ]


def cmd_sweep(args: argparse.Namespace) -> str:
    rows = sweep_rows(build_instance(args), args.normalization)
    if args.output == "json":
        return _json(rows)
    if args.output == "table":
        return render_table(rows, SWEEP_COLUMNS)
    return render_csv(rows, SWEEP_COLUMNS)


def compare_rows(instance: ProblemInstance, config: GaConfig, normalization: str = "vector") -> list[dict[str, Any]]:
    plan = plan_split(instance, config, normalization)
    rows = [{"algorithm": PLANNER_NAME, "l1": plan.l1, **_objective_fields(plan.chosen.objectives), "outside_feasible": False}]
    for kind in BaselineKind:
        result = run_baseline(kind, instance, seed=config.seed)
        rows.append(
            {
                "algorithm": kind.value,
                "l1": result.l1,
                **_objective_fields(result.objectives),
                "outside_feasible": result.outside_feasible,
            }
        )
    return rows


def cmd_compare(args: argparse.Namespace) -> str:
    rows = compare_rows(build_instance(args), _config(args), args.normalization)
    if args.output == "json":
        return _json(rows)
    if args.output == "csv":
        return render_csv(rows, COMPARE_COLUMNS)
    return render_table(rows, COMPARE_COLUMNS)


def profile_rows(model: ModelProfile) -> list[dict[str, Any]]:
    rows = []
    for index, (layer, shape, cost) in enumerate(zip(model.layers, model.shapes, model.costs), start=1):
        rows.append(
            {
                "layer": index,
                "kind": layer.kind.value,
                "output_shape": str(shape),
                "params": cost.param_count,
                "activations": cost.activation_elements,
                "client_bytes": model.client_memory(index),
            }
        )
    return rows


def cmd_profile(args: argparse.Namespace) -> str:
    model = _resolve_model(args.model)
    rows = profile_rows(model)
    columns = ("layer", "kind", "output_shape", "params", "activations", "client_bytes")
    if args.output == "json":
        return _json({"name": model.name, "total_layers": model.total_layers, "layers": rows})
    if args.output == "csv":
        return render_csv(rows, columns)
    return f"{model.name}: {model.total_layers} layers, input {model.input_shape}\n" + render_table(rows, columns)


def _positive_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--pop", type=int, default=40, help="population size (even, >= 4)")
    common.add_argument("--gens", type=int, default=50, help="number of generations")
    common.add_argument("--mutation", type=float, default=0.3)
    common.add_argument("--crossover", type=float, default=0.9)
    common.add_argument("--normalization", choices=NORMALIZATIONS, default="vector")
    common.add_argument(
        "--memory-cap", type=_positive_float, default=DEFAULT_MEMORY_CAP, help="client memory cap in bytes"
    )
    common.add_argument(
        "--bandwidth", type=_positive_float, default=None, help="link bandwidth in Mbps; throughputs follow it"
    )
    common.add_argument("--output", choices=("json", "table", "csv"), default=None)

    parser = argparse.ArgumentParser(prog="splitplan", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    model_help = f"profile JSON file or bundled name ({', '.join(BUNDLED_PROFILES)})"
    for name, func, default_output in (
        ("optimize", cmd_optimize, "json"),
        ("sweep", cmd_sweep, "csv"),
        ("compare", cmd_compare, "table"),
    ):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("model", help=model_help)
        p.add_argument("devices", nargs="?", default=None, help="device/network JSON (default: bundled J6 setup)")
        p.set_defaults(func=func, default_output=default_output)
    p = sub.add_parser("profile", parents=[common])
    p.add_argument("model", help=model_help)
    p.set_defaults(func=cmd_profile, default_output="table")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.output is None:
        args.output = args.default_output
    try:
        text = args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoFeasibleSolution as exc:
        print(f"error: no feasible split: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SplitPlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
