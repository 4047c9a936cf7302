"""Command-line harness: transpile, stats, randgen, schedule, sweep.

Exit codes: 0 success, 2 bad input, 3 scheduling failure, 4 sweep
finished with some failed rows.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import statistics
import sys

from . import clifford, randgen
from .cultivation import CultivationParams
from .errors import InputError, SchedulingError
from .layout import Arch, generate_layout, layout_to_json
from .pauli import (build_task_graph, load_circuit, moving_window_stats,
                    parallelism_stats, save_circuit)
from .scheduler import (SchedulerConfig, baseline_compat_config,
                        efficiency_upper_bound, metrics_dict,
                        metrics_json_text, run_schedule, trace_csv_text,
                        validate_schedule)

LONG_CSV_COLUMNS = [
    "job", "rep", "seed", "arch", "density", "packing", "instant_magic",
    "lambda", "distance", "cultivation_mean", "qubits", "products", "layers",
    "products_per_layer", "cycles", "n_cells", "n_ref_cells", "volume",
    "parallel_efficiency", "scheduling_efficiency", "efficiency_upper_bound",
    "avg_completed_cultivation", "ready_used_for_routing",
    "cultivation_completed", "cultivation_terminated", "status", "error",
]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchedulingError as exc:
        print(f"scheduling error: {exc}", file=sys.stderr)
        return 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lssched",
        description="Schedule Pauli-product circuits on surface-code layouts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transpile", help="gate file -> Pauli product file")
    p.add_argument("gate_file")
    p.add_argument("product_file")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("stats", help="task-graph parallelism statistics")
    p.add_argument("product_file")
    p.add_argument("--window", type=int, default=100,
                   help="moving-window width in layers (default 100)")
    p.add_argument("--window-csv", metavar="PATH",
                   help="write windowed stats CSV here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("randgen", help="generate a random product circuit")
    p.add_argument("product_file")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--products", type=int, default=20000)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--size-mean", type=float)
    group.add_argument("--preset", choices=sorted(randgen.PRESET_TARGETS))
    group.add_argument("--target-ppl", type=float,
                       help="calibrate size_mean to this products/layer")
    p.add_argument("--spread", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_randgen)

    p = sub.add_parser("schedule", help="run the scheduler on a product file")
    p.add_argument("product_file")
    p.add_argument("--out-dir", required=True,
                   help="directory for trace/metrics files")
    _add_config_flags(p)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--verify", action="store_true",
                   help="re-validate each schedule and written trace")
    p.add_argument("--dump-layout", metavar="PATH",
                   help="also write the layout as JSON")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("sweep", help="run an experiment-spec job matrix")
    p.add_argument("spec_file")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel worker processes (default 1)")
    p.set_defaults(func=cmd_sweep)
    return parser


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--arch", choices=["bus", "pure"], default="pure")
    p.add_argument("--density", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=0.00227)
    p.add_argument("--distance", type=int, default=17)
    p.add_argument("--min-cycles", type=int, default=1)
    p.add_argument("--cultivation-mean", type=float,
                   help="set the rate from a target mean cycle count instead of --lambda")
    p.add_argument("--instant-magic", action="store_true")
    p.add_argument("--packing", choices=["minfit", "random_order"], default="minfit")
    p.add_argument("--no-horizontal-edges", action="store_true")
    p.add_argument("--ready-penalty", type=int, default=0)
    p.add_argument("--strict-single-side", action="store_true")
    p.add_argument("--bus-ring-intermediates", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--baseline-compat", action="store_true",
                   help="bus arch, instant magic, side access only, random-order packing")


def _config_from_args(args, seed: int) -> SchedulerConfig:
    if args.baseline_compat:
        return baseline_compat_config(seed)
    if args.cultivation_mean is not None:
        cult = CultivationParams.from_mean_cycles(
            args.cultivation_mean, args.distance, args.min_cycles)
    else:
        cult = CultivationParams(args.lam, args.distance, args.min_cycles)
    return SchedulerConfig(
        arch=Arch(args.arch),
        cultivation=cult,
        instant_magic=args.instant_magic,
        packing=args.packing,
        allow_horizontal_edges=not args.no_horizontal_edges,
        ready_routing_penalty=args.ready_penalty,
        seed=seed,
        bus_ring_intermediates=args.bus_ring_intermediates,
        strict_single_side=args.strict_single_side,
    )


# ---------------------------------------------------------------------------
# Commands

def cmd_transpile(args) -> int:
    with open(args.gate_file, encoding="utf-8") as fh:
        gates = clifford.parse_gates(fh.read())
    circuit = clifford.transpile(gates)
    save_circuit(circuit, args.product_file)
    print(f"wrote {args.product_file}: {len(circuit.products)} products, "
          f"{circuit.num_qubits} qubits")
    return 0


def cmd_stats(args) -> int:
    circuit = load_circuit(args.product_file)
    graph = build_task_graph(circuit)
    stats = parallelism_stats(graph)
    if not circuit.products:
        print("warning: no products", file=sys.stderr)
    print(f"qubits {circuit.num_qubits}")
    print(f"products {stats['t_count']}")
    print(f"layers {stats['num_layers']}")
    print(f"avg_products_per_layer {stats['avg_products_per_layer']:.2f}")
    print(f"max_products_per_layer {stats['max_products_per_layer']}")
    if args.window_csv:
        rows = moving_window_stats(graph, args.window) if circuit.products else []
        with open(args.window_csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("layer_index,avg_products,max_products,avg_size,max_size\n")
            for r in rows:
                fh.write(f"{r['layer_index']},{r['avg_products']:.4f},"
                         f"{r['max_products']},{r['avg_size']:.4f},{r['max_size']}\n")
        print(f"wrote {args.window_csv}: {len(rows)} windows")
    return 0


def cmd_randgen(args) -> int:
    if args.preset:
        params = randgen.preset_params(args.preset, args.qubits,
                                       seed=args.seed, num_products=args.products)
    elif args.target_ppl is not None:
        params = randgen.calibrate_preset(args.target_ppl, args.qubits, seed=args.seed)
        params = randgen.RandGenParams(
            num_qubits=args.qubits, num_products=args.products,
            size_mean=params.size_mean, spread=params.spread, seed=args.seed)
    else:
        params = randgen.RandGenParams(
            num_qubits=args.qubits, num_products=args.products,
            size_mean=args.size_mean if args.size_mean is not None else 4.0,
            spread=args.spread, seed=args.seed)
    circuit = randgen.generate_random_circuit(params)
    save_circuit(circuit, args.product_file)
    stats = parallelism_stats(build_task_graph(circuit))
    print(f"wrote {args.product_file}: {len(circuit.products)} products, "
          f"{circuit.num_qubits} qubits")
    print(f"products_per_layer {stats['avg_products_per_layer']:.2f}")
    return 0


def cmd_schedule(args) -> int:
    circuit = load_circuit(args.product_file)
    graph = build_task_graph(circuit)
    if args.reps < 1:
        raise InputError("--reps must be >= 1")
    base = _config_from_args(args, args.seed)
    layout = generate_layout(circuit.num_qubits, base.arch, args.density)
    if args.dump_layout:
        with open(args.dump_layout, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(layout_to_json(layout))
    os.makedirs(args.out_dir, exist_ok=True)

    rows = []
    for rep in range(args.reps):
        config = _config_from_args(args, args.seed + rep)
        result = run_schedule(graph, layout, config)
        if args.verify:
            validate_schedule(result, graph, layout, config)
        trace_path = os.path.join(args.out_dir, f"trace_{config.seed}.csv")
        metrics_path = os.path.join(args.out_dir, f"metrics_{config.seed}.json")
        with open(trace_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(trace_csv_text(result))
        with open(metrics_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(metrics_json_text(result))
        if args.verify:
            with open(trace_path, encoding="utf-8") as fh:
                if fh.read() != trace_csv_text(result):
                    raise SchedulingError("trace round-trip mismatch")
        rows.append(metrics_dict(result))
        print(f"seed {config.seed}: cycles={result.cycles} volume={result.volume} "
              f"parallel_eff={result.parallel_efficiency:.4f} "
              f"scheduling_eff={result.scheduling_efficiency:.4f}")

    bound = efficiency_upper_bound(layout, graph, base)
    summary = {
        "runs": len(rows),
        "median_cycles": statistics.median(r["cycles"] for r in rows),
        "median_volume": statistics.median(r["volume"] for r in rows),
        "median_parallel_efficiency": statistics.median(
            r["parallel_efficiency"] for r in rows),
        "median_scheduling_efficiency": statistics.median(
            r["scheduling_efficiency"] for r in rows),
        "efficiency_upper_bound": bound,
        "config": base.echo(),
        "density": args.density,
        "first_seed": args.seed,
    }
    avgs = [r["cultivation"]["avg_completed_cycles"] for r in rows
            if r["cultivation"]["avg_completed_cycles"] is not None]
    summary["median_avg_completed_cultivation"] = statistics.median(avgs) if avgs else None
    with open(os.path.join(args.out_dir, "summary.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(summary, indent=1) + "\n")
    print(f"median scheduling_efficiency {summary['median_scheduling_efficiency']:.4f} "
          f"(upper bound {bound:.4f})")
    return 0


# ---------------------------------------------------------------------------
# Sweep

def _load_sweep_spec(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad sweep spec: {exc}") from None
    if not isinstance(spec, dict) or "jobs" not in spec:
        raise InputError("sweep spec must be an object with a 'jobs' list")
    return spec


def _job_circuit(job: dict, base_dir: str):
    src = job.get("input", {})
    if "product_file" in src:
        return load_circuit(os.path.join(base_dir, src["product_file"]))
    if "gate_file" in src:
        with open(os.path.join(base_dir, src["gate_file"]), encoding="utf-8") as fh:
            return clifford.transpile(clifford.parse_gates(fh.read()))
    if "randgen" in src:
        r = dict(src["randgen"])
        preset = r.pop("preset", None)
        if preset:
            params = randgen.preset_params(
                preset, r["num_qubits"], seed=r.get("seed", 0),
                num_products=r.get("num_products", 20000))
        else:
            params = randgen.RandGenParams(**r)
        return randgen.generate_random_circuit(params)
    raise InputError(f"job {job.get('name', '?')}: no input source given")


def _job_config(job: dict, seed: int) -> SchedulerConfig:
    cfg = dict(job.get("config", {}))
    if cfg.pop("baseline_compat", False):
        return baseline_compat_config(seed)
    distance = cfg.pop("distance", 17)
    min_cycles = cfg.pop("min_cycles", 1)
    if "cultivation_mean" in cfg and cfg["cultivation_mean"] is not None:
        cult = CultivationParams.from_mean_cycles(
            cfg.pop("cultivation_mean"), distance, min_cycles)
    else:
        cfg.pop("cultivation_mean", None)
        cult = CultivationParams(cfg.pop("lambda", 0.00227), distance, min_cycles)
    return SchedulerConfig(
        arch=Arch(job.get("arch", "pure")),
        cultivation=cult,
        instant_magic=cfg.pop("instant_magic", False),
        packing=cfg.pop("packing", "minfit"),
        allow_horizontal_edges=cfg.pop("allow_horizontal_edges", True),
        ready_routing_penalty=cfg.pop("ready_routing_penalty", 0),
        seed=seed,
        bus_ring_intermediates=cfg.pop("bus_ring_intermediates", False),
        strict_single_side=cfg.pop("strict_single_side", False),
    )


def run_sweep_row(task: tuple) -> dict:
    """One (job, rep) execution; returns a long-format row dict."""
    job, base_dir, rep = task
    name = job.get("name", "job")
    seed = job.get("seed", 0) + rep
    row = dict.fromkeys(LONG_CSV_COLUMNS, "")
    row.update({"job": name, "rep": rep, "seed": seed, "status": "ok", "error": ""})
    try:
        circuit = _job_circuit(job, base_dir)
        graph = build_task_graph(circuit)
        config = _job_config(job, seed)
        density = job.get("density", 1)
        layout = generate_layout(circuit.num_qubits, config.arch, density)
        result = run_schedule(graph, layout, config)
        validate_schedule(result, graph, layout, config)
        stats = parallelism_stats(graph)
        cult = config.cultivation
        row.update({
            "arch": config.arch.value,
            "density": density,
            "packing": config.packing,
            "instant_magic": config.instant_magic,
            "lambda": cult.lam,
            "distance": cult.distance,
            "cultivation_mean": 1.0 if config.instant_magic else cult.mean_cycles(),
            "qubits": circuit.num_qubits,
            "products": stats["t_count"],
            "layers": stats["num_layers"],
            "products_per_layer": round(stats["avg_products_per_layer"], 4),
            "cycles": result.cycles,
            "n_cells": result.n_cells,
            "n_ref_cells": result.n_ref_cells,
            "volume": result.volume,
            "parallel_efficiency": round(result.parallel_efficiency, 6),
            "scheduling_efficiency": round(result.scheduling_efficiency, 6),
            "efficiency_upper_bound": round(
                efficiency_upper_bound(layout, graph, config), 6),
            "avg_completed_cultivation": (
                "" if result.avg_completed_cultivation is None
                else round(result.avg_completed_cultivation, 4)),
            "ready_used_for_routing": result.ready_used_for_routing,
            "cultivation_completed": result.cultivation_completed,
            "cultivation_terminated": result.cultivation_terminated,
        })
    except (InputError, SchedulingError, OSError) as exc:
        row["status"] = "error"
        row["error"] = str(exc).replace(",", ";").replace("\n", " ")
    return row


def cmd_sweep(args) -> int:
    spec = _load_sweep_spec(args.spec_file)
    base_dir = os.path.dirname(os.path.abspath(args.spec_file))
    out_dir = spec.get("output_dir", "sweep_out")
    if not os.path.isabs(out_dir):
        out_dir = os.path.join(base_dir, out_dir)
    os.makedirs(out_dir, exist_ok=True)

    tasks = []
    for job in spec["jobs"]:
        for rep in range(int(job.get("reps", 1))):
            tasks.append((job, base_dir, rep))

    if args.jobs > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run_sweep_row, tasks))
    else:
        rows = [run_sweep_row(t) for t in tasks]

    long_path = os.path.join(out_dir, "long.csv")
    with open(long_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(LONG_CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in LONG_CSV_COLUMNS) + "\n")

    _write_pivots(rows, out_dir)
    failures = sum(1 for r in rows if r["status"] != "ok")
    print(f"wrote {long_path}: {len(rows)} rows, {failures} failed")
    return 4 if failures else 0


def _median_by(rows, key_fields, value_field):
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        if r["status"] != "ok" or r[value_field] == "":
            continue
        key = tuple(r[k] for k in key_fields)
        groups.setdefault(key, []).append(float(r[value_field]))
    return {k: statistics.median(v) for k, v in sorted(groups.items())}


def _write_pivots(rows, out_dir: str) -> None:
    ok = [r for r in rows if r["status"] == "ok"]

    # Parallelism vs efficiency, with the analytic bound.
    se = _median_by(ok, ("job", "arch", "products_per_layer"), "scheduling_efficiency")
    ub = _median_by(ok, ("job", "arch", "products_per_layer"), "efficiency_upper_bound")
    with open(os.path.join(out_dir, "parallelism_efficiency.csv"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write("job,arch,products_per_layer,median_scheduling_efficiency,"
                 "efficiency_upper_bound\n")
        for (job, arch, ppl), val in se.items():
            fh.write(f"{job},{arch},{ppl},{val:.6f},{ub[(job, arch, ppl)]:.6f}\n")

    # Density vs parallel/scheduling efficiency.
    pe = _median_by(ok, ("job", "arch", "density"), "parallel_efficiency")
    se_d = _median_by(ok, ("job", "arch", "density"), "scheduling_efficiency")
    with open(os.path.join(out_dir, "density_efficiency.csv"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write("job,arch,density,median_parallel_efficiency,"
                 "median_scheduling_efficiency\n")
        for (job, arch, density), val in pe.items():
            fh.write(f"{job},{arch},{density},{val:.6f},{se_d[(job, arch, density)]:.6f}\n")

    # Cultivation mean vs relative pure/bus improvement.
    by_mean = _median_by(ok, ("cultivation_mean", "arch"), "scheduling_efficiency")
    means = sorted({k[0] for k in by_mean})
    with open(os.path.join(out_dir, "cultivation_improvement.csv"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write("cultivation_mean,median_scheduling_efficiency_pure,"
                 "median_scheduling_efficiency_bus,relative_improvement\n")
        for mean in means:
            p = by_mean.get((mean, "pure"))
            b = by_mean.get((mean, "bus"))
            if p is None or b is None:
                continue
            fh.write(f"{mean},{p:.6f},{b:.6f},{p / b - 1.0:.6f}\n")


if __name__ == "__main__":
    sys.exit(main())
