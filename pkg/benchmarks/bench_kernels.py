"""Compare the compiled Steiner-search kernel against the pure-Python one.

Runs the same scheduling workload once per backend, checks that the
schedules are byte-identical, and reports wall times. Useful after
touching the kernels or when deciding whether building the extension
is worth it on a new machine.

    python3 benchmarks/bench_kernels.py --qubits 64 --products 1000
"""

from __future__ import annotations

import argparse
import sys
import time

from lssched import kernels
from lssched.layout import Arch, generate_layout
from lssched.pauli import build_task_graph
from lssched.randgen import generate_random_circuit, preset_params
from lssched.scheduler import SchedulerConfig, run_schedule, trace_csv_text


def run_with_backend(backend, graph, layout, config, repeat):
    """Best-of-N wall time plus the trace text for cross-checking."""
    saved = (kernels.find_tree, kernels.best_fit)
    kernels.find_tree = backend.find_tree
    kernels.best_fit = backend.best_fit
    try:
        best = float("inf")
        result = None
        for _ in range(repeat):
            start = time.perf_counter()
            result = run_schedule(graph, layout, config)
            best = min(best, time.perf_counter() - start)
        return best, trace_csv_text(result), result.cycles
    finally:
        kernels.find_tree, kernels.best_fit = saved


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="benchmark the Steiner kernel backends")
    parser.add_argument("--qubits", type=int, default=64)
    parser.add_argument("--products", type=int, default=1000)
    parser.add_argument("--preset", default="medium",
                        choices=("low", "medium", "high"))
    parser.add_argument("--arch", default="pure", choices=("pure", "bus"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeat", type=int, default=3,
                        help="reps per backend; best time wins")
    args = parser.parse_args(argv)

    params = preset_params(args.preset, args.qubits, seed=args.seed,
                           num_products=args.products)
    graph = build_task_graph(generate_random_circuit(params))
    arch = Arch(args.arch)
    layout = generate_layout(args.qubits, arch, 1)
    config = SchedulerConfig(arch=arch, seed=args.seed)
    print(f"workload: {args.products} products, {args.qubits} qubits, "
          f"{args.preset} preset, {args.arch} layout, {graph.num_layers} layers")

    backends = [("python", kernels.get_backend("python"))]
    try:
        backends.insert(0, ("compiled", kernels.get_backend("compiled")))
    except ImportError:
        print("compiled kernel not built; timing the reference only")

    times = {}
    traces = {}
    for name, backend in backends:
        times[name], traces[name], cycles = run_with_backend(
            backend, graph, layout, config, args.repeat)
        print(f"{name:>9}: {times[name]:8.3f} s  ({cycles} cycles)")

    if len(traces) == 2:
        if traces["compiled"] != traces["python"]:
            print("ERROR: backends produced different schedules")
            return 1
        print(f"schedules identical; speedup "
              f"{times['python'] / times['compiled']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
