"""Random product circuits with controllable parallelism.

Two knobs: size_mean sets the expected operator count per product via a
truncated geometric draw, spread confines each product's qubits to a
uniformly placed window. Large products serialize the dependency graph,
small local ones parallelize it, so presets are calibrated against the
measured average products per layer rather than distribution internals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError
from .pauli import Circuit, PauliProduct, build_task_graph, parallelism_stats

_OPS = ("X", "Y", "Z")

# Average products per layer on 64 qubits, as reported for the random
# workloads ("low", "medium", "high" parallelism).
PRESET_TARGETS = {"low": 1.42, "medium": 7.92, "high": 25.13}


@dataclass(frozen=True)
class RandGenParams:
    num_qubits: int
    num_products: int = 20000
    size_mean: float = 4.0
    spread: int | None = None  # None = whole register
    seed: int = 0

    def __post_init__(self):
        if self.num_qubits < 1 or self.num_products < 0:
            raise InputError("bad circuit dimensions")
        if not 1 <= self.size_mean <= self.num_qubits:
            raise InputError("size_mean must lie in [1, num_qubits]")
        spread = self.num_qubits if self.spread is None else self.spread
        if not 1 <= spread <= self.num_qubits:
            raise InputError("spread must lie in [1, num_qubits]")


def generate_random_circuit(params: RandGenParams) -> Circuit:
    """Draw num_products products; deterministic in the seed.

    Per product the draws are: one uniform for the size, the window
    start, the qubit choice within the window, then the operators.
    """
    rng = np.random.default_rng(params.seed)
    spread = params.num_qubits if params.spread is None else params.spread
    cap = min(spread, params.num_qubits)
    # Geometric with mean size_mean, clamped to [1, cap].
    decay = math.log(1.0 - 1.0 / params.size_mean) if params.size_mean > 1 else None
    products = []
    for seq in range(params.num_products):
        if decay is None:
            k = 1
        else:
            u = rng.random()
            k = max(1, math.ceil(math.log(1.0 - u) / decay)) if u > 0 else 1
            k = min(k, cap)
        start = int(rng.integers(0, params.num_qubits - spread + 1))
        qubits = start + rng.choice(spread, size=k, replace=False)
        ops = rng.integers(0, 3, size=k)
        products.append(PauliProduct(
            tuple(sorted((int(q), _OPS[o]) for q, o in zip(qubits, ops))), seq))
    return Circuit(params.num_qubits, tuple(products))


def measure_products_per_layer(params: RandGenParams) -> float:
    graph = build_task_graph(generate_random_circuit(params))
    return parallelism_stats(graph)["avg_products_per_layer"]


def calibrate_preset(target_products_per_layer: float, num_qubits: int,
                     seed: int = 0, num_products: int = 2000,
                     tolerance: float = 0.05, max_iter: int = 60) -> RandGenParams:
    """Bisect size_mean (spread = whole register) to hit a parallelism target.

    The measured average products per layer is monotone decreasing in
    size_mean, so plain bisection converges; the calibration circuit is
    kept small since only the ratio is needed.
    """
    target = target_products_per_layer
    if not 1.0 <= target <= num_qubits:
        raise InputError(f"target products/layer {target} outside [1, {num_qubits}]")

    def measure(mean: float) -> float:
        return measure_products_per_layer(RandGenParams(
            num_qubits=num_qubits, num_products=num_products,
            size_mean=mean, spread=num_qubits, seed=seed))

    lo, hi = 1.0, float(num_qubits)
    if measure(lo) < target * (1 - tolerance):
        raise InputError(f"target {target} unreachable even at size_mean=1")
    for _ in range(max_iter):
        mid = (lo + hi) / 2
        ppl = measure(mid)
        if abs(ppl - target) <= tolerance * target:
            return RandGenParams(num_qubits=num_qubits, num_products=num_products,
                                 size_mean=mid, spread=num_qubits, seed=seed)
        if ppl > target:
            lo = mid
        else:
            hi = mid
    raise InputError(f"calibration did not converge on target {target}")


def preset_params(name: str, num_qubits: int, seed: int = 0,
                  num_products: int = 2000) -> RandGenParams:
    """Calibrated params for the named parallelism preset."""
    if name not in PRESET_TARGETS:
        raise InputError(f"unknown preset {name!r}; choose from {sorted(PRESET_TARGETS)}")
    params = calibrate_preset(PRESET_TARGETS[name], num_qubits, seed=seed)
    return replace(params, num_products=num_products)
