"""Compiled vs numpy kernels on the workloads the pose circuits generate.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from qligand import kernels
from qligand.circuit import build_unified
from qligand.grid import GridSpec, RegisterLayout, StageOptions, encode_state
from qligand.simulator import PRUNE, _pack, random_circuit, run

from qligand.grid import OccupancyGrid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def ligand(spec, cells, rng):
    flat = rng.choice(int(np.prod(spec.shape)), size=cells, replace=False)
    coords = [tuple(int(c) for c in np.unravel_index(f, spec.shape)) for f in flat]
    return OccupancyGrid(spec, {c: float(rng.integers(1, 9)) for c in coords})


def workloads(rng):
    spec = GridSpec(4, 4, 4)
    grid = ligand(spec, 16, rng)
    for t_bits, sym in [((2, 2, 2), False), ((3, 3, 3), True), ((4, 4, 3), True)]:
        flags = (True,) * 3 if sym else (False,) * 3
        layout = RegisterLayout.build(spec, StageOptions(t_bits, flags, flags))
        circuit = build_unified(layout)
        state = encode_state(grid, layout)
        terms = 16 * 2 ** layout.options.num_ancillas
        name = f"unified 16^3 grid, t={t_bits}, sym={'6' if sym else '0'} ({terms} terms)"
        yield name, lambda c=circuit, s=state: run(c, s)

    n = 40
    idx = np.sort(rng.choice(2**n, size=1_000_000, replace=False).astype(np.uint64))
    gates = [g for g in random_circuit(n, 80, rng) if g.kind != "H"]
    packed = _pack(gates)
    yield f"permute 1e6 indices x {len(gates)} gates", lambda: kernels.get_backend().permute(idx.copy(), *packed)

    amps = np.full(len(idx), 1 / np.sqrt(len(idx)), dtype=np.complex128)
    yield "hadamard on 1e6 terms", lambda: kernels.get_backend().hadamard(idx, amps, 17, PRUNE)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy backend is available")
    print(f"{'workload':58s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in workloads(np.random.default_rng(0)):
        row = {}
        for b in backends:
            kernels.set_backend(b)
            row[b] = best_of(fn, args.repeat)
        speed = f"{row['python'] / row['cython']:10.1f}x" if "cython" in row else ""
        print(f"{name:58s}" + "".join(f"{row[b]:11.4f}s" for b in backends) + speed)
    kernels.set_backend(kernels.DEFAULT_BACKEND)


if __name__ == "__main__":
    main()
