"""Command-line entry point: ``qligand <subcommand> ...``."""

from __future__ import annotations

import argparse
import contextlib
import sys
from collections.abc import Sequence

from . import kernels
from .circuit import CircuitError, build_unified, read_circuit, resource_counts, to_qasm, write_circuit
from .grid import (
    AXES,
    SWAP_PAIRS,
    GridError,
    GridSpec,
    RegisterLayout,
    StageOptions,
    decode_state,
    encode_state,
    read_grid,
    write_grid,
)
from .oracle import PoseSet, ancilla_resolutions, count_configurations, enumerate_poses, write_poses
from .raster import rasterize, read_atoms
from .simulator import SimulationError, dense_check, run, write_state
from .verify import verify

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _int_triple(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values (z,y,x), got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not integers: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not integers: {text!r}") from None


def _float_triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return tuple(float(p) for p in parts)


def _flags(text: str, names: Sequence[str], what: str) -> tuple[bool, bool, bool]:
    chosen = {p.strip() for p in text.split(",") if p.strip()}
    unknown = chosen - set(names)
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown {what} {sorted(unknown)}; choose from {list(names)}")
    return tuple(n in chosen for n in names)


def _add_stage_flags(p: argparse.ArgumentParser):
    p.add_argument("--t-bits", type=_int_triple, default=(0, 0, 0), metavar="MZ,MY,MX",
                   help="translation register widths, ordered z,y,x")
    p.add_argument("--swaps", nargs="?", const="xy,yz,zx", default="",
                   type=lambda s: _flags(s, SWAP_PAIRS, "swap pair"), metavar="PAIRS",
                   help="controlled coordinate swaps (default all of xy,yz,zx)")
    p.add_argument("--rots", nargs="?", const="z,y,x", default="",
                   type=lambda s: _flags(s, AXES, "rotation axis"), metavar="AXES",
                   help="controlled 90 degree rotations (default all of z,y,x)")
    p.add_argument("--shared-controls", action="store_true",
                   help="one control qubit per axis drives both its rotation and swap")


def _options(args) -> StageOptions:
    swaps = args.swaps if isinstance(args.swaps, tuple) else (False,) * 3
    rots = args.rots if isinstance(args.rots, tuple) else (False,) * 3
    return StageOptions(args.t_bits, swaps, rots, args.shared_controls)


@contextlib.contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _read(path: str, reader):
    with open(path, encoding="utf-8") as fh:
        return reader(fh)


def cmd_rasterize(args) -> int:
    atoms = _read(args.atoms, read_atoms)
    spec = GridSpec(*args.bits, cell_length=args.cell_length, origin=args.origin)
    grid = rasterize(atoms, spec)
    with _open_out(args.out) as fh:
        write_grid(grid, fh)
    return EXIT_OK


def cmd_build(args) -> int:
    grid = _read(args.grid, read_grid)
    layout = RegisterLayout.build(grid.spec, _options(args))
    circuit = build_unified(layout)
    with _open_out(args.out) as fh:
        write_circuit(circuit, fh)
    if args.qasm:
        with _open_out(args.qasm) as fh:
            fh.write(to_qasm(circuit))
    return EXIT_OK


def cmd_simulate(args) -> int:
    grid = _read(args.grid, read_grid)
    circuit = _read(args.circuit, read_circuit)
    options = _options(args)
    if options.num_ancillas or args.shared_controls:
        layout = RegisterLayout.build(grid.spec, options)
        if layout.total_qubits != circuit.num_qubits:
            raise GridError(
                f"stage flags give {layout.total_qubits} qubits, circuit has {circuit.num_qubits}"
            )
    else:
        layout = RegisterLayout.positions_only(grid.spec, circuit.num_qubits)
    initial = encode_state(grid, layout)
    state = dense_check(circuit, initial) if args.dense else run(circuit, initial)
    with _open_out(args.out) as fh:
        write_state(state, fh)
    if args.poses:
        decoded = decode_state(state, layout, grid.max_abs_weight)
        with _open_out(args.poses) as fh:
            write_poses(PoseSet(grid.spec, decoded), fh)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    grid = _read(args.grid, read_grid)
    poses = enumerate_poses(grid, _options(args))
    with _open_out(args.out) as fh:
        write_poses(poses, fh)
    summary = f"poses={len(poses)} distinct={poses.distinct_count()} collisions={poses.collisions()}"
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_verify(args) -> int:
    grid = _read(args.grid, read_grid)
    report = verify(grid, _options(args))
    print(report.render() if args.verbose else report.summary_line())
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_count(args) -> int:
    if args.dof is not None:
        counts = args.dof
    else:
        counts = ancilla_resolutions(_options(args))
    print(count_configurations(counts))
    return EXIT_OK


def cmd_stats(args) -> int:
    circuit = _read(args.circuit, read_circuit)
    print("\n".join(resource_counts(circuit).lines()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qligand", description=__doc__)
    parser.add_argument("--backend", choices=sorted(kernels.BACKENDS),
                        help=f"simulator kernels (default {kernels.DEFAULT_BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rasterize", help="atom list -> grid file")
    p.add_argument("--atoms", required=True, help="'element x y z [weight]' lines")
    p.add_argument("--bits", type=_int_triple, required=True, metavar="BZ,BY,BX")
    p.add_argument("--cell-length", type=float, default=1.0)
    p.add_argument("--origin", type=_float_triple, default=(0.0, 0.0, 0.0), metavar="X,Y,Z")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("build", help="grid file + stage flags -> circuit file")
    p.add_argument("--grid", required=True)
    _add_stage_flags(p)
    p.add_argument("--out")
    p.add_argument("--qasm", help="also write OpenQASM 2.0 here")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="run a circuit on the encoded grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--circuit", required=True)
    _add_stage_flags(p)
    p.add_argument("--dense", action="store_true", help="use the dense state-vector simulator")
    p.add_argument("--out")
    p.add_argument("--poses", help="write decoded branches as a pose file (needs stage flags)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enumerate", help="classical pose enumeration")
    p.add_argument("--grid", required=True)
    _add_stage_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="simulated superposition vs classical enumeration")
    p.add_argument("--grid", required=True)
    _add_stage_flags(p)
    p.add_argument("-v", "--verbose", action="store_true", help="list mismatching branches")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="number of discrete configurations")
    p.add_argument("--dof", type=_int_list, help="comma-separated values per degree of freedom")
    _add_stage_flags(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("stats", help="gate and qubit counts of a circuit file")
    p.add_argument("--circuit", required=True)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.backend:
            kernels.set_backend(args.backend)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except (GridError, CircuitError, SimulationError, ValueError, OSError) as exc:
        print(f"qligand: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
