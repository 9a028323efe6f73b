"""Occupancy grids, qubit register layouts and the basis-state encoding.

Global basis index convention (least significant first)::

    z | y | x | t_z | t_y | t_x | swap controls | rotation controls

Within every register the least-significant qubit comes first.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from itertools import product
from types import MappingProxyType
from typing import TYPE_CHECKING, TextIO

import numpy as np

if TYPE_CHECKING:
    from .simulator import SparseState

AXES = ("z", "y", "x")
SWAP_PAIRS = ("xy", "yz", "zx")
MAX_REGISTER_BITS = 16
MAX_QUBITS = 48

ZERO_AMPLITUDE = 1e-12
NORM_CONSISTENCY = 1e-9

Coord = tuple[int, int, int]


class GridError(ValueError):
    """Invalid grid, layout or file contents."""


class StructuralError(GridError):
    """A simulated state does not decompose into equally weighted pose branches."""


@dataclass(frozen=True)
class GridSpec:
    bits_z: int
    bits_y: int
    bits_x: int
    cell_length: float = 1.0
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("bits_z", "bits_y", "bits_x"):
            bits = getattr(self, name)
            if not isinstance(bits, (int, np.integer)) or isinstance(bits, bool):
                raise GridError(f"{name} must be an integer, got {bits!r}")
            if not 0 <= bits <= MAX_REGISTER_BITS:
                raise GridError(f"{name}={bits} outside 0..{MAX_REGISTER_BITS}")
        if not (self.cell_length > 0 and math.isfinite(self.cell_length)):
            raise GridError(f"cell_length must be positive, got {self.cell_length}")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        if len(self.origin) != 3:
            raise GridError("origin must be a 3-vector")

    @property
    def bits(self) -> tuple[int, int, int]:
        return (self.bits_z, self.bits_y, self.bits_x)

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(1 << b for b in self.bits)

    @property
    def position_qubits(self) -> int:
        return sum(self.bits)

    def contains(self, coord: Coord) -> bool:
        return all(0 <= c < s for c, s in zip(coord, self.shape))


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Weighted voxel map keyed by ``(z, y, x)``.

    Cells with weight exactly zero are dropped, so ``len(grid)`` counts the
    occupied cells.
    """

    spec: GridSpec
    cells: Mapping[Coord, float]

    def __post_init__(self):
        items = self.cells.items() if isinstance(self.cells, Mapping) else self.cells
        sz, sy, sx = self.spec.shape
        clean: dict[Coord, float] = {}
        for coord, weight in items:
            key = tuple(int(c) for c in coord)
            if len(key) != 3:
                raise GridError(f"cell coordinate {coord!r} is not (z, y, x)")
            if key in clean:
                raise GridError(f"duplicate cell {key}")
            z, y, x = key
            if not (0 <= z < sz and 0 <= y < sy and 0 <= x < sx):
                raise GridError(f"cell {key} outside grid of shape {self.spec.shape}")
            w = float(weight)
            if not math.isfinite(w):
                raise GridError(f"cell {key} has non-finite weight {weight!r}")
            if w != 0.0:
                clean[key] = w
        object.__setattr__(self, "cells", MappingProxyType(dict(sorted(clean.items()))))

    def __len__(self) -> int:
        return len(self.cells)

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return self.spec.bits == other.spec.bits and dict(self.cells) == dict(other.cells)

    def __hash__(self):
        return hash((self.spec.bits, frozenset(self.cells.items())))

    @property
    def max_abs_weight(self) -> float:
        return max((abs(w) for w in self.cells.values()), default=0.0)

    def weights(self) -> list[float]:
        return list(self.cells.values())

    def allclose(self, other: OccupancyGrid, atol: float = 1e-9) -> bool:
        if self.cells.keys() != other.cells.keys():
            return False
        return all(abs(w - other.cells[c]) <= atol for c, w in self.cells.items())

    def to_dense(self) -> np.ndarray:
        arr = np.zeros(self.spec.shape)
        for (z, y, x), w in self.cells.items():
            arr[z, y, x] = w
        return arr

    @classmethod
    def from_dense(cls, spec: GridSpec, array) -> OccupancyGrid:
        arr = np.asarray(array, dtype=float)
        if arr.shape != spec.shape:
            raise GridError(f"array shape {arr.shape} does not match {spec.shape}")
        return cls(spec, {tuple(int(i) for i in c): arr[c] for c in zip(*np.nonzero(arr))})


@dataclass(frozen=True)
class StageOptions:
    """Which ancilla-controlled stages a unified circuit contains.

    ``t_bits`` is ordered (z, y, x); ``swaps`` follows the pair order
    (x,y), (y,z), (z,x); ``rots`` follows the axis order z, y, x.  With
    ``shared_controls`` one control qubit per axis drives both the rotation
    about that axis and the swap in the same slot.
    """

    t_bits: tuple[int, int, int] = (0, 0, 0)
    swaps: tuple[bool, bool, bool] = (False, False, False)
    rots: tuple[bool, bool, bool] = (False, False, False)
    shared_controls: bool = False

    def __post_init__(self):
        object.__setattr__(self, "t_bits", tuple(int(m) for m in self.t_bits))
        object.__setattr__(self, "swaps", tuple(bool(s) for s in self.swaps))
        object.__setattr__(self, "rots", tuple(bool(r) for r in self.rots))
        if len(self.t_bits) != 3 or len(self.swaps) != 3 or len(self.rots) != 3:
            raise GridError("stage options need one entry per axis")
        if any(m < 0 for m in self.t_bits):
            raise GridError(f"negative translation width in {self.t_bits}")

    @property
    def control_slots(self) -> tuple[bool, bool, bool]:
        """Slots that own a rotation-control qubit in shared mode."""
        return tuple(s or r for s, r in zip(self.swaps, self.rots))

    @property
    def num_ancillas(self) -> int:
        if self.shared_controls:
            return sum(self.t_bits) + sum(self.control_slots)
        return sum(self.t_bits) + sum(self.swaps) + sum(self.rots)


@dataclass(frozen=True)
class ControlSetting:
    dz: int = 0
    dy: int = 0
    dx: int = 0
    swaps: tuple[bool, bool, bool] = (False, False, False)
    rots: tuple[bool, bool, bool] = (False, False, False)

    def __post_init__(self):
        object.__setattr__(self, "swaps", tuple(bool(s) for s in self.swaps))
        object.__setattr__(self, "rots", tuple(bool(r) for r in self.rots))
        if min(self.dz, self.dy, self.dx) < 0:
            raise GridError("translation distances must be nonnegative")

    @property
    def shifts(self) -> tuple[int, int, int]:
        return (self.dz, self.dy, self.dx)

    def sort_key(self):
        return (self.dz, self.dy, self.dx, self.swaps, self.rots)

    def label(self) -> str:
        s = "".join("1" if b else "0" for b in self.swaps)
        r = "".join("1" if b else "0" for b in self.rots)
        return f"dz={self.dz} dy={self.dy} dx={self.dx} s={s} r={r}"


def iter_control_settings(options: StageOptions) -> Iterator[ControlSetting]:
    """Every control setting the enabled ancillas can select, in sorted order."""
    mz, my, mx = options.t_bits
    if options.shared_controls:
        slots = [(False, True) if on else (False,) for on in options.control_slots]
    else:
        slots = [(False, True) if on else (False,) for on in options.swaps + options.rots]
    for dz, dy, dx in product(range(1 << mz), range(1 << my), range(1 << mx)):
        for flags in product(*slots):
            if options.shared_controls:
                swaps = tuple(f and s for f, s in zip(flags, options.swaps))
                rots = tuple(f and r for f, r in zip(flags, options.rots))
            else:
                swaps, rots = flags[:3], flags[3:]
            yield ControlSetting(dz, dy, dx, swaps, rots)


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit indices for every register; registers are least-significant first.

    ``swap_controls`` and ``rot_controls`` hold ``None`` for disabled slots.
    In shared mode the swap and rotation of one slot (xy with z, yz with y,
    zx with x) are driven by the same qubit.
    """

    spec: GridSpec
    pos_z: tuple[int, ...]
    pos_y: tuple[int, ...]
    pos_x: tuple[int, ...]
    t_z: tuple[int, ...] = ()
    t_y: tuple[int, ...] = ()
    t_x: tuple[int, ...] = ()
    swap_controls: tuple[int | None, int | None, int | None] = (None, None, None)
    rot_controls: tuple[int | None, int | None, int | None] = (None, None, None)
    total_qubits: int = 0
    shared_controls: bool = False

    def __post_init__(self):
        for reg, bits, axis in zip(self.positions, self.spec.bits, AXES):
            if len(reg) != bits:
                raise GridError(f"pos_{axis} has width {len(reg)}, grid needs {bits}")
        for treg, bits, axis in zip(self.translations, self.spec.bits, AXES):
            if len(treg) > bits:
                raise GridError(f"t_{axis} width {len(treg)} exceeds position width {bits}")
        if self.total_qubits > MAX_QUBITS:
            raise GridError(f"{self.total_qubits} qubits exceed the {MAX_QUBITS}-bit index cap")
        used = [q for reg in self.positions + self.translations for q in reg]
        if self.shared_controls:
            for i, (s, r) in enumerate(zip(self.swap_controls, self.rot_controls)):
                if s is not None and r is not None and s != r:
                    raise GridError(f"shared control slot {i} uses two different qubits")
                if s is not None or r is not None:
                    used.append(r if r is not None else s)
        else:
            used += [q for q in self.swap_controls + self.rot_controls if q is not None]
        if len(set(used)) != len(used):
            raise GridError("qubit indices are not distinct")
        if any(q < 0 or q >= self.total_qubits for q in used):
            raise GridError(f"qubit index outside 0..{self.total_qubits - 1}")

    @classmethod
    def build(cls, spec: GridSpec, options: StageOptions | None = None) -> RegisterLayout:
        options = options or StageOptions()
        nxt = 0

        def take(n):
            nonlocal nxt
            reg = tuple(range(nxt, nxt + n))
            nxt += n
            return reg

        pos = [take(b) for b in spec.bits]
        t = [take(m) for m in options.t_bits]
        if options.shared_controls:
            slot = [take(1)[0] if on else None for on in options.control_slots]
            swap = tuple(q if on else None for q, on in zip(slot, options.swaps))
            rot = tuple(q if on else None for q, on in zip(slot, options.rots))
        else:
            swap = tuple(take(1)[0] if on else None for on in options.swaps)
            rot = tuple(take(1)[0] if on else None for on in options.rots)
        return cls(spec, *pos, *t, swap, rot, nxt, options.shared_controls)

    @classmethod
    def positions_only(cls, spec: GridSpec, total_qubits: int | None = None) -> RegisterLayout:
        """Position registers on the lowest qubits, everything above left unassigned."""
        n = spec.position_qubits
        total = n if total_qubits is None else total_qubits
        if total < n:
            raise GridError(f"{total} qubits cannot hold {n} position qubits")
        base = cls.build(spec)
        return cls(spec, base.pos_z, base.pos_y, base.pos_x, total_qubits=total)

    @property
    def positions(self) -> tuple[tuple[int, ...], ...]:
        return (self.pos_z, self.pos_y, self.pos_x)

    @property
    def translations(self) -> tuple[tuple[int, ...], ...]:
        return (self.t_z, self.t_y, self.t_x)

    def position(self, axis: str) -> tuple[int, ...]:
        return self.positions[AXES.index(axis)]

    def translation(self, axis: str) -> tuple[int, ...]:
        return self.translations[AXES.index(axis)]

    @property
    def ancillas(self) -> list[int]:
        qs = [q for reg in self.translations for q in reg]
        qs += [q for q in self.swap_controls if q is not None]
        qs += [q for q in self.rot_controls if q is not None]
        return sorted(set(qs))

    @property
    def options(self) -> StageOptions:
        return StageOptions(
            tuple(len(t) for t in self.translations),
            tuple(q is not None for q in self.swap_controls),
            tuple(q is not None for q in self.rot_controls),
            self.shared_controls,
        )


def _register_value(index: int, reg: Iterable[int]) -> int:
    return sum(((index >> q) & 1) << k for k, q in enumerate(reg))


def _register_values(indices: np.ndarray, reg: Iterable[int]) -> np.ndarray:
    out = np.zeros(len(indices), dtype=np.int64)
    for k, q in enumerate(reg):
        out |= ((indices >> np.uint64(q)) & np.uint64(1)).astype(np.int64) << k
    return out


def _register_bits(value: int, reg: Iterable[int]) -> int:
    return sum(((value >> k) & 1) << q for k, q in enumerate(reg))


def coord_to_index(coord: Coord, layout: RegisterLayout) -> int:
    return sum(_register_bits(c, reg) for c, reg in zip(coord, layout.positions))


def index_to_coord(index: int, layout: RegisterLayout) -> Coord:
    return tuple(_register_value(index, reg) for reg in layout.positions)


def setting_from_index(index: int, layout: RegisterLayout) -> ControlSetting:
    d = [_register_value(index, reg) for reg in layout.translations]
    swaps = tuple(q is not None and bool((index >> q) & 1) for q in layout.swap_controls)
    rots = tuple(q is not None and bool((index >> q) & 1) for q in layout.rot_controls)
    return ControlSetting(*d, swaps, rots)


def encode_state(grid: OccupancyGrid, layout: RegisterLayout) -> SparseState:
    """Amplitude of each occupied cell is its weight over the L2 norm of all weights."""
    from .simulator import SparseState

    if grid.spec.bits != layout.spec.bits:
        raise GridError(f"grid bits {grid.spec.bits} do not match layout {layout.spec.bits}")
    if not grid.cells:
        raise GridError("cannot encode an empty grid")
    weights = np.array(grid.weights())
    norm = math.sqrt(math.fsum(weights * weights))
    terms = {coord_to_index(c, layout): w / norm for c, w in grid.cells.items()}
    return SparseState.from_terms(layout.total_qubits, terms)


def split_branches(state: SparseState, layout: RegisterLayout) -> dict[int, dict[Coord, complex]]:
    """Group terms by ancilla bit pattern; values map cell coordinates to amplitudes."""
    pos_mask = sum(1 << q for reg in layout.positions for q in reg)
    keep = np.abs(state.amplitudes) >= ZERO_AMPLITUDE
    idx = state.indices[keep]
    amps = state.amplitudes[keep].tolist()
    ancs = (idx & np.uint64(~pos_mask & (2**64 - 1))).tolist()
    coords = zip(*(_register_values(idx, reg).tolist() for reg in layout.positions))
    branches: dict[int, dict[Coord, complex]] = {}
    for anc, coord, amp in zip(ancs, coords, amps):
        branches.setdefault(anc, {})[coord] = amp
    return branches


def branch_norms(branches: Mapping[int, Mapping[Coord, complex]]) -> dict[int, float]:
    return {k: math.fsum(abs(a) ** 2 for a in cells.values()) for k, cells in branches.items()}


def branch_to_grid(
    cells: Mapping[Coord, complex], spec: GridSpec, scale: float = 1.0, imag_tol: float = 1e-9
) -> OccupancyGrid:
    """Conditional amplitudes rescaled so the largest absolute weight equals ``scale``."""
    peak = max(abs(a) for a in cells.values())
    out = {}
    for coord, amp in cells.items():
        if abs(amp.imag) > imag_tol * peak:
            raise StructuralError(f"cell {coord} carries a complex amplitude {amp}")
        out[coord] = amp.real * scale / peak
    return OccupancyGrid(spec, out)


def decode_state(
    state: SparseState, layout: RegisterLayout, scale: float = 1.0
) -> dict[ControlSetting, OccupancyGrid]:
    """Decode every ancilla branch of ``state`` into a control setting and its pose grid.

    ``scale`` is the largest absolute weight of the encoded grid; decoded
    weights are rescaled to it.
    """
    if state.num_qubits != layout.total_qubits:
        raise GridError(f"state has {state.num_qubits} qubits, layout {layout.total_qubits}")
    branches = split_branches(state, layout)
    if not branches:
        raise StructuralError("state has no amplitude above the zero threshold")
    norms = branch_norms(branches)
    ref = next(iter(norms.values()))
    for anc, n in norms.items():
        if abs(n - ref) > NORM_CONSISTENCY:
            raise StructuralError(
                f"branch {setting_from_index(anc, layout).label()} has mass {n:.3e}, expected {ref:.3e}"
            )
    decoded = {
        setting_from_index(anc, layout): branch_to_grid(cells, layout.spec, scale)
        for anc, cells in branches.items()
    }
    return dict(sorted(decoded.items(), key=lambda kv: kv[0].sort_key()))


# ---------------------------------------------------------------- file format


def _data_lines(stream: TextIO) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(stream, 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def format_float(value: float) -> str:
    return repr(float(value))


def grid_header(spec: GridSpec) -> str:
    head = f"grid {spec.bits_z} {spec.bits_y} {spec.bits_x} {format_float(spec.cell_length)}"
    if any(spec.origin):
        head += " " + " ".join(format_float(v) for v in spec.origin)
    return head


def parse_grid_header(fields: list[str], lineno: int = 1) -> GridSpec:
    if not fields or fields[0] != "grid" or len(fields) not in (5, 8):
        raise GridError(f"line {lineno}: expected 'grid <bz> <by> <bx> <cell_length>'")
    try:
        bits = [int(v) for v in fields[1:4]]
        cell = float(fields[4])
        origin = tuple(float(v) for v in fields[5:8]) or (0.0, 0.0, 0.0)
    except ValueError as exc:
        raise GridError(f"line {lineno}: {exc}") from None
    return GridSpec(*bits, cell_length=cell, origin=origin)


def grid_lines(grid: OccupancyGrid) -> list[str]:
    lines = [grid_header(grid.spec)]
    lines += [f"{z} {y} {x} {format_float(w)}" for (z, y, x), w in grid.cells.items()]
    return lines


def parse_cell(fields: list[str], lineno: int) -> tuple[Coord, float]:
    if len(fields) != 4:
        raise GridError(f"line {lineno}: expected '<z> <y> <x> <weight>'")
    try:
        return (int(fields[0]), int(fields[1]), int(fields[2])), float(fields[3])
    except ValueError as exc:
        raise GridError(f"line {lineno}: {exc}") from None


def write_grid(grid: OccupancyGrid, stream: TextIO) -> None:
    stream.write("\n".join(grid_lines(grid)) + "\n")


def read_grid(stream: TextIO) -> OccupancyGrid:
    lines = _data_lines(stream)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise GridError("empty grid file") from None
    spec = parse_grid_header(head, lineno)
    cells = [parse_cell(fields, n) for n, fields in lines]
    return OccupancyGrid(spec, cells)


def dumps_grid(grid: OccupancyGrid) -> str:
    return "\n".join(grid_lines(grid)) + "\n"


def loads_grid(text: str) -> OccupancyGrid:
    import io

    return read_grid(io.StringIO(text))


__all__ = [
    "AXES",
    "SWAP_PAIRS",
    "ControlSetting",
    "GridError",
    "GridSpec",
    "OccupancyGrid",
    "RegisterLayout",
    "StageOptions",
    "StructuralError",
    "coord_to_index",
    "decode_state",
    "encode_state",
    "index_to_coord",
    "iter_control_settings",
    "read_grid",
    "setting_from_index",
    "split_branches",
    "write_grid",
]
