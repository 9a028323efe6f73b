"""Brute-force classical enumeration of every transformed ligand grid."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import TextIO

from .grid import (
    AXES,
    SWAP_PAIRS,
    ControlSetting,
    GridError,
    GridSpec,
    OccupancyGrid,
    StageOptions,
    grid_lines,
    iter_control_settings,
    parse_cell,
    parse_grid_header,
)

_AXIS = {"z": 0, "y": 1, "x": 2}


def translate_grid(grid: OccupancyGrid, dz: int = 0, dy: int = 0, dx: int = 0) -> OccupancyGrid:
    """Shift every cell by (dz, dy, dx) with periodic wraparound."""
    if min(dz, dy, dx) < 0:
        raise GridError("translation distances must be nonnegative")
    sz, sy, sx = grid.spec.shape
    return OccupancyGrid(
        grid.spec,
        {((z + dz) % sz, (y + dy) % sy, (x + dx) % sx): w for (z, y, x), w in grid.cells.items()},
    )


def swap_axes(grid: OccupancyGrid, pair: str) -> OccupancyGrid:
    """Exchange the two named coordinates, e.g. ``pair="xy"``."""
    if pair not in SWAP_PAIRS:
        raise GridError(f"unknown axis pair {pair!r}")
    i, j = _AXIS[pair[0]], _AXIS[pair[1]]
    if grid.spec.bits[i] != grid.spec.bits[j]:
        raise GridError(f"cannot swap {pair[0]} and {pair[1]}: unequal widths")
    out = {}
    for coord, w in grid.cells.items():
        c = list(coord)
        c[i], c[j] = c[j], c[i]
        out[tuple(c)] = w
    return OccupancyGrid(grid.spec, out)


def rotate90(grid: OccupancyGrid, axis: str) -> OccupancyGrid:
    """Counterclockwise quarter turn seen from the positive ``axis``.

    z: (x, y) -> (L-1-y, x);  y: (z, x) -> (L-1-x, z);  x: (y, z) -> (L-1-z, y)
    """
    if axis not in _AXIS:
        raise GridError(f"unknown axis {axis!r}")
    bz, by, bx = grid.spec.bits
    out = {}
    if axis == "z":
        if bx != by:
            raise GridError("rotation about z needs equal x/y widths")
        last = (1 << bx) - 1
        for (z, y, x), w in grid.cells.items():
            out[(z, x, last - y)] = w
    elif axis == "y":
        if bz != bx:
            raise GridError("rotation about y needs equal z/x widths")
        last = (1 << bz) - 1
        for (z, y, x), w in grid.cells.items():
            out[(last - x, y, z)] = w
    else:
        if by != bz:
            raise GridError("rotation about x needs equal y/z widths")
        last = (1 << by) - 1
        for (z, y, x), w in grid.cells.items():
            out[(y, last - z, x)] = w
    return OccupancyGrid(grid.spec, out)


def apply_setting(grid: OccupancyGrid, setting: ControlSetting) -> OccupancyGrid:
    """Swaps (x,y), (y,z), (z,x); then rotations z, y, x; then the translation."""
    for pair, on in zip(SWAP_PAIRS, setting.swaps):
        if on:
            grid = swap_axes(grid, pair)
    for axis, on in zip(AXES, setting.rots):
        if on:
            grid = rotate90(grid, axis)
    return translate_grid(grid, *setting.shifts)


@dataclass(frozen=True)
class PoseSet:
    source: GridSpec
    poses: dict[ControlSetting, OccupancyGrid]

    def __len__(self):
        return len(self.poses)

    def __iter__(self) -> Iterator[ControlSetting]:
        return iter(self.poses)

    def __getitem__(self, setting: ControlSetting) -> OccupancyGrid:
        return self.poses[setting]

    def __contains__(self, setting) -> bool:
        return setting in self.poses

    def items(self):
        return self.poses.items()

    def distinct_count(self) -> int:
        return len(set(self.poses.values()))

    def collisions(self) -> int:
        """Control settings whose pose repeats one reached by another setting."""
        return len(self.poses) - self.distinct_count()


def enumerate_poses(grid: OccupancyGrid, options: StageOptions) -> PoseSet:
    _check_planes(grid.spec, options)
    for axis, m, bits in zip(AXES, options.t_bits, grid.spec.bits):
        if m > bits:
            raise GridError(f"translation register for {axis} ({m}) wider than position ({bits})")
    poses = {s: apply_setting(grid, s) for s in iter_control_settings(options)}
    return PoseSet(grid.spec, poses)


def _check_planes(spec: GridSpec, options: StageOptions):
    bz, by, bx = spec.bits
    planes = {"xy": bx == by, "yz": by == bz, "zx": bz == bx}
    for pair, on in zip(SWAP_PAIRS, options.swaps):
        if on and not planes[pair]:
            raise GridError(f"swap {pair} needs equal register widths")
    for plane, on in zip(("xy", "zx", "yz"), options.rots):
        if on and not planes[plane]:
            raise GridError(f"rotation in the {plane} plane needs equal register widths")


def count_configurations(resolutions: Iterable[int]) -> int:
    counts = [int(r) for r in resolutions]
    if not counts or any(c <= 0 for c in counts):
        raise ValueError(f"per-degree-of-freedom counts must be positive, got {counts}")
    return math.prod(counts)


def ancilla_resolutions(options: StageOptions) -> list[int]:
    """Per-ancilla-register value counts: 2**m per translation register, 2 per control qubit."""
    counts = [1 << m for m in options.t_bits if m]
    slots = options.control_slots if options.shared_controls else options.swaps + options.rots
    counts += [2 for on in slots if on]
    return counts or [1]


# ---------------------------------------------------------------- dump format


def pose_header(setting: ControlSetting) -> str:
    return f"pose {setting.label()}"


def write_poses(poses: PoseSet, stream: TextIO) -> None:
    for setting, grid in poses.items():
        stream.write(pose_header(setting) + "\n")
        stream.write("\n".join(grid_lines(grid)) + "\n")


def _parse_pose_header(fields: list[str], lineno: int) -> ControlSetting:
    try:
        kv = dict(f.split("=", 1) for f in fields[1:])
        flags = [tuple(ch == "1" for ch in kv[k]) for k in ("s", "r")]
        if any(len(f) != 3 for f in flags):
            raise ValueError("s and r need three bits")
        return ControlSetting(int(kv["dz"]), int(kv["dy"]), int(kv["dx"]), *flags)
    except (KeyError, ValueError) as exc:
        raise GridError(f"line {lineno}: malformed pose header ({exc})") from None


def read_poses(stream: TextIO) -> PoseSet:
    poses: dict[ControlSetting, OccupancyGrid] = {}
    source = None
    setting = spec = None
    cells: list = []

    def flush():
        if setting is not None:
            if spec is None:
                raise GridError(f"pose {setting.label()} has no grid header")
            poses[setting] = OccupancyGrid(spec, cells)

    for lineno, line in enumerate(stream, 1):
        fields = line.split("#", 1)[0].split()
        if not fields:
            continue
        if fields[0] == "pose":
            flush()
            setting, spec, cells = _parse_pose_header(fields, lineno), None, []
            if setting in poses:
                raise GridError(f"line {lineno}: duplicate pose {setting.label()}")
        elif fields[0] == "grid":
            if setting is None or spec is not None:
                raise GridError(f"line {lineno}: grid header outside a pose block")
            spec = parse_grid_header(fields, lineno)
            source = source or spec
        else:
            if spec is None:
                raise GridError(f"line {lineno}: cell line before grid header")
            cells.append(parse_cell(fields, lineno))
    flush()
    if source is None:
        raise GridError("pose file contains no poses")
    return PoseSet(source, poses)
