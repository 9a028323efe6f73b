"""Atom lists to occupancy/charge grids."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import TextIO

from .grid import GridError, GridSpec, OccupancyGrid


@dataclass(frozen=True)
class AtomRecord:
    element: str
    position: tuple[float, float, float]
    weight: float = 1.0

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        if len(pos) != 3 or not all(math.isfinite(v) for v in pos):
            raise GridError(f"atom {self.element} has invalid position {self.position!r}")
        object.__setattr__(self, "position", pos)


def _nearest_cell(offset: float, cell_length: float) -> int:
    # cell 0 is centred on the aligned bounding-box minimum; ties go to the lower cell
    return math.ceil(offset / cell_length - 0.5)


def rasterize(atoms: list[AtomRecord], spec: GridSpec) -> OccupancyGrid:
    """Deposit each atom's weight into its nearest cell after aligning the bounding box.

    The bounding-box minimum is moved to the centre of cell (0, 0, 0), that
    is ``origin + cell_length / 2``; weights landing in one cell add up.
    """
    if not atoms:
        raise GridError("no atoms to rasterize")
    lo = [min(a.position[k] for a in atoms) for k in range(3)]
    nx, ny, nz = spec.shape[2], spec.shape[1], spec.shape[0]
    cells: dict[tuple[int, int, int], float] = defaultdict(float)
    for atom in atoms:
        ix, iy, iz = (_nearest_cell(atom.position[k] - lo[k], spec.cell_length) for k in range(3))
        if not (ix < nx and iy < ny and iz < nz):
            raise GridError(
                f"atom {atom.element} at {atom.position} lands in cell (z={iz}, y={iy}, x={ix}), "
                f"outside grid of shape {spec.shape}"
            )
        cells[(iz, iy, ix)] += atom.weight
    return OccupancyGrid(spec, cells)


def read_atoms(stream: TextIO) -> list[AtomRecord]:
    """``element x y z [weight]`` per line; ``#`` starts a comment."""
    atoms = []
    for lineno, line in enumerate(stream, 1):
        fields = line.split("#", 1)[0].split()
        if not fields:
            continue
        if len(fields) not in (4, 5):
            raise GridError(f"line {lineno}: expected 'element x y z [weight]'")
        try:
            xyz = tuple(float(v) for v in fields[1:4])
            weight = float(fields[4]) if len(fields) == 5 else 1.0
        except ValueError as exc:
            raise GridError(f"line {lineno}: {exc}") from None
        atoms.append(AtomRecord(fields[0], xyz, weight))
    return atoms
