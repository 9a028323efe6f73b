"""Branch-by-branch comparison of the simulated pose superposition with the oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import build_unified
from .grid import (
    ControlSetting,
    OccupancyGrid,
    RegisterLayout,
    StageOptions,
    branch_norms,
    branch_to_grid,
    encode_state,
    setting_from_index,
    split_branches,
)
from .oracle import PoseSet, enumerate_poses
from .simulator import SparseState, run

WEIGHT_TOL = 1e-9
NORM_TOL = 1e-9


@dataclass
class VerificationReport:
    total_branches: int
    matched: int
    max_weight_deviation: float
    mismatches: list[tuple[ControlSetting, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.matched == self.total_branches
            and not self.mismatches
            and self.max_weight_deviation < WEIGHT_TOL
        )

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"verify {status} branches={self.total_branches} matched={self.matched} "
            f"maxdev={self.max_weight_deviation:.3e}"
        )

    def render(self) -> str:
        lines = [self.summary_line()]
        for setting, why in self.mismatches:
            lines.append(f"  mismatch {setting.label()}: {why}")
        return "\n".join(lines)


def compare(state: SparseState, layout: RegisterLayout, expected: PoseSet, scale: float) -> VerificationReport:
    """Compare every ancilla branch of ``state`` against ``expected``.

    Decoded weights are rescaled so the largest magnitude equals ``scale``.
    Total branches counts the union of both key sets.
    """
    branches = split_branches(state, layout)
    decoded: dict[ControlSetting, dict] = {setting_from_index(a, layout): c for a, c in branches.items()}
    norms = {setting_from_index(a, layout): n for a, n in branch_norms(branches).items()}
    mismatches: list[tuple[ControlSetting, str]] = []

    n_expected = len(expected)
    target_mass = 1.0 / n_expected if n_expected else 0.0
    keys = sorted(decoded.keys() | set(expected), key=ControlSetting.sort_key)
    matched = 0
    maxdev = 0.0
    for setting in keys:
        if setting not in expected:
            mismatches.append((setting, "branch present in simulation only"))
            continue
        if setting not in decoded:
            mismatches.append((setting, "branch missing from simulation"))
            continue
        if abs(norms[setting] - target_mass) > NORM_TOL:
            mismatches.append(
                (setting, f"branch mass {norms[setting]:.3e}, expected {target_mass:.3e}")
            )
            continue
        try:
            got = branch_to_grid(decoded[setting], layout.spec, scale)
        except ValueError as exc:
            mismatches.append((setting, str(exc)))
            continue
        want = expected[setting]
        if got.cells.keys() != want.cells.keys():
            extra = sorted(got.cells.keys() - want.cells.keys())
            missing = sorted(want.cells.keys() - got.cells.keys())
            mismatches.append((setting, f"cells differ: extra={extra[:4]} missing={missing[:4]}"))
            continue
        dev = max(abs(w - want.cells[c]) for c, w in got.cells.items())
        maxdev = max(maxdev, dev)
        if dev >= WEIGHT_TOL:
            mismatches.append((setting, f"weight deviation {dev:.3e}"))
            continue
        matched += 1
    return VerificationReport(len(keys), matched, maxdev, mismatches)


def simulate_poses(grid: OccupancyGrid, options: StageOptions) -> tuple[SparseState, RegisterLayout]:
    layout = RegisterLayout.build(grid.spec, options)
    circuit = build_unified(layout)
    return run(circuit, encode_state(grid, layout)), layout


def verify(grid: OccupancyGrid, options: StageOptions, expected: PoseSet | None = None) -> VerificationReport:
    """Quantum path (encode, unified circuit, simulate) against the classical oracle.

    ``expected`` replaces the oracle's pose set, which lets tests inject faults.
    """
    state, layout = simulate_poses(grid, options)
    if expected is None:
        expected = enumerate_poses(grid, options)
    scale = grid.max_abs_weight
    if not math.isfinite(scale) or scale <= 0:
        raise ValueError("grid has no nonzero weight")
    return compare(state, layout, expected, scale)
