"""Quantum circuits that place a grid-encoded ligand in every translated,
swapped and rotated pose at once, with an exact sparse simulator and a
classical enumerator to check them against each other."""

from .circuit import (
    Circuit,
    CircuitError,
    Gate,
    build_coord_swap,
    build_increment,
    build_rotation,
    build_translation_stage,
    build_unified,
    resource_counts,
)
from .grid import (
    ControlSetting,
    GridError,
    GridSpec,
    OccupancyGrid,
    RegisterLayout,
    StageOptions,
    StructuralError,
    decode_state,
    encode_state,
)
from .oracle import (
    PoseSet,
    count_configurations,
    enumerate_poses,
    rotate90,
    swap_axes,
    translate_grid,
)
from .raster import AtomRecord, rasterize
from .simulator import SimulationError, SparseState, apply_gate, dense_check, run
from .verify import VerificationReport, verify

__version__ = "0.1.0"
