import io
import math

import pytest
from hypothesis import given, settings

from qligand.circuit import build_translation_stage, Circuit
from qligand.grid import (
    ControlSetting,
    GridError,
    GridSpec,
    OccupancyGrid,
    RegisterLayout,
    StageOptions,
    StructuralError,
    coord_to_index,
    decode_state,
    encode_state,
    index_to_coord,
    iter_control_settings,
    loads_grid,
    dumps_grid,
)
from qligand.simulator import SparseState, run

from conftest import grids

SPEC4 = GridSpec(2, 2, 2)


def test_gridspec_rejects_bad_sizes():
    with pytest.raises(GridError):
        GridSpec(17, 1, 1)
    with pytest.raises(GridError):
        GridSpec(1, 1, 1, cell_length=0.0)
    assert GridSpec(2, 3, 4).shape == (4, 8, 16)


def test_grid_rejects_out_of_range_and_duplicates():
    with pytest.raises(GridError):
        OccupancyGrid(SPEC4, {(4, 0, 0): 1.0})
    with pytest.raises(GridError):
        OccupancyGrid(SPEC4, [((0, 0, 0), 1.0), ((0, 0, 0), 2.0)])


def test_zero_weights_are_dropped():
    g = OccupancyGrid(SPEC4, {(0, 0, 0): 0.0, (1, 1, 1): 2.0})
    assert len(g) == 1


def test_basis_index_convention():
    # z occupies the lowest bits, then y, then x
    spec = GridSpec(2, 3, 1)
    layout = RegisterLayout.build(spec)
    assert coord_to_index((1, 0, 0), layout) == 1
    assert coord_to_index((0, 1, 0), layout) == 4
    assert coord_to_index((0, 0, 1), layout) == 32
    assert index_to_coord(0b1_101_10, layout) == (2, 5, 1)


def test_layout_register_order():
    layout = RegisterLayout.build(
        GridSpec(2, 2, 2), StageOptions((1, 2, 1), (True, False, True), (False, True, False))
    )
    assert layout.pos_z == (0, 1) and layout.pos_x == (4, 5)
    assert layout.t_z == (6,) and layout.t_y == (7, 8) and layout.t_x == (9,)
    assert layout.swap_controls == (10, None, 11)
    assert layout.rot_controls == (None, 12, None)
    assert layout.total_qubits == 13


def test_layout_translation_wider_than_position_rejected():
    with pytest.raises(GridError):
        RegisterLayout.build(GridSpec(1, 1, 1), StageOptions((2, 0, 0)))


def test_layout_qubit_cap():
    with pytest.raises(GridError):
        RegisterLayout.build(GridSpec(16, 16, 16), StageOptions((1, 0, 0)))


def test_shared_layout_reuses_slot_qubit():
    layout = RegisterLayout.build(
        SPEC4, StageOptions((0, 0, 0), (True, True, False), (True, False, False), True)
    )
    assert layout.swap_controls == (6, 7, None)
    assert layout.rot_controls == (6, None, None)
    assert layout.ancillas == [6, 7]


def test_encode_single_cell():
    layout = RegisterLayout.build(SPEC4)
    state = encode_state(OccupancyGrid(SPEC4, {(0, 0, 0): 1.0}), layout)
    assert state.terms == {0: 1.0}


def test_encode_two_equal_cells():
    layout = RegisterLayout.build(SPEC4)
    state = encode_state(OccupancyGrid(SPEC4, {(0, 0, 0): 1.0, (0, 0, 1): 1.0}), layout)
    assert list(state.terms) == [0, 16]
    assert all(a == pytest.approx(1 / math.sqrt(2), abs=1e-15) for a in state.terms.values())


def test_encode_signed_weights():
    # |(1, 2, -2, 4)| = 5
    cells = {(0, 0, 0): 1.0, (1, 0, 0): 2.0, (2, 0, 0): -2.0, (3, 0, 0): 4.0}
    state = encode_state(OccupancyGrid(SPEC4, cells), RegisterLayout.build(SPEC4))
    amps = [state.terms[i].real for i in range(4)]
    assert amps == pytest.approx([0.2, 0.4, -0.4, 0.8], abs=1e-15)
    assert math.fsum(a * a for a in amps) == pytest.approx(1.0, abs=1e-15)


def test_encode_rejects_empty_and_mismatched():
    layout = RegisterLayout.build(SPEC4)
    with pytest.raises(GridError):
        encode_state(OccupancyGrid(SPEC4, {}), layout)
    with pytest.raises(GridError):
        encode_state(OccupancyGrid(GridSpec(1, 1, 1), {(0, 0, 0): 1}), layout)


def test_encode_leaves_ancillas_zero():
    layout = RegisterLayout.build(SPEC4, StageOptions((1, 1, 1), (True,) * 3, (True,) * 3))
    g = OccupancyGrid(SPEC4, {(3, 3, 3): 1.0, (1, 2, 0): -1.0})
    state = encode_state(g, layout)
    assert state.num_qubits == 15
    assert all(i < 64 for i in state.terms)


def test_identity_decode():
    g = OccupancyGrid(SPEC4, {(0, 1, 2): 3.0, (3, 0, 1): -1.5})
    layout = RegisterLayout.build(SPEC4)
    decoded = decode_state(encode_state(g, layout), layout, scale=g.max_abs_weight)
    assert list(decoded) == [ControlSetting()]
    assert decoded[ControlSetting()].allclose(g, atol=1e-12)


def test_decode_one_qubit_translation():
    layout = RegisterLayout.build(SPEC4, StageOptions((0, 0, 1)))
    g = OccupancyGrid(SPEC4, {(1, 2, 3): 1.0})
    circuit = Circuit(layout.total_qubits, build_translation_stage(layout, "x"))
    decoded = decode_state(run(circuit, encode_state(g, layout)), layout)
    assert decoded == {
        ControlSetting(dx=0): OccupancyGrid(SPEC4, {(1, 2, 3): 1.0}),
        ControlSetting(dx=1): OccupancyGrid(SPEC4, {(1, 2, 0): 1.0}),
    }


def test_decode_rejects_uneven_branches():
    layout = RegisterLayout.build(GridSpec(1, 0, 0), StageOptions((1, 0, 0)))
    # ancilla t_z is qubit 1; branch masses 0.8 / 0.2
    state = SparseState.from_terms(2, {0: math.sqrt(0.8), 2: math.sqrt(0.2)})
    with pytest.raises(StructuralError):
        decode_state(state, layout)


def test_control_setting_count():
    opts = StageOptions((1, 2, 0), (True, False, True), (True, True, True))
    assert len(list(iter_control_settings(opts))) == 2 ** opts.num_ancillas == 2**8


@settings(max_examples=60, deadline=None)
@given(grids(max_bits=3, max_cells=32))
def test_round_trip(grid):
    layout = RegisterLayout.build(grid.spec)
    state = encode_state(grid, layout)
    assert abs(state.norm_sq() - 1.0) < 1e-12
    decoded = decode_state(state, layout, scale=grid.max_abs_weight)
    assert list(decoded) == [ControlSetting()]
    assert decoded[ControlSetting()].allclose(grid, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(grids(max_bits=4, max_cells=20))
def test_grid_file_round_trip(grid):
    assert loads_grid(dumps_grid(grid)) == grid


def test_grid_file_format():
    text = "# ligand\ngrid 2 2 2 0.375\n0 1 2 1.5\n3 3 3 -2  # charge\n"
    g = loads_grid(text)
    assert g.spec.cell_length == 0.375
    assert dict(g.cells) == {(0, 1, 2): 1.5, (3, 3, 3): -2.0}
    assert dumps_grid(g) == "grid 2 2 2 0.375\n0 1 2 1.5\n3 3 3 -2.0\n"


@pytest.mark.parametrize("text", ["", "grid 2 2\n", "grid 2 2 2 1\n0 0 1\n", "grid 1 1 1 1\n2 0 0 1\n"])
def test_grid_file_errors(text):
    with pytest.raises(GridError):
        loads_grid(text)


def test_grid_file_origin_round_trip():
    g = OccupancyGrid(GridSpec(1, 1, 1, 0.5, (1.0, -2.0, 0.25)), {(0, 0, 0): 1})
    assert loads_grid(dumps_grid(g)).spec == g.spec
    assert io.StringIO(dumps_grid(g)).readline().split()[5:] == ["1.0", "-2.0", "0.25"]
