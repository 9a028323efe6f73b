import subprocess
import sys

import pytest

from qligand.cli import main
from qligand.grid import GridSpec, OccupancyGrid, dumps_grid


@pytest.fixture
def grid_file(tmp_path):
    g = OccupancyGrid(GridSpec(2, 2, 2), {(0, 0, 1): 1.0, (0, 2, 0): 2.0, (3, 0, 0): -1.5})
    path = tmp_path / "g.txt"
    path.write_text(dumps_grid(g))
    return path


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_count_dof(capsys):
    code, out, _ = run_cli(capsys, "count", "--dof", "100,100,100,100,100,100")
    assert (code, out) == (0, "1000000000000\n")


def test_count_ancillas(capsys):
    code, out, _ = run_cli(capsys, "count", "--t-bits", "3,3,3", "--swaps", "--rots")
    assert (code, out) == (0, "32768\n")


def test_verify_full(capsys, grid_file):
    code, out, _ = run_cli(capsys, "verify", "--grid", grid_file, "--t-bits", "1,1,1", "--swaps", "--rots")
    assert code == 0
    assert out.startswith("verify PASS branches=512 matched=512 maxdev=")


def test_verify_subsets(capsys, grid_file):
    code, out, _ = run_cli(capsys, "verify", "--grid", grid_file, "--swaps", "xy", "--rots", "z,x")
    assert code == 0 and "branches=8 " in out


def test_stats_empty(capsys, tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("qubits 0\n")
    code, out, _ = run_cli(capsys, "stats", "--circuit", path)
    assert code == 0
    assert out.splitlines() == [
        "qubits 0", "gates 0", "h 0", "x 0", "cx 0", "mcx 0", "swap 0", "cswap 0", "max_mcx_controls 0"
    ]


def test_build_simulate_pipeline(capsys, tmp_path, grid_file):
    circ, state, poses, sim_poses, qasm = (tmp_path / n for n in ("c.txt", "s.txt", "p.txt", "sp.txt", "c.qasm"))
    flags = ["--t-bits", "1,0,1", "--swaps", "--rots", "y"]
    assert run_cli(capsys, "build", "--grid", grid_file, *flags, "--out", circ, "--qasm", qasm)[0] == 0
    assert qasm.read_text().startswith("OPENQASM 2.0;")
    code, out, _ = run_cli(capsys, "stats", "--circuit", circ)
    assert code == 0 and "qubits 12" in out and "h 6" in out
    assert run_cli(capsys, "simulate", "--grid", grid_file, "--circuit", circ, *flags,
                   "--out", state, "--poses", sim_poses)[0] == 0
    assert state.read_text().startswith("state 12\n")
    assert len(state.read_text().splitlines()) == 1 + 64 * 3
    code, out, _ = run_cli(capsys, "enumerate", "--grid", grid_file, *flags, "--out", poses)
    from qligand.grid import StageOptions, loads_grid
    from qligand.oracle import enumerate_poses

    ensemble = enumerate_poses(loads_grid(grid_file.read_text()),
                               StageOptions((1, 0, 1), (True,) * 3, (False, True, False)))
    distinct = len({p.to_dense().tobytes() for p in ensemble.poses.values()})
    assert code == 0 and out == f"poses=64 distinct={distinct} collisions={64 - distinct}\n"
    # the decoded simulation and the oracle write the same pose file
    assert sim_poses.read_text() == poses.read_text()


def test_simulate_dense_matches_sparse(capsys, tmp_path, grid_file):
    circ, a, b = tmp_path / "c.txt", tmp_path / "a.txt", tmp_path / "b.txt"
    run_cli(capsys, "build", "--grid", grid_file, "--t-bits", "1,1,0", "--out", circ)
    assert run_cli(capsys, "simulate", "--grid", grid_file, "--circuit", circ, "--out", a)[0] == 0
    assert run_cli(capsys, "simulate", "--grid", grid_file, "--circuit", circ, "--dense", "--out", b)[0] == 0
    sparse = [line.split() for line in a.read_text().splitlines()[1:]]
    dense = [line.split() for line in b.read_text().splitlines()[1:]]
    assert [r[0] for r in sparse] == [r[0] for r in dense]
    assert all(abs(float(x[1]) - float(y[1])) < 1e-12 for x, y in zip(sparse, dense))


def test_rasterize(capsys, tmp_path):
    atoms = tmp_path / "a.txt"
    atoms.write_text("C 0 0 0\nO 1.2 0 0 -0.5\n")
    code, out, _ = run_cli(capsys, "rasterize", "--atoms", atoms, "--bits", "1,1,1")
    assert code == 0 and out == "grid 1 1 1 1.0\n0 0 0 1.0\n0 0 1 -0.5\n"


def test_deterministic_output(capsys, tmp_path, grid_file):
    outs = []
    for i in range(2):
        path = tmp_path / f"p{i}.txt"
        run_cli(capsys, "enumerate", "--grid", grid_file, "--t-bits", "1,1,1", "--rots", "--out", path)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_verify_failure_exit_code(capsys, tmp_path, monkeypatch, grid_file):
    import qligand.cli as cli
    from qligand.verify import VerificationReport

    monkeypatch.setattr(cli, "verify", lambda g, o: VerificationReport(2, 1, 0.5, []))
    code, out, _ = run_cli(capsys, "verify", "--grid", grid_file)
    assert code == 2 and out.startswith("verify FAIL")


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--bogus"],
        ["frobnicate"],
        [],
        ["verify", "--grid", "/nonexistent/g.txt"],
        ["count", "--dof", "100,0"],
        ["build", "--grid", "{grid}", "--swaps", "xq"],
        ["build", "--grid", "{grid}", "--t-bits", "3,0,0"],
    ],
)
def test_validation_errors_exit_1(capsys, grid_file, argv):
    code, _, err = run_cli(capsys, *[a.format(grid=grid_file) for a in argv])
    assert code == 1 and err


def test_module_entry_point(grid_file):
    proc = subprocess.run([sys.executable, "-m", "qligand", "count", "--dof", "100,100,100,100,100,100"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1000000000000\n"
