"""Exact sparse simulation for the {H, X, CX, MCX, SWAP, CSWAP} gate set."""

from __future__ import annotations

import io
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import kernels
from .circuit import Circuit, Gate
from .grid import MAX_QUBITS

PRUNE = 1e-14
NORM_TOL = 1e-10
MAX_DENSE_QUBITS = 20


class SimulationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SparseState:
    """Basis indices (ascending, ``uint64``) paired with complex amplitudes."""

    num_qubits: int
    indices: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 0 <= self.num_qubits <= MAX_QUBITS:
            raise SimulationError(f"num_qubits={self.num_qubits} outside 0..{MAX_QUBITS}")
        idx = np.ascontiguousarray(self.indices, dtype=np.uint64)
        amp = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if idx.shape != amp.shape or idx.ndim != 1:
            raise SimulationError("indices and amplitudes must be equal-length vectors")
        if len(idx) and int(idx.max()) >> self.num_qubits:
            raise SimulationError(f"basis index beyond {self.num_qubits} qubits")
        if len(idx) > 1 and not np.all(idx[1:] > idx[:-1]):
            order = np.argsort(idx, kind="stable")
            idx, amp = idx[order], amp[order]
            if not np.all(idx[1:] > idx[:-1]):
                raise SimulationError("duplicate basis index")
        keep = np.abs(amp) >= PRUNE
        if not keep.all():
            idx, amp = idx[keep], amp[keep]
        norm = self._norm_sq(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise SimulationError(f"state norm^2 is {norm!r}, expected 1")
        idx.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "amplitudes", amp)

    @staticmethod
    def _norm_sq(amp) -> float:
        return float(np.sum(amp.real**2 + amp.imag**2))

    @classmethod
    def _from_kernel(cls, num_qubits: int, idx: np.ndarray, amp: np.ndarray) -> SparseState:
        # kernel output is already sorted, unique and pruned
        idx.flags.writeable = False
        amp.flags.writeable = False
        state = object.__new__(cls)
        object.__setattr__(state, "num_qubits", num_qubits)
        object.__setattr__(state, "indices", idx)
        object.__setattr__(state, "amplitudes", amp)
        return state

    @classmethod
    def from_terms(cls, num_qubits: int, terms: Mapping[int, complex]) -> SparseState:
        items = sorted(terms.items())
        idx = np.array([k for k, _ in items], dtype=np.uint64)
        amp = np.array([v for _, v in items], dtype=np.complex128)
        return cls(num_qubits, idx, amp)

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> SparseState:
        return cls.from_terms(num_qubits, {index: 1.0})

    @classmethod
    def normalized(cls, num_qubits: int, terms: Mapping[int, complex]) -> SparseState:
        norm = math.sqrt(math.fsum(abs(v) ** 2 for v in terms.values()))
        return cls.from_terms(num_qubits, {k: v / norm for k, v in terms.items()})

    @property
    def terms(self) -> dict[int, complex]:
        return dict(zip(self.indices.tolist(), self.amplitudes.tolist()))

    def __len__(self):
        return len(self.indices)

    def norm_sq(self) -> float:
        return self._norm_sq(self.amplitudes)

    def to_dense(self) -> np.ndarray:
        if self.num_qubits > MAX_DENSE_QUBITS:
            raise SimulationError(f"{self.num_qubits} qubits too wide for a dense vector")
        vec = np.zeros(1 << self.num_qubits, dtype=np.complex128)
        vec[self.indices.astype(np.intp)] = self.amplitudes
        return vec

    @classmethod
    def from_dense(cls, vec: np.ndarray) -> SparseState:
        n = int(len(vec)).bit_length() - 1
        (nz,) = np.nonzero(np.abs(vec) >= PRUNE)
        return cls(n, nz.astype(np.uint64), vec[nz])

    def max_deviation(self, other: SparseState) -> float:
        """Largest per-amplitude difference over the union of both supports."""
        a, b = self.terms, other.terms
        return max((abs(a.get(k, 0) - b.get(k, 0)) for k in a.keys() | b.keys()), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, SparseState):
            return NotImplemented
        return (
            self.num_qubits == other.num_qubits
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.amplitudes, other.amplitudes)
        )


def _pack(gates: Sequence[Gate]):
    n = len(gates)
    kinds = np.empty(n, dtype=np.int8)
    cmasks = np.empty(n, dtype=np.uint64)
    abits = np.empty(n, dtype=np.uint64)
    bbits = np.zeros(n, dtype=np.uint64)
    for i, g in enumerate(gates):
        cmasks[i] = sum(1 << c for c in g.controls)
        abits[i] = 1 << g.targets[0]
        if g.kind in ("SWAP", "CSWAP"):
            kinds[i] = 1
            bbits[i] = 1 << g.targets[1]
        else:
            kinds[i] = 0
    return kinds, cmasks, abits, bbits


def _check_width(gate: Gate, num_qubits: int):
    if max(gate.qubits) >= num_qubits:
        raise SimulationError(f"{gate} acts outside a {num_qubits}-qubit state")


def _permute(state: SparseState, gates: Sequence[Gate]) -> SparseState:
    idx = state.indices.copy()
    kernels.get_backend().permute(idx, *_pack(gates))
    order = np.argsort(idx, kind="stable")
    return SparseState._from_kernel(state.num_qubits, idx[order], state.amplitudes[order])


def _hadamard(state: SparseState, qubit: int) -> SparseState:
    idx, amp = kernels.get_backend().hadamard(state.indices, state.amplitudes, qubit, PRUNE)
    return SparseState._from_kernel(state.num_qubits, idx, amp)


def apply_gate(state: SparseState, gate: Gate) -> SparseState:
    _check_width(gate, state.num_qubits)
    if gate.kind == "H":
        return _hadamard(state, gate.targets[0])
    return _permute(state, [gate])


def run(circuit: Circuit, initial: SparseState) -> SparseState:
    """Apply the gates left to right; consecutive permutation gates go through one kernel call."""
    if circuit.num_qubits != initial.num_qubits:
        raise SimulationError(
            f"circuit width {circuit.num_qubits} != state width {initial.num_qubits}"
        )
    state = initial
    pending: list[Gate] = []
    for gate in circuit.gates:
        if gate.kind == "H":
            if pending:
                state = _permute(state, pending)
                pending = []
            state = _hadamard(state, gate.targets[0])
        else:
            pending.append(gate)
    if pending:
        state = _permute(state, pending)
    return state


# ---------------------------------------------------------------- dense cross-check


def _dense_apply(vec: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    # axis j of the reshaped tensor is qubit n-1-j
    psi = vec.reshape((2,) * n) if n else vec

    def ax(q):
        return n - 1 - q

    if gate.kind == "H":
        t = ax(gate.targets[0])
        a0 = np.take(psi, 0, axis=t)
        a1 = np.take(psi, 1, axis=t)
        out = np.stack([(a0 + a1) / np.sqrt(2), (a0 - a1) / np.sqrt(2)], axis=t)
        return out.reshape(-1)

    out = psi.copy()
    sel = [slice(None)] * n
    for c in gate.controls:
        sel[ax(c)] = 1
    if gate.kind in ("X", "CX", "MCX"):
        t = ax(gate.targets[0])
        s0, s1 = list(sel), list(sel)
        s0[t], s1[t] = 0, 1
        out[tuple(s0)], out[tuple(s1)] = psi[tuple(s1)], psi[tuple(s0)]
    else:
        a, b = (ax(q) for q in gate.targets)
        s01, s10 = list(sel), list(sel)
        s01[a], s01[b] = 0, 1
        s10[a], s10[b] = 1, 0
        out[tuple(s01)], out[tuple(s10)] = psi[tuple(s10)], psi[tuple(s01)]
    return out.reshape(-1)


def dense_check(circuit: Circuit, initial: SparseState) -> SparseState:
    """Same result as :func:`run`, computed on a full state vector."""
    n = initial.num_qubits
    if n > MAX_DENSE_QUBITS:
        raise SimulationError(f"dense simulation limited to {MAX_DENSE_QUBITS} qubits, got {n}")
    if circuit.num_qubits != n:
        raise SimulationError(f"circuit width {circuit.num_qubits} != state width {n}")
    vec = initial.to_dense()
    for gate in circuit.gates:
        _check_width(gate, n)
        vec = _dense_apply(vec, gate, n)
    return SparseState.from_dense(vec)


# ---------------------------------------------------------------- state dump


def write_state(state: SparseState, stream: TextIO) -> None:
    stream.write(f"state {state.num_qubits}\n")
    for k, a in zip(state.indices.tolist(), state.amplitudes.tolist()):
        stream.write(f"{k} {a.real:.17g} {a.imag:.17g}\n")


def dumps_state(state: SparseState) -> str:
    buf = io.StringIO()
    write_state(state, buf)
    return buf.getvalue()


def read_state(stream: TextIO) -> SparseState:
    num_qubits = None
    terms: dict[int, complex] = {}
    for lineno, line in enumerate(stream, 1):
        fields = line.split("#", 1)[0].split()
        if not fields:
            continue
        try:
            if num_qubits is None:
                if fields[0] != "state" or len(fields) != 2:
                    raise SimulationError(f"line {lineno}: expected 'state <num_qubits>'")
                num_qubits = int(fields[1])
                continue
            if len(fields) != 3:
                raise SimulationError(f"line {lineno}: expected '<index> <re> <im>'")
            k = int(fields[0])
            if k in terms:
                raise SimulationError(f"line {lineno}: duplicate index {k}")
            terms[k] = complex(float(fields[1]), float(fields[2]))
        except ValueError as exc:
            if isinstance(exc, SimulationError):
                raise
            raise SimulationError(f"line {lineno}: {exc}") from None
    if num_qubits is None:
        raise SimulationError("missing 'state <num_qubits>' header")
    return SparseState.from_terms(num_qubits, terms)


def loads_state(text: str) -> SparseState:
    return read_state(io.StringIO(text))


def random_circuit(num_qubits: int, num_gates: int, rng: np.random.Generator) -> Circuit:
    """Uniform random circuit over the supported gate set (needs at least 3 qubits for CSWAP)."""
    kinds = [k for k, need in (("H", 1), ("X", 1), ("CX", 2), ("MCX", 3), ("SWAP", 2), ("CSWAP", 3))
             if need <= num_qubits]
    gates = []
    for _ in range(num_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "MCX":
            k = int(rng.integers(3, min(num_qubits, 6) + 1))
            qs = rng.choice(num_qubits, size=k, replace=False).tolist()
            gates.append(Gate(kind, qs[:-1], qs[-1:]))
            continue
        need = {"H": 1, "X": 1, "CX": 2, "SWAP": 2, "CSWAP": 3}[kind]
        qs = rng.choice(num_qubits, size=need, replace=False).tolist()
        nctrl = {"CX": 1, "CSWAP": 1}.get(kind, 0)
        gates.append(Gate(kind, qs[:nctrl], qs[nctrl:]))
    return Circuit(num_qubits, gates)


def random_state(num_qubits: int, num_terms: int, rng: np.random.Generator) -> SparseState:
    size = min(num_terms, 1 << num_qubits)
    idx = rng.choice(1 << num_qubits, size=size, replace=False)
    amp = rng.normal(size=size) + 1j * rng.normal(size=size)
    return SparseState.normalized(num_qubits, dict(zip(idx.tolist(), amp.tolist())))


__all__ = [
    "SparseState",
    "SimulationError",
    "apply_gate",
    "dense_check",
    "random_circuit",
    "random_state",
    "read_state",
    "run",
    "write_state",
]
