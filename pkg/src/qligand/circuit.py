"""Gate-level construction of shift, swap and rotation circuits."""

from __future__ import annotations

import io
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import TextIO

from .grid import AXES, RegisterLayout

GATE_KINDS = ("H", "X", "CX", "MCX", "SWAP", "CSWAP")
X_FAMILY = ("X", "CX", "MCX")

# in-plane register pair swapped by each rotation, and the register complemented after it
ROTATION_PLANES = {
    "z": ("x", "y", "x"),  # (x, y) -> (L-1-y, x)
    "y": ("z", "x", "z"),  # (z, x) -> (L-1-x, z)
    "x": ("y", "z", "y"),  # (y, z) -> (L-1-z, y)
}
SWAP_PAIR_AXES = (("x", "y"), ("y", "z"), ("z", "x"))


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    controls: tuple[int, ...] = ()
    targets: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        nc, nt = len(self.controls), len(self.targets)
        expected = {
            "H": (0, 1),
            "X": (0, 1),
            "CX": (1, 1),
            "SWAP": (0, 2),
            "CSWAP": (1, 2),
        }
        if self.kind == "MCX":
            ok = nc >= 2 and nt == 1
        elif self.kind in expected:
            ok = (nc, nt) == expected[self.kind]
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if not ok:
            raise CircuitError(f"{self.kind} cannot take {nc} controls and {nt} targets")
        qubits = self.controls + self.targets
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"{self.kind} gate repeats a qubit: {qubits}")
        if min(qubits) < 0:
            raise CircuitError(f"negative qubit index in {qubits}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def is_permutation(self) -> bool:
        return self.kind != "H"


def h(q: int) -> Gate:
    return Gate("H", (), (q,))


def controlled_x(controls: Sequence[int], target: int) -> Gate:
    """X, CX or MCX depending on how many controls there are."""
    kind = ("X", "CX")[len(controls)] if len(controls) < 2 else "MCX"
    return Gate(kind, tuple(controls), (target,))


def swap(a: int, b: int, control: int | None = None) -> Gate:
    if control is None:
        return Gate("SWAP", (), (a, b))
    return Gate("CSWAP", (control,), (a, b))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 0:
            raise CircuitError("negative circuit width")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise CircuitError(f"{g} touches a qubit outside width {self.num_qubits}")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        return Circuit(max(self.num_qubits, other.num_qubits), self.gates + other.gates)

    def repeat(self, times: int) -> Circuit:
        return Circuit(self.num_qubits, self.gates * times)


def build_increment(pos: Sequence[int], p: int, extra_controls: Sequence[int] = ()) -> list[Gate]:
    """Add ``2**p`` modulo ``2**len(pos)`` to the register ``pos``.

    Carry cascade from the top bit down: bit ``k`` flips when bits
    ``p..k-1`` are all set.  Every gate also waits on ``extra_controls``.
    """
    width = len(pos)
    if not 0 <= p < width:
        raise CircuitError(f"shift exponent p={p} needs 0 <= p < width={width}")
    extra = list(extra_controls)
    return [controlled_x(list(pos[p:k]) + extra, pos[k]) for k in range(width - 1, p - 1, -1)]


def build_translation_stage(layout: RegisterLayout, axis: str) -> list[Gate]:
    pos = layout.position(axis)
    t = layout.translation(axis)
    gates = [h(q) for q in t]
    for q, ctrl in enumerate(t):
        gates += build_increment(pos, q, [ctrl])
    return gates


def build_coord_swap(
    reg_a: Sequence[int], reg_b: Sequence[int], control: int | None = None
) -> list[Gate]:
    if len(reg_a) != len(reg_b):
        raise CircuitError(f"cannot swap registers of widths {len(reg_a)} and {len(reg_b)}")
    return [swap(a, b, control) for a, b in zip(reg_a, reg_b)]


def build_rotation(layout: RegisterLayout, axis: str, control: int | None = None) -> list[Gate]:
    """90 degree counterclockwise rotation about ``axis`` (viewed from the positive axis)."""
    if axis not in ROTATION_PLANES:
        raise CircuitError(f"unknown axis {axis!r}")
    first, second, flipped = ROTATION_PLANES[axis]
    reg_a, reg_b = layout.position(first), layout.position(second)
    if len(reg_a) != len(reg_b):
        raise CircuitError(
            f"rotation about {axis} needs equal {first}/{second} widths, got {len(reg_a)}/{len(reg_b)}"
        )
    gates = build_coord_swap(reg_a, reg_b, control)
    ctrl = [] if control is None else [control]
    gates += [controlled_x(ctrl, q) for q in layout.position(flipped)]
    return gates


def build_unified(layout: RegisterLayout) -> Circuit:
    """Swaps, then rotations, then translations, each stage behind Hadamard-prepared controls.

    Which stages exist is read off the layout: a control slot without a
    qubit is disabled.
    """
    check_layout_supports(layout)
    gates: list[Gate] = []
    prepared: set[int] = set()

    def prepare(qubits: Iterable[int | None]):
        for q in qubits:
            if q is not None and q not in prepared:
                prepared.add(q)
                gates.append(h(q))

    prepare(layout.swap_controls)
    for (a, b), ctrl in zip(SWAP_PAIR_AXES, layout.swap_controls):
        if ctrl is not None:
            gates.extend(build_coord_swap(layout.position(a), layout.position(b), ctrl))

    prepare(layout.rot_controls)
    for axis, ctrl in zip(AXES, layout.rot_controls):
        if ctrl is not None:
            gates.extend(build_rotation(layout, axis, ctrl))

    for axis in AXES:
        gates.extend(build_translation_stage(layout, axis))
    return Circuit(layout.total_qubits, gates)


def check_layout_supports(layout: RegisterLayout) -> None:
    """Reject swap/rotation controls on planes whose registers differ in width."""
    bits = dict(zip(AXES, layout.spec.bits))
    for (a, b), ctrl in zip(SWAP_PAIR_AXES, layout.swap_controls):
        if ctrl is not None and bits[a] != bits[b]:
            raise CircuitError(f"swap ({a},{b}) needs equal widths, got {bits[a]}/{bits[b]}")
    for axis, ctrl in zip(AXES, layout.rot_controls):
        first, second, _ = ROTATION_PLANES[axis]
        if ctrl is not None and bits[first] != bits[second]:
            raise CircuitError(
                f"rotation about {axis} needs equal {first}/{second} widths, "
                f"got {bits[first]}/{bits[second]}"
            )


@dataclass(frozen=True)
class ResourceCounts:
    qubits: int
    total_gates: int
    by_kind: dict[str, int]
    max_mcx_controls: int

    def lines(self) -> list[str]:
        out = [f"qubits {self.qubits}", f"gates {self.total_gates}"]
        out += [f"{k.lower()} {self.by_kind[k]}" for k in GATE_KINDS]
        out.append(f"max_mcx_controls {self.max_mcx_controls}")
        return out


def resource_counts(circuit: Circuit) -> ResourceCounts:
    kinds = Counter(g.kind for g in circuit.gates)
    max_mcx = max((len(g.controls) for g in circuit.gates if g.kind == "MCX"), default=0)
    return ResourceCounts(
        circuit.num_qubits,
        len(circuit.gates),
        {k: kinds.get(k, 0) for k in GATE_KINDS},
        max_mcx,
    )


# ---------------------------------------------------------------- file formats


def gate_line(g: Gate) -> str:
    return " ".join([g.kind.lower(), *map(str, g.controls + g.targets)])


def write_circuit(circuit: Circuit, stream: TextIO) -> None:
    stream.write(f"qubits {circuit.num_qubits}\n")
    for g in circuit.gates:
        stream.write(gate_line(g) + "\n")


def dumps_circuit(circuit: Circuit) -> str:
    buf = io.StringIO()
    write_circuit(circuit, buf)
    return buf.getvalue()


def _parse_gate(fields: list[str], lineno: int) -> Gate:
    name, args = fields[0].upper(), fields[1:]
    try:
        qs = [int(a) for a in args]
    except ValueError as exc:
        raise CircuitError(f"line {lineno}: {exc}") from None
    try:
        if name in ("H", "X"):
            if len(qs) != 1:
                raise CircuitError(f"{name.lower()} takes one qubit")
            return Gate(name, (), qs)
        if name == "CX":
            if len(qs) != 2:
                raise CircuitError("cx takes a control and a target")
            return Gate(name, qs[:1], qs[1:])
        if name == "MCX":
            return Gate(name, qs[:-1], qs[-1:])
        if name == "SWAP":
            return Gate(name, (), qs)
        if name == "CSWAP":
            return Gate(name, qs[:1], qs[1:])
    except CircuitError as exc:
        raise CircuitError(f"line {lineno}: {exc}") from None
    raise CircuitError(f"line {lineno}: unknown gate {fields[0]!r}")


def read_circuit(stream: TextIO) -> Circuit:
    num_qubits = None
    gates = []
    for lineno, line in enumerate(stream, 1):
        fields = line.split("#", 1)[0].split()
        if not fields:
            continue
        if num_qubits is None:
            if fields[0] != "qubits" or len(fields) != 2:
                raise CircuitError(f"line {lineno}: expected 'qubits <n>' header")
            try:
                num_qubits = int(fields[1])
            except ValueError:
                raise CircuitError(f"line {lineno}: bad qubit count {fields[1]!r}") from None
            continue
        gates.append(_parse_gate(fields, lineno))
    if num_qubits is None:
        raise CircuitError("missing 'qubits <n>' header")
    return Circuit(num_qubits, gates)


def loads_circuit(text: str) -> Circuit:
    return read_circuit(io.StringIO(text))


_QASM_NAMES = {"H": "h", "X": "x", "CX": "cx", "SWAP": "swap", "CSWAP": "cswap"}


def to_qasm(circuit: Circuit) -> str:
    """OpenQASM 2.0 text.

    Two-control MCX becomes ``ccx``.  Wider MCX gates are written with the
    non-standard ``mcx`` mnemonic, so such files only run on backends that
    define it.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    if any(g.kind == "MCX" and len(g.controls) > 2 for g in circuit.gates):
        lines.append("// mcx: abstract multi-controlled X (controls..., target); not in qelib1.inc")
    lines.append(f"qreg q[{circuit.num_qubits}];")
    for g in circuit.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.kind == "MCX":
            name = "ccx" if len(g.controls) == 2 else "mcx"
        else:
            name = _QASM_NAMES[g.kind]
        lines.append(f"{name} {args};")
    return "\n".join(lines) + "\n"
