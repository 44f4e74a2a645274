"""Circuit IR, exact matrix evaluation and uniformly-controlled-rotation expansion.

Conventions: gates are listed in application order (first listed is applied
first) and qubit 1 is the most significant tensor factor.  Rotations are
``R_a(t) = exp(-i t sigma_a)`` without the usual half angle.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .linalg import TOL_GROUP, TOL_UNITARY, as_matrix, unitary_eigen

CONVENTION = "q1-msb,first-applied-first"

ROTATIONS = ("Rx", "Ry", "Rz")
UCRS = ("UCRx", "UCRy", "UCRz")
KINDS = ("H", *ROTATIONS, "Phase", "CPhase", "CNOT", "SWAP", *UCRS, "XXplusYY", "Mux1q",
         "Raw1q", "GlobalPhase")

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def rotation(axis: str, angle: float) -> np.ndarray:
    """``exp(-i angle sigma_axis)`` for axis in ``"xyz"``."""
    return np.cos(angle) * np.eye(2) - 1j * np.sin(angle) * _PAULI[axis.lower()]


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angles: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, compare=False)
    sub0: tuple[Gate, ...] = ()
    sub1: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in UCRS and len(self.angles) != 1 << len(self.controls):
            raise ValueError(f"{self.kind} with {len(self.controls)} controls needs "
                             f"{1 << len(self.controls)} angles, got {len(self.angles)}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets


# constructors -------------------------------------------------------------

def H(t: int) -> Gate:
    return Gate("H", (t,))


def Rx(angle: float, t: int) -> Gate:
    return Gate("Rx", (t,), angles=(float(angle),))


def Ry(angle: float, t: int) -> Gate:
    return Gate("Ry", (t,), angles=(float(angle),))


def Rz(angle: float, t: int) -> Gate:
    return Gate("Rz", (t,), angles=(float(angle),))


def Phase(angle: float, t: int) -> Gate:
    return Gate("Phase", (t,), angles=(float(angle),))


def CPhase(angle: float, control: int, target: int) -> Gate:
    return Gate("CPhase", (target,), (control,), (float(angle),))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (target,), (control,))


def SWAP(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


def UCR(axis: str, controls, target: int, angles) -> Gate:
    return Gate("UCR" + axis.lower(), (target,), tuple(controls), tuple(float(a) for a in angles))


def XXplusYY(angle: float, q1: int, q2: int) -> Gate:
    return Gate("XXplusYY", (q1, q2), angles=(float(angle),))


def Mux1q(control: int, sub0, sub1) -> Gate:
    sub0, sub1 = tuple(sub0), tuple(sub1)
    targets = {q for g in sub0 + sub1 for q in g.qubits}
    if len(targets) != 1:
        raise ValueError("Mux1q branches must act on one common target qubit")
    return Gate("Mux1q", tuple(targets), (control,), sub0=sub0, sub1=sub1)


def Raw1q(matrix, t: int) -> Gate:
    return Gate("Raw1q", (t,), matrix=as_matrix(matrix))


def GlobalPhase(angle: float) -> Gate:
    """Multiplies the whole circuit by ``exp(i angle)``."""
    return Gate("GlobalPhase", (), angles=(float(angle),))


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)
    convention: str = CONVENTION

    def __iter__(self):
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)

    def append(self, gate: Gate) -> None:
        self.gates.append(gate)

    def extend(self, gates) -> None:
        self.gates.extend(gates)

    def __add__(self, other: Circuit) -> Circuit:
        if other.n != self.n:
            raise ValueError("cannot concatenate circuits on different qubit counts")
        return Circuit(self.n, self.gates + other.gates)


# matrices -----------------------------------------------------------------

def _block_diag(blocks) -> np.ndarray:
    size = sum(len(b) for b in blocks)
    out = np.zeros((size, size), dtype=complex)
    s = 0
    for b in blocks:
        out[s:s + len(b), s:s + len(b)] = b
        s += len(b)
    return out


def _product_1q(gates) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for g in gates:
        qs, gm = gate_matrix(g)
        if len(qs) == 1:
            m = gm @ m
        elif len(qs) == 0:
            m = gm[0, 0] * m
        else:
            raise ValueError("Mux1q branches may only hold single-qubit gates")
    return m


def gate_matrix(g: Gate) -> tuple[tuple[int, ...], np.ndarray]:
    """Qubits the gate touches (most significant first) and its matrix on them."""
    k = g.kind
    if k == "H":
        return g.targets, _H
    if k in ROTATIONS:
        return g.targets, rotation(k[1], g.angles[0])
    if k == "Phase":
        return g.targets, np.diag([1, np.exp(1j * g.angles[0])])
    if k == "CPhase":
        return g.qubits, np.diag([1, 1, 1, np.exp(1j * g.angles[0])])
    if k == "CNOT":
        return g.qubits, _CNOT
    if k == "SWAP":
        return g.targets, _SWAP
    if k in UCRS:
        return g.qubits, _block_diag([rotation(k[-1], a) for a in g.angles])
    if k == "XXplusYY":
        c, s = np.cos(2 * g.angles[0]), np.sin(2 * g.angles[0])
        return g.targets, np.array([[1, 0, 0, 0], [0, c, 1j * s, 0], [0, 1j * s, c, 0], [0, 0, 0, 1]])
    if k == "Mux1q":
        return g.qubits, _block_diag([_product_1q(g.sub0), _product_1q(g.sub1)])
    if k == "Raw1q":
        return g.targets, g.matrix
    if k == "GlobalPhase":
        return (), np.array([[np.exp(1j * g.angles[0])]])
    raise ValueError(f"no matrix for gate kind {k!r}")


def _check_qubits(g: Gate, n: int) -> None:
    qs = g.qubits
    if any(not 1 <= q <= n for q in qs):
        raise ValueError(f"{g.kind} uses qubit outside 1..{n}: {qs}")
    if len(set(qs)) != len(qs):
        raise ValueError(f"{g.kind} repeats a qubit: {qs}")
    for sub in g.sub0 + g.sub1:
        _check_qubits(sub, n)


def apply_gate(g: Gate, state: np.ndarray, n: int) -> np.ndarray:
    """Left-multiply a ``2^n x m`` array by the gate's full matrix."""
    _check_qubits(g, n)
    qs, gm = gate_matrix(g)
    if not qs:
        return gm[0, 0] * state
    k = len(qs)
    cols = state.shape[1]
    t = state.reshape((2,) * n + (cols,))
    axes = [q - 1 for q in qs]
    gm = gm.reshape((2,) * (2 * k))
    out = np.tensordot(gm, t, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(1 << n, cols)


def evaluate(circuit: Circuit) -> np.ndarray:
    """Unitary of the circuit: last applied gate is the leftmost factor."""
    u = np.eye(1 << circuit.n, dtype=complex)
    for g in circuit.gates:
        u = apply_gate(g, u, circuit.n)
    return u


# uniformly controlled rotations --------------------------------------------

def gray(i: int) -> int:
    return i ^ (i >> 1)


def ucr_angle_transform(angles) -> np.ndarray:
    """Angles of the Gray-code rotation sequence realizing the given UCR angles."""
    theta = np.asarray(angles, dtype=float)
    size = len(theta)
    x = np.arange(size)
    codes = np.array([gray(i) for i in range(size)])
    parity = np.array([[bin(int(xx) & int(c)).count("1") & 1 for c in codes] for xx in x])
    return ((1 - 2 * parity).T @ theta) / size


def expand_ucr(g: Gate) -> list[Gate]:
    """CNOT + single-qubit rotation sequence equal to a UCRy/UCRz/UCRx.

    UCRy and UCRz use the Gray-code scheme: ``2^k`` rotations and ``2^k``
    CNOTs.  CNOT commutes with ``Rx`` on its target, so a UCRx is done as a
    UCRz in the basis rotated by ``Ry(pi/4)``, costing two extra rotations.
    """
    if g.kind not in UCRS:
        raise ValueError(f"not a uniformly controlled rotation: {g.kind}")
    (target,) = g.targets
    k = len(g.controls)
    if g.kind == "UCRx" and k == 0:
        return [Rx(g.angles[0], target)]
    if g.kind == "UCRx":
        inner = expand_ucr(UCR("z", g.controls, target, g.angles))
        return [Ry(-np.pi / 4, target), *inner, Ry(np.pi / 4, target)]
    make = Ry if g.kind == "UCRy" else Rz
    if k == 0:
        return [make(g.angles[0], target)]
    phis = ucr_angle_transform(g.angles)
    out = []
    size = 1 << k
    for i in range(size):
        out.append(make(phis[i], target))
        changed = gray(i) ^ gray((i + 1) % size)
        bit = changed.bit_length() - 1
        out.append(CNOT(g.controls[k - 1 - bit], target))
    return out


def expand_circuit(circuit: Circuit) -> Circuit:
    out = Circuit(circuit.n)
    for g in circuit.gates:
        out.extend(expand_ucr(g) if g.kind in UCRS else [g])
    return out


def count_gates(circuit: Circuit) -> Counter:
    return Counter(g.kind for g in circuit.gates)


def multiplex_gates(g0: Gate, g1: Gate, control: int) -> list[Gate]:
    """One multiplexed gate (or short sequence) applying g0 if ``control`` is 0, else g1.

    Both gates must share kind and wiring.  Rotations and UCRs become UCRs
    with ``control`` inserted into the control list in ascending order.
    """
    if (g0.kind, g0.targets, g0.controls) != (g1.kind, g1.targets, g1.controls):
        raise ValueError(f"cannot multiplex {g0.kind}{g0.qubits} with {g1.kind}{g1.qubits}")
    if control in g0.qubits:
        raise ValueError(f"control qubit {control} already used by {g0.kind}")
    if g0.kind in ROTATIONS + UCRS:
        axis = g0.kind[-1]
        ctrls = sorted(g0.controls + (control,))
        pos = ctrls.index(control)
        k = len(ctrls)
        angles = []
        for idx in range(1 << k):
            bit = (idx >> (k - 1 - pos)) & 1
            hi, lo = idx >> (k - pos), idx & ((1 << (k - 1 - pos)) - 1)
            rest = (hi << (k - 1 - pos)) | lo
            angles.append((g1 if bit else g0).angles[rest])
        return [UCR(axis, ctrls, g0.targets[0], angles)]
    if g0.kind == "GlobalPhase":
        a0, a1 = g0.angles[0], g1.angles[0]
        return [GlobalPhase(0.5 * (a0 + a1)), Rz(0.5 * (a1 - a0), control)]
    if g0.kind in ("H", "CNOT", "SWAP"):
        return [g0]
    raise ValueError(f"multiplexing {g0.kind} gates is not supported")


def multiplex_circuits(c0: Circuit, c1: Circuit, control: int) -> Circuit:
    """Merge two structurally identical circuits into one controlled on ``control``."""
    if len(c0.gates) != len(c1.gates) or c0.n != c1.n:
        raise ValueError("circuits differ in structure")
    out = Circuit(c0.n)
    for g0, g1 in zip(c0.gates, c1.gates):
        out.extend(multiplex_gates(g0, g1, control))
    return out


def demux_block_diag(u1, u2, tol_unitary: float = TOL_UNITARY,
                     tol_group: float = TOL_GROUP) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``diag(u1, u2) = (v + v)(d + d^dag)(w + w)`` with ``d`` diagonal.

    ``v d^2 v^dag = u1 u2^dag`` comes from the unitary eigendecomposition;
    ``d`` takes each eigenphase in ``[0, 2 pi)`` and halves it.
    """
    u1, u2 = as_matrix(u1), as_matrix(u2)
    if u1.shape != u2.shape:
        raise ValueError("multiplexor blocks differ in size")
    eig = unitary_eigen(u1 @ u2.conj().T, tol_unitary, tol_group)
    half = 0.5 * np.mod(np.angle(eig.values), 2 * np.pi)
    d = np.diag(np.exp(1j * half))
    v = eig.vectors
    w = d @ v.conj().T @ u2
    return v, d, w


# serialization -------------------------------------------------------------

def gate_to_dict(g: Gate) -> dict:
    out = {"kind": g.kind, "targets": list(g.targets), "controls": list(g.controls),
           "angles": list(g.angles)}
    if g.matrix is not None:
        out["matrix"] = {"re": g.matrix.real.tolist(), "im": g.matrix.imag.tolist()}
    if g.kind == "Mux1q":
        out["sub0"] = [gate_to_dict(s) for s in g.sub0]
        out["sub1"] = [gate_to_dict(s) for s in g.sub1]
    return out


def gate_from_dict(d: dict) -> Gate:
    matrix = None
    if d.get("matrix") is not None:
        matrix = np.array(d["matrix"]["re"], dtype=float) + 1j * np.array(d["matrix"]["im"], dtype=float)
    return Gate(
        kind=d["kind"],
        targets=tuple(int(q) for q in d.get("targets", ())),
        controls=tuple(int(q) for q in d.get("controls", ())),
        angles=tuple(float(a) for a in d.get("angles", ())),
        matrix=matrix,
        sub0=tuple(gate_from_dict(s) for s in d.get("sub0", ())),
        sub1=tuple(gate_from_dict(s) for s in d.get("sub1", ())),
    )


def circuit_to_dict(c: Circuit) -> dict:
    return {"n": c.n, "convention": c.convention, "gates": [gate_to_dict(g) for g in c.gates]}


def circuit_from_dict(d: dict) -> Circuit:
    if d.get("convention", CONVENTION) != CONVENTION:
        raise ValueError(f"unsupported circuit convention {d['convention']!r}")
    c = Circuit(int(d["n"]), [gate_from_dict(g) for g in d["gates"]])
    for g in c.gates:
        _check_qubits(g, c.n)
    return c


def dumps(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=1)


def loads(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))


def to_text(c: Circuit) -> str:
    """Flat listing, one gate per line, for golden files."""
    lines = [f"# n={c.n} {c.convention}"]
    for g in c.gates:
        parts = [g.kind]
        if g.angles:
            parts.append(",".join(repr(a) for a in g.angles))
        if g.controls:
            parts.append("c=" + ",".join(map(str, g.controls)))
        if g.targets:
            parts.append("t=" + ",".join(map(str, g.targets)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def relabel_circuit(c: Circuit, mapping: dict[int, int]) -> Circuit:
    """Rename qubits; unmapped qubits keep their index."""

    def move(g: Gate) -> Gate:
        return Gate(g.kind, tuple(mapping.get(q, q) for q in g.targets),
                    tuple(mapping.get(q, q) for q in g.controls), g.angles, g.matrix,
                    tuple(move(s) for s in g.sub0), tuple(move(s) for s in g.sub1))

    return Circuit(c.n, [move(g) for g in c.gates], c.convention)
