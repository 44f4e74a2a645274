import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kakforge import circuit as C
from kakforge.qft import omega, omega_diag, qft_known_circuit, qft_matrix
from kakforge.rng import SplitMix64

from oracles import PAULI, cnot, controlled_rotation_table, kron, one_qubit, rot

HAD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def test_empty_circuit_is_identity():
    assert np.array_equal(C.evaluate(C.Circuit(2)), np.eye(4))


def test_qubit_one_is_most_significant():
    assert np.allclose(C.evaluate(C.Circuit(2, [C.H(1)])), np.kron(HAD, np.eye(2)))


def test_first_listed_is_first_applied():
    u = C.evaluate(C.Circuit(2, [C.CNOT(1, 2), C.H(1)]))
    by_hand = np.kron(HAD, np.eye(2)) @ np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.max(np.abs(u - by_hand)) <= 1e-14


@pytest.mark.parametrize("n,a,b", [(2, 1, 2), (3, 1, 3), (4, 2, 3)])
def test_swap_is_bit_exchange(n, a, b):
    u = C.evaluate(C.Circuit(n, [C.SWAP(a, b)]))
    perm = np.zeros((1 << n, 1 << n))
    for r in range(1 << n):
        ba, bb = (r >> (n - a)) & 1, (r >> (n - b)) & 1
        perm[r ^ ((ba ^ bb) << (n - a)) ^ ((ba ^ bb) << (n - b)), r] = 1
    assert np.array_equal(u, perm)


def test_gate_matrices_against_oracles():
    n = 3
    cases = [
        (C.Rx(0.3, 2), one_qubit(n, 2, rot("x", 0.3))),
        (C.Ry(-1.1, 1), one_qubit(n, 1, rot("y", -1.1))),
        (C.Rz(2.2, 3), one_qubit(n, 3, rot("z", 2.2))),
        (C.Phase(0.4, 3), one_qubit(n, 3, np.diag([1, np.exp(0.4j)]))),
        (C.CNOT(3, 1), cnot(n, 3, 1)),
        (C.CPhase(0.9, 1, 3), np.diag([np.exp(0.9j) if (r >> 2) & 1 and r & 1 else 1 for r in range(8)])),
        (C.GlobalPhase(0.5), np.exp(0.5j) * np.eye(8)),
        (C.Raw1q(HAD, 2), one_qubit(n, 2, HAD)),
    ]
    for gate, expected in cases:
        assert np.max(np.abs(C.evaluate(C.Circuit(n, [gate])) - expected)) <= 1e-13, gate.kind


def test_xx_plus_yy_gate():
    xxyy = kron(PAULI["X"], PAULI["X"]) + kron(PAULI["Y"], PAULI["Y"])
    w, v = np.linalg.eigh(xxyy)
    expected = v @ np.diag(np.exp(0.7j * w)) @ v.conj().T
    assert np.allclose(C.evaluate(C.Circuit(2, [C.XXplusYY(0.7, 1, 2)])), expected, atol=1e-13)


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_ucr_matches_table(axis):
    angles = [0.1, 0.7, -0.4, 1.9]
    g = C.UCR(axis, [3, 1], 2, angles)
    expected = controlled_rotation_table(3, [3, 1], 2, axis, angles)
    assert np.max(np.abs(C.evaluate(C.Circuit(3, [g])) - expected)) <= 1e-12


def test_mux1q():
    g = C.Mux1q(1, [C.Rx(0.2, 2), C.Rz(0.5, 2)], [C.H(2)])
    u = C.evaluate(C.Circuit(2, [g]))
    expected = np.zeros((4, 4), dtype=complex)
    expected[:2, :2] = rot("z", 0.5) @ rot("x", 0.2)
    expected[2:, 2:] = HAD
    assert np.allclose(u, expected, atol=1e-13)


def test_invalid_gates():
    with pytest.raises(ValueError):
        C.Gate("Toffoli", (1,))
    with pytest.raises(ValueError):
        C.UCR("y", [1], 2, [0.1])
    with pytest.raises(ValueError):
        C.evaluate(C.Circuit(2, [C.H(3)]))
    with pytest.raises(ValueError):
        C.evaluate(C.Circuit(2, [C.CNOT(1, 1)]))


def test_ucr_single_rotation():
    assert [g.kind for g in C.expand_ucr(C.UCR("y", [], 1, [0.3]))] == ["Ry"]
    assert [g.kind for g in C.expand_ucr(C.UCR("x", [], 1, [0.3]))] == ["Rx"]


def test_ucr_one_control_form():
    a, b = 0.8, -0.3
    gates = C.expand_ucr(C.UCR("y", [1], 2, [a, b]))
    assert [g.kind for g in gates] == ["Ry", "CNOT", "Ry", "CNOT"]
    assert np.allclose([gates[0].angles[0], gates[2].angles[0]], [(a + b) / 2, (a - b) / 2])
    expected = controlled_rotation_table(2, [1], 2, "y", [a, b])
    assert np.max(np.abs(C.evaluate(C.Circuit(2, gates)) - expected)) <= 1e-14


def test_cnot_commutes_with_rx_on_target():
    # the two-rotation pattern cannot realize a UCRx, hence the basis change
    u = C.evaluate(C.Circuit(2, [C.Rx(0.4, 2), C.CNOT(1, 2)]))
    v = C.evaluate(C.Circuit(2, [C.CNOT(1, 2), C.Rx(0.4, 2)]))
    assert np.allclose(u, v)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5])
@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_ucr_expansion_equivalent(k, axis):
    rng = SplitMix64(10 * k + ord(axis))
    n = k + 1
    controls = list(range(1, n))
    target = n
    for _ in range(200 if k <= 3 else 20):
        angles = rng.angles(1 << k, -np.pi, np.pi)
        g = C.UCR(axis, controls, target, angles)
        gates = C.expand_ucr(g)
        residual = np.linalg.norm(C.evaluate(C.Circuit(n, gates)) - C.evaluate(C.Circuit(n, [g])))
        assert residual <= 1e-12
    kinds = C.count_gates(C.Circuit(n, gates))
    if axis != "x" or k == 0:
        assert kinds[f"R{axis}"] == 1 << k and kinds["CNOT"] == (1 << k if k else 0)
    else:
        assert kinds["Rz"] == 1 << k and kinds["Ry"] == 2 and kinds["CNOT"] == 1 << k


def test_ucr_expansion_permuted_controls():
    angles = SplitMix64(9).angles(4)
    g = C.UCR("z", [4, 2], 1, angles)
    residual = np.linalg.norm(C.evaluate(C.Circuit(4, C.expand_ucr(g))) - C.evaluate(C.Circuit(4, [g])))
    assert residual <= 1e-12


def test_count_gates():
    assert sum(C.count_gates(C.Circuit(2)).values()) == 0
    counts = C.count_gates(qft_known_circuit(3))
    assert (counts["H"], counts["CPhase"], counts["SWAP"]) == (3, 3, 1)
    expanded = C.expand_circuit(C.Circuit(4, [C.UCR("y", [1, 2, 3], 4, np.zeros(8))]))
    assert C.count_gates(expanded) == {"Ry": 8, "CNOT": 8}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**63))
def test_evaluate_is_homomorphism(seed):
    rng = SplitMix64(seed)
    n = 3

    def random_circuit():
        c = C.Circuit(n)
        for kind, q in zip(rng.uniform(6), rng.uniform(6)):
            t = 1 + int(q * n)
            if kind < 0.4:
                c.append(C.Ry(rng.angles(1)[0], t))
            elif kind < 0.7:
                c.append(C.CNOT(t, t % n + 1))
            else:
                c.append(C.UCR("z", [t % n + 1], t, rng.angles(2)))
        return c

    c1, c2 = random_circuit(), random_circuit()
    assert np.linalg.norm(C.evaluate(c1 + c2) - C.evaluate(c2) @ C.evaluate(c1)) <= 1e-12


@pytest.mark.parametrize("control", [1, 2, 3])
def test_multiplex_merge(control):
    rng = SplitMix64(control)
    others = [q for q in (1, 2, 3) if q != control]
    t, c = others
    c0 = C.Circuit(3, [C.UCR("y", [c], t, rng.angles(2)), C.Rz(0.3, t), C.GlobalPhase(0.2)])
    c1 = C.Circuit(3, [C.UCR("y", [c], t, rng.angles(2)), C.Rz(-1.1, t), C.GlobalPhase(-0.9)])
    merged = C.evaluate(C.multiplex_circuits(c0, c1, control))
    proj = [one_qubit(3, control, np.diag([1, 0])), one_qubit(3, control, np.diag([0, 1]))]
    expected = proj[0] @ C.evaluate(c0) + proj[1] @ C.evaluate(c1)
    assert np.linalg.norm(merged - expected) <= 1e-12


def test_multiplex_rejects_mismatch():
    with pytest.raises(ValueError):
        C.multiplex_gates(C.Rx(0.1, 1), C.Ry(0.1, 1), 2)
    with pytest.raises(ValueError):
        C.multiplex_gates(C.Rx(0.1, 1), C.Rx(0.2, 1), 1)


def _demux_residual(u1, u2):
    v, d, w = C.demux_block_diag(u1, u2)
    vv = np.kron(np.eye(2), v)
    dd = np.block([[d, np.zeros_like(d)], [np.zeros_like(d), d.conj().T]])
    ww = np.kron(np.eye(2), w)
    target = np.block([[u1, np.zeros_like(u1)], [np.zeros_like(u2), u2]])
    return np.linalg.norm(vv @ dd @ ww - target), d


def test_demux_equal_blocks():
    u = SplitMix64(1).unitary(4)
    v, d, w = C.demux_block_diag(u, u)
    assert np.allclose(d, np.eye(4)) and np.allclose(v @ w, u)


@pytest.mark.parametrize("dim", [1, 2, 4, 8, 16])
def test_demux_random(dim):
    rng = SplitMix64(dim)
    for _ in range(10):
        residual, d = _demux_residual(rng.unitary(dim), rng.unitary(dim))
        assert residual <= 1e-10
        assert np.allclose(d, np.diag(np.diag(d))) and np.allclose(np.abs(np.diag(d)), 1)


def test_demux_qft_instance():
    n = 3
    om = omega_diag(n)
    f = qft_matrix(n - 1)
    v, d, w = C.demux_block_diag(-om @ f, f)
    expected = 1j * omega(n + 1) ** np.arange(1 << (n - 1))
    got = np.diag(d)
    # eigenvectors of a diagonal matrix are basis vectors; read d in basis order
    order = np.argmax(np.abs(v), axis=0)
    aligned = np.empty_like(got)
    aligned[order] = got
    assert np.max(np.abs(aligned - expected)) <= 1e-10


def test_demux_rejects_size_mismatch():
    with pytest.raises(ValueError):
        C.demux_block_diag(np.eye(2), np.eye(4))


def test_json_round_trip_bit_exact():
    rng = SplitMix64(3)
    c = C.Circuit(3, [
        C.UCR("x", [1, 2], 3, rng.angles(4)), C.Raw1q(rng.unitary(2), 1),
        C.Mux1q(2, [C.Ry(0.1, 1)], [C.Rz(rng.angles(1)[0], 1)]), C.XXplusYY(0.3, 1, 2),
        C.GlobalPhase(rng.angles(1)[0]), C.CPhase(np.pi / 7, 1, 2), C.SWAP(1, 3),
    ])
    back = C.loads(C.dumps(c))
    assert back.gates == c.gates
    assert np.array_equal(C.evaluate(back), C.evaluate(c))
    assert np.array_equal(back.gates[1].matrix, c.gates[1].matrix)
    assert json.loads(C.dumps(c))["convention"] == "q1-msb,first-applied-first"


def test_loads_rejects_bad_convention():
    with pytest.raises(ValueError):
        C.loads(json.dumps({"n": 1, "convention": "lsb", "gates": []}))


def test_text_listing():
    text = C.to_text(C.Circuit(2, [C.H(1), C.CNOT(1, 2)]))
    assert text.splitlines() == ["# n=2 q1-msb,first-applied-first", "H t=1", "CNOT c=1 t=2"]


def test_relabel():
    c = C.relabel_circuit(C.Circuit(3, [C.CNOT(1, 3)]), {1: 3, 3: 1})
    assert c.gates[0].controls == (3,) and c.gates[0].targets == (1,)
