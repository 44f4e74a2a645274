"""Recursive synthesis of an n-qubit unitary into uniformly controlled rotations.

Every level factors a unitary on qubits ``1..m`` as ``k~ y p^dag`` with the
involution on qubit ``m``.  ``y`` is a UCRx on qubit ``m`` controlled by the
rest of the register; ``k~`` and ``p^dag`` are block diagonal over qubit ``m``
and their two blocks recurse on qubits ``1..m-1``.  Siblings at the same
depth are synthesized together as multiplexors so that their rotations merge
into UCRs with extra controls.  Phases left over by a level are diagonal on
the control qubits and are pushed outward as UCRz gates, ending in a single
global phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import UCR, Circuit, GlobalPhase, expand_circuit, relabel_circuit
from .involution import CartanInvolution, conjugate_by_swap_to_last, exp_k_defect, is_in_exp_k
from .kak import H1, KakError, kak_decompose, y_has_subalgebra_shape
from .linalg import TOL_GROUP, TOL_UNITARY, as_matrix


@dataclass
class SynthOptions:
    ry_branch: bool = False
    tol_unitary: float = TOL_UNITARY
    tol_group: float = TOL_GROUP
    tol_member: float = 1e-8  # per unit of dimension, Frobenius
    check: bool = True
    expand: bool = False


@dataclass
class Leaf:
    matrix: np.ndarray
    angles: tuple[float, float, float]  # (a, b, c) of phase * Rz(a) Ry(b) Rz(c)
    phase: float


@dataclass
class Internal:
    qubits: int
    k_children: tuple
    y_angles: np.ndarray
    p_children: tuple
    phase: float
    ry_blocks: list[int] = field(default_factory=list)


def base_case_1q(u) -> tuple[float, float, float, complex]:
    """ZYZ angles with ``u = phase * Rz(a) @ Ry(b) @ Rz(c)`` and ``b`` in ``[0, pi/2]``."""
    u = as_matrix(u)
    if u.shape != (2, 2):
        raise ValueError("base case needs a 2x2 matrix")
    phase = np.exp(0.5j * np.angle(np.linalg.det(u)))
    v = u / phase
    alpha, beta = v[0, 0], v[1, 0]
    b = float(np.arctan2(abs(beta), abs(alpha)))
    s = -np.angle(alpha) if abs(alpha) > 1e-14 else 0.0  # a + c
    d = np.angle(beta) if abs(beta) > 1e-14 else 0.0  # a - c
    return float(0.5 * (s + d)), b, float(0.5 * (s - d)), complex(phase)


def split_exp_k(x, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Blocks of ``x = g0 (x) |0><0| + g1 (x) |1><1|`` (involution on the last qubit)."""
    x = as_matrix(x)
    if len(x) < 2 or len(x) % 2:
        raise ValueError("split needs an even dimension")
    n = int(round(np.log2(len(x))))
    if exp_k_defect(CartanInvolution(n), x) > tol:
        raise KakError("matrix is not block diagonal over the last qubit")
    return x[0::2, 0::2].copy(), x[1::2, 1::2].copy()


def build_tree(u, opts: SynthOptions | None = None):
    """Recursive factor tree of ``u`` (involution always on the last qubit)."""
    opts = opts or SynthOptions()
    u = as_matrix(u)
    if len(u) == 1:
        raise ValueError("nothing to synthesize for a 1x1 matrix")
    if len(u) == 2:
        a, b, c, ph = base_case_1q(u)
        return Leaf(u, (a, b, c), float(np.angle(ph)))
    m = int(round(np.log2(len(u))))
    theta = CartanInvolution(m)
    f = kak_decompose(u, theta, H1, ry_branch=opts.ry_branch, tol_unitary=opts.tol_unitary,
                      tol_group=opts.tol_group)
    tol = opts.tol_member * len(u)
    if opts.check:
        for name, part in (("k~", f.k_tilde), ("p^dag", f.p_dagger)):
            if not is_in_exp_k(theta, part, tol):
                raise KakError(f"{name} left exp(k) at {m} qubits")
        if not y_has_subalgebra_shape(f.y, theta, H1, tol):
            raise KakError(f"y lost its block shape at {m} qubits")
    k0, k1 = split_exp_k(f.k_tilde, tol)
    p0, p1 = split_exp_k(f.p_dagger, tol)
    return Internal(
        qubits=m,
        k_children=(build_tree(k0, opts), build_tree(k1, opts)),
        y_angles=np.asarray(f.angles, dtype=float),
        p_children=(build_tree(p0, opts), build_tree(p1, opts)),
        phase=float(np.angle(f.global_phase)),
        ry_blocks=list(f.ry_blocks),
    )


def _absorb(gates: list, phases: np.ndarray, target: int, controls: list[int]) -> np.ndarray:
    """Turn phases indexed by (target bit, controls) into a UCRz plus phases on the controls."""
    half = len(phases) // 2
    lo, hi = phases[:half], phases[half:]
    gates.append(UCR("z", controls, target, 0.5 * (hi - lo)))
    return 0.5 * (hi + lo)


def _flatten(nodes: list, m: int, controls: list[int], ry_branch: bool) -> tuple[list, np.ndarray]:
    """Gates for the multiplexor ``sum_x |x><x|_controls (x) nodes[x]`` and leftover phases."""
    gates: list = []
    if m == 1:
        for axis, which in (("z", 2), ("y", 1), ("z", 0)):
            gates.append(UCR(axis, controls, 1, [nd.angles[which] for nd in nodes]))
        return gates, np.array([nd.phase for nd in nodes])
    inner = [m] + controls
    sub_gates, sub_phase = _flatten([nd.p_children[0] for nd in nodes] + [nd.p_children[1] for nd in nodes],
                                    m - 1, inner, ry_branch)
    gates += sub_gates
    leftover = _absorb(gates, sub_phase, m, controls)
    width = 1 << (m - 1)
    nctl = len(nodes)
    rx_angles = np.zeros(width * nctl)
    ry_angles = np.zeros(width * nctl)
    for x, nd in enumerate(nodes):
        for j in range(width):
            if j in nd.ry_blocks:
                ry_angles[j * nctl + x] = np.pi / 2
            else:
                rx_angles[j * nctl + x] = nd.y_angles[j]
    y_controls = list(range(1, m)) + controls
    gates.append(UCR("x", y_controls, m, rx_angles))
    if ry_branch:
        gates.append(UCR("y", y_controls, m, ry_angles))
    sub_gates, sub_phase = _flatten([nd.k_children[0] for nd in nodes] + [nd.k_children[1] for nd in nodes],
                                    m - 1, inner, ry_branch)
    gates += sub_gates
    leftover = leftover + _absorb(gates, sub_phase, m, controls)
    return gates, leftover + np.array([nd.phase for nd in nodes])


def synthesize(g, theta: CartanInvolution | None = None, opts: SynthOptions | None = None) -> Circuit:
    """Circuit of UCRs (plus one global phase) whose evaluation equals ``g``.

    ``theta`` only selects which qubit plays the role of the top-level axis;
    the qubits are relabelled so that it is handled last.
    """
    opts = opts or SynthOptions()
    g = as_matrix(g)
    n = int(round(np.log2(len(g))))
    if 1 << n != len(g) or n < 1:
        raise ValueError(f"matrix dimension {len(g)} is not a power of two >= 2")
    theta = CartanInvolution(n) if theta is None else theta
    g_work, _ = conjugate_by_swap_to_last(theta, g)
    tree = build_tree(g_work, opts)
    gates, phase = _flatten([tree], n, [], opts.ry_branch)
    circuit = Circuit(n, gates + [GlobalPhase(float(phase[0]))])
    if theta.axis != n:
        circuit = relabel_circuit(circuit, {theta.axis: n, n: theta.axis})
    return expand_circuit(circuit) if opts.expand else circuit


def _ucr_cost(axis: str, k: int) -> int:
    if k == 0:
        return 1
    return 2 * (1 << k) + (2 if axis == "x" else 0)


def elementary_gate_count(n: int, ry_branch: bool = False) -> int:
    """Gate total of ``synthesize(g, opts=SynthOptions(expand=True))`` for any n-qubit ``g``."""

    def flat(m: int, c: int) -> int:
        if m == 1:
            return 3 * _ucr_cost("z", c)
        y = _ucr_cost("x", n - 1) + (_ucr_cost("y", n - 1) if ry_branch else 0)
        return 2 * flat(m - 1, c + 1) + 2 * _ucr_cost("z", c) + y

    return flat(n, 0) + 1
