"""Quantum Fourier transform matrices, the textbook circuit, and KAK checks on F_n."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import SWAP, Circuit, CPhase, H, count_gates, evaluate
from .involution import CartanInvolution, swap_permutation
from .kak import H2, kak_decompose, verify_factors, xx_plus_yy

MAX_QUBITS = 12


def omega(n: int) -> complex:
    return complex(np.exp(2j * np.pi / (1 << n)))


def qft_matrix(n: int, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """``F_n[j, l] = omega_n^(j l) / sqrt(2^n)`` (0-indexed)."""
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    if n > max_qubits:
        raise ValueError(f"n={n} exceeds the dimension cap of {max_qubits} qubits")
    dim = 1 << n
    idx = np.arange(dim)
    # reduce the exponent mod 2^n so large products stay exact
    return np.exp(2j * np.pi * (np.outer(idx, idx) % dim) / dim) / np.sqrt(dim)


def swap_matrix(n: int, a: int, b: int) -> np.ndarray:
    perm = swap_permutation(n, a, b)
    return np.eye(1 << n)[perm].astype(complex)


def cyclic_permutation(n: int) -> np.ndarray:
    """``Q_n = SWAP(n-1, n) ... SWAP(2, n) SWAP(1, n)``: moves the last qubit to the front."""
    q = np.eye(1 << n, dtype=complex)
    for j in range(1, n):
        q = swap_matrix(n, j, n) @ q
    return q


def omega_diag(n: int) -> np.ndarray:
    """``Omega_{n-1} = diag(1, w_n, ..., w_n^(2^(n-1) - 1))``."""
    return np.diag(omega(n) ** np.arange(1 << (n - 1)))


@dataclass
class QftArtifacts:
    n: int
    F: np.ndarray
    Q: np.ndarray
    D: np.ndarray
    Omega: np.ndarray
    S: np.ndarray
    H1: np.ndarray

    def recursion_residual(self) -> float:
        """``||F_n - H_1 D_n S||_F`` with ``S = (I (x) F_{n-1}) Q_n``."""
        return float(np.linalg.norm(self.F - self.H1 @ self.D @ self.S))


def qft_artifacts(n: int) -> QftArtifacts:
    if n < 2:
        raise ValueError("the F_n recursion needs n >= 2")
    om = omega_diag(n)
    half = 1 << (n - 1)
    d = np.eye(1 << n, dtype=complex)
    d[half:, half:] = om
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    q = cyclic_permutation(n)
    s = np.kron(np.eye(2), qft_matrix(n - 1)) @ q
    return QftArtifacts(n=n, F=qft_matrix(n), Q=q, D=d, Omega=om, S=s,
                        H1=np.kron(hadamard, np.eye(half)).astype(complex))


def qft_known_circuit(n: int) -> Circuit:
    """Hadamards, controlled phases ``2 pi / 2^k`` and a final qubit reversal."""
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    c = Circuit(n)
    for j in range(1, n + 1):
        c.append(H(j))
        for k in range(j + 1, n + 1):
            c.append(CPhase(2 * np.pi / (1 << (k - j + 1)), k, j))
    for j in range(1, n // 2 + 1):
        c.append(SWAP(j, n + 1 - j))
    return c


def omega_factorize(om, tol: float = 1e-11) -> list[np.ndarray] | None:
    """Split a diagonal matrix into a tensor product of 2x2 diagonals, or ``None``.

    Peels the last qubit repeatedly: the odd-index half must be a constant
    multiple of the even-index half.  Factors are returned most significant
    qubit first; the leftover scalar is folded into the first factor.
    """
    diag = np.diag(np.asarray(om, dtype=complex)).copy()
    if not np.allclose(np.asarray(om), np.diag(diag), atol=tol):
        return None
    k = int(round(np.log2(len(diag))))
    if 1 << k != len(diag) or k < 1:
        return None
    factors = []
    while len(diag) > 1:
        even, odd = diag[0::2], diag[1::2]
        if abs(even[0]) < tol:
            return None
        ratio = odd[0] / even[0]
        if np.max(np.abs(odd - ratio * even)) > tol:
            return None
        factors.append(np.diag([1.0, ratio]).astype(complex))
        diag = even
    factors.reverse()
    factors[0] = factors[0] * diag[0]
    return factors


def kron_all(mats) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


B_BLOCK = np.diag([1, -1, -1, 1]).astype(complex)
Y_BLOCK = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]])


def _blocks(x: np.ndarray, size: int) -> list[np.ndarray]:
    return [x[s:s + size, s:s + size] for s in range(0, len(x), size)]


@dataclass
class QftReport:
    n: int
    residual: float
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    runtime_ms: int = 0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {"n": self.n, "residual": self.residual, "checks": self.checks,
                "details": self.details, "counts": self.counts, "runtime_ms": self.runtime_ms}


def qft_kak_check(n: int, tol_recon: float = 1e-9, tol_block: float = 1e-9,
                  tol_identity: float = 1e-10) -> QftReport:
    """Decompose ``F_n`` with the XX+YY subalgebra and compare against the closed forms.

    Checks: reconstruction; every 4x4 block of ``b`` is diag(1, -1, -1, 1);
    every block of ``y`` equals ``exp(i pi/4 (XX + YY))``; and
    ``F_n = H_1 D_n (I (x) F_{n-1}) Q_n`` computed independently.
    """
    start = time.perf_counter()
    theta = CartanInvolution(n)
    art = qft_artifacts(n)
    f = kak_decompose(art.F, theta, H2)
    rep = verify_factors(art.F, theta, f, tol_recon)
    b_err = max(float(np.linalg.norm(blk - B_BLOCK)) for blk in _blocks(f.b, 4))
    b_off = float(np.linalg.norm(f.b - kron_all([np.eye(1 << (n - 2)), B_BLOCK])))
    y_err = max(float(np.linalg.norm(blk - Y_BLOCK)) for blk in _blocks(f.y, 4))
    rec = art.recursion_residual()
    report = QftReport(
        n=n,
        residual=rep.residual,
        checks={
            "reconstruction": rep.residual <= tol_recon,
            "membership": rep.k_tilde_in_exp_k and rep.p_dagger_in_exp_k and rep.y_shape,
            "b_closed_form": b_err <= tol_block and b_off <= tol_block,
            "y_closed_form": y_err <= tol_block,
            "y_is_xx_plus_yy": float(np.linalg.norm(Y_BLOCK - xx_plus_yy(np.pi / 4))) <= 1e-15,
            "recursion_identity": rec <= tol_identity,
        },
        details={"b_block_error": b_err, "b_error": b_off, "y_block_error": y_err,
                 "recursion_residual": rec},
    )
    report.runtime_ms = int(1000 * (time.perf_counter() - start))
    return report


def qft_known_check(n: int, tol: float = 1e-10) -> QftReport:
    start = time.perf_counter()
    c = qft_known_circuit(n)
    counts = count_gates(c)
    residual = float(np.linalg.norm(evaluate(c) - qft_matrix(n)))
    report = QftReport(
        n=n,
        residual=residual,
        checks={
            "evaluation": residual <= tol,
            "hadamard_count": counts["H"] == n,
            "cphase_count": counts["CPhase"] == n * (n - 1) // 2,
            "swap_count": counts["SWAP"] == n // 2,
        },
        counts={"H": counts["H"], "CPhase": counts["CPhase"], "SWAP": counts["SWAP"]},
    )
    report.runtime_ms = int(1000 * (time.perf_counter() - start))
    return report
