"""Cartan involutions ``X -> s_j X s_j`` with ``s_j`` a Pauli Z on qubit ``j``.

Qubit 1 is the most significant tensor factor, so the bit of basis index
``r`` belonging to qubit ``j`` is ``(r >> (n - j)) & 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix


@dataclass(frozen=True)
class CartanInvolution:
    n: int
    axis: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        if self.axis is None:
            object.__setattr__(self, "axis", self.n)
        if not 1 <= self.axis <= self.n:
            raise ValueError(f"axis {self.axis} outside 1..{self.n}")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def axis_bits(self) -> np.ndarray:
        return (np.arange(self.dim) >> (self.n - self.axis)) & 1

    def signs(self) -> np.ndarray:
        """Diagonal of ``s_axis`` as +-1 floats."""
        return 1.0 - 2.0 * self.axis_bits()

    def canonical(self) -> CartanInvolution:
        return CartanInvolution(self.n, self.n)


def _check_dim(theta: CartanInvolution, length: int, what: str) -> None:
    if length != theta.dim:
        raise ValueError(f"{what} has dimension {length}, expected {theta.dim} for n={theta.n}")


def apply_theta(theta: CartanInvolution, x) -> np.ndarray:
    """Entry (r, c) is negated iff the axis bits of r and c differ; exact."""
    x = as_matrix(x)
    _check_dim(theta, len(x), "matrix")
    s = theta.signs()
    return x * np.outer(s, s)


def reflect_vector(theta: CartanInvolution, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    _check_dim(theta, v.shape[0], "vector")
    s = theta.signs()
    return v * (s if v.ndim == 1 else s[:, None])


def is_in_exp_k(theta: CartanInvolution, x, tol: float) -> bool:
    return float(np.linalg.norm(apply_theta(theta, x) - x)) <= tol


def satisfies_exp_m_condition(theta: CartanInvolution, x, tol: float) -> bool:
    x = as_matrix(x)
    return float(np.linalg.norm(apply_theta(theta, x) - x.conj().T)) <= tol


def exp_k_defect(theta: CartanInvolution, x) -> float:
    """Frobenius mass of the entries that must vanish for ``x`` in exp(k)."""
    return 0.5 * float(np.linalg.norm(apply_theta(theta, x) - x))


def swap_permutation(n: int, a: int, b: int) -> np.ndarray:
    """Basis-index permutation exchanging the bits of qubits ``a`` and ``b``."""
    idx = np.arange(1 << n)
    sa, sb = n - a, n - b
    ba, bb = (idx >> sa) & 1, (idx >> sb) & 1
    return idx ^ ((ba ^ bb) << sa) ^ ((ba ^ bb) << sb)


def conjugate_by_swap_to_last(theta: CartanInvolution, x) -> tuple[np.ndarray, CartanInvolution]:
    """Relabel qubits so the involution axis becomes the last qubit.

    Returns ``SWAP x SWAP`` and the canonical involution.  The relabelling is a
    pure index permutation, so applying it twice gives back ``x`` exactly.
    """
    x = as_matrix(x)
    _check_dim(theta, len(x), "matrix")
    if theta.axis == theta.n:
        return x.copy(), theta
    perm = swap_permutation(theta.n, theta.axis, theta.n)
    return x[np.ix_(perm, perm)], theta.canonical()
