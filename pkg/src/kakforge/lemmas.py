"""Eigenstructure checks on ``X = Theta(G^dag) G`` for the last-qubit involution.

* conjugate pairing: complex eigenvalues come in conjugate pairs of equal
  multiplicity;
* real eigenvalues: only +-1, each with even multiplicity, and every real
  eigenspace has equal even/odd dimension under the axis Z;
* transport: for ``X u = e u`` and ``Z u = e' u`` with ``e, e'`` in {+-1},
  ``G u`` satisfies ``X' (G u) = e G u`` and ``Z (G u) = e e' G u`` where
  ``X' = Theta(G) G^dag``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .involution import CartanInvolution, apply_theta
from .kak import Pair, build_symmetric_eigenbasis, compute_m_squared, rx
from .linalg import TOL_GROUP, group_eigenvalues, unitary_eigen
from .rng import SplitMix64


@dataclass
class LemmaResult:
    conjugate_pairs: bool
    real_eigenvalues: bool
    transport: bool
    real_dimension: int
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.conjugate_pairs and self.real_eigenvalues and self.transport


def check_lemmas(g, tol: float = 1e-9, tol_group: float = TOL_GROUP) -> LemmaResult:
    g = np.asarray(g, dtype=complex)
    n = int(round(np.log2(len(g))))
    theta = CartanInvolution(n)
    x = compute_m_squared(g, theta)
    eig = unitary_eigen(x, tol_group=tol_group)
    groups = group_eigenvalues(eig.values, tol_group)
    notes: list[str] = []
    signs = theta.signs()

    complex_groups = [gr for gr in groups if gr.label == "complex"]
    pairs_ok = True
    unmatched = list(complex_groups)
    while unmatched:
        gr = unmatched.pop(0)
        partner = min(unmatched, key=lambda o: abs(o.value - np.conj(gr.value)), default=None)
        if partner is None or abs(partner.value - np.conj(gr.value)) > 1e3 * tol_group \
                or len(partner.indices) != len(gr.indices):
            pairs_ok = False
            notes.append(f"complex eigenvalue {gr.value:.6g} lacks an equal-size conjugate partner")
            continue
        unmatched.remove(partner)

    real_ok = True
    real_dim = 0
    for sign, label in ((1.0, "positive-real"), (-1.0, "negative-real")):
        idx = [i for gr in groups if gr.label == label for i in gr.indices]
        if not idx:
            continue
        real_dim += len(idx)
        vals = eig.values[idx]
        if np.max(np.abs(vals - sign)) > 1e3 * tol_group:
            real_ok = False
            notes.append(f"real eigenvalue away from {sign:+.0f}")
        if len(idx) % 2:
            real_ok = False
            notes.append(f"eigenvalue {sign:+.0f} has odd multiplicity {len(idx)}")
        v = eig.vectors[:, idx]
        # trace of Z restricted to the eigenspace = even dim - odd dim
        imbalance = float(np.real(np.einsum("ij,i,ij->", v.conj(), signs, v)))
        if abs(imbalance) > 1e-6:
            real_ok = False
            notes.append(f"eigenvalue {sign:+.0f}: even/odd imbalance {imbalance:.3g}")

    transport_ok = True
    if real_dim and real_ok:
        basis = build_symmetric_eigenbasis(x, theta, tol_group=tol_group)
        x_prime = apply_theta(theta, g) @ g.conj().T
        real_cols = [c for pr in basis.pairing if pr.label != "complex" for c in (pr.even, pr.odd)]
        for pr_label, col in ((_label(basis.pairing, c), c) for c in real_cols):
            eps = 1.0 if pr_label == "positive-real" else -1.0
            eps_z = basis.parity[col]
            u = basis.columns[:, col]
            gu = g @ u
            if (np.linalg.norm(x_prime @ gu - eps * gu) > tol
                    or np.linalg.norm(signs * gu - eps * eps_z * gu) > tol):
                transport_ok = False
                notes.append(f"transport rule fails for column {col}")
                break
    return LemmaResult(pairs_ok, real_ok, transport_ok, real_dim, notes)


def _label(pairing: list[Pair], col: int) -> str:
    for pr in pairing:
        if col in (pr.even, pr.odd):
            return pr.label
    raise KeyError(col)


def random_exp_k(n: int, rng: SplitMix64) -> np.ndarray:
    """Random block-diagonal unitary over the last qubit."""
    half = 1 << (n - 1)
    out = np.zeros((2 * half, 2 * half), dtype=complex)
    out[0::2, 0::2] = rng.unitary(half)
    out[1::2, 1::2] = rng.unitary(half)
    return out


def structured_unitary(n: int, rng: SplitMix64) -> np.ndarray:
    """``k p y p^dag`` with some y blocks forced to angle 0 or pi/2.

    Haar samples have no real eigenvalues in ``X`` almost surely, so these
    exercise the real-eigenvalue statements.
    """
    half = 1 << (n - 1)
    kinds = rng.uniform(half)
    angles = rng.angles(half, 0.0, np.pi)
    angles = np.where(kinds < 0.3, 0.0, np.where(kinds < 0.6, np.pi / 2, angles))
    y = np.zeros((2 * half, 2 * half), dtype=complex)
    for j, z in enumerate(angles):
        y[2 * j:2 * j + 2, 2 * j:2 * j + 2] = rx(z)
    p = random_exp_k(n, rng)
    k = random_exp_k(n, rng)
    return k @ p @ y @ p.conj().T


def lemma_samples(count: int, n: int, seed: int = 42):
    """Alternating Haar and structured unitaries from one SplitMix64 stream."""
    rng = SplitMix64(seed)
    for i in range(count):
        yield rng.unitary(1 << n) if i % 2 == 0 else structured_unitary(n, rng)
