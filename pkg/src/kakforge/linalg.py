"""Dense complex linear algebra used by the decomposition.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
eigensolvers are written here (cyclic Jacobi) so that degenerate eigenspaces
of unitary matrices come back with orthonormal bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL_UNITARY = 1e-10
TOL_EIG = 1e-9
TOL_GROUP = 1e-8
MAX_SWEEPS = 100


class LinalgError(ValueError):
    """Raised for malformed input or failed convergence."""


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


@dataclass(frozen=True)
class EigenGroup:
    indices: tuple[int, ...]
    label: str  # "positive-real", "negative-real" or "complex"
    value: complex


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise LinalgError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise LinalgError(f"dimension mismatch: {a.shape} vs {b.shape}")


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_dim(a, b)
    return a @ b


def frobenius_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_dim(a, b)
    return float(np.linalg.norm(a - b))


def unitarity_defect(u) -> float:
    """``||U^dag U - I||_F``."""
    u = as_matrix(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(len(u))))


def is_unitary(u, tol: float = TOL_UNITARY) -> bool:
    u = as_matrix(u)
    return unitarity_defect(u) <= tol * len(u)


def is_hermitian(h, tol: float = TOL_UNITARY) -> bool:
    h = as_matrix(h)
    return float(np.linalg.norm(h - h.conj().T)) <= tol * len(h)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(h, tol: float = 1e-15, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations inside a round act on disjoint rows and columns and can
    be applied together.  Returns unsorted eigenvalues and the unitary whose
    columns are the eigenvectors.
    """
    a = as_matrix(h).copy()
    a = 0.5 * (a + a.conj().T)
    n = len(a)
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.diagonal().real.copy(), v
    if not np.all(np.isfinite(a)):
        raise LinalgError("non-finite entries in Hermitian input")
    rounds = _round_robin(n)
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= tol * scale:
            return a.diagonal().real.copy(), v
        for ps, qs in rounds:
            apq = a[ps, qs]
            r = np.abs(apq)
            active = r > 1e-18 * scale
            if not np.any(active):
                continue
            ps, qs, apq, r = ps[active], qs[active], apq[active], r[active]
            app = a[ps, ps].real
            aqq = a[qs, qs].real
            # phase the pair to a real symmetric 2x2 block, then rotate it away
            ph = apq / r
            tau = (aqq - app) / (2.0 * r)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # 2x2 unitary: [[c, s], [-s conj(ph), c conj(ph)]]
            u00, u01 = c, s
            u10, u11 = -s * ph.conj(), c * ph.conj()
            cp, cq = a[:, ps].copy(), a[:, qs].copy()
            a[:, ps] = cp * u00 + cq * u10
            a[:, qs] = cp * u01 + cq * u11
            rp, rq = a[ps, :].copy(), a[qs, :].copy()
            a[ps, :] = np.conj(u00)[:, None] * rp + np.conj(u10)[:, None] * rq
            a[qs, :] = np.conj(u01)[:, None] * rp + np.conj(u11)[:, None] * rq
            a[qs, ps] = 0.0
            a[ps, qs] = 0.0
            vp, vq = v[:, ps].copy(), v[:, qs].copy()
            v[:, ps] = vp * u00 + vq * u10
            v[:, qs] = vp * u01 + vq * u11
    raise LinalgError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def hermitian_eigen(h, tol_unitary: float = TOL_UNITARY) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = as_matrix(h)
    if not is_hermitian(h, tol_unitary):
        raise LinalgError("input is not Hermitian")
    w, v = jacobi_eigh(h)
    order = np.argsort(w, kind="stable")
    return EigenSystem(values=w[order].astype(complex), vectors=v[:, order])


def _clusters(sorted_values: np.ndarray, tol: float) -> list[np.ndarray]:
    cuts = np.flatnonzero(np.diff(sorted_values) > tol) + 1
    return np.split(np.arange(len(sorted_values)), cuts)


def unitary_eigen(u, tol_unitary: float = TOL_UNITARY, tol_group: float = TOL_GROUP) -> EigenSystem:
    """Eigendecomposition of a unitary matrix with an orthonormal eigenbasis.

    ``U = H_r + i H_i`` with commuting Hermitian parts.  ``H_r`` is
    diagonalized first; inside each of its (near-)degenerate eigenspaces the
    projected ``H_i`` separates conjugate pairs and repeated eigenvalues.
    """
    u = as_matrix(u)
    if not is_unitary(u, tol_unitary):
        raise LinalgError("input is not unitary")
    h_re = 0.5 * (u + u.conj().T)
    h_im = -0.5j * (u - u.conj().T)
    re_sys = hermitian_eigen(h_re, tol_unitary)
    basis = re_sys.vectors.copy()
    for idx in _clusters(re_sys.values.real, tol_group):
        if len(idx) == 1:
            continue
        block = basis[:, idx]
        w, rot = jacobi_eigh(block.conj().T @ h_im @ block)
        order = np.argsort(w, kind="stable")
        basis[:, idx] = block @ rot[:, order]
    # Rayleigh quotients are accurate to the vector error squared
    values = np.einsum("ij,ij->j", basis.conj(), u @ basis)
    values = values / np.abs(values)
    return EigenSystem(values=values, vectors=basis)


def classify_eigenvalue(value: complex, tol_group: float = TOL_GROUP) -> str:
    if abs(value.imag) <= tol_group:
        return "positive-real" if value.real > 0 else "negative-real"
    return "complex"


def group_eigenvalues(values, tol_group: float = TOL_GROUP) -> list[EigenGroup]:
    """Partition eigenvalue indices into clusters closer than ``tol_group``.

    Clusters are the connected components of the "within tol_group" relation.
    Groups come back ordered by their smallest index.
    """
    vals = np.asarray(values, dtype=complex)
    n = len(vals)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        close = np.flatnonzero(np.abs(vals[i + 1:] - vals[i]) <= tol_group) + i + 1
        for j in close:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)
    groups = []
    for root in sorted(members):
        idx = tuple(members[root])
        mean = complex(vals[list(idx)].mean())
        groups.append(EigenGroup(indices=idx, label=classify_eigenvalue(mean, tol_group), value=mean))
    return groups


def random_unitary(dim: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    rng = np.random.default_rng() if rng is None else rng
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    return q * (d / np.abs(d))


def random_hermitian(dim: int, rng: np.random.Generator | None = None) -> np.ndarray:
    rng = np.random.default_rng() if rng is None else rng
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + z.conj().T)
