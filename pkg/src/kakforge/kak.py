"""Type-AIII ``g = k~ y p^dag`` factorization through the square of the m-part.

The pipeline for a unitary ``g`` and involution ``Theta``:

1. ``m2 = Theta(g^dag) g`` (the square of the m-part, independent of the split);
2. an eigenbasis ``p`` of ``m2`` whose columns have definite parity under the
   axis-qubit Z, so ``Theta(p) = p`` and ``b = p^dag m2 p`` is block diagonal;
3. ``y`` with ``y^2 = b`` by halving the rotation angle of each block;
4. ``m = p y p^dag``, ``k = g m^dag`` and ``k~ = k p``.

Two Cartan subalgebras are supported: ``"h1"`` (2x2 ``Rx`` blocks on the axis
qubit) and ``"h2"`` (4x4 ``exp(i z (XX + YY))`` blocks on the last two qubits).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .involution import (
    CartanInvolution,
    apply_theta,
    conjugate_by_swap_to_last,
    satisfies_exp_m_condition,
)
from .linalg import (
    TOL_GROUP,
    TOL_UNITARY,
    as_matrix,
    group_eigenvalues,
    is_unitary,
    unitary_eigen,
)

H1 = "h1"
H2 = "h2"
TOL_INDEPENDENT = 1e-8
TOL_RECON = 1e-8


class KakError(RuntimeError):
    pass


class H2NotApplicable(KakError):
    """The eigenvalue structure of m^2 does not admit the h2 subalgebra."""


@dataclass(frozen=True)
class Pair:
    even: int
    odd: int
    label: str


@dataclass
class SymmetrizedBasis:
    columns: np.ndarray
    parity: np.ndarray
    pairing: list[Pair]
    theta: CartanInvolution
    matrix: np.ndarray  # the m^2 the basis was built from

    def ordered(self, order: list[int]) -> np.ndarray:
        return self.columns[:, order]


@dataclass
class KakFactors:
    k_tilde: np.ndarray
    y: np.ndarray
    p_dagger: np.ndarray
    angles: np.ndarray
    subalgebra: str
    global_phase: complex
    b: np.ndarray
    theta: CartanInvolution
    ry_blocks: list[int] = field(default_factory=list)

    def product(self) -> np.ndarray:
        return self.global_phase * (self.k_tilde @ self.y @ self.p_dagger)


@dataclass
class VerificationReport:
    residual: float
    k_tilde_in_exp_k: bool
    p_dagger_in_exp_k: bool
    y_shape: bool
    tol: float

    @property
    def passed(self) -> bool:
        return (self.residual <= self.tol and self.k_tilde_in_exp_k
                and self.p_dagger_in_exp_k and self.y_shape)

    def as_dict(self) -> dict:
        return {
            "residual": self.residual,
            "checks": {
                "reconstruction": self.residual <= self.tol,
                "k_tilde_in_exp_k": self.k_tilde_in_exp_k,
                "p_dagger_in_exp_k": self.p_dagger_in_exp_k,
                "y_shape": self.y_shape,
            },
            "passed": self.passed,
        }


def rx(angle: float) -> np.ndarray:
    """``exp(-i angle X)`` (no half-angle convention)."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def xx_plus_yy(angle: float) -> np.ndarray:
    """``exp(i angle (XX + YY))``."""
    c, s = np.cos(2 * angle), np.sin(2 * angle)
    return np.array([[1, 0, 0, 0], [0, c, 1j * s, 0], [0, 1j * s, c, 0], [0, 0, 0, 1]])


def compute_m_squared(g, theta: CartanInvolution, tol_unitary: float = TOL_UNITARY) -> np.ndarray:
    g = as_matrix(g)
    if not is_unitary(g, tol_unitary):
        raise KakError("input matrix is not unitary")
    return apply_theta(theta, g.conj().T) @ g


def _orthogonalize(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    if not basis:
        return v
    w = np.array(basis).T
    for _ in range(2):
        v = v - w @ (w.conj().T @ v)
    return v


def _candidates(mu: np.ndarray, signs: np.ndarray) -> tuple[np.ndarray | None, np.ndarray | None]:
    out = []
    for half in (0.5 * (mu + signs * mu), 0.5 * (mu - signs * mu)):
        norm = np.linalg.norm(half)
        out.append(half / norm if norm > TOL_INDEPENDENT else None)
    return out[0], out[1]


def build_symmetric_eigenbasis(m2, theta: CartanInvolution, tol_unitary: float = TOL_UNITARY,
                               tol_group: float = TOL_GROUP) -> SymmetrizedBasis:
    """Orthonormal eigen-related basis of ``m2`` with definite axis parity.

    Complex eigenvalue pairs are handled first, then eigenvalue +1, then -1.
    For a conjugate pair the eigenvectors ``mu`` of the member with negative
    imaginary part give ``(mu +- s mu)``; each such pair of columns spans an
    invariant plane on which ``m2`` acts as an Rx rotation.  In the real
    eigenspaces any even vector can be paired with any odd one.
    """
    m2 = as_matrix(m2)
    eig = unitary_eigen(m2, tol_unitary, tol_group)
    groups = group_eigenvalues(eig.values, tol_group)
    signs = theta.signs()
    vecs = eig.vectors

    lower = [g for g in groups if g.label == "complex" and g.value.imag < 0]
    upper = [g for g in groups if g.label == "complex" and g.value.imag > 0]
    positive = sorted(i for g in groups if g.label == "positive-real" for i in g.indices)
    negative = sorted(i for g in groups if g.label == "negative-real" for i in g.indices)

    even: list[np.ndarray] = []
    odd: list[np.ndarray] = []
    pairing: list[Pair] = []

    def accept(cand, store) -> bool:
        if cand is None:
            return False
        res = _orthogonalize(cand, store)
        norm = np.linalg.norm(res)
        if norm <= TOL_INDEPENDENT:
            return False
        store.append(res / norm)
        return True

    for grp in lower:
        partner = min(upper, key=lambda u: abs(u.value - np.conj(grp.value)), default=None)
        if (partner is None or abs(partner.value - np.conj(grp.value)) > 1e3 * tol_group
                or len(partner.indices) != len(grp.indices)):
            raise KakError(f"complex eigenvalue {grp.value:.6g} has no conjugate partner of equal size")
        upper.remove(partner)
        for i in list(grp.indices) + list(partner.indices):
            plus, minus = _candidates(vecs[:, i], signs)
            got_even = accept(plus, even)
            got_odd = accept(minus, odd)
            if got_even and got_odd:
                pairing.append(Pair(len(even) - 1, len(odd) - 1, "complex"))
            elif got_even or got_odd:
                raise KakError("symmetrization produced an unpaired vector in a complex eigenspace")
    if upper:
        raise KakError("complex eigenvalues without conjugate partners")

    for label, idx in (("positive-real", positive), ("negative-real", negative)):
        if len(idx) % 2:
            raise KakError(f"{label} eigenspace has odd dimension {len(idx)}")
        start_even, start_odd = len(even), len(odd)
        for store, which in ((even, 0), (odd, 1)):
            pool = [c for c in (_candidates(vecs[:, i], signs)[which] for i in idx) if c is not None]
            # pivoted greedy: always take the most independent remaining candidate
            while pool and len(store) - (start_even if which == 0 else start_odd) < len(idx) // 2:
                res = [_orthogonalize(c, store) for c in pool]
                norms = [np.linalg.norm(r) for r in res]
                best = int(np.argmax(norms))
                if norms[best] <= TOL_INDEPENDENT:
                    break
                store.append(res[best] / norms[best])
                pool.pop(best)
        got_even, got_odd = len(even) - start_even, len(odd) - start_odd
        if got_even != len(idx) // 2 or got_odd != len(idx) // 2:
            raise KakError(f"{label} eigenspace split into {got_even} even / {got_odd} odd vectors")
        pairing.extend(Pair(start_even + j, start_odd + j, label) for j in range(got_even))

    half = len(m2) // 2
    if len(even) != half or len(odd) != half:
        raise KakError(f"symmetrization failed: {len(even)} even and {len(odd)} odd vectors")
    columns = np.array(even + odd).T
    parity = np.concatenate([np.ones(half), -np.ones(half)])
    pairing = [Pair(p.even, half + p.odd, p.label) for p in pairing]
    return SymmetrizedBasis(columns=columns, parity=parity, pairing=pairing, theta=theta, matrix=m2)


def _require_canonical(basis: SymmetrizedBasis) -> None:
    if basis.theta.axis != basis.theta.n:
        raise ValueError("p assembly needs the involution axis on the last qubit")


def _rephase(p: np.ndarray, m2: np.ndarray, row: int, col: int, fixed: int, target: complex) -> None:
    """Rotate the phase of column ``fixed`` so that ``b[row, col]`` points along ``target``."""
    entry = p[:, row].conj() @ m2 @ p[:, col]
    mag = abs(entry)
    if mag < 1e-300:
        return
    want = target * mag
    # scaling column ``fixed`` by z multiplies entry by z (fixed == col) or conj(z)
    z = want / entry if fixed == col else np.conj(want / entry)
    p[:, fixed] *= z


def assemble_p_h1(basis: SymmetrizedBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Columns ordered (even, odd, even, odd, ...) so ``b`` has Rx(2z) blocks.

    Returns ``(p, b, angles)`` with ``angles[j]`` the half angle z_j of block j,
    in ``[0, pi/2]``.
    """
    _require_canonical(basis)
    if len(basis.pairing) * 2 != len(basis.columns):
        raise KakError("pairing does not cover the basis")
    m2 = basis.matrix
    order = []
    for pr in basis.pairing:
        if basis.parity[pr.even] != 1 or basis.parity[pr.odd] != -1:
            raise KakError("pair with mismatched parities")
        order += [pr.even, pr.odd]
    p = basis.ordered(order).copy()
    for j in range(len(basis.pairing)):
        _rephase(p, m2, 2 * j, 2 * j + 1, 2 * j + 1, -1j)
    b = p.conj().T @ m2 @ p
    angles = np.array([0.5 * np.arctan2(abs(b[2 * j, 2 * j + 1]), b[2 * j, 2 * j].real)
                       for j in range(len(basis.pairing))])
    return p, b, angles


def _block_offmass(b: np.ndarray, size: int) -> float:
    mask = np.ones(b.shape, dtype=bool)
    for s in range(0, len(b), size):
        mask[s:s + size, s:s + size] = False
    return float(np.linalg.norm(b[mask]))


def sqrt_b_h1(b, angles, ry_branch: bool = False, tol: float = 1e-6) -> tuple[np.ndarray, list[int]]:
    """Block-diagonal ``y`` with blocks ``Rx(z_j)``, so ``y^2 = b``.

    With ``ry_branch`` a block equal to ``-I`` gets ``Ry(pi/2)`` instead of
    ``Rx(pi/2)``.  Returns ``y`` and the indices of the ``Ry`` blocks.
    """
    b = as_matrix(b)
    nb = len(b) // 2
    if len(angles) != nb or len(b) % 2:
        raise KakError("angle list does not match the block count of b")
    if _block_offmass(b, 2) > tol:
        raise KakError("b is not 2x2 block diagonal")
    y = np.zeros_like(b)
    ry_blocks = []
    for j, z in enumerate(angles):
        blk = b[2 * j:2 * j + 2, 2 * j:2 * j + 2]
        if np.linalg.norm(blk - rx(2 * z)) > tol:
            raise KakError(f"block {j} of b is not Rx(2z) for z={z}")
        if ry_branch and np.linalg.norm(blk + np.eye(2)) <= tol:
            y[2 * j:2 * j + 2, 2 * j:2 * j + 2] = ry(np.pi / 2)
            ry_blocks.append(j)
        else:
            y[2 * j:2 * j + 2, 2 * j:2 * j + 2] = rx(z)
    return y, ry_blocks


def assemble_p_h2(basis: SymmetrizedBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadruple ordering (even+, odd-, even-, odd+) for the XX+YY subalgebra.

    "+" columns come from the eigenvalue-1 eigenspace; "-" columns from any
    other pair.  This needs eigenvalue 1 with multiplicity at least N/2.
    """
    _require_canonical(basis)
    dim = len(basis.columns)
    if basis.theta.n < 2:
        raise H2NotApplicable("h2 needs at least two qubits")
    plus = [pr for pr in basis.pairing if pr.label == "positive-real"]
    rest = [pr for pr in basis.pairing if pr.label != "positive-real"]
    if len(plus) < dim // 4:
        raise H2NotApplicable(
            f"eigenvalue 1 has multiplicity {2 * len(plus)}, h2 needs at least {dim // 2}")
    # surplus +1 pairs fill the remaining slots as zero-angle blocks
    plus, rest = plus[:dim // 4], rest + plus[dim // 4:]
    m2 = basis.matrix
    order = []
    for pp, pr in zip(plus, rest):
        order += [pp.even, pr.odd, pr.even, pp.odd]
    p = basis.ordered(order).copy()
    for j in range(dim // 4):
        _rephase(p, m2, 4 * j + 1, 4 * j + 2, 4 * j + 1, 1j)
    b = p.conj().T @ m2 @ p
    angles = np.array([0.25 * np.arctan2(abs(b[4 * j + 1, 4 * j + 2]), b[4 * j + 1, 4 * j + 1].real)
                       for j in range(dim // 4)])
    return p, b, angles


def sqrt_b_h2(b, angles, tol: float = 1e-6) -> np.ndarray:
    """Block-diagonal ``y`` with blocks ``exp(i z_j (XX + YY))``, so ``y^2 = b``."""
    b = as_matrix(b)
    if len(b) % 4 or len(angles) != len(b) // 4:
        raise KakError("angle list does not match the block count of b")
    if _block_offmass(b, 4) > tol:
        raise KakError("b is not 4x4 block diagonal")
    y = np.zeros_like(b)
    for j, z in enumerate(angles):
        s = slice(4 * j, 4 * j + 4)
        if np.linalg.norm(b[s, s] - xx_plus_yy(2 * z)) > tol:
            raise KakError(f"block {j} of b is not exp(2iz(XX+YY)) for z={z}")
        y[s, s] = xx_plus_yy(z)
    return y


def _global_phase(g: np.ndarray) -> complex:
    return complex(np.exp(1j * np.angle(np.linalg.det(g)) / len(g)))


def kak_decompose(g, theta: CartanInvolution | None = None, subalgebra: str = H1, *,
                  ry_branch: bool = False, tol_unitary: float = TOL_UNITARY,
                  tol_group: float = TOL_GROUP) -> KakFactors:
    """Factor a unitary as ``phase * k~ @ y @ p_dagger``.

    ``k~`` and ``p_dagger`` are fixed by ``theta``; ``y`` satisfies
    ``Theta(y) = y^dag`` and lies in the exponential of the chosen subalgebra.
    A non-last axis is handled by relabelling it onto the last qubit and
    mapping the factors back.
    """
    g = as_matrix(g)
    n = int(round(np.log2(len(g))))
    if 1 << n != len(g):
        raise ValueError(f"matrix dimension {len(g)} is not a power of two")
    theta = CartanInvolution(n) if theta is None else theta
    if theta.n != n:
        raise ValueError(f"involution is for {theta.n} qubits, matrix has {n}")
    if subalgebra not in (H1, H2):
        raise ValueError(f"unknown subalgebra {subalgebra!r}")
    if not is_unitary(g, tol_unitary):
        raise KakError("input matrix is not unitary")

    g_work, canon = conjugate_by_swap_to_last(theta, g)
    phase = _global_phase(g_work)
    g_work = g_work / phase
    m2 = compute_m_squared(g_work, canon, tol_unitary)
    basis = build_symmetric_eigenbasis(m2, canon, tol_unitary, tol_group)
    ry_blocks: list[int] = []
    if subalgebra == H1:
        p, b, angles = assemble_p_h1(basis)
        y, ry_blocks = sqrt_b_h1(b, angles, ry_branch)
    else:
        p, b, angles = assemble_p_h2(basis)
        y = sqrt_b_h2(b, angles)
    p_dag = p.conj().T
    m = p @ y @ p_dag
    k_tilde = g_work @ m.conj().T @ p
    if theta.axis != n:
        back = lambda x: conjugate_by_swap_to_last(theta, x)[0]  # noqa: E731
        k_tilde, y, p_dag, b = back(k_tilde), back(y), back(p_dag), back(b)
    return KakFactors(k_tilde=k_tilde, y=y, p_dagger=p_dag, angles=angles, subalgebra=subalgebra,
                      global_phase=phase, b=b, theta=theta, ry_blocks=ry_blocks)


def y_has_subalgebra_shape(y, theta: CartanInvolution, subalgebra: str, tol: float) -> bool:
    y_c, canon = conjugate_by_swap_to_last(theta, y)
    if not satisfies_exp_m_condition(canon, y_c, tol):
        return False
    size = 2 if subalgebra == H1 else 4
    if len(y_c) % size or _block_offmass(y_c, size) > tol:
        return False
    if subalgebra == H2:
        outer = np.concatenate([y_c.diagonal()[0::4], y_c.diagonal()[3::4]])
        return float(np.linalg.norm(outer - 1)) <= tol
    return True


def verify_factors(g, theta: CartanInvolution, factors: KakFactors, tol: float = TOL_RECON) -> VerificationReport:
    """Reconstruction and membership checks; Frobenius tolerances scale with the dimension."""
    g = as_matrix(g)
    scaled = tol * len(g)
    residual = float(np.linalg.norm(g - factors.product()))
    return VerificationReport(
        residual=residual,
        k_tilde_in_exp_k=bool(np.linalg.norm(apply_theta(theta, factors.k_tilde) - factors.k_tilde) <= scaled),
        p_dagger_in_exp_k=bool(np.linalg.norm(apply_theta(theta, factors.p_dagger) - factors.p_dagger) <= scaled),
        y_shape=y_has_subalgebra_shape(factors.y, theta, factors.subalgebra, scaled),
        tol=scaled,
    )
