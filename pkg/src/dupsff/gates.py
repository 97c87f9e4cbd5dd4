"""Local two-qudit gates: dual-unitary family, space-time duals, folding,
Haar sampling, and Gaussian on-site disorder.

The space-time dual used everywhere is the lattice-ordered reshuffle

    dual(U)[(i,j),(k,l)] = U[(l,j),(k,i)],

an involution that maps a gate acting along the time direction to the gate
propagating along the space direction with both leg pairs in lattice order.
It differs from writing the four indices in the raw (out,in) order only by a
fixed swap on each side, so it certifies exactly the same gates as unitary
in the space direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LocalGate",
    "DisorderSpec",
    "spin_z",
    "swap_gate",
    "du_gate",
    "dual",
    "folded",
    "is_unitary",
    "is_dual_unitary",
    "haar_unitary",
    "gellmann_basis",
    "disorder_unitary",
]

DEFAULT_TOL = 1e-10


def is_unitary(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    eye = np.eye(M.shape[0])
    return (
        np.abs(M @ M.conj().T - eye).max() <= tol
        and np.abs(M.conj().T @ M - eye).max() <= tol
    )


def dual(U: np.ndarray) -> np.ndarray:
    """Space-time dual of a two-qudit gate (involutive reshuffle)."""
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("gate must be a square matrix")
    d = round(U.shape[0] ** 0.5)
    if d * d != U.shape[0]:
        raise ValueError("gate dimension must be a perfect square")
    return U.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def is_dual_unitary(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    d = round(M.shape[0] ** 0.5)
    if d * d != M.shape[0]:
        return False
    return is_unitary(M, tol) and is_unitary(dual(M), tol)


def folded(U: np.ndarray) -> np.ndarray:
    """Folded gate U^T (x) U^dagger on the doubled local space."""
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("gate must be a square matrix")
    return np.kron(U.T, U.conj().T)


@dataclass(frozen=True)
class LocalGate:
    """Two-qudit unitary with a dual-unitarity certificate."""

    d: int
    matrix: np.ndarray
    dual_unitary: bool
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        if self.matrix.shape != (self.d**2, self.d**2):
            raise ValueError("matrix must be d^2 x d^2")
        if not is_unitary(self.matrix, self.tolerance):
            raise ValueError("gate is not unitary at the stated tolerance")
        if self.dual_unitary and not is_unitary(dual(self.matrix), self.tolerance):
            raise ValueError("gate is not dual-unitary at the stated tolerance")


def spin_z(d: int) -> np.ndarray:
    """diag(-(d-1)/2, -(d-3)/2, ..., (d-1)/2)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return np.diag(np.arange(d) - (d - 1) / 2).astype(float)


def swap_gate(d: int) -> np.ndarray:
    """SWAP on two qudits: P|ij> = |ji>."""
    if d < 2:
        raise ValueError("d must be >= 2")
    P = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            P[j * d + i, i * d + j] = 1.0
    return P


def du_gate(
    d: int,
    J: float,
    u1: np.ndarray,
    u2: np.ndarray,
    u3: np.ndarray,
    u4: np.ndarray,
    tolerance: float = DEFAULT_TOL,
) -> LocalGate:
    """Dual-unitary gate (u1 x u2) P exp(iJ sz x sz) (u3 x u4), J in (0, pi]."""
    if not 0 < J <= np.pi:
        raise ValueError("J must be a non-zero coupling in (0, pi]")
    for u in (u1, u2, u3, u4):
        if not is_unitary(u, tolerance):
            raise ValueError("single-site dressings must be unitary")
    sz = np.diag(spin_z(d))
    core = np.exp(1j * J * np.outer(sz, sz).ravel())  # exp of a diagonal
    matrix = np.kron(u1, u2) @ swap_gate(d) @ (core[:, None] * np.kron(u3, u4))
    return LocalGate(d=d, matrix=matrix, dual_unitary=True, tolerance=tolerance)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the
    R-diagonal phases absorbed, which corrects the naive-QR measure bias."""
    if d < 1:
        raise ValueError("d must be >= 1")
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def gellmann_basis(d: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices: Hermitian, traceless, tr(h_a h_b) = 2 delta."""
    if d < 2:
        raise ValueError("d must be >= 2")
    basis: list[np.ndarray] = []
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            basis.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[j, k] = -1j
            asym[k, j] = 1j
            basis.append(asym)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    return basis


@dataclass(frozen=True)
class DisorderSpec:
    """Gaussian on-site disorder: angles with std ``sigma`` on an su(d) basis."""

    d: int
    sigma: float
    basis: list[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.basis is None:
            object.__setattr__(self, "basis", gellmann_basis(self.d))
        if len(self.basis) != self.d**2 - 1:
            raise ValueError("basis must have d^2 - 1 elements")
        gram = np.empty((len(self.basis),) * 2)
        for a, ha in enumerate(self.basis):
            if np.abs(ha - ha.conj().T).max() > 1e-12 or abs(np.trace(ha)) > 1e-12:
                raise ValueError("basis elements must be Hermitian and traceless")
            for b, hb in enumerate(self.basis):
                gram[a, b] = np.trace(ha.conj().T @ hb).real
        if abs(np.linalg.det(gram)) < 1e-12:
            raise ValueError("basis is not linearly independent")


def disorder_unitary(spec: DisorderSpec, rng: np.random.Generator) -> np.ndarray:
    """exp(i sum_j theta_j h_j) with theta_j ~ N(0, sigma^2), via Hermitian
    eigendecomposition of the exponent (no series truncation)."""
    thetas = rng.normal(0.0, spec.sigma, size=len(spec.basis))
    H = sum(th * h for th, h in zip(thetas, spec.basis))
    vals, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T
