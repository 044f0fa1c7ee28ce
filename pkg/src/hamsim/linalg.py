"""Dense complex kernels and brute-force reference oracles."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ContractError, ShapeError

MAX_DIM = 2**14


@dataclass(frozen=True)
class Tolerances:
    unitarity_tol: float = 1e-10
    condition_tol: float = 1e-10
    eig_residual_tol: float = 1e-10

    def __post_init__(self):
        for k in ("unitarity_tol", "condition_tol", "eig_residual_tol"):
            if not getattr(self, k) > 0:
                raise ValueError(f"{k} must be positive")

    @classmethod
    def from_env(cls) -> "Tolerances":
        tol = os.environ.get("QSIM_TOL")
        if tol is None:
            return cls()
        v = float(tol)
        return cls(v, v, v)


DEFAULT_TOL = Tolerances()


def as_matrix(a) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    return a


def check_capacity(dim: int, max_dim: int = MAX_DIM) -> None:
    if dim > max_dim:
        raise CapacityError(f"dimension {dim} exceeds capacity {max_dim}")


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product; (i*rb + k, j*cb + l) -> a[i,j] b[k,l]."""
    a, b = as_matrix(a), as_matrix(b)
    if a.size == 0 or b.size == 0:
        raise ShapeError("empty operand")
    check_capacity(max(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), max_dim)
    return np.kron(a, b)


def kron_all(*ops, max_dim: int = MAX_DIM) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = kron(out, op, max_dim=max_dim)
    return out


def _square(a) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected square matrix, got {a.shape}")
    return a


def is_unitary(a, tol: float = DEFAULT_TOL.unitarity_tol) -> bool:
    a = _square(a)
    dev = a.conj().T @ a - np.eye(a.shape[0])
    return bool(np.max(np.abs(dev), initial=0.0) <= tol)


def is_hermitian(a, tol: float = DEFAULT_TOL.condition_tol) -> bool:
    a = _square(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def herm_eig(h, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix."""
    h = _square(h)
    if not is_hermitian(h, tol.condition_tol):
        raise ContractError("matrix is not Hermitian within tolerance")
    hs = 0.5 * (h + h.conj().T)
    lam, v = np.linalg.eigh(hs)
    resid = np.linalg.norm(hs @ v - v * lam, axis=0)
    scale = max(1.0, float(np.max(np.abs(lam), initial=0.0)))
    if resid.size and resid.max() > tol.eig_residual_tol * scale:
        raise ContractError(f"eigen residual {resid.max():.3e} above tolerance")
    return lam, v


def expm_herm(h, t: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Reference e^{-iht} through the spectral decomposition."""
    lam, v = herm_eig(h, tol)
    return (v * np.exp(-1j * lam * t)) @ v.conj().T


def operator_distance(a, b) -> float:
    """Spectral norm of a - b."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a - b, 2))


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(word: str) -> np.ndarray:
    return kron_all(*(PAULI[c] for c in word))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


def complete_unitary(cols: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full unitary."""
    cols = np.asarray(cols, dtype=complex)
    n, k = cols.shape
    if k == n:
        return cols.copy()
    # project the identity onto the complement, then orthonormalize
    comp = np.eye(n, dtype=complex) - cols @ cols.conj().T
    u, s, _ = np.linalg.svd(comp)
    return np.hstack([cols, u[:, : n - k]])
