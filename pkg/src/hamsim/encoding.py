"""Block-encodings <G|U|G> = H/alpha from Pauli sums, sparse matrices and purified densities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, NormalizationError
from .linalg import (
    DEFAULT_TOL,
    MAX_DIM,
    Tolerances,
    as_matrix,
    check_capacity,
    complete_unitary,
    herm_eig,
    is_hermitian,
    is_unitary,
    pauli_matrix,
)


def next_pow2(k: int) -> int:
    return 1 << max(0, int(k - 1).bit_length())


@dataclass
class BlockEncoding:
    """Unitary ``u`` on ancilla (x) system with flag state ``g_prep[:, 0]``.

    Index convention is ancilla-major: ``a * system_dim + s``.
    """

    u: np.ndarray
    g_prep: np.ndarray
    system_dim: int
    alpha: float = 1.0
    label: str = ""

    def __post_init__(self):
        self.u = as_matrix(self.u)
        self.g_prep = as_matrix(self.g_prep)
        if self.u.shape != (self.dim, self.dim):
            raise ContractError(f"u has shape {self.u.shape}, expected {(self.dim, self.dim)}")

    @property
    def ancilla_dim(self) -> int:
        return self.g_prep.shape[0]

    @property
    def dim(self) -> int:
        return self.ancilla_dim * self.system_dim

    @property
    def g(self) -> np.ndarray:
        return self.g_prep[:, 0]

    def flag_isometry(self) -> np.ndarray:
        """|G> (x) I_system as a (dim, system_dim) matrix."""
        return np.kron(self.g[:, None], np.eye(self.system_dim))

    def flag_projector(self) -> np.ndarray:
        e = self.flag_isometry()
        return e @ e.conj().T

    def validate(self, tol: float = DEFAULT_TOL.unitarity_tol) -> dict:
        sig = signal_operator(self)
        res = {
            "u_unitary": is_unitary(self.u, tol),
            "g_prep_unitary": is_unitary(self.g_prep, tol),
            "signal_norm": float(np.linalg.norm(sig, 2)) if sig.size else 0.0,
        }
        res["ok"] = res["u_unitary"] and res["g_prep_unitary"] and res["signal_norm"] <= 1 + 1e-9
        return res


def signal_operator(enc: BlockEncoding) -> np.ndarray:
    """(<G| (x) I) u (|G> (x) I)."""
    e = enc.flag_isometry()
    return e.conj().T @ enc.u @ e


def state_prep(amps: np.ndarray) -> np.ndarray:
    """A unitary whose first column is the normalized vector ``amps``."""
    amps = np.asarray(amps, dtype=complex)
    return complete_unitary(amps[:, None] / np.linalg.norm(amps))


# ---------------------------------------------------------------- LCU


@dataclass
class PauliDecomposition:
    terms: list[tuple[float, str]]

    def __post_init__(self):
        if not self.terms:
            raise ContractError("empty Pauli term list")
        self.terms = [(float(c), w.upper()) for c, w in self.terms]
        lens = {len(w) for _, w in self.terms}
        if len(lens) != 1 or 0 in lens:
            raise ContractError("Pauli strings must share one nonzero length")
        words = [w for _, w in self.terms]
        if len(set(words)) != len(words):
            raise ContractError("duplicate Pauli strings")
        if any(set(w) - set("IXYZ") for w in words):
            raise ContractError("Pauli strings must be words over IXYZ")
        if self.alpha <= 0:
            raise ContractError("sum of |coefficients| must be positive")

    @property
    def n(self) -> int:
        return len(self.terms[0][1])

    @property
    def alpha(self) -> float:
        return float(sum(abs(c) for c, _ in self.terms))

    def matrix(self) -> np.ndarray:
        return sum(c * pauli_matrix(w) for c, w in self.terms)

    def without_identity(self) -> "PauliDecomposition":
        return PauliDecomposition([(c, w) for c, w in self.terms if set(w) != {"I"}])


def lcu_encode(p: PauliDecomposition, max_dim: int = MAX_DIM) -> BlockEncoding:
    """Select/prepare encoding; negative coefficients fold into the selected unitary."""
    ns = 2**p.n
    d = next_pow2(len(p.terms))
    check_capacity(d * ns, max_dim)
    amps = np.zeros(d)
    u = np.zeros((d * ns, d * ns), dtype=complex)
    for j in range(d):
        blk = slice(j * ns, (j + 1) * ns)
        if j < len(p.terms):
            c, w = p.terms[j]
            amps[j] = np.sqrt(abs(c) / p.alpha)
            u[blk, blk] = np.sign(c) * pauli_matrix(w) if c != 0 else pauli_matrix(w)
        else:
            u[blk, blk] = np.eye(ns)
    return BlockEncoding(u, state_prep(amps), ns, p.alpha)


# ---------------------------------------------------------------- sparse


@dataclass
class SparseHamiltonian:
    """Row-sparse Hermitian matrix with entry and column-index lookups."""

    h: np.ndarray
    d: int | None = None

    def __post_init__(self):
        self.h = as_matrix(self.h)
        dim = self.h.shape[0]
        if self.h.shape != (dim, dim) or dim & (dim - 1):
            raise ContractError("sparse input must be a 2^n square matrix")
        if not is_hermitian(self.h):
            raise ContractError("sparse input is not Hermitian")
        nnz = max(int(np.count_nonzero(r)) for r in self.h)
        if self.d is None:
            self.d = max(1, nnz)
        if nnz > self.d:
            raise ContractError(f"row with {nnz} nonzeros exceeds sparsity {self.d}")

    @property
    def n(self) -> int:
        return self.h.shape[0].bit_length() - 1

    @property
    def h_max(self) -> float:
        return float(np.max(np.abs(self.h)))

    def entry(self, j: int, k: int) -> complex:
        return complex(self.h[j, k])

    def col_index(self, j: int, l: int) -> int:
        """l-th nonzero column of row j; padded slots take unused columns."""
        return self._cols(j)[l]

    def _cols(self, j: int) -> list[int]:
        nz = [int(k) for k in np.flatnonzero(self.h[j])]
        free = [k for k in range(self.h.shape[0]) if k not in nz]
        return nz + free[: self.d - len(nz)]


def sparse_encode(s: SparseHamiltonian, max_dim: int = MAX_DIM) -> BlockEncoding:
    """u = T2^dag T1 on registers a1 (two qubits) (x) a2 (2^n) (x) system.

    T1|0,0,j> = |psi_j>, T2|0,0,k> = |chi_k>, both completed to unitaries, so
    <chi_k|psi_j> = H_kj / (d h_max). The remainder branches of psi and chi sit
    on different a1 levels (1 and 2) so they never overlap.
    """
    ns = 2**s.n
    na = 4 * ns
    check_capacity(na * ns, max_dim)
    hm = s.h_max
    scale = hm if hm > 0 else 1.0
    d = s.d
    dim = na * ns

    def idx(a1, a2, sys):
        return (a1 * ns + a2) * ns + sys

    psi = np.zeros((dim, ns), dtype=complex)
    chi = np.zeros((dim, ns), dtype=complex)
    for j in range(ns):
        for k in s._cols(j):
            w = s.entry(k, j) / scale
            psi[idx(0, k, j), j] = np.sqrt(w + 0j) / np.sqrt(d)
            psi[idx(1, k, j), j] = np.sqrt(max(0.0, 1.0 - abs(w))) / np.sqrt(d)
            chi[idx(0, j, k), j] = np.conj(np.sqrt(w.conjugate() + 0j)) / np.sqrt(d)
            chi[idx(2, j, k), j] = np.sqrt(max(0.0, 1.0 - abs(w))) / np.sqrt(d)
    # the |0,0,j> slots are the first ns basis states, so completion keeps them in place
    t1 = complete_unitary(psi)
    t2 = complete_unitary(chi)
    return BlockEncoding(t2.conj().T @ t1, np.eye(na, dtype=complex), ns, d * hm)


# ---------------------------------------------------------------- purified density


@dataclass
class PurifiedDensity:
    weights: np.ndarray
    states: np.ndarray  # (J, 2^n), rows are |chi_j>

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=complex))
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1) > 1e-12:
            raise ContractError("weights must be non-negative and sum to 1")
        if self.states.shape[0] != self.weights.size:
            raise ContractError("one state per weight required")
        dim = self.states.shape[1]
        if dim & (dim - 1):
            raise ContractError("state dimension must be a power of two")
        norms = np.linalg.norm(self.states, axis=1)
        if np.any(np.abs(norms - 1) > 1e-10):
            raise ContractError("purifier states must be normalized")

    @property
    def n(self) -> int:
        return self.states.shape[1].bit_length() - 1

    def rho(self) -> np.ndarray:
        return (self.states.T * self.weights) @ self.states.conj()


def purify_encode(p: PurifiedDensity, max_dim: int = MAX_DIM) -> BlockEncoding:
    """|G> = sum_j sqrt(a_j)|j>_{a1}|chi_j>_{a2}; u swaps a2 with the system."""
    ns = 2**p.n
    nj = next_pow2(p.weights.size)
    check_capacity(nj * ns * ns, max_dim)
    g = np.zeros((nj, ns), dtype=complex)
    g[: p.weights.size] = np.sqrt(p.weights)[:, None] * p.states
    swap = np.zeros((ns * ns, ns * ns))
    a, b = np.meshgrid(np.arange(ns), np.arange(ns), indexing="ij")
    swap[(b * ns + a).ravel(), (a * ns + b).ravel()] = 1.0
    u = np.kron(np.eye(nj), swap)
    return BlockEncoding(u, state_prep(g.ravel()), ns, 1.0)


# ---------------------------------------------------------------- dense dilation


def dilation_encode(a, max_dim: int = MAX_DIM) -> BlockEncoding:
    """One-qubit unitary dilation of a/alpha with alpha the spectral norm."""
    a = as_matrix(a)
    ns = a.shape[0]
    check_capacity(2 * ns, max_dim)
    alpha = float(np.linalg.norm(a, 2))
    c = a / alpha if alpha > 0 else a
    eye = np.eye(ns)
    left = _psd_sqrt(eye - c @ c.conj().T)
    right = _psd_sqrt(eye - c.conj().T @ c)
    u = np.block([[c, left], [right, -c.conj().T]])
    return BlockEncoding(u, np.eye(2, dtype=complex), ns, alpha if alpha > 0 else 1.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(lam, 0, None))) @ v.conj().T


def raw_encode(u, ancilla_dim: int) -> BlockEncoding:
    """Wrap a user-given unitary with |G> = |0> on the ancilla."""
    u = as_matrix(u)
    if u.shape[0] % ancilla_dim:
        raise ContractError("ancilla dimension does not divide the matrix size")
    return BlockEncoding(u, np.eye(ancilla_dim, dtype=complex), u.shape[0] // ancilla_dim)


# ---------------------------------------------------------------- spectrum


@dataclass
class SignalSpectrum:
    eigenvalues: np.ndarray
    g: np.ndarray
    vectors: np.ndarray
    phases: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.phases is None:
            self.phases = np.zeros_like(self.eigenvalues)

    def __len__(self):
        return self.eigenvalues.size


def spectrum(h, tol: Tolerances = DEFAULT_TOL) -> SignalSpectrum:
    h = as_matrix(h)
    nrm = float(np.linalg.norm(h, 2)) if h.size else 0.0
    if nrm > 1 + 1e-9:
        raise NormalizationError(f"signal spectral norm {nrm:.12g} exceeds 1")
    lam, v = herm_eig(h, tol)
    lam = np.clip(lam, -1.0, 1.0)
    return SignalSpectrum(lam, np.sqrt(np.maximum(0.0, 1 - lam**2)), v)
