"""Qubitization: condition checks, the controlled-U/U^dag extension, iterates and SU(2) blocks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import BlockEncoding, SignalSpectrum, signal_operator
from .errors import ContractError, NotQubitizedError
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, is_hermitian, is_unitary

SX = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass
class QubitizedIterate:
    enc: BlockEncoding
    s_op: np.ndarray
    extended: bool
    w: np.ndarray | None = None


@dataclass
class SU2Block:
    lam: float
    block: np.ndarray
    leakage: float

    @property
    def theta(self) -> float:
        return float(np.arccos(np.clip(self.lam, -1, 1)))


def _full_s(enc: BlockEncoding, s) -> np.ndarray:
    """Lift an ancilla-only S to the full space, checking it acts trivially on the system."""
    s = as_matrix(s)
    if s.shape == (enc.ancilla_dim, enc.ancilla_dim):
        return np.kron(s, np.eye(enc.system_dim))
    if s.shape != (enc.dim, enc.dim):
        raise ContractError(f"S has shape {s.shape}")
    ns = enc.system_dim
    blocks = s.reshape(enc.ancilla_dim, ns, enc.ancilla_dim, ns)
    sa = blocks[:, 0, :, 0]
    if np.max(np.abs(s - np.kron(sa, np.eye(ns)))) > 1e-12:
        raise ContractError("S acts nontrivially on the system register")
    return s


def check_qubitized(enc: BlockEncoding, s=None, tol: float = DEFAULT_TOL.condition_tol):
    """Return (ok, r1, r2) with r1 = |<G|SU|G> - signal|, r2 = |<G|(SU)^2|G> - I|."""
    s = np.eye(enc.dim) if s is None else _full_s(enc, s)
    if not is_unitary(s, 1e-10):
        raise ContractError("S is not unitary")
    e = enc.flag_isometry()
    su = s @ enc.u
    r1 = np.linalg.norm(e.conj().T @ su @ e - signal_operator(enc), 2)
    r2 = np.linalg.norm(e.conj().T @ su @ su @ e - np.eye(enc.system_dim), 2)
    return bool(r1 <= tol and r2 <= tol), float(r1), float(r2)


def extend(enc: BlockEncoding) -> tuple[BlockEncoding, np.ndarray]:
    """|0><0| U + |1><1| U^dag with flag (|0>+|1>)/sqrt2 (x) |G> and S = X (x) I."""
    u = np.kron(np.diag([1, 0]), enc.u) + np.kron(np.diag([0, 1]), enc.u.conj().T)
    had = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    new = BlockEncoding(u, np.kron(had, enc.g_prep), enc.system_dim, enc.alpha, enc.label)
    s = np.kron(SX, np.eye(enc.dim))
    return new, s


def hermitian_qubitize(enc: BlockEncoding, tol: Tolerances = DEFAULT_TOL) -> QubitizedIterate:
    ok, _, _ = check_qubitized(enc, None, tol.condition_tol)
    if ok and is_hermitian(signal_operator(enc), tol.condition_tol):
        return QubitizedIterate(enc, np.eye(enc.dim, dtype=complex), False)
    new, s = extend(enc)
    return QubitizedIterate(new, s, True)


def reflection(enc: BlockEncoding) -> np.ndarray:
    return 2 * enc.flag_projector() - np.eye(enc.dim)


def iterate(q: QubitizedIterate, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """W = (2|G><G| (x) I - I) S U, cached on q."""
    if q.w is None:
        ok, r1, r2 = check_qubitized(q.enc, q.s_op, tol.condition_tol)
        if not ok:
            raise NotQubitizedError(f"qubitization residuals {r1:.3e}, {r2:.3e}")
        q.w = reflection(q.enc) @ q.s_op @ q.enc.u
    return q.w


def partial_reflection(enc: BlockEncoding, a: float) -> np.ndarray:
    """Z_a = (1 + e^{-ia}) |G><G| (x) I - I."""
    return (1 + np.exp(-1j * a)) * enc.flag_projector() - np.eye(enc.dim)


def phased_iterate(q: QubitizedIterate, phi: float) -> np.ndarray:
    """W_phi = Z_{phi+pi/2} W Z_{-phi-pi/2}; blocks read lam I - i g (cos phi X + sin phi Y)."""
    w = iterate(q)
    a = phi + np.pi / 2
    return partial_reflection(q.enc, a) @ w @ partial_reflection(q.enc, -a)


def su2_block(w, enc: BlockEncoding, spec: SignalSpectrum, i: int, ref=None, tol: float = 1e-9) -> SU2Block:
    """2x2 matrix of w on span{|G>|lam_i>, |G_perp>}.

    |G_perp> comes from Gram-Schmidt of ref|G lam> (ref defaults to w), so a
    phased iterate can be read in the basis fixed by the bare iterate.
    """
    w = as_matrix(w)
    ref = w if ref is None else as_matrix(ref)
    lam = float(spec.eigenvalues[i])
    gl = np.kron(enc.g, spec.vectors[:, i])
    if abs(lam) >= 1 - 1e-9:
        v = w @ gl
        top = np.vdot(gl, v)
        leak = float(np.linalg.norm(v - top * gl))
        if leak > tol:
            raise NotQubitizedError(f"leakage {leak:.3e} out of the 1-dim block")
        return SU2Block(lam, np.array([[top]]), leak)
    x = ref @ gl
    x = x - np.vdot(gl, x) * gl
    nx = np.linalg.norm(x)
    if nx < 1e-12:
        raise NotQubitizedError("degenerate complement vector")
    basis = np.column_stack([gl, x / nx])
    img = w @ basis
    blk = basis.conj().T @ img
    leak = float(np.linalg.norm(img - basis @ blk, 2))
    if leak > tol:
        raise NotQubitizedError(f"leakage {leak:.3e} out of the 2-dim block")
    return SU2Block(lam, blk, leak)


def eq3_block(lam: float) -> np.ndarray:
    g = np.sqrt(max(0.0, 1 - lam**2))
    return np.array([[lam, -g], [g, lam]], dtype=complex)


def eq7_block(lam: float, phi: float) -> np.ndarray:
    g = np.sqrt(max(0.0, 1 - lam**2))
    return np.array(
        [[lam, -1j * np.exp(-1j * phi) * g], [-1j * np.exp(1j * phi) * g, lam]], dtype=complex
    )


# ---------------------------------------------------------------- normal signals


@dataclass
class NormalIterates:
    """Alternating iterates W_{phi+} (built from U) and W_{phi-} (built from U^dag)."""

    enc: BlockEncoding

    def _w(self, u: np.ndarray, phi: float) -> np.ndarray:
        a = phi + np.pi / 2
        z = partial_reflection
        return z(self.enc, a) @ reflection(self.enc) @ u @ z(self.enc, -a)

    def plus(self, phi: float) -> np.ndarray:
        return self._w(self.enc.u, phi)

    def minus(self, phi: float) -> np.ndarray:
        return self._w(self.enc.u.conj().T, phi)

    def sequence(self, phis) -> np.ndarray:
        """W_{phi_L +} ... W_{phi_2 -} W_{phi_1 +}, odd positions use U."""
        out = np.eye(self.enc.dim, dtype=complex)
        for k, p in enumerate(phis):
            out = (self.plus(p) if k % 2 == 0 else self.minus(p)) @ out
        return out

    def eigen(self):
        """Eigenvalues c = lam e^{i theta} and eigenvectors of the normal signal."""
        from scipy.linalg import schur

        t, z = schur(signal_operator(self.enc), output="complex")
        return np.diag(t), z

    def bases(self, v: np.ndarray, c: complex):
        """(G lam, -a, -b) where U|G lam> = c|G lam> + g|a>, U^dag|G lam> = conj(c)|G lam> + g|b>."""
        gl = np.kron(self.enc.g, v)
        g = np.sqrt(max(0.0, 1 - abs(c) ** 2))
        a = (self.enc.u @ gl - c * gl) / g
        b = (self.enc.u.conj().T @ gl - np.conj(c) * gl) / g
        return gl, -a, -b


def normal_qubitize(enc: BlockEncoding, tol: float = 1e-10) -> NormalIterates:
    c = signal_operator(enc)
    if np.max(np.abs(c @ c.conj().T - c.conj().T @ c)) > tol:
        raise ContractError("signal operator is not normal")
    return NormalIterates(enc)


def normal_block(lam: float, theta: float, phi: float, sign: int) -> np.ndarray:
    g = np.sqrt(max(0.0, 1 - lam**2))
    e = np.exp(1j * sign * theta)
    return np.array(
        [[e * lam, -1j * np.exp(-1j * phi) * g], [-1j * np.exp(1j * phi) * g, np.conj(e) * lam]]
    )


def subspace_leakage(op: np.ndarray, basis: np.ndarray) -> float:
    """Norm of the part of op restricted to span(basis) that leaves the span."""
    q, _ = np.linalg.qr(basis)
    img = op @ q
    return float(np.linalg.norm(img - q @ (q.conj().T @ img), 2))


def random_normal_encoding(rng: np.random.Generator, system_dim: int = 2, ancilla_dim: int = 4):
    """Generic encoding of a random normal contraction C (|c| in [0.1, 0.9]).

    The one-qubit dilation of C is padded to ancilla_dim and sandwiched between random
    unitaries that fix the flag state, so U and U^dag send |G lam> to unrelated directions.
    Returns (encoding, C).
    """
    from .encoding import _psd_sqrt
    from .linalg import random_unitary

    if ancilla_dim < 3:
        raise ContractError("need at least 3 ancilla levels for a generic witness")
    ns = system_dim
    v = random_unitary(ns, rng)
    c = v @ np.diag(rng.uniform(0.1, 0.9, ns) * np.exp(1j * rng.uniform(-np.pi, np.pi, ns))) @ v.conj().T
    eye = np.eye(ns)
    dil = np.block([[c, _psd_sqrt(eye - c @ c.conj().T)], [_psd_sqrt(eye - c.conj().T @ c), -c.conj().T]])
    u = np.eye(ancilla_dim * ns, dtype=complex)
    u[: 2 * ns, : 2 * ns] = dil

    def mixer():
        m = np.eye(ancilla_dim, dtype=complex)
        m[1:, 1:] = random_unitary(ancilla_dim - 1, rng)
        return np.kron(m, eye)

    return BlockEncoding(mixer() @ u @ mixer(), np.eye(ancilla_dim, dtype=complex), ns), c
