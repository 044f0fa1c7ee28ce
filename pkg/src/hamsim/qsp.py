"""Phased-iterate sequences, SU(2) decompositions and QSP sequences."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as poly

from .encoding import BlockEncoding, SignalSpectrum
from .errors import ContractError
from .qubitization import QubitizedIterate, iterate, phased_iterate, su2_block

PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
AXIS = np.pi / 2
GLOBAL_PHASE = -np.pi / 2


@dataclass
class PhaseSequence:
    phases: np.ndarray
    global_phase: float = GLOBAL_PHASE
    kind: str = "qsp"

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float).ravel()
        if self.kind not in ("qsp", "observable"):
            raise ContractError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "qsp" and (self.phases.size == 0 or self.phases.size % 2):
            raise ContractError("QSP sequences need a positive even number of phases")

    def __len__(self):
        return self.phases.size


def chebyshev_block(q: QubitizedIterate, L: int) -> np.ndarray:
    """<G| W^L |G>, which equals T_L[H]."""
    w = iterate(q)
    e = q.enc.flag_isometry()
    return e.conj().T @ np.linalg.matrix_power(w, L) @ e


def observable_sequence(q: QubitizedIterate, phases: PhaseSequence | list) -> np.ndarray:
    """W_{phi_L} ... W_{phi_1}."""
    phis = phases.phases if isinstance(phases, PhaseSequence) else np.asarray(phases, float)
    out = np.eye(q.enc.dim, dtype=complex)
    for p in phis:
        out = phased_iterate(q, p) @ out
    return out


# ---------------------------------------------------------------- SU(2) decomposition


def scalar_blocks(phis, lam) -> np.ndarray:
    """Products of the 2x2 phased-iterate blocks at scalar signals lam, shape (M, 2, 2)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    g = np.sqrt(np.clip(1 - lam**2, 0, None))
    out = np.tile(np.eye(2, dtype=complex), (lam.size, 1, 1))
    for p in np.asarray(phis, float):
        b = np.empty((lam.size, 2, 2), dtype=complex)
        b[:, 0, 0] = b[:, 1, 1] = lam
        b[:, 0, 1] = -1j * np.exp(-1j * p) * g
        b[:, 1, 0] = -1j * np.exp(1j * p) * g
        out = b @ out
    return out


def pauli_coords(blocks: np.ndarray):
    """Real (a, b, c, d) with block = a I + i(b Z + c X + d Y) after removing sqrt(det)."""
    det = np.linalg.det(blocks)
    root = np.sqrt(det)
    # keep the square-root branch continuous along the sample order
    for k in range(1, root.size):
        if abs(root[k] + root[k - 1]) < abs(root[k] - root[k - 1]):
            root[k] = -root[k]
    m = blocks / root[:, None, None]
    a = (m[:, 0, 0] + m[:, 1, 1]) / 2
    b = (m[:, 0, 0] - m[:, 1, 1]) / 2j
    c = (m[:, 0, 1] + m[:, 1, 0]) / 2j
    d = (m[:, 0, 1] - m[:, 1, 0]) / 2
    return a.real, b.real, c.real, d.real, root


@dataclass
class SU2Decomposition:
    lam: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    degree: int
    coeffs: dict = field(default_factory=dict)
    parity_purity: float = 0.0

    def unitarity_residual(self) -> float:
        return float(np.max(np.abs(self.A**2 + self.B**2 + self.C**2 + self.D**2 - 1), initial=0.0))


def _wrong_parity(c: np.ndarray, parity: int) -> float:
    idx = np.arange(c.size)
    bad = c[idx % 2 != parity % 2]
    return float(np.max(np.abs(bad), initial=0.0))


def fit_decomposition(phis, degree: int | None = None) -> dict:
    """Chebyshev interpolants of A, B and of C/g, D/g on Chebyshev nodes.

    A, B have degree L; C, D carry one factor g = sqrt(1 - lam^2) times a degree L-1 polynomial.
    """
    L = len(phis) if degree is None else degree
    nodes = np.cos(np.pi * (np.arange(L + 1) + 0.5) / (L + 1))
    a, b, c, d, _ = pauli_coords(scalar_blocks(phis, nodes))
    g = np.sqrt(1 - nodes**2)
    out = {"A": cheb.chebfit(nodes, a, L), "B": cheb.chebfit(nodes, b, L)}
    if L >= 1:
        out["C"] = cheb.chebfit(nodes, c / g, L - 1)
        out["D"] = cheb.chebfit(nodes, d / g, L - 1)
    else:
        out["C"] = out["D"] = np.zeros(1)
    purity = max(_wrong_parity(out["A"], L), _wrong_parity(out["B"], L))
    if L >= 1:
        purity = max(purity, _wrong_parity(out["C"], L - 1), _wrong_parity(out["D"], L - 1))
    out["parity_purity"] = purity
    return out


def extract_ABCD(seq: np.ndarray, q: QubitizedIterate, spec: SignalSpectrum, phases=None) -> SU2Decomposition:
    """Sample (A, B, C, D) from the 2x2 blocks of ``seq`` at each non-degenerate eigenvalue."""
    w = iterate(q)
    keep = [i for i in range(len(spec)) if abs(spec.eigenvalues[i]) < 1 - 1e-9]
    # order by decreasing lam so the det branch is anchored near lam = 1
    keep.sort(key=lambda i: -spec.eigenvalues[i])
    blocks = np.array([su2_block(seq, q.enc, spec, i, ref=w).block for i in keep]).reshape(-1, 2, 2)
    lam = spec.eigenvalues[keep]
    if blocks.size:
        a, b, c, d, _ = pauli_coords(blocks)
    else:
        a = b = c = d = np.zeros(0)
    L = 0 if phases is None else len(phases)
    dec = SU2Decomposition(lam, a, b, c, d, L)
    if phases is not None:
        fit = fit_decomposition(phases.phases if isinstance(phases, PhaseSequence) else phases)
        dec.parity_purity = fit.pop("parity_purity")
        dec.coeffs = fit
    return dec


# ---------------------------------------------------------------- achievability


def _to_cheb(c, basis: str) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if basis == "chebyshev":
        return c
    if basis == "monomial":
        return cheb.poly2cheb(c)
    raise ValueError(f"unknown basis {basis!r}")


def check_achievable(A, B, L: int, basis: str = "chebyshev"):
    """Evaluate the five achievability conditions; return (ok, failed condition ids)."""
    a, b = _to_cheb(A, basis), _to_cheb(B, basis)
    failed = []
    tol = 1e-12
    deg_ok = all(np.all(np.abs(c[L + 1 :]) <= tol) for c in (a, b))
    par_ok = _wrong_parity(a, L) <= tol and _wrong_parity(b, L) <= tol
    if not (deg_ok and par_ok):
        failed.append(1)
    if abs(cheb.chebval(1.0, a) - 1) > 1e-9:
        failed.append(2)
    x = np.cos(np.pi * (np.arange(2049) + 0.5) / 2049)
    if np.max(cheb.chebval(x, a) ** 2 + cheb.chebval(x, b) ** 2) > 1 + 1e-9:
        failed.append(3)
    xs = np.logspace(0, 3, 400)
    if np.min(cheb.chebval(xs, a) ** 2 + cheb.chebval(xs, b) ** 2) < 1 - 1e-9:
        failed.append(4)
    if L % 2 == 0:
        xi = 1j * np.concatenate([[0.0], np.logspace(-4, 3, 400)])
        val = (cheb.chebval(xi, a) ** 2 + cheb.chebval(xi, b) ** 2).real
        if np.min(val) < 1 - 1e-9:
            failed.append(5)
    return not failed, failed


# ---------------------------------------------------------------- QSP


def rz(phi: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def qsp_sequence(
    q: QubitizedIterate, phases: PhaseSequence | list, phi_axis: float = AXIS, Phi: float = GLOBAL_PHASE
) -> np.ndarray:
    """prod_k V^dag_{phi_{k+1}+pi} V_{phi_k} on control b (x) iterate space."""
    if not isinstance(phases, PhaseSequence):
        phases = PhaseSequence(phases, Phi)
    phis = phases.phases
    if phis.size % 2:
        raise ContractError("QSP sequences need an even number of phases")
    u = np.exp(1j * Phi) * phased_iterate(q, phi_axis)
    dim = u.shape[0]
    pp, pm = np.outer(PLUS, PLUS.conj()), np.outer(MINUS, MINUS.conj())

    def v(phi):
        r = rz(phi)
        return np.kron(r @ pp @ r.conj().T, np.eye(dim)) + np.kron(r @ pm @ r.conj().T, u)

    out = np.eye(2 * dim, dtype=complex)
    for k in range(0, phis.size, 2):
        out = v(phis[k + 1] + np.pi).conj().T @ v(phis[k]) @ out
    return out


def qsp_project(v: np.ndarray, enc: BlockEncoding, psi) -> tuple[np.ndarray, float]:
    """Project the control on |+> and the flag on |G>; returns (system state, success probability)."""
    psi = np.asarray(psi, dtype=complex)
    dim = enc.dim
    x = np.kron(PLUS, np.kron(enc.g, psi))
    y = v @ x
    yb = np.kron(PLUS.conj(), np.eye(dim)) @ y
    out = np.kron(enc.g.conj()[None, :], np.eye(enc.system_dim)) @ yb
    return out, float(np.vdot(yb, yb).real)


def projected_block(v: np.ndarray, enc: BlockEncoding) -> np.ndarray:
    """<+|<G| v |G>|+> as a system operator."""
    e = np.kron(PLUS[:, None], enc.flag_isometry())
    return e.conj().T @ v @ e
