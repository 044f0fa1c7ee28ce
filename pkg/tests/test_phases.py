import numpy as np
import pytest

from conftest import random_pauli
from hamsim.encoding import lcu_encode, raw_encode, signal_operator, spectrum
from hamsim.errors import ContractError
from hamsim.phases import (
    REFERENCE_PHASES,
    ScalarModel,
    eval_fourier,
    identity_phases,
    qsp_blocks,
    scalar_response,
    solve_phases,
    target_fourier,
    theta_grid,
    verify_phases,
)
from hamsim.planner import truncation_error
from hamsim.qsp import PLUS, PhaseSequence, qsp_sequence
from hamsim.qubitization import hermitian_qubitize, iterate


def test_target_zero_time():
    a, c = target_fourier(0.0, 4)
    assert a[0] == 1 and not a[1:].any() and not c.any()


@pytest.mark.parametrize("t,N", [(0.0707, 2), (2.0, 8), (7.3957, 32)])
def test_target_truncation(t, N):
    a, c = target_fourier(t, N)
    th = theta_grid(4096)
    dev = np.max(np.abs(eval_fourier(a, c, th) - np.exp(1j * t * np.sin(th))))
    assert dev <= truncation_error(t, 1 + N // 2) * (1 + 1e-9) + 1e-15


def test_target_parseval():
    for t in (0.5, 3.0, 10.0):
        a, c = target_fourier(t, 16)
        # squared norm of the truncated series: a_0^2 + (a_k^2 + c_k^2)/2
        energy = a[0] ** 2 + 0.5 * np.sum(a[1:] ** 2 + c[1:] ** 2)
        assert energy <= 1 + truncation_error(t, 9)


def test_target_needs_even_order():
    with pytest.raises(ContractError):
        target_fourier(1.0, 3)


def test_identity_sequence_exact():
    assert verify_phases(PhaseSequence([0.0, -np.pi]), 0.0) <= 1e-15


def test_grid_must_be_sorted():
    with pytest.raises(ContractError):
        ScalarModel(np.array([0.1, 0.0]))


def test_grid_env(monkeypatch):
    monkeypatch.setenv("QSIM_THETA_GRID", "64")
    assert ScalarModel().theta_grid.size == 64


@pytest.mark.parametrize("key", sorted(REFERENCE_PHASES))
def test_grid_refinement_stable(key):
    t, ph = REFERENCE_PHASES[key]
    e1 = verify_phases(ph, t, ScalarModel(theta_grid(1024)))
    e2 = verify_phases(ph, t, ScalarModel(theta_grid(2048)))
    assert abs(e2 - e1) <= 0.1 * e1


def test_scalar_model_matches_full_matrix(rng):
    for _ in range(4):
        enc = lcu_encode(random_pauli(rng, n=2, k=4))
        q = hermitian_qubitize(enc)
        w = iterate(q)
        phis = rng.uniform(-np.pi, np.pi, 6)
        t = float(rng.uniform(0.1, 2.0))
        v = qsp_sequence(q, phis)
        spec = spectrum(signal_operator(q.enc))
        full, thetas = 0.0, []
        for i in range(len(spec)):
            lam = spec.eigenvalues[i]
            if abs(lam) >= 1 - 1e-9:
                continue
            gl = np.kron(q.enc.g, spec.vectors[:, i])
            x = w @ gl - np.vdot(gl, w @ gl) * gl
            basis = np.column_stack([gl, x / np.linalg.norm(x)])
            e = np.kron(PLUS[:, None], basis)
            blk = e.conj().T @ v @ e
            full = max(full, np.linalg.norm(blk - np.exp(-1j * t * lam) * np.eye(2), 2))
            thetas.append(np.arccos(lam))
        scalar = verify_phases(phis, t, ScalarModel(np.unique(thetas)))
        assert abs(full - scalar) <= 1e-9


def test_solver_zero_time():
    rep = solve_phases(0.0, 1e-3)
    assert rep.converged and rep.max_error <= 1e-15
    assert np.allclose(rep.phases.phases, identity_phases(2))


def test_solver_small_time():
    rep = solve_phases(0.0707, 1e-2)
    assert rep.converged and rep.max_error <= 1e-2
    assert np.all(rep.phases.phases >= -np.pi) and np.all(rep.phases.phases < np.pi)
    assert rep.csv_row().startswith(f"{rep.N},")


def test_solver_deterministic():
    a = solve_phases(1.3, 1e-4, seed=3)
    b = solve_phases(1.3, 1e-4, seed=3)
    assert a.csv_row() == b.csv_row()
    assert np.array_equal(a.phases.phases, b.phases.phases)


def test_solver_reverifies_on_full_matrix():
    # rebuild V from scratch on a diagonal signal whose eigenvalues sample theta
    rep = solve_phases(2.5, 1e-3)
    lam = np.cos(np.linspace(0.05, np.pi - 0.05, 24))
    c = np.diag(lam)
    s = np.diag(np.sqrt(1 - lam**2))
    enc = raw_encode(np.block([[c, s], [s, -c]]), 2)
    q = hermitian_qubitize(enc)
    v = qsp_sequence(q, rep.phases)
    e = np.kron(PLUS[:, None], q.enc.flag_isometry())
    blk = e.conj().T @ v @ e
    assert np.linalg.norm(blk - np.diag(np.exp(-2.5j * lam)), 2) <= 1e-3


def test_solver_reports_failure():
    rep = solve_phases(20.0, 1e-6, N=4, restarts=1, starts=("zeros", "random"))
    assert not rep.converged and rep.max_error > 1e-6


def test_solver_rejects_bad_eps():
    with pytest.raises(ContractError):
        solve_phases(1.0, 0.0)


def test_kernel_matches_literal_blocks(rng):
    phis = rng.uniform(-np.pi, np.pi, 8)
    model = ScalarModel(theta_grid(128))
    blk = qsp_blocks(phis, model)
    # G-slot average of the two branches w = Phi -/+ theta
    th = model.theta_grid
    f1 = scalar_response(phis, model.global_phase - th)
    f2 = scalar_response(phis, model.global_phase + th)
    assert np.allclose(blk[:, 0, 0], (f1 + f2) / 2, atol=1e-12)
