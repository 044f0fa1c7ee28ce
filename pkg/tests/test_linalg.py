import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from hamsim.errors import CapacityError, ShapeError
from hamsim.linalg import (
    Tolerances,
    complete_unitary,
    expm_herm,
    herm_eig,
    is_hermitian,
    is_unitary,
    kron,
    kron_all,
    operator_distance,
    pauli_matrix,
    random_hermitian,
    random_unitary,
)


def _mat(seed, n):
    r = np.random.default_rng(seed)
    return r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([1, 2, 3]), st.sampled_from([1, 2]), st.sampled_from([2, 4]))
def test_kron_associative(seed, n1, n2, n3):
    a, b, c = _mat(seed, n1), _mat(seed + 1, n2), _mat(seed + 2, n3)
    lhs = kron(kron(a, b), c)
    rhs = kron(a, kron(b, c))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(lhs)))
    assert np.allclose(kron_all(a, b, c), lhs)


def test_kron_capacity():
    with pytest.raises(CapacityError):
        kron(np.eye(2**8), np.eye(2**7))


def test_non_square_is_shape_error():
    with pytest.raises(ShapeError):
        is_unitary(np.ones((2, 3)))


def test_unitarity_check(rng):
    u = random_unitary(8, rng)
    assert is_unitary(u)
    bad = u.copy()
    bad[0, 0] += 1e-6
    assert not is_unitary(bad)


def test_herm_eig_residual(rng):
    h = random_hermitian(16, rng)
    lam, v = herm_eig(h)
    assert np.all(np.diff(lam) >= 0)
    assert np.linalg.norm(h @ v - v * lam, 2) <= 1e-10 * max(1, np.linalg.norm(h, 2))


def test_herm_eig_rejects_non_hermitian(rng):
    with pytest.raises(Exception):
        herm_eig(_mat(1, 4))


def test_expm_matches_scipy(rng):
    h = random_hermitian(8, rng)
    for t in (0.0, 0.3, 5.0):
        assert operator_distance(expm_herm(h, t), scipy.linalg.expm(-1j * h * t)) <= 1e-10


def test_expm_zero_time_identity(rng):
    h = random_hermitian(4, rng)
    assert np.allclose(expm_herm(h, 0.0), np.eye(4))


def test_operator_distance_is_spectral_norm():
    a = np.diag([3.0, -1.0])
    assert operator_distance(a, np.zeros((2, 2))) == pytest.approx(3.0)
    assert operator_distance(np.eye(2), np.eye(2)) == 0.0


def test_pauli_words():
    z = pauli_matrix("Z")
    assert np.allclose(z, np.diag([1, -1]))
    xz = pauli_matrix("XZ")
    assert np.allclose(xz, np.kron(pauli_matrix("X"), z))
    assert is_hermitian(pauli_matrix("YXZ")) and is_unitary(pauli_matrix("YXZ"))


def test_complete_unitary_keeps_columns(rng):
    q, _ = np.linalg.qr(rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2)))
    u = complete_unitary(q)
    assert is_unitary(u)
    assert np.allclose(u[:, :2], q)


def test_tolerance_env(monkeypatch):
    monkeypatch.setenv("QSIM_TOL", "1e-8")
    tol = Tolerances.from_env()
    assert tol.unitarity_tol == 1e-8
