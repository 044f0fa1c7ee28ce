"""Jacobi-Anger truncation, query planning and the comparison cost formulas."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, jv

from .encoding import PauliDecomposition
from .errors import DomainError
from .linalg import check_capacity, expm_herm, operator_distance, pauli_matrix

MAX_T = 1e4
MAX_N = 10**6


def bessel_j(k, t):
    """J_k(t) for integer k >= 0 (vectorized)."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > MAX_T):
        raise DomainError(f"|t| above {MAX_T:g} is outside the supported range")
    out = jv(k, t)
    return float(out) if np.ndim(out) == 0 else out


def upper_bound(t: float, q: int) -> float:
    """4 t^q / (2^q q!), evaluated in log space."""
    if q < 1:
        raise DomainError("q must be >= 1")
    if t == 0:
        return 0.0
    if q <= 170 and t < 1e3:
        return 4.0 * t**q / (2.0**q * math.factorial(q))
    with np.errstate(over="ignore"):
        return float(np.exp(np.log(4.0) + q * np.log(t / 2.0) - gammaln(q + 1)))


def _log_bound(t: float, k: np.ndarray) -> np.ndarray:
    return np.log(4.0) + k * np.log(t / 2.0) - gammaln(k + 1)


def _tail_terms(t: float, q: int, rel: float = 1e-18) -> np.ndarray:
    """2|J_k(t)| for k = q, q+1, ... up to the stop index where the analytic tail bound
    falls below rel times the running sum."""
    if t == 0:
        return np.zeros(1)
    t = abs(t)
    bessel_j(0, t)  # range check
    chunk = max(64, int(t))
    terms = []
    start = q
    total = 0.0
    while True:
        k = np.arange(start, start + chunk)
        v = 2 * np.abs(jv(k, t))
        terms.append(v)
        total += v.sum()
        lb = _log_bound(t, k)
        ok = np.flatnonzero((k > t / 2) & (lb < np.log(rel * total) if total > 0 else lb < -745))
        if ok.size:
            stop = ok[0]
            terms[-1] = v[: stop + 1]
            return np.concatenate(terms)
        start += chunk


def truncation_error(t: float, q: int) -> float:
    """sum_{k >= q} 2 |J_k(t)|."""
    if q < 1:
        raise DomainError("q must be >= 1")
    return float(_tail_terms(t, q).sum())


@dataclass
class JacobiAngerPlan:
    t: float
    eps: float
    N: int
    q: int
    coefficients: np.ndarray = field(repr=False)
    truncation_error: float
    upper_bound: float


def plan_queries(t: float, eps: float) -> JacobiAngerPlan:
    """Smallest even N with truncation_error(t, 1 + N/2) <= eps/8."""
    if t < 0 or not 0 < eps < 1:
        raise DomainError("need t >= 0 and 0 < eps < 1")
    thr = eps / 8
    terms = _tail_terms(t, 1)
    # suffix sums give the tail from every q at once
    tails = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]])
    q = 2
    while q < tails.size and tails[q - 1] > thr:
        q += 1
    if q >= tails.size:
        q = max(2, tails.size)
    N = 2 * (q - 1)
    if N > MAX_N:
        raise DomainError(f"planned N={N} exceeds {MAX_N}")
    ks = np.arange(q + 1)
    return JacobiAngerPlan(
        t, eps, N, q, bessel_j(ks, t) if t else (ks == 0).astype(float),
        truncation_error(t, q), upper_bound(t, q),
    )


def frontier_time(N: int, thr: float) -> float:
    """The t at which truncation_error(t, 1 + N/2) reaches thr."""
    from scipy.optimize import brentq

    q = 1 + N // 2
    hi = 1.0
    while truncation_error(hi, q) <= thr:
        hi *= 2
    return float(brentq(lambda s: truncation_error(s, q) - thr, 0.0, hi, xtol=1e-13, rtol=1e-14))


# ---------------------------------------------------------------- comparison formulas


def bcks_queries(t: float, eps: float) -> tuple[int, int, int]:
    """(K, r, 3 K r) with r = ceil(t / log 2) and the smallest K whose
    (log 2)^k / k! tail beyond K is at most eps / r."""
    if t <= 0 or not 0 < eps < 1:
        raise DomainError("need t > 0 and 0 < eps < 1")
    r = math.ceil(t / math.log(2))
    ln2 = math.log(2)
    k = np.arange(1, 200)
    terms = np.exp(k * np.log(ln2) - gammaln(k + 1))
    # tail[K] = sum_{k > K} terms; add from the small end for accuracy
    tail = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]])
    K = int(np.flatnonzero(tail <= eps / r)[0])
    return K, r, 3 * K * r


def trotter_first_order_steps(d: int, t: float, hmax: float, eps: float) -> int:
    if min(d, t, hmax, eps) <= 0:
        raise DomainError("all arguments must be positive")
    return math.ceil((d * t * hmax) ** 2 / (2 * eps))


def trotter_suzuki_bound(d: int, t: float, hmax: float, eps: float) -> float:
    x = d * t * hmax / eps
    if x <= 1:
        raise DomainError("d t hmax / eps must exceed 1")
    return 2 * d**2 * t * hmax * math.exp(2 * math.sqrt(math.log(5) * math.log(x)))


def exact_trotter_error(terms: PauliDecomposition, t: float, n: int) -> float:
    """Spectral norm of (prod_j e^{-i H_j t/n})^n - e^{-iHt}."""
    dim = 2**terms.n
    check_capacity(dim, 2**12)
    step = np.eye(dim, dtype=complex)
    for c, w in terms.terms:
        step = expm_herm(c * pauli_matrix(w), t / n) @ step
    return operator_distance(np.linalg.matrix_power(step, n), expm_herm(terms.matrix(), t))


def qsp_gate_estimate(d: int, alpha: float, t: float) -> float:
    return 6.0 * d * alpha * t


def trotter_exact_steps(terms: PauliDecomposition, t: float, eps: float, n_max: int = 1 << 40) -> int:
    """Smallest n with exact_trotter_error <= eps (doubling then bisection)."""
    if exact_trotter_error(terms, t, 1) <= eps:
        return 1
    lo, hi = 1, 2
    while exact_trotter_error(terms, t, hi) > eps:
        lo, hi = hi, hi * 2
        if hi > n_max:
            raise DomainError("Trotter step search exceeded its cap")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if exact_trotter_error(terms, t, mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi
