"""Independent reference implementations used to freeze expected values.

These deliberately avoid the closed forms under test: the autocovariance
oracles build the process from its defining recursion, and the discrete
bound oracle intersects the two PSD constraints by bisection.
"""
from __future__ import annotations

import math

import numpy as np


def autocov_recursion_matrix(sigma0_2: float, sigma2: float, alpha: float, n_max: int) -> np.ndarray:
    """Exact covariance matrix C[n, m] = E[a_n a_m] for n, m <= n_max,
    propagated entry by entry from the one-step recursion
    a_n = alpha a_(n-1) + sqrt(sigma2 (1 - alpha^2)) w_n."""
    size = n_max + 1
    cov = np.empty((size, size))
    cov[0, 0] = sigma0_2
    q = sigma2 * (1.0 - alpha * alpha)
    for n in range(1, size):
        # new sample vs all older ones: the innovation is independent of them
        for m in range(n):
            cov[n, m] = alpha * cov[n - 1, m]
            cov[m, n] = cov[n, m]
        cov[n, n] = alpha * alpha * cov[n - 1, n - 1] + q
    return cov


def autocov_coefficients(n: int, p: int, sigma0_2: float, sigma2: float, alpha: float) -> float:
    """E[a_n a_p] via the explicit expansion of a_n over (a_0, w_1, ..):
    a_n = alpha^n a_0 + sqrt(sigma2 (1 - alpha^2)) * sum_i alpha^(n-i) w_i."""
    m = max(n, p)
    scale = math.sqrt(sigma2 * (1.0 - alpha * alpha))

    def coeffs(idx: int) -> np.ndarray:
        c = np.zeros(m + 1)
        c[0] = alpha**idx
        for i in range(1, idx + 1):
            c[i] = scale * alpha ** (idx - i)
        return c

    variances = np.ones(m + 1)
    variances[0] = sigma0_2
    return float(np.sum(coeffs(n) * coeffs(p) * variances))


def discrete_bound_intersection(tau_min: float, tau_max: float, dt: float) -> tuple[float, float]:
    """(k_d, tau_hat_d) from the two discrete PSD constraints, located by
    bisection on the model's one-step correlation a_hat.

    Constraint 1 (omega -> 0):     k_d >= (1 + a_max)(1 - a_hat) / ((1 - a_max)(1 + a_hat))
    Constraint 2 (omega -> pi/dt): k_d >= (1 - a_min)(1 + a_hat) / ((1 + a_min)(1 - a_hat))

    The first is decreasing and the second increasing in a_hat, so the
    minimum feasible k_d sits at their unique crossing.
    """
    a_min = math.exp(-dt / tau_min)
    a_max = math.exp(-dt / tau_max)

    def c1(a_hat: float) -> float:
        return (1.0 + a_max) * (1.0 - a_hat) / ((1.0 - a_max) * (1.0 + a_hat))

    def c2(a_hat: float) -> float:
        return (1.0 - a_min) * (1.0 + a_hat) / ((1.0 + a_min) * (1.0 - a_hat))

    lo, hi = 1e-12, 1.0 - 1e-12
    assert c1(lo) - c2(lo) > 0.0 and c1(hi) - c2(hi) < 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if c1(mid) - c2(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    a_hat = 0.5 * (lo + hi)
    k_d = 0.5 * (c1(a_hat) + c2(a_hat))
    return k_d, -dt / math.log(a_hat)


def min_k0_by_psd_bisection(
    tau_hat: float, k: float, tau: float, dt: float, n: int, p: int
) -> float:
    """Smallest k0 making (bound ACM - truth ACM) at (n, p) positive
    semidefinite, found by bisection over an eigenvalue test."""
    a_hat = math.exp(-dt / tau_hat)
    a = math.exp(-dt / tau)

    def ordered(k0: float) -> bool:
        s0 = k0
        r_nn = a_hat ** (2 * n) * s0 + k * (1.0 - a_hat ** (2 * n))
        r_pp = a_hat ** (2 * p) * s0 + k * (1.0 - a_hat ** (2 * p))
        r_np = a_hat ** (n + p) * s0 + k * (1.0 - a_hat ** (2 * n)) * a_hat ** (p - n)
        diff = np.array(
            [[r_nn - 1.0, r_np - a ** (p - n)], [r_np - a ** (p - n), r_pp - 1.0]]
        )
        return float(np.linalg.eigvalsh(diff)[0]) >= 0.0

    lo, hi = 0.0, k
    assert ordered(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ordered(mid):
            hi = mid
        else:
            lo = mid
    return hi
