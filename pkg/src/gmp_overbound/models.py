"""Core Gauss-Markov process (GMP) types and closed-form bound parameters.

A first-order GMP is parameterized by its stationary variance sigma2 and
correlation time constant tau.  When tau is only known to lie in an interval
[tau_min, tau_max], a bounding GMP model (tau_hat, k) can be chosen so that
its power spectral density dominates the PSD of every admissible process at
every frequency.  This module provides:

* the continuous and discrete GMP spectral densities,
* the tightest stationary bound parameters in both domains,
* the minimum initial-variance inflation k0 for the non-stationary bound,
* the exact autocovariance of a non-stationary discrete GMP,
* 2x2 autocovariance-matrix blocks used by the semidefiniteness checks.

All functions are pure; all types are immutable after construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MODE_CONTINUOUS = "continuous-stationary"
MODE_DISCRETE = "discrete-stationary"
MODE_NONSTATIONARY = "non-stationary"
_MODES = (MODE_CONTINUOUS, MODE_DISCRETE, MODE_NONSTATIONARY)

__all__ = [
    "MODE_CONTINUOUS",
    "MODE_DISCRETE",
    "MODE_NONSTATIONARY",
    "GmpSpec",
    "TauInterval",
    "SamplingSpec",
    "BoundModel",
    "FrequencyGrid",
    "DiscreteGmpParams",
    "psd_continuous",
    "psd_discrete",
    "continuous_bound",
    "discrete_bound",
    "nonstationary_k0",
    "gmp_discrete_params",
    "autocov_nonstationary",
    "acm2",
    "resolve_sigma2",
]


def resolve_sigma2(sigma2) -> float:
    """Reduce a variance or a (min, max) variance interval to the value used
    for bounding.  An uncertain variance must be represented by its maximum
    for the bound to remain valid."""
    if isinstance(sigma2, (tuple, list)):
        if len(sigma2) != 2:
            raise ValueError(f"variance interval must have 2 entries, got {len(sigma2)}")
        lo, hi = float(sigma2[0]), float(sigma2[1])
        if not (0.0 <= lo <= hi):
            raise ValueError(f"invalid variance interval [{lo}, {hi}]")
        return hi
    value = float(sigma2)
    if not (value >= 0.0 and math.isfinite(value)):
        raise ValueError(f"sigma2 must be finite and >= 0, got {sigma2}")
    return value


@dataclass(frozen=True)
class GmpSpec:
    """First-order GMP: stationary variance ``sigma2`` and correlation time
    constant ``tau`` in seconds."""

    sigma2: float
    tau: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0.0):
            raise ValueError(f"sigma2 must be finite and >= 0, got {self.sigma2}")
        if not (math.isfinite(self.tau) and self.tau > 0.0):
            raise ValueError(f"tau must be finite and > 0, got {self.tau}")

    @property
    def beta(self) -> float:
        """Inverse correlation time constant 1/tau (derived, never stored)."""
        return 1.0 / self.tau


@dataclass(frozen=True)
class TauInterval:
    """Uncertainty interval [tau_min, tau_max] for the correlation time."""

    tau_min: float
    tau_max: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tau_min) and self.tau_min > 0.0):
            raise ValueError(f"tau_min must be finite and > 0, got {self.tau_min}")
        if not (math.isfinite(self.tau_max) and self.tau_max >= self.tau_min):
            raise ValueError(
                f"tau_max must be finite and >= tau_min, got tau_max={self.tau_max} "
                f"< tau_min={self.tau_min}"
            )

    @property
    def ratio(self) -> float:
        return self.tau_max / self.tau_min

    @property
    def is_degenerate(self) -> bool:
        return self.tau_min == self.tau_max


@dataclass(frozen=True)
class SamplingSpec:
    """Sampling interval ``dt`` in seconds for discrete-time models."""

    dt: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt}")

    @property
    def nyquist(self) -> float:
        """Nyquist angular frequency pi/dt in rad/s."""
        return math.pi / self.dt


@dataclass(frozen=True)
class BoundModel:
    """A bounding GMP model.

    ``tau_hat`` is the model correlation time, ``k`` the stationary variance
    inflation (model variance = k * sigma2).  ``k0`` is the optional initial
    variance inflation of the non-stationary variant; ``dt`` the sampling
    interval for bounds derived or used in discrete time.
    """

    tau_hat: float
    k: float
    mode: str
    k0: float | None = None
    dt: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if not (math.isfinite(self.tau_hat) and self.tau_hat > 0.0):
            raise ValueError(f"tau_hat must be finite and > 0, got {self.tau_hat}")
        if not (math.isfinite(self.k) and self.k >= 1.0):
            raise ValueError(f"k must be finite and >= 1, got {self.k}")
        if self.k0 is not None and not (1.0 <= self.k0 <= self.k):
            raise ValueError(f"k0 must satisfy 1 <= k0 <= k, got k0={self.k0}, k={self.k}")
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt}")

    @property
    def initial_inflation(self) -> float:
        """Inflation applied to the initial variance: k0 when present else k."""
        return self.k if self.k0 is None else self.k0

    def alpha_hat(self, dt: float | None = None) -> float:
        """One-step correlation exp(-dt/tau_hat) of the bound model."""
        step = self.dt if dt is None else dt
        if step is None:
            raise ValueError("bound carries no sampling interval; pass dt explicitly")
        return math.exp(-step / self.tau_hat)


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing grid of non-negative angular frequencies [rad/s]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-d array")
        if values[0] < 0.0:
            raise ValueError(f"frequencies must be >= 0, got {values[0]}")
        if np.any(np.diff(values) <= 0.0):
            raise ValueError("frequency grid must be strictly increasing")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    @classmethod
    def log_spaced(cls, omega_min: float, omega_max: float, count: int) -> "FrequencyGrid":
        if not (0.0 < omega_min < omega_max):
            raise ValueError(f"need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]")
        return cls(np.geomspace(omega_min, omega_max, count))

    @classmethod
    def linear_to_nyquist(cls, sampling: SamplingSpec, count: int) -> "FrequencyGrid":
        """Linear grid on [0, pi/dt] with both binding endpoints included exactly."""
        return cls(np.linspace(0.0, sampling.nyquist, count))


@dataclass(frozen=True)
class DiscreteGmpParams:
    """Exact discretization of a GMP: one-step correlation ``alpha`` and
    driving-noise variance ``q_d`` = sigma2 * (1 - alpha^2)."""

    alpha: float
    q_d: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.q_d < 0.0:
            raise ValueError(f"q_d must be >= 0, got {self.q_d}")


def psd_continuous(omega, spec: GmpSpec):
    """Two-sided PSD of a continuous-time GMP at angular frequency omega.

    S(omega) = (2 sigma2 / tau) / (omega^2 + 1/tau^2); the peak value at
    omega = 0 is 2 sigma2 tau.  Vectorized over omega; scalar in, scalar out.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("omega must be >= 0")
    beta = spec.beta
    out = 2.0 * spec.sigma2 * beta / (w * w + beta * beta)
    return float(out) if np.ndim(omega) == 0 else out


def psd_discrete(omega, spec: GmpSpec, sampling: SamplingSpec):
    """Two-sided PSD of a discrete-time GMP on [0, pi/dt].

    S_d(omega) = sigma2 dt (1 - alpha^2) / (1 + alpha^2 - 2 alpha cos(omega dt))
    with alpha = exp(-dt/tau).  Frequencies beyond the Nyquist limit pi/dt are
    rejected (tolerating float roundoff at the endpoint).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("omega must be >= 0")
    nyq = sampling.nyquist
    if np.any(w > nyq * (1.0 + 1e-12)):
        raise ValueError(f"omega beyond Nyquist limit pi/dt = {nyq}")
    alpha = math.exp(-sampling.dt / spec.tau)
    num = spec.sigma2 * sampling.dt * (1.0 - alpha * alpha)
    den = 1.0 + alpha * alpha - 2.0 * alpha * np.cos(w * sampling.dt)
    out = num / den
    return float(out) if np.ndim(omega) == 0 else out


def continuous_bound(interval: TauInterval, sigma2=1.0) -> BoundModel:
    """Tightest stationary bound in continuous time.

    Minimizing the bound variance k*sigma2 subject to the low-frequency
    constraint k*tau_hat >= tau_max and the high-frequency constraint
    k/tau_hat >= 1/tau_min gives both at equality:

        tau_hat = sqrt(tau_min * tau_max),   k = sqrt(tau_max / tau_min).

    A degenerate interval returns the exact model (k = 1) directly.  sigma2
    (a value or an uncertainty pair, reduced to its maximum) is validated but
    does not influence tau_hat or k.
    """
    resolve_sigma2(sigma2)
    if interval.is_degenerate:
        return BoundModel(tau_hat=interval.tau_min, k=1.0, mode=MODE_CONTINUOUS)
    tau_hat = math.sqrt(interval.tau_min * interval.tau_max)
    k = math.sqrt(interval.tau_max / interval.tau_min)
    return BoundModel(tau_hat=tau_hat, k=k, mode=MODE_CONTINUOUS)


def discrete_bound(interval: TauInterval, sampling: SamplingSpec) -> BoundModel:
    """Tightest stationary bound derived directly in discrete time.

    The discrete PSD constraints bind at omega -> 0 (worst case tau = tau_max)
    and omega -> pi/dt (worst case tau = tau_min).  With the half-step identity
    (1 - e^(-x)) / (1 + e^(-x)) = tanh(x/2) the equality intersection is

        k_d       = sqrt( tanh(dt / 2 tau_min) / tanh(dt / 2 tau_max) ),
        alpha_hat = (1 - x) / (1 + x),  x = sqrt( tanh(dt / 2 tau_min)
                                               * tanh(dt / 2 tau_max) ),
        tau_hat_d = -dt / ln(alpha_hat).

    As dt/tau_min -> 0 this converges to the continuous-time parameters.
    """
    dt = sampling.dt
    if interval.is_degenerate:
        return BoundModel(tau_hat=interval.tau_min, k=1.0, mode=MODE_DISCRETE, dt=dt)
    t_min = math.tanh(0.5 * dt / interval.tau_min)
    t_max = math.tanh(0.5 * dt / interval.tau_max)
    x = math.sqrt(t_min * t_max)
    if x >= 1.0:
        # only reachable when dt exceeds ~38 * tau_max; the process is white
        # at that sampling rate and the GMP bound parameterization degenerates
        raise ValueError(f"dt = {dt} too large relative to tau_max = {interval.tau_max}")
    k_d = math.sqrt(t_min / t_max)
    alpha_hat = (1.0 - x) / (1.0 + x)
    tau_hat_d = -dt / math.log(alpha_hat)
    return BoundModel(tau_hat=tau_hat_d, k=k_d, mode=MODE_DISCRETE, dt=dt)


def nonstationary_k0(interval: TauInterval, sampling: SamplingSpec, bound: BoundModel) -> float:
    """Minimum initial-variance inflation k0 for the non-stationary bound.

    The non-stationary model starts at variance k0 * sigma2 and relaxes to the
    stationary bound k * sigma2.  Ordering of the 2x2 autocovariance matrices
    (bound minus truth positive semidefinite) is most demanding at the first
    step pair (n=0, p=1) against the fastest process tau = tau_min, where the
    requirement reduces to

        k0 = num / den,
        num = k (1 - alpha_hat^2) - (1 - alpha_min^2),
        den = num - (alpha_min - alpha_hat)^2,

    with alpha_hat = exp(-dt/tau_hat), alpha_min = exp(-dt/tau_min).  The
    result does not depend on sigma2.  A degenerate interval needs no
    inflation and returns 1 exactly; intervals whose relative width is below
    float resolution are treated the same way (num and den above are pure
    cancellation there).
    """
    dt = sampling.dt
    if interval.is_degenerate:
        return 1.0
    if (interval.tau_max - interval.tau_min) / interval.tau_max < 1e-12:
        return 1.0
    # expm1 keeps the (1 - alpha^2) factors and the alpha difference fully
    # accurate when dt is small relative to the time constants
    one_minus_ah2 = -math.expm1(-2.0 * dt / bound.tau_hat)
    one_minus_am2 = -math.expm1(-2.0 * dt / interval.tau_min)
    alpha_hat = math.exp(-dt / bound.tau_hat)
    d_alpha = alpha_hat * math.expm1(dt * (1.0 / bound.tau_hat - 1.0 / interval.tau_min))
    num = bound.k * one_minus_ah2 - one_minus_am2
    den = num - d_alpha * d_alpha
    if den <= 0.0:
        raise ValueError(
            f"initial-inflation condition degenerate for dt={dt}, "
            f"interval=[{interval.tau_min}, {interval.tau_max}]"
        )
    return num / den


def gmp_discrete_params(spec: GmpSpec, sampling: SamplingSpec) -> DiscreteGmpParams:
    """Exact one-step discretization: alpha = exp(-dt/tau), q_d = sigma2 (1 - alpha^2)."""
    alpha = math.exp(-sampling.dt / spec.tau)
    q_d = spec.sigma2 * (-math.expm1(-2.0 * sampling.dt / spec.tau))
    return DiscreteGmpParams(alpha=alpha, q_d=q_d)


def autocov_nonstationary(n, p, sigma0_2: float, spec: GmpSpec, alpha: float):
    """Autocovariance E[a_n a_p] of a non-stationary discrete GMP.

    For a_n = alpha * a_(n-1) + sqrt(sigma2 (1 - alpha^2)) w_n with
    a_0 ~ N(0, sigma0_2):

        E[a_n a_p] = alpha^(n+p) sigma0_2
                     + sigma2 (1 - alpha^(2 min(n,p))) alpha^|p-n|

    which is symmetric in (n, p) and reduces to sigma2 * alpha^|p-n| for the
    stationary start sigma0_2 = sigma2 (the factored evaluation below keeps
    that reduction exact in floating point).  Vectorized over integer arrays.
    """
    if sigma0_2 < 0.0:
        raise ValueError(f"sigma0_2 must be >= 0, got {sigma0_2}")
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    n_arr = np.asarray(n)
    p_arr = np.asarray(p)
    if np.any(n_arr < 0) or np.any(p_arr < 0):
        raise ValueError("time indices must be >= 0")
    lo = np.minimum(n_arr, p_arr).astype(float)
    lag = np.abs(p_arr - n_arr).astype(float)
    out = alpha**lag * (spec.sigma2 + alpha ** (2.0 * lo) * (sigma0_2 - spec.sigma2))
    if np.ndim(n) == 0 and np.ndim(p) == 0:
        return float(out)
    return out


def acm2(n: int, p: int, bound: BoundModel, sigma2: float) -> np.ndarray:
    """2x2 autocovariance matrix of the bound model at time-index pair (n, p).

    Entries use alpha_hat = exp(-dt/tau_hat), stationary variance k * sigma2
    and initial variance k0 * sigma2 (k * sigma2 when the bound carries no
    k0).  Requires 0 <= n <= p and a sampling interval on the bound.
    """
    if not (0 <= n <= p):
        raise ValueError(f"need 0 <= n <= p, got n={n}, p={p}")
    sigma2 = resolve_sigma2(sigma2)
    a = bound.alpha_hat()
    s_inf = bound.k * sigma2
    s0 = bound.initial_inflation * sigma2
    a2n = a ** (2 * n)
    a2p = a ** (2 * p)
    r_nn = a2n * s0 + s_inf * (1.0 - a2n)
    r_pp = a2p * s0 + s_inf * (1.0 - a2p)
    r_np = a ** (n + p) * s0 + s_inf * (1.0 - a2n) * a ** (p - n)
    return np.array([[r_nn, r_np], [r_np, r_pp]])
