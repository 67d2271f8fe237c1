"""Discrete-time Kalman filter covariance machinery.

Provides the design-model Riccati recursion (covariances and gain schedule),
the three-state demo system (initial position, constant velocity, augmented
colored-noise state), and the true estimation-error covariance of a filter
whose gains come from a possibly mismatched design model while the actual
colored noise is a GMP with a specific time constant.

Covariances are propagated in Joseph form and re-symmetrized every step; the
worst relative asymmetry observed before re-symmetrization is recorded on the
returned trace.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np

from .models import (
    BoundModel,
    SamplingSpec,
    TauInterval,
    continuous_bound,
    discrete_bound,
    gmp_discrete_params,
    GmpSpec,
    nonstationary_k0,
)

__all__ = [
    "LinearModel",
    "GainSchedule",
    "CovarianceTrace",
    "TruthSpec",
    "DemoTraces",
    "build_example_lds",
    "riccati_run",
    "true_error_covariance",
    "demo_design_params",
    "run_demo_suite",
    "DEMO_MODEL_NAMES",
]

DEMO_MODEL_NAMES = (
    "stationary-continuous",
    "stationary-discrete",
    "non-stationary",
    "oracle",
)

_PSD_SLACK = 1e-10  # relative eigenvalue slack when validating input covariances


def _check_symmetric_psd(m: np.ndarray, name: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(m).max()))):
        raise ValueError(f"{name} must be symmetric")
    eig = np.linalg.eigvalsh(0.5 * (m + m.T))
    scale = max(float(np.trace(m)), 1.0)
    if eig[0] < -_PSD_SLACK * scale:
        raise ValueError(f"{name} must be positive semidefinite, min eigenvalue {eig[0]}")


@dataclass
class LinearModel:
    """Discrete-time linear dynamic system with a scalar measurement.

    ``h`` maps the step index n (first measurement at n = 1, time n * dt) to
    the observation row; the demo system's row is time-varying.
    """

    phi: np.ndarray
    h: Callable[[int], np.ndarray]
    q: np.ndarray
    r: float
    p0: np.ndarray

    def __post_init__(self) -> None:
        self.phi = np.asarray(self.phi, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        self.p0 = np.asarray(self.p0, dtype=float)
        if self.phi.ndim != 2 or self.phi.shape[0] != self.phi.shape[1]:
            raise ValueError(f"phi must be square, got shape {self.phi.shape}")
        n = self.phi.shape[0]
        _check_symmetric_psd(self.q, "q")
        _check_symmetric_psd(self.p0, "p0")
        if self.q.shape != (n, n) or self.p0.shape != (n, n):
            raise ValueError("phi, q, p0 dimensions are inconsistent")
        if not self.r > 0.0:
            raise ValueError(f"r must be > 0, got {self.r}")
        row = np.asarray(self.h(1), dtype=float)
        if row.shape != (n,):
            raise ValueError(f"h(n) must return a length-{n} row, got shape {row.shape}")

    @property
    def state_dim(self) -> int:
        return self.phi.shape[0]


@dataclass(frozen=True)
class GainSchedule:
    """Gain vectors per step; ``gains[i]`` is applied at step i + 1."""

    gains: np.ndarray  # (horizon, state_dim)

    def __post_init__(self) -> None:
        gains = np.asarray(self.gains, dtype=float)
        if gains.ndim != 2:
            raise ValueError(f"gains must be 2-d (steps x state), got shape {gains.shape}")
        object.__setattr__(self, "gains", gains)

    @property
    def horizon(self) -> int:
        return self.gains.shape[0]

    def at_step(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.horizon:
            raise ValueError(f"step {n} outside schedule horizon {self.horizon}")
        return self.gains[n - 1]


@dataclass(frozen=True)
class CovarianceTrace:
    """Time-indexed covariance matrices; index 0 is the initial covariance.

    ``entries[n]`` is the post-update covariance after step n.  ``priors``,
    when present, holds the corresponding pre-update (time-propagated)
    covariances.  ``max_asymmetry`` is the worst relative asymmetry seen
    before re-symmetrization during the run.
    """

    entries: np.ndarray  # (steps + 1, s, s)
    labels: tuple[str, ...]
    max_asymmetry: float = 0.0
    priors: np.ndarray | None = None

    def __len__(self) -> int:
        return self.entries.shape[0]

    def variance(self, label: str) -> np.ndarray:
        i = self.labels.index(label)
        return self.entries[:, i, i]

    def sigma(self, label: str) -> np.ndarray:
        return np.sqrt(self.variance(label))


@dataclass(frozen=True)
class TruthSpec:
    """Actual error process: a stationary GMP driving the augmented state
    plus white measurement noise.  ``sigma0_xi2`` overrides the initial
    variance of the colored state; None means stationary (= sigma_xi2)."""

    tau_true: float
    sigma_xi2: float
    sigma_nu2: float
    sigma0_xi2: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tau_true) and self.tau_true > 0.0):
            raise ValueError(f"tau_true must be finite and > 0, got {self.tau_true}")
        if self.sigma_xi2 < 0.0:
            raise ValueError(f"sigma_xi2 must be >= 0, got {self.sigma_xi2}")
        if not self.sigma_nu2 >= 0.0:
            raise ValueError(f"sigma_nu2 must be >= 0, got {self.sigma_nu2}")
        if self.sigma0_xi2 is not None and self.sigma0_xi2 < 0.0:
            raise ValueError(f"sigma0_xi2 must be >= 0, got {self.sigma0_xi2}")

    @property
    def initial_xi_variance(self) -> float:
        return self.sigma_xi2 if self.sigma0_xi2 is None else self.sigma0_xi2


def build_example_lds(
    model_tau: float,
    model_sigma_xi2: float,
    model_sigma0_2: float,
    sigma_nu2: float,
    sampling: SamplingSpec,
    prior_p: float = 100.0,
    prior_v: float = 1.0,
) -> LinearModel:
    """Three-state demo system: state (p0, v, xi).

    p0 and v are random constants (initial position, constant velocity); xi
    is the augmented colored measurement-error state with first-order
    dynamics alpha = exp(-dt/model_tau) and driving variance
    model_sigma_xi2 * (1 - alpha^2).  The measurement at step n (time n*dt)
    is z_n = p0 + v * n * dt + xi_n + white noise.

    ``model_sigma_xi2`` is the model's stationary variance of xi (inflated
    for bound models); ``model_sigma0_2`` its initial variance.
    """
    if min(model_sigma_xi2, model_sigma0_2, prior_p, prior_v) < 0.0:
        raise ValueError("variances must be >= 0")
    if not sigma_nu2 > 0.0:
        raise ValueError(f"sigma_nu2 must be > 0, got {sigma_nu2}")
    dt = sampling.dt
    if model_sigma_xi2 > 0.0:
        params = gmp_discrete_params(GmpSpec(model_sigma_xi2, model_tau), sampling)
        alpha, q_d = params.alpha, params.q_d
    else:
        alpha, q_d = math.exp(-dt / model_tau), 0.0
    return LinearModel(
        phi=np.diag([1.0, 1.0, alpha]),
        h=lambda n: np.array([1.0, n * dt, 1.0]),
        q=np.diag([0.0, 0.0, q_d]),
        r=sigma_nu2,
        p0=np.diag([prior_p, prior_v, model_sigma0_2]),
    )


def _record_asymmetry(m: np.ndarray, worst: float) -> float:
    scale = max(float(np.abs(m).max()), 1e-300)
    return max(worst, float(np.abs(m - m.T).max()) / scale)


def riccati_run(model: LinearModel, steps: int) -> tuple[CovarianceTrace, GainSchedule]:
    """Standard covariance recursion of the filter designed on ``model``.

    Per step: time update P <- phi P phi' + q, then Joseph-form measurement
    update with gain K = P h' / (h P h' + r).  Returns the pre-update and
    post-update covariance per step plus the gain schedule.  Raises when the
    innovation variance is not positive (broken model).
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    s = model.state_dim
    eye = np.eye(s)
    updated = np.empty((steps + 1, s, s))
    priors = np.empty((steps + 1, s, s))
    gains = np.empty((steps, s))
    p_cov = model.p0.copy()
    updated[0] = p_cov
    priors[0] = p_cov
    worst_asym = 0.0
    for n in range(1, steps + 1):
        p_cov = model.phi @ p_cov @ model.phi.T + model.q
        worst_asym = _record_asymmetry(p_cov, worst_asym)
        p_cov = 0.5 * (p_cov + p_cov.T)
        priors[n] = p_cov
        row = np.asarray(model.h(n), dtype=float)
        innovation_var = float(row @ p_cov @ row) + model.r
        if innovation_var <= 0.0:
            raise ValueError(f"innovation variance {innovation_var} <= 0 at step {n}")
        gain = p_cov @ row / innovation_var
        ikh = eye - np.outer(gain, row)
        p_cov = ikh @ p_cov @ ikh.T + model.r * np.outer(gain, gain)
        worst_asym = _record_asymmetry(p_cov, worst_asym)
        p_cov = 0.5 * (p_cov + p_cov.T)
        updated[n] = p_cov
        gains[n - 1] = gain
    labels = ("p0", "v", "xi")[:s] if s <= 3 else tuple(f"x{i}" for i in range(s))
    trace = CovarianceTrace(updated, labels, worst_asym, priors=priors)
    return trace, GainSchedule(gains)


def true_error_covariance(
    design: LinearModel,
    gains: GainSchedule,
    truth: TruthSpec,
    sampling: SamplingSpec,
    steps: int,
    truth_prior: np.ndarray | None = None,
) -> CovarianceTrace:
    """Actual estimation-error covariance of the replayed gain schedule.

    The truth state evolves with Phi_true = diag(1, 1, alpha_true) and
    Q_true = diag(0, 0, sigma_xi2 (1 - alpha_true^2)); the estimate follows
    x_hat_n = (I - K_n h_n) Phi_design x_hat_(n-1) + K_n z_n with x_hat_0 = 0
    and z_n the truth measurement.  The joint covariance of (x, e) with
    e = x_hat - x follows the induced linear recursion; the error block is
    returned restricted to the common (p0, v) states.

    The truth prior defaults to the design priors for (p0, v) and the
    stationary truth variance for xi (consistent initialization).
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if gains.horizon < steps:
        raise ValueError(f"gain schedule horizon {gains.horizon} < steps {steps}")
    if design.state_dim != 3:
        raise ValueError("true_error_covariance expects the 3-state demo structure")
    dt = sampling.dt
    alpha_true = math.exp(-dt / truth.tau_true)
    phi_true = np.diag([1.0, 1.0, alpha_true])
    q_true = np.zeros((3, 3))
    q_true[2, 2] = truth.sigma_xi2 * (-math.expm1(-2.0 * dt / truth.tau_true))
    if truth_prior is None:
        p_t0 = np.diag([design.p0[0, 0], design.p0[1, 1], truth.initial_xi_variance])
    else:
        p_t0 = np.asarray(truth_prior, dtype=float)
        _check_symmetric_psd(p_t0, "truth_prior")
        if p_t0.shape != (3, 3):
            raise ValueError(f"truth_prior must be 3x3, got {p_t0.shape}")

    # joint second moment of (x, e); with x_hat_0 = 0 the error e_0 = -x_0
    joint = np.zeros((6, 6))
    joint[:3, :3] = p_t0
    joint[:3, 3:] = -p_t0
    joint[3:, :3] = -p_t0
    joint[3:, 3:] = p_t0
    phi_diff = design.phi - phi_true

    entries = np.empty((steps + 1, 2, 2))
    entries[0] = joint[3:5, 3:5]
    worst_asym = 0.0
    eye3 = np.eye(3)
    noise_cov = np.zeros((4, 4))
    noise_cov[:3, :3] = q_true
    noise_cov[3, 3] = truth.sigma_nu2
    transition = np.zeros((6, 6))
    gain_map = np.zeros((6, 4))
    gain_map[:3, :3] = eye3
    for n in range(1, steps + 1):
        row = np.asarray(design.h(n), dtype=float)
        gain = gains.at_step(n)
        ikh = eye3 - np.outer(gain, row)
        transition[:3, :3] = phi_true
        transition[3:, :3] = ikh @ phi_diff
        transition[3:, 3:] = ikh @ design.phi
        gain_map[3:, :3] = -ikh
        gain_map[3:, 3] = gain
        joint = transition @ joint @ transition.T + gain_map @ noise_cov @ gain_map.T
        worst_asym = _record_asymmetry(joint, worst_asym)
        joint = 0.5 * (joint + joint.T)
        entries[n] = joint[3:5, 3:5]
    return CovarianceTrace(entries, ("p0", "v"), worst_asym)


@dataclass(frozen=True)
class DemoTraces:
    """Position-sigma traces of one demo model: the filter-reported value and
    the actual estimation-error value, both post-update, index 0 = initial."""

    predicted_sigma_pos: np.ndarray
    true_sigma_pos: np.ndarray
    bound: BoundModel | None  # None for the truth-matched oracle


def demo_design_params(
    name: str, interval: TauInterval, sampling: SamplingSpec, truth: TruthSpec
) -> tuple[float, float, float]:
    """(tau, stationary xi variance, initial xi variance) of a built-in demo
    design model, all in the filter's inflated units."""
    sigma2 = truth.sigma_xi2
    if name == "stationary-continuous":
        bound = continuous_bound(interval, sigma2)
        return bound.tau_hat, bound.k * sigma2, bound.k * sigma2
    if name == "stationary-discrete":
        bound = discrete_bound(interval, sampling)
        return bound.tau_hat, bound.k * sigma2, bound.k * sigma2
    if name == "non-stationary":
        bound = continuous_bound(interval, sigma2)
        k0 = nonstationary_k0(interval, sampling, bound)
        return bound.tau_hat, bound.k * sigma2, k0 * sigma2
    if name == "oracle":
        return truth.tau_true, sigma2, truth.initial_xi_variance
    raise ValueError(f"unknown demo model {name!r}; expected one of {DEMO_MODEL_NAMES}")


def run_demo_suite(
    interval: TauInterval,
    sampling: SamplingSpec,
    truth: TruthSpec,
    steps: int,
    prior_p: float = 100.0,
    prior_v: float = 1.0,
    extra_models: Mapping[str, BoundModel] | None = None,
) -> dict[str, DemoTraces]:
    """Run the demo for the three bound models and the truth-matched oracle.

    Bound models: stationary-continuous, stationary-discrete and the
    non-stationary variant of the continuous bound; the oracle filter knows
    tau_true.  ``extra_models`` is a plug-in slot for externally supplied
    comparison bounds, run through the same machinery.
    """
    sigma2 = truth.sigma_xi2
    cont = continuous_bound(interval, sigma2)
    disc = discrete_bound(interval, sampling)
    k0 = nonstationary_k0(interval, sampling, cont)
    non_stat = BoundModel(
        tau_hat=cont.tau_hat, k=cont.k, mode="non-stationary", k0=k0, dt=sampling.dt
    )
    bound_of = {
        "stationary-continuous": cont,
        "stationary-discrete": disc,
        "non-stationary": non_stat,
        "oracle": None,
    }
    configs: dict[str, tuple[float, float, float, BoundModel | None]] = {
        name: (*demo_design_params(name, interval, sampling, truth), bound_of[name])
        for name in DEMO_MODEL_NAMES
    }
    for name, model in (extra_models or {}).items():
        if name in configs:
            raise ValueError(f"extra model name {name!r} collides with a built-in model")
        configs[name] = (
            model.tau_hat,
            model.k * sigma2,
            model.initial_inflation * sigma2,
            model,
        )

    out: dict[str, DemoTraces] = {}
    for name, (tau, xi2, xi0_2, bound) in configs.items():
        design = build_example_lds(tau, xi2, xi0_2, truth.sigma_nu2, sampling, prior_p, prior_v)
        trace, gains = riccati_run(design, steps)
        true_trace = true_error_covariance(design, gains, truth, sampling, steps)
        out[name] = DemoTraces(
            predicted_sigma_pos=trace.sigma("p0"),
            true_sigma_pos=true_trace.sigma("p0"),
            bound=bound,
        )
    return out
