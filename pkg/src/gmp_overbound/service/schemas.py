"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class IntervalParams(BaseModel):
    tau_min: float = Field(gt=0, description="lower correlation-time limit [s]")
    tau_max: float = Field(gt=0, description="upper correlation-time limit [s]")

    @model_validator(mode="after")
    def _ordered(self):
        if self.tau_max < self.tau_min:
            raise ValueError("tau_max < tau_min")
        return self


class BoundContinuousRequest(IntervalParams):
    sigma2: float = Field(default=1.0, ge=0)


class BoundDiscreteRequest(IntervalParams):
    dt: float = Field(gt=0, description="sampling interval [s]")


class K0Request(IntervalParams):
    dt: float = Field(gt=0)
    base: Literal["cont", "disc"] = "cont"


class BoundResponse(BaseModel):
    mode: str
    tau_hat: float
    k: float
    k0: float | None = None
    dt: float | None = None
    sigma_hat2: float | None = None


class PsdRequest(BaseModel):
    mode: Literal["cont", "disc"]
    tau: float = Field(gt=0)
    sigma2: float = Field(default=1.0, ge=0)
    dt: float | None = Field(default=None, gt=0)
    omega: list[float] = Field(min_length=1, description="angular frequencies [rad/s]")


class PsdResponse(BaseModel):
    omega: list[float]
    psd: list[float]


class VerifyDominanceRequest(IntervalParams):
    mode: Literal["cont", "disc"]
    sigma2: float = Field(default=1.0, ge=0)
    dt: float | None = Field(default=None, gt=0)
    k: float | None = Field(default=None, ge=1)
    tau_hat: float | None = Field(default=None, gt=0)
    freq_count: int = Field(default=1000, ge=2, le=100_000)
    tau_count: int = Field(default=50, ge=1, le=10_000)

    @model_validator(mode="after")
    def _custom_pairs(self):
        if (self.k is None) != (self.tau_hat is None):
            raise ValueError("k and tau_hat must be given together")
        if self.mode == "disc" and self.dt is None:
            raise ValueError("dt is required for mode 'disc'")
        return self


class VerifyDominanceResponse(BaseModel):
    passed: bool
    max_violation: float
    argmax_omega: float
    argmax_tau: float
    freq_count: int
    tau_count: int
    tol: float


class VerifyAcmRequest(IntervalParams):
    dt: float = Field(gt=0)
    sigma2: float = Field(default=1.0, ge=0)
    k0: float | None = Field(default=None, ge=1)
    stationary: bool = False
    n_max: int = Field(default=200, ge=1, le=2000)
    tau_count: int = Field(default=25, ge=1, le=1000)


class VerifyAcmResponse(BaseModel):
    passed: bool
    min_eigenvalue: float
    min_determinant: float
    arg_n: int
    arg_p: int
    arg_tau: float
    scale: float
    eig_tol: float
    det_tol: float
    k0_used: float | None = None


class KfDemoRequest(IntervalParams):
    sigma2: float = Field(default=1.0, ge=0)
    sigma_nu2: float = Field(default=1.0, gt=0)
    dt: float = Field(default=1.0, gt=0)
    tau_true: float = Field(default=50.0, gt=0)
    steps: int = Field(default=1000, ge=1, le=20_000)
    prior_p: float = Field(default=100.0, ge=0)
    prior_v: float = Field(default=1.0, ge=0)


class KfDemoSeries(BaseModel):
    model: str
    predicted_sigma_pos: list[float]
    true_sigma_pos: list[float]


class KfDemoResponse(BaseModel):
    dt: float
    steps: int
    series: list[KfDemoSeries]


class SimulateGmpRequest(BaseModel):
    tau: float = Field(gt=0)
    sigma2: float = Field(default=1.0, ge=0)
    sigma0_2: float | None = Field(default=None, ge=0)
    dt: float = Field(gt=0)
    steps: int = Field(ge=1)
    seed: int = 0
    count: int = Field(ge=1)

    @model_validator(mode="after")
    def _bounded_payload(self):
        if self.count * (self.steps + 1) > 2_000_000:
            raise ValueError("count * (steps + 1) must not exceed 2e6 per request")
        return self


class SimulateGmpResponse(BaseModel):
    alpha: float
    sigma0_2: float
    realizations: list[list[float]]


class McValidateRequest(IntervalParams):
    tau_min: float = Field(default=10.0, gt=0)
    tau_max: float = Field(default=100.0, gt=0)
    sigma2: float = Field(default=1.0, ge=0)
    sigma_nu2: float = Field(default=1.0, ge=0)
    dt: float = Field(default=1.0, gt=0)
    tau_true: float = Field(default=50.0, gt=0)
    horizon: int = Field(default=1000, ge=1, le=20_000)
    seed: int = 20260810
    count: int = Field(default=20000, ge=10_000, le=200_000)
    design: Literal[
        "stationary-continuous", "stationary-discrete", "non-stationary", "oracle"
    ] = "stationary-continuous"
    check_steps: list[int] = Field(default=[10, 100, 500, 1000])
    lags: list[int] = Field(default=[0, 1, 2, 5, 10])
    band: float = Field(default=4.0, gt=0)


class McRowModel(BaseModel):
    check: str
    at: int
    analytic: float
    empirical: float
    std_error: float
    z: float
    flagged: bool


class McValidateResponse(BaseModel):
    passed: bool
    count: int
    seed: int
    band: float
    rows: list[McRowModel]


class VersionResponse(BaseModel):
    name: str
    version: str
