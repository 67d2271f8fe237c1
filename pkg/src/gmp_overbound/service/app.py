"""FastAPI service wrapping the core package.

Run with:  uvicorn gmp_overbound.service.app:app
Domain validation errors surface as HTTP 400 with a one-line diagnostic;
schema violations are FastAPI's standard 422.
"""
from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..experiments import ExperimentConfig, monte_carlo_validate, simulate_gmp
from ..kf import TruthSpec, run_demo_suite
from ..models import (
    MODE_CONTINUOUS,
    MODE_DISCRETE,
    BoundModel,
    GmpSpec,
    SamplingSpec,
    TauInterval,
    continuous_bound,
    discrete_bound,
    nonstationary_k0,
    psd_continuous,
    psd_discrete,
)
from ..verify import (
    acm_bound_scan,
    default_continuous_grid,
    default_discrete_grid,
    psd_dominance_continuous,
    psd_dominance_discrete,
)
from . import schemas

app = FastAPI(
    title="gmp-overbound",
    version=__version__,
    description=(
        "Provably tight Gauss-Markov overbound models for linear estimators "
        "with uncertain error correlation time, plus numerical verification "
        "and covariance-analysis experiments."
    ),
)


@app.exception_handler(ValueError)
async def _domain_error(_: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/version", response_model=schemas.VersionResponse)
def version() -> schemas.VersionResponse:
    return schemas.VersionResponse(name="gmp-overbound", version=__version__)


@app.post("/bound/continuous", response_model=schemas.BoundResponse)
def bound_continuous(req: schemas.BoundContinuousRequest) -> schemas.BoundResponse:
    bound = continuous_bound(TauInterval(req.tau_min, req.tau_max), req.sigma2)
    return schemas.BoundResponse(
        mode=bound.mode, tau_hat=bound.tau_hat, k=bound.k, sigma_hat2=bound.k * req.sigma2
    )


@app.post("/bound/discrete", response_model=schemas.BoundResponse)
def bound_discrete(req: schemas.BoundDiscreteRequest) -> schemas.BoundResponse:
    bound = discrete_bound(TauInterval(req.tau_min, req.tau_max), SamplingSpec(req.dt))
    return schemas.BoundResponse(mode=bound.mode, tau_hat=bound.tau_hat, k=bound.k, dt=bound.dt)


@app.post("/bound/k0", response_model=schemas.BoundResponse)
def bound_k0(req: schemas.K0Request) -> schemas.BoundResponse:
    interval = TauInterval(req.tau_min, req.tau_max)
    sampling = SamplingSpec(req.dt)
    base = (
        continuous_bound(interval, 1.0) if req.base == "cont" else discrete_bound(interval, sampling)
    )
    k0 = nonstationary_k0(interval, sampling, base)
    return schemas.BoundResponse(
        mode="non-stationary", tau_hat=base.tau_hat, k=base.k, k0=k0, dt=req.dt
    )


@app.post("/psd", response_model=schemas.PsdResponse)
def psd(req: schemas.PsdRequest) -> schemas.PsdResponse:
    spec = GmpSpec(req.sigma2, req.tau)
    if req.mode == "cont":
        values = [psd_continuous(w, spec) for w in req.omega]
    else:
        if req.dt is None:
            raise ValueError("dt is required for mode 'disc'")
        sampling = SamplingSpec(req.dt)
        values = [psd_discrete(w, spec, sampling) for w in req.omega]
    return schemas.PsdResponse(omega=req.omega, psd=values)


@app.post("/verify/dominance", response_model=schemas.VerifyDominanceResponse)
def verify_dominance(req: schemas.VerifyDominanceRequest) -> schemas.VerifyDominanceResponse:
    interval = TauInterval(req.tau_min, req.tau_max)
    if req.mode == "cont":
        bound = (
            BoundModel(tau_hat=req.tau_hat, k=req.k, mode=MODE_CONTINUOUS)
            if req.k is not None
            else continuous_bound(interval, req.sigma2)
        )
        report = psd_dominance_continuous(
            bound,
            interval,
            req.sigma2,
            freq_grid=default_continuous_grid(interval, req.freq_count),
            tau_count=req.tau_count,
        )
    else:
        sampling = SamplingSpec(req.dt)
        bound = (
            BoundModel(tau_hat=req.tau_hat, k=req.k, mode=MODE_DISCRETE, dt=req.dt)
            if req.k is not None
            else discrete_bound(interval, sampling)
        )
        report = psd_dominance_discrete(
            bound,
            interval,
            req.sigma2,
            sampling,
            freq_grid=default_discrete_grid(sampling, req.freq_count),
            tau_count=req.tau_count,
        )
    return schemas.VerifyDominanceResponse(
        passed=report.passed,
        max_violation=report.max_violation,
        argmax_omega=report.argmax[0],
        argmax_tau=report.argmax[1],
        freq_count=report.grid_sizes[0],
        tau_count=report.grid_sizes[1],
        tol=report.tol,
    )


@app.post("/verify/acm", response_model=schemas.VerifyAcmResponse)
def verify_acm(req: schemas.VerifyAcmRequest) -> schemas.VerifyAcmResponse:
    interval = TauInterval(req.tau_min, req.tau_max)
    sampling = SamplingSpec(req.dt)
    base = continuous_bound(interval, req.sigma2)
    if req.stationary:
        bound = BoundModel(tau_hat=base.tau_hat, k=base.k, mode=MODE_CONTINUOUS, dt=req.dt)
        k0_used = None
    else:
        k0_used = req.k0 if req.k0 is not None else nonstationary_k0(interval, sampling, base)
        bound = BoundModel(
            tau_hat=base.tau_hat, k=base.k, mode="non-stationary", k0=k0_used, dt=req.dt
        )
    report = acm_bound_scan(bound, interval, req.sigma2, n_max=req.n_max, tau_count=req.tau_count)
    return schemas.VerifyAcmResponse(
        passed=report.passed,
        min_eigenvalue=report.min_eigenvalue,
        min_determinant=report.min_determinant,
        arg_n=report.arg[0],
        arg_p=report.arg[1],
        arg_tau=report.arg[2],
        scale=report.scale,
        eig_tol=report.eig_tol,
        det_tol=report.det_tol,
        k0_used=k0_used,
    )


@app.post("/demo/kf", response_model=schemas.KfDemoResponse)
def demo_kf(req: schemas.KfDemoRequest) -> schemas.KfDemoResponse:
    suite = run_demo_suite(
        TauInterval(req.tau_min, req.tau_max),
        SamplingSpec(req.dt),
        TruthSpec(req.tau_true, req.sigma2, req.sigma_nu2),
        req.steps,
        prior_p=req.prior_p,
        prior_v=req.prior_v,
    )
    series = [
        schemas.KfDemoSeries(
            model=name,
            predicted_sigma_pos=[float(v) for v in traces.predicted_sigma_pos],
            true_sigma_pos=[float(v) for v in traces.true_sigma_pos],
        )
        for name, traces in suite.items()
    ]
    return schemas.KfDemoResponse(dt=req.dt, steps=req.steps, series=series)


@app.post("/simulate/gmp", response_model=schemas.SimulateGmpResponse)
def simulate_gmp_endpoint(req: schemas.SimulateGmpRequest) -> schemas.SimulateGmpResponse:
    sigma0_2 = req.sigma0_2 if req.sigma0_2 is not None else req.sigma2
    realizations = simulate_gmp(
        GmpSpec(req.sigma2, req.tau),
        sigma0_2,
        SamplingSpec(req.dt),
        req.steps,
        req.seed,
        req.count,
    )
    alpha = realizations[0].alpha
    return schemas.SimulateGmpResponse(
        alpha=alpha,
        sigma0_2=sigma0_2,
        realizations=[[float(v) for v in r.samples] for r in realizations],
    )


@app.post("/validate/mc", response_model=schemas.McValidateResponse)
def validate_mc(req: schemas.McValidateRequest) -> schemas.McValidateResponse:
    config = ExperimentConfig(
        experiment="monte_carlo",
        tau_min=req.tau_min,
        tau_max=req.tau_max,
        sigma2=req.sigma2,
        sigma_nu2=req.sigma_nu2,
        dt=req.dt,
        tau_true=req.tau_true,
        horizon=req.horizon,
        seed=req.seed,
        count=req.count,
        mc_design=req.design,
        mc_check_steps=tuple(req.check_steps),
        mc_lags=tuple(req.lags),
        mc_band=req.band,
    )
    report = monte_carlo_validate(config)
    rows = [
        schemas.McRowModel(
            check=r.check,
            at=r.at,
            analytic=r.analytic,
            empirical=r.empirical,
            std_error=r.std_error,
            z=r.z if math.isfinite(r.z) else math.copysign(1e308, r.z),
            flagged=r.flagged,
        )
        for r in report.rows
    ]
    return schemas.McValidateResponse(
        passed=report.passed, count=report.count, seed=report.seed, band=report.band, rows=rows
    )
