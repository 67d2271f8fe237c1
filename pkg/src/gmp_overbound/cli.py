"""Command-line front end.

Thin client over the library: every subcommand parses flags, validates them
through the domain types, calls one library function and prints the result
as structured text (or writes the documented CSV files).  Exit codes:
0 success, 1 verification FAIL, 2 invalid input.

The environment variable GMP_OVERBOUND_OUT, when set, overrides the output
directory of dataset-producing commands.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .experiments import (
    ExperimentConfig,
    exp_k0_sweeps,
    exp_kf_demo,
    exp_psd_curves,
    load_config,
    monte_carlo_validate,
    simulate_gmp,
    write_csv,
    write_manifest,
)
from .models import (
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
from .verify import (
    acm_bound_scan,
    check_continuous_constraints,
    default_continuous_grid,
    default_discrete_grid,
    psd_dominance_continuous,
    psd_dominance_discrete,
)

OUTDIR_ENV = "GMP_OVERBOUND_OUT"


def _fmt(value, machine: bool) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".15g" if machine else ".6g")
    return str(value)


def _emit(pairs, machine: bool) -> None:
    for key, value in pairs:
        print(f"{key}: {_fmt(value, machine)}")


def _outdir(cli_value) -> Path:
    env = os.environ.get(OUTDIR_ENV)
    if env:
        return Path(env)
    return Path(cli_value) if cli_value is not None else Path("results")


def _experiment_config(args, experiment: str) -> ExperimentConfig:
    # outdir precedence: GMP_OVERBOUND_OUT > --out > config file > default
    cli_out = getattr(args, "out", None)
    overrides = {}
    if os.environ.get(OUTDIR_ENV) or cli_out is not None:
        overrides["outdir"] = _outdir(cli_out)
    if getattr(args, "config", None):
        return load_config(args.config, experiment, **overrides)
    return ExperimentConfig(experiment=experiment, **overrides)


def _cmd_bound_continuous(args) -> int:
    interval = TauInterval(args.tau_min, args.tau_max)
    bound = continuous_bound(interval, args.sigma2)
    _emit(
        [
            ("mode", bound.mode),
            ("tau_hat", bound.tau_hat),
            ("k", bound.k),
            ("sigma_hat2", bound.k * args.sigma2),
        ],
        args.machine,
    )
    return 0


def _cmd_bound_discrete(args) -> int:
    interval = TauInterval(args.tau_min, args.tau_max)
    bound = discrete_bound(interval, SamplingSpec(args.dt))
    _emit(
        [
            ("mode", bound.mode),
            ("tau_hat_d", bound.tau_hat),
            ("k_d", bound.k),
            ("dt", args.dt),
        ],
        args.machine,
    )
    return 0


def _cmd_bound_k0(args) -> int:
    interval = TauInterval(args.tau_min, args.tau_max)
    sampling = SamplingSpec(args.dt)
    base = (
        continuous_bound(interval, 1.0)
        if args.base == "cont"
        else discrete_bound(interval, sampling)
    )
    k0 = nonstationary_k0(interval, sampling, base)
    _emit(
        [
            ("mode", "non-stationary"),
            ("tau_hat", base.tau_hat),
            ("k", base.k),
            ("k0", k0),
            ("dt", args.dt),
        ],
        args.machine,
    )
    return 0


def _cmd_psd(args) -> int:
    spec = GmpSpec(args.sigma2, args.tau)
    if args.mode == "cont":
        values = [(w, psd_continuous(w, spec)) for w in args.omega]
    else:
        if args.dt is None:
            raise ValueError("--dt is required for --mode disc")
        sampling = SamplingSpec(args.dt)
        values = [(w, psd_discrete(w, spec, sampling)) for w in args.omega]
    if args.out is not None:
        path = write_csv(Path(args.out), ["omega_rad_s", "psd"], values)
        print(f"wrote: {path}")
        return 0
    for omega, value in values:
        _emit([("omega", omega), ("psd", value)], args.machine)
    return 0


def _custom_bound(args, mode: str, dt: float | None) -> BoundModel | None:
    if (args.k is None) != (args.tau_hat is None):
        raise ValueError("--k and --tau-hat must be given together")
    if args.k is None:
        return None
    return BoundModel(tau_hat=args.tau_hat, k=args.k, mode=mode, dt=dt)


def _cmd_verify_dominance(args) -> int:
    interval = TauInterval(args.tau_min, args.tau_max)
    if args.mode == "cont":
        bound = _custom_bound(args, MODE_CONTINUOUS, None) or continuous_bound(
            interval, args.sigma2
        )
        grid = default_continuous_grid(interval, args.freq_count)
        report = psd_dominance_continuous(
            bound, interval, args.sigma2, freq_grid=grid, tau_count=args.tau_count
        )
        constraints = check_continuous_constraints(bound, interval)
        print(constraints.to_text())
    else:
        if args.dt is None:
            raise ValueError("--dt is required for --mode disc")
        sampling = SamplingSpec(args.dt)
        bound = _custom_bound(args, MODE_DISCRETE, args.dt) or discrete_bound(interval, sampling)
        grid = default_discrete_grid(sampling, args.freq_count)
        report = psd_dominance_discrete(
            bound, interval, args.sigma2, sampling, freq_grid=grid, tau_count=args.tau_count
        )
    print(report.to_text())
    return 0 if report.passed else 1


def _cmd_verify_acm(args) -> int:
    interval = TauInterval(args.tau_min, args.tau_max)
    sampling = SamplingSpec(args.dt)
    base = continuous_bound(interval, args.sigma2)
    if args.stationary:
        bound = BoundModel(tau_hat=base.tau_hat, k=base.k, mode=MODE_CONTINUOUS, dt=args.dt)
    else:
        k0 = args.k0 if args.k0 is not None else nonstationary_k0(interval, sampling, base)
        bound = BoundModel(
            tau_hat=base.tau_hat, k=base.k, mode="non-stationary", k0=k0, dt=args.dt
        )
    report = acm_bound_scan(
        bound, interval, args.sigma2, n_max=args.n_max, tau_count=args.tau_count
    )
    print(report.to_text())
    return 0 if report.passed else 1


def _cmd_demo_kf(args) -> int:
    config = _experiment_config(args, "kf_demo")
    for path in exp_kf_demo(config):
        print(f"wrote: {path}")
    return 0


def _cmd_reproduce(args) -> int:
    config = _experiment_config(args, args.experiment)
    runners = {
        "psd_curves": exp_psd_curves,
        "k0_sweeps": exp_k0_sweeps,
        "kf_demo": exp_kf_demo,
    }
    names = list(runners) if args.experiment == "all" else [args.experiment]
    for name in names:
        for path in runners[name](replace(config, experiment=name)):
            print(f"wrote: {path}")
    return 0


def _cmd_simulate_gmp(args) -> int:
    sigma0_2 = args.sigma0_2 if args.sigma0_2 is not None else args.sigma2
    realizations = simulate_gmp(
        GmpSpec(args.sigma2, args.tau),
        sigma0_2,
        SamplingSpec(args.dt),
        args.steps,
        args.seed,
        args.count,
    )
    outdir = _outdir(args.out)
    rows = []
    for index, realization in enumerate(realizations):
        for step, value in enumerate(realization.samples):
            rows.append((index, step, float(value)))
    path = write_csv(outdir / "gmp_realizations.csv", ["realization", "step", "value"], rows)
    manifest = write_manifest(
        outdir / "simulate_gmp_manifest.txt",
        {
            "experiment": "simulate_gmp",
            "tau": args.tau,
            "sigma2": args.sigma2,
            "sigma0_2": sigma0_2,
            "dt": args.dt,
            "steps": args.steps,
            "seed": args.seed,
            "count": args.count,
            "files": "gmp_realizations.csv",
        },
    )
    print(f"wrote: {path}")
    print(f"wrote: {manifest}")
    return 0


def _cmd_validate_mc(args) -> int:
    config = _experiment_config(args, "monte_carlo")
    report = monte_carlo_validate(config)
    print(report.to_text())
    if args.out is not None or os.environ.get(OUTDIR_ENV):
        outdir = _outdir(args.out)
        rows = [
            (r.check, r.at, r.analytic, r.empirical, r.std_error, r.z, r.flagged)
            for r in report.rows
        ]
        path = write_csv(
            outdir / "mc_validation.csv",
            ["check", "at", "analytic", "empirical", "std_error", "z", "flagged"],
            rows,
        )
        print(f"wrote: {path}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmp-overbound",
        description="Tight GMP overbound models, verification and experiments.",
    )
    parser.add_argument("--version", action="version", version=f"gmp-overbound {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_machine(p):
        p.add_argument("--machine", action="store_true", help="15-digit machine output")

    bound = sub.add_parser("bound", help="compute bound parameters")
    bound_sub = bound.add_subparsers(dest="kind", required=True)

    b_cont = bound_sub.add_parser("continuous", help="stationary continuous-time bound")
    b_cont.add_argument("--tau-min", type=float, required=True)
    b_cont.add_argument("--tau-max", type=float, required=True)
    b_cont.add_argument("--sigma2", type=float, default=1.0)
    add_machine(b_cont)
    b_cont.set_defaults(func=_cmd_bound_continuous)

    b_disc = bound_sub.add_parser("discrete", help="stationary discrete-time bound")
    b_disc.add_argument("--tau-min", type=float, required=True)
    b_disc.add_argument("--tau-max", type=float, required=True)
    b_disc.add_argument("--dt", type=float, required=True)
    add_machine(b_disc)
    b_disc.set_defaults(func=_cmd_bound_discrete)

    b_k0 = bound_sub.add_parser("k0", help="minimum initial inflation factor")
    b_k0.add_argument("--tau-min", type=float, required=True)
    b_k0.add_argument("--tau-max", type=float, required=True)
    b_k0.add_argument("--dt", type=float, required=True)
    b_k0.add_argument("--base", choices=("cont", "disc"), default="cont")
    add_machine(b_k0)
    b_k0.set_defaults(func=_cmd_bound_k0)

    psd = sub.add_parser("psd", help="evaluate a GMP spectral density")
    psd.add_argument("--mode", choices=("cont", "disc"), required=True)
    psd.add_argument("--tau", type=float, required=True)
    psd.add_argument("--sigma2", type=float, default=1.0)
    psd.add_argument("--dt", type=float)
    psd.add_argument("--omega", type=float, nargs="+", required=True, help="rad/s")
    psd.add_argument("--out", help="write (omega, psd) rows to a CSV file")
    add_machine(psd)
    psd.set_defaults(func=_cmd_psd)

    verify = sub.add_parser("verify", help="numerical verification scans")
    verify_sub = verify.add_subparsers(dest="kind", required=True)

    v_dom = verify_sub.add_parser("dominance", help="PSD dominance over a grid")
    v_dom.add_argument("--mode", choices=("cont", "disc"), required=True)
    v_dom.add_argument("--tau-min", type=float, required=True)
    v_dom.add_argument("--tau-max", type=float, required=True)
    v_dom.add_argument("--sigma2", type=float, default=1.0)
    v_dom.add_argument("--dt", type=float)
    v_dom.add_argument("--k", type=float, help="custom bound inflation")
    v_dom.add_argument("--tau-hat", type=float, help="custom bound time constant")
    v_dom.add_argument("--freq-count", type=int, default=1000)
    v_dom.add_argument("--tau-count", type=int, default=50)
    v_dom.set_defaults(func=_cmd_verify_dominance)

    v_acm = verify_sub.add_parser("acm", help="autocovariance-matrix ordering scan")
    v_acm.add_argument("--tau-min", type=float, required=True)
    v_acm.add_argument("--tau-max", type=float, required=True)
    v_acm.add_argument("--dt", type=float, required=True)
    v_acm.add_argument("--sigma2", type=float, default=1.0)
    v_acm.add_argument("--k0", type=float, help="override the initial inflation")
    v_acm.add_argument("--stationary", action="store_true", help="use sigma0^2 = k sigma^2")
    v_acm.add_argument("--n-max", type=int, default=200)
    v_acm.add_argument("--tau-count", type=int, default=25)
    v_acm.set_defaults(func=_cmd_verify_acm)

    demo = sub.add_parser("demo", help="run the filter demo")
    demo_sub = demo.add_subparsers(dest="kind", required=True)
    d_kf = demo_sub.add_parser("kf", help="filter demo datasets")
    d_kf.add_argument("--config", help="key = value config file")
    d_kf.add_argument("--out", help="output directory")
    d_kf.set_defaults(func=_cmd_demo_kf)

    rep = sub.add_parser("reproduce", help="regenerate figure datasets")
    rep.add_argument(
        "--experiment",
        choices=("all", "psd_curves", "k0_sweeps", "kf_demo"),
        default="all",
    )
    rep.add_argument("--config", help="key = value config file")
    rep.add_argument("--out", help="output directory")
    rep.set_defaults(func=_cmd_reproduce)

    sim = sub.add_parser("simulate", help="simulate processes")
    sim_sub = sim.add_subparsers(dest="kind", required=True)
    s_gmp = sim_sub.add_parser("gmp", help="simulate GMP realizations")
    s_gmp.add_argument("--tau", type=float, required=True)
    s_gmp.add_argument("--sigma2", type=float, default=1.0)
    s_gmp.add_argument("--sigma0-2", type=float, dest="sigma0_2")
    s_gmp.add_argument("--dt", type=float, required=True)
    s_gmp.add_argument("--steps", type=int, required=True)
    s_gmp.add_argument("--seed", type=int, required=True)
    s_gmp.add_argument("--count", type=int, required=True)
    s_gmp.add_argument("--out", help="output directory")
    s_gmp.set_defaults(func=_cmd_simulate_gmp)

    val = sub.add_parser("validate", help="Monte Carlo validation")
    val_sub = val.add_subparsers(dest="kind", required=True)
    v_mc = val_sub.add_parser("mc", help="Monte Carlo vs analytic covariances")
    v_mc.add_argument("--config", help="key = value config file")
    v_mc.add_argument("--out", help="output directory for mc_validation.csv")
    v_mc.set_defaults(func=_cmd_validate_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --version/--help/errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
