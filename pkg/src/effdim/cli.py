"""Command-line front end.

Subcommands: location | regression | curve | approx | shrinkage | oracle.
Reports are JSON (fixed key order, 17-significant-digit floats) except for
curves, which default to plot-ready CSV. Every numeric result carries a
computation-path tag: closed-form, mc, or bound. Identical configs and seeds
produce byte-identical output files; ``--threads`` is an execution hint that
never changes results.

Exit codes: 0 success, 2 invalid configuration or input, 3 numerical
failure, 4 contract violation under a strict flag (--require-domination).
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .approx import GaussianDistribution, audit_approximation
from .dimension import (
    LocationModel,
    RidgeModel,
    deff,
    deff_rank_bound,
    location_mi,
    regression_mi,
    ridge_report,
)
from .errors import EffdimError, InputError, NumericalError
from .oracle import (
    estimate_channel_mi,
    estimate_gaussian_kl,
    estimate_mixture_marginal_mi,
)
from .channel import GaussianChannel
from .priors import (
    FixedScale,
    HalfCauchy,
    InverseGammaMixture,
    ScalarShrinkageModel,
    TabulatedPrior,
)
from .reportio import (
    format_float,
    read_matrix_csv,
    read_vector_csv,
    render_report,
    tagged,
    tagged_mc,
)
from .shrinkage import (
    chain_decomposition,
    expected_conditional_mi,
    heavy_tail_bound,
    jensen_bound,
    random_deff_distribution,
)

SCHEMA = "effdim/report-v1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONTRACT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effdim",
        description="Effective dimension and information functionals of Bayesian experiments.",
    )
    parser.add_argument("--version", action="version", version=f"effdim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, mc=False):
        p.add_argument("--out", help="output file path (default: stdout)")
        p.add_argument("--format", choices=["json", "csv"], help="output format")
        if mc:
            p.add_argument("--seed", type=int, help="master seed (fallback: EFFDIM_SEED)")
            p.add_argument("--samples", type=int, default=100_000,
                           help="Monte Carlo sample count")
            p.add_argument("--threads", type=int, default=1,
                           help="execution hint; never changes results")

    p = sub.add_parser("location", help="Gaussian location model")
    p.add_argument("--d", type=int, default=1, help="parameter dimension")
    p.add_argument("--tau2", type=float, required=True, help="prior variance")
    p.add_argument("--sigma2", type=float, required=True, help="noise variance")
    p.add_argument("--n", type=int, required=True, help="sample size (>= 3)")
    p.add_argument("--oracle", action="store_true",
                   help="append a Monte Carlo cross-check of the closed form")
    add_common(p, mc=True)

    p = sub.add_parser("regression", help="linear regression with a CSV design")
    p.add_argument("--design", required=True, help="design matrix CSV path")
    p.add_argument("--tau2", type=float, required=True)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--n", type=int, help="effective sample size (default: design rows)")
    add_common(p)

    p = sub.add_parser("curve", help="d_eff versus n, as plot-ready CSV")
    p.add_argument("--n-grid", required=True,
                   help="comma-separated sample sizes, strictly increasing, all >= 3")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--tau2", type=float)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--tau2-schedule", choices=["fixed", "inverse-n"], default="fixed",
                   help="inverse-n scales the prior variance as tau2/n")
    p.add_argument("--design", help="design CSV: emit the regression d_eff curve instead")
    add_common(p)

    p = sub.add_parser("approx", help="covariance-inflation audit of an approximate posterior")
    p.add_argument("--exact-cov", required=True)
    p.add_argument("--approx-cov", required=True)
    p.add_argument("--prior-cov", required=True)
    p.add_argument("--exact-mean", help="CSV vector (default: zeros)")
    p.add_argument("--approx-mean", help="CSV vector (default: zeros)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--require-domination", action="store_true",
                   help="exit 4 if the approximate covariance does not dominate")
    add_common(p)

    p = sub.add_parser("shrinkage", help="global-local shrinkage summaries and bounds")
    p.add_argument("--prior", choices=["fixed", "student-t", "half-cauchy", "tabulated"],
                   required=True)
    p.add_argument("--tau", type=float, help="fixed prior scale")
    p.add_argument("--nu", type=float, help="student-t degrees of freedom")
    p.add_argument("--s2", type=float, default=1.0, help="student-t scale squared")
    p.add_argument("--tau-g", type=float, default=1.0, help="half-Cauchy global scale")
    p.add_argument("--table", help="CSV vector of tabulated scales")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--decompose", action="store_true",
                   help="append the nested chain-rule decomposition")
    p.add_argument("--inner-samples", type=int, default=10_000)
    add_common(p, mc=True)

    p = sub.add_parser("oracle", help="run a Monte Carlo oracle directly")
    p.add_argument("--kind", choices=["channel-mi", "gaussian-kl", "mixture-mi"],
                   required=True)
    p.add_argument("--a", help="forward map CSV (channel-mi)")
    p.add_argument("--prior-cov", help="prior covariance CSV")
    p.add_argument("--noise-cov", help="noise covariance CSV (channel-mi)")
    p.add_argument("--mean", help="mean vector CSV (gaussian-kl)")
    p.add_argument("--cov", help="covariance CSV (gaussian-kl)")
    p.add_argument("--prior", choices=["fixed", "student-t", "half-cauchy", "tabulated"],
                   help="mixing law (mixture-mi)")
    p.add_argument("--tau", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--s2", type=float, default=1.0)
    p.add_argument("--tau-g", type=float, default=1.0)
    p.add_argument("--table", help="CSV vector of tabulated scales")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--inner-samples", type=int, default=10_000)
    add_common(p, mc=True)

    return parser


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("EFFDIM_SEED")
    if env is None:
        raise InputError("a master seed is required: pass --seed or set EFFDIM_SEED")
    try:
        return int(env)
    except ValueError:
        raise InputError(f"EFFDIM_SEED={env!r} is not an integer") from None


def _read_matrix(path, name: str) -> np.ndarray:
    try:
        return read_matrix_csv(path)
    except OSError as exc:
        raise InputError(f"cannot read {name} from {path}: {exc}") from exc


def _read_vector(path, name: str) -> np.ndarray:
    try:
        return read_vector_csv(path)
    except OSError as exc:
        raise InputError(f"cannot read {name} from {path}: {exc}") from exc


def _check_format(args, allowed=("json",), default="json") -> str:
    fmt = args.format or default
    if fmt not in allowed:
        raise InputError(
            f"--format {fmt} is not supported by this subcommand (allowed: {', '.join(allowed)})"
        )
    return fmt


def _build_prior(args):
    if args.prior == "fixed":
        if args.tau is None:
            raise InputError("--prior fixed requires --tau")
        return FixedScale(tau=args.tau)
    if args.prior == "student-t":
        if args.nu is None:
            raise InputError("--prior student-t requires --nu")
        return InverseGammaMixture(dof=args.nu, scale_sq=args.s2)
    if args.prior == "half-cauchy":
        return HalfCauchy(global_scale=args.tau_g)
    if args.table is None:
        raise InputError("--prior tabulated requires --table")
    return TabulatedPrior(table=_read_vector(args.table, "scale table"))


def _prior_config(args) -> dict:
    cfg = {"prior": args.prior}
    if args.prior == "fixed":
        cfg["tau"] = args.tau
    elif args.prior == "student-t":
        cfg["nu"] = args.nu
        cfg["s2"] = args.s2
    elif args.prior == "half-cauchy":
        cfg["tau_g"] = args.tau_g
    else:
        cfg["table"] = args.table
    return cfg


def _cmd_location(args) -> tuple[str, int]:
    _check_format(args)
    model = LocationModel(dim=args.d, prior_var=args.tau2, noise_var=args.sigma2, n=args.n)
    mi = location_mi(model)
    results = {
        "mi_nats": tagged(mi, "closed-form"),
        "d_eff": tagged(deff(mi, args.n), "closed-form"),
    }
    config = {"d": args.d, "tau2": args.tau2, "sigma2": args.sigma2, "n": args.n}
    if args.oracle:
        seed = _resolve_seed(args)
        # the sufficient-statistic channel: identity map, isotropic prior,
        # noise variance sigma2 / n
        channel = GaussianChannel(
            a=np.eye(args.d),
            prior_cov=args.tau2 * np.eye(args.d),
            noise_cov=(args.sigma2 / args.n) * np.eye(args.d),
        )
        est = estimate_channel_mi(channel, args.samples, seed, n_threads=args.threads)
        results["oracle_mi"] = tagged_mc(est)
        config["samples"] = args.samples
        config["seed"] = seed
    report = {
        "schema": SCHEMA,
        "subcommand": "location",
        "config": config,
        "results": results,
    }
    return render_report(report), EXIT_OK


def _cmd_regression(args) -> tuple[str, int]:
    _check_format(args)
    design = _read_matrix(args.design, "design")
    model = RidgeModel(design=design, noise_var=args.sigma2, prior_var=args.tau2)
    n = args.n if args.n is not None else design.shape[0]
    report_data = ridge_report(model, n)
    results = {
        "mi_nats": tagged(report_data.mi_nats, "closed-form"),
        "d_eff": tagged(report_data.d_eff, "closed-form"),
        "df": None if report_data.df is None else tagged(report_data.df, "closed-form"),
        "r_info": None if report_data.r_info is None
        else tagged(report_data.r_info, "closed-form"),
        "sandwich_lower": tagged(report_data.sandwich_lower, "bound"),
        "sandwich_upper": tagged(report_data.sandwich_upper, "bound"),
        "deff_rank_bound": tagged(deff_rank_bound(model, n), "bound"),
        "rank": tagged(report_data.rank, "closed-form"),
        "singular_values_sq": tagged(report_data.singular_values_sq, "closed-form"),
    }
    report = {
        "schema": SCHEMA,
        "subcommand": "regression",
        "config": {
            "design": args.design,
            "tau2": args.tau2,
            "sigma2": args.sigma2,
            "n": n,
        },
        "results": results,
    }
    return render_report(report), EXIT_OK


def _parse_grid(text: str) -> list[int]:
    try:
        grid = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise InputError(f"--n-grid {text!r} is not a comma-separated integer list") from None
    if not grid:
        raise InputError("--n-grid is empty")
    if any(n < 3 for n in grid):
        raise InputError("every grid entry must be >= 3")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError("grid entries must be strictly increasing")
    return grid


def _cmd_curve(args) -> tuple[str, int]:
    fmt = _check_format(args, allowed=("csv", "json"), default="csv")
    grid = _parse_grid(args.n_grid)
    if args.design is not None:
        if args.tau2 is None:
            raise InputError("regression curves require --tau2")
        design = _read_matrix(args.design, "design")
        model = RidgeModel(design=design, noise_var=args.sigma2, prior_var=args.tau2)
        mi_fixed, _ = regression_mi(model)
        rows = [(n, deff(mi_fixed, n)) for n in grid]
        monotone_guaranteed = True
    else:
        if args.tau2 is None:
            raise InputError("location curves require --tau2")
        rows = []
        for n in grid:
            tau2_n = args.tau2 / n if args.tau2_schedule == "inverse-n" else args.tau2
            model = LocationModel(dim=args.d, prior_var=tau2_n, noise_var=args.sigma2, n=n)
            rows.append((n, deff(location_mi(model), n)))
        monotone_guaranteed = args.tau2_schedule == "inverse-n"
    if monotone_guaranteed:
        values = [v for _, v in rows]
        if any(b > a for a, b in zip(values, values[1:])):
            raise NumericalError("d_eff column failed its guaranteed monotonicity check")
    if fmt == "csv":
        lines = ["n,d_eff"] + [f"{n},{format_float(v)}" for n, v in rows]
        return "\n".join(lines) + "\n", EXIT_OK
    report = {
        "schema": SCHEMA,
        "subcommand": "curve",
        "config": {
            "n_grid": grid,
            "d": args.d,
            "tau2": args.tau2,
            "sigma2": args.sigma2,
            "tau2_schedule": args.tau2_schedule,
            "design": args.design,
        },
        "results": {
            "n": tagged([n for n, _ in rows], "closed-form"),
            "d_eff": tagged(np.array([v for _, v in rows]), "closed-form"),
        },
    }
    return render_report(report), EXIT_OK


def _cmd_approx(args) -> tuple[str, int]:
    _check_format(args)
    exact_cov = _read_matrix(args.exact_cov, "exact covariance")
    approx_cov = _read_matrix(args.approx_cov, "approximate covariance")
    prior_cov = _read_matrix(args.prior_cov, "prior covariance")
    dim = exact_cov.shape[0]
    exact_mean = (_read_vector(args.exact_mean, "exact mean")
                  if args.exact_mean else np.zeros(dim))
    approx_mean = (_read_vector(args.approx_mean, "approximate mean")
                   if args.approx_mean else np.zeros(dim))
    # failures while validating user matrices are input errors, not
    # mid-computation numerical failures
    try:
        exact = GaussianDistribution(mean=exact_mean, cov=exact_cov)
        approx = GaussianDistribution(mean=approx_mean, cov=approx_cov)
    except EffdimError as exc:
        raise InputError(str(exc)) from exc
    audit = audit_approximation(exact, approx, prior_cov, args.n)
    report = {
        "schema": SCHEMA,
        "subcommand": "approx",
        "config": {
            "exact_cov": args.exact_cov,
            "approx_cov": args.approx_cov,
            "prior_cov": args.prior_cov,
            "exact_mean": args.exact_mean,
            "approx_mean": args.approx_mean,
            "n": args.n,
            "require_domination": bool(args.require_domination),
        },
        "results": {
            "kl_exact": tagged(audit.kl_exact, "closed-form"),
            "kl_approx": tagged(audit.kl_approx, "closed-form"),
            "logdet_exact": tagged(audit.logdet_exact, "closed-form"),
            "logdet_approx": tagged(audit.logdet_approx, "closed-form"),
            "loewner_dominates": audit.loewner_dominates,
            "means_equal": audit.means_equal,
            "prior_dominates_approx": audit.prior_dominates_approx,
            "truncation_certified": audit.truncation_certified,
            "deff_exact": tagged(audit.deff_exact, "closed-form"),
            "deff_approx": tagged(audit.deff_approx, "closed-form"),
        },
    }
    code = EXIT_OK
    if args.require_domination and not audit.loewner_dominates:
        code = EXIT_CONTRACT
    return render_report(report), code


def _cmd_shrinkage(args) -> tuple[str, int]:
    _check_format(args)
    prior = _build_prior(args)
    seed = _resolve_seed(args)
    model = ScalarShrinkageModel(prior=prior, noise_var=args.sigma2, n=args.n)
    summary = random_deff_distribution(model, args.samples, seed, n_threads=args.threads)
    cond = expected_conditional_mi(model, args.samples, seed, n_threads=args.threads)
    jensen = jensen_bound(model)
    results = {
        "deff_distribution": {
            "mean": tagged(summary.mean, "mc"),
            "sd": tagged(summary.sd, "mc"),
            **{
                f"q{int(round(q * 100)):02d}": tagged(v, "mc")
                for q, v in summary.quantiles.items()
            },
            "n_samples": summary.n_samples,
            "seed": summary.seed,
        },
        "expected_conditional_mi": tagged_mc(cond),
        "jensen_bound": None if jensen is None else tagged(jensen, "bound"),
        "heavy_tail_bound": (
            tagged(heavy_tail_bound(prior.tail_certificate, model.c_snr), "bound")
            if prior.tail_certificate is not None
            else None
        ),
    }
    config = {
        **_prior_config(args),
        "sigma2": args.sigma2,
        "n": args.n,
        "samples": args.samples,
        "seed": seed,
    }
    if args.decompose:
        chain = chain_decomposition(
            model, args.samples, args.inner_samples, seed, n_threads=args.threads
        )
        results["chain"] = {
            "i_theta_y": tagged_mc(chain.i_theta_y),
            "i_lambda_y": tagged_mc(chain.i_lambda_y),
            "e_cond_mi": tagged_mc(chain.e_cond_mi),
            "bound_satisfied": chain.bound_satisfied,
        }
        config["inner_samples"] = args.inner_samples
    report = {
        "schema": SCHEMA,
        "subcommand": "shrinkage",
        "config": config,
        "results": results,
    }
    return render_report(report), EXIT_OK


def _cmd_oracle(args) -> tuple[str, int]:
    _check_format(args)
    seed = _resolve_seed(args)
    if args.kind == "channel-mi":
        for flag in ("a", "prior_cov", "noise_cov"):
            if getattr(args, flag) is None:
                raise InputError(f"--kind channel-mi requires --{flag.replace('_', '-')}")
        try:
            channel = GaussianChannel(
                a=_read_matrix(args.a, "forward map"),
                prior_cov=_read_matrix(args.prior_cov, "prior covariance"),
                noise_cov=_read_matrix(args.noise_cov, "noise covariance"),
            )
        except EffdimError as exc:
            raise InputError(str(exc)) from exc
        est = estimate_channel_mi(channel, args.samples, seed, n_threads=args.threads)
        config = {"kind": args.kind, "a": args.a, "prior_cov": args.prior_cov,
                  "noise_cov": args.noise_cov, "samples": args.samples, "seed": seed}
    elif args.kind == "gaussian-kl":
        for flag in ("mean", "cov", "prior_cov"):
            if getattr(args, flag) is None:
                raise InputError(f"--kind gaussian-kl requires --{flag.replace('_', '-')}")
        try:
            q = GaussianDistribution(
                mean=_read_vector(args.mean, "mean"),
                cov=_read_matrix(args.cov, "covariance"),
            )
        except EffdimError as exc:
            raise InputError(str(exc)) from exc
        est = estimate_gaussian_kl(
            q, _read_matrix(args.prior_cov, "prior covariance"),
            args.samples, seed, n_threads=args.threads,
        )
        config = {"kind": args.kind, "mean": args.mean, "cov": args.cov,
                  "prior_cov": args.prior_cov, "samples": args.samples, "seed": seed}
    else:
        if args.prior is None:
            raise InputError("--kind mixture-mi requires --prior")
        model = ScalarShrinkageModel(
            prior=_build_prior(args), noise_var=args.sigma2, n=args.n
        )
        est = estimate_mixture_marginal_mi(
            model, args.samples, args.inner_samples, seed, n_threads=args.threads
        )
        config = {"kind": args.kind, **_prior_config(args), "sigma2": args.sigma2,
                  "n": args.n, "samples": args.samples,
                  "inner_samples": args.inner_samples, "seed": seed}
    report = {
        "schema": SCHEMA,
        "subcommand": "oracle",
        "config": config,
        "results": {"estimate": tagged_mc(est)},
    }
    return render_report(report), EXIT_OK


COMMANDS = {
    "location": _cmd_location,
    "regression": _cmd_regression,
    "curve": _cmd_curve,
    "approx": _cmd_approx,
    "shrinkage": _cmd_shrinkage,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_CONFIG
        return code
    try:
        text, code = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"effdim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"effdim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EffdimError as exc:
        print(f"effdim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (np.linalg.LinAlgError, FloatingPointError, OverflowError) as exc:
        print(f"effdim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
