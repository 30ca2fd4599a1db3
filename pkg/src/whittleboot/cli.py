"""Command-line front end.

Subcommands:

* ``fit``        -- frequency-domain parameter estimate from a CSV series
* ``bootstrap``  -- hybrid bootstrap session: samples CSV + summary JSON
* ``experiment`` -- the d1 simulation study from a TOML/JSON config
* ``sunspot``    -- spectral-peak periodicity workflow with bootstrap CI

Exit codes: 0 success, 2 usage/input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bootstrap import BootstrapConfig, run_hybrid_bootstrap, run_variant_bootstrap
from .errors import InvalidInputError, NumericError
from .families import ARFamily, SpectralFamily, WhiteNoiseFamily
from .simulation import run_experiment
from .spectral import read_series_csv, periodogram
from .sunspot import analyze_periodicity
from .whittle import minimize_whittle, pseudo_true_parameter
from .smoothing import cv_bandwidth, kernel_spectral_estimate

USAGE_ERROR = 2
NUMERIC_ERROR = 3


def _parse_family(spec: str) -> SpectralFamily:
    if spec in ("white", "ar:0", "ar0"):
        return WhiteNoiseFamily()
    if spec.startswith("ar:"):
        try:
            p = int(spec.split(":", 1)[1])
        except ValueError:
            raise InvalidInputError(f"bad family spec {spec!r}; expected ar:<order>")
        if p == 0:
            return WhiteNoiseFamily()
        return ARFamily(p)
    raise InvalidInputError(f"unknown family {spec!r}; supported: ar:<p>, white")


def _parse_variant(spec: str) -> dict:
    if spec == "standard":
        return {"variant": "standard"}
    if spec == "debiased":
        return {"variant": "debiased"}
    if spec.startswith("tapered"):
        rho = 0.5
        if ":" in spec:
            rho = float(spec.split(":", 1)[1])
        return {"variant": "tapered", "taper_rho": rho}
    if spec.startswith("boundary"):
        p = None
        if ":" in spec:
            p = int(spec.split(":", 1)[1])
        return {"variant": "boundary", "boundary_p": p}
    raise InvalidInputError(
        f"unknown variant {spec!r}; supported: standard, tapered[:rho], debiased, boundary[:p]"
    )


def _write_json(payload: dict, path: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        path.write_text(text + "\n", encoding="utf-8")
        print(f"wrote {path}")


def _out_dir(args) -> Path | None:
    if args.out_dir is None:
        return None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_fit(args) -> int:
    from .spectral import dft, taper_weights, tapered_periodogram
    from .whittle import (
        boundary_extension_dft,
        debiased_family,
        select_ar_order_aic,
        yule_walker,
    )

    series = read_series_csv(args.input)
    family = _parse_family(args.family)
    variant = _parse_variant(args.variant)

    s = series.center()
    pg = periodogram(s)
    grid = pg.grid
    h_bw = cv_bandwidth(pg)
    fhat = kernel_spectral_estimate(pg, h_bw)

    kind = variant["variant"]
    if kind == "tapered":
        taper = taper_weights("tukey", s.n, rho=variant["taper_rho"])
        est = minimize_whittle(family, tapered_periodogram(s, taper), grid)
    elif kind == "debiased":
        est = minimize_whittle(debiased_family(family, s.n), pg, grid)
    elif kind == "boundary":
        p = variant["boundary_p"]
        p = select_ar_order_aic(s) if p is None else p
        yw = yule_walker(s, p)
        _, j_tilde = boundary_extension_dft(s, yw, grid)
        vals = np.real(j_tilde * np.conj(dft(s)))[1:] / (2.0 * np.pi * s.n)
        est = minimize_whittle(family, vals, grid)
    else:
        est = minimize_whittle(family, pg, grid)

    theta0 = pseudo_true_parameter(family, fhat(grid.lam_pos), grid)
    report = {
        "n": series.n,
        "family": args.family,
        "variant": args.variant,
        "theta_hat": est.theta.tolist(),
        "objective": est.objective,
        "converged": bool(est.converged),
        "iterations": est.iterations,
        "bandwidth": h_bw,
        "theta0": theta0.theta.tolist(),
        "theta0_converged": bool(theta0.converged),
    }
    out = _out_dir(args)
    _write_json(report, out / "fit.json" if out else None)
    return 0


def cmd_bootstrap(args) -> int:
    series = read_series_csv(args.input)
    family = _parse_family(args.family)
    variant = _parse_variant(args.variant)
    config = BootstrapConfig(B=args.B, b=args.b, seed=args.seed, **variant)
    runner = run_hybrid_bootstrap if config.variant == "standard" else run_variant_bootstrap
    comps, dist = runner(series, family, config)

    summary = dist.summary(comps.theta_hat, series.n)
    summary.update(
        {
            "theta_hat": comps.theta_hat.tolist(),
            "theta0": comps.theta0.tolist(),
            "v1_star": comps.v1_star.tolist(),
            "v2_plus": comps.v2_plus.tolist(),
            "diagnostics": comps.diagnostics,
        }
    )
    out = _out_dir(args)
    if out is not None:
        dist.to_csv(out / "lstar_samples.csv")
        print(f"wrote {out / 'lstar_samples.csv'}")
    _write_json(summary, out / "bootstrap.json" if out else None)
    return 0


def _load_config_file(path: Path) -> dict:
    if path.suffix == ".json":
        return json.loads(path.read_text(encoding="utf-8"))
    if path.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # python < 3.11
            import tomli as tomllib
        return tomllib.loads(path.read_text(encoding="utf-8"))
    raise InvalidInputError(f"config must be .json or .toml, got {path.suffix!r}")


def cmd_experiment(args) -> int:
    path = Path(args.config)
    if not path.exists():
        raise InvalidInputError(f"config file {path} not found")
    cfg = _load_config_file(path)
    if args.full_scale:
        cfg.setdefault("R", 10_000)
        cfg["R"] = max(cfg.get("R", 10_000), 10_000)
        cfg["B"] = max(cfg.get("B", 1000), 1000)
        cfg["reps"] = max(cfg.get("reps", 500), 500)
    models = cfg.get("models", ["model1", "model2", "model3"])
    n_values = cfg.get("n", [1000])
    b_values = cfg.get("b", None)
    B = int(cfg.get("B", 400))
    R = int(cfg.get("R", 2000))
    reps = int(cfg.get("reps", 100))
    seed = int(cfg.get("seed", args.seed))

    est_ops = len(models) * len(n_values) * max(1, len(b_values or [1])) * reps * B
    print(f"experiment size: ~{est_ops:,} replicate minimizations")

    result = run_experiment(models, n_values, b_values, B=B, R=R, mc_reps=reps, seed=seed)
    out = _out_dir(args) or Path(".")
    csv_path = out / "experiment_results.csv"
    result.to_csv(csv_path)
    print(f"wrote {csv_path}")

    for model in models:
        for n in n_values:
            rows = {
                r["method"]: r
                for r in result.rows
                if r["model"] == model and r["n"] == n
            }
            if "hybrid" in rows and "multiplicative" in rows:
                h, m = rows["hybrid"], rows["multiplicative"]
                pooled = float(np.hypot(h["se_d1"], m["se_d1"]))
                print(
                    f"{model} n={n}: d1 hybrid {h['mean_d1']:.4f} (se {h['se_d1']:.4f})"
                    f" vs multiplicative {m['mean_d1']:.4f} (se {m['se_d1']:.4f})"
                    f" [pooled se {pooled:.4f}]"
                )
                if "gaussian-asymptotic" in rows:
                    g = rows["gaussian-asymptotic"]
                    print(f"{model} n={n}: d1 gaussian-asymptotic {g['mean_d1']:.4f}")
    return 0


def cmd_sunspot(args) -> int:
    series = read_series_csv(args.input)
    analysis = analyze_periodicity(
        series, order=args.order, B=args.B, seed=args.seed, b=args.b
    )
    payload = analysis.to_dict()
    out = _out_dir(args)
    _write_json(payload, out / "sunspot.json" if out else None)
    print(
        f"peak period {analysis.period:.3f} years "
        f"(raw periodogram {analysis.raw_period:.3f}); "
        f"{int(analysis.ci_level * 100)}% CI "
        f"[{analysis.ci_period[0]:.2f}, {analysis.ci_period[1]:.2f}]"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whittleboot",
        description="Frequency-domain parameter estimation with hybrid bootstrap inference",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="single-column CSV series")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", default=None)

    p_fit = sub.add_parser("fit", help="point estimation")
    add_common(p_fit)
    p_fit.add_argument("--family", default="ar:1", help="ar:<p> or white")
    p_fit.add_argument(
        "--variant",
        default="standard",
        help="standard | tapered[:rho] | debiased | boundary[:p]",
    )
    p_fit.set_defaults(func=cmd_fit)

    p_boot = sub.add_parser("bootstrap", help="hybrid bootstrap session")
    add_common(p_boot)
    p_boot.add_argument("--family", default="ar:1")
    p_boot.add_argument("--variant", default="standard")
    p_boot.add_argument("--B", type=int, default=1000)
    p_boot.add_argument("--b", type=int, default=None, help="block length (default 4 n^0.25)")
    p_boot.set_defaults(func=cmd_bootstrap)

    p_exp = sub.add_parser("experiment", help="d1 simulation study")
    p_exp.add_argument("--config", required=True, help="TOML or JSON experiment config")
    p_exp.add_argument("--full-scale", action="store_true")
    add_common(p_exp, needs_input=False)
    p_exp.set_defaults(func=cmd_experiment)

    p_sun = sub.add_parser("sunspot", help="periodicity analysis")
    add_common(p_sun)
    p_sun.add_argument("--order", type=int, default=2, help="AR order (2 or 9 typical)")
    p_sun.add_argument("--B", type=int, default=1000)
    p_sun.add_argument("--b", type=int, default=None)
    p_sun.set_defaults(func=cmd_sunspot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for usage errors
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
