"""Command-line front end.

Exit codes: 0 success, 1 experiment ran but a threshold failed, 2 usage or
config error.  Reports land in --out, defaulting to $HARDEDGE_OUT and then
./reports.  --threads is a parallelism hint only; every report is
byte-identical for any thread count because trial seeds are derived from
(seed, trial index), never from scheduling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .ensemble import KINDS, EnsembleSpec, EntryDistribution, sample_matrix, write_sample
from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_apriori,
    run_delocalization,
    run_hard_edge_scaling,
    run_hw_experiment,
    run_identity_suite,
    run_local_law,
    run_projection_mass_experiment,
    run_wegner,
)
from .mp import (
    SpectralPoint,
    Window,
    check_delta_bounds,
    mp_cdf,
    mp_density,
    mp_moment_quadrature,
    mp_stieltjes,
    mp_window_mass,
)
from .reports import write_report

__all__ = ["main", "load_config"]

_OUT_ENV = "HARDEDGE_OUT"


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON config file; unknown keys are rejected."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def _default_out() -> str:
    return os.environ.get(_OUT_ENV, "reports")


def _add_experiment_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH", help="JSON experiment config")
    sub.add_argument("--seed", type=int, help="override the master seed")
    sub.add_argument("--trials", type=int, help="override trials per size")
    sub.add_argument("--out", default=_default_out(), metavar="DIR", help="report directory")
    sub.add_argument("--threads", type=int, default=1, help="parallelism hint")


def _config_from(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    return cfg


def _emit(report, out) -> int:
    paths = write_report(report, out)
    for line in report.failures:
        print(f"FAIL {line}")
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{report.theorem}: {verdict} ({len(report.rows)} rows) -> {paths['csv']}")
    return 0 if report.passed else 1


def _cmd_mp(args) -> int:
    results = []
    if args.density is not None:
        results.append(("density", "%.6g" % mp_density(args.density)))
    if args.cdf is not None:
        results.append(("cdf", "%.6g" % mp_cdf(args.cdf)))
    if args.mass is not None:
        e, eta = args.mass
        results.append(("mass", "%.6g" % mp_window_mass(Window(e, eta))))
    if args.stieltjes is not None:
        e, eta = args.stieltjes
        value = mp_stieltjes(SpectralPoint(e, eta))
        results.append(("stieltjes", "%.6g%+.6gi" % (value.real, value.imag)))
    if args.bounds is not None:
        e, eta = args.bounds
        report = check_delta_bounds(SpectralPoint(e, eta))
        pieces = [
            f"all_ok={report.all_ok}",
            f"modulus_margin={report.modulus_margin:.6g}",
            f"shifted_margin={report.shifted_margin:.6g}",
            f"inside_circle={report.inside_circle}",
        ]
        if report.im_margin is not None:
            pieces.append(f"im_margin={report.im_margin:.6g}")
        results.append(("bounds", " ".join(pieces)))
    if args.moment is not None:
        results.append(("moment", "%.6g" % mp_moment_quadrature(args.moment)))
    if not results:
        print("mp: request at least one quantity (see --help)", file=sys.stderr)
        return 2
    for name, text in results:
        print(text if len(results) == 1 else f"{name} {text}")
    return 0


def _cmd_sample(args) -> int:
    spec = EnsembleSpec(
        size=args.n,
        distribution=EntryDistribution(args.dist),
        master_seed=args.seed,
    )
    sample = sample_matrix(spec, args.trial)
    write_sample(sample, args.out)
    print(f"wrote {args.out} (N={args.n}, kind={args.dist}, seed={args.seed}, trial={args.trial})")
    return 0


def _cmd_hw(args) -> int:
    report = run_hw_experiment(
        distribution=args.dist,
        trials=args.trials,
        seed=args.seed,
        size=args.size,
        deltas=tuple(args.deltas) if args.deltas else (1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0),
        spectrum=args.spectrum,
    )
    return _emit(report, args.out)


def _cmd_projmass(args) -> int:
    report = run_projection_mass_experiment(
        distribution=args.dist,
        trials=args.trials,
        seed=args.seed,
        size=args.size,
        m_grid=tuple(args.m_grid) if args.m_grid else (4, 9, 16, 25),
        family=args.family,
    )
    return _emit(report, args.out)


def _cmd_identities(args) -> int:
    report = run_identity_suite(
        sizes=tuple(args.n),
        trials=args.trials,
        seed=args.seed,
        distribution=args.dist,
        threads=args.threads,
    )
    return _emit(report, args.out)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardedge",
        description="Hard-edge sample covariance laboratory: analytic MP law "
        "evaluations and Monte Carlo theorem checks.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    mp = subs.add_parser("mp", help="analytic evaluations of the limiting law")
    mp.add_argument("--density", type=float, metavar="E")
    mp.add_argument("--cdf", type=float, metavar="E")
    mp.add_argument("--mass", type=float, nargs=2, metavar=("E", "ETA"))
    mp.add_argument("--stieltjes", type=float, nargs=2, metavar=("E", "ETA"))
    mp.add_argument("--bounds", type=float, nargs=2, metavar=("E", "ETA"))
    mp.add_argument("--moment", type=int, metavar="K")
    mp.set_defaults(func=_cmd_mp)

    sample = subs.add_parser("sample", help="draw one matrix and write a binary dump")
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--dist", choices=KINDS, default="complex-gaussian")
    sample.add_argument("--seed", type=int, default=1)
    sample.add_argument("--trial", type=int, default=0)
    sample.add_argument("--out", required=True, metavar="PATH")
    sample.set_defaults(func=_cmd_sample)

    for name, runner in (
        ("apriori", run_apriori),
        ("locallaw", run_local_law),
        ("deloc", run_delocalization),
        ("wegner", run_wegner),
        ("hardedge", run_hard_edge_scaling),
    ):
        sub = subs.add_parser(name, help=f"run the {name} experiment")
        _add_experiment_flags(sub)
        sub.set_defaults(func=lambda args, r=runner: _emit(r(_config_from(args), threads=args.threads), args.out))

    hw = subs.add_parser("hw", help="quadratic-form tail shape experiment")
    hw.add_argument("--dist", choices=KINDS, default="complex-gaussian")
    hw.add_argument("--trials", type=int, default=10_000)
    hw.add_argument("--seed", type=int, default=1)
    hw.add_argument("--size", type=int, default=64)
    hw.add_argument("--deltas", type=float, nargs="+")
    hw.add_argument("--spectrum", type=float, nargs="+")
    hw.add_argument("--out", default=_default_out(), metavar="DIR")
    hw.set_defaults(func=_cmd_hw)

    projmass = subs.add_parser("projmass", help="projection mass lower-tail experiment")
    projmass.add_argument("--dist", choices=KINDS, default="complex-gaussian")
    projmass.add_argument("--trials", type=int, default=40_000)
    projmass.add_argument("--seed", type=int, default=1)
    projmass.add_argument("--size", type=int, default=64)
    projmass.add_argument("--m-grid", type=int, nargs="+", dest="m_grid")
    projmass.add_argument("--family", choices=("auto", "coordinate", "haar"), default="auto")
    projmass.add_argument("--out", default=_default_out(), metavar="DIR")
    projmass.set_defaults(func=_cmd_projmass)

    identities = subs.add_parser("identities", help="exact finite-N identity suite")
    identities.add_argument("--n", type=int, nargs="+", default=[16, 32])
    identities.add_argument("--trials", type=int, default=20)
    identities.add_argument("--seed", type=int, default=1)
    identities.add_argument("--dist", choices=KINDS, default="complex-gaussian")
    identities.add_argument("--threads", type=int, default=1)
    identities.add_argument("--out", default=_default_out(), metavar="DIR")
    identities.set_defaults(func=_cmd_identities)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
