"""Command-line interface.

Verbs: generate (mixture spec -> dataset CSV), transform (dataset CSV ->
isotropic/weighted/weights CSVs), analyze (dataset CSV -> distinctness and
subspace-similarity report), sweep (config JSON -> records CSV), recipe
(name -> config JSON).

Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 I/O
error.
"""

import argparse
import csv
import sys

import numpy as np

from .errors import ConfigError, NumericalError
from .experiment import RECIPE_NAMES, ExperimentConfig, recipe, run_sweep
from .linalg import apply_centering
from .mixture import LabeledDataset, MixtureSpec, make_separation_family, sample
from .structure import distinctness_delta_check
from .subspace import fisher_subspace, pc_subspace, sss
from .transform import DEFAULT_ALPHA, SCHEMES, transform_pipeline

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="structdr",
        description="Structure-preserving dimension reduction for Gaussian-mixture data",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    gen = sub.add_parser("generate", help="sample a labeled dataset from a mixture spec")
    gen.add_argument("--spec", help="mixture spec JSON file")
    gen.add_argument("--d", type=int, help="dimension (when building a family spec)")
    gen.add_argument("--k", type=int, help="component count (family spec)")
    gen.add_argument("--separation", type=float, default=4.0)
    gen.add_argument("--dispersion", type=float, default=1.0)
    gen.add_argument("--n-per-cluster", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output dataset CSV")

    tra = sub.add_parser("transform", help="isotropize and weight a dataset CSV")
    tra.add_argument("--data", required=True, help="input dataset CSV (x1..xd,label)")
    tra.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    tra.add_argument("--scheme", choices=SCHEMES, default="hyperbolic")
    tra.add_argument(
        "--out", required=True,
        help="output prefix; writes <out>_isotropic.csv, <out>_weighted.csv, <out>_weights.csv",
    )

    ana = sub.add_parser("analyze", help="distinctness / subspace-similarity report")
    ana.add_argument("--data", required=True, help="input dataset CSV")
    ana.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    ana.add_argument("--scheme", choices=SCHEMES, default="hyperbolic")
    ana.add_argument("--out", help="optional single-row CSV report")

    swe = sub.add_parser("sweep", help="run a replicated experiment sweep")
    swe.add_argument("--config", required=True, help="experiment config JSON")
    swe.add_argument("--out", required=True, help="output records CSV")
    swe.add_argument("--threads", type=int, default=1)
    swe.add_argument("--seed", type=int, help="override the config master seed")

    rec = sub.add_parser("recipe", help="write a canned experiment config")
    rec.add_argument("name", help=f"one of: {', '.join(RECIPE_NAMES)}")
    rec.add_argument("--out", required=True, help="output config JSON")
    return parser


def _cmd_generate(args) -> int:
    if args.spec:
        with open(args.spec) as fh:
            spec = MixtureSpec.from_json(fh.read())
    elif args.d is not None and args.k is not None:
        spec = make_separation_family(
            args.d, args.k, args.separation, args.dispersion, seed=args.seed
        )
    else:
        raise ConfigError("generate needs either --spec or both --d and --k")
    data = sample(spec, args.n_per_cluster, seed=args.seed)
    data.to_csv(args.out)
    print(f"wrote {data.n} x {data.d} dataset ({spec.k} clusters) to {args.out}")
    return EXIT_OK


def _cmd_transform(args) -> int:
    data = LabeledDataset.from_csv(args.data)
    pipe = transform_pipeline(data, alpha=args.alpha, scheme=args.scheme)
    iso_path = f"{args.out}_isotropic.csv"
    weighted_path = f"{args.out}_weighted.csv"
    weights_path = f"{args.out}_weights.csv"
    pipe.isotropic.as_labeled().to_csv(iso_path)
    pipe.weighted.to_csv(weighted_path)
    with open(weights_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["weight", "label"])
        for w, label in zip(pipe.weights.weights, data.labels):
            writer.writerow([repr(float(w)), int(label)])
    print(f"wrote {iso_path}, {weighted_path}, {weights_path}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    data = LabeledDataset.from_csv(args.data)
    pipe = transform_pipeline(data, alpha=args.alpha, scheme=args.scheme)
    report = distinctness_delta_check(
        data, pipe.weighted, args.alpha, isotropic=pipe.isotropic
    )
    m = data.k - 1
    sss_x = sss(pc_subspace(apply_centering(data.data), m), fisher_subspace(data))
    sss_z = sss(pc_subspace(pipe.weighted.data, m), fisher_subspace(pipe.weighted))
    print(f"n={data.n} d={data.d} k={data.k} alpha={args.alpha} scheme={args.scheme}")
    print(
        f"lambda_x={report.lambda_bar_x:.6f} lambda_z={report.lambda_bar_z:.6f} "
        f"delta={report.observed_delta:.6f} bound={report.bound_rhs:.6f} "
        f"satisfied={'true' if report.bound_satisfied else 'false'}"
    )
    print(f"sss_x={sss_x:.6f} sss_z={sss_z:.6f}")
    print(
        f"sd_norm_sq={report.empirical_sd_norm:.6e} d/n={data.d / data.n:.6e}"
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["n", "d", "k", "alpha", "scheme", "lambda_x", "lambda_z", "delta",
                 "bound", "satisfied", "sss_x", "sss_z", "empirical_sd_norm"]
            )
            writer.writerow(
                [data.n, data.d, data.k, repr(float(args.alpha)), args.scheme,
                 repr(report.lambda_bar_x), repr(report.lambda_bar_z),
                 repr(report.observed_delta), repr(report.bound_rhs),
                 "true" if report.bound_satisfied else "false",
                 repr(sss_x), repr(sss_z), repr(report.empirical_sd_norm)]
            )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        config = ExperimentConfig.from_json(fh.read())
    if args.seed is not None:
        config.seed = args.seed
    records = run_sweep(config, out_path=args.out, threads=args.threads)
    failed = sum(1 for r in records if r.status != "ok")
    total_time = sum(r.elapsed_seconds for r in records)
    print(
        f"wrote {len(records)} records to {args.out} "
        f"({failed} failed, {total_time:.1f}s compute)"
    )
    return EXIT_OK


def _cmd_recipe(args) -> int:
    config = recipe(args.name)
    with open(args.out, "w") as fh:
        fh.write(config.to_json() + "\n")
    print(f"wrote recipe {args.name!r} to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "transform": _cmd_transform,
    "analyze": _cmd_analyze,
    "sweep": _cmd_sweep,
    "recipe": _cmd_recipe,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except ConfigError as exc:
        print(f"structdr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"structdr: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"structdr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
