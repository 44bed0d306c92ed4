"""Command-line front end: pool generation, sampling, selection, experiments.

Seeds are mandatory flags on every stochastic subcommand; there is no
wall-clock default, so two invocations with the same flags produce
byte-identical outputs.  Outputs go to new files only unless --force is
given, and are written atomically.

Exit codes: 0 success, 1 validation error (flags, formats, infeasible
schemes), 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ._version import __version__
from .estimators import required_sample_size, z_for_level
from .experiments import (
    EXPERIMENT_ALIASES,
    EXPERIMENT_NAMES,
    ExperimentConfig,
    run_experiment,
)
from .population import (
    PoolFormatError,
    SyntheticSpec,
    generate_synthetic,
    load_pool,
    pool_summary,
    pool_to_csv_text,
)
from .samplers import RssSpec, SrsSpec, draw_scheme
from .subsampling import (
    BaselineMean,
    ChebyshevRelative,
    CorrelationMax,
    generate_candidates,
    select_subsample,
)
from .tables import Table, atomic_write_text, dump_json


class CliError(Exception):
    """Validation failure; rendered with a remediation hint, exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(f"{message} (run '{self.prog} --help' for usage)")


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise CliError(
            f"{flag} expects a comma-separated list of integers, got {text!r}"
        ) from None
    if not values:
        raise CliError(f"{flag} expects at least one config index")
    return values


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"{what} {path!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise CliError(f"{what} {path!r} must contain a JSON object")
    return data


def _scheme_from_args(args: argparse.Namespace) -> SrsSpec | RssSpec:
    if args.srs is not None and args.rss is not None:
        raise CliError("pass exactly one of --srs or --rss, not both")
    if args.srs is not None:
        return SrsSpec(n=args.srs, seed=args.seed)
    if args.rss is not None:
        m, k = args.rss
        return RssSpec(cycles=m, set_size=k, ranking_config=args.rank_config, seed=args.seed)
    raise CliError("a sampling scheme is required: --srs N or --rss M K")


def _add_scheme_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--srs", type=int, metavar="N", help="simple random sample of N regions")
    parser.add_argument(
        "--rss", type=int, nargs=2, metavar=("M", "K"),
        help="ranked set sample with M cycles and set size K (sample size M*K)",
    )
    parser.add_argument(
        "--rank-config", type=int, default=0, metavar="C",
        help="config index used to rank RSS sets (default 0)",
    )


def cmd_gen(args: argparse.Namespace) -> int:
    spec = SyntheticSpec.from_dict(_load_json(args.spec, "synthetic spec"))
    pool = generate_synthetic(spec, args.seed)
    atomic_write_text(args.out, pool_to_csv_text(pool), args.force)
    print(
        f"wrote {args.out}: {pool.region_count} regions x "
        f"{pool.config_count} configs (seed={args.seed})"
    )
    return 0


def cmd_summary(args: argparse.Namespace) -> int:
    pool = load_pool(args.pool)
    summary = pool_summary(pool)
    z = z_for_level(args.level)
    table = Table(
        ("config", "config_label", "mean_cpi", "std_cpi", "rel_std", "required_n")
    )
    for c, label in enumerate(pool.config_labels):
        if summary.stds is None:
            table.append(c, label, summary.means[c], "", "", "")
            continue
        rel = summary.stds[c] / summary.means[c]
        table.append(
            c, label, summary.means[c], summary.stds[c], rel,
            required_sample_size(rel, args.target_rel_me, args.level),
        )
    provenance = [
        f"tool: regionsample {__version__}",
        f"pool: {args.pool} ({pool.region_count} regions)",
        f"level: {args.level} (z={z!r}), target_rel_me: {args.target_rel_me}",
    ]
    text = table.to_csv_text(provenance)
    if args.out:
        atomic_write_text(args.out, text, args.force)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    pool = load_pool(args.pool)
    spec = _scheme_from_args(args)
    draw = draw_scheme(pool, spec)
    doc = draw.to_dict()
    doc["pool"] = {
        "app_label": pool.app_label,
        "region_count": pool.region_count,
        "config_labels": list(pool.config_labels),
    }
    atomic_write_text(args.out, dump_json(doc), args.force)
    print(
        f"wrote {args.out}: {draw.scheme} draw of {draw.sample_size} regions "
        f"(seed={spec.seed})"
    )
    return 0


def cmd_select(args: argparse.Namespace) -> int:
    pool = load_pool(args.pool)
    scheme = _scheme_from_args(args)
    train = _parse_int_list(args.train_configs, "--train-configs")
    for c in train:
        if not 0 <= c < pool.config_count:
            raise CliError(
                f"--train-configs index {c} out of range; pool has "
                f"{pool.config_count} configs"
            )
    if args.criterion == "baseline":
        criterion = BaselineMean(train[0])
    elif args.criterion == "chebyshev":
        criterion = ChebyshevRelative(train)
    else:
        if len(train) < 2:
            raise CliError(
                "--criterion correlation needs at least two --train-configs"
            )
        criterion = CorrelationMax(train)
    candidates = generate_candidates(pool, scheme, args.trials, args.seed)
    report = select_subsample(pool, candidates, criterion)
    doc = report.to_dict()
    doc["master_seed"] = args.seed
    doc["trials"] = args.trials
    doc["pool"] = {
        "app_label": pool.app_label,
        "region_count": pool.region_count,
        "config_labels": list(pool.config_labels),
    }
    atomic_write_text(args.out, dump_json(doc), args.force)
    print(
        f"wrote {args.out}: winner candidate {report.winning_index} of "
        f"{args.trials} (criterion {report.criterion}, "
        f"value {report.criterion_value:.6g}, seed={args.seed})"
    )
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_dict(_load_json(args.config, "experiment config"))
    result = run_experiment(args.name, cfg)
    written = result.write(args.out_dir, args.force)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="regionsample",
        description="Select representative simulation regions from CPI pools.",
    )
    parser.add_argument("--version", action="version", version=f"regionsample {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p_gen = sub.add_parser("gen", help="generate a synthetic pool CSV from a spec file")
    p_gen.add_argument("spec", help="JSON file with the synthetic population spec")
    p_gen.add_argument("--seed", type=int, required=True, help="generation seed (required)")
    p_gen.add_argument("--out", required=True, help="output pool CSV path")
    p_gen.add_argument("--force", action="store_true", help="overwrite an existing output file")
    p_gen.set_defaults(func=cmd_gen)

    p_summary = sub.add_parser(
        "summary", help="per-config means, stds, and required sample sizes"
    )
    p_summary.add_argument("pool", help="pool CSV path")
    p_summary.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
    p_summary.add_argument(
        "--target-rel-me", type=float, default=0.03,
        help="target relative margin of error for the required-n column (default 0.03)",
    )
    p_summary.add_argument("--out", help="write CSV here instead of stdout")
    p_summary.add_argument("--force", action="store_true", help="overwrite an existing output file")
    p_summary.set_defaults(func=cmd_summary)

    p_sample = sub.add_parser("sample", help="draw one sample and write it as JSON")
    p_sample.add_argument("pool", help="pool CSV path")
    _add_scheme_flags(p_sample)
    p_sample.add_argument("--seed", type=int, required=True, help="draw seed (required)")
    p_sample.add_argument("--out", required=True, help="output draw JSON path")
    p_sample.add_argument("--force", action="store_true", help="overwrite an existing output file")
    p_sample.set_defaults(func=cmd_sample)

    p_select = sub.add_parser(
        "select", help="repeated subsampling: pick the best of many candidates"
    )
    p_select.add_argument("pool", help="pool CSV path")
    _add_scheme_flags(p_select)
    p_select.add_argument("--trials", type=int, default=1000, help="candidate count (default 1000)")
    p_select.add_argument(
        "--criterion", choices=("baseline", "chebyshev", "correlation"),
        default="baseline", help="selection criterion (default baseline)",
    )
    p_select.add_argument(
        "--train-configs", default="0", metavar="LIST",
        help="comma-separated training config indices (default 0)",
    )
    p_select.add_argument("--seed", type=int, required=True, help="master seed (required)")
    p_select.add_argument("--out", required=True, help="output report JSON path")
    p_select.add_argument("--force", action="store_true", help="overwrite an existing output file")
    p_select.set_defaults(func=cmd_select)

    p_exp = sub.add_parser("experiment", help="run one experiment from a config file")
    p_exp.add_argument(
        "name",
        help="experiment name: "
        + ", ".join(EXPERIMENT_NAMES)
        + " (aliases: " + ", ".join(EXPERIMENT_ALIASES) + ")",
    )
    p_exp.add_argument("--config", required=True, help="experiment config JSON path")
    p_exp.add_argument("--out-dir", required=True, help="directory for output tables")
    p_exp.add_argument("--force", action="store_true", help="overwrite existing output files")
    p_exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliError, PoolFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileExistsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
