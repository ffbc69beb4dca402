"""Command-line front end.

Exit codes: 0 success, 1 validation found violations, 2 bad input or file
format, 3 infeasible request (e.g. more folds than rows).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .corpus import (
    CORE_SUBSETS,
    partition_by_subset,
    placement_subset,
    to_learning_dataset,
    validate_corpus,
)
from .dataio import (
    read_corpus,
    read_info_relation_mapping,
    read_names_data,
    write_corpus,
)
from .evaluation import (
    InfeasibleFoldsError,
    chi_square_2x2,
    cross_validate,
)
from .experiment import (
    ExperimentPlan,
    default_full_spec,
    default_core_spec,
    generate_corpus,
    report_to_dict,
    run_occurrence_experiment,
    run_placement_experiment,
    spec_from_dict,
)
from .induction import (
    LearnerParams,
    build_tree,
    node_count,
    prune,
    summarize,
    tree_to_dict,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2
EXIT_INFEASIBLE = 3


def fmt_pct(value: float) -> str:
    return f"{value:.1f}"


def fmt_halfwidth(value: float) -> str:
    text = f"{value:.2f}"
    return text[:-1] if text.endswith("0") else text


def fmt_interval(mean: float, halfwidth: float) -> str:
    return f"{fmt_pct(mean)}±{fmt_halfwidth(halfwidth)}"


def _add_learner_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--no-grouping",
        action="store_true",
        help="one branch per discrete value instead of grouped values",
    )
    parser.add_argument("--cf", type=float, default=0.25, help="pruning confidence")
    parser.add_argument(
        "--min-branch", type=int, default=2, help="minimum rows per branch"
    )
    parser.add_argument(
        "--no-gain-guard",
        action="store_true",
        help="drop the mean-gain restriction on split selection",
    )


def _add_cv_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=10, help="number of folds")
    parser.add_argument("--seed", type=int, default=0, help="fold shuffling seed")
    parser.add_argument(
        "--stratify",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="stratify folds by class",
    )


def _add_dataset_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", help="JSON-lines corpus file")
    parser.add_argument(
        "--subset", choices=CORE_SUBSETS, help="core subset (occurrence target)"
    )
    parser.add_argument(
        "--target",
        choices=("occurrence", "placement"),
        default="occurrence",
        help="learning target for corpus input",
    )
    parser.add_argument("--names", help="names file (with --data)")
    parser.add_argument("--data", help="data file (with --names)")
    parser.add_argument("--mapping", help="info relation mapping file")


def _add_format_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=("table", "structured"),
        default="table",
        help="human table or versioned JSON",
    )


def _learner_params(args: argparse.Namespace) -> LearnerParams:
    return LearnerParams(
        grouping=not args.no_grouping,
        min_branch_instances=args.min_branch,
        cf=args.cf,
        gain_guard=not args.no_gain_guard,
    )


def _info_mapping(args: argparse.Namespace):
    if getattr(args, "mapping", None):
        return read_info_relation_mapping(args.mapping)
    return None


def _load_dataset(args: argparse.Namespace):
    if args.names or args.data:
        if not (args.names and args.data):
            raise ValueError("--names and --data must be given together")
        if args.corpus:
            raise ValueError("give either --corpus or --names/--data, not both")
        return read_names_data(args.names, args.data)
    if not args.corpus:
        raise ValueError("no input: give --corpus or --names/--data")
    records = read_corpus(args.corpus, _info_mapping(args))
    parts = partition_by_subset(records)
    if args.target == "placement":
        selected = placement_subset(parts["core2"])
    else:
        if not args.subset:
            raise ValueError("--subset is required for the occurrence target")
        selected = parts[args.subset]
    return to_learning_dataset(selected, args.target)


def cmd_validate(args: argparse.Namespace) -> int:
    records = read_corpus(args.corpus, _info_mapping(args))
    violations = validate_corpus(records)
    for v in violations:
        print(f"{v.record_id}\t{v.rule}\t{v.message}")
    return EXIT_VIOLATIONS if violations else EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args)
    params = _learner_params(args)
    tree = prune(build_tree(dataset, params), dataset, params.cf)
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(tree_to_dict(tree), handle, indent=2)
        handle.write("\n")
    summary = summarize(tree)
    if args.format == "structured":
        print(
            json.dumps(
                {
                    "version": 1,
                    "nodes": summary.node_count,
                    "features": [[level, name] for level, name in summary.features],
                    "out": args.out,
                }
            )
        )
    else:
        print(f"{summary.node_count} nodes -> {args.out}")
        for level, name in summary.features:
            print(f"  {level}. {name}")
    return EXIT_OK


def cmd_xval(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args)
    params = _learner_params(args)
    cv = cross_validate(
        dataset, params, k=args.k, seed=args.seed, stratify=args.stratify
    )
    if args.format == "structured":
        print(
            json.dumps(
                {
                    "version": 1,
                    "k": cv.k,
                    "error": cv.mean_observed,
                    "halfwidth95": cv.halfwidth95,
                    "estimated_error": cv.mean_estimated,
                    "mean_nodes": cv.mean_nodes,
                    "fold_observed": list(cv.fold_observed),
                    "fold_estimated": list(cv.fold_estimated),
                }
            )
        )
    else:
        print(fmt_interval(cv.mean_observed, cv.halfwidth95))
        print(f"estimated error {fmt_pct(cv.mean_estimated)}")
        print(f"mean nodes {cv.mean_nodes:.1f}")
    return EXIT_OK


def _render_report_table(report) -> str:
    lines = [f"Dataset         {report.subset} ({report.target})"]
    lines.append(f"Baseline        {fmt_pct(report.baseline)}")
    if report.single_features:
        cells = ", ".join(
            f"{s.attribute}: {fmt_interval(*s.cv.interval)}"
            for s in report.single_features
        )
    else:
        cells = "(none)"
    lines.append(f"Best features   {cells}")
    selected = report.selected
    lines.append(
        f"Best tree       {fmt_interval(*selected.cv.interval)} "
        f"({selected.node_count} nodes) [{selected.name}]"
    )
    for level, name in selected.features:
        lines.append(f"  {level}. {name}")
    if report.error_reduction is not None:
        lines.append(f"Error reduction {report.error_reduction:.1f}%")
    return "\n".join(lines)


def cmd_experiment(args: argparse.Namespace) -> int:
    records = read_corpus(args.corpus, _info_mapping(args))
    params = _learner_params(args)
    plan = ExperimentPlan(
        target=args.target,
        subset=args.subset if args.target == "occurrence" else None,
        k=args.k,
        seed=args.seed,
        stratify=args.stratify,
        params=params,
    )
    if args.target == "occurrence":
        if not args.subset:
            raise ValueError("--subset is required for the occurrence target")
        report = run_occurrence_experiment(records, args.subset, plan)
    else:
        report = run_placement_experiment(records, plan)
    payload = json.dumps(report_to_dict(report), indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(payload)
    if args.format == "structured":
        sys.stdout.write(payload)
    else:
        print(_render_report_table(report))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as handle:
            spec = spec_from_dict(json.load(handle))
    elif args.preset == "full":
        spec = default_full_spec()
    else:
        spec = default_core_spec()
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    records = generate_corpus(spec)
    write_corpus(records, args.out)
    print(f"wrote {len(records)} record(s) -> {args.out}")
    return EXIT_OK


def cmd_stats_chi2(args: argparse.Namespace) -> int:
    result = chi_square_2x2(args.a, args.b, args.c, args.d)
    if args.format == "structured":
        print(
            json.dumps(
                {
                    "version": 1,
                    "chi2": result.chi2,
                    "df": result.df,
                    "significant_at_001": result.significant_at_001,
                }
            )
        )
    else:
        verdict = "p<.001" if result.significant_at_001 else "ns"
        print(f"{result.chi2:.3f} df={result.df} {verdict}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuetree",
        description="Decision trees for discourse cue occurrence and placement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check corpus coding rules")
    p_validate.add_argument("corpus")
    p_validate.add_argument("--mapping", help="info relation mapping file")
    p_validate.set_defaults(func=cmd_validate)

    p_train = sub.add_parser("train", help="grow and prune one tree")
    _add_dataset_source(p_train)
    _add_learner_flags(p_train)
    _add_format_flag(p_train)
    p_train.add_argument("--out", required=True, help="tree file to write")
    p_train.set_defaults(func=cmd_train)

    p_xval = sub.add_parser("xval", help="cross-validate one dataset")
    _add_dataset_source(p_xval)
    _add_learner_flags(p_xval)
    _add_cv_flags(p_xval)
    _add_format_flag(p_xval)
    p_xval.set_defaults(func=cmd_xval)

    p_exp = sub.add_parser("experiment", help="run the full replication protocol")
    p_exp.add_argument("corpus")
    p_exp.add_argument(
        "--target", choices=("occurrence", "placement"), required=True
    )
    p_exp.add_argument("--subset", choices=CORE_SUBSETS)
    p_exp.add_argument("--mapping", help="info relation mapping file")
    p_exp.add_argument("--out", help="write the structured report here")
    _add_learner_flags(p_exp)
    _add_cv_flags(p_exp)
    _add_format_flag(p_exp)
    p_exp.set_defaults(func=cmd_experiment)

    p_synth = sub.add_parser("synth", help="generate a synthetic corpus")
    p_synth.add_argument("out")
    p_synth.add_argument("--spec", help="synth spec JSON file")
    p_synth.add_argument(
        "--preset",
        choices=("core", "full"),
        default="core",
        help="built-in corpus shape when no --spec is given",
    )
    p_synth.add_argument("--seed", type=int, default=None, help="override the seed")
    p_synth.set_defaults(func=cmd_synth)

    p_stats = sub.add_parser("stats", help="small statistics helpers")
    stats_sub = p_stats.add_subparsers(dest="stat", required=True)
    p_chi2 = stats_sub.add_parser("chi2", help="2x2 chi-square test")
    for cell in "abcd":
        p_chi2.add_argument(cell, type=int)
    _add_format_flag(p_chi2)
    p_chi2.set_defaults(func=cmd_stats_chi2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleFoldsError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
