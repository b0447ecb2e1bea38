"""Command line front end: obfuscate, evaluate, assets-verify, superclasses.

Exit codes: 0 success, 1 usage or configuration error, 2 data or
verification failure. Progress goes to stderr; machine-readable output
goes to files, except the final worst-case accuracy line on stdout.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .assets import AssetPackError, load_pack, verify_pack
from .evaluation import (
    CoverageError,
    EvalReport,
    confusion_matrix,
    emit_report,
    holdout_choice_histogram,
    load_prediction_csv,
    oracle_combination,
    topk_accuracy,
    unweighted_accuracy,
    weighted_accuracy,
    worst_case_accuracy,
)
from .obfuscations import ALL_NAMES, HOLDOUT_NAMES, TRAINING_NAMES, UnknownObfuscationError
from .pipeline import read_labels, run_corpus
from .ranges import ParamRanges, load_default_ranges
from .stylize import ExternalCommandBackend, FileCacheBackend, NullBackend
from .superclasses import DEFAULT_TABLE

ASSETS_ENV_VAR = "OBFUSCATION_BENCH_ASSETS"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(ValueError):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _resolve_obfuscations(selection: list[str], allow_holdout: bool) -> list[str]:
    names: list[str] = []
    for token in selection:
        for part in token.split(","):
            part = part.strip()
            if not part:
                continue
            if part == "all-train":
                names.extend(TRAINING_NAMES)
            elif part == "holdout":
                names.extend(HOLDOUT_NAMES)
            elif part in ALL_NAMES:
                names.append(part)
            else:
                raise UnknownObfuscationError(part)
    names = sorted(set(names))
    if not names:
        raise UsageError("no obfuscations selected")
    held = [n for n in names if n in HOLDOUT_NAMES]
    if held and not allow_holdout:
        raise UsageError(
            f"hold-out obfuscations {held} require --allow-holdout"
        )
    return names


def _load_ranges(path: str | None) -> ParamRanges:
    if path is None:
        return load_default_ranges()
    return ParamRanges.from_file(path)


def _make_backend(args) -> object:
    if args.backend == "none":
        return NullBackend()
    if args.backend == "file-cache":
        if not args.backend_root:
            raise UsageError("--backend file-cache requires --backend-root")
        return FileCacheBackend(args.backend_root)
    if args.backend == "command":
        if not (args.backend_command and args.backend_root):
            raise UsageError("--backend command requires --backend-command and --backend-root")
        return ExternalCommandBackend(
            args.backend_command.split(), args.backend_root, parallelism=args.workers
        )
    raise UsageError(f"unknown backend {args.backend!r}")


def cmd_obfuscate(args) -> int:
    names = _resolve_obfuscations(args.obfuscations, args.allow_holdout)
    ranges = _load_ranges(args.ranges)
    assets_path = args.assets or os.environ.get(ASSETS_ENV_VAR)
    pack = None
    if assets_path:
        pack = load_pack(assets_path)
    backend = _make_backend(args)
    _log(f"obfuscating with {len(names)} obfuscations, seed {args.seed}")
    manifest = run_corpus(
        corpus_dir=args.corpus,
        labels_file=args.labels,
        ranges=ranges,
        pack=pack,
        obfuscation_names=names,
        global_seed=args.seed,
        out_dir=args.out,
        backend=backend,
        workers=args.workers,
    )
    _log(f"wrote {len(manifest.records)} records, {len(manifest.failures)} failures")
    if manifest.failures:
        for failure in manifest.failures[:20]:
            _log(f"  failed: {failure}")
        return EXIT_DATA
    return EXIT_OK


def cmd_evaluate(args) -> int:
    labels = read_labels(args.labels)
    table = DEFAULT_TABLE
    pred_sets = [load_prediction_csv(p) for p in args.predictions]
    _log(f"loaded {len(pred_sets)} prediction sets over {len(labels)} labels")

    report = EvalReport(model=args.model, per_obfuscation_weighted={})
    report.metadata["aggregated_inputs"] = sorted(
        ps.obfuscation for ps in pred_sets if ps.aggregated
    )
    for ps in pred_sets:
        report.per_obfuscation_weighted[ps.obfuscation] = weighted_accuracy(ps, labels, table)
        report.per_obfuscation_unweighted[ps.obfuscation] = unweighted_accuracy(ps, labels, table)
    for k in args.k:
        report.topk[str(k)] = {
            ps.obfuscation: topk_accuracy(ps, labels, table, k) for ps in pred_sets
        }
    if args.confusion:
        for ps in pred_sets:
            report.confusion[ps.obfuscation] = confusion_matrix(ps, labels, table).matrix.tolist()
    if args.histogram and len(pred_sets) >= 3:
        hist = holdout_choice_histogram(pred_sets, labels, table)
        report.metadata["holdout_choice_histogram"] = {
            "|".join(combo): acc for combo, acc in sorted(hist.items())
        }
    worst = worst_case_accuracy(pred_sets, labels, table, weighted=not args.unweighted)
    report.worst_case_holdout = worst

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for fmt in args.formats:
        suffix = {"json": "json", "csv": "csv", "svg-heatmap": "svg"}[fmt]
        emit_report(report, fmt, out_dir / f"report_{args.model}.{suffix}")
        _log(f"wrote report_{args.model}.{suffix}")
    print(f"{worst:.4f}")
    return EXIT_OK


def cmd_assets_verify(args) -> int:
    assets_path = args.assets or os.environ.get(ASSETS_ENV_VAR)
    if not assets_path:
        raise UsageError(f"no asset directory given (flag or {ASSETS_ENV_VAR})")
    problems = verify_pack(Path(assets_path))
    if problems:
        for problem in problems:
            _log(f"invalid: {problem}")
        return EXIT_DATA
    _log("asset pack valid")
    return EXIT_OK


def cmd_superclasses(args) -> int:
    sys.stdout.write(DEFAULT_TABLE.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obfuscation-bench",
        description="Deterministic image obfuscation pipeline and super-class benchmark.",
    )
    parser.add_argument(
        "--version",
        action="store_true",
        help="print tool, ranges-config and super-class-table versions",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("obfuscate", help="obfuscate a corpus of images")
    p.add_argument("--corpus", required=True, help="directory of input images")
    p.add_argument("--labels", required=True, help="CSV of image_id,class_id")
    p.add_argument("--assets", help=f"asset pack directory (default ${ASSETS_ENV_VAR})")
    p.add_argument("--ranges", help="parameter ranges JSON (default: embedded config)")
    p.add_argument("--seed", type=int, default=0, help="global seed")
    p.add_argument(
        "--obfuscations",
        nargs="+",
        required=True,
        help="names, or the groups all-train / holdout",
    )
    p.add_argument("--allow-holdout", action="store_true", help="permit hold-out obfuscations")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=["none", "file-cache", "command"], default="none")
    p.add_argument("--backend-root", help="cache root or style directory for the backend")
    p.add_argument("--backend-command", help="argv prefix for the command backend")
    p.set_defaults(func=cmd_obfuscate)

    p = sub.add_parser("evaluate", help="score prediction files")
    p.add_argument("--labels", required=True)
    p.add_argument("--predictions", nargs="+", required=True, help="one CSV per obfuscation")
    p.add_argument("--model", default="model")
    p.add_argument("--out", required=True, help="report output directory")
    p.add_argument(
        "--formats", nargs="+", choices=["json", "csv", "svg-heatmap"], default=["json"]
    )
    p.add_argument("--k", type=lambda s: [int(x) for x in s.split(",")], default=[])
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--confusion", action="store_true")
    p.add_argument("--histogram", action="store_true", help="all 3-subset worst-case accuracies")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("assets-verify", help="validate an asset pack")
    p.add_argument("--assets", help=f"asset pack directory (default ${ASSETS_ENV_VAR})")
    p.set_defaults(func=cmd_assets_verify)

    p = sub.add_parser("superclasses", help="print the super-class table JSON")
    p.set_defaults(func=cmd_superclasses)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        ranges = load_default_ranges()
        print(
            f"obfuscation-bench {__version__} "
            f"ranges-config {ranges.version} superclass-table {DEFAULT_TABLE.version}"
        )
        return EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (CoverageError, AssetPackError) as exc:
        _log(f"error: {exc}")
        return EXIT_DATA
    except (UsageError, UnknownObfuscationError, FileNotFoundError, ValueError, KeyError) as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
