"""Command line: ``qdtree {train,predict,compare,experiment}``.

Exit codes: 0 success, 1 trees differ under ``--require-equal``, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .compare import SchemaMismatch, compare_trees
from .dataset import DataError, SchemaError, load_csv, load_schema, parse_records
from .experiment import format_csv, format_table, resolve_spec, run_experiment, with_overrides
from .qaoa import QaoaConfig
from .tree import GrowParams, TreeFormatError, count_nodes, deserialize, grow_tree, height, predict, serialize

EXIT_OK, EXIT_UNEQUAL, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _read_tree(path):
    try:
        return deserialize(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read tree file {path}: {exc.strerror}") from None
    except TreeFormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _add_qaoa_flags(p, defaults: bool):
    d = QaoaConfig() if defaults else None
    p.add_argument("--p", type=int, default=d and d.p, help="QAOA levels")
    p.add_argument("--shots", type=int, default=d and d.shots)
    p.add_argument("--seed", type=int, default=d and d.seed)
    p.add_argument("--grid", type=int, default=d and d.grid, help="calibration grid points per axis")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for subtree growth")


def cmd_train(args) -> int:
    for path in (args.schema, args.data):
        if not Path(path).is_file():
            raise CliError(f"no such file: {path}")
    dataset = load_csv(args.data, load_schema(args.schema))
    params = GrowParams(
        args.height,
        args.backend,
        QaoaConfig(p=args.p, shots=args.shots, seed=args.seed, grid=args.grid),
        args.split_mode,
    )
    start = time.perf_counter()
    tree = grow_tree(dataset, params, jobs=args.jobs)
    elapsed = time.perf_counter() - start
    Path(args.out).write_text(serialize(tree), encoding="utf-8")
    print(f"nodes {count_nodes(tree.root)} height {height(tree.root)} elapsed {elapsed:.2f}s -> {args.out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    tree = _read_tree(args.tree)
    try:
        with open(args.data, encoding="utf-8") as fh:
            columns, _ = parse_records(fh.readlines(), tree.schema, with_class=False)
    except OSError as exc:
        raise CliError(f"cannot read {args.data}: {exc.strerror}") from None
    labels = tree.schema.class_labels
    n = len(columns[0]) if columns else 0
    out = [labels[predict(tree.root, [col[i] for col in columns])] for i in range(n)]
    sys.stdout.write("".join(label + "\n" for label in out))
    return EXIT_OK


def cmd_compare(args) -> int:
    reference, candidate = _read_tree(args.reference), _read_tree(args.candidate)
    try:
        report = compare_trees(reference, candidate)
    except SchemaMismatch as exc:
        raise CliError(str(exc)) from None
    sys.stdout.write(report.to_text())
    if args.require_equal and report.matched != report.total:
        return EXIT_UNEQUAL
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = resolve_spec(args.spec, args.data_dir)
    spec = with_overrides(spec, args.heights, p=args.p, shots=args.shots, seed=args.seed, grid=args.grid)
    out_dir = Path(args.out) if args.out else Path("runs") / spec.name
    rows = run_experiment(spec, out_dir, jobs=args.jobs)
    sys.stdout.write(format_table(spec.name, rows))
    if args.csv:
        Path(args.csv).write_text(format_csv(spec.name, rows), encoding="utf-8")
    if any(r.error for r in rows):
        return EXIT_ERROR
    if args.require_equal and any(r.q != 1.0 for r in rows):
        return EXIT_UNEQUAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdtree", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="grow a tree and write it to a file")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--backend", choices=("exhaustive", "qaoa"), default="exhaustive")
    p.add_argument("--split-mode", choices=("multiway", "binary"), default="multiway")
    p.add_argument("--out", required=True)
    _add_qaoa_flags(p, defaults=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label data rows with a tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("compare", help="Q_tree of a candidate tree against a reference")
    p.add_argument("reference")
    p.add_argument("candidate")
    p.add_argument("--require-equal", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("experiment", help="classical vs QAOA trees over a height list")
    p.add_argument("spec", help="car, nursery, abalone, connect-4, or a JSON spec file")
    p.add_argument("--data-dir", type=Path, default=None, help="default: $QDTREE_DATA or ./data")
    p.add_argument("--heights", type=int, nargs="+")
    p.add_argument("--out", help="directory for tree files (default runs/<name>)")
    p.add_argument("--csv", help="also write the results table as CSV")
    p.add_argument("--require-equal", action="store_true")
    _add_qaoa_flags(p, defaults=False)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, SchemaError, DataError, OSError, ValueError) as exc:
        print(f"qdtree: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
