"""Command-line entry point.

    cayleynet run <config|builtin-name> [--output-dir D] [--seed S] [--quiet]
    cayleynet compare <config|builtin-name> [--output-dir D] [--seed S] [--quiet]
    cayleynet gen-circuit <name> [--output-dir D]
    cayleynet verify <matrix.json> [<reference.json>]

On failure a single line ``error: <category>: <message>`` goes to stderr
and the exit code identifies the category.
"""
import argparse
import json
import sys
from pathlib import Path

from .harness import ConfigError, compare_methods, load_config, run_experiment
from .linalg import LinalgError, load_matrix
from .quantum import BUILTIN_CIRCUITS, CircuitError, circuit_to_json, fidelity, unitary_error
from .stiefel import BacktrackingError

EXIT_CODES = {"usage": 2, "config": 3, "io": 4, "numerical": 5, "internal": 70}


class CLIError(Exception):
    def __init__(self, category, message):
        self.category = category
        super().__init__(message)


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def cmd_run(args):
    cfg = _load(args)
    report = run_experiment(cfg, output_dir=args.output_dir)
    if not args.quiet:
        out = args.output_dir or cfg.output_dir
        print(
            f"{report.method}: epochs={report.epochs_run} loss={report.final_loss:.6e} "
            f"fidelity={report.final_fidelity:.9f} unitary_error={report.final_unitary_error:.3e} "
            f"({report.wall_time_ms} ms) -> {out}"
        )


def cmd_compare(args):
    cfg = _load(args)
    comparison = compare_methods(cfg, output_dir=args.output_dir)
    if not args.quiet:
        print(comparison.table())


def cmd_gen_circuit(args):
    if args.name not in BUILTIN_CIRCUITS:
        raise CLIError("usage", f"unknown circuit {args.name!r}; choose from {sorted(BUILTIN_CIRCUITS)}")
    text = circuit_to_json(BUILTIN_CIRCUITS[args.name]())
    if args.output_dir:
        path = Path(args.output_dir) / f"{args.name}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        if not args.quiet:
            print(path)
    else:
        sys.stdout.write(text)


def cmd_verify(args):
    w = load_matrix(args.matrix)
    if w.shape[0] != w.shape[1]:
        raise CLIError("numerical", f"matrix is not square: {w.shape}")
    result = {"unitary_error": unitary_error(w)}
    if args.reference:
        result["fidelity"] = fidelity(load_matrix(args.reference), w)
    print(json.dumps(result))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cayleynet",
        description="Learn circuit unitaries with Cayley-retraction descent on the unitary group.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
        ("run", cmd_run, "run one experiment"),
        ("compare", cmd_compare, "run cayley and gram_schmidt on the same data"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="config JSON file or built-in name (haar_2q, benchmark_5q)")
        p.add_argument("--output-dir", help="override the config's output_dir")
        p.add_argument("--seed", type=int, help="override the training seed")
        p.add_argument("--quiet", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("gen-circuit", help="emit a built-in circuit spec")
    p.add_argument("name", help=f"one of {sorted(BUILTIN_CIRCUITS)}")
    p.add_argument("--output-dir", help="write <name>.json here instead of stdout")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_gen_circuit)

    p = sub.add_parser("verify", help="report unitary error (and fidelity vs a reference)")
    p.add_argument("matrix")
    p.add_argument("reference", nargs="?")
    p.set_defaults(func=cmd_verify)
    return parser


def _categorize(exc):
    if isinstance(exc, CLIError):
        return exc.category
    if isinstance(exc, (ConfigError, CircuitError)):
        return "config"
    if isinstance(exc, (LinalgError, BacktrackingError, FloatingPointError)):
        return "numerical"
    if isinstance(exc, (OSError, json.JSONDecodeError)):
        return "io"
    if isinstance(exc, ValueError):
        return "config"
    return "internal"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001
        category = _categorize(exc)
        msg = " ".join(str(exc).split())
        print(f"error: {category}: {msg}", file=sys.stderr)
        return EXIT_CODES[category]
    return 0


if __name__ == "__main__":
    sys.exit(main())
