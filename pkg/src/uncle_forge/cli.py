"""Command-line entry point: one subcommand per experiment, plus `all`.

Exit status 0 means every acceptance check of the requested experiments
passed, 2 means some check failed, and 1 signals an execution error
(bad arguments, missing files, numerical breakdown).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace

from .experiments import EXPERIMENTS, ExperimentConfig, run


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; reserve 2 for failed checks
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_sizes(text: str) -> tuple[int, ...]:
    """Either 'A..B' (inclusive) or a comma-separated list."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(t) for t in text.split(",") if t)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t)


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", metavar="PATH",
                    help="JSON file with configuration fields")
    sp.add_argument("--seed", type=int, metavar="U64")
    sp.add_argument("--out", metavar="DIR", dest="out_dir",
                    help="output directory (default: $UNCLE_FORGE_OUT or ./runs)")
    sp.add_argument("--sizes", type=_parse_sizes, metavar="A..B",
                    help="system sizes, 'A..B' or comma list")
    sp.add_argument("--r-values", type=_parse_sizes, metavar="A..B",
                    dest="r_values", help="region widths, 'A..B' or comma list")
    sp.add_argument("--eps-grid", type=_parse_floats, metavar="E1,E2,...",
                    dest="eps_grid", help="decreasing perturbation strengths")
    sp.add_argument("--backend", choices=("dense", "sparse", "auto"))
    sp.add_argument("--tau-null", type=float, dest="tau_null")
    sp.add_argument("--tau-gap", type=float, dest="tau_gap")
    sp.add_argument("--json", action="store_true", dest="json_out",
                    help="print the full JSON report to stdout")
    sp.add_argument("--quiet", action="store_true")
    sp.add_argument("--force", action="store_true",
                    help="recompute even when a cached report exists")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uncle-forge",
                     description="Parent and uncle Hamiltonian experiments")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser,
                                metavar="|".join(EXPERIMENTS + ("all",)))
    for name in EXPERIMENTS + ("all",):
        _add_common(sub.add_parser(name))
    return parser


def _config_from_args(name: str, args: argparse.Namespace) -> ExperimentConfig:
    base: dict = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
        base.pop("experiment", None)
    cfg = ExperimentConfig(experiment=name)
    valid = {f.name for f in fields(ExperimentConfig)}
    unknown = set(base) - valid
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    for key in ("sizes", "r_values", "eps_grid"):
        if key in base and base[key] is not None:
            base[key] = tuple(base[key])
    cfg = replace(cfg, **base)
    overrides = {}
    for key in ("seed", "sizes", "r_values", "eps_grid", "backend",
                "tau_null", "tau_gap", "out_dir", "force", "quiet"):
        val = getattr(args, key, None)
        if val not in (None, False):
            overrides[key] = val
    return replace(cfg, **overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    names = EXPERIMENTS if args.command == "all" else (args.command,)
    try:
        docs = []
        all_passed = True
        for name in names:
            cfg = _config_from_args(name, args)
            result, path, cached = run(cfg)
            docs.append(result.to_doc())
            all_passed = all_passed and result.passed
            if not args.quiet and not args.json_out:
                origin = "cached" if cached else f"{result.wall_time_s:.1f}s"
                status = "PASS" if result.passed else "FAIL"
                print(f"{name}: {status} ({len(result.records)} records, "
                      f"{origin}) -> {path}")
                for check, ok in result.checks.items():
                    print(f"  [{'ok' if ok else 'FAILED'}] {check}")
        if args.json_out:
            payload = docs[0] if len(docs) == 1 else docs
            print(json.dumps(payload, sort_keys=True, indent=1))
        return 0 if all_passed else 2
    except Exception as err:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"uncle-forge: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
