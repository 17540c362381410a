"""Command line entry point: ``python -m distillery {example,distill,share}``."""

from __future__ import annotations

import argparse
import json
import sys

from .densmat import state_from_dict
from .harness import (
    ShareExperimentExhausted,
    check_example,
    emit_report,
    reproduce_example,
    run_share_experiment,
)
from .protocols.classify import PROTOCOLS, classify_distillability
from .sampling import SampleConfig

EXIT_OK, EXIT_USAGE, EXIT_EXHAUSTED, EXIT_MISMATCH = 0, 1, 2, 3

FAMILY_ALIASES = {"pure": "pure_haar", "bds": "bds_uniform"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="distillery", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("example", help="rerun the qutrit worked example and check it")

    dist = sub.add_parser("distill", help="classify one state from a JSON file")
    dist.add_argument("--state", required=True, help="state file (dims, ab_split, re, im)")
    dist.add_argument("--protocol", default="fimax", choices=PROTOCOLS)
    dist.add_argument("--max-iters", type=int, default=10)

    share = sub.add_parser("share", help="share of distillable low-fidelity states")
    share.add_argument("--family", required=True,
                       choices=["pure_haar", "pure", "bds_uniform", "bds", "gbds"])
    share.add_argument("--d", type=int, required=True)
    share.add_argument("--restriction", default="normal", choices=["normal", "strict"])
    share.add_argument("--n", type=int, default=1000, help="accepted states (pure/bds)")
    share.add_argument("--seed", type=int, default=0)
    share.add_argument("--protocols", default="fimax", help="comma separated list")
    share.add_argument("--gbds-bases", type=int, default=100)
    share.add_argument("--gbds-per-basis", type=int, default=100)
    share.add_argument("--max-iters", type=int, default=10)
    share.add_argument("--max-attempts", type=int, default=None)
    share.add_argument("--out", help="report file (stdout if omitted)")
    share.add_argument("--format", default="json", choices=["json", "csv"])
    return parser


def _example() -> int:
    record = reproduce_example()
    print(json.dumps(record, indent=2))
    problems = check_example(record)
    for p in problems:
        print(f"MISMATCH {p}", file=sys.stderr)
    return EXIT_MISMATCH if problems else EXIT_OK


def _distill(args) -> int:
    with open(args.state) as fh:
        rho = state_from_dict(json.load(fh))
    verdict = classify_distillability(rho, args.protocol, args.max_iters)
    for i, f in enumerate(verdict.trace, 1):
        print(f"iter {i}: fidelity {f:.10f}")
    label = "distillable" if verdict.distillable else "not distillable"
    print(f"{label} ({verdict.reason}) after {verdict.iterations_used} iteration(s), "
          f"final fidelity {verdict.final_fidelity:.10f}")
    return EXIT_OK


def _write(data: bytes, out) -> None:
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _share(args) -> int:
    protocols = [p.strip() for p in args.protocols.split(",") if p.strip()]
    unknown = [p for p in protocols if p not in PROTOCOLS]
    if unknown or not protocols:
        raise UsageError(f"unknown protocol(s) {unknown}; choose from {', '.join(PROTOCOLS)}")
    config = SampleConfig(
        family=FAMILY_ALIASES.get(args.family, args.family),
        d=args.d,
        restriction=args.restriction,
        target_count=args.n,
        seed=args.seed,
        gbds_bases=args.gbds_bases,
        gbds_states_per_basis=args.gbds_per_basis,
        max_attempts=args.max_attempts,
    )
    try:
        report = run_share_experiment(config, protocols, args.max_iters)
    except ShareExperimentExhausted as exc:
        print(f"filter exhausted: {exc}", file=sys.stderr)
        _write(emit_report(exc.report, args.format), args.out)
        return EXIT_EXHAUSTED
    _write(emit_report(report, args.format), args.out)
    print(f"{report.sample_count} states classified in {report.runtime:.2f} s", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "example":
            return _example()
        if args.command == "distill":
            return _distill(args)
        return _share(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # bad dimension, unsupported protocol at this d, malformed state file
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
