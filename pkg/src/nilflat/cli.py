"""Command line interface: ``nilflat COMMAND ...``.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import InputError
from .modelfile import load_model
from .report import run

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _pair(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _csv(text: str) -> list:
    return [p.strip() for p in text.split(",")]


def _epsilon(text: str) -> int:
    if text not in ("1", "+1", "-1"):
        raise argparse.ArgumentTypeError("epsilon must be +1 or -1")
    return int(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nilflat", description="Flat nilpotent groups from 3-vectors, checked exactly.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("check", "construct", "classify", "verify-npk", "derham", "lattice", "centralizer"):
        p = sub.add_parser(name)
        p.add_argument("file")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled test vectors")
        p.add_argument("--json", metavar="OUT", help="also write the report to OUT")
    p = sub.add_parser("mul")
    p.add_argument("file")
    p.add_argument("--x", type=_csv, required=True)
    p.add_argument("--y", type=_csv, required=True)
    p.add_argument("--json", metavar="OUT")
    p = sub.add_parser("random-suite")
    p.add_argument("--signature", type=_pair)
    p.add_argument("--dim", type=int, help="shorthand for --signature n/2,n/2")
    p.add_argument("--type", type=_pair, dest="type_pq")
    p.add_argument("--epsilon", type=_epsilon)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", metavar="OUT")
    return parser


def _dispatch(args) -> object:
    if args.command == "random-suite":
        signature = args.signature
        if signature is None:
            if args.dim is None or args.dim % 2:
                raise InputError("random-suite needs --signature K,L or an even --dim")
            signature = (args.dim // 2, args.dim // 2)
        elif args.dim is not None and sum(signature) != args.dim:
            raise InputError("--dim disagrees with --signature")
        return run("random-suite", seed=args.seed, signature=signature,
                   type_pq=args.type_pq, epsilon=args.epsilon, count=args.count)
    model = load_model(args.file)
    if args.command == "mul":
        return run("mul", model, x=args.x, y=args.y)
    return run(args.command, model, seed=args.seed)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = _dispatch(args)
    except InputError as exc:
        print(f"nilflat: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = report.to_json()
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
