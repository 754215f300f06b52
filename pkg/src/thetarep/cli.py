"""``thetarep`` command line."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cli_reports import DEFAULT_SEED, TARGETS, RunConfig, run


def _tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetarep", description="Theta filtrations of GL2(F_q) modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--p", type=int, required=True, help="characteristic")
        sp.add_argument("--f", type=int, default=1, help="degree of F_q over F_p")
        sp.add_argument("--json", dest="json_path", help="write the JSON report here ('-' for stdout)")
        sp.add_argument("--out", type=Path, help="directory for default output files")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("-v", "--verbose", action="count", default=0)

    sp = sub.add_parser("decompose", help="decompose m ⊗ n into weights")
    common(sp)
    sp.add_argument("--m", type=_tuple, required=True)
    sp.add_argument("--n", type=_tuple, required=True)

    sp = sub.add_parser("filtration", help="build V_r / V_r^(m+1) cell by cell")
    common(sp)
    sp.add_argument("--r", type=_tuple, required=True)
    sp.add_argument("--m", type=_tuple, required=True)
    sp.add_argument("--force", action="store_true", help="skip the r_i >= m + mq + q bound")
    sp.add_argument("--dot", dest="dot_dir", type=Path, help="directory for DOT files")

    sp = sub.add_parser("jh", help="composition factors of ind(d^r)")
    common(sp)
    sp.add_argument("--r", type=_tuple, required=True)
    sp.add_argument("--conjectural", action="store_true", help="also print the conjectural f=2 grouping")
    sp.add_argument("--dot", dest="dot_dir", type=Path, help="directory for DOT files")

    sp = sub.add_parser("verify", help="run exact verification suites")
    common(sp)
    sp.add_argument("--target", choices=TARGETS, default="all")
    sp.add_argument("--r", type=_tuple)
    sp.add_argument("--m", type=_tuple)
    sp.add_argument("--n", type=_tuple)
    sp.add_argument("--k", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    opts = vars(args)
    config = RunConfig(**{k: v for k, v in opts.items() if v is not None or k in ("json_path", "out")})
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
