"""Command line entry point: ``binpower {allocate,kdist,sweep,verify}``.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from contextlib import contextmanager
from pathlib import Path

from . import harness
from .allocator import optimal_binary
from .ratecore import ChannelState, LinkBudget
from .scenario import ScenarioConfig, load_config

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

# flags whose values may start with '-' (negative dB values)
_VALUE_FLAGS = ("--snr-db", "--snr-db-range", "--gains")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _join_negative_values(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            value = next(it, None)
            out.append(tok if value is None else f"{tok}={value}")
        else:
            out.append(tok)
    return out


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _snr_range(text: str):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
        return harness.snr_range(lo, hi, step)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")


def _scenario_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key=value scenario file; flags override it")
    p.add_argument("--density", type=float, help="users per unit area")
    p.add_argument("--radius", type=float)
    p.add_argument("--alpha", type=float, help="path-loss exponent (> 2)")
    p.add_argument("--fading", choices=["rayleigh", "none"])
    p.add_argument("--fixed-n", type=int, help="fixed user count instead of Poisson")
    p.add_argument("--min-users", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="output CSV (default: stdout)")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binpower", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("allocate", help="optimal allocation for one channel state")
    p.add_argument("--gains", type=_floats, required=True)
    p.add_argument("--snr-db", type=float, required=True)

    p = sub.add_parser("kdist", help="histogram of the optimal number of active users")
    _scenario_flags(p)
    p.add_argument("--snr-db", type=_floats, required=True)
    p.add_argument("--trials", type=int, default=100_000)

    p = sub.add_parser("sweep", help="mean sum-rate per policy over an SNR grid")
    _scenario_flags(p)
    p.add_argument("--snr-db-range", type=_snr_range, default=harness.snr_range(-30, 30, 5))
    p.add_argument("--policies", default="optimal,heuristic,tdma,wb,sic:0.9,sic:1.0")
    p.add_argument("--trials", type=int, default=10_000)

    p = sub.add_parser("verify", help="run the oracle and property suites")
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _scenario(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    changes = {
        "density": args.density,
        "radius": args.radius,
        "pathloss_exponent": args.alpha,
        "fading": args.fading,
        "fixed_n": args.fixed_n,
        "min_users": args.min_users,
        "seed": args.seed,
    }
    return cfg.with_(**{k: v for k, v in changes.items() if v is not None})


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _cmd_allocate(args) -> int:
    result = optimal_binary(ChannelState(args.gains), LinkBudget.from_db(args.snr_db))
    active = sorted(result.active_set)
    print(f"k_star: {result.k_star}")
    print(f"active_set: {','.join(str(i) for i in active)}")
    print(f"rate_nats: {result.rate!r}")
    print(f"rate_bits: {result.rate / math.log(2.0)!r}")
    return EXIT_OK


def _cmd_kdist(args) -> int:
    hists = harness.run_kdist(_scenario(args), args.snr_db, args.trials, args.workers)
    with _output(args.out) as fh:
        harness.write_kdist_csv(hists, fh)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    records = harness.run_sweep(_scenario(args), args.snr_db_range, args.policies,
                                args.trials, args.workers)
    with _output(args.out) as fh:
        harness.write_sweep_csv(records, fh)
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = harness.run_verify(args.max_n, args.trials, args.seed)
    print(report.text())
    return EXIT_OK if report.ok else EXIT_VERIFY


def main(argv=None) -> int:
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be at least 1")
        return {
            "allocate": _cmd_allocate,
            "kdist": _cmd_kdist,
            "sweep": _cmd_sweep,
            "verify": _cmd_verify,
        }[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"binpower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
