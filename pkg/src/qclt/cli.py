"""Command-line driver: ``qclt <subcommand> [options]``.

Every subcommand writes a single CSV or JSON table to stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .experiments import (
    ExperimentConfig,
    run_capacity,
    run_cascade,
    run_counterexample,
    run_decay,
    run_rates,
)
from .grid import PhaseGrid
from .report import render
from .verify import run_verify, verify_table

log = logging.getLogger("qclt")

RUNNERS = {
    "rates": run_rates,
    "cascade": run_cascade,
    "capacity": run_capacity,
    "counterexample": run_counterexample,
    "decay": run_decay,
}

HELP = {
    "rates": "distance of rho^{boxplus n} from its Gaussification, with a log-log slope",
    "cascade": "effective environment of a beam-splitter cascade versus its thermal limit",
    "capacity": "capacities of the thermal attenuator and cascade error terms",
    "counterexample": "|chi(z0/sqrt n)|^n for states without second moments",
    "decay": "scan of the finite-energy decay bound",
    "verify": "seeded invariant batteries; exit code 0 iff all groups pass",
}


def _n_list(text: str) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --n list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("--n list is empty")
    return vals


def _default_threads() -> int:
    env = os.environ.get("QCLT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer QCLT_THREADS=%r", env)
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    defaults = PhaseGrid()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", dest="state_id", default=None, help="named state, e.g. fock1, plus03, thermal:1")
    common.add_argument("--n", dest="n_list", type=_n_list, default=(), help="comma-separated increasing n values")
    common.add_argument("--lambda", dest="lam", type=float, default=0.5, help="transmissivity (default 0.5)")
    common.add_argument("--photon-N", dest="N", type=float, default=None, help="thermal photon number")
    common.add_argument("--energy-E", dest="E", type=float, default=1.0, help="input energy constraint")
    common.add_argument("--dim", type=int, default=64, help="Fock cutoff D (default 64)")
    common.add_argument("--grid-extent", type=float, default=defaults.half_extent, help="half-width R of the grid")
    common.add_argument("--grid-points", type=int, default=defaults.points_per_axis, help="points K per axis")
    common.add_argument("--format", dest="out_format", choices=["csv", "json"], default="csv")
    common.add_argument("--log-base", choices=["nats", "bits"], default="nats")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker threads (env QCLT_THREADS)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qclt", description="Quantum central limit theorem numerics.")
    parser.add_argument("--version", action="version", version=f"qclt {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, text in HELP.items():
        sp = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "verify":
            sp.add_argument(
                "--corrupt-laguerre-sign",
                action="store_true",
                help="negative control: flip a sign in the Laguerre engine",
            )
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    threads = args.threads if args.threads is not None else _default_threads()
    try:
        config = ExperimentConfig(
            subcommand=args.subcommand,
            state_id=args.state_id,
            n_list=args.n_list,
            lam=args.lam,
            N=args.N,
            E=args.E,
            grid=(args.grid_extent, args.grid_points),
            dim=args.dim,
            out_format=args.out_format,
            log_base=args.log_base,
            seed=args.seed,
            threads=threads,
        )
        if args.subcommand == "verify":
            sign = -1 if args.corrupt_laguerre_sign else 1
            results = run_verify(args.seed, laguerre_sign=sign)
            for r in results:
                log.info("%s %s worst=%.3e (%.2fs)", r.name, "pass" if r.passed else "FAIL", r.worst, r.seconds)
            _write(render(verify_table(results, args.seed), args.out_format), args.out)
            return 0 if all(r.passed for r in results) else 1
        table = RUNNERS[args.subcommand](config)
    except ValueError as exc:
        # every library error is a ValueError subclass
        print(f"qclt {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    _write(render(table, args.out_format), args.out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
