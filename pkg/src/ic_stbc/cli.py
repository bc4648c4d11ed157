"""Command line entry point: ``simulate``, ``verify-rank`` and ``pep-bound``.

Every flag may also come from a ``--config`` file of ``key=value`` lines
(keys are the long flag names without dashes, e.g. ``target-errors=200``);
flags given on the command line win.

Exit codes: 0 success, 1 invalid configuration, 2 enumeration/search guard
exceeded, 3 I/O error.
"""

import argparse
import json
import logging
import sys

import numpy as np

from .analysis import AlphaEstimate, full_rank_check, pep_asymptote, pep_upper_bound
from .codebook import CODE_KINDS, CodeSpec, GuardExceededError
from .modulation import make_qam
from .receiver import RECEIVERS
from .simulator import ConfigError, SimConfig, emit_csv, emit_gnuplot, format_csv, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_IO = 0, 1, 2, 3

# config-file spellings that follow SimConfig / CodeSpec field names
KEY_ALIASES = {
    "constellation_order": "mod",
    "snr_db_grid": "snr",
    "trials_per_point": "trials",
    "target_bit_errors": "target-errors",
    "max_trials": "max-trials",
    "master_seed": "seed",
    "output_path": "out",
}


def parse_grid(text: str) -> list[float]:
    """``start:step:stop`` (inclusive) or a comma separated list."""
    text = str(text).strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[1] <= 0:
            raise argparse.ArgumentTypeError(f"bad range {text!r}; use start:step:stop with step > 0")
        start, step, stop = parts
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(max(n, 0))]
    if not text:
        return []
    return [float(p) for p in text.split(",")]


def read_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            values[key.strip().lstrip("-")] = value.strip()
    return values


def _add_code_args(p):
    p.add_argument("--M", type=int, default=2, help="transmit antennas per user")
    p.add_argument("--N", type=int, default=1, help="receive antennas")
    p.add_argument("--L", type=int, default=4, help="layers (symbols per codeword)")
    p.add_argument("--mod", type=int, default=4, choices=(4, 16, 64), help="QAM order")
    p.add_argument("--code", default="proposed", choices=CODE_KINDS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ic-stbc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte-Carlo BER sweep to CSV")
    _add_code_args(sim)
    sim.add_argument("--receiver", default="zf", choices=RECEIVERS)
    sim.add_argument("--snr", type=parse_grid, default=parse_grid("0:2:26"), help="dB grid, e.g. 0:2:26")
    sim.add_argument("--target-errors", type=int, default=200, help="bit errors per point (0 disables)")
    sim.add_argument("--trials", type=int, default=None, help="fixed trials per point")
    sim.add_argument("--max-trials", type=int, default=10**7)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    sim.add_argument("--gnuplot", default=None, help="optional gnuplot data file")

    rank = sub.add_parser("verify-rank", help="exhaustive full-rank check over error vectors")
    _add_code_args(rank)
    rank.add_argument("--draws", type=int, default=100)
    rank.add_argument("--seed", type=int, default=0)
    rank.add_argument("--tol", type=float, default=1e-9)
    rank.add_argument("--max-witnesses", type=int, default=100)
    rank.add_argument("--stop-on-witness", action="store_true")
    rank.add_argument("--report", default=None, help="JSON report path")

    pep = sub.add_parser("pep-bound", help="tabulate the averaged PEP upper bound")
    pep.add_argument("--alpha", type=float, required=True)
    pep.add_argument("--mu", type=float, required=True)
    pep.add_argument("--MN", type=int, required=True, help="diversity order M*N")
    pep.add_argument("--snr", type=parse_grid, default=parse_grid("0:2:40"))
    pep.add_argument("--out", default=None)

    for p in (sim, rank, pep):
        p.add_argument("--config", default=None, help="key=value file with defaults for any flag")
    return parser


def _apply_config(parser, argv):
    """Parse twice: config-file values become defaults, explicit flags override."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = read_config_file(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest: a for a in subparser._actions}
    by_flag = {}
    for a in subparser._actions:
        for opt in a.option_strings:
            by_flag[opt.lstrip("-")] = a
    defaults = {}
    for key, raw in values.items():
        key = KEY_ALIASES.get(key, key)
        action = by_flag.get(key) or dests.get(key.replace("-", "_"))
        if action is None or action.dest in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r}")
        if action.const is True and action.nargs == 0:  # store_true
            defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            continue
        try:
            value = action.type(raw) if action.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"config key {key!r}: {value!r} not in {list(action.choices)}")
        defaults[action.dest] = value
    subparser.set_defaults(**defaults)
    for a in subparser._actions:
        if a.dest in defaults:
            a.required = False
    return parser.parse_args(argv)


def _cmd_simulate(args) -> int:
    cfg = SimConfig(
        M=args.M, N=args.N, L=args.L, constellation_order=args.mod, code=args.code,
        receiver=args.receiver, snr_db_grid=list(args.snr), trials_per_point=args.trials,
        target_bit_errors=args.target_errors or None, max_trials=args.max_trials,
        master_seed=args.seed, output_path=args.out, workers=args.workers,
    )
    records = run_sweep(cfg)
    if args.out:
        emit_csv(records, args.out)
    else:
        sys.stdout.write(format_csv(records))
    if args.gnuplot:
        emit_gnuplot(records, args.gnuplot)
    return EXIT_OK


def _cmd_verify_rank(args) -> int:
    spec = CodeSpec(args.M, args.L, args.code)
    c = make_qam(args.mod)
    report = full_rank_check(spec, args.N, c, args.draws, args.seed, tol=args.tol,
                             max_witnesses=args.max_witnesses, stop_on_witness=args.stop_on_witness)
    alpha = AlphaEstimate(alpha=report.min_lambda_min, over_samples=report.samples,
                          per_draw=report.per_draw_lambda_min)
    doc = report.to_dict()
    doc["alpha_estimate"] = alpha.to_dict()
    doc["mu"] = spec.mu
    text = json.dumps(doc, indent=2)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    status = "PASS" if report.passed else "FAIL"
    print(f"{status}: {report.samples} draws, {report.deficient_count} rank-deficient cases, "
          f"min lambda_min = {report.min_lambda_min:.6g}")
    return EXIT_OK


def _cmd_pep_bound(args) -> int:
    lines = ["snr_db,rho,bound,asymptote"]
    for snr_db in args.snr:
        rho = 10.0 ** (snr_db / 10.0)
        b = pep_upper_bound(rho, args.alpha, args.mu, args.MN, 1).bound
        lines.append(f"{snr_db!r},{rho!r},{b!r},{pep_asymptote(rho, args.alpha, args.mu, args.MN, 1)!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"simulate": _cmd_simulate, "verify-rank": _cmd_verify_rank, "pep-bound": _cmd_pep_bound}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except GuardExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
