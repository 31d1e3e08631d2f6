"""Command-line entry point: ``python -m prachsim <subcommand>``."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from ..errors import ConfigurationError
from .config import load_config, parse_config
from .observe import run_observation_suite
from .results import emit_results
from .sweep import run_cdr_sweep, run_pfa_calibration

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2


def _spec(args):
    spec = load_config(args.config) if args.config else parse_config("")
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.subframes is not None:
        if args.subframes < 1:
            raise ConfigurationError("must be positive", "--subframes")
        spec = replace(spec, n_subframes=args.subframes)
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigurationError("must be positive", "--workers")
        spec = replace(spec, workers=args.workers)
    return spec


def cmd_sweep(args):
    spec = _spec(args)
    if args.quick and args.subframes is None:
        spec = replace(spec, n_subframes=200)
    points = run_cdr_sweep(spec)
    for p in points:
        lo, hi = p.wilson_ci_95
        print(
            f"{p.scenario_kind:10s} I={p.interferer_snr_db:6g} dB  T={p.snr_db:6g} dB  "
            f"CDR={p.cdr:.3f} [{lo:.3f}, {hi:.3f}]  false={p.n_false}"
        )
    csv_path, plot_path = emit_results(points, args.out)
    print(f"wrote {csv_path} and {plot_path}")
    return EXIT_OK


def cmd_pfa(args):
    spec = _spec(args)
    n = args.subframes or (2000 if args.quick else 20000)
    sc = spec.scenario
    r = run_pfa_calibration(
        sc.detector,
        n,
        spec.master_seed,
        target=sc.target.identity,
        geometry=sc.geometry,
        n_rx_ants=sc.target.channel.n_rx_ants,
        workers=spec.workers,
    )
    lo, hi = r.per_window_ci_95
    print(f"threshold T_r = {r.threshold_relative:.4f} for target p_fa {r.p_fa_target:g}")
    print(f"{r.n_window_alarms} alarms in {r.n_windows} windows: rate {r.per_window_rate:.3e} [{lo:.3e}, {hi:.3e}]")
    print(f"subframes with any alarm: {r.n_subframe_alarms}/{r.n_subframes} ({r.per_subframe_rate:.3e})")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "pfa.csv").write_bytes(
            (
                "p_fa_target,threshold_relative,n_subframes,n_windows,n_window_alarms,rate,ci_lo,ci_hi,seed\n"
                f"{r.p_fa_target:g},{r.threshold_relative:.6f},{r.n_subframes},{r.n_windows},"
                f"{r.n_window_alarms},{r.per_window_rate:.6e},{lo:.6e},{hi:.6e},{spec.master_seed}\n"
            ).encode()
        )
    return EXIT_OK if 0.5 <= r.per_window_rate / r.p_fa_target <= 2 else EXIT_FAILED


def cmd_observe(args):
    spec = _spec(args)
    results = run_observation_suite(spec, quick=args.quick, n_subframes=args.subframes)
    failed = False
    for r in results:
        print(f"{r.name} {r.status.upper():4s} {r.detail}")
        failed |= not r.passed
    if args.out:
        out = Path(args.out)
        for r in results:
            points = [p for curve in r.curves.values() for p in curve]
            emit_results(points, out, name=f"observe_{r.name}")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_selftest(args):
    from .selftest import run_selftest

    ok = True
    for name, passed, detail in run_selftest():
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog="prachsim", description="PRACH preamble detection simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, text in (
        ("sweep", cmd_sweep, "CDR versus target SNR for the configured scenario"),
        ("pfa", cmd_pfa, "noise-only false-alarm calibration"),
        ("observe", cmd_observe, "interference trend checks"),
        ("selftest", cmd_selftest, "fast internal consistency checks"),
    ):
        p = sub.add_parser(name, help=text)
        p.set_defaults(func=fn)
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--subframes", type=int, help="subframes per point")
        p.add_argument("--out", default="results" if name == "sweep" else None, help="output directory")
        p.add_argument("--quick", action="store_true", help="reduced trial counts")
        p.add_argument("--workers", type=int, help="worker processes")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
