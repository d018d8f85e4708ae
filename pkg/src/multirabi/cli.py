"""Command-line front end: ``multirabi simulate | eigs | verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 drives off resonance, 4 eigensolver convergence failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import closed_form
from .errors import ConvergenceFailure, DegenerateSpectrum, ModelInvalid, NotResonant
from .evolution import Kernel, time_series
from .ladder import CouplingVector, coupling_matrix
from .scenario import ConfigError, load_config, render_csv, render_json
from .spectral import tridiag_eigen
from .verify import run_battery

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_RESONANCE, EXIT_CONVERGENCE = 0, 1, 2, 3, 4


def _err(msg):
    print(f"multirabi: {msg}", file=sys.stderr)


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config).with_overrides(args.kernel, args.normalize_initial, args.out)
        model = cfg.model()
        opts = cfg.options()
    except (ConfigError, ValueError) as exc:
        _err(f"{args.config}: {exc}")
        return EXIT_USAGE

    include = cfg.output.include_propagator
    try:
        ts = time_series(model, cfg.time.points(), cfg.initial_level, opts, keep_propagators=include)
    except NotResonant as exc:
        _err(str(exc))
        print(exc.report.table(), file=sys.stderr)
        return EXIT_RESONANCE
    except ConvergenceFailure as exc:
        _err(str(exc))
        return EXIT_CONVERGENCE
    except (DegenerateSpectrum, ValueError) as exc:
        _err(f"kernel '{cfg.kernel}' unusable for this scenario: {exc}")
        return EXIT_USAGE

    text = render_json(ts, cfg, include) if cfg.output.format == "json" else render_csv(ts, include)
    summary = (f"n={model.n} kernel={ts.kernel.value} points={len(ts.times)} "
               f"max_unitarity_defect={ts.max_unitarity_defect:.3e}")
    if cfg.output.path:
        with open(cfg.output.path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def _f(x):
    return f"{x:.17g}"


def cmd_eigs(args) -> int:
    try:
        g = CouplingVector(tuple(args.couplings))
    except ModelInvalid as exc:
        _err(str(exc))
        return EXIT_USAGE
    n = g.n
    try:
        spectral = tridiag_eigen(coupling_matrix(g)).eigenvalues
    except ConvergenceFailure as exc:
        _err(str(exc))
        return EXIT_CONVERGENCE

    closed = None
    note = None
    sp = None
    if n in closed_form.CLOSED_FORM_SIZES:
        try:
            if n == 4:
                sp = closed_form.spectrum4(g)
            elif n == 5:
                sp = closed_form.spectrum5(g)
            closed = closed_form.closed_eigenvalues(g)
        except DegenerateSpectrum as exc:
            note = f"DEGENERATE: {exc}"
    else:
        note = f"no closed form for n={n}"

    print(f"n={n} couplings=({', '.join(_f(v) for v in g)})")
    if sp is not None:
        print(f"A={_f(sp.A)} B={_f(sp.B)}")
        print(f"X={_f(sp.X)} Y={_f(sp.Y)}")
    if note:
        print(note)
    if closed is not None:
        print(f"{'j':>2}  {'closed':>24}  {'spectral':>24}")
        for j, (c, s) in enumerate(zip(closed, spectral), start=1):
            print(f"{j:>2}  {_f(c):>24}  {_f(s):>24}")
        print(f"max |closed - spectral| = {np.max(np.abs(closed - spectral)):.3e}")
    else:
        print(f"{'j':>2}  {'spectral':>24}")
        for j, s in enumerate(spectral, start=1):
            print(f"{j:>2}  {_f(s):>24}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.draws < 1:
        _err("--draws must be >= 1")
        return EXIT_USAGE
    report = run_battery(args.seed, args.draws)
    text = report.render()
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK if report.ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multirabi",
        description="Rabi oscillations of a resonantly driven n-level ladder atom (hbar = 1).")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="population time series for a scenario file")
    sim.add_argument("--config", required=True, metavar="PATH", help="scenario JSON file")
    sim.add_argument("--kernel", choices=["auto", "closed", "spectral"], default=None,
                     help="override the config's kernel")
    sim.add_argument("--normalize-initial", action="store_true",
                     help="return U(t) U(0)^dagger so that the propagator starts at identity")
    sim.add_argument("--out", metavar="PATH", default=None, help="override output.path")
    sim.set_defaults(func=cmd_simulate)

    eig = sub.add_parser("eigs", help="closed-form vs numeric spectrum of C(g)")
    eig.add_argument("couplings", type=float, nargs="+", metavar="G")
    eig.set_defaults(func=cmd_eigs)

    ver = sub.add_parser("verify", help="run the randomized invariant battery")
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--draws", type=int, default=1000)
    ver.add_argument("--out", metavar="PATH", default=None, help="also write the report here")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
