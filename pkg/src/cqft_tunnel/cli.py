"""Command line entry point: ``cqft-tunnel <subcommand> ...``."""

import argparse
import logging
import sys

import numpy as np

from . import oracle
from .scenarios import PRESETS, compare_free, load_preset, load_scenario, run, summary_config, write_outputs


def _scenario(args):
    if bool(args.scenario) == bool(args.preset):
        raise SystemExit("give exactly one of --scenario or --preset")
    return load_scenario(args.scenario) if args.scenario else load_preset(args.preset)


def _print_config(cfg):
    cfg.write(sys.stdout)


def cmd_run(args):
    result = run(_scenario(args), threads=args.threads, checkpoint=args.checkpoint)
    if args.out:
        for path in write_outputs(result, args.out):
            logging.info("wrote %s", path)
    _print_config(summary_config(result))
    return 0


def cmd_compare_free(args):
    print("t,X_tr,X_free,X_tr_ahead")
    for t, x_tr, x_free in compare_free(_scenario(args)):
        ahead = "nan" if np.isnan(x_tr) else str(bool(x_tr > x_free)).lower()
        print(f"{t:.6g},{x_tr:.9g},{x_free:.9g},{ahead}")
    return 0


def cmd_causality(args):
    result = run(_scenario(args), threads=args.threads, with_vacuum=False)
    ok = True
    for out in result.outputs:
        rep = out.causality
        print(f"[t = {rep.t:.6g}]")
        for key, value in rep.items().items():
            print(f"{key} = {value:.6g}")
        print(f"passed = {str(rep.passed()).lower()}")
        ok &= rep.passed()
    return 0 if ok else 1


def cmd_oracle_selftest(args):
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.models):
        model = oracle.random_toy(3, rng)
        t = rng.uniform(0.0, 3.0) / model.energies.max()
        exact = oracle.exact_density(model, t)
        worst = max(worst, float(np.max(np.abs(exact - oracle.decomposition(model, t).rho_total))))
    acomm = oracle.anticommutator_residual(6)
    split, _ = oracle.split_toy(4, rng)
    f = np.where(split.x < 1.0, 1.0 + rng.random(len(split.x)), 1.0)
    ident = oracle.exact_causality_identity(split, f, (0.7, len(split.x) - 5))
    print(f"models = {args.models}")
    print(f"density_max_abs_error = {worst:.3e}")
    print(f"anticommutator_residual = {acomm:.3e}")
    print(f"causality_algebraic_residual = {ident.algebraic_residual:.3e}")
    print(f"causality_full_residual = {ident.full_residual:.3e}")
    ok = worst <= 1e-10 and acomm <= 1e-14 and ident.algebraic_residual <= 1e-12 and ident.full_residual <= 1e-12
    print(f"passed = {str(ok).lower()}")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="cqft-tunnel", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--scenario", help="scenario file (INI)")
        p.add_argument("--preset", choices=PRESETS)
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("run", help="full run: densities, counts, causality")
    scenario_args(p)
    p.add_argument("--out", help="directory for CSV and summary files")
    p.add_argument("--checkpoint", help="propagator checkpoint base path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare-free", help="<X_tr> with the barrier vs <X> of the free packet")
    scenario_args(p)
    p.set_defaults(func=cmd_compare_free)

    p = sub.add_parser("causality", help="beyond-light-cone checks for all interventions")
    scenario_args(p)
    p.set_defaults(func=cmd_causality)

    p = sub.add_parser("oracle-selftest", help="compare with brute-force Fock space")
    p.add_argument("--models", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
