"""Command-line entry points.

    dascgd run --algo dascgd --topology ring --n 6 --k 5000 --out runs/
    dascgd topology inspect --topology ring --n 6 [--out w.csv]
    dascgd solve --config config.json

Flags override config-file values.  Log verbosity comes from the DASCGD_LOG
environment variable only.
"""

import argparse
import json
import sys

import numpy as np

from .errors import DascgdError
from .harness import RunConfig, run_experiment
from .network import exponential_weights, ring_weights
from .problem import RLInstance, generate_instance, solve_optimal


def _add_run_flags(parser):
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--algo", choices=["dascgd", "cdascgd", "central"])
    parser.add_argument("--topology", choices=["ring", "exp"])
    parser.add_argument("--n", type=int)
    parser.add_argument("--d", type=int)
    parser.add_argument("--states", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--alpha-w", type=float, dest="alpha_w")
    parser.add_argument("--alpha-x", type=float, dest="alpha_x")
    parser.add_argument("--alpha-y", type=float, dest="alpha_y")
    parser.add_argument("--alpha-z", type=float, dest="alpha_z")
    parser.add_argument("--compressor-x", dest="compressor_x")
    parser.add_argument("--compressor-y", dest="compressor_y")
    parser.add_argument("--compressor-z", dest="compressor_z")
    parser.add_argument("--batch", type=int)
    parser.add_argument("--reps", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    parser.add_argument("--discount", type=float)
    parser.add_argument("--ridge", type=float)
    parser.add_argument("--metric-every", type=int, dest="metric_every")
    parser.add_argument("--schedule", choices=["const", "sqrtk"])


def _build_config(args):
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {
        key: getattr(args, key)
        for key in (
            "algo", "topology", "n", "d", "states", "k", "alpha", "beta", "gamma",
            "alpha_w", "alpha_x", "alpha_y", "alpha_z",
            "compressor_x", "compressor_y", "compressor_z",
            "batch", "reps", "seed", "out", "discount", "ridge",
            "metric_every", "schedule",
        )
    }
    return base.with_overrides(**overrides)


def cmd_run(args):
    config = _build_config(args)
    run_experiment(config)
    return 0


def cmd_topology_inspect(args):
    W = ring_weights(args.n) if args.topology == "ring" else exponential_weights(args.n)
    with np.printoptions(precision=6, suppress=True, linewidth=200):
        print(W.W)
    print(f"rho = {W.rho:.12f}")
    if args.out:
        W.to_csv(args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_solve(args):
    with open(args.config) as fh:
        payload = json.load(fh)
    if "features" in payload:  # serialized instance file
        inst = RLInstance.from_dict(payload)
    else:
        config = RunConfig.from_file(args.config)
        inst = generate_instance(
            config.n, config.d, config.states,
            discount=config.discount, ridge=config.ridge, seed=config.seed,
        )
    x_star = solve_optimal(inst)
    with np.printoptions(precision=8, suppress=False):
        print("x* =", x_star)
    print(f"h(x*) = {float(inst.full_objective(x_star)):.12e}")
    print(f"|grad h(x*)| = {float(np.linalg.norm(inst.full_gradient(x_star))):.3e}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="dascgd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run one experiment config (reps seeds)")
    _add_run_flags(run_parser)
    run_parser.set_defaults(handler=cmd_run)

    topo_parser = sub.add_parser("topology", help="topology utilities")
    topo_sub = topo_parser.add_subparsers(dest="topology_command", required=True)
    inspect_parser = topo_sub.add_parser("inspect", help="print W and rho")
    inspect_parser.add_argument("--topology", choices=["ring", "exp"], required=True)
    inspect_parser.add_argument("--n", type=int, required=True)
    inspect_parser.add_argument("--out", help="optional CSV export path")
    inspect_parser.set_defaults(handler=cmd_topology_inspect)

    solve_parser = sub.add_parser("solve", help="print the exact minimizer of a config's instance")
    solve_parser.add_argument("--config", required=True)
    solve_parser.set_defaults(handler=cmd_solve)

    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DascgdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
