"""Command-line entry point: ``percolab <subcommand> ...``.

Exit status is 0 on success, 1 when a requested check fails and 2 on bad
input or configuration.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from . import certify as cert
from .experiment import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK, ConfigError, load_config, run_experiment
from .explore import bernoulli_stream, explore
from .generators import MODELS, GenSpec, generate
from .graph import GraphFormatError, RegularGraph
from .percolate import EdgeMask, census_csv, trial_census
from .sprinkle import sprinkle_csv, sprinkle_trials
from .theory import TheoryParams, default_delta, theorem_constants


class InputError(Exception):
    pass


def _out_path(args, path):
    path = Path(path)
    if path.is_absolute():
        return path
    base = os.environ.get("PERCOLAB_OUT_DIR") or args.out_dir
    return Path(base) / path if base else path


def _write(args, path, text):
    target = _out_path(args, path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="\n") as fh:
        fh.write(text)


def _seed(args):
    return args.seed if getattr(args, "seed", None) is not None else args.global_seed


def _read_graph(path):
    try:
        return RegularGraph.read(path)
    except OSError as exc:
        raise InputError(f"cannot read graph {path}: {exc}") from None


def cmd_gen(args):
    offsets = tuple(int(x) for x in args.offsets.split(",")) if args.offsets else ()
    spec = GenSpec(model=args.model, n=args.n, d=args.d, seed=_seed(args),
                   offsets=offsets, bridge_count=args.bridge_count)
    _write(args, args.out, generate(spec).to_text())
    return EXIT_OK


def cmd_certify(args):
    g = _read_graph(args.graph)
    if args.ball_growth and args.lam is None:
        raise InputError("--ball-growth needs --lambda")
    report = cert.certify_graph(
        g, spectral=args.spectral, exact=args.exact_expansion, local_k=args.local_k,
        cycle_spacing=args.cycle_spacing,
        ball_growth_lambda=args.lam if args.ball_growth else None, ball_radius=args.radius,
        cycle_free_radius=args.cycle_free_radius, c_values=(args.c,), enum_cap=args.enum_cap,
    )
    _write(args, args.out, report.to_json())
    return EXIT_OK


def cmd_theory(args):
    params = TheoryParams.from_lambda(args.d, args.lam)
    out = {"d": args.d, "lambda": args.lam, "p": params.p, "q": params.q, "y": params.y}
    if args.n is not None:
        delta = default_delta(args.lam) if args.delta is None else args.delta
        consts = theorem_constants(args.n, args.d, args.lam, c=args.c, C=args.C,
                                   alpha=args.alpha, delta=delta)
        out["constants"] = consts.as_dict()
    text = json.dumps(out, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(args, args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_percolate(args):
    g = _read_graph(args.graph)
    consts = theorem_constants(g.n, g.d, args.lam, C=args.C)
    rows = trial_census(g, args.p, args.trials, _seed(args), constants=consts, workers=args.workers)
    _write(args, args.out, census_csv(rows))
    return EXIT_OK


def cmd_explore(args):
    g = _read_graph(args.graph)
    starts = [int(x) for x in args.start.split(",")]
    if args.mask:
        answers = EdgeMask.read(args.mask)
        if answers.m != g.m:
            raise InputError(f"mask has {answers.m} bits, graph has {g.m} edges")
    else:
        if args.p is None:
            raise InputError("give --p (stream mode) or --mask")
        answers = bernoulli_stream(args.p, _seed(args))
    res = explore(g, starts, answers)
    if args.log:
        _write(args, args.log, "".join(f"{e} {b}\n" for e, b in res.query_log))
    summary = {"component": res.component.indices().tolist(), "size": len(res.component),
               "queries": res.queries, "positives": res.positives}
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_sprinkle(args):
    g = _read_graph(args.graph)
    consts = theorem_constants(g.n, g.d, args.lam, c=args.c, C=args.C, alpha=args.alpha,
                               delta=args.delta)
    y = TheoryParams.from_lambda(g.d, args.lam).y
    runs = sprinkle_trials(g, consts, y, args.trials, _seed(args),
                           spread_radius=args.spread_radius, workers=args.workers)
    _write(args, args.out, sprinkle_csv(runs))
    return EXIT_OK


def cmd_experiment(args):
    cfg = load_config(args.config)
    if args.out_dir and not os.environ.get("PERCOLAB_OUT_DIR"):
        cfg.out_dir = str(Path(args.out_dir).resolve())
    cfg.workers = args.workers
    return run_experiment(cfg, log=lambda msg: print(msg, file=sys.stderr))


def build_parser():
    parser = argparse.ArgumentParser(prog="percolab", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", dest="global_seed", type=int, default=0,
                        help="default seed for subcommands without --seed")
    parser.add_argument("--workers", type=int, default=0, help="worker processes (default and <=0: all CPUs)")
    parser.add_argument("--out-dir", default=None,
                        help="directory for relative output paths (env PERCOLAB_OUT_DIR wins)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a d-regular graph")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--offsets", help="comma-separated circulant offsets")
    p.add_argument("--bridge-count", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("certify", help="check expansion and local sparsity")
    p.add_argument("graph")
    p.add_argument("--spectral", action="store_true")
    p.add_argument("--exact-expansion", action="store_true")
    p.add_argument("--local-k", type=int)
    p.add_argument("--cycle-spacing", type=int)
    p.add_argument("--ball-growth", action="store_true")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--radius", type=int)
    p.add_argument("--cycle-free-radius", type=int)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--enum-cap", type=int, default=10**7, help="abort local-density enumeration past this count")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("theory", help="print q, y and the derived thresholds as JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--C", type=float, default=3.0)
    p.add_argument("--delta", type=float)
    p.add_argument("--alpha", type=float, default=0.02)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("percolate", help="component census over independent trials")
    p.add_argument("graph")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--C", type=float, default=3.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_percolate)

    p = sub.add_parser("explore", help="run the queue exploration from given vertices")
    p.add_argument("graph")
    p.add_argument("--start", required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--mask")
    p.add_argument("--log")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("sprinkle", help="two-round exposure trials")
    p.add_argument("graph")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--delta", type=float)
    p.add_argument("--C", type=float, default=3.0)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=0.02)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--spread-radius", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sprinkle)

    p = sub.add_parser("experiment", help="run a key=value experiment config")
    p.add_argument("config")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (InputError, ConfigError, GraphFormatError, ValueError, OSError) as exc:
        print(f"percolab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (cert.EnumerationOverflow, cert.ConvergenceError) as exc:
        print(f"percolab: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
