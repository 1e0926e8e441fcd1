"""Command-line interface: solve, suite, lmo-check, trace-validate."""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bench
from .config import RunConfig
from .errors import TraceParseError
from .lmo import BirkhoffLMO, KSparseLMO, L1BallLMO, L2BallLMO, SimplexLMO
from .traces import validate_trace


def _cmd_solve(args):
    try:
        config = RunConfig.from_file(args.config, overrides=args.set or ())
        if args.output:
            config.output_path = args.output
        code, summary = bench.run(config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        "final primal={primal!r} gap={gap!r} iterations={iterations} "
        "lmo_calls={lmo_calls} wall={wall_s:.3f}s trace={trace}".format(**summary)
    )
    return code


def _cmd_suite(args):
    paths = sorted(
        os.path.join(args.directory, name)
        for name in os.listdir(args.directory)
        if name.endswith(".cfg")
    )
    if not paths:
        print(f"error: no .cfg files under {args.directory}", file=sys.stderr)
        return 1
    workers = int(os.environ.get("CFW_THREADS", "0")) or min(4, len(paths))

    def one(path):
        try:
            config = RunConfig.from_file(path)
            code, summary = bench.run(config)
            return path, code, summary
        except (ValueError, OSError) as exc:
            return path, 1, {"error": str(exc)}

    worst = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for path, code, summary in pool.map(one, paths):
            if "error" in summary:
                print(f"{path}: error: {summary['error']}", file=sys.stderr)
            else:
                print(
                    f"{path}: exit={code} primal={summary['primal']!r} "
                    f"gap={summary['gap']!r} iterations={summary['iterations']}"
                )
            worst = max(worst, code)
    return worst


def _make_domain(args):
    n = args.n
    if args.domain == "simplex":
        return SimplexLMO(n)
    if args.domain == "l1":
        return L1BallLMO(n, args.radius)
    if args.domain == "ksparse":
        return KSparseLMO(n, args.k, args.tau)
    if args.domain == "birkhoff":
        return BirkhoffLMO(n)
    if args.domain == "l2":
        return L2BallLMO(np.zeros(n), args.radius)
    raise ValueError(args.domain)


def _cmd_lmo_check(args):
    oracle = _make_domain(args)
    rng = np.random.default_rng(args.seed)
    dim = oracle.dim
    failures = 0
    for _ in range(args.samples):
        direction = rng.standard_normal(dim)
        atom = oracle.minimize(direction)
        dense = atom.to_dense()
        if not oracle.contains(dense, tol=1e-8):
            failures += 1
            continue
        value = atom.dot(direction)
        for _ in range(20):
            probe = oracle.minimize(rng.standard_normal(dim)).to_dense()
            mix = rng.random()
            point = mix * probe + (1.0 - mix) * dense
            if value > float(direction @ point) + 1e-9 * (1.0 + abs(value)):
                failures += 1
                break
    status = "PASS" if failures == 0 else "FAIL"
    print(f"{args.domain}: {status} ({args.samples} directions, {failures} failures)")
    return 0 if failures == 0 else 1


def _cmd_trace_validate(args):
    try:
        records = validate_trace(args.trace)
    except (TraceParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.trace}: OK ({len(records)} records)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cfw-bench",
        description="Projection-free solvers benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one configured experiment")
    solve.add_argument("config", help="path to a key=value configuration file")
    solve.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a key")
    solve.add_argument("--output", help="override output_path")
    solve.set_defaults(func=_cmd_solve)

    suite = sub.add_parser("suite", help="run every .cfg file in a directory")
    suite.add_argument("directory")
    suite.set_defaults(func=_cmd_suite)

    check = sub.add_parser("lmo-check", help="spot-check an oracle's optimality")
    check.add_argument("domain", choices=("simplex", "l1", "ksparse", "birkhoff", "l2"))
    check.add_argument("--n", type=int, default=8)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--samples", type=int, default=200)
    check.add_argument("--k", type=int, default=3)
    check.add_argument("--tau", type=float, default=1.0)
    check.add_argument("--radius", type=float, default=1.0)
    check.set_defaults(func=_cmd_lmo_check)

    validate = sub.add_parser("trace-validate", help="validate a trace CSV")
    validate.add_argument("trace")
    validate.set_defaults(func=_cmd_trace_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
