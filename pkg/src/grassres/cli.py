"""Command-line entry point.

    grassres relations --d 2 --n 5 --chart 45
    grassres model --d 3 --n 6 --chart 123 --json
    grassres pipeline --d 2 --n 4 --chart 12 --stop-after theta
    grassres certify --d 2 --n 4 --chart 12 --gamma '[[3,4]]'

Exit codes: 0 success or SMOOTH, 2 usage error, 3 iteration cap or resource
limit, 4 FAIL, 5 UNCERTAIN.
"""

import argparse
import json
import logging
import os
import sys

from . import __version__
from .blowup import PipelineConfig, run_pipeline
from .certify import FAIL, SCHEMA_VERSION, SMOOTH, birationality_probe, certify_smooth
from .errors import (GrassresError, InsufficientSampling, NonterminationError, NotAMatroid,
                     ResourceLimit)
from .gamma import Gamma, Matroid, matroid_to_gamma
from .indexing import parse_index, upsilon
from .model import defining_system
from .polyengine import is_prime
from .relations import linearize, primary_family

log = logging.getLogger("grassres")

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_FAIL, EXIT_UNCERTAIN = 0, 2, 3, 4, 5
DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


def _chart(args):
    if not 1 <= args.d < args.n:
        raise UsageError("need 1 <= d < n, got d=%d n=%d" % (args.d, args.n))
    if args.chart is None:
        return parse_index(range(1, args.d + 1))
    try:
        m = parse_index(args.chart)
    except (GrassresError, ValueError) as exc:
        raise UsageError("bad chart index %r: %s" % (args.chart, exc)) from None
    if len(m) != args.d or m[-1] > args.n:
        raise UsageError("chart %s is not a %d-subset of 1..%d" % (m, args.d, args.n))
    return m


def _primes(text):
    try:
        primes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError("primes must be a comma separated list of integers") from None
    if not primes or len(set(primes)) != len(primes) or not all(p > 2 and is_prime(p) for p in primes):
        raise UsageError("primes must be distinct odd primes, got %s" % text)
    return primes


def _gamma(args, m):
    sources = [x for x in (args.gamma, args.gamma_file, args.matroid) if x is not None]
    if len(sources) > 1:
        raise UsageError("give at most one of --gamma, --gamma-file, --matroid")
    if args.matroid is not None:
        try:
            with open(args.matroid) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError("cannot read matroid file: %s" % exc) from None
        try:
            M = Matroid.from_json(obj)
        except NotAMatroid as exc:
            raise UsageError(str(exc)) from None
        if M.d != args.d or M.n != args.n:
            raise UsageError("matroid has rank %d on %d elements, chart needs %d on %d"
                             % (M.d, M.n, args.d, args.n))
        return matroid_to_gamma(M, m)
    text = args.gamma
    if args.gamma_file is not None:
        try:
            with open(args.gamma_file) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError("cannot read gamma file: %s" % exc) from None
    if text is None:
        return Gamma()
    try:
        items = json.loads(text)
        if not isinstance(items, list):
            raise ValueError("expected a list of index lists")
        return Gamma.of([parse_index(u) for u in items]).validate(m, args.n)
    except (ValueError, TypeError) as exc:
        raise UsageError("bad gamma %r: %s" % (text, exc)) from None


def _config(args):
    stop = getattr(args, "stop_after", None)
    if stop == "ell":
        stop = None
    return PipelineConfig(blocks=args.blocks, basepoints=args.basepoints,
                          max_rho_degree=args.degree, quotient=args.degree >= 2,
                          primes=_primes(args.primes), max_rounds=args.max_rounds,
                          max_sets=args.max_sets, prune=not args.no_prune, stop_after=stop)


def _emit(args, obj, text_lines):
    if args.json:
        out = json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, sort_keys=True)
    else:
        out = "\n".join(text_lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


# ---------------------------------------------------------------- commands

def cmd_relations(args):
    m = _chart(args)
    fam = primary_family(m, args.n, blocks=args.blocks)
    rows = []
    lines = ["chart %s of Gr(%d,%d): %d primary relations (expected %d)"
             % (m, args.d, args.n, len(fam), upsilon(args.d, args.n))]
    for k, F in enumerate(fam, start=1):
        lin = linearize(F)
        rows.append({"block": k, "u": str(F.u), "rank": F.rank, "t_F": F.t_F,
                     "leading": "x[%s]" % (F.u,), "relation": str(F),
                     "linearized": str(lin.polynomial())})
        lines.append("F%d  rank %d  lead x[%s]  %s" % (k, F.rank, F.u, F))
    _emit(args, {"d": args.d, "n": args.n, "chart": str(m), "relations": rows}, lines)
    return EXIT_OK


def cmd_model(args):
    m = _chart(args)
    system = defining_system(m, args.n, max_rho_degree=args.degree, blocks=args.blocks,
                             quotient=args.degree >= 2)
    groups = {}
    lines = ["defining system on chart %s of Gr(%d,%d)" % (m, args.d, args.n)]
    for r in system.all():
        groups.setdefault(r.kind, []).append({"name": r.name, "poly": str(r.poly)})
        lines.append("%-10s %-8s %s" % (r.name, r.kind, r.poly))
    obj = {"d": args.d, "n": args.n, "chart": str(m),
           "basepoint": {str(k): str(v) for k, v in sorted(system.basepoint.items())},
           "counts": {k: len(v) for k, v in sorted(groups.items())}, "relations": groups}
    _emit(args, obj, lines)
    return EXIT_OK


def cmd_pipeline(args):
    m = _chart(args)
    atlas = run_pipeline(m, args.n, _config(args))
    stats = atlas.stats()
    lines = ["Gr(%d,%d) chart %s: stage %s, %d charts, %d pruned, %d dropped"
             % (args.d, args.n, m, atlas.stage, stats["charts"], stats["pruned"], stats["dropped"])]
    lines += ["rho %s = %d" % kv for kv in stats["rho"].items()]
    lines += ["sigma %s = %d" % kv for kv in stats["sigma"].items()]
    lines += [c.name for c in atlas.charts] if args.verbose else []
    _emit(args, atlas.to_json(), lines)
    return EXIT_OK


def cmd_certify(args):
    m = _chart(args)
    gamma = _gamma(args, m)
    primes = _primes(args.primes)
    atlas = run_pipeline(m, args.n, _config(args))
    cert = certify_smooth(atlas, gamma, primes=primes, seed=args.seed, samples=args.samples,
                          trials=args.trials, jobs=args.jobs, max_free=args.max_free)
    obj = cert.to_json()
    lines = ["gamma %s on chart %s of Gr(%d,%d): %s" % (gamma, m, args.d, args.n, cert.verdict)]
    for r in cert.charts:
        lines.append("%s  points %d  rank %s/%d  %s" % (r.id, r.points_checked, r.rank_min,
                                                       r.rank_expected, "ok" if r.passed else "FAIL"))
    if cert.birational:
        lines.append("fiber sizes %s" % cert.birational["fiber_histogram"])
    for u in cert.uncertain:
        lines.append("uncertain: %s" % u)
    obj.pop("schema_version")
    _emit(args, obj, lines)
    if cert.verdict == SMOOTH:
        return EXIT_OK
    return EXIT_FAIL if cert.verdict == FAIL else EXIT_UNCERTAIN


def cmd_probe(args):
    m = _chart(args)
    gamma = _gamma(args, m)
    atlas = run_pipeline(m, args.n, _config(args))
    rec = birationality_probe(atlas, gamma, prime=_primes(args.primes)[-1], trials=args.trials or 50,
                              seed=args.seed)
    _emit(args, {"gamma": gamma.to_json(), **rec},
          ["fiber sizes over F_%d: %s" % (rec["prime"], rec["fiber_histogram"])])
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(prog="grassres", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, required=True, help="Grassmannian rank")
    common.add_argument("--n", type=int, required=True, help="ambient dimension")
    common.add_argument("--chart", help="chart index m, e.g. 45 or 1.2.10 (default 12..d)")
    common.add_argument("--blocks", type=int, help="process only the first blocks")
    common.add_argument("--degree", type=int, default=3, help="degree bound for the quotient search")
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--output", "-o", help="write the report to a file")
    common.add_argument("--verbose", "-v", action="store_true")
    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--primes", default="5,7", help="comma separated odd primes")
    run.add_argument("--basepoints", choices=("all", "default"), default="all")
    run.add_argument("--max-rounds", type=int, default=64)
    run.add_argument("--max-sets", type=int, default=256)
    run.add_argument("--no-prune", action="store_true", help="keep charts without points")
    run.add_argument("--seed", type=int, default=DEFAULT_SEED)
    run.add_argument("--jobs", type=int, default=None,
                     help="worker processes (default $GRASSRES_JOBS or 1)")
    gam = argparse.ArgumentParser(add_help=False)
    gam.add_argument("--gamma", help="JSON list of vanishing coordinates, e.g. '[[3,4]]'")
    gam.add_argument("--gamma-file", help="file holding the --gamma JSON")
    gam.add_argument("--matroid", help="JSON file {n, d, bases}")
    gam.add_argument("--samples", type=int, default=12, help="transport samples per prime")
    gam.add_argument("--trials", type=int, default=0, help="birationality probe trials")
    gam.add_argument("--max-free", type=int, default=12, help="enumeration bound")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("relations", parents=[common], help="primary relations of a chart")
    p.set_defaults(func=cmd_relations)
    p = sub.add_parser("model", parents=[common], help="defining system of the model")
    p.set_defaults(func=cmd_model)
    p = sub.add_parser("pipeline", parents=[common, run], help="run the blowup pipeline")
    p.add_argument("--stop-after", choices=("theta", "wp", "ell"), default=None)
    p.set_defaults(func=cmd_pipeline)
    p = sub.add_parser("certify", parents=[common, run, gam], help="certify smoothness")
    p.set_defaults(func=cmd_certify)
    p = sub.add_parser("probe", parents=[common, run, gam], help="birationality probe only")
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", None) is None and hasattr(args, "jobs"):
        args.jobs = int(os.environ.get("GRASSRES_JOBS", "1") or 1)
    try:
        return args.func(args)
    except UsageError as exc:
        print("grassres: error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (NonterminationError, ResourceLimit, InsufficientSampling) as exc:
        print("grassres: %s: %s" % (exc.code, exc), file=sys.stderr)
        return EXIT_CAP
    except GrassresError as exc:
        print("grassres: %s: %s" % (exc.code, exc), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
