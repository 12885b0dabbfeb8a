"""``regdeloc`` command-line entry point.

Examples::

    regdeloc gen n=10 d=2 seed=1 --out g.txt
    regdeloc girth --graph g.txt
    regdeloc survey --gen n=500,d=2,seed=7 --epsilon 0.2 --p 1 --out report.json
    regdeloc oracle --lemma1 d=2 n=4 depth=6

Exit status: 0 all checks pass, 1 a checked invariant failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys

from .reporting import COMMANDS, RunConfig, canonical_json, run

EXIT_USAGE = 2


class _UsageError(Exception):
    pass


def _kv(token: str) -> tuple[str, str]:
    if "=" not in token:
        raise _UsageError(f"expected key=value, got {token!r}")
    key, value = token.split("=", 1)
    return key.strip(), value.strip()


def _gen_spec(text: str) -> dict:
    return dict(_kv(t) for t in text.split(",") if t)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="regdeloc", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("params", nargs="*", metavar="key=value",
                    help="command parameters, e.g. n=10 d=2 seed=1 or j=3")
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--graph", metavar="FILE", help="edge-list file")
    src.add_argument("--gen", metavar="n=..,d=..,seed=..", help="random regular graph spec")
    ap.add_argument("--epsilon", type=float, default=0.3)
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--C", type=float, default=None)
    ap.add_argument("--alpha", type=float, default=None)
    ap.add_argument("--N", type=int, default=None)
    ap.add_argument("--fit", choices=("tree", "free"), default="tree",
                    help="tree: certify (C, alpha) = (1, 1/2); free: fit both")
    ap.add_argument("--max-n", type=int, default=12)
    ap.add_argument("--rotations", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lemma1", action="store_true", help="oracle: closed-form vs tree values of P_n(T_d/2) delta_0")
    ap.add_argument("--out", metavar="FILE")
    ap.add_argument("--csv", metavar="FILE")
    ap.add_argument("--linalg-tol", type=float, default=1e-8)
    ap.add_argument("--identity-tol", type=float, default=1e-10)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def config_from_args(args) -> RunConfig:
    params = dict(_kv(t) for t in args.params)
    if args.lemma1:
        params["lemma1"] = True
    return RunConfig(
        command=args.command,
        graph_file=args.graph,
        gen=_gen_spec(args.gen) if args.gen else None,
        epsilon=args.epsilon,
        p=args.p,
        C=args.C,
        alpha=args.alpha,
        N=args.N,
        fit=args.fit,
        max_n=args.max_n,
        rotations=args.rotations,
        seed=args.seed,
        params=params,
        out=args.out,
        csv=args.csv,
        linalg_tol=args.linalg_tol,
        identity_tol=args.identity_tol,
        verbosity=args.verbose,
    )


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    try:
        cfg = config_from_args(args)
        result = run(cfg)
    except (_UsageError, ValueError, KeyError, OSError) as exc:
        print(f"regdeloc {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if result.text and (cfg.command != "gen" or not cfg.out):
        sys.stdout.write(result.text)
    if not cfg.out and cfg.command != "gen" and (cfg.verbosity or not result.text):
        sys.stdout.write(canonical_json(result.document))
    elif cfg.verbosity:
        print(f"status {result.status}", file=sys.stderr)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
