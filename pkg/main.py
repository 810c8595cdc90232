# main.py
"""
Command-line entry point for the Borsuk counterexample lab.

Subcommands:
- verify                 invariant suite for dimension n
- lemma                  largest ortho-free subset and its rank report for n = 4p
- bound                  prime scan for the first counterexample dimension
- embed                  histogram of squared distances in f(M)
- recheck-certificate    re-verify a certificate file from scratch

Reports go to stdout or --out; logs go to stderr. Exit status: 0 success,
1 a check failed or the run errored, 2 invalid arguments.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import List, Optional

import core_logic
from borsuk.bound_engine import PRIME_SCAN_LIMIT
from borsuk.fw_polynomials import is_prime
from borsuk.hypercube_core import MAX_DIMENSION
from utils import write_output

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "markdown", "pdf")
MIN_N = 4
DEFAULT_BUDGET_SECS = 60.0


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: Optional[int]
    p: Optional[int]
    budget_secs: float
    node_limit: Optional[int]
    limit: int
    fmt: str
    out: Optional[str]
    seed: int
    certificate: Optional[str]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=FORMATS, help="Report format (pdf requires --out); csv for embed, json otherwise.")
    common.add_argument("--out", help="Write the report to this file instead of stdout.")
    common.add_argument("--seed", type=int, default=0, help="Seed for every sampled check.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging on stderr.")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only on stderr.")

    ap = argparse.ArgumentParser(prog="borsuk-lab", description="Verify the hypercube counterexample to Borsuk's conjecture.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {core_logic.TOOL_VERSION}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="Run the invariant suite for dimension n.")
    v.add_argument("--n", type=int, required=True, help=f"Dimension, a multiple of 4 in {MIN_N}..{core_logic.EXHAUSTIVE_LIMIT}.")

    lm = sub.add_parser("lemma", parents=[common], help="Largest ortho-free subset of M(4p) and its rank report.")
    lm.add_argument("--p", type=int, required=True, help="Prime p; the dimension is n = 4p.")
    lm.add_argument("--budget-secs", type=float, default=DEFAULT_BUDGET_SECS, help="Wall-clock budget for the search.")
    lm.add_argument("--node-limit", type=int, help="Stop after this many search nodes (reproducible budget).")

    b = sub.add_parser("bound", parents=[common], help="Scan primes for the first counterexample dimension.")
    b.add_argument("--limit", type=int, default=PRIME_SCAN_LIMIT, help="Largest prime to scan.")

    e = sub.add_parser("embed", parents=[common], help="Histogram of |f(x), f(y)|^2 over pairs of M.")
    e.add_argument("--n", type=int, required=True, help=f"Dimension, a multiple of 4 in {MIN_N}..{core_logic.EXHAUSTIVE_LIMIT}.")

    r = sub.add_parser("recheck-certificate", parents=[common], help="Re-verify a certificate file.")
    r.add_argument("certificate", help="Path to a certificate JSON file.")
    return ap


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    ap = build_parser()
    args = ap.parse_args(argv)
    cmd = args.command
    fmt = args.fmt or ("csv" if cmd == "embed" else "json")

    n = getattr(args, "n", None)
    if n is not None:
        if n % 4 or n < MIN_N:
            ap.error("construction requires n ≡ 0 mod 4")
        if n > core_logic.EXHAUSTIVE_LIMIT:
            ap.error(f"--n {n} is above the exhaustive limit {core_logic.EXHAUSTIVE_LIMIT}")
    p = getattr(args, "p", None)
    if p is not None:
        try:
            prime = is_prime(p)
        except ValueError as e:
            ap.error(f"--p {p}: {e}")
        if not prime:
            ap.error(f"--p {p} is not prime")
        if 4 * p > MAX_DIMENSION:
            ap.error(f"--p {p} gives n = {4 * p}, above the vertex limit {MAX_DIMENSION}")
    budget = getattr(args, "budget_secs", DEFAULT_BUDGET_SECS)
    if budget <= 0:
        ap.error("--budget-secs must be positive")
    node_limit = getattr(args, "node_limit", None)
    if node_limit is not None and node_limit <= 0:
        ap.error("--node-limit must be positive")
    limit = getattr(args, "limit", PRIME_SCAN_LIMIT)
    if limit < 2:
        ap.error("--limit must be at least 2")
    if fmt == "pdf":
        if not args.out:
            ap.error("--format pdf requires --out")
        if cmd in ("lemma", "embed"):
            ap.error(f"{cmd} does not produce a pdf report")

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s", stream=sys.stderr, force=True)

    return RunConfig(cmd, n, p, budget, node_limit, limit, fmt, args.out, args.seed, getattr(args, "certificate", None))


def run(cfg: RunConfig) -> int:
    if cfg.command == "verify":
        result = core_logic.run_verify_core(cfg.n, cfg.seed)
        rendered = core_logic.render_checks(f"Verification, n = {cfg.n}", result, cfg.fmt)
    elif cfg.command == "lemma":
        result = core_logic.run_lemma_core(cfg.p, cfg.budget_secs, cfg.node_limit)
        rendered = core_logic.render_lemma(result, cfg.fmt) if "certificate" in result else None
    elif cfg.command == "bound":
        result = core_logic.run_bound_core(cfg.limit)
        rendered = core_logic.render_bound(result, cfg.fmt) if result["reports"] else None
    elif cfg.command == "embed":
        result = core_logic.run_embed_core(cfg.n)
        rendered = core_logic.render_embed(result, cfg.fmt) if "histogram" in result else None
    else:
        result = core_logic.recheck_certificate_core(cfg.certificate)
        rendered = core_logic.render_checks("Certificate recheck", result, cfg.fmt)

    if rendered is not None:
        write_output(rendered, cfg.out)
    status = result.get("status")
    if status == "success":
        logger.info(result.get("message", ""))
        return 0
    logger.error(f"[{status}] {result.get('message', '')}")
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
