"""Command-line experiment runner.

Exit status: 0 on success, 1 when a scenario fails or a lemma sweep finds a
violation, 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from pathlib import Path

from . import lemmas
from .churn import Adversary, ScenarioConfig, run_batch
from .errors import DomainError, ScenarioError, SolverError
from .graph import exact_node_expansion
from .mixing import mix_round
from .pairing import RootMode, canonical_pairing, contract, random_pairing
from .report import summarize, summary_to_json, traces_to_csv, write_gnuplot
from .seeding import run_seed
from .spectral import lambda2
from .vtree import build_complete

SEED_ENV = "TREEWEAVE_SEED"


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _pos_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _leaves(text):
    value = int(text)
    if value < 2 or value & (value - 1):
        raise argparse.ArgumentTypeError(f"--leaves must be a power of two >= 2, got {text}")
    return value


def _fraction(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a fraction in [0, 1], got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treeweave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=_seed, default=None,
                       help=f"master seed (falls back to ${SEED_ENV}, then 0)")

    sim = sub.add_parser("simulate", help="batch churn scenario runs")
    sim.add_argument("--leaves", type=_leaves, default=512)
    sim.add_argument("--rounds", type=_pos_int, default=100)
    sim.add_argument("--runs", type=_pos_int, default=1)
    sim.add_argument("--churn", type=_fraction, default=0.0)
    sim.add_argument("--cycle", type=int, default=7)
    sim.add_argument("--adversary", choices=[a.value for a in Adversary], default="highest_h")
    sim.add_argument("--root-mode", choices=[m.value for m in RootMode], default="detached")
    add_seed(sim)
    sim.add_argument("--jobs", type=_pos_int, default=1)
    sim.add_argument("--out", type=Path, default=Path("trace.csv"))
    sim.add_argument("--summary", type=Path, default=None)
    sim.add_argument("--gnuplot", action="store_true",
                     help="also write <out>_run<k>.dat files with 'round lambda2' rows")

    exp = sub.add_parser("expansion", help="exact node expansion of a small contracted graph")
    exp.add_argument("--leaves", type=_leaves, default=8)
    exp.add_argument("--root-mode", choices=[m.value for m in RootMode], default="detached")
    add_seed(exp)

    mc = sub.add_parser("mixconv", help="lambda2 per mixing round from the canonical pairing")
    mc.add_argument("--leaves", type=_leaves, default=512)
    mc.add_argument("--rounds", type=_nonneg_int, default=36)
    mc.add_argument("--runs", type=_pos_int, default=1)
    add_seed(mc)
    mc.add_argument("--out", type=Path, default=None, help="CSV path (default: stdout)")

    lm = sub.add_parser("lemmas", help="boundary-property sweeps on complete trees")
    lm.add_argument("--max-leaves", type=_leaves, default=16)
    lm.add_argument("--samples", type=_nonneg_int, default=10_000)
    lm.add_argument("--sample-leaves", type=_leaves, nargs="*", default=[16, 32, 64])
    add_seed(lm)
    return parser


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        return _seed(env)
    return 0


def cmd_simulate(args) -> int:
    config = ScenarioConfig(
        initial_leaves=args.leaves,
        total_rounds=args.rounds,
        churn_fraction=args.churn,
        cycle_length=args.cycle,
        seed=args.seed,
        runs=args.runs,
        adversary=args.adversary,
        root_mode=args.root_mode,
    )
    traces = run_batch(config, jobs=args.jobs)
    args.out.write_text(traces_to_csv(traces))
    summary = summarize(traces)
    if args.summary is not None:
        args.summary.write_text(summary_to_json(summary, config.to_dict()))
    if args.gnuplot:
        write_gnuplot(traces, args.out.with_suffix(""))
    p = summary.pooled
    print(f"{len(traces)} rounds: lambda2 min {p.min:.4f} max {p.max:.4f} "
          f"mean {p.mean:.4f} sd {p.stddev:.4f}")
    return 0


def cmd_expansion(args) -> int:
    seed = args.seed
    tree = build_complete(args.leaves)
    pairing = random_pairing(tree, random.Random(seed))
    graph = contract(tree, pairing, root_mode=args.root_mode)
    result = exact_node_expansion(graph)
    doc = {
        "leaves": args.leaves,
        "seed": seed,
        "expansion": str(result.value),
        "expansion_float": float(result.value),
        "witness": sorted(result.witness),
        "edges": [list(e) for e in graph.edges()],
    }
    print(json.dumps(doc, indent=2))
    return 0


def mixing_convergence(leaves: int, rounds: int, seed: int, run: int = 0) -> list[tuple[int, float, int]]:
    """(round, lambda2, swaps) rows from the canonical pairing; round 0 is
    the starting point."""
    rng = random.Random(run_seed(seed, run))
    tree = build_complete(leaves)
    pairing = canonical_pairing(tree)
    rows = [(0, lambda2(contract(tree, pairing)).lambda2, 0)]
    for r in range(1, rounds + 1):
        swaps = mix_round(tree, pairing, rng).swaps
        rows.append((r, lambda2(contract(tree, pairing, check=False)).lambda2, swaps))
    return rows


def cmd_mixconv(args) -> int:
    seed = args.seed
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("run", "round", "lambda2", "swaps"))
        for run in range(args.runs):
            for r, lam, swaps in mixing_convergence(args.leaves, args.rounds, seed, run):
                writer.writerow((run, r, f"{lam:.9g}", swaps))
    finally:
        if args.out:
            out.close()
    return 0


def cmd_lemmas(args) -> int:
    rng = random.Random(args.seed)
    results = []
    n = 4
    while n <= args.max_leaves:
        tree = build_complete(n)
        results += [
            lemmas.connected_internal_sets(tree),
            lemmas.general_internal_sets(tree),
            lemmas.subtree_internal_sets(tree),
        ]
        if n <= 8:
            results.append(lemmas.occupied_subtrees_exhaustive(tree))
        n *= 2
    if args.samples:
        for n in args.sample_leaves:
            results.append(lemmas.occupied_subtrees_sampled(build_complete(n), args.samples, rng))
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status} {r.name:<20} leaves={r.leaves:<4} checked={r.checked:<7} violations={r.violations}")
    return 0 if all(r.ok for r in results) else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "expansion": cmd_expansion,
    "mixconv": cmd_mixconv,
    "lemmas": cmd_lemmas,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "cycle", 7) < 3:
        parser.error("--cycle must be >= 3")
    try:
        args.seed = resolve_seed(args.seed)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        parser.error(f"bad ${SEED_ENV}: {exc}")
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, SolverError) as exc:
        print(f"treeweave: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"treeweave: {exc}", file=sys.stderr)
        return 2
