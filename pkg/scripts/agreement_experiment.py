#!/usr/bin/env python3
"""Solver-vs-fixpoint agreement experiment over random programs.

For each random program whose bounded least model is known exactly, every
ground atom of the query universe is solved top-down and the answer's
existence is compared with bottom-up membership.  Reports agreement counts
and the skip rate from budget truncation.
"""

import argparse
import random
from dataclasses import dataclass

from pldiag.engine import Budget, solve
from pldiag.herbrand import tp_fixpoint
from pldiag.randgen import ground_atoms_universe, random_program
from pldiag.syntax import Query, term_text


@dataclass
class ExperimentConfig:
    programs: int = 100
    seed: int = 0
    depth: int = 5
    iterations: int = 60
    atom_depth: int = 3
    budget: Budget = Budget(max_steps=2000, max_depth=60, max_answers=50)


def run(cfg: ExperimentConfig) -> dict:
    rng = random.Random(cfg.seed)
    stats = {"programs": 0, "inexact": 0, "checked": 0, "truncated": 0, "disagreed": 0}
    while stats["programs"] < cfg.programs:
        p = random_program(rng)
        fx = tp_fixpoint(p, cfg.depth, cfg.iterations)
        if not fx.exact_within_depth:
            stats["inexact"] += 1
            continue
        stats["programs"] += 1
        for a in ground_atoms_universe(p, cfg.atom_depth):
            res = solve(Query((a,)), p, cfg.budget)
            if res.stats.truncated:
                stats["truncated"] += 1
                continue
            stats["checked"] += 1
            if bool(res.answers) != (a in fx.atoms):
                stats["disagreed"] += 1
                print(f"DISAGREEMENT: {term_text(a)}")
    return stats


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--programs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=60)
    args = ap.parse_args()
    cfg = ExperimentConfig(
        programs=args.programs, seed=args.seed, depth=args.depth, iterations=args.iterations
    )
    stats = run(cfg)
    for k, v in stats.items():
        print(f"{k}: {v}")
    if stats["disagreed"]:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
