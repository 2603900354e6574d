"""Random definite programs and single-fault mutants for the test harnesses.

Generated programs are biased toward finite LD-trees: each body argument is
either a proper subterm of a head argument (structural descent) or a small
ground term.  Runs that still diverge are detected by budget truncation and
skipped by the harnesses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .herbrand import signature_of_program, universe
from .syntax import Clause, Program
from .terms import Compound, Term, Var, is_ground, subterms, term_depth


@dataclass(frozen=True)
class GenConfig:
    predicates: tuple[str, ...] = ("p", "q")
    constants: tuple[str, ...] = ("a", "b")
    functor: str = "f"
    max_clauses: int = 6
    max_head_depth: int = 3
    max_body_len: int = 2
    ground_body_prob: float = 0.15


def random_term(rng: random.Random, cfg: GenConfig, depth: int, vars_: list[str]) -> Term:
    choices = ["const"]
    if depth > 0:
        choices += ["func", "func"]
    if vars_:
        choices += ["var"]
    kind = rng.choice(choices)
    if kind == "var":
        return Var(rng.choice(vars_))
    if kind == "func":
        return Compound(cfg.functor, (random_term(rng, cfg, depth - 1, vars_),))
    return Compound(rng.choice(cfg.constants), ())


def random_clause(rng: random.Random, cfg: GenConfig, ordinal: int) -> Clause:
    vars_ = ["X", "Y"][: rng.randint(0, 2)]
    head_pred = rng.choice(cfg.predicates)
    head_arg = random_term(rng, cfg, rng.randint(0, cfg.max_head_depth), vars_)
    head = Compound(head_pred, (head_arg,))
    # proper subterms of the head argument keep recursive calls descending
    proper = [t for t in subterms(head_arg) if t != head_arg]
    body: list[Compound] = []
    for _ in range(rng.randint(0, cfg.max_body_len)):
        pred = rng.choice(cfg.predicates)
        if proper and rng.random() > cfg.ground_body_prob:
            arg = rng.choice(proper)
        else:
            arg = random_term(rng, cfg, 1, [])  # small ground term
        body.append(Compound(pred, (arg,)))
    return Clause(head, tuple(body), ordinal)


def random_program(rng: random.Random, cfg: GenConfig = GenConfig()) -> Program:
    n = rng.randint(2, cfg.max_clauses)
    clauses = [random_clause(rng, cfg, i + 1) for i in range(n)]
    # guarantee at least one fact so the least model is usually nonempty
    if all(c.body for c in clauses):
        pred = rng.choice(cfg.predicates)
        clauses[0] = Clause(Compound(pred, (Compound(rng.choice(cfg.constants), ()),)), (), 1)
    return Program(tuple(clauses))


def ground_atoms_universe(p: Program, depth: int = 4) -> list[Compound]:
    """All ground atoms over the program's predicates and term signature."""
    sig = signature_of_program(p)
    preds = sorted({(c.head.functor, len(c.head.args)) for c in p.clauses})
    terms = universe(sig, depth)
    out = []
    for functor, arity in preds:
        if arity == 0:
            out.append(Compound(functor, ()))
        elif arity == 1:
            out.extend(Compound(functor, (t,)) for t in terms)
    return out


# Mutations --------------------------------------------------------------------


def _mutate_term(rng: random.Random, t: Term, cfg: GenConfig) -> Term:
    kind = rng.choice(["wrap", "swap", "unwrap"])
    if kind == "wrap" and term_depth(t) < 4:
        return Compound(cfg.functor, (t,))
    if kind == "unwrap" and isinstance(t, Compound) and t.functor == cfg.functor:
        return t.args[0]
    if isinstance(t, Compound) and not t.args and t.functor in cfg.constants:
        others = [c for c in cfg.constants if c != t.functor]
        if others:
            return Compound(rng.choice(others), ())
    return Compound(cfg.functor, (t,)) if term_depth(t) < 4 else t


def mutate_clause_atom(
    rng: random.Random, p: Program, cfg: GenConfig = GenConfig()
) -> Optional[tuple[Program, int]]:
    """Mutate one head or body atom argument of one clause; returns the mutant
    and the 1-based ordinal of the mutated clause."""
    idx = rng.randrange(len(p.clauses))
    c = p.clauses[idx]
    atoms = [("head", None)] + [("body", i) for i in range(len(c.body))]
    where, bi = rng.choice(atoms)
    if where == "head":
        if not c.head.args:
            return None
        new_head = Compound(c.head.functor, (_mutate_term(rng, c.head.args[0], cfg),))
        if new_head == c.head:
            return None
        new_c = Clause(new_head, c.body, c.source_index)
    else:
        b = c.body[bi]
        if not b.args:
            return None
        new_b = Compound(b.functor, (_mutate_term(rng, b.args[0], cfg),))
        if new_b == b:
            return None
        body = list(c.body)
        body[bi] = new_b
        new_c = Clause(c.head, tuple(body), c.source_index)
    clauses = list(p.clauses)
    clauses[idx] = new_c
    return Program(tuple(clauses)), idx + 1


def delete_clause(rng: random.Random, p: Program) -> Optional[tuple[Program, int]]:
    if len(p.clauses) < 2:
        return None
    idx = rng.randrange(len(p.clauses))
    clauses = [
        Clause(c.head, c.body, i + 1)
        for i, c in enumerate(c for j, c in enumerate(p.clauses) if j != idx)
    ]
    return Program(tuple(clauses)), idx + 1
