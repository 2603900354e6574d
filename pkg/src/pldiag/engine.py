"""LD-resolution engine: Prolog selection rule, textual clause order,
depth-first backtracking, with a complete recording of the computation.

A run yields computed answers, the full four-port event stream, and one
recorded derivation (queries + resolution steps) per answer.  Budgets bound
resolution attempts, box depth, and answer count; hitting a budget marks the
run truncated, which downstream diagnosis treats as "don't know", never as
failure.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .herbrand import tp_fixpoint, tp_oracle  # re-exported: the engine's oracle
from .syntax import Clause, Program, Query, rename_clause
from .terms import (
    Compound,
    Subst,
    Term,
    VarCounter,
    apply_all,
    apply_subst,
    compose,
    restrict,
    unify,
    variables_of,
)

__all__ = [
    "Budget",
    "Step",
    "Derivation",
    "Answer",
    "BoxEvent",
    "ExitRecord",
    "TreeStats",
    "SolveResult",
    "resolve_step",
    "solve",
    "tp_oracle",
    "tp_fixpoint",
]


@dataclass(frozen=True)
class Budget:
    max_steps: int = 20000
    max_depth: int = 120
    max_answers: int = 500

    def __post_init__(self) -> None:
        if self.max_steps <= 0 or self.max_depth <= 0 or self.max_answers <= 0:
            raise ValueError("budget limits must be positive")


@dataclass(frozen=True)
class Step:
    clause_ordinal: int  # 1-based source position
    mgu: "Subst"
    renamed_head: Compound
    renamed_body: tuple[Compound, ...]


@dataclass
class Derivation:
    queries: list[tuple[Compound, ...]]  # Q0, Q1, ...
    steps: list[Step]  # steps[i] takes queries[i] to queries[i+1]
    status: str = "success"  # success | failure | exhausted-budget


@dataclass(frozen=True)
class Answer:
    query: Query
    binding: "Subst"  # restricted to the query's variables
    answer_atoms: tuple[Compound, ...]  # the instantiated query


@dataclass(frozen=True)
class BoxEvent:
    port: str  # Call | Exit | Redo | Fail
    invocation: int
    depth: int
    atom: Compound
    nondet: bool = False  # meaningful on Exit only


@dataclass(frozen=True)
class ExitRecord:
    """A snapshot pairing an Exit event with its closed subderivation."""

    event_index: int
    derivation: Derivation
    sub_start: int  # query index where the box's call was selected
    sub_end: int  # query index closing the subderivation


@dataclass
class TreeStats:
    steps: int = 0
    max_depth: int = 0
    answer_count: int = 0
    truncated: bool = False
    reason: Optional[str] = None
    status: str = "failure"  # success | failure | exhausted-budget


@dataclass
class SolveResult:
    answers: list[Answer]
    events: list[BoxEvent]
    stats: TreeStats
    derivations: list[Derivation]  # parallel to answers
    exit_records: list[ExitRecord] = field(default_factory=list)


class _BudgetExceeded(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def resolve_step(
    q: tuple[Compound, ...], p: Program, clause_ordinal: int, counter: Optional[VarCounter] = None
) -> Optional[tuple[tuple[Compound, ...], "Subst"]]:
    """One LD step: resolve the leftmost atom of q with the given clause.

    Returns (resolvent, mgu) or None when the head does not unify.
    """
    if not q:
        raise ValueError("query must be nonempty")
    clause = p.clauses[clause_ordinal - 1]
    head, body = rename_clause(clause, counter or VarCounter())
    mgu = unify(q[0], head)
    if mgu is None:
        return None
    resolvent = apply_all(mgu, body) + apply_all(mgu, q[1:])
    return resolvent, mgu


class _Run:
    def __init__(self, program: Program, budget: Budget, capture_exits: bool):
        self.program = program
        self.budget = budget
        self.capture_exits = capture_exits
        self.events: list[BoxEvent] = []
        self.queries: list[tuple[Compound, ...]] = []
        self.steps: list[Step] = []
        self.exit_records: list[ExitRecord] = []
        self.counter = VarCounter()
        self.stats = TreeStats()
        self._inv = 0
        self._clock = 0
        self._choicepoints: dict[int, int] = {}  # id -> birth time

    def _tick(self) -> int:
        self._clock += 1
        return self._clock

    def _emit(self, port: str, inv: int, depth: int, atom: Compound, nondet: bool = False) -> None:
        self.events.append(BoxEvent(port, inv, depth, atom, nondet))

    def _count_step(self) -> None:
        self.stats.steps += 1
        if self.stats.steps > self.budget.max_steps:
            raise _BudgetExceeded("max_steps")

    def _snapshot(self, status: str) -> Derivation:
        return Derivation(list(self.queries), list(self.steps), status)

    def solve(self, query: Query) -> SolveResult:
        self.queries = [tuple(query.atoms)]
        answers: list[Answer] = []
        derivations: list[Derivation] = []
        qvars = set().union(*(variables_of(a) for a in query.atoms)) if query.atoms else set()
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 20 * self.budget.max_depth + 1000))
        try:
            for theta in self._solve_seq(tuple(query.atoms), 1):
                answers.append(
                    Answer(query, restrict(theta, qvars), apply_all(theta, query.atoms))
                )
                derivations.append(self._snapshot("success"))
                if len(answers) >= self.budget.max_answers:
                    self.stats.truncated = True
                    self.stats.reason = "max_answers"
                    break
        except _BudgetExceeded as e:
            self.stats.truncated = True
            self.stats.reason = e.reason
        finally:
            sys.setrecursionlimit(old_limit)
        self.stats.answer_count = len(answers)
        if answers:
            self.stats.status = "success"
        elif self.stats.truncated:
            self.stats.status = "exhausted-budget"
        else:
            self.stats.status = "failure"
        return SolveResult(answers, self.events, self.stats, derivations, self.exit_records)

    def _solve_seq(self, goals: tuple[Compound, ...], depth: int) -> Iterator["Subst"]:
        if not goals:
            yield {}
            return
        first, rest = goals[0], goals[1:]
        for t1 in self._solve_atom(first, depth):
            rest1 = apply_all(t1, rest)
            for t2 in self._solve_seq(rest1, depth):
                yield compose(t1, t2)

    def _solve_atom(self, atom: Compound, depth: int) -> Iterator["Subst"]:
        if depth > self.budget.max_depth:
            raise _BudgetExceeded("max_depth")
        self._inv += 1
        inv = self._inv
        call_time = self._tick()
        start_q = len(self.queries) - 1
        self.stats.max_depth = max(self.stats.max_depth, depth)
        self._emit("Call", inv, depth, atom)
        gen = self._clause_answers(atom, depth)
        last_exit: Optional[Compound] = None
        while True:
            if last_exit is not None:
                self._emit("Redo", inv, depth, last_exit)
            try:
                theta = next(gen)
            except StopIteration:
                self._emit("Fail", inv, depth, atom)
                return
            exit_atom = apply_subst(theta, atom)
            assert isinstance(exit_atom, Compound)
            nondet = any(birth > call_time for birth in self._choicepoints.values())
            self._emit("Exit", inv, depth, exit_atom, nondet)
            if self.capture_exits:
                self.exit_records.append(
                    ExitRecord(
                        len(self.events) - 1,
                        self._snapshot("success"),
                        start_q,
                        len(self.queries) - 1,
                    )
                )
            last_exit = exit_atom
            yield theta

    def _clause_answers(self, atom: Compound, depth: int) -> Iterator["Subst"]:
        # Head-unification pre-filter ("perfect indexing"): only clauses whose
        # head actually unifies create alternatives, so the nondet flag matches
        # an indexing Prolog's choicepoints.  Every attempt counts against the
        # step budget, matched or not.
        matches = []
        for clause in self.program.clauses_for(atom.functor, len(atom.args)):
            self._count_step()
            head, body = rename_clause(clause, self.counter)
            mgu = unify(atom, head)
            if mgu is not None:
                matches.append((clause.source_index, head, body, mgu))
        for idx, (ordinal, head, body, mgu) in enumerate(matches):
            cp: Optional[int] = None
            if idx < len(matches) - 1:
                cp = self._tick()
                self._choicepoints[cp] = cp
            self._push_step(ordinal, head, body, mgu)
            goals = apply_all(mgu, body)
            try:
                for t in self._solve_seq(goals, depth + 1):
                    yield compose(mgu, t)
            finally:
                self._pop_step()
                if cp is not None:
                    self._choicepoints.pop(cp, None)

    def _push_step(
        self, ordinal: int, head: Compound, body: tuple[Compound, ...], mgu: "Subst"
    ) -> None:
        prev = self.queries[-1]
        new_q = apply_all(mgu, body) + apply_all(mgu, prev[1:])
        self.queries.append(new_q)
        self.steps.append(Step(ordinal, mgu, head, body))

    def _pop_step(self) -> None:
        self.queries.pop()
        self.steps.pop()


def solve(
    q: Query, p: Program, b: Budget = Budget(), capture_exits: bool = False
) -> SolveResult:
    """All answers of q against p in Prolog's depth-first order, with the
    full four-port event stream and per-answer derivations."""
    return _Run(p, b, capture_exits).solve(q)


def replay(d: Derivation) -> list[tuple[Compound, ...]]:
    """Re-execute recorded steps from Q0; must reproduce every recorded query."""
    qs = [d.queries[0]]
    for step in d.steps:
        prev = qs[-1]
        qs.append(apply_all(step.mgu, step.renamed_body) + apply_all(step.mgu, prev[1:]))
    return qs
