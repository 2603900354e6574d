"""Diagnosis algorithms: proof-tree incorrectness search, the two trace-driven
incorrectness searches (with the restart-on-incorrect-answer optimization),
and Pereira-style incompleteness search with ground-witness restarts.

All searches are deterministic: among several incorrect children or
symptomatic trace entries the leftmost is taken, so sessions replay exactly.
Budget-truncated evidence never produces a result, only TruncatedTree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .boxtrace import (
    ProofTree,
    Subderivation,
    SuccessTrace,
    subderivation_for,
    success_trace_for,
    trace_entries,
)
from .engine import Budget, Derivation, SolveResult, solve
from .oracle import (
    ChannelClosed,
    OracleSession,
    OracleVerdict,
    Specification,
    TruncatedTree,
    is_incompleteness_symptom,
)
from .syntax import Program, Query, term_text
from .terms import Compound, is_ground, is_variant


class NotASymptom(Exception):
    """The alleged symptom is judged correct/complete; nothing to diagnose."""


@dataclass
class IncorrectnessResult:
    clause_ordinal: int
    error_head: Compound
    error_body: tuple[Compound, ...]
    question_log: list[OracleVerdict] = field(default_factory=list)


@dataclass
class IncompletenessResult:
    error_atom: Compound
    uncovered_witness: Compound
    procedure: tuple[str, int]
    question_log: list[OracleVerdict] = field(default_factory=list)
    entries_per_level: list[int] = field(default_factory=list)
    questions_per_level: list[int] = field(default_factory=list)
    incorrect_answer_hints: list[Compound] = field(default_factory=list)


@dataclass
class Undecided:
    reason: str
    frontier: Optional[Compound] = None
    question_log: list[OracleVerdict] = field(default_factory=list)


DiagnosisOutcome = Union[IncorrectnessResult, IncompletenessResult, Undecided]

_MAX_RESTARTS = 200


# Incorrectness on a proof tree (§3.1) ----------------------------------------


def diagnose_incorrectness(
    tree: ProofTree, session: OracleSession
) -> Union[IncorrectnessResult, Undecided]:
    """Descend from the root to the first node all of whose children are
    judged correct; that node's clause instance is the located error."""
    try:
        root_v = session.judge("corr", tree.atom, {"kind": "prooftree", "path": []})
    except ChannelClosed:
        return Undecided("oracle undecided on the root symptom", tree.atom, session.journal)
    if root_v.value == "yes":
        raise NotASymptom(f"{term_text(tree.atom)} is judged correct")
    if root_v.value == "unknown":
        return Undecided("oracle undecided on the root symptom", tree.atom, session.journal)

    node = tree
    path: list[int] = []
    while True:
        descended = False
        for i, child in enumerate(node.children):
            ctx = {"kind": "prooftree", "path": path + [i], "parent": term_text(node.atom)}
            try:
                v = session.judge("corr", child.atom, ctx)
            except ChannelClosed:
                return Undecided("oracle channel closed", child.atom, session.journal)
            if v.value == "unknown":
                return Undecided("oracle undecided", child.atom, session.journal)
            if v.value == "no":
                node = child
                path.append(i)
                descended = True
                break
        if not descended:
            return IncorrectnessResult(
                node.clause_ordinal,
                node.atom,
                tuple(c.atom for c in node.children),
                session.journal,
            )


# Incorrectness on traces (Algorithms 4-5) ------------------------------------


def _find_answer_subderivation(
    program: Program, call_atom: Compound, answer_atom: Compound, budget: Budget
) -> Subderivation:
    """Run the engine on call_atom and return the closed root subderivation of
    the branch that computed answer_atom."""
    res = solve(Query((call_atom,)), program, budget)
    for ans, deriv in zip(res.answers, res.derivations):
        got = ans.answer_atoms[0]
        if got == answer_atom or is_variant(got, answer_atom):
            return subderivation_for(deriv, 0)
    if res.stats.truncated:
        raise TruncatedTree("the search for the incorrect answer hit the budget")
    raise NotASymptom(
        f"{term_text(answer_atom)} is not a computed answer for {term_text(call_atom)}"
    )


find_answer_subderivation = _find_answer_subderivation


def diagnose_incorrectness_tracewise(
    program: Program,
    call_atom: Compound,
    answer_atom: Compound,
    session: OracleSession,
    budget: Budget = Budget(),
    mode: str = "alg4",
    restart: bool = False,
) -> Union[IncorrectnessResult, Undecided]:
    """Trace-driven incorrectness search.

    mode 'alg4' follows the top-level success trace of the subderivation that
    produced the incorrect answer; mode 'alg5' scans the whole top-level
    search trace and restarts at the first incorrect answer met (which may
    locate a different, but real, error).  With `restart`, recursion
    re-launches the engine with the incorrect answer as a fresh query.
    """
    try:
        v = session.judge("corr", answer_atom, {"kind": "symptom"})
    except ChannelClosed:
        return Undecided("oracle undecided on the symptom", answer_atom, session.journal)
    if v.value == "yes":
        raise NotASymptom(f"{term_text(answer_atom)} is judged correct")
    if v.value == "unknown":
        return Undecided("oracle undecided on the symptom", answer_atom, session.journal)
    if mode == "alg4":
        sub = _find_answer_subderivation(program, call_atom, answer_atom, budget)
        return _alg4_descend(program, sub, session, budget, restart, 0)
    if mode == "alg5":
        return _alg5_scan(program, call_atom, answer_atom, session, budget, 0)
    raise ValueError(f"unknown mode {mode!r}")


def _alg4_descend(
    program: Program,
    sub: Subderivation,
    session: OracleSession,
    budget: Budget,
    restart: bool,
    depth: int,
) -> Union[IncorrectnessResult, Undecided]:
    if depth > _MAX_RESTARTS:
        return Undecided("restart limit exceeded", sub.call_atom, session.journal)
    st = success_trace_for(sub)
    for (call, nested), ans in zip(st.calls, st.answers):
        try:
            v = session.judge("corr", ans, {"kind": "trace", "call": term_text(call)})
        except ChannelClosed:
            return Undecided("oracle channel closed", ans, session.journal)
        if v.value == "unknown":
            return Undecided("oracle undecided", ans, session.journal)
        if v.value == "no":
            if restart:
                fresh = _find_answer_subderivation(program, ans, ans, budget)
                return _alg4_descend(program, fresh, session, budget, restart, depth + 1)
            return _alg4_descend(program, nested, session, budget, restart, depth + 1)
    from .boxtrace import answer_of

    return IncorrectnessResult(st.clause_ordinal, answer_of(sub), st.answers, session.journal)


def _alg5_scan(
    program: Program,
    call_atom: Compound,
    answer_atom: Compound,
    session: OracleSession,
    budget: Budget,
    depth: int,
) -> Union[IncorrectnessResult, Undecided]:
    if depth > _MAX_RESTARTS:
        return Undecided("restart limit exceeded", call_atom, session.journal)
    res = solve(Query((call_atom,)), program, budget)
    target = None
    for ans in res.answers:
        got = ans.answer_atoms[0]
        if got == answer_atom or is_variant(got, answer_atom):
            target = got
            break
    if target is None:
        if res.stats.truncated:
            raise TruncatedTree("the search for the incorrect answer hit the budget")
        raise NotASymptom(
            f"{term_text(answer_atom)} is not a computed answer for {term_text(call_atom)}"
        )
    judged: dict[Compound, str] = {}
    for e in res.events:
        if e.port == "Exit" and e.depth == 2:
            b = e.atom
            if b not in judged:
                try:
                    v = session.judge("corr", b, {"kind": "search-trace", "for": term_text(call_atom)})
                except ChannelClosed:
                    return Undecided("oracle channel closed", b, session.journal)
                if v.value == "unknown":
                    return Undecided("oracle undecided", b, session.journal)
                judged[b] = v.value
            if judged[b] == "no":
                return _alg5_scan(program, b, b, session, budget, depth + 1)
        elif e.port == "Exit" and e.depth == 1 and e.atom == target:
            break
    # no incorrect intermediate answer: the error is the clause that produced it
    for ans, deriv in zip(res.answers, res.derivations):
        if ans.answer_atoms[0] == target:
            sub = subderivation_for(deriv, 0)
            st = success_trace_for(sub)
            from .boxtrace import answer_of

            return IncorrectnessResult(
                st.clause_ordinal, answer_of(sub), st.answers, session.journal
            )
    raise AssertionError("unreachable: target answer lost")


# Incompleteness (Algorithm 6) -------------------------------------------------


def diagnose_incompleteness(
    program: Program,
    atom: Compound,
    session: OracleSession,
    budget: Budget = Budget(),
    spec_corr: Optional[Specification] = None,
) -> Union[IncompletenessResult, Undecided]:
    """Pereira-style search: build the top-level search trace of the symptom,
    recurse on the first symptomatic entry (restarting from its ground
    witness when one is known), and report the atom whose trace holds no
    further symptom, together with an uncovered ground witness."""
    spec = session.specs["compl"]
    entries_per_level: list[int] = []
    questions_per_level: list[int] = []
    hints: list[Compound] = []

    def level(a: Compound, depth: int) -> Union[IncompletenessResult, Undecided]:
        if depth > _MAX_RESTARTS:
            return Undecided("restart limit exceeded", a, session.journal)
        res = solve(Query((a,)), program, budget)
        if res.stats.truncated:
            raise TruncatedTree(f"the LD-tree for {term_text(a)} hit the budget")
        answers = tuple(ans.answer_atoms[0] for ans in res.answers)
        symptom, _ = _entry_symptom(a, answers, depth)
        if symptom is None:
            return Undecided("oracle undecided on the symptom", a, session.journal)
        if not symptom:
            raise NotASymptom(f"{term_text(a)} with its answers is not an incompleteness symptom")
        entries = trace_entries(res.events)
        entries_per_level.append(len(entries))
        asked_before = session.question_count
        for entry in entries:
            if spec_corr is not None:
                for b in entry.answers:
                    from .oracle import is_incorrectness_symptom

                    if is_incorrectness_symptom(spec_corr, b):
                        hints.append(b)
            s, w = _entry_symptom(entry.call, entry.answers, depth)
            if s is None:
                questions_per_level.append(session.question_count - asked_before)
                return Undecided("oracle undecided", entry.call, session.journal)
            if s:
                target = w if w is not None else entry.call
                questions_per_level.append(session.question_count - asked_before)
                return level(target, depth + 1)
        questions_per_level.append(session.question_count - asked_before)
        witness = _pick_witness(a)
        if witness is None:
            return Undecided("no uncovered instance found within bounds", a, session.journal)
        return IncompletenessResult(
            a,
            witness,
            (a.functor, len(a.args)),
            session.journal,
            entries_per_level,
            questions_per_level,
            hints,
        )

    def _entry_symptom(a: Compound, answers: tuple[Compound, ...], depth: int):
        s, w = is_incompleteness_symptom(spec, a, answers)
        if s is not None:
            return s, w
        ctx = {"kind": "incompleteness", "answers": [term_text(x) for x in answers]}
        try:
            v = session.ask_human("compl", a, ctx)
        except ChannelClosed:
            return None, None
        if v.value == "yes":
            return True, None
        if v.value == "no":
            return False, None
        return None, None

    def _pick_witness(a: Compound) -> Optional[Compound]:
        from .oracle import find_uncovered_instance

        return find_uncovered_instance(spec, a, program)

    return level(atom, 0)
