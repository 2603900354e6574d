"""Diagnosis session runner shared by the CLI and the HTTP service.

A session is advanced by deterministic replay: the full diagnosis is re-run
with the list of human answers collected so far; machine verdicts recompute
identically, and when the next human question is reached with no scripted
answer left, PendingQuestion carries it out.  Result documents are produced
by one canonical serializer, so a scripted CLI run and an interactive HTTP
session over the same answers yield byte-identical JSON.
"""

from __future__ import annotations

import json
from typing import Optional, Union

from .boxtrace import ProofTree, TraceEntry, proof_tree_for, trace_entries
from .diagnose import (
    IncompletenessResult,
    IncorrectnessResult,
    NotASymptom,
    Undecided,
    diagnose_incompleteness,
    diagnose_incorrectness,
    diagnose_incorrectness_tracewise,
    find_answer_subderivation,
)
from .engine import Budget, solve
from .oracle import OracleSession, Question, Specification, TruncatedTree
from .syntax import Query, term_text
from .terms import Compound, Term, Var


class PendingQuestion(Exception):
    """Raised out of a replay run when a human verdict is needed."""

    def __init__(self, question: Question):
        super().__init__(term_text(question.atom))
        self.question = question


class ReplayChannel:
    """Feeds scripted verdicts in order; asks for more by raising."""

    def __init__(self, verdicts: list[str]):
        self.verdicts = list(verdicts)
        self.pos = 0

    def ask(self, question: Question) -> str:
        if self.pos < len(self.verdicts):
            v = self.verdicts[self.pos]
            self.pos += 1
            if v not in ("yes", "no", "unknown"):
                raise ValueError(f"bad scripted verdict {v!r}")
            return v
        raise PendingQuestion(question)


# JSON documents ---------------------------------------------------------------


def term_json(t: Term) -> dict:
    if isinstance(t, Var):
        return {"text": t.name, "var": t.name}
    return {
        "args": [term_json(a) for a in t.args],
        "functor": t.functor,
        "text": term_text(t),
    }


def prooftree_json(t: ProofTree) -> dict:
    return {
        "atom": term_json(t.atom),
        "children": [prooftree_json(c) for c in t.children],
        "clause": t.clause_ordinal,
    }


def trace_json(entries: tuple[TraceEntry, ...]) -> list[dict]:
    return [
        {
            "answers": [term_json(a) for a in e.answers],
            "call": term_json(e.call),
            "invocation": e.invocation,
        }
        for e in entries
    ]


def _questions_json(journal) -> list[dict]:
    return [
        {
            "atom": term_text(v.question),
            "role": v.role,
            "seq": v.seq,
            "source": v.source,
            "value": v.value,
        }
        for v in journal
    ]


def question_json(q: Question) -> dict:
    return {
        "atom": term_json(q.atom),
        "context": q.context,
        "role": q.role,
        "seq": q.seq,
    }


def dumps_canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# Running a diagnosis ----------------------------------------------------------


def run_diagnosis(
    kind: str,
    program,
    specs: dict[str, Specification],
    query_atom: Compound,
    channel,
    answer_atom: Optional[Compound] = None,
    mode: str = "tree",
    restart: bool = False,
    budget: Budget = Budget(),
) -> dict:
    """One full diagnosis run; returns a JSON-ready outcome document.

    PendingQuestion propagates to the caller (session machinery); every other
    outcome — located error, undecided, not-a-symptom, truncated evidence —
    is folded into the document's status.
    """
    if kind not in ("corr", "compl"):
        raise ValueError(f"unknown diagnosis kind {kind!r}")
    session = OracleSession(specs, channel)
    try:
        if kind == "corr":
            out = _run_corr(program, query_atom, answer_atom, mode, restart, budget, session)
        else:
            out = diagnose_incompleteness(
                program, query_atom, session, budget, specs.get("corr")
            )
    except NotASymptom as e:
        return {
            "detail": str(e),
            "kind": _kind_name(kind),
            "questions": _questions_json(session.journal),
            "status": "not-a-symptom",
        }
    except TruncatedTree as e:
        return {
            "detail": str(e),
            "kind": _kind_name(kind),
            "questions": _questions_json(session.journal),
            "status": "truncated",
        }
    return outcome_json(kind, out)


def _run_corr(program, query_atom, answer_atom, mode, restart, budget, session):
    if answer_atom is None:
        res = solve(Query((query_atom,)), program, budget)
        if not res.answers:
            if res.stats.truncated:
                raise TruncatedTree(
                    f"the search for {term_text(query_atom)} hit the budget"
                )
            raise NotASymptom(f"no computed answers for {term_text(query_atom)}")
        answer_atom = res.answers[0].answer_atoms[0]
    if mode == "tree":
        sub = find_answer_subderivation(program, query_atom, answer_atom, budget)
        tree = proof_tree_for(sub)
        return diagnose_incorrectness(tree, session)
    return diagnose_incorrectness_tracewise(
        program, query_atom, answer_atom, session, budget, mode, restart
    )


def _kind_name(kind: str) -> str:
    return "incorrectness" if kind == "corr" else "incompleteness"


def outcome_json(
    kind: str, out: Union[IncorrectnessResult, IncompletenessResult, Undecided]
) -> dict:
    if isinstance(out, Undecided):
        return {
            "frontier": term_json(out.frontier) if out.frontier is not None else None,
            "kind": _kind_name(kind),
            "questions": _questions_json(out.question_log),
            "reason": out.reason,
            "status": "undecided",
        }
    if isinstance(out, IncorrectnessResult):
        return {
            "clause": out.clause_ordinal,
            "error": {
                "body": [term_json(b) for b in out.error_body],
                "head": term_json(out.error_head),
            },
            "kind": "incorrectness",
            "questions": _questions_json(out.question_log),
            "status": "located",
        }
    return {
        "entries_per_level": list(out.entries_per_level),
        "error_atom": term_json(out.error_atom),
        "incorrect_answer_hints": [term_text(a) for a in out.incorrect_answer_hints],
        "kind": "incompleteness",
        "procedure": f"{out.procedure[0]}/{out.procedure[1]}",
        "questions": _questions_json(out.question_log),
        "questions_per_level": list(out.questions_per_level),
        "status": "located",
        "witness": term_json(out.uncovered_witness),
    }


def outcome_text(doc: dict) -> str:
    """Human rendering of an outcome document (the CLI's default output)."""
    lines: list[str] = []
    status = doc["status"]
    if status == "located" and doc["kind"] == "incorrectness":
        head = doc["error"]["head"]["text"]
        body = [b["text"] for b in doc["error"]["body"]]
        clause_str = head if not body else head + " :- " + ", ".join(body)
        lines.append(f"incorrectness error in clause {doc['clause']}:")
        lines.append(f"  {clause_str}.")
    elif status == "located":
        lines.append(f"incompleteness error in procedure {doc['procedure']}:")
        lines.append(f"  uncovered atom: {doc['witness']['text']}")
        for hint in doc["incorrect_answer_hints"]:
            lines.append(f"  hint: incorrect answer {hint} seen; consider `diagnose corr`")
    elif status == "undecided":
        frontier = doc["frontier"]["text"] if doc["frontier"] else "-"
        lines.append(f"undecided: {doc['reason']} (frontier: {frontier})")
    else:
        lines.append(f"{status}: {doc['detail']}")
    lines.append(f"questions asked: {len(doc['questions'])}")
    return "\n".join(lines) + "\n"


def symptom_prooftree(program, query_atom: Compound, budget: Budget) -> ProofTree:
    """Proof tree of the first computed answer for an atomic query."""
    res = solve(Query((query_atom,)), program, budget)
    if not res.answers:
        if res.stats.truncated:
            raise TruncatedTree(f"the search for {term_text(query_atom)} hit the budget")
        raise NotASymptom(f"no computed answers for {term_text(query_atom)}")
    answer_atom = res.answers[0].answer_atoms[0]
    sub = find_answer_subderivation(program, query_atom, answer_atom, budget)
    return proof_tree_for(sub)


def symptom_trace(program, query_atom: Compound, budget: Budget):
    res = solve(Query((query_atom,)), program, budget)
    return trace_entries(res.events), res
