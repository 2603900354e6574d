"""Byrd box event model and trace-derived structures.

Everything here is pure over recorded derivations and event streams:
subderivation spans, top-level calls, success traces, search traces, proof
trees, event-grammar validation, the one-line wire rendering of events, and
the backwards reconstruction of a success trace from rendered event text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .engine import BoxEvent, Budget, Derivation, SolveResult, solve
from .syntax import Program, Query, parse_term, term_text
from .terms import Compound, Term, apply_subst


class MalformedTrace(Exception):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


@dataclass(frozen=True)
class ViolationReport:
    index: int  # first offending event
    reason: str


@dataclass(frozen=True)
class Subderivation:
    derivation: Derivation
    start: int  # index of Q_{k-1}, the query whose selected atom is the call
    end: Optional[int]  # index of Q_l, or None when the call did not succeed

    @property
    def call_atom(self) -> Compound:
        return self.derivation.queries[self.start][0]

    @property
    def closed(self) -> bool:
        return self.end is not None


@dataclass(frozen=True)
class SuccessTrace:
    for_atom: Compound
    answers: tuple[Compound, ...]  # one answer per body atom of the first-step clause
    clause_ordinal: int
    calls: tuple[tuple[Compound, "Subderivation"], ...] = ()


@dataclass(frozen=True)
class TraceEntry:
    invocation: int
    call: Compound
    answers: tuple[Compound, ...]


@dataclass(frozen=True)
class TopLevelTrace:
    for_atom: Compound
    entries: tuple[TraceEntry, ...]
    truncated: bool = False


@dataclass(frozen=True)
class ProofTree:
    atom: Compound
    clause_ordinal: int
    children: tuple["ProofTree", ...] = ()

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)


# Subderivations (Defs. 1-2) ---------------------------------------------------


def _apply_span(d: Derivation, t: Term, lo: int, hi: int) -> Term:
    """Apply the mgus of steps lo..hi (inclusive, 0-based) to t."""
    for i in range(lo, hi + 1):
        t = apply_subst(d.steps[i].mgu, t)
    return t


def subderivation_for(d: Derivation, position: int) -> Subderivation:
    if position >= len(d.queries) or not d.queries[position]:
        raise ValueError("position must name a nonempty query")
    m = len(d.queries[position]) - 1
    for l in range(position + 1, len(d.queries)):
        if len(d.queries[l]) == m:
            return Subderivation(d, position, l)
    return Subderivation(d, position, None)


def answer_of(s: Subderivation) -> Compound:
    if not s.closed:
        raise ValueError("open subderivation has no answer")
    a = _apply_span(s.derivation, s.call_atom, s.start, s.end - 1)
    assert isinstance(a, Compound)
    return a


def top_level_calls(s: Subderivation) -> list[tuple[Compound, Subderivation]]:
    """The top-level calls of s, each with its nested subderivation, in order."""
    d = s.derivation
    if s.start + 1 >= len(d.queries):
        raise ValueError("subderivation spans no resolution step")
    n = len(d.steps[s.start].renamed_body)
    stop = s.end if s.end is not None else len(d.queries) - 1
    length = len(d.queries[s.start + 1])
    out: list[tuple[Compound, Subderivation]] = []
    for j in range(1, n + 1):
        target = length + 1 - j
        i_j = None
        for i in range(s.start + 1, stop + 1):
            if len(d.queries[i]) == target:
                i_j = i
                break
        if i_j is None:
            break  # this body atom was never reached
        out.append((d.queries[i_j][0], subderivation_for(d, i_j)))
    return out


def success_trace_for(s: Subderivation) -> SuccessTrace:
    if not s.closed:
        raise ValueError("success trace requires a closed subderivation")
    calls = top_level_calls(s)
    answers = []
    for _, nested in calls:
        assert nested.closed
        answers.append(answer_of(nested))
    ordinal = s.derivation.steps[s.start].clause_ordinal
    return SuccessTrace(s.call_atom, tuple(answers), ordinal, tuple(calls))


def proof_tree_for(s: Subderivation) -> ProofTree:
    """Proof tree of a successful subderivation, every node instantiated to
    its state at the subderivation's success."""
    if not s.closed:
        raise ValueError("proof tree requires a closed subderivation")
    d = s.derivation
    root = answer_of(s)
    children = []
    for _, nested in top_level_calls(s):
        sub_tree = proof_tree_for(nested)
        # instantiate with the bindings made after the nested call succeeded
        children.append(_instantiate(sub_tree, d, nested.end, s.end - 1))
    ordinal = d.steps[s.start].clause_ordinal
    return ProofTree(root, ordinal, tuple(children))


def _instantiate(t: ProofTree, d: Derivation, lo: int, hi: int) -> ProofTree:
    atom = _apply_span(d, t.atom, lo, hi)
    assert isinstance(atom, Compound)
    return ProofTree(atom, t.clause_ordinal, tuple(_instantiate(c, d, lo, hi) for c in t.children))


# Search traces (Def. 4, Algorithm 1) ------------------------------------------


def all_answers_for(invocation: int, events: list[BoxEvent]) -> list[Compound]:
    """All Exit atoms of one invocation, in emission order."""
    if not any(e.invocation == invocation for e in events):
        raise ValueError(f"no events for invocation {invocation}")
    return [e.atom for e in events if e.invocation == invocation and e.port == "Exit"]


def trace_entries(events: list[BoxEvent], depth: int = 2) -> tuple[TraceEntry, ...]:
    """Calls at the given depth paired with all their answers, keyed by
    invocation (renaming-variant calls stay distinct)."""
    order: list[int] = []
    calls: dict[int, Compound] = {}
    answers: dict[int, list[Compound]] = {}
    for e in events:
        if e.depth != depth:
            continue
        if e.port == "Call":
            order.append(e.invocation)
            calls[e.invocation] = e.atom
            answers[e.invocation] = []
        elif e.port == "Exit":
            answers[e.invocation].append(e.atom)
    return tuple(TraceEntry(i, calls[i], tuple(answers[i])) for i in order)


def search_trace_for(q: Query, p: Program, b: Budget = Budget()) -> tuple[TopLevelTrace, SolveResult]:
    """Top-level search trace for an atomic query: every top-level call in the
    whole search, paired with all its computed answers in that tree."""
    if len(q.atoms) != 1:
        raise ValueError("search trace requires an atomic query")
    res = solve(q, p, b)
    return (
        TopLevelTrace(q.atoms[0], trace_entries(res.events), res.stats.truncated),
        res,
    )


# Event grammar (§2.2) ---------------------------------------------------------


def events_wellformed(events: list[BoxEvent]) -> Optional[ViolationReport]:
    """None when the stream is well-formed, else the first violation.

    Checks the per-invocation pattern Call (Exit Redo)* (Exit|Fail), depth
    constancy per invocation, proper box nesting, and strictly decreasing
    depths inside consecutive-Exit runs.
    """
    expect: dict[int, str] = {}  # invocation -> next allowed: exit_or_fail | redo
    depth_of: dict[int, int] = {}
    stack: list[list] = []  # frames [invocation, depth, state open|suspended]

    def frame_index(inv: int) -> Optional[int]:
        for i in range(len(stack) - 1, -1, -1):
            if stack[i][0] == inv:
                return i
        return None

    prev: Optional[BoxEvent] = None
    for idx, e in enumerate(events):
        if e.port == "Call":
            if e.invocation in depth_of:
                return ViolationReport(idx, f"duplicate Call for invocation {e.invocation}")
            depth_of[e.invocation] = e.depth
            expect[e.invocation] = "exit_or_fail"
            open_depth = 0
            for f in reversed(stack):
                if f[2] == "open":
                    open_depth = f[1]
                    break
            if e.depth != open_depth + 1:
                return ViolationReport(idx, f"Call depth {e.depth}, expected {open_depth + 1}")
            stack.append([e.invocation, e.depth, "open"])
        else:
            if e.invocation not in depth_of:
                return ViolationReport(idx, f"{e.port} before Call for invocation {e.invocation}")
            if e.depth != depth_of[e.invocation]:
                return ViolationReport(idx, "depth differs from the invocation's Call depth")
            i = frame_index(e.invocation)
            if e.port == "Exit":
                if expect[e.invocation] != "exit_or_fail":
                    return ViolationReport(idx, "Exit without a preceding Call or Redo")
                expect[e.invocation] = "redo"
                if i is None or stack[i][2] != "open":
                    return ViolationReport(idx, "Exit of a box that is not open")
                if any(f[2] == "open" for f in stack[i + 1 :]):
                    return ViolationReport(idx, "Exit while an inner box is still open")
                stack[i][2] = "suspended"
                if prev is not None and prev.port == "Exit" and e.depth != prev.depth - 1:
                    return ViolationReport(idx, "consecutive Exits must have decreasing depths")
            elif e.port == "Redo":
                if expect[e.invocation] != "redo":
                    return ViolationReport(idx, "Redo before any Exit")
                expect[e.invocation] = "exit_or_fail"
                if i is None or stack[i][2] != "suspended":
                    return ViolationReport(idx, "Redo of a box that is not suspended")
                if any(f[2] == "open" for f in stack[i + 1 :]):
                    return ViolationReport(idx, "Redo while an inner box is still open")
                stack[i][2] = "open"
            elif e.port == "Fail":
                if expect[e.invocation] != "exit_or_fail":
                    return ViolationReport(idx, "Fail without a preceding Call or Redo")
                expect[e.invocation] = "dead"
                if i is None:
                    return ViolationReport(idx, "Fail of an unknown box")
                if i != len(stack) - 1:
                    return ViolationReport(idx, "Fail of a box that is not innermost")
                if stack[i][2] != "open":
                    return ViolationReport(idx, "Fail of a box that is not open")
                stack.pop()
            else:
                return ViolationReport(idx, f"unknown port {e.port!r}")
        prev = e
    for inv, state in expect.items():
        if state == "exit_or_fail" and any(f[0] == inv and f[2] == "open" for f in stack):
            return ViolationReport(len(events) - 1, f"invocation {inv} never terminated")
    return None


# Wire format ------------------------------------------------------------------

_LINE_RE = re.compile(r"^(\? )?(\d+) (\d+) (Call|Exit|Redo|Fail): (.+)$")


def render_event(e: BoxEvent) -> str:
    prefix = "? " if (e.port == "Exit" and e.nondet) else ""
    return f"{prefix}{e.invocation} {e.depth} {e.port}: {term_text(e.atom)}"


def render_events(events: list[BoxEvent], sicstus_redo_filter: bool = False) -> str:
    """One event per line.  With the filter on, Redo items whose corresponding
    Exit was not marked nondet are suppressed (the SICStus display policy)."""
    out = []
    last_exit_nondet: dict[int, bool] = {}
    for e in events:
        if e.port == "Exit":
            last_exit_nondet[e.invocation] = e.nondet
        if sicstus_redo_filter and e.port == "Redo" and not last_exit_nondet.get(e.invocation):
            continue
        out.append(render_event(e))
    return "".join(line + "\n" for line in out)


def parse_event_line(line: str, lineno: int) -> BoxEvent:
    m = _LINE_RE.match(line)
    if m is None:
        raise MalformedTrace(f"unparsable event line {line!r}", lineno)
    nondet, inv, depth, port, atom_text = m.groups()
    try:
        atom = parse_term(atom_text, allow_generated=True)
    except Exception:
        raise MalformedTrace(f"unparsable atom {atom_text!r}", lineno)
    if not isinstance(atom, Compound):
        raise MalformedTrace("event atom must be a compound", lineno)
    return BoxEvent(port, int(inv), int(depth), atom, bool(nondet))


def parse_events(text: str) -> list[BoxEvent]:
    events = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        events.append(parse_event_line(line, i))
    return events


# Backwards reconstruction (Algorithm 3) ---------------------------------------


def reconstruct_success_trace(text: str, exit_line_index: int) -> list[Compound]:
    """Walk backwards from an Exit line through rendered event text and
    recover the top-level success trace of the subderivation it closes.

    `exit_line_index` is 0-based into the text's lines.
    """
    lines = text.splitlines()
    events = [parse_event_line(line, i + 1) for i, line in enumerate(lines)]
    if exit_line_index < 0 or exit_line_index >= len(events):
        raise MalformedTrace("exit line index out of range", exit_line_index + 1)
    root = events[exit_line_index]
    if root.port != "Exit":
        raise MalformedTrace("line is not an Exit item", exit_line_index + 1)
    d = root.depth

    def call_index_of(invocation: int, before: int) -> int:
        for back in range(before - 1, -1, -1):
            if events[back].port == "Call" and events[back].invocation == invocation:
                return back
        raise MalformedTrace(f"no Call item found for invocation {invocation}", before)

    trace: list[Compound] = []
    i = exit_line_index
    while True:
        j = i - 1
        if j < 0:
            raise MalformedTrace(
                f"no Call item found for invocation {root.invocation}", 1
            )
        e = events[j]
        if e.port == "Exit" and e.depth == d + 1:
            # a top-level answer: record it and skip over its whole box
            trace.insert(0, e.atom)
            i = call_index_of(e.invocation, j)
        elif e.port == "Fail" and e.depth == d + 1:
            # an abandoned earlier clause attempt: skip over the failed box
            i = call_index_of(e.invocation, j)
        elif e.port in ("Call", "Redo") and e.depth == d and e.invocation == root.invocation:
            return trace
        else:
            raise MalformedTrace(
                f"unexpected preceding item {e.port} at depth {e.depth}", j + 1
            )
