#!/usr/bin/env python3
"""End-to-end demo on the even/1 example programs.

Shows the four-port trace of a wrong answer, locates the incorrect clause
against the specification, and locates the missing-clause incompleteness in
the truncated variant.
"""

from pathlib import Path

from pldiag.boxtrace import render_events
from pldiag.engine import solve
from pldiag.oracle import parse_spec_text
from pldiag.runner import ReplayChannel, outcome_text, run_diagnosis
from pldiag.syntax import parse_program, parse_query

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def main() -> None:
    bug = parse_program((PROGRAMS / "even_bug.pl").read_text())
    missing = parse_program((PROGRAMS / "even_missing.pl").read_text())
    specs = parse_spec_text((PROGRAMS / "even.spec").read_text())

    print("== trace of the incorrect answer even(s(0)) ==")
    print(render_events(solve(parse_query("even(s(0))"), bug).events), end="")

    print("\n== incorrectness diagnosis ==")
    q = parse_query("even(s(0))").atoms[0]
    doc = run_diagnosis("corr", bug, specs, q, ReplayChannel([]))
    print(outcome_text(doc), end="")

    print("\n== incompleteness diagnosis ==")
    q = parse_query("even(s(s(0)))").atoms[0]
    doc = run_diagnosis("compl", missing, specs, q, ReplayChannel([]))
    print(outcome_text(doc), end="")


if __name__ == "__main__":
    main()
