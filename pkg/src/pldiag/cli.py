"""Command-line frontend: solve, trace, success-trace, search-trace,
prooftree, diagnose, serve.

Errors are reported as a single machine-parsable line on stderr
(`error: <category>: <detail>`) with a nonzero exit status.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .boxtrace import (
    render_events,
    subderivation_for,
    success_trace_for,
)
from .diagnose import NotASymptom
from .engine import Budget, solve
from .oracle import ChannelClosed, Question, SpecError, TruncatedTree, parse_spec_text
from .runner import (
    PendingQuestion,
    ReplayChannel,
    dumps_canonical,
    outcome_text,
    prooftree_json,
    run_diagnosis,
    symptom_prooftree,
    symptom_trace,
)
from .syntax import ParseError, Program, Query, parse_program, parse_query, term_text
from .terms import Compound


class CliError(Exception):
    def __init__(self, category: str, detail: str):
        super().__init__(f"error: {category}: {detail}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError("io", f"{path}: {e.strerror or e}")


def _load_program(path: str) -> Program:
    try:
        return parse_program(_read(path))
    except ParseError as e:
        raise CliError("parse", f"{path}: {e}")


def _load_specs(path: str) -> dict:
    try:
        return parse_spec_text(_read(path))
    except (SpecError, ParseError) as e:
        raise CliError("spec", f"{path}: {e}")


def _parse_query_arg(text: str) -> Query:
    try:
        return parse_query(text)
    except ParseError as e:
        raise CliError("parse", f"query: {e}")


def _atomic(q: Query) -> Compound:
    if len(q.atoms) != 1:
        raise CliError("usage", "this command requires an atomic query")
    return q.atoms[0]


def _budget(args) -> Budget:
    return Budget(args.max_steps, args.max_depth, args.max_answers)


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-steps", type=int, default=20000)
    p.add_argument("--max-depth", type=int, default=120)
    p.add_argument("--max-answers", type=int, default=500)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="program file (definite clauses)")
    p.add_argument("-q", "--query", required=True, help="query text")
    _add_budget_flags(p)


# Subcommands ------------------------------------------------------------------


def _cmd_solve(args, out) -> int:
    program = _load_program(args.file)
    query = _parse_query_arg(args.query)
    res = solve(query, program, _budget(args))
    for ans in res.answers:
        if ans.binding:
            line = ", ".join(
                f"{name} = {term_text(ans.binding[name])}" for name in sorted(ans.binding)
            )
        else:
            line = "true"
        out.write(line + "\n")
    if not res.answers:
        out.write("false\n")
    if res.stats.truncated:
        out.write(f"% budget exhausted ({res.stats.reason})\n")
    return 0


def _cmd_trace(args, out) -> int:
    program = _load_program(args.file)
    query = _parse_query_arg(args.query)
    res = solve(query, program, _budget(args))
    out.write(render_events(res.events, sicstus_redo_filter=args.sicstus_redo))
    if res.stats.truncated:
        out.write(f"% budget exhausted ({res.stats.reason})\n")
    return 0


def _cmd_success_trace(args, out) -> int:
    program = _load_program(args.file)
    atom = _atomic(_parse_query_arg(args.query))
    res = solve(Query((atom,)), program, _budget(args))
    if not res.answers:
        raise CliError("no-answer", f"no computed answer for {term_text(atom)}")
    st = success_trace_for(subderivation_for(res.derivations[0], 0))
    out.write(f"% clause {st.clause_ordinal}\n")
    for a in st.answers:
        out.write(term_text(a) + "\n")
    return 0


def _cmd_search_trace(args, out) -> int:
    program = _load_program(args.file)
    atom = _atomic(_parse_query_arg(args.query))
    entries, res = symptom_trace(program, atom, _budget(args))
    for e in entries:
        answers = ", ".join(term_text(a) for a in e.answers) or "(none)"
        out.write(f"{term_text(e.call)} => {answers}\n")
    if res.stats.truncated:
        out.write(f"% budget exhausted ({res.stats.reason})\n")
    return 0


def _cmd_prooftree(args, out) -> int:
    program = _load_program(args.file)
    atom = _atomic(_parse_query_arg(args.query))
    try:
        tree = symptom_prooftree(program, atom, _budget(args))
    except NotASymptom as e:
        raise CliError("no-answer", str(e))
    except TruncatedTree as e:
        raise CliError("budget", str(e))
    if args.json:
        out.write(dumps_canonical(prooftree_json(tree)) + "\n")
        return 0

    def walk(t, indent: str) -> None:
        out.write(f"{indent}{term_text(t.atom)}  (clause {t.clause_ordinal})\n")
        for c in t.children:
            walk(c, indent + "  ")

    walk(tree, "")
    return 0


class _InteractiveChannel:
    def __init__(self, inp, out):
        self.inp = inp
        self.out = out

    def ask(self, question: Question) -> str:
        short = {"y": "yes", "n": "no", "u": "unknown"}
        while True:
            self.out.write(f"[{question.role}] {term_text(question.atom)}? (yes/no/unknown) ")
            self.out.flush()
            line = self.inp.readline()
            if not line:
                raise ChannelClosed("end of input on the interactive channel")
            v = short.get(line.strip().lower(), line.strip().lower())
            if v in ("yes", "no", "unknown"):
                return v


def _load_answers(path: str) -> list[str]:
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise CliError("answers", f"{path}: {e}")
    answers = doc.get("answers") if isinstance(doc, dict) else doc
    if not isinstance(answers, list) or not all(
        a in ("yes", "no", "unknown") for a in answers
    ):
        raise CliError("answers", f"{path}: expected a list of yes/no/unknown verdicts")
    return answers


def _cmd_diagnose(args, out) -> int:
    program = _load_program(args.file)
    specs = _load_specs(args.spec)
    if args.role not in specs:
        raise CliError("spec", f"{args.spec} has no %% {args.role} section")
    atom = _atomic(_parse_query_arg(args.query))
    answer_atom = None
    if args.answer:
        a = _atomic(_parse_query_arg(args.answer))
        answer_atom = a
    if args.interactive:
        channel = _InteractiveChannel(sys.stdin, sys.stderr)
    else:
        channel = ReplayChannel(_load_answers(args.answers) if args.answers else [])
    try:
        doc = run_diagnosis(
            args.role,
            program,
            specs,
            atom,
            channel,
            answer_atom=answer_atom,
            mode=args.mode,
            restart=args.restart,
            budget=_budget(args),
        )
    except PendingQuestion as e:
        raise CliError(
            "needs-answer",
            f"human verdict needed for {term_text(e.question.atom)}; "
            "extend --answers or use --interactive",
        )
    if args.json:
        out.write(dumps_canonical(doc) + "\n")
    else:
        out.write(outcome_text(doc))
    if doc["status"] == "located":
        return 0
    if doc["status"] == "not-a-symptom":
        return 1
    return 2


def _cmd_serve(args, out) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


# Entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pldiag", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="print computed answers")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_solve)

    sp = sub.add_parser("trace", help="print the four-port event trace")
    _add_common(sp)
    sp.add_argument("--sicstus-redo", action="store_true", help="suppress det Redo items")
    sp.set_defaults(fn=_cmd_trace)

    sp = sub.add_parser("success-trace", help="top-level success trace of the first answer")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_success_trace)

    sp = sub.add_parser("search-trace", help="top-level search trace of an atomic query")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_search_trace)

    sp = sub.add_parser("prooftree", help="proof tree of the first answer")
    _add_common(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=_cmd_prooftree)

    sp = sub.add_parser("diagnose", help="locate an error relative to a specification")
    sp.add_argument("role", choices=["corr", "compl"])
    _add_common(sp)
    sp.add_argument("--spec", required=True, help="specification file")
    sp.add_argument("--answer", help="the incorrect answer atom (corr; default: first answer)")
    sp.add_argument(
        "--mode", choices=["tree", "alg4", "alg5"], default="tree", help="corr search strategy"
    )
    sp.add_argument("--restart", action="store_true", help="restart from incorrect answers")
    sp.add_argument("--interactive", action="store_true", help="ask verdicts on stdin")
    sp.add_argument("--answers", help="JSON file of scripted human verdicts")
    sp.add_argument("--json", action="store_true", help="print the result document as JSON")
    sp.set_defaults(fn=_cmd_diagnose)

    sp = sub.add_parser("serve", help="run the HTTP/JSON session service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8080)
    sp.set_defaults(fn=_cmd_serve)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args, sys.stdout)
    except CliError as e:
        sys.stderr.write(str(e) + "\n")
        return 1
    except ValueError as e:
        sys.stderr.write(f"error: value: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
