"""HTTP/JSON session service hosting interactive diagnosis.

State machine per session: running -> (awaiting_answer <-> running)* ->
done | undecided.  Advancement is by replay: every posted answer re-runs the
whole diagnosis with the extended verdict script; machine verdicts are
deterministic, so replays agree and results are reproducible from the
journal alone.  The result endpoint returns the same canonical JSON bytes
that `pldiag diagnose --json` prints for the same answer script.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .diagnose import NotASymptom
from .engine import Budget
from .oracle import Question, SpecError, Specification, TruncatedTree, parse_spec_text
from .runner import (
    PendingQuestion,
    ReplayChannel,
    dumps_canonical,
    prooftree_json,
    question_json,
    run_diagnosis,
    symptom_prooftree,
    symptom_trace,
    trace_json,
)
from .syntax import ParseError, Program, parse_program, parse_query
from .terms import Compound


class ProgramIn(BaseModel):
    text: str


class SpecIn(BaseModel):
    text: str


class BudgetIn(BaseModel):
    max_steps: int = 20000
    max_depth: int = 120
    max_answers: int = 500


class SessionIn(BaseModel):
    program_id: str
    spec_id: str
    kind: str  # corr | compl
    query: str
    answer: Optional[str] = None
    mode: str = "tree"
    restart: bool = False
    budget: BudgetIn = BudgetIn()


class AnswerIn(BaseModel):
    verdict: str  # yes | no | unknown


@dataclass
class Session:
    id: str
    kind: str
    program: Program
    specs: dict[str, Specification]
    query_atom: Compound
    answer_atom: Optional[Compound]
    mode: str
    restart: bool
    budget: Budget
    answers: list[str] = field(default_factory=list)
    state: str = "running"
    pending: Optional[Question] = None
    result: Optional[dict] = None

    def advance(self) -> None:
        """Replay the diagnosis over the current answer script."""
        try:
            doc = run_diagnosis(
                self.kind,
                self.program,
                self.specs,
                self.query_atom,
                ReplayChannel(self.answers),
                answer_atom=self.answer_atom,
                mode=self.mode,
                restart=self.restart,
                budget=self.budget,
            )
        except PendingQuestion as e:
            self.state = "awaiting_answer"
            self.pending = e.question
            return
        self.pending = None
        self.result = doc
        self.state = "undecided" if doc["status"] != "located" else "done"

    def view(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "state": self.state,
            "pending_question": question_json(self.pending) if self.pending else None,
            "answers_given": len(self.answers),
            "result": self.result,
        }


def create_app() -> FastAPI:
    app = FastAPI(title="pldiag", version="0.1.0")
    programs: dict[str, Program] = {}
    specs: dict[str, dict[str, Specification]] = {}
    sessions: dict[str, Session] = {}
    counter = itertools.count(1)

    def _session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session {sid}")
        return s

    @app.post("/programs")
    def create_program(body: ProgramIn):
        try:
            p = parse_program(body.text)
        except ParseError as e:
            raise HTTPException(422, f"program parse error: {e}")
        pid = f"p{next(counter)}"
        programs[pid] = p
        return {"id": pid, "clauses": len(p.clauses)}

    @app.post("/specs")
    def create_spec(body: SpecIn):
        try:
            sp = parse_spec_text(body.text)
        except (SpecError, ParseError) as e:
            raise HTTPException(422, f"spec error: {e}")
        sid = f"s{next(counter)}"
        specs[sid] = sp
        return {"id": sid, "roles": sorted(sp)}

    @app.post("/sessions")
    def create_session(body: SessionIn):
        if body.kind not in ("corr", "compl"):
            raise HTTPException(422, f"unknown kind {body.kind!r}")
        if body.mode not in ("tree", "alg4", "alg5"):
            raise HTTPException(422, f"unknown mode {body.mode!r}")
        program = programs.get(body.program_id)
        if program is None:
            raise HTTPException(404, f"unknown program {body.program_id}")
        spec = specs.get(body.spec_id)
        if spec is None:
            raise HTTPException(404, f"unknown spec {body.spec_id}")
        if body.kind not in spec:
            raise HTTPException(422, f"spec has no %% {body.kind} section")
        try:
            q = parse_query(body.query)
            answer_atom = None
            if body.answer:
                aq = parse_query(body.answer)
                if len(aq.atoms) != 1:
                    raise HTTPException(422, "answer must be a single atom")
                answer_atom = aq.atoms[0]
        except ParseError as e:
            raise HTTPException(422, f"query parse error: {e}")
        if len(q.atoms) != 1:
            raise HTTPException(422, "diagnosis requires an atomic query")
        try:
            budget = Budget(
                body.budget.max_steps, body.budget.max_depth, body.budget.max_answers
            )
        except ValueError as e:
            raise HTTPException(422, str(e))
        sid = f"sess{next(counter)}"
        s = Session(
            sid,
            body.kind,
            program,
            spec,
            q.atoms[0],
            answer_atom,
            body.mode,
            body.restart,
            budget,
        )
        s.advance()
        sessions[sid] = s
        return s.view()

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return _session(sid).view()

    @app.get("/sessions/{sid}/question")
    def get_question(sid: str, response: Response):
        s = _session(sid)
        if s.state != "awaiting_answer":
            response.status_code = 404
            return {"question": None, "state": s.state}
        return {"question": question_json(s.pending), "state": s.state}

    @app.post("/sessions/{sid}/answer")
    def post_answer(sid: str, body: AnswerIn):
        s = _session(sid)
        if s.state != "awaiting_answer":
            raise HTTPException(409, f"no pending question (state {s.state})")
        if body.verdict not in ("yes", "no", "unknown"):
            raise HTTPException(422, f"bad verdict {body.verdict!r}")
        s.answers.append(body.verdict)
        s.advance()
        return s.view()

    @app.get("/sessions/{sid}/result")
    def get_result(sid: str):
        s = _session(sid)
        if s.result is None:
            raise HTTPException(409, f"no result yet (state {s.state})")
        return Response(dumps_canonical(s.result), media_type="application/json")

    @app.get("/sessions/{sid}/prooftree")
    def get_prooftree(sid: str):
        s = _session(sid)
        try:
            tree = symptom_prooftree(s.program, s.query_atom, s.budget)
        except NotASymptom as e:
            raise HTTPException(404, str(e))
        except TruncatedTree as e:
            raise HTTPException(409, str(e))
        return prooftree_json(tree)

    @app.get("/sessions/{sid}/trace")
    def get_trace(sid: str):
        s = _session(sid)
        entries, res = symptom_trace(s.program, s.query_atom, s.budget)
        return {"entries": trace_json(entries), "truncated": res.stats.truncated}

    return app


app = create_app()
