"""Concrete syntax for definite-clause programs and queries.

Accepted syntax is deliberately small: clauses `head.` or `head :- b1, ..., bn.`,
list sugar `[a,b|T]` (desugared to `'.'/2` and `[]`), numerals as constants,
`%` line comments.  No operators, cuts, negation, or directives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .terms import NIL, Compound, Term, Var, VarCounter, rename_term


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Clause:
    head: Compound
    body: tuple[Compound, ...] = ()
    source_index: int = 0  # 1-based ordinal in the program text


@dataclass
class Program:
    clauses: tuple[Clause, ...]
    index: dict[tuple[str, int], tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index:
            idx: dict[tuple[str, int], list[int]] = {}
            for i, c in enumerate(self.clauses):
                idx.setdefault((c.head.functor, len(c.head.args)), []).append(i)
            self.index = {k: tuple(v) for k, v in idx.items()}

    def clauses_for(self, functor: str, arity: int) -> tuple[Clause, ...]:
        return tuple(self.clauses[i] for i in self.index.get((functor, arity), ()))


@dataclass(frozen=True)
class Query:
    atoms: tuple[Compound, ...]


# Tokenizer --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<arrow>:-)
  | (?P<atomname>[a-z][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]|,.])
    """,
    re.VERBOSE,
)

_RESERVED_VAR = re.compile(r"_[GA]\d+$")


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'atom' | 'num' | 'var' | 'arrow' | 'punct' | 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok_text = m.group()
        if kind != "ws":
            k = {"atomname": "atom"}.get(kind, kind)
            toks.append(_Tok(k, tok_text, line, col))
        nl = tok_text.count("\n")
        if nl:
            line += nl
            col = len(tok_text) - tok_text.rfind("\n")
        else:
            col += len(tok_text)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


# Parser -----------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, allow_generated: bool = False):
        self.toks = _tokenize(text)
        self.i = 0
        self.anon = 0
        # rendered traces legitimately contain generated _G<n> variables;
        # source programs may not, to keep renaming-apart collision-free
        self.allow_generated = allow_generated

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            got = t.text if t.kind != "eof" else "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", t.line, t.col)
        return self.next()

    def parse_term(self) -> Term:
        t = self.peek()
        if t.kind == "var":
            self.next()
            if t.text == "_":
                self.anon += 1
                return Var(f"_A{self.anon}")
            if not self.allow_generated and _RESERVED_VAR.match(t.text):
                raise ParseError(
                    f"variable name {t.text!r} is reserved for generated variables",
                    t.line,
                    t.col,
                )
            return Var(t.text)
        if t.kind == "num":
            self.next()
            return Compound(t.text, ())
        if t.kind == "punct" and t.text == "[":
            return self.parse_list()
        if t.kind == "atom":
            self.next()
            if self.peek().kind == "punct" and self.peek().text == "(":
                self.next()
                args = [self.parse_term()]
                while self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    args.append(self.parse_term())
                self.expect("punct", ")")
                return Compound(t.text, tuple(args))
            return Compound(t.text, ())
        got = t.text if t.kind != "eof" else "end of input"
        raise ParseError(f"expected a term, found {got!r}", t.line, t.col)

    def parse_list(self) -> Term:
        self.expect("punct", "[")
        if self.peek().kind == "punct" and self.peek().text == "]":
            self.next()
            return NIL
        items = [self.parse_term()]
        while self.peek().kind == "punct" and self.peek().text == ",":
            self.next()
            items.append(self.parse_term())
        tail: Term = NIL
        if self.peek().kind == "punct" and self.peek().text == "|":
            self.next()
            tail = self.parse_term()
        self.expect("punct", "]")
        out = tail
        for item in reversed(items):
            out = Compound(".", (item, out))
        return out

    def parse_atom(self) -> Compound:
        t = self.peek()
        term = self.parse_term()
        if not isinstance(term, Compound):
            raise ParseError("a goal must be an atom, not a variable", t.line, t.col)
        return term

    def parse_clause(self, ordinal: int) -> Clause:
        head = self.parse_atom()
        body: list[Compound] = []
        if self.peek().kind == "arrow":
            self.next()
            body.append(self.parse_atom())
            while self.peek().kind == "punct" and self.peek().text == ",":
                self.next()
                body.append(self.parse_atom())
        self.expect("punct", ".")
        return Clause(head, tuple(body), ordinal)

    def parse_program(self) -> Program:
        clauses: list[Clause] = []
        while self.peek().kind != "eof":
            clauses.append(self.parse_clause(len(clauses) + 1))
        return Program(tuple(clauses))

    def parse_query(self) -> Query:
        atoms = [self.parse_atom()]
        while self.peek().kind == "punct" and self.peek().text == ",":
            self.next()
            atoms.append(self.parse_atom())
        if self.peek().kind == "punct" and self.peek().text == ".":
            self.next()
        self.expect("eof")
        return Query(tuple(atoms))


def parse_program(text: str) -> Program:
    return _Parser(text).parse_program()


def parse_query(text: str) -> Query:
    return _Parser(text).parse_query()


def parse_term(text: str, allow_generated: bool = False) -> Term:
    p = _Parser(text, allow_generated)
    t = p.parse_term()
    p.expect("eof")
    return t


# Printer ----------------------------------------------------------------------


def term_text(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.functor == "." and len(t.args) == 2:
        items: list[str] = []
        cur: Term = t
        while isinstance(cur, Compound) and cur.functor == "." and len(cur.args) == 2:
            items.append(term_text(cur.args[0]))
            cur = cur.args[1]
        if isinstance(cur, Compound) and cur == NIL:
            return "[" + ",".join(items) + "]"
        return "[" + ",".join(items) + "|" + term_text(cur) + "]"
    if not t.args:
        return t.functor
    return t.functor + "(" + ",".join(term_text(a) for a in t.args) + ")"


def atoms_text(atoms: tuple[Compound, ...]) -> str:
    return ", ".join(term_text(a) for a in atoms)


def clause_text(c: Clause) -> str:
    if not c.body:
        return term_text(c.head)
    return term_text(c.head) + " :- " + ", ".join(term_text(b) for b in c.body)


def program_text(p: Program) -> str:
    return "".join(clause_text(c) + ".\n" for c in p.clauses)


def rename_clause(c: Clause, counter: VarCounter) -> tuple[Compound, tuple[Compound, ...]]:
    mapping: dict[str, Var] = {}
    head = rename_term(c.head, mapping, counter)
    body = tuple(rename_term(b, mapping, counter) for b in c.body)
    assert isinstance(head, Compound)
    return head, body  # type: ignore[return-value]
