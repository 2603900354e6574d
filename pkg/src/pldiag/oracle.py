"""Approximate specifications and the oracle that answers diagnosis questions.

A specification (for correctness or completeness) is given intensionally: a
definite program interpreted bottom-up plus explicit ground atoms, with depth
and iteration bounds making membership decidable.  Whatever the bounded
machine check cannot settle is routed to a pluggable human channel; every
verdict is journaled so sessions replay deterministically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .herbrand import (
    FixpointResult,
    Signature,
    ground_instances,
    signature_of_program,
    signature_of_terms,
    tp_fixpoint,
    universe,
)
from .syntax import Clause, ParseError, Program, parse_program, term_text
from .terms import (
    Compound,
    Subst,
    Term,
    apply_subst,
    is_ground,
    is_instance_of,
    match,
    term_depth,
    unify,
    variables_of,
)


# Bounded enumeration cap for branching signatures; capping only widens
# bounded-search outcomes ("unknown" / not-found), never fabricates members.
_UNIVERSE_CAP = 20000


def _args_signature(atoms: Iterable[Compound]) -> Signature:
    """Term signature of the atoms' arguments.  The atoms themselves are
    excluded: predicate symbols are not term constructors, and letting them
    into the universe would fabricate counterexample instances."""
    terms: list[Term] = []
    for a in atoms:
        terms.extend(a.args)
    return signature_of_terms(terms)


class ChannelClosed(Exception):
    """The human channel is unavailable while a verdict is needed."""


class TruncatedTree(Exception):
    """Evidence came from a budget-cut search; no verdict can be given."""


@dataclass(frozen=True)
class Bounds:
    depth: int
    iter: int

    def __post_init__(self) -> None:
        if self.depth <= 0 or self.iter <= 0:
            raise ValueError("bounds must be positive")


@dataclass
class Specification:
    role: str  # "corr" | "compl"
    defining_program: Program
    explicit_atoms: frozenset[Compound]
    bounds: Bounds
    _fixpoint: Optional[FixpointResult] = field(default=None, repr=False)

    def fixpoint(self) -> FixpointResult:
        if self._fixpoint is None:
            self._fixpoint = tp_fixpoint(
                self.defining_program, self.bounds.depth, self.bounds.iter
            )
        return self._fixpoint

    def signature(self) -> Signature:
        sig = signature_of_program(self.defining_program)
        return sig.merge(_args_signature(self.explicit_atoms))


@dataclass(frozen=True)
class Question:
    seq: int
    role: str
    atom: Compound
    context: dict


@dataclass(frozen=True)
class OracleVerdict:
    value: str  # yes | no | unknown
    source: str  # machine | human
    question: Compound
    role: str
    seq: int
    timestamp: float = 0.0


@dataclass(frozen=True)
class Symptom:
    kind: str  # incorrectness | incompleteness
    atom: Compound
    answers: tuple[Compound, ...] = ()
    witness: Optional[Compound] = None


# Membership -------------------------------------------------------------------


def holds(spec: Specification, a: Compound) -> str:
    """Bounded membership of a ground atom: 'yes' | 'no' | 'unknown'.

    'no' is only claimed when the bounded fixpoint is exact within the depth
    bound, so enlarging bounds can only turn 'unknown' into 'yes' or 'no',
    never flip the two.
    """
    if not is_ground(a):
        raise ValueError("holds expects a ground atom")
    if a in spec.explicit_atoms:
        return "yes"
    fx = spec.fixpoint()
    if a in fx.atoms:
        return "yes"
    if term_depth(a) <= spec.bounds.depth and fx.exact_within_depth:
        return "no"
    return "unknown"


def _machine_judge(spec: Specification, a: Compound) -> str:
    """Machine fragment of 'does every ground instance of a hold'."""
    if is_ground(a):
        return holds(spec, a)
    # subsumption by a unit clause: all instances are then derivable
    for c in spec.defining_program.clauses:
        if not c.body and match(c.head, a) is not None:
            return "yes"
    # a single bounded counterexample settles the universal negatively
    sig = spec.signature().merge(_args_signature([a]))
    for inst in ground_instances(a, sig, spec.bounds.depth, max_terms=_UNIVERSE_CAP):
        if holds(spec, inst) == "no":
            return "no"
    return "unknown"


# Symptom predicates -----------------------------------------------------------


def is_incorrectness_symptom(spec_corr: Specification, answer_atom: Compound) -> Optional[bool]:
    """True when some bounded ground instance of the answer lies outside
    S_corr; None when the bounded check cannot settle it."""
    v = _machine_judge(spec_corr, answer_atom)
    if v == "yes":
        return False
    if v == "no":
        return True
    return None


def is_incompleteness_symptom(
    spec_compl: Specification,
    a: Compound,
    answers: Iterable[Compound],
    truncated: bool = False,
) -> tuple[Optional[bool], Optional[Compound]]:
    """(is_symptom, witness): the witness is the first bounded ground instance
    of `a` required by S_compl but not an instance of any computed answer."""
    if truncated:
        raise TruncatedTree("answers came from a budget-cut search")
    answers = tuple(answers)
    sig = spec_compl.signature().merge(_args_signature([a]))
    undecided = False
    for inst in ground_instances(a, sig, spec_compl.bounds.depth, max_terms=_UNIVERSE_CAP):
        if term_depth(inst) > spec_compl.bounds.depth:
            continue  # handled by the exactness guard below
        v = holds(spec_compl, inst)
        if v == "unknown":
            undecided = True
            continue
        if v == "yes" and not any(is_instance_of(inst, ans) for ans in answers):
            return True, inst
    if undecided:
        return None, None
    if is_ground(a):
        return False, None
    # deeper instances exist; only an exact fixpoint rules them out
    if spec_compl.fixpoint().exact_within_depth and not spec_compl.fixpoint().truncated:
        return False, None
    if not _has_deeper_instances(a, sig, spec_compl.bounds.depth):
        return False, None
    return None, None


def _has_deeper_instances(a: Compound, sig: Signature, depth_bound: int) -> bool:
    return bool(variables_of(a)) and bool(sig.functors)


# Coverage (§3.3) --------------------------------------------------------------


def covered(spec_compl: Specification, a: Compound, p: Program) -> bool:
    """Whether some clause of p produces the ground atom `a` from body atoms
    inside S_compl (bodies enumerated over the bounded Herbrand universe)."""
    if not is_ground(a):
        raise ValueError("covered expects a ground atom")
    sig = spec_compl.signature().merge(signature_of_program(p)).merge(_args_signature([a]))
    uni = universe(sig, spec_compl.bounds.depth, max_terms=_UNIVERSE_CAP)
    for c in p.clauses:
        s = match(c.head, a)
        if s is None:
            # nonlinear heads need full unification against the ground atom
            s = unify(c.head, a)
            if s is None:
                continue
        body = tuple(apply_subst(s, b) for b in c.body)
        free = sorted(set().union(*(variables_of(b) for b in body)) if body else set())
        if _body_in_spec(spec_compl, body, free, uni):
            return True
    return False


def _body_in_spec(
    spec: Specification, body: tuple[Compound, ...], free: list[str], uni: list[Term]
) -> bool:
    import itertools

    if not free:
        return all(holds(spec, b) == "yes" for b in body)
    for combo in itertools.product(uni, repeat=len(free)):
        s: Subst = dict(zip(free, combo))
        if all(holds(spec, apply_subst(s, b)) == "yes" for b in body):
            return True
    return False


def find_uncovered_instance(
    spec_compl: Specification, a: Compound, p: Program
) -> Optional[Compound]:
    """First ground instance of `a` (depth order, then lexicographic) that is
    required by S_compl but not covered by p."""
    sig = spec_compl.signature().merge(signature_of_program(p)).merge(_args_signature([a]))
    for inst in ground_instances(a, sig, spec_compl.bounds.depth, max_terms=_UNIVERSE_CAP):
        if holds(spec_compl, inst) == "yes" and not covered(spec_compl, inst, p):
            return inst
    return None


# Channels and sessions --------------------------------------------------------


class ClosedChannel:
    def ask(self, question: Question) -> str:
        raise ChannelClosed(f"no human available for {term_text(question.atom)}")


class ScriptedChannel:
    """Answers from a fixed script; raises ChannelClosed when it runs out."""

    def __init__(self, verdicts: list[str]):
        self.verdicts = list(verdicts)
        self.pos = 0

    def ask(self, question: Question) -> str:
        if self.pos >= len(self.verdicts):
            raise ChannelClosed("scripted answers exhausted")
        v = self.verdicts[self.pos]
        self.pos += 1
        if v not in ("yes", "no", "unknown"):
            raise ValueError(f"bad scripted verdict {v!r}")
        return v


class CallbackChannel:
    def __init__(self, fn: Callable[[Question], str]):
        self.fn = fn

    def ask(self, question: Question) -> str:
        return self.fn(question)


class OracleSession:
    """Judgment requests against one or two specifications, with a journal.

    Machine verdicts are recomputed deterministically; human verdicts go to
    the channel.  At most one outstanding question at a time.
    """

    def __init__(self, specs: dict[str, Specification], channel=None, clock=time.time):
        self.specs = specs
        self.channel = channel or ClosedChannel()
        self.journal: list[OracleVerdict] = []
        self.clock = clock
        self._seq = 0

    def _record(self, value: str, source: str, atom: Compound, role: str) -> OracleVerdict:
        v = OracleVerdict(value, source, atom, role, self._seq, self.clock())
        self._seq += 1
        self.journal.append(v)
        return v

    def judge(self, role: str, atom: Compound, context: Optional[dict] = None) -> OracleVerdict:
        spec = self.specs[role]
        value = _machine_judge(spec, atom)
        if value != "unknown":
            return self._record(value, "machine", atom, role)
        q = Question(self._seq, role, atom, context or {})
        value = self.channel.ask(q)
        return self._record(value, "human", atom, role)

    def ask_human(self, role: str, atom: Compound, context: Optional[dict] = None) -> OracleVerdict:
        q = Question(self._seq, role, atom, context or {})
        value = self.channel.ask(q)
        return self._record(value, "human", atom, role)

    @property
    def question_count(self) -> int:
        return len(self.journal)


# Specification files ----------------------------------------------------------


class SpecError(Exception):
    pass


def parse_spec_text(text: str) -> dict[str, Specification]:
    """Parse the two-section spec file format.

    A header line `%% bounds depth=<k> iter=<m>`, then fenced sections
    `%% corr` and `%% compl`, each holding definite clauses in program syntax.
    """
    bounds: Optional[Bounds] = None
    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("%%"):
            fields = stripped[2:].split()
            if not fields:
                raise SpecError(f"empty %% directive at line {lineno}")
            if fields[0] == "bounds":
                kv = dict(f.split("=", 1) for f in fields[1:] if "=" in f)
                try:
                    bounds = Bounds(int(kv["depth"]), int(kv["iter"]))
                except (KeyError, ValueError):
                    raise SpecError(f"bad bounds line at line {lineno}")
            elif fields[0] in ("corr", "compl"):
                current = fields[0]
                sections.setdefault(current, [])
            else:
                raise SpecError(f"unknown section {fields[0]!r} at line {lineno}")
        elif current is not None:
            sections[current].append(line)
        elif stripped and not stripped.startswith("%"):
            raise SpecError(f"clause outside a %% section at line {lineno}")
    if bounds is None:
        raise SpecError("missing `%% bounds depth=<k> iter=<m>` header")
    out: dict[str, Specification] = {}
    for role, lines in sections.items():
        try:
            prog = parse_program("\n".join(lines))
        except ParseError as e:
            raise SpecError(f"in %% {role} section: {e}")
        explicit = frozenset(c.head for c in prog.clauses if not c.body and is_ground(c.head))
        out[role] = Specification(role, prog, explicit, bounds)
    return out


def spec_from_program(role: str, program: Program, bounds: Bounds) -> Specification:
    explicit = frozenset(c.head for c in program.clauses if not c.body and is_ground(c.head))
    return Specification(role, program, explicit, bounds)


def check_spec_pair(corr: Specification, compl: Specification) -> list[Compound]:
    """Machine-checkable fragment of S_compl ⊆ S_corr: compl-atoms within
    bounds that are provably outside S_corr."""
    bad = []
    for a in sorted(compl.fixpoint().atoms | compl.explicit_atoms, key=term_text):
        if holds(corr, a) == "no":
            bad.append(a)
    return bad
