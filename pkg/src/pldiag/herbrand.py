"""Bottom-up immediate-consequence fixpoint over a bounded Herbrand universe.

`tp_fixpoint` computes all ground atoms derivable within an iteration bound
whose terms stay within a depth bound.  It is the independent oracle the
resolution engine is checked against, and the machine-decidable core of
approximate specifications.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .syntax import Clause, Program
from .terms import (
    Compound,
    Subst,
    Term,
    apply_subst,
    compose,
    is_ground,
    match,
    term_depth,
    unify,
    var_depth,
    variables_of,
)


@dataclass(frozen=True)
class Signature:
    constants: tuple[str, ...]
    functors: tuple[tuple[str, int], ...]  # proper functors, arity >= 1

    def merge(self, other: "Signature") -> "Signature":
        consts = tuple(sorted(set(self.constants) | set(other.constants)))
        funcs = tuple(sorted(set(self.functors) | set(other.functors)))
        return Signature(consts, funcs)


def signature_of_terms(terms) -> Signature:
    consts: set[str] = set()
    funcs: set[tuple[str, int]] = set()
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, Compound):
            if t.args:
                funcs.add((t.functor, len(t.args)))
                stack.extend(t.args)
            else:
                consts.add(t.functor)
    return Signature(tuple(sorted(consts)), tuple(sorted(funcs)))


def signature_of_program(p: Program) -> Signature:
    terms: list[Term] = []
    for c in p.clauses:
        terms.extend(c.head.args)
        for b in c.body:
            terms.extend(b.args)
    return signature_of_terms(terms)


def universe(
    sig: Signature, depth_bound: int, max_terms: Optional[int] = None
) -> list[Term]:
    """Ground terms over sig up to depth_bound, by depth then lexicographically.

    `max_terms` caps the enumeration (branching signatures grow doubly
    exponentially); a capped universe only widens "unknown"/bounded-search
    outcomes downstream, it never fabricates members.
    """
    cap = max_terms if max_terms is not None else None
    by_depth: list[list[Term]] = [[Compound(c, ()) for c in sorted(sig.constants)]]
    all_terms: list[Term] = list(by_depth[0])
    if cap is not None and len(all_terms) >= cap:
        return all_terms[:cap]
    for d in range(1, depth_bound + 1):
        layer: list[Term] = []
        shallower = [t for lv in by_depth for t in lv]
        budget = None if cap is None else cap - len(all_terms)
        for functor, arity in sig.functors:
            for combo in itertools.product(shallower, repeat=arity):
                # at least one argument must sit at depth d-1
                if max(term_depth(a) for a in combo) == d - 1:
                    layer.append(Compound(functor, combo))
                    if budget is not None and len(layer) >= budget:
                        break
            if budget is not None and len(layer) >= budget:
                break
        layer.sort(key=_term_key)
        by_depth.append(layer)
        all_terms.extend(layer)
        if cap is not None and len(all_terms) >= cap:
            return all_terms[:cap]
    return all_terms


def _term_key(t: Term):
    if isinstance(t, Compound):
        return (term_depth(t), t.functor, tuple(_term_key(a) for a in t.args))
    return (0, t.name, ())


def ground_instances(
    atom: Compound, sig: Signature, depth_bound: int, max_terms: Optional[int] = None
):
    """Ground instances of `atom`, variables enumerated over the bounded universe.

    Deterministic order: by the tuple of chosen terms, themselves ordered by
    depth then lexicographically.
    """
    names = sorted(variables_of(atom))
    if not names:
        if is_ground(atom):
            yield atom
        return
    terms = universe(sig, depth_bound, max_terms)
    for combo in itertools.product(terms, repeat=len(names)):
        s: Subst = dict(zip(names, combo))
        yield apply_subst(s, atom)


def clause_depth_monotone(c: Clause) -> bool:
    """True when every instance of each body atom is no deeper than the head.

    Sufficient syntactic check: the body atom itself is no deeper than the
    head, and every variable of the body occurs at least as deep in the head.
    """
    hd = term_depth(c.head)
    for b in c.body:
        if term_depth(b) > hd:
            return False
        for v in variables_of(b):
            if var_depth(c.head, v) < var_depth(b, v):
                return False
    return True


@dataclass
class FixpointResult:
    atoms: frozenset[Compound]
    converged: bool  # a genuine fixpoint was reached within the iteration bound
    truncated: bool  # some derivable atom exceeded the depth bound and was dropped
    depth_monotone: bool  # all clauses pass the syntactic depth-monotonicity check
    iterations: int = 0

    @property
    def exact_within_depth(self) -> bool:
        """Whether atoms is exactly M_P restricted to the depth bound."""
        return self.converged and (not self.truncated or self.depth_monotone)


def tp_fixpoint(p: Program, depth_bound: int, iteration_bound: int) -> FixpointResult:
    if depth_bound <= 0 or iteration_bound <= 0:
        raise ValueError("bounds must be positive")
    sig = signature_of_program(p)
    # the universe is only needed to ground head variables absent from the
    # body; branching signatures make it huge, so build it on demand only
    needs_uni = any(
        variables_of(c.head) - set().union(set(), *(variables_of(b) for b in c.body))
        for c in p.clauses
    )
    uni = universe(sig, depth_bound, max_terms=20000) if needs_uni else []
    atoms: set[Compound] = set()
    truncated = False
    converged = False
    iterations = 0
    for _ in range(iteration_bound):
        iterations += 1
        index: dict[tuple[str, int], list[Compound]] = {}
        for a in atoms:
            index.setdefault((a.functor, len(a.args)), []).append(a)
        new: set[Compound] = set()
        for c in p.clauses:
            for derived, cut in _consequences(c, atoms, index, uni, depth_bound):
                truncated = truncated or cut
                if derived is not None and derived not in atoms:
                    new.add(derived)
        if not new:
            converged = True
            break
        atoms |= new
    return FixpointResult(
        frozenset(atoms),
        converged,
        truncated,
        all(clause_depth_monotone(c) for c in p.clauses),
        iterations,
    )


def _consequences(
    c: Clause,
    atoms: set[Compound],
    index: dict[tuple[str, int], list[Compound]],
    uni: list[Term],
    depth_bound: int,
):
    """Yield (head instance or None, depth_truncated) for each body match."""
    for s in _body_matches(c.body, 0, {}, atoms, index):
        head = apply_subst(s, c.head)
        if is_ground(head):
            if term_depth(head) > depth_bound:
                yield None, True
            else:
                yield head, False
        else:
            # clause variables absent from the body: ground over the universe
            names = sorted(variables_of(head))
            if not uni and names:
                yield None, False
                continue
            import itertools as _it

            for combo in _it.product(uni, repeat=len(names)):
                g = apply_subst(dict(zip(names, combo)), head)
                if term_depth(g) > depth_bound:
                    yield None, True
                else:
                    yield g, False


def _body_matches(
    body: tuple[Compound, ...],
    i: int,
    s: Subst,
    atoms: set[Compound],
    index: dict[tuple[str, int], list[Compound]],
):
    if i == len(body):
        yield s
        return
    goal = apply_subst(s, body[i])
    assert isinstance(goal, Compound)
    if is_ground(goal):
        if goal in atoms:
            yield from _body_matches(body, i + 1, s, atoms, index)
        return
    for fact in index.get((goal.functor, len(goal.args)), ()):
        m = unify(goal, fact)
        if m is not None:
            yield from _body_matches(body, i + 1, compose(s, m), atoms, index)


def tp_oracle(p: Program, depth_bound: int, iteration_bound: int) -> frozenset[Compound]:
    """Ground atoms derivable within the bounds (the engine's acceptance oracle)."""
    return tp_fixpoint(p, depth_bound, iteration_bound).atoms
