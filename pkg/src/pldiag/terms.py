"""First-order terms, substitutions, and unification with occur-check.

Terms are immutable: a term is either a ``Var`` or a ``Compound``; a constant
is a ``Compound`` with no arguments.  Substitutions are plain dicts mapping
variable names to terms, kept idempotent by construction (``unify`` and
``compose`` resolve their ranges fully).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...] = ()


Term = Union[Var, Compound]
Subst = dict[str, Term]

# Convenience constructors -----------------------------------------------------


def mk(functor: str, *args: Term) -> Compound:
    return Compound(functor, tuple(args))


def const(name: str) -> Compound:
    return Compound(name, ())


NIL = const("[]")


def mklist(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = Compound(".", (item, out))
    return out


# Basic inspection -------------------------------------------------------------


def variables_of(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.add(x.name)
        else:
            stack.extend(x.args)
    return out


def is_ground(t: Term) -> bool:
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            return False
        stack.extend(x.args)
    return True


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def var_depth(t: Term, name: str) -> int:
    """Deepest occurrence of variable `name` in t, or -1 if absent."""
    best = -1

    def walk(x: Term, d: int) -> None:
        nonlocal best
        if isinstance(x, Var):
            if x.name == name and d > best:
                best = d
        else:
            for a in x.args:
                walk(a, d + 1)

    walk(t, 0)
    return best


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, Compound):
            stack.extend(x.args)


# Substitutions ----------------------------------------------------------------


def apply_subst(s: Subst, t: Term) -> Term:
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    return Compound(t.functor, tuple(apply_subst(s, a) for a in t.args))


def apply_all(s: Subst, ts: Iterable[Term]) -> tuple[Term, ...]:
    return tuple(apply_subst(s, t) for t in ts)


def _mentions(t: Term, names: set[str]) -> bool:
    return bool(variables_of(t) & names)


def _normalize(s: Subst) -> Subst:
    # Re-apply the map to its own ranges until idempotent.  Occur-checked
    # unification never produces binding cycles, so this terminates.
    for _ in range(len(s) + 1):
        dom = set(s)
        if not any(_mentions(v, dom) for v in s.values()):
            break
        s = {k: apply_subst(s, v) for k, v in s.items()}
    s = {k: v for k, v in s.items() if not (isinstance(v, Var) and v.name == k)}
    return s


def compose(s1: Subst, s2: Subst) -> Subst:
    """Composition: apply(compose(s1, s2), t) == apply(s2, apply(s1, t))."""
    if not s1:
        return dict(s2)
    if not s2:
        return dict(s1)
    out: Subst = {}
    for k, v in s1.items():
        v2 = apply_subst(s2, v)
        if not (isinstance(v2, Var) and v2.name == k):
            out[k] = v2
    for k, v in s2.items():
        if k not in s1:
            out[k] = v
    return _normalize(out)


def restrict(s: Subst, names: set[str]) -> Subst:
    return {k: v for k, v in s.items() if k in names}


# Unification ------------------------------------------------------------------


def unify(t1: Term, t2: Term) -> Optional[Subst]:
    """Most general unifier of t1 and t2, or None.

    Always occur-checks; the result is idempotent with domain inside
    vars(t1) | vars(t2), and applying it to t1 and t2 yields equal terms.
    """
    bindings: Subst = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Var):
            nxt = bindings.get(t.name)
            if nxt is None:
                return t
            t = nxt
        return t

    def occurs(name: str, t: Term) -> bool:
        t = walk(t)
        if isinstance(t, Var):
            return t.name == name
        return any(occurs(name, a) for a in t.args)

    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a), walk(b)
        if isinstance(a, Var):
            if isinstance(b, Var) and a.name == b.name:
                continue
            if occurs(a.name, b):
                return None
            bindings[a.name] = b
        elif isinstance(b, Var):
            if occurs(b.name, a):
                return None
            bindings[b.name] = a
        else:
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))

    def resolve(t: Term) -> Term:
        t = walk(t)
        if isinstance(t, Var):
            return t
        return Compound(t.functor, tuple(resolve(a) for a in t.args))

    out: Subst = {}
    for name in bindings:
        v = resolve(Var(name))
        if not (isinstance(v, Var) and v.name == name):
            out[name] = v
    return out


def match(pattern: Term, t: Term) -> Optional[Subst]:
    """One-way matching: a substitution s with apply(s, pattern) == t.

    Variables of t are rigid (they only match an identical variable).
    """
    s: Subst = {}
    stack = [(pattern, t)]
    while stack:
        p, x = stack.pop()
        if isinstance(p, Var):
            bound = s.get(p.name)
            if bound is None:
                s[p.name] = x
            elif bound != x:
                return None
        elif isinstance(x, Var):
            return None
        else:
            if p.functor != x.functor or len(p.args) != len(x.args):
                return None
            stack.extend(zip(p.args, x.args))
    return s


def is_instance_of(t: Term, general: Term) -> bool:
    return match(general, t) is not None


def is_variant(t1: Term, t2: Term) -> bool:
    """Alpha-equivalence: each is an instance of the other."""
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Var) and isinstance(b, Var):
            if fwd.setdefault(a.name, b.name) != b.name:
                return False
            if bwd.setdefault(b.name, a.name) != a.name:
                return False
        elif isinstance(a, Compound) and isinstance(b, Compound):
            if a.functor != b.functor or len(a.args) != len(b.args):
                return False
            stack.extend(zip(a.args, b.args))
        else:
            return False
    return True


# Renaming apart ---------------------------------------------------------------


class VarCounter:
    """Monotone counter producing fresh `_G<n>` names.

    Source programs may not use `_G<digits>` names (the parser rejects them),
    so fresh variables never collide with source variables.
    """

    def __init__(self, start: int = 0):
        self._n = start

    def fresh(self) -> Var:
        self._n += 1
        return Var(f"_G{self._n}")


def rename_term(t: Term, mapping: dict[str, Var], counter: VarCounter) -> Term:
    if isinstance(t, Var):
        v = mapping.get(t.name)
        if v is None:
            v = counter.fresh()
            mapping[t.name] = v
        return v
    if not t.args:
        return t
    return Compound(t.functor, tuple(rename_term(a, mapping, counter) for a in t.args))
