import random

import pytest

from conftest import atom
from pldiag.boxtrace import (
    MalformedTrace,
    Subderivation,
    all_answers_for,
    answer_of,
    events_wellformed,
    parse_events,
    proof_tree_for,
    reconstruct_success_trace,
    render_events,
    search_trace_for,
    subderivation_for,
    success_trace_for,
    top_level_calls,
    trace_entries,
)
from pldiag.engine import BoxEvent, Budget, solve
from pldiag.randgen import GenConfig, random_program
from pldiag.syntax import parse_program, parse_query, rename_clause, term_text
from pldiag.terms import Compound, VarCounter, match, variables_of


# Subderivations ---------------------------------------------------------------


def test_subderivation_single_fact():
    p = parse_program("p.")
    res = solve(parse_query("p"), p)
    s = subderivation_for(res.derivations[0], 0)
    assert (s.start, s.end) == (0, 1)
    assert answer_of(s) == Compound("p")


def test_subderivation_two_goals():
    p = parse_program("p. r.")
    res = solve(parse_query("p, r"), p)
    d = res.derivations[0]
    sp = subderivation_for(d, 0)
    sr = subderivation_for(d, 1)
    assert (sp.start, sp.end) == (0, 1)
    assert (sr.start, sr.end) == (1, 2)


def test_subderivation_app_inner_call(app_prog):
    res = solve(parse_query("app([1],[2],Z)"), app_prog)
    d = res.derivations[0]
    inner = subderivation_for(d, 1)
    assert (inner.start, inner.end) == (1, 2)
    assert inner.call_atom.functor == "app"
    assert term_text(answer_of(inner)) == "app([],[2],[2])"


def test_open_subderivation():
    p = parse_program("p :- q. q :- q.")
    res = solve(parse_query("p"), p, Budget(max_steps=50))
    # truncated run records no successful derivation; build one manually
    assert res.answers == []


# Top-level calls and success traces -------------------------------------------


def test_top_level_calls_empty_for_fact():
    p = parse_program("p.")
    res = solve(parse_query("p"), p)
    s = subderivation_for(res.derivations[0], 0)
    assert top_level_calls(s) == []


def test_top_level_calls_two_body_atoms():
    p = parse_program("p :- q, r. q. r.")
    res = solve(parse_query("p"), p)
    s = subderivation_for(res.derivations[0], 0)
    calls = top_level_calls(s)
    assert [term_text(c) for c, _ in calls] == ["q", "r"]
    assert all(nested.closed for _, nested in calls)


def test_success_trace_fact():
    p = parse_program("p.")
    res = solve(parse_query("p"), p)
    st = success_trace_for(subderivation_for(res.derivations[0], 0))
    assert st.answers == ()
    assert st.clause_ordinal == 1


def test_success_trace_app(app_prog):
    res = solve(parse_query("app([1],[2],Z)"), app_prog)
    st = success_trace_for(subderivation_for(res.derivations[0], 0))
    assert [term_text(a) for a in st.answers] == ["app([],[2],[2])"]
    assert st.clause_ordinal == 2


def test_success_trace_even_bug(even_bug):
    res = solve(parse_query("even(s(0))"), even_bug)
    st = success_trace_for(subderivation_for(res.derivations[0], 0))
    assert [term_text(a) for a in st.answers] == ["even(0)"]
    assert st.clause_ordinal == 2


# Search traces ----------------------------------------------------------------


def test_search_trace_simple():
    p = parse_program("p :- q. q.")
    trace, _ = search_trace_for(parse_query("p"), p)
    assert [(term_text(e.call), [term_text(a) for a in e.answers]) for e in trace.entries] == [
        ("q", ["q"])
    ]


def test_search_trace_even_bug(even_bug):
    trace, _ = search_trace_for(parse_query("even(s(0))"), even_bug)
    assert [(term_text(e.call), [term_text(a) for a in e.answers]) for e in trace.entries] == [
        ("even(0)", ["even(0)"])
    ]


def test_search_trace_app_split(app_prog):
    trace, _ = search_trace_for(parse_query("app(X,Y,[1])"), app_prog)
    assert len(trace.entries) == 1
    e = trace.entries[0]
    assert e.call.functor == "app"
    assert term_text(e.call).endswith("[])")  # app(_,_,[])
    assert [term_text(a) for a in e.answers] == ["app([],[],[])"]


def test_search_trace_keeps_variant_calls_distinct():
    p = parse_program("p :- q(X), q(Y). q(a).")
    trace, _ = search_trace_for(parse_query("p"), p)
    assert len(trace.entries) == 2
    assert trace.entries[0].invocation != trace.entries[1].invocation


def test_all_answers_for(app_prog):
    res = solve(parse_query("app(X,Y,[1])"), app_prog)
    got = [term_text(a) for a in all_answers_for(1, res.events)]
    assert got == ["app([],[1],[1])", "app([1],[],[1])"]
    with pytest.raises(ValueError):
        all_answers_for(99, res.events)


def test_answers_are_instances_of_calls(app_prog):
    trace, _ = search_trace_for(parse_query("app(X,Y,[1,2])"), app_prog)
    for e in trace.entries:
        for a in e.answers:
            assert match(e.call, a) is not None or match(a, e.call) is None
            # an answer is an instance of its call
            from pldiag.terms import is_instance_of

            assert is_instance_of(a, e.call)


# Proof trees ------------------------------------------------------------------


def test_proof_tree_leaf():
    p = parse_program("p.")
    res = solve(parse_query("p"), p)
    t = proof_tree_for(subderivation_for(res.derivations[0], 0))
    assert t.atom == Compound("p")
    assert t.children == ()
    assert t.node_count() == 1


def test_proof_tree_even_bug(even_bug):
    res = solve(parse_query("even(s(0))"), even_bug)
    t = proof_tree_for(subderivation_for(res.derivations[0], 0))
    assert term_text(t.atom) == "even(s(0))"
    assert [term_text(c.atom) for c in t.children] == ["even(0)"]
    assert t.clause_ordinal == 2


def test_proof_tree_app(app_prog):
    res = solve(parse_query("app([1],[2],Z)"), app_prog)
    t = proof_tree_for(subderivation_for(res.derivations[0], 0))
    assert term_text(t.atom) == "app([1],[2],[1,2])"
    assert [term_text(c.atom) for c in t.children] == ["app([],[2],[2])"]
    assert t.children[0].children == ()


def _check_instance(tree, program):
    clause = program.clauses[tree.clause_ordinal - 1]
    head, body = rename_clause(clause, VarCounter())
    pattern = Compound("clause", (head,) + body)
    node = Compound("clause", (tree.atom,) + tuple(c.atom for c in tree.children))
    assert match(pattern, node) is not None
    for c in tree.children:
        _check_instance(c, program)


def test_proof_tree_instance_property(app_prog):
    res = solve(parse_query("app(X,Y,[1,2])"), app_prog, capture_exits=True)
    for d in res.derivations:
        t = proof_tree_for(subderivation_for(d, 0))
        _check_instance(t, app_prog)


# Event grammar ----------------------------------------------------------------


def _ev(port, inv, depth, text, nondet=False):
    return BoxEvent(port, inv, depth, atom(text), nondet)


def test_wellformed_ok():
    events = [_ev("Call", 1, 1, "p"), _ev("Exit", 1, 1, "p")]
    assert events_wellformed(events) is None


def test_wellformed_redo_before_exit():
    events = [_ev("Call", 1, 1, "p"), _ev("Redo", 1, 1, "p")]
    v = events_wellformed(events)
    assert v is not None and v.index == 1


def test_wellformed_depth_mismatch():
    events = [_ev("Call", 1, 1, "p"), _ev("Exit", 1, 2, "p")]
    assert events_wellformed(events) is not None


def test_wellformed_duplicate_call():
    events = [_ev("Call", 1, 1, "p"), _ev("Call", 1, 1, "p")]
    assert events_wellformed(events) is not None


def test_wellformed_on_real_streams(app_prog, even_bug):
    for q, p in [
        ("app(X,Y,[1,2])", app_prog),
        ("app(X,Y,[1])", app_prog),
        ("even(s(0))", even_bug),
        ("even(s(s(s(0))))", even_bug),
    ]:
        res = solve(parse_query(q), p)
        assert events_wellformed(res.events) is None


def test_consecutive_exits_decreasing_depth(app_prog):
    res = solve(parse_query("app([1,2],[3],Z)"), app_prog)
    prev = None
    for e in res.events:
        if e.port == "Exit" and prev is not None and prev.port == "Exit":
            assert e.depth == prev.depth - 1
        prev = e


# Wire format ------------------------------------------------------------------


def test_render_format(even_bug):
    res = solve(parse_query("even(s(0))"), even_bug)
    text = render_events(res.events)
    lines = text.splitlines()
    assert lines[0] == "1 1 Call: even(s(0))"
    assert lines[1] == "2 2 Call: even(0)"
    assert lines[2] == "2 2 Exit: even(0)"
    assert lines[3] == "1 1 Exit: even(s(0))"


def test_render_nondet_prefix(app_prog):
    res = solve(parse_query("app(X,Y,[1])"), app_prog)
    text = render_events(res.events)
    assert "? 1 1 Exit: app([],[1],[1])" in text


def test_render_parse_roundtrip(app_prog):
    res = solve(parse_query("app(X,Y,[1,2])"), app_prog)
    text = render_events(res.events)
    assert parse_events(text) == res.events


def test_sicstus_redo_filter(even_bug):
    res = solve(parse_query("even(s(0))"), even_bug)
    filtered = render_events(res.events, sicstus_redo_filter=True)
    assert "Redo" not in filtered  # all Exits here are deterministic
    full = render_events(res.events)
    assert "Redo" in full


def test_parse_event_errors():
    with pytest.raises(MalformedTrace):
        parse_events("not an event line")
    with pytest.raises(MalformedTrace):
        parse_events("1 1 Call: p :- q")


# Reconstruction (backwards) ---------------------------------------------------


def test_reconstruct_deterministic_p():
    p = parse_program("p.")
    res = solve(parse_query("p"), p)
    text = render_events(res.events)
    idx = next(i for i, l in enumerate(text.splitlines()) if "Exit" in l)
    assert reconstruct_success_trace(text, idx) == []


def test_reconstruct_even_bug(even_bug):
    res = solve(parse_query("even(s(0))"), even_bug)
    text = render_events(res.events)
    idx = next(i for i, l in enumerate(text.splitlines()) if l.endswith("1 1 Exit: even(s(0))"))
    assert [term_text(a) for a in reconstruct_success_trace(text, idx)] == ["even(0)"]


def test_reconstruct_missing_call():
    text = "2 2 Exit: q\n1 1 Exit: p\n"
    with pytest.raises(MalformedTrace):
        reconstruct_success_trace(text, 1)


def test_reconstruct_not_an_exit(even_bug):
    res = solve(parse_query("even(s(0))"), even_bug)
    text = render_events(res.events)
    with pytest.raises(MalformedTrace):
        reconstruct_success_trace(text, 0)  # a Call line


def test_dual_construction_random():
    rng = random.Random(5)
    budget = Budget(max_steps=800, max_depth=30, max_answers=20)
    runs = 0
    for _ in range(40):
        p = random_program(rng)
        for qtext in ("p(X)", "q(X)"):
            res = solve(parse_query(qtext), p, budget, capture_exits=True)
            if res.stats.truncated:
                continue
            text = render_events(res.events)
            for rec in res.exit_records:
                sub = Subderivation(rec.derivation, rec.sub_start, rec.sub_end)
                live = [term_text(a) for a in success_trace_for(sub).answers]
                recon = [
                    term_text(a) for a in reconstruct_success_trace(text, rec.event_index)
                ]
                assert live == recon
                runs += 1
    assert runs > 50


def test_trace_entries_depth_filter(app_prog):
    res = solve(parse_query("app(X,Y,[1,2])"), app_prog)
    entries = trace_entries(res.events, depth=2)
    assert all(e.call.functor == "app" for e in entries)
