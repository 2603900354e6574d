"""Acceptance harness: seven pass/fail criteria, one summary line each.

Random-program criteria are verified against independent oracles (the bounded
bottom-up fixpoint, the specification membership test), never against the
component under test.  Runs the oracle cannot settle exactly (non-convergent
fixpoints, budget truncation, channel exhaustion) are skipped, and each
criterion demands a minimum number of *verified* runs.
"""

import random
import subprocess
import sys

import conftest
from conftest import GOLDEN, PROGRAMS
from pldiag.boxtrace import (
    Subderivation,
    events_wellformed,
    proof_tree_for,
    reconstruct_success_trace,
    render_events,
    success_trace_for,
)
from pldiag.diagnose import (
    IncompletenessResult,
    IncorrectnessResult,
    NotASymptom,
    diagnose_incompleteness,
    diagnose_incorrectness,
    find_answer_subderivation,
)
from pldiag.engine import Budget, solve
from pldiag.herbrand import tp_fixpoint
from pldiag.oracle import (
    Bounds,
    ChannelClosed,
    OracleSession,
    TruncatedTree,
    covered,
    holds,
    spec_from_program,
)
from pldiag.randgen import (
    delete_clause,
    ground_atoms_universe,
    mutate_clause_atom,
    random_program,
)
from pldiag.syntax import Query, term_text
from pldiag.terms import is_ground

BUDGET = Budget(max_steps=2000, max_depth=60, max_answers=50)


def _report(num: int, desc: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    conftest.record_acceptance(f"[criterion {num}] {status} {desc} ({detail})")
    assert ok, f"criterion {num} failed: {desc} ({detail})"


def _usable_programs(seed: int, count: int, depth: int = 5, iters: int = 60):
    """Random programs whose bounded least model is known exactly."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < count * 20:
        attempts += 1
        p = random_program(rng)
        fx = tp_fixpoint(p, depth, iters)
        if fx.exact_within_depth:
            out.append((p, fx))
    return out


# 1. Solver vs bottom-up oracle ------------------------------------------------


def test_criterion_1_solver_agrees_with_fixpoint_oracle():
    checked = skipped = 0
    for p, fx in _usable_programs(101, 140):
        for a in ground_atoms_universe(p, 3)[:40]:
            res = solve(Query((a,)), p, BUDGET)
            if res.stats.truncated:
                skipped += 1
                continue
            assert bool(res.answers) == (a in fx.atoms), term_text(a)
            checked += 1
    _report(
        1,
        "solver agrees with the bounded bottom-up oracle on ground queries",
        checked >= 1000,
        f"{checked} query/oracle agreements over 140 programs, {skipped} truncated skips",
    )


# 2. Event grammar -------------------------------------------------------------


def test_criterion_2_event_streams_wellformed():
    from pldiag.syntax import parse_query

    # the same program population as criterion 1, plus open queries
    streams = 0
    for p, _ in _usable_programs(101, 140):
        queries = [Query((a,)) for a in ground_atoms_universe(p, 3)[:40]]
        queries += [parse_query("p(X)"), parse_query("q(X)")]
        for q in queries:
            res = solve(q, p, BUDGET)
            if res.stats.truncated:
                continue
            violation = events_wellformed(res.events)
            assert violation is None, violation
            streams += 1
    _report(
        2,
        "every emitted event stream satisfies the box-model grammar",
        streams >= 1000,
        f"{streams} complete event streams validated",
    )


# 3. Backwards reconstruction vs direct construction ---------------------------


def test_criterion_3_reconstruction_matches_direct_traces():
    from pldiag.syntax import parse_query

    rng = random.Random(303)
    runs = 0
    while runs < 200:
        p = random_program(rng)
        for qtext in ("p(X)", "q(X)"):
            res = solve(parse_query(qtext), p, BUDGET, capture_exits=True)
            if res.stats.truncated:
                continue
            text = render_events(res.events)
            for rec in res.exit_records:
                direct = success_trace_for(
                    Subderivation(rec.derivation, rec.sub_start, rec.sub_end)
                )
                recon = reconstruct_success_trace(text, rec.event_index)
                assert [term_text(a) for a in recon] == [
                    term_text(a) for a in direct.answers
                ]
                runs += 1
    _report(
        3,
        "trace-walkback reconstruction equals direct success-trace construction",
        runs >= 200,
        f"{runs} Exit events reconstructed and compared",
    )


# 4. Incorrectness diagnosis on mutants ----------------------------------------


def test_criterion_4_incorrectness_diagnosis_on_mutants():
    rng = random.Random(404)
    located = unresolved = 0
    question_bound_ok = True
    attempts = 0
    while located < 50 and attempts < 3000:
        attempts += 1
        base = random_program(rng)
        mutated = mutate_clause_atom(rng, base)
        if mutated is None:
            continue
        mutant, _ = mutated
        fx_base = tp_fixpoint(base, 6, 60)
        fx_mut = tp_fixpoint(mutant, 6, 60)
        if not (fx_base.exact_within_depth and fx_mut.exact_within_depth):
            continue
        wrong = sorted(fx_mut.atoms - fx_base.atoms, key=term_text)
        if not wrong:
            continue  # the mutation did not introduce an incorrect answer
        symptom = wrong[0]
        spec = spec_from_program("corr", base, Bounds(6, 60))
        session = OracleSession({"corr": spec})
        try:
            sub = find_answer_subderivation(mutant, symptom, symptom, BUDGET)
            tree = proof_tree_for(sub)
            out = diagnose_incorrectness(tree, session)
        except (NotASymptom, TruncatedTree, ChannelClosed):
            unresolved += 1
            continue
        if not isinstance(out, IncorrectnessResult):
            unresolved += 1
            continue
        # verify against the spec, independently of the diagnoser
        instance = [out.error_head, *out.error_body]
        if not all(is_ground(t) for t in instance):
            unresolved += 1
            continue
        verdicts = [holds(spec, t) for t in instance]
        assert verdicts[0] == "no", term_text(out.error_head)
        assert all(v == "yes" for v in verdicts[1:]), term_text(out.error_head)
        if len(out.question_log) > tree.node_count():
            question_bound_ok = False
        located += 1
    assert question_bound_ok
    _report(
        4,
        "diagnosis of mutant programs locates a spec-verified incorrect clause instance",
        located >= 50,
        f"{located} located and verified, {unresolved} unresolved/skipped",
    )


# 5. Incompleteness diagnosis on deletion mutants ------------------------------


def test_criterion_5_incompleteness_diagnosis_on_deletions():
    rng = random.Random(505)
    located = unresolved = 0
    level_bound_ok = True
    attempts = 0
    while located < 50 and attempts < 3000:
        attempts += 1
        base = random_program(rng)
        deleted = delete_clause(rng, base)
        if deleted is None:
            continue
        mutant, _ = deleted
        fx_base = tp_fixpoint(base, 6, 60)
        fx_mut = tp_fixpoint(mutant, 6, 60)
        if not (fx_base.exact_within_depth and fx_mut.exact_within_depth):
            continue
        lost = sorted(fx_base.atoms - fx_mut.atoms, key=term_text)
        if not lost:
            continue  # the deleted clause was redundant
        symptom = lost[0]
        spec = spec_from_program("compl", base, Bounds(6, 60))
        session = OracleSession({"compl": spec})
        try:
            out = diagnose_incompleteness(mutant, symptom, session, BUDGET)
        except (NotASymptom, TruncatedTree, ChannelClosed):
            unresolved += 1
            continue
        if not isinstance(out, IncompletenessResult):
            unresolved += 1
            continue
        # verify against the spec: the witness is required but uncovered
        assert holds(spec, out.uncovered_witness) == "yes", term_text(out.uncovered_witness)
        assert not covered(spec, out.uncovered_witness, mutant)
        assert out.procedure == (
            out.uncovered_witness.functor,
            len(out.uncovered_witness.args),
        )
        for entries, questions in zip(out.entries_per_level, out.questions_per_level):
            if questions > entries:
                level_bound_ok = False
        located += 1
    assert level_bound_ok
    _report(
        5,
        "diagnosis of deletion mutants locates a spec-verified uncovered atom",
        located >= 50,
        f"{located} located and verified, {unresolved} unresolved/skipped",
    )


# 6. Golden end-to-end outputs -------------------------------------------------


def test_criterion_6_golden_cli_outputs():
    cases = [
        (
            "even_trace.txt",
            ["trace", str(PROGRAMS / "even_bug.pl"), "-q", "even(s(0))"],
        ),
        (
            "even_corr.txt",
            [
                "diagnose", "corr", str(PROGRAMS / "even_bug.pl"),
                "-q", "even(s(0))", "--spec", str(PROGRAMS / "even.spec"),
            ],
        ),
        (
            "even_corr.json",
            [
                "diagnose", "corr", str(PROGRAMS / "even_bug.pl"),
                "-q", "even(s(0))", "--spec", str(PROGRAMS / "even.spec"), "--json",
            ],
        ),
        (
            "even_compl.txt",
            [
                "diagnose", "compl", str(PROGRAMS / "even_missing.pl"),
                "-q", "even(s(s(0)))", "--spec", str(PROGRAMS / "even.spec"),
            ],
        ),
    ]
    for name, argv in cases:
        proc = subprocess.run(
            [sys.executable, "-m", "pldiag.cli", *argv],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout == (GOLDEN / name).read_text(), name
    _report(
        6,
        "end-to-end CLI outputs match the golden files byte-for-byte",
        True,
        f"{len(cases)} golden comparisons",
    )


# 7. Question-count bounds -----------------------------------------------------


def test_criterion_7_question_counts_bounded():
    rng = random.Random(707)
    tree_runs = level_runs = 0
    attempts = 0
    while (tree_runs < 30 or level_runs < 30) and attempts < 3000:
        attempts += 1
        base = random_program(rng)
        fx_base = tp_fixpoint(base, 6, 60)
        if not fx_base.exact_within_depth:
            continue
        spec_corr = spec_from_program("corr", base, Bounds(6, 60))
        spec_compl = spec_from_program("compl", base, Bounds(6, 60))
        if tree_runs < 30:
            mutated = mutate_clause_atom(rng, base)
            if mutated:
                mutant, _ = mutated
                fx_mut = tp_fixpoint(mutant, 6, 60)
                wrong = (
                    sorted(fx_mut.atoms - fx_base.atoms, key=term_text)
                    if fx_mut.exact_within_depth
                    else []
                )
                if wrong:
                    session = OracleSession({"corr": spec_corr})
                    try:
                        sub = find_answer_subderivation(mutant, wrong[0], wrong[0], BUDGET)
                        tree = proof_tree_for(sub)
                        out = diagnose_incorrectness(tree, session)
                        assert len(session.journal) <= tree.node_count()
                        tree_runs += 1
                    except (NotASymptom, TruncatedTree, ChannelClosed):
                        pass
        if level_runs < 30:
            deleted = delete_clause(rng, base)
            if deleted:
                mutant, _ = deleted
                fx_mut = tp_fixpoint(mutant, 6, 60)
                lost = (
                    sorted(fx_base.atoms - fx_mut.atoms, key=term_text)
                    if fx_mut.exact_within_depth
                    else []
                )
                if lost:
                    session = OracleSession({"compl": spec_compl})
                    try:
                        out = diagnose_incompleteness(mutant, lost[0], session, BUDGET)
                        if isinstance(out, IncompletenessResult):
                            for entries, questions in zip(
                                out.entries_per_level, out.questions_per_level
                            ):
                                assert questions <= entries
                            level_runs += 1
                    except (NotASymptom, TruncatedTree, ChannelClosed):
                        pass
    _report(
        7,
        "question counts stay within the structural bounds",
        tree_runs >= 30 and level_runs >= 30,
        f"{tree_runs} tree-search runs, {level_runs} per-level runs checked",
    )
