"""Branching elimination: worked inputs, counts, invariants, strategies."""
from __future__ import annotations

import random

import pytest
from conftest import random_problem
from test_preprocess import EX16, EX22, EX39

from eufui.errors import ResourceLimitError
from eufui.euf import euf_equiv, euf_valid
from eufui.formulas import FALSE, formula_atoms
from eufui.parse import format_formula, parse, parse_formula
from eufui.preprocess import flatten
from eufui.tableaux import compute_tableaux_ui
from eufui.terms import lit_general, term_is_efree, term_symbols

EX39_TARGET = "(=> (and (= z1 z2) (= z3 z4)) (= (h z0) z0))"
EX22_TARGET = "(=> (= z1 z3) (= z2 z4))"
EX16_TARGET = (
    "(and (=> (= z3 z4) (= s1 s2))"
    " (=> (and (= z1 z3) (= z2 z3)) (= t (f s1 s1)))"
    " (=> (and (= z1 z3) (= z2 z4)) (= t (f s1 s2)))"
    " (=> (and (= z1 z4) (= z2 z3)) (= t (f s2 s1)))"
    " (=> (and (= z1 z4) (= z2 z4)) (= t (f s2 s2))))"
)


def run_text(text, **kwargs):
    problem = parse(text)
    ui = compute_tableaux_ui(flatten(problem), **kwargs)
    return problem, ui


def assert_equiv(formula, problem, target_text):
    target = parse_formula(target_text, problem.symbols)
    ok, witness = euf_equiv(formula, target)
    assert ok, witness


def test_two_application_example():
    problem, ui = run_text(EX22)
    assert ui.stats["branches_explored"] == 2
    assert ui.stats["rule4_firings"] == 1
    assert_equiv(ui.formula(), problem, EX22_TARGET)
    assert_equiv(ui.formula(unravel=True), problem, EX22_TARGET)


def test_shared_subterm_example_branches_and_golden_disjunct():
    problem, ui = run_text(EX39)
    assert ui.stats["branches_explored"] == 4
    assert len(ui.disjuncts) == 4
    printed = [format_formula(d.formula()) for d in ui.disjuncts]
    golden = (
        "(let ((y1 z0)) (let ((y2 y1)) "
        "(and (= z4 z3) (= z2 z1) (= (h y2) z0))))"
    )
    assert golden in printed
    assert_equiv(ui.formula(), problem, EX39_TARGET)
    assert_equiv(ui.formula(unravel=True), problem, EX39_TARGET)


def test_shared_subterm_example_unravelled_disjunct():
    _, ui = run_text(EX39)
    printed = [format_formula(d.formula(unravel=True)) for d in ui.disjuncts]
    assert "(and (= z4 z3) (= z2 z1) (= (h z0) z0))" in printed


def test_nested_example_branch_count_pin():
    # The branch total depends on the redex selection strategy; the default
    # first-redex scan yields 15 terminal branches on this input. Pinned as a
    # determinism regression, not as the only defensible count.
    problem, ui = run_text(EX16)
    assert ui.stats["branches_explored"] == 15
    assert_equiv(ui.formula(), problem, EX16_TARGET)
    assert_equiv(ui.formula(unravel=True), problem, EX16_TARGET)


def test_reversed_strategy_same_ui():
    for text, target in ((EX22, EX22_TARGET), (EX39, EX39_TARGET), (EX16, EX16_TARGET)):
        problem, ui = run_text(text, strategy="reversed")
        assert ui.stats["branches_explored"] > 0
        assert_equiv(ui.formula(), problem, target)


def test_semantic_prune_keeps_equivalence():
    problem, ui = run_text(EX16, prune="semantic")
    assert_equiv(ui.formula(), problem, EX16_TARGET)
    _, plain = run_text(EX16)
    assert len(ui.disjuncts) <= len(plain.disjuncts)


def test_jobs_output_identical():
    _, one = run_text(EX16)
    _, many = run_text(EX16, jobs=3)
    assert format_formula(one.formula()) == format_formula(many.formula())
    assert one.stats == many.stats


def test_branch_cap():
    problem = parse(EX16)
    with pytest.raises(ResourceLimitError):
        compute_tableaux_ui(flatten(problem), max_branches=4)


def test_falsified_input_gives_false():
    _, ui = run_text(
        "(declare-sort U 0)(declare-const e U)(eliminate e)(assert (not (= e e)))"
    )
    assert ui.formula() is FALSE
    assert ui.stats["branches_explored"] == 0


def test_quantifier_free_input_passes_through():
    problem, ui = run_text(
        "(declare-sort U 0)(declare-fun f (U) U)(declare-const e U)(declare-const z U)"
        "(eliminate e)(assert (= (f z) z))"
    )
    assert ui.stats["branches_explored"] == 1
    assert_equiv(ui.formula(), problem, "(= (f z) z)")


def test_unary_signature_never_branches():
    rng = random.Random(5)
    for _ in range(15):
        problem = random_problem(rng)
        if any(f.arity != 1 for f in problem.functions):
            continue
        ui = compute_tableaux_ui(flatten(problem))
        assert ui.stats["branches_explored"] == 1
        assert ui.stats["rule_apps"]["4"] == 0


def test_disjuncts_mention_only_retained_symbols():
    rng = random.Random(31)
    for _ in range(25):
        problem = random_problem(rng)
        ui = compute_tableaux_ui(flatten(problem))
        for d in ui.disjuncts:
            for lit in d.phi:
                for t in (lit.lhs, lit.rhs):
                    assert term_is_efree(t)
                    assert all(s.kind != "quantified" for s in term_symbols(t))
            for _, body in d.delta.entries:
                assert term_is_efree(body)


def test_residue_on_random_corpus():
    rng = random.Random(99)
    for _ in range(30):
        problem = random_problem(rng)
        if not problem.body.literals:
            continue
        from eufui.formulas import mk_and

        body = mk_and([lit_general(l) for l in problem.body.literals])
        ui = compute_tableaux_ui(flatten(problem))
        ok, witness = euf_valid(body, ui.formula())
        assert ok, witness
        ok, witness = euf_valid(body, ui.formula(unravel=True))
        assert ok, witness


def test_default_vs_reversed_on_random_corpus():
    rng = random.Random(12)
    for _ in range(15):
        problem = random_problem(rng)
        a = compute_tableaux_ui(flatten(problem))
        b = compute_tableaux_ui(flatten(problem), strategy="reversed")
        ok, witness = euf_equiv(a.formula(), b.formula())
        assert ok, witness
