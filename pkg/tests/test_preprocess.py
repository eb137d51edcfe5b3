"""Flattening goldens, output-shape invariants, and the replay audit."""
from __future__ import annotations

import random

import pytest
from conftest import random_problem

from eufui.parse import format_formula, format_term, parse
from eufui.preprocess import flatten, live_symbols, replay_check
from eufui.terms import Diseq, FunEq, VarEq, const, lit_general

EX22 = """
(declare-sort U 0)
(declare-fun f (U U) U)
(declare-const e U)
(declare-const z1 U)(declare-const z2 U)(declare-const z3 U)(declare-const z4 U)
(eliminate e)
(assert (= (f e z1) z2))
(assert (= (f e z3) z4))
"""

EX39 = """
(declare-sort U 0)
(declare-fun f (U U) U)
(declare-fun g (U U) U)
(declare-fun h (U) U)
(declare-const e0 U)
(declare-const z0 U)(declare-const z1 U)(declare-const z2 U)
(declare-const z3 U)(declare-const z4 U)
(eliminate e0)
(assert (= (g z4 e0) z0))
(assert (= (f z2 e0) (g z3 e0)))
(assert (= (h (f z1 e0)) z0))
"""

EX16 = """
(declare-sort U 0)
(declare-fun f (U U) U)
(declare-const e U)
(declare-const s1 U)(declare-const s2 U)(declare-const t U)
(declare-const z1 U)(declare-const z2 U)(declare-const z3 U)(declare-const z4 U)
(eliminate e)
(assert (= s1 (f z3 e)))
(assert (= s2 (f z4 e)))
(assert (= t (f (f z1 e) (f z2 e))))
"""


def fmt(lits):
    return [format_formula(lit_general(l)) for l in lits]


def test_flatten_already_flat_passes_through():
    pre = flatten(parse(EX22))
    assert fmt(pre.s1) == ["(= (f e z1) z2)", "(= (f e z3) z4)"]
    assert pre.passthrough.literals == []
    assert pre.initial_delta.entries == []
    assert [s.name for s in pre.evars] == ["e"]
    assert not pre.falsified


def test_flatten_shared_subterm_golden():
    pre = flatten(parse(EX39))
    assert fmt(pre.s1) == [
        "(= (g z4 e0) z0)",
        "(= (f z2 e0) e1)",
        "(= (g z3 e0) e1)",
        "(= (f z1 e0) e2)",
        "(= (h e2) z0)",
    ]
    assert [s.name for s in pre.evars] == ["e0", "e1", "e2"]
    # the introduced variables still map back to input subterms
    back = {s.name: format_term(v) for s, v in pre.renaming.items()}
    assert back == {"e1": "(f z2 e0)", "e2": "(f z1 e0)"}


def test_flatten_nested_golden():
    pre = flatten(parse(EX16))
    assert fmt(pre.s1) == [
        "(= (f z3 e) s1)",
        "(= (f z4 e) s2)",
        "(= (f z1 e) e1)",
        "(= (f z2 e) e2)",
        "(= (f e1 e2) t)",
    ]
    assert [s.name for s in pre.evars] == ["e", "e1", "e2"]


def test_flatten_efree_compound_gets_definition():
    pre = flatten(parse(
        "(declare-sort U 0)(declare-fun f (U U) U)(declare-fun g (U U) U)"
        "(declare-const e U)(declare-const z1 U)(declare-const z2 U)(declare-const z3 U)"
        "(eliminate e)(assert (= (g e (f z1 z2)) z3))"
    ))
    assert len(pre.initial_delta.entries) == 1
    y, body = pre.initial_delta.entries[0]
    assert y.name == "y1" and y.kind == "defined"
    assert format_term(body) == "(f z1 z2)"
    assert fmt(pre.s1) == ["(= (g e y1) z3)"]


def test_flatten_quantified_equality_eliminated():
    pre = flatten(parse(
        "(declare-sort U 0)(declare-fun f (U U) U)"
        "(declare-const e U)(declare-const z1 U)(declare-const z2 U)(declare-const z3 U)"
        "(eliminate e)(assert (= e z1))(assert (= (f e z2) z3))"
    ))
    assert pre.s1 == []
    assert fmt(pre.passthrough.literals) == ["(= (f z1 z2) z3)"]
    witnesses = {s.name: w.head.name for s, w in pre.eliminated.items()}
    assert witnesses["e"] == "z1"
    assert pre.evars == []


def test_flatten_trivial_and_falsified():
    pre = flatten(parse(
        "(declare-sort U 0)(declare-const e U)(declare-const z U)"
        "(eliminate e)(assert (= e e))"
    ))
    assert pre.s1 == [] and pre.passthrough.literals == [] and not pre.falsified

    pre = flatten(parse(
        "(declare-sort U 0)(declare-const e U)(declare-const z U)"
        "(eliminate e)(assert (not (= e e)))"
    ))
    assert pre.falsified

    # falsification discovered only after replacement
    pre = flatten(parse(
        "(declare-sort U 0)(declare-const e U)(declare-const z U)"
        "(eliminate e)(assert (= e z))(assert (not (= e z)))"
    ))
    assert pre.falsified


def test_flatten_passthrough_dedup():
    pre = flatten(parse(
        "(declare-sort U 0)(declare-fun f (U) U)(declare-const e U)(declare-const z U)"
        "(eliminate e)(assert (= (f z) z))(assert (= (f z) z))(assert (= (f e) z))"
    ))
    assert len(pre.passthrough.literals) == 1
    assert fmt(pre.s1) == ["(= (f e) z)"]


def test_flatten_output_shapes():
    rng = random.Random(20260823)
    for _ in range(50):
        pre = flatten(random_problem(rng))
        if pre.falsified:
            continue
        live = live_symbols(pre.s1)
        assert live == set(pre.evars)
        for lit in pre.s1:
            assert isinstance(lit, (FunEq, Diseq))
            assert not lit.rhs.args
            if isinstance(lit, FunEq):
                assert all(not a.args for a in lit.lhs.args)
            else:
                assert not lit.lhs.args
            # everything e-free was routed to the passthrough instead
            heads = {lit.rhs.head.kind} | {a.head.kind for a in lit.lhs.args} | (
                {lit.lhs.head.kind} if not lit.lhs.args else set()
            )
            assert "quantified" in heads


def test_flatten_deterministic():
    a = flatten(parse(EX39))
    b = flatten(parse(EX39))
    assert fmt(a.s1) == fmt(b.s1)
    assert [s.name for s in a.evars] == [s.name for s in b.evars]
    assert [y.name for y, _ in a.initial_delta.entries] == [y.name for y, _ in b.initial_delta.entries]


def test_flatten_avoids_declared_names():
    # a parameter already named y1 must not capture the first definition
    pre = flatten(parse(
        "(declare-sort U 0)(declare-fun f (U U) U)(declare-fun g (U U) U)"
        "(declare-const e U)(declare-const y1 U)(declare-const z U)"
        "(eliminate e)(assert (= (g e (f y1 z)) z))"
    ))
    y, _ = pre.initial_delta.entries[0]
    assert y.name == "y2"
    # and a parameter named e1 must not collide with renumbered variables
    pre = flatten(parse(
        "(declare-sort U 0)(declare-fun f (U U) U)(declare-fun h (U) U)"
        "(declare-const e0 U)(declare-const e1 U)(declare-const z U)"
        "(eliminate e0)(assert (= (h (f z e0)) e1))"
    ))
    fresh = [s.name for s in pre.evars if s.name != "e0"]
    assert fresh == ["e2"]


def test_replay_on_goldens():
    for text in (EX22, EX39, EX16):
        problem = parse(text)
        assert replay_check(flatten(problem), problem)


def test_replay_on_random_corpus():
    rng = random.Random(77)
    checked = 0
    for _ in range(60):
        problem = random_problem(rng)
        assert replay_check(flatten(problem), problem)
        checked += 1
    assert checked == 60


def test_replay_detects_corruption():
    problem = parse(EX39)
    pre = flatten(problem)
    z1 = problem.symbols["z1"]
    pre.s1[0] = FunEq(pre.s1[0].lhs, const(z1))
    assert not replay_check(pre, problem)

    problem = parse(
        "(declare-sort U 0)(declare-fun f (U U) U)"
        "(declare-const e U)(declare-const z1 U)(declare-const z2 U)(declare-const z3 U)"
        "(eliminate e)(assert (= e z1))(assert (= (f e z2) z3))"
    )
    pre = flatten(problem)
    pre.eliminated.clear()
    assert not replay_check(pre, problem)
