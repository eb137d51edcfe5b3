"""Flattening into the restricted literal language shared by both algorithms.

The output holds only literals of two shapes over 0-ary operands,
f(a1..ah)=a and a!=b, each mentioning a quantified variable; everything
e-free is routed to the passthrough constraint. Quantified equalities
e=t with t e-free never survive: they are eliminated by replacement and
their witnesses recorded for the replay audit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .euf import euf_valid
from .formulas import mk_and
from .terms import (
    Constraint,
    DagDefinition,
    Diseq,
    Eq,
    FunEq,
    NamePool,
    Ne,
    Symbol,
    Term,
    VarEq,
    const,
    intern,
    lit_general,
    lit_is_efree,
    lit_substitute,
    mk_symbol,
    orient,
    term_is_efree,
    term_substitute,
)


@dataclass
class PreprocessedInput:
    s1: list = field(default_factory=list)
    passthrough: Constraint = field(default_factory=Constraint)
    initial_delta: DagDefinition = field(default_factory=DagDefinition)
    renaming: dict[Symbol, Term] = field(default_factory=dict)
    eliminated: dict[Symbol, Term] = field(default_factory=dict)
    evars: list[Symbol] = field(default_factory=list)
    falsified: bool = False
    taken_names: set[str] = field(default_factory=set)


def flatten(problem) -> PreprocessedInput:
    """Flatten the problem body into s1 plus the e-free passthrough."""
    pre = PreprocessedInput()
    taken = set(problem.symbols)
    ypool = NamePool("y", taken, start=1)
    eshare: dict[int, Term] = {}
    yshare: dict[int, Term] = {}
    introduced: list[Symbol] = []
    work: list = []

    def y_for(t: Term) -> Term:
        got = yshare.get(t.id)
        if got is None:
            y = mk_symbol(ypool.fresh(), 0, "defined")
            pre.initial_delta.entries.append((y, t))
            got = yshare[t.id] = const(y)
        return got

    def atom_of(t: Term) -> Term:
        if not t.args:
            return t
        if term_is_efree(t):
            return y_for(t)
        app = intern(t.head, tuple(atom_of(a) for a in t.args))
        got = eshare.get(app.id)
        if got is None:
            e = mk_symbol(f"_a{len(introduced)}", 0, "quantified")
            introduced.append(e)
            pre.renaming[e] = t
            got = eshare[app.id] = const(e)
            work.append(FunEq(app, got))
        return got

    for lit in problem.body.literals:
        if lit.lhs is lit.rhs:
            if isinstance(lit, (Ne, Diseq)):
                pre.falsified = True
                return pre
            continue
        if lit_is_efree(lit):
            general = lit_general(lit)
            if general not in pre.passthrough.literals:
                pre.passthrough.literals.append(general)
            continue
        a = atom_of(lit.lhs)
        b = atom_of(lit.rhs)
        kind = Diseq if isinstance(lit, (Ne, Diseq)) else VarEq
        work.append(orient(kind(a, b)))

    # Simplification to fixpoint: drop trivia, eliminate e=t by replacement,
    # move literals that became e-free to passthrough.
    changed = True
    while changed:
        changed = False
        for i, lit in enumerate(work):
            if isinstance(lit, VarEq) and lit.lhs is lit.rhs:
                del work[i]
                changed = True
                break
            if isinstance(lit, Diseq) and lit.lhs is lit.rhs:
                pre.falsified = True
                return pre
            if isinstance(lit, VarEq) and lit.lhs.head.kind == "quantified":
                sym = lit.lhs.head
                pre.eliminated[sym] = lit.rhs
                pre.renaming.pop(sym, None)
                del work[i]
                mapping = {sym: lit.rhs}
                work[:] = [lit_substitute(l, mapping) for l in work]
                changed = True
                break
            if lit_is_efree(lit):
                del work[i]
                general = lit_general(lit)
                if general not in pre.passthrough.literals:
                    pre.passthrough.literals.append(general)
                changed = True
                break
            if lit in work[:i]:
                del work[i]
                changed = True
                break

    # Rename surviving fresh variables densely, in first-emission order,
    # continuing the eliminate numbering and skipping taken names.
    epool = NamePool("e", taken | {y.name for y, _ in pre.initial_delta.entries}, start=len(problem.eliminate))
    live = set()
    for lit in work:
        for t in (lit.lhs, lit.rhs):
            for u in (t, *t.args):
                if u.head.kind == "quantified":
                    live.add(u.head)
    renumber: dict[Symbol, Term] = {}
    for old in introduced:
        if old in live:
            new = mk_symbol(epool.fresh(), 0, "quantified")
            renumber[old] = const(new)
            pre.renaming[new] = pre.renaming.pop(old)
    if renumber:
        work = [lit_substitute(lit, renumber) for lit in work]

    # Resolve eliminated witnesses through later replacements and renumbering.
    for sym in list(pre.eliminated):
        w = pre.eliminated[sym]
        while w.head in pre.eliminated:
            w = pre.eliminated[w.head]
        w = term_substitute(w, renumber)
        pre.eliminated[sym] = w

    pre.s1 = work
    order = {s: i for i, s in enumerate(problem.eliminate)}
    for old in introduced:
        if old in renumber:
            order[renumber[old].head] = len(order)
    pre.evars = sorted(live_symbols(pre.s1), key=lambda s: order[s])
    pre.taken_names = (
        set(taken)
        | {y.name for y, _ in pre.initial_delta.entries}
        | {s.name for s in pre.renaming}
    )
    return pre


def live_symbols(s1) -> set[Symbol]:
    out = set()
    for lit in s1:
        for t in (lit.lhs, lit.rhs):
            for u in (t, *t.args):
                if u.head.kind == "quantified":
                    out.add(u.head)
    return out


def replay_check(pre: PreprocessedInput, problem, max_cubes=None) -> bool:
    """Audit flattening: both entailment directions hold under the oracle."""
    if pre.falsified:
        return True
    kwargs = {} if max_cubes is None else {"max_cubes": max_cubes}
    body = mk_and(list(problem.body.literals)) if problem.body.literals else mk_and([])
    ydefs = {y: body_term for y, body_term in pre.initial_delta.entries}
    subst = dict(ydefs)
    for sym, original in pre.renaming.items():
        subst[sym] = original
    forward_target = []
    for lit in list(pre.passthrough.literals) + list(pre.s1):
        g = lit_general(lit)
        forward_target.append(
            type(g)(term_substitute(g.lhs, subst), term_substitute(g.rhs, subst))
        )
    ok, _ = euf_valid(body, mk_and(forward_target), **kwargs)
    if not ok:
        return False

    back_hyp = [lit_general(l) for l in pre.passthrough.literals]
    back_hyp += [lit_general(l) for l in pre.s1]
    back_hyp += [Eq(const(y), t) for y, t in pre.initial_delta.entries]
    back_hyp += [Eq(const(sym), w) for sym, w in pre.eliminated.items()]
    ok, _ = euf_valid(mk_and(back_hyp), body, **kwargs)
    return ok
