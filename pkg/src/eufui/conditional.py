"""Conditional Horn-clause elimination: the result is a conjunction.

Step 1 turns the flat input into Horn clauses: each pair of applications
of one function contributes "argument equalities imply the right-side
equality", and every input literal survives as a unit clause (a quantified
disequality becomes an equality-implies-bottom clause). Step 2 saturates
under rewriting by clauses whose consequent equates two quantified
variables. The output conjoins, over every extractable chain of
conditional definitions, the clauses expressible in the retained language
once the chain's placeholders are bound.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .errors import ResourceLimitError
from .formulas import FALSE, Let, expand_lets, mk_and, mk_eq, mk_implies, wrap_definitions
from .terms import (
    DagDefinition,
    Diseq,
    FunEq,
    Symbol,
    Term,
    VarEq,
    const,
    intern,
    lit_general,
    mk_symbol,
    orient,
    term_substitute,
)

DEFAULT_MAX_CLAUSES = 100_000
DEFAULT_MAX_CDAGS = 1_000_000


@dataclass(frozen=True)
class HornClause:
    """Antecedent of variable equalities, consequent literal (None is bottom)."""

    antecedent: tuple
    consequent: object


def _atom_key(a: VarEq) -> tuple[int, int]:
    return (a.lhs.id, a.rhs.id)


def make_clause(antecedent, consequent, keep_tautology: bool = False):
    """Canonical clause, or None when it simplifies to a tautology.

    Application-pair merges must survive even when the consequent repeats
    an antecedent atom: their rewritten descendants are the clauses that
    keep later merges subsumption-closed.
    """
    atoms = []
    seen = set()
    for a in antecedent:
        a = orient(VarEq(a.lhs, a.rhs))
        if a.lhs is a.rhs:
            continue
        key = _atom_key(a)
        if key not in seen:
            seen.add(key)
            atoms.append(a)
    atoms.sort(key=_atom_key)
    if isinstance(consequent, VarEq):
        consequent = orient(consequent)
        if consequent.lhs is consequent.rhs:
            return None
        if _atom_key(consequent) in seen and not keep_tautology:
            return None
    return HornClause(tuple(atoms), consequent)


def _clause_operands(c: HornClause):
    for a in c.antecedent:
        yield a.lhs
        yield a.rhs
    cq = c.consequent
    if cq is None:
        return
    if isinstance(cq, FunEq):
        yield from cq.lhs.args
        yield cq.rhs
    else:
        yield cq.lhs
        yield cq.rhs


def _mentions(c: HornClause, sym: Symbol) -> bool:
    return any(t.head is sym for t in _clause_operands(c))


def _is_rewriter(c: HornClause) -> bool:
    return (
        isinstance(c.consequent, VarEq)
        and c.consequent.lhs.head.kind == "quantified"
        and c.consequent.rhs.head.kind == "quantified"
    )


def step1(pre) -> list[HornClause]:
    """Unit clauses plus one conditional clause per mixed application pair."""
    out: list[HornClause] = []
    seen = set()

    def push(c):
        if c is not None and c not in seen:
            seen.add(c)
            out.append(c)

    for lit in pre.s1:
        if isinstance(lit, FunEq):
            push(HornClause((), lit))
        elif isinstance(lit, Diseq):
            push(make_clause((VarEq(lit.lhs, lit.rhs),), None))
        else:
            push(make_clause((), orient(VarEq(lit.lhs, lit.rhs))))

    funeqs = [l for l in pre.s1 if isinstance(l, FunEq)]
    for i in range(len(funeqs)):
        for j in range(i + 1, len(funeqs)):
            a, b = funeqs[i], funeqs[j]
            if a.lhs.head is not b.lhs.head or a.rhs is b.rhs:
                continue
            ante = [VarEq(u, v) for u, v in zip(a.lhs.args, b.lhs.args)]
            push(make_clause(ante, VarEq(a.rhs, b.rhs), keep_tautology=True))
    return out


def _rewrite_once(r: HornClause, c: HornClause) -> list[HornClause]:
    """All single-occurrence replacements of r's consequent lhs inside c."""
    src = r.consequent.lhs
    dst = r.consequent.rhs
    extra = list(r.antecedent)
    out = []
    for idx, atom in enumerate(c.antecedent):
        if atom.lhs is src:
            ante = list(c.antecedent)
            ante[idx] = VarEq(dst, atom.rhs)
            out.append(make_clause(ante + extra, c.consequent))
        if atom.rhs is src:
            ante = list(c.antecedent)
            ante[idx] = VarEq(atom.lhs, dst)
            out.append(make_clause(ante + extra, c.consequent))
    cq = c.consequent
    if cq is not None and r is not c:
        base = list(c.antecedent) + extra
        if isinstance(cq, VarEq):
            if cq.lhs is src:
                out.append(make_clause(base, VarEq(dst, cq.rhs)))
            if cq.rhs is src:
                out.append(make_clause(base, VarEq(cq.lhs, dst)))
        else:
            for k, a in enumerate(cq.lhs.args):
                if a is src:
                    args = list(cq.lhs.args)
                    args[k] = dst
                    out.append(make_clause(base, FunEq(intern(cq.lhs.head, tuple(args)), cq.rhs)))
            if cq.rhs is src:
                out.append(make_clause(base, FunEq(cq.lhs, dst)))
    return [c2 for c2 in out if c2 is not None]


def _subsumes(d: HornClause, c: HornClause) -> bool:
    return d.consequent == c.consequent and set(d.antecedent) <= set(c.antecedent)


def step2(clauses, max_clauses: int = DEFAULT_MAX_CLAUSES, order: str = "fifo", check_time=None):
    """Given-clause saturation under quantified-variable rewriting."""
    if order not in ("fifo", "lifo"):
        raise ValueError(f"unknown saturation order {order}")
    created = len(clauses)
    seen = set(clauses)
    queue = deque(clauses)
    processed: list[HornClause] = []
    while queue:
        if check_time is not None:
            check_time()
        g = queue.popleft() if order == "fifo" else queue.pop()
        if any(_subsumes(p, g) for p in processed):
            continue
        processed = [p for p in processed if not _subsumes(g, p)]
        inferred = []
        if _is_rewriter(g):
            for c in processed + [g]:
                inferred.extend(_rewrite_once(g, c))
        for r in processed:
            if _is_rewriter(r):
                inferred.extend(_rewrite_once(r, g))
        processed.append(g)
        for c in inferred:
            if c in seen or any(_subsumes(p, c) for p in processed):
                continue
            seen.add(c)
            created += 1
            if created > max_clauses:
                raise ResourceLimitError(
                    "clause limit exceeded", {"clauses_created": created}
                )
            queue.append(c)
    return processed, created


# --- conditional definition chains -----------------------------------------


@dataclass
class CdagEntry:
    var: Symbol
    clause: HornClause
    body: Term


def _in_lang(t: Term, allowed: set) -> bool:
    return t.head.kind != "quantified" or t.head in allowed


def _def_body(c: HornClause, w: Symbol, allowed: set):
    """The defining body when clause c can define w over allowed, else None."""
    if not all(_in_lang(a.lhs, allowed) and _in_lang(a.rhs, allowed) for a in c.antecedent):
        return None
    cq = c.consequent
    if isinstance(cq, VarEq):
        for mine, other in ((cq.lhs, cq.rhs), (cq.rhs, cq.lhs)):
            if mine.head is w and _in_lang(other, allowed):
                return other
        return None
    if isinstance(cq, FunEq) and cq.rhs.head is w:
        if all(_in_lang(a, allowed) for a in cq.lhs.args):
            return cq.lhs
    return None


def enumerate_cdags(s3, evars, max_cdags: int = DEFAULT_MAX_CDAGS, check_time=None,
                    stats: dict | None = None):
    """Yield every definition chain in canonical order (each prefix once).

    A chain entry may reuse its clause's consequent in either orientation.
    When consecutive entries are independent (the later clause does not
    mention the earlier placeholder), only the elimination-ordered
    interleaving is kept, so each set of entries appears once. Chains are
    yielded lazily; the visited count covers every tree node seen so far.
    """
    position = {w: i for i, w in enumerate(evars)}
    visited = 0

    def dfs(allowed: set, entries: list):
        nonlocal visited
        visited += 1
        if stats is not None:
            stats["cdags_visited"] = visited
        if visited > max_cdags:
            raise ResourceLimitError(
                "conditional DAG limit exceeded", {"cdags_visited": visited}
            )
        if check_time is not None:
            check_time()
        yield list(entries)
        for w in evars:
            if w in allowed:
                continue
            for c in s3:
                body = _def_body(c, w, allowed)
                if body is None:
                    continue
                if entries:
                    prev = entries[-1].var
                    if not _mentions(c, prev) and position[prev] > position[w]:
                        continue
                entries.append(CdagEntry(w, c, body))
                yield from dfs(allowed | {w}, entries)
                entries.pop()

    yield from dfs(set(), [])


def core_clauses(s3, wset: set) -> list[HornClause]:
    """Clauses whose every variable operand is retained or in wset."""
    return [c for c in s3 if all(_in_lang(t, wset) for t in _clause_operands(c))]


def _sigma_map(entries) -> dict:
    mapping: dict = {}
    for e in entries:
        mapping[e.var] = term_substitute(e.body, mapping)
    return mapping


def _clause_trivial(c: HornClause, mapping: dict) -> bool:
    cq = c.consequent
    if cq is None:
        return False
    lhs = term_substitute(cq.lhs, mapping)
    rhs = term_substitute(cq.rhs, mapping)
    if lhs is rhs:
        return True
    goal = {lhs.id, rhs.id}
    return any(
        {term_substitute(a.lhs, mapping).id, term_substitute(a.rhs, mapping).id} == goal
        for a in c.antecedent
    )


def _clause_formula(c: HornClause, mapping: dict):
    ante = mk_and([mk_eq(term_substitute(a.lhs, mapping), term_substitute(a.rhs, mapping))
                   for a in c.antecedent])
    cq = c.consequent
    if cq is None:
        concl = FALSE
    else:
        concl = mk_eq(term_substitute(cq.lhs, mapping), term_substitute(cq.rhs, mapping))
    return mk_implies(ante, concl)


@dataclass
class PhiDelta:
    """One conditional definition chain with its retained-language clauses."""

    entries: list
    core: list
    placeholders: dict = field(default_factory=dict)  # original var -> fresh symbol

    def formula(self, unravel: bool = False):
        wmap = {v: const(w) for v, w in self.placeholders.items()}
        if not unravel:
            body = mk_and([_clause_formula(c, wmap) for c in self.core])
            for e in reversed(self.entries):
                gamma = mk_and(
                    [mk_eq(term_substitute(a.lhs, wmap), term_substitute(a.rhs, wmap))
                     for a in e.clause.antecedent]
                )
                bound = self.placeholders[e.var]
                body = mk_implies(gamma, Let(bound, term_substitute(e.body, wmap), body))
            return body
        sigma: dict = {}
        hyp = []
        for e in self.entries:
            for a in e.clause.antecedent:
                hyp.append(mk_eq(term_substitute(a.lhs, sigma), term_substitute(a.rhs, sigma)))
            sigma[e.var] = term_substitute(e.body, sigma)
        concl = mk_and([_clause_formula(c, sigma) for c in self.core])
        return mk_implies(mk_and(hyp), concl)


@dataclass
class UiResultCnf:
    phis: list
    passthrough: list
    initial_delta: DagDefinition
    s2: list
    s3: list
    stats: dict
    falsified: bool = False

    def formula(self, unravel: bool = False):
        if self.falsified:
            return FALSE
        parts = [lit_general(l) for l in self.passthrough]
        parts += [phi.formula(unravel=unravel) for phi in self.phis]
        body = wrap_definitions(self.initial_delta.entries, mk_and(parts))
        return expand_lets(body) if unravel else body


def compute_conditional_ui(
    pre,
    max_clauses: int = DEFAULT_MAX_CLAUSES,
    max_cdags: int = DEFAULT_MAX_CDAGS,
    order: str = "fifo",
    timeout_at: float | None = None,
) -> UiResultCnf:
    """Run both saturation steps, extract all chains, keep the useful ones."""
    stats = {"s2_size": 0, "s3_size": 0, "num_cdags": 0, "clauses_created": 0, "cdags_visited": 0}
    if pre.falsified:
        return UiResultCnf([], [], DagDefinition(), [], [], stats, falsified=True)

    def check_time():
        if timeout_at is not None and time.monotonic() > timeout_at:
            raise ResourceLimitError("timeout exceeded", stats)

    s2 = step1(pre)
    stats["s2_size"] = len(s2)
    s3, created = step2(s2, max_clauses=max_clauses, order=order, check_time=check_time)
    stats["s3_size"] = len(s3)
    stats["clauses_created"] = created

    phis = []
    for entries in enumerate_cdags(s3, pre.evars, max_cdags=max_cdags,
                                   check_time=check_time, stats=stats):
        wset = {e.var for e in entries}
        core = core_clauses(s3, wset)
        if not core:
            continue
        sigma = _sigma_map(entries)
        if all(_clause_trivial(c, sigma) for c in core):
            continue
        names = {}
        k = 1
        for e in entries:
            while f"w{k}" in pre.taken_names:
                k += 1
            names[e.var] = mk_symbol(f"w{k}", 0, "defined")
            k += 1
        phis.append(PhiDelta(list(entries), core, names))
    stats["num_cdags"] = len(phis)

    return UiResultCnf(phis, list(pre.passthrough.literals), pre.initial_delta.copy(), s2, s3, stats)
