"""Quantifier-free formula nodes over interned terms, with let bindings.

Let nodes carry one binding each and nest; they are the compressed
(DAG-shaped) output form. expand_lets substitutes them away, which can
grow the formula exponentially (that blow-up is the point of keeping
them).
"""
from __future__ import annotations

from dataclasses import dataclass

from .terms import Eq, Ne, Symbol, Term, term_substitute, term_symbols, term_tree_size


@dataclass(frozen=True)
class FTrue:
    pass


@dataclass(frozen=True)
class FFalse:
    pass


TRUE = FTrue()
FALSE = FFalse()


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class Implies:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Let:
    """let var = val in body (one binding; nest for sequences)."""

    var: Symbol
    val: Term
    body: object


Formula = object


def mk_and(parts) -> Formula:
    out = []
    seen = set()
    for p in parts:
        if p is TRUE:
            continue
        if p is FALSE:
            return FALSE
        inner = p.parts if isinstance(p, And) else (p,)
        for q in inner:
            if q not in seen:
                seen.add(q)
                out.append(q)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def mk_or(parts) -> Formula:
    out = []
    seen = set()
    for p in parts:
        if p is FALSE:
            continue
        if p is TRUE:
            return TRUE
        inner = p.parts if isinstance(p, Or) else (p,)
        for q in inner:
            if q not in seen:
                seen.add(q)
                out.append(q)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def mk_implies(lhs: Formula, rhs: Formula) -> Formula:
    if lhs is TRUE:
        return rhs
    if lhs is FALSE or rhs is TRUE:
        return TRUE
    return Implies(lhs, rhs)


def mk_eq(lhs: Term, rhs: Term) -> Formula:
    return TRUE if lhs is rhs else Eq(lhs, rhs)


def mk_ne(lhs: Term, rhs: Term) -> Formula:
    return FALSE if lhs is rhs else Ne(lhs, rhs)


def sub_formula(f: Formula, mapping: dict[Symbol, Term], memo: dict | None = None) -> Formula:
    """Substitute 0-ary symbols inside every atom; lets are left alone upstream."""
    if memo is None:
        memo = {}
    if isinstance(f, Eq):
        return mk_eq(term_substitute(f.lhs, mapping, memo), term_substitute(f.rhs, mapping, memo))
    if isinstance(f, Ne):
        return mk_ne(term_substitute(f.lhs, mapping, memo), term_substitute(f.rhs, mapping, memo))
    if isinstance(f, And):
        return mk_and([sub_formula(p, mapping, memo) for p in f.parts])
    if isinstance(f, Or):
        return mk_or([sub_formula(p, mapping, memo) for p in f.parts])
    if isinstance(f, Not):
        return Not(sub_formula(f.body, mapping, memo))
    if isinstance(f, Implies):
        return mk_implies(sub_formula(f.lhs, mapping, memo), sub_formula(f.rhs, mapping, memo))
    if isinstance(f, Let):
        # A let binding shadows any outer mapping of the same symbol.
        val = term_substitute(f.val, mapping, memo)
        inner = {k: v for k, v in mapping.items() if k is not f.var}
        return Let(f.var, val, sub_formula(f.body, inner))
    return f


def expand_lets(f: Formula) -> Formula:
    if isinstance(f, Let):
        body = expand_lets(f.body)
        return sub_formula(body, {f.var: f.val})
    if isinstance(f, And):
        return mk_and([expand_lets(p) for p in f.parts])
    if isinstance(f, Or):
        return mk_or([expand_lets(p) for p in f.parts])
    if isinstance(f, Not):
        return Not(expand_lets(f.body))
    if isinstance(f, Implies):
        return mk_implies(expand_lets(f.lhs), expand_lets(f.rhs))
    return f


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form; atoms become Eq/Ne leaves only."""
    if isinstance(f, FTrue):
        return TRUE if positive else FALSE
    if isinstance(f, FFalse):
        return FALSE if positive else TRUE
    if isinstance(f, Eq):
        return f if positive else mk_ne(f.lhs, f.rhs)
    if isinstance(f, Ne):
        return f if positive else mk_eq(f.lhs, f.rhs)
    if isinstance(f, Not):
        return nnf(f.body, not positive)
    if isinstance(f, Implies):
        if positive:
            return mk_or([nnf(f.lhs, False), nnf(f.rhs, True)])
        return mk_and([nnf(f.lhs, True), nnf(f.rhs, False)])
    if isinstance(f, And):
        parts = [nnf(p, positive) for p in f.parts]
        return mk_and(parts) if positive else mk_or(parts)
    if isinstance(f, Or):
        parts = [nnf(p, positive) for p in f.parts]
        return mk_or(parts) if positive else mk_and(parts)
    if isinstance(f, Let):
        return nnf(expand_lets(f), positive)
    raise TypeError(f"not a formula: {f!r}")


def fsize(f: Formula, tmemo: dict | None = None) -> int:
    """Node count, with atom terms counted as expanded trees."""
    if tmemo is None:
        tmemo = {}
    if isinstance(f, (FTrue, FFalse)):
        return 1
    if isinstance(f, (Eq, Ne)):
        return 1 + term_tree_size(f.lhs, tmemo) + term_tree_size(f.rhs, tmemo)
    if isinstance(f, (And, Or)):
        return 1 + sum(fsize(p, tmemo) for p in f.parts)
    if isinstance(f, Not):
        return 1 + fsize(f.body, tmemo)
    if isinstance(f, Implies):
        return 1 + fsize(f.lhs, tmemo) + fsize(f.rhs, tmemo)
    if isinstance(f, Let):
        return 1 + term_tree_size(f.val, tmemo) + fsize(f.body, tmemo)
    raise TypeError(f"not a formula: {f!r}")


def formula_atoms(f: Formula):
    """All Eq/Ne leaves (lets expanded)."""
    f = expand_lets(f)
    out = []

    def go(g):
        if isinstance(g, (Eq, Ne)):
            out.append(g)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                go(p)
        elif isinstance(g, Not):
            go(g.body)
        elif isinstance(g, Implies):
            go(g.lhs)
            go(g.rhs)

    go(f)
    return out


def formula_symbols(f: Formula) -> set[Symbol]:
    """Symbols of all atoms and let values, without expanding lets."""
    out: set[Symbol] = set()

    def go(g):
        if isinstance(g, (Eq, Ne)):
            out.update(term_symbols(g.lhs))
            out.update(term_symbols(g.rhs))
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                go(p)
        elif isinstance(g, Not):
            go(g.body)
        elif isinstance(g, Implies):
            go(g.lhs)
            go(g.rhs)
        elif isinstance(g, Let):
            out.update(term_symbols(g.val))
            go(g.body)

    go(f)
    return out


def wrap_definitions(entries, body: Formula) -> Formula:
    """Wrap body in let bindings for the definitions it actually reaches."""
    syms = formula_symbols(body)
    needed = set()
    for y, t in reversed(entries):
        if y in syms:
            needed.add(y)
            syms |= term_symbols(t)
    for y, t in reversed(entries):
        if y in needed:
            body = Let(y, t, body)
    return body
