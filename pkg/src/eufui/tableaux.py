"""Branching tableaux elimination: the result is a disjunction of constraints.

A branch state is (delta, phi, psi): explicit definitions built so far, the
retained e-free part, and the remaining work set of flat literals. Rules are
tried in a fixed priority order; only the splitting rule branches. Terminal
work sets hold nothing but blocked applications and quantified disequalities
and are discarded, so each surviving branch contributes (delta, phi).
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import ResourceLimitError
from .euf import cc_sat
from .formulas import mk_and, mk_or, wrap_definitions
from .parse import format_formula
from .terms import (
    Constraint,
    DagDefinition,
    Diseq,
    FunEq,
    Ne,
    VarEq,
    compatible,
    const,
    lit_general,
    lit_is_efree,
    lit_substitute,
    mk_symbol,
    orient,
    term_is_efree,
)
from .terms import unravel as unravel_constraint

DEFAULT_MAX_BRANCHES = 1_000_000

RULE_NAMES = ("1.0", "1.i", "1.ii", "2", "3", "4")


def _zero_stats() -> dict:
    return {
        "branches_explored": 0,
        "rule4_firings": 0,
        "rule_apps": {r: 0 for r in RULE_NAMES},
        "max_branch_steps": 0,
    }


def _merge_stats(into: dict, other: dict):
    into["branches_explored"] += other["branches_explored"]
    into["rule4_firings"] += other["rule4_firings"]
    for r in RULE_NAMES:
        into["rule_apps"][r] += other["rule_apps"][r]
    into["max_branch_steps"] = max(into["max_branch_steps"], other["max_branch_steps"])


@dataclass
class Disjunct:
    delta: DagDefinition
    phi: list

    def formula(self, unravel: bool = False):
        if unravel:
            flat = unravel_constraint(self.delta, Constraint(list(self.phi)))
            return mk_and([lit_general(l) for l in flat.literals])
        body = mk_and([lit_general(l) for l in self.phi])
        return wrap_definitions(self.delta.entries, body)


@dataclass
class UiResultDnf:
    disjuncts: list
    stats: dict

    def formula(self, unravel: bool = False):
        return mk_or([d.formula(unravel=unravel) for d in self.disjuncts])


class _State:
    __slots__ = ("delta", "psi", "phi", "ynext", "steps")

    def __init__(self, delta, psi, phi, ynext, steps=0):
        self.delta = delta
        self.psi = psi
        self.phi = phi
        self.ynext = ynext
        self.steps = steps

    def copy(self) -> "_State":
        return _State(self.delta.copy(), list(self.psi), list(self.phi), self.ynext, self.steps)


def _pairs(n: int, forward: bool):
    if forward:
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j
    else:
        for i in range(n - 2, -1, -1):
            for j in range(n - 1, i, -1):
                yield i, j


def _blocked(diffs, phi) -> bool:
    for u, v in diffs:
        key = frozenset((u.id, v.id))
        for lit in phi:
            if isinstance(lit, (Diseq, Ne)) and frozenset((lit.lhs.id, lit.rhs.id)) == key:
                return True
    return False


def compute_tableaux_ui(
    pre,
    strategy: str = "default",
    max_branches: int = DEFAULT_MAX_BRANCHES,
    timeout_at: float | None = None,
    prune: str = "syntactic",
    jobs: int = 1,
) -> UiResultDnf:
    """Run the branching elimination to completion and collect all disjuncts."""
    if strategy not in ("default", "reversed"):
        raise ValueError(f"unknown strategy {strategy}")
    if prune not in ("syntactic", "semantic"):
        raise ValueError(f"unknown prune mode {prune}")
    forward = strategy == "default"
    taken = frozenset(pre.taken_names)

    stats = _zero_stats()
    if pre.falsified:
        return UiResultDnf([], stats)

    def check_time():
        if timeout_at is not None and time.monotonic() > timeout_at:
            raise ResourceLimitError("timeout exceeded", stats)

    def fresh_y(state: _State):
        k = state.ynext
        while f"y{k}" in taken:
            k += 1
        state.ynext = k + 1
        return mk_symbol(f"y{k}", 0, "defined")

    def find_redex(state: _State):
        psi = state.psi
        n = len(psi)
        idx = range(n) if forward else range(n - 1, -1, -1)
        for i in idx:
            if psi[i].lhs is psi[i].rhs:
                return ("1.0", i)
        for i, j in _pairs(n, forward):
            a, b = psi[i], psi[j]
            if isinstance(a, FunEq) and isinstance(b, FunEq) and a.lhs is b.lhs:
                return ("1.i", (i, j))
        for i in idx:
            lit = psi[i]
            if (
                isinstance(lit, VarEq)
                and lit.lhs.head.kind == "quantified"
                and lit.rhs.head.kind == "quantified"
            ):
                return ("1.ii", i)
        for i in idx:
            lit = psi[i]
            if isinstance(lit, VarEq) and lit.lhs.head.kind == "quantified" and term_is_efree(lit.rhs):
                return ("2", i)
            if (
                isinstance(lit, FunEq)
                and lit.rhs.head.kind == "quantified"
                and all(term_is_efree(a) for a in lit.lhs.args)
            ):
                return ("2", i)
        for i in idx:
            if lit_is_efree(psi[i]):
                return ("3", i)
        for i, j in _pairs(n, forward):
            a, b = psi[i], psi[j]
            if isinstance(a, FunEq) and isinstance(b, FunEq) and a.lhs is not b.lhs:
                diffs = compatible(a.lhs, b.lhs)
                if diffs is not None and not _blocked(diffs, state.phi):
                    return ("4", (i, j, diffs))
        return None

    def apply_rule(state: _State, kind: str, payload) -> str:
        psi = state.psi
        state.steps += 1
        if kind == "1.0":
            if isinstance(psi[payload], Diseq):
                return "closed"
            del psi[payload]
        elif kind == "1.i":
            i, j = payload
            psi[i] = orient(VarEq(psi[i].rhs, psi[j].rhs))
        elif kind == "1.ii":
            lit = psi.pop(payload)
            mapping = {lit.lhs.head: lit.rhs}
            psi[:] = [lit_substitute(l, mapping) for l in psi]
        elif kind == "2":
            lit = psi.pop(payload)
            if isinstance(lit, VarEq):
                evar, body = lit.lhs.head, lit.rhs
            else:
                evar, body = lit.rhs.head, lit.lhs
            y = fresh_y(state)
            state.delta.entries.append((y, body))
            mapping = {evar: const(y)}
            psi[:] = [lit_substitute(l, mapping) for l in psi]
        else:  # rule 3
            lit = psi.pop(payload)
            if lit not in state.phi:
                state.phi.append(lit)
        return "open"

    def split(state: _State, payload) -> list:
        i, j, diffs = payload
        state.steps += 1
        succs = []
        s0 = state.copy()
        a, b = s0.psi[i].rhs, s0.psi[j].rhs
        del s0.psi[j]
        if a is not b:
            s0.psi.append(orient(VarEq(a, b)))
        for u, v in diffs:
            eq = orient(VarEq(u, v))
            if eq not in s0.phi:
                s0.phi.append(eq)
        succs.append(s0)
        for u, v in diffs:
            sk = state.copy()
            sk.phi.append(orient(Diseq(u, v)))
            succs.append(sk)
        return succs

    def keep(state: _State) -> bool:
        if prune != "semantic":
            return True
        flat = unravel_constraint(state.delta, Constraint(list(state.phi)))
        return cc_sat(flat.literals)

    def explore(root: _State):
        local = _zero_stats()
        found = []
        stack = [root]
        ticks = 0
        while stack:
            check_time()
            state = stack.pop()
            while True:
                ticks += 1
                if not ticks % 256:
                    check_time()
                redex = find_redex(state)
                if redex is None:
                    local["branches_explored"] += 1
                    local["max_branch_steps"] = max(local["max_branch_steps"], state.steps)
                    if local["branches_explored"] > max_branches:
                        raise ResourceLimitError("branch limit exceeded", local)
                    if keep(state):
                        found.append(Disjunct(state.delta, list(state.phi)))
                    break
                kind, payload = redex
                if kind == "4":
                    local["rule_apps"]["4"] += 1
                    local["rule4_firings"] += 1
                    for succ in reversed(split(state, payload)):
                        stack.append(succ)
                    break
                local["rule_apps"][kind] += 1
                if apply_rule(state, kind, payload) == "closed":
                    local["branches_explored"] += 1
                    local["max_branch_steps"] = max(local["max_branch_steps"], state.steps)
                    if local["branches_explored"] > max_branches:
                        raise ResourceLimitError("branch limit exceeded", local)
                    break
        return found, local

    root = _State(pre.initial_delta.copy(), list(pre.s1), list(pre.passthrough.literals), 1)
    disjuncts: list[Disjunct] = []

    if jobs > 1:
        # Advance the root to its first split, then explore subtrees in a pool.
        prefix_succs = None
        while True:
            check_time()
            redex = find_redex(root)
            if redex is None:
                break
            kind, payload = redex
            if kind == "4":
                stats["rule_apps"]["4"] += 1
                stats["rule4_firings"] += 1
                prefix_succs = split(root, payload)
                break
            stats["rule_apps"][kind] += 1
            if apply_rule(root, kind, payload) == "closed":
                stats["branches_explored"] += 1
                stats["max_branch_steps"] = root.steps
                return UiResultDnf([], stats)
        if prefix_succs is None:
            jobs = 1  # single chain, nothing to parallelize
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(explore, prefix_succs))
            for found, local in results:
                disjuncts.extend(found)
                _merge_stats(stats, local)
            if stats["branches_explored"] > max_branches:
                raise ResourceLimitError("branch limit exceeded", stats)

    if jobs == 1:
        found, local = explore(root)
        disjuncts.extend(found)
        _merge_stats(stats, local)

    disjuncts.sort(key=lambda d: format_formula(d.formula()))
    return UiResultDnf(disjuncts, stats)
