"""Shared helpers: tiny signature factory and randomized instance builders."""
from __future__ import annotations

import random

from eufui import terms
from eufui.parse import Problem
from eufui.terms import Constraint, Eq, Ne, const, intern, mk_symbol


class Sig:
    """Convenience factory for one test's symbols; attribute access by name."""

    def __init__(self):
        self.by_name = {}

    def fn(self, name, arity):
        sym = mk_symbol(name, arity, "function")
        self.by_name[name] = sym
        return sym

    def consts(self, kind, *names):
        syms = [mk_symbol(n, 0, kind) for n in names]
        self.by_name.update(zip(names, syms))
        return [const(s) for s in syms]

    def params(self, *names):
        return self.consts("parameter", *names)

    def evars(self, *names):
        return self.consts("quantified", *names)


def random_flat_instance(rng: random.Random, nconsts=5, nfuns=2, max_arity=2, nlits=8):
    """Flat ground literals over constants: app=const, app!=const, const(!)=const."""
    consts = [const(mk_symbol(f"c{i}", 0, "parameter")) for i in range(nconsts)]
    fns = [mk_symbol(f"F{i}", rng.randint(1, max_arity), "function") for i in range(nfuns)]
    lits = []
    for _ in range(nlits):
        if rng.random() < 0.55:
            f = rng.choice(fns)
            lhs = intern(f, tuple(rng.choice(consts) for _ in range(f.arity)))
        else:
            lhs = rng.choice(consts)
        rhs = rng.choice(consts)
        lits.append(Eq(lhs, rhs) if rng.random() < 0.6 else Ne(lhs, rhs))
    return consts, fns, lits


def random_problem(rng: random.Random, max_funs=3, max_params=5, max_evars=3, max_lits=6, max_depth=2) -> Problem:
    """Random nested-term elimination problem for end-to-end exercises."""
    funs = [mk_symbol(f"f{i + 1}", rng.randint(1, 2), "function") for i in range(rng.randint(1, max_funs))]
    params = [mk_symbol(f"z{i}", 0, "parameter") for i in range(rng.randint(1, max_params))]
    evars = [mk_symbol(f"e{i}", 0, "quantified") for i in range(rng.randint(1, max_evars))]
    leaves = [const(s) for s in params + evars]

    def term(depth):
        if depth == 0 or rng.random() < 0.35:
            return rng.choice(leaves)
        f = rng.choice(funs)
        return intern(f, tuple(term(depth - 1) for _ in range(f.arity)))

    lits = []
    for _ in range(rng.randint(1, max_lits)):
        lhs, rhs = term(max_depth), term(max_depth)
        lits.append(Ne(lhs, rhs) if rng.random() < 0.2 else Eq(lhs, rhs))
    symbols = {s.name: s for s in funs + params + evars}
    return Problem("U", funs, params, evars, Constraint(lits), symbols)


def iter_partitions(items):
    """All set partitions of items (lists of lists)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in iter_partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [p[i] + [first]] + p[i + 1 :]
        yield p + [[first]]


def brute_force_sat(consts, lits) -> bool:
    """Partition-enumeration EUF satisfiability for flat literals.

    Functions are partial maps over class tuples, completed freely; a model
    may always use elements outside the named classes, so an application
    with no required value only has to avoid its forbidden values.
    """
    ids = [c.id for c in consts]
    for part in iter_partitions(ids):
        cls = {}
        for k, block in enumerate(part):
            for i in block:
                cls[i] = k
        required = {}
        forbidden = {}
        ok = True
        for lit in lits:
            lhs, rhs = lit.lhs, lit.rhs
            if lhs.args:
                key = (lhs.head.uid, tuple(cls[a.id] for a in lhs.args))
                val = cls[rhs.id]
                if isinstance(lit, Eq):
                    if required.setdefault(key, val) != val:
                        ok = False
                        break
                else:
                    forbidden.setdefault(key, set()).add(val)
            else:
                same = cls[lhs.id] == cls[rhs.id]
                if same != isinstance(lit, Eq):
                    ok = False
                    break
        if ok:
            for key, val in required.items():
                if val in forbidden.get(key, ()):
                    ok = False
                    break
        if ok:
            return True
    return False
