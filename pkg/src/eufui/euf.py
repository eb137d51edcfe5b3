"""Ground EUF decision procedures: congruence closure and validity checks.

cc_sat decides conjunctions of ground (dis)equalities. euf_valid reduces
validity to unsatisfiability and searches the lazy DNF of the query with
closure-based pruning, so only cubes consistent so far are ever expanded;
the cube budget counts cc_sat calls.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ResourceLimitError
from .formulas import And, FFalse, FTrue, Or, expand_lets, mk_and, nnf
from .terms import Eq, Ne, Term

DEFAULT_MAX_CUBES = 1 << 20


class CongruenceState:
    """Union-find over term ids with a signature table and pending merges."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.rank: dict[int, int] = {}
        self.terms: dict[int, Term] = {}
        self.use: dict[int, list[int]] = {}
        self.sig: dict[tuple, int] = {}
        self.sig_key: dict[int, tuple] = {}
        self.pending: deque[tuple[int, int]] = deque()

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def add(self, t: Term) -> int:
        if t.id in self.parent:
            return self.find(t.id)
        self.parent[t.id] = t.id
        self.rank[t.id] = 0
        self.terms[t.id] = t
        if t.args:
            arg_reps = tuple(self.add(a) for a in t.args)
            key = (t.head.uid, arg_reps)
            other = self.sig.get(key)
            if other is not None:
                self.pending.append((t.id, other))
            else:
                self.sig[key] = t.id
                self.sig_key[t.id] = key
            for r in set(arg_reps):
                self.use.setdefault(r, []).append(t.id)
        return self.find(t.id)

    def merge(self, a: Term, b: Term) -> None:
        self.add(a)
        self.add(b)
        self.pending.append((a.id, b.id))

    def close(self) -> None:
        """Drain pending merges until congruence-closed; idempotent."""
        while self.pending:
            i, j = self.pending.popleft()
            ri, rj = self.find(i), self.find(j)
            if ri == rj:
                continue
            if self.rank[ri] > self.rank[rj]:
                ri, rj = rj, ri
            elif self.rank[ri] == self.rank[rj]:
                self.rank[rj] += 1
            self.parent[ri] = rj
            # Re-canonicalize signatures of applications that mention ri.
            for app in self.use.pop(ri, []):
                old = self.sig_key.pop(app, None)
                if old is not None and self.sig.get(old) == app:
                    del self.sig[old]
                arg_reps = tuple(self.find(a.id) for a in self.terms[app].args)
                key = (self.terms[app].head.uid, arg_reps)
                other = self.sig.get(key)
                if other is not None and self.find(other) != self.find(app):
                    self.pending.append((app, other))
                elif other is None:
                    self.sig[key] = app
                    self.sig_key[app] = key
                self.use.setdefault(rj, []).append(app)

    def equal(self, a: Term, b: Term) -> bool:
        self.add(a)
        self.add(b)
        self.close()
        return self.find(a.id) == self.find(b.id)


def cc_sat(literals) -> bool:
    """Satisfiability of a conjunction of ground Eq/Ne literals."""
    state = CongruenceState()
    diseqs = []
    for lit in literals:
        if isinstance(lit, Ne):
            state.add(lit.lhs)
            state.add(lit.rhs)
            diseqs.append(lit)
        else:
            state.merge(lit.lhs, lit.rhs)
    state.close()
    for lit in diseqs:
        if state.find(lit.lhs.id) == state.find(lit.rhs.id):
            return False
    return True


@dataclass
class Budget:
    remaining: int

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise ResourceLimitError("cube budget exceeded in EUF validity check")


def _find_sat_cube(f, budget: Budget):
    """A cc-satisfiable cube of the NNF formula f, or None.

    Literal-branching search: atoms are absorbed into the cube with a
    closure check each time, disjunctions are simplified against the
    current assignment, lone survivors propagate, and branching takes one
    disjunct at a time, learning its complement when a branch fails.
    """

    def norm(g):
        return frozenset((g.lhs.id, g.rhs.id))

    def search(obligations, cube, assign):
        obligations = list(obligations)
        cube = list(cube)
        assign = dict(assign)
        ors = []
        while obligations:
            g = obligations.pop()
            if isinstance(g, And):
                obligations.extend(g.parts)
            elif isinstance(g, Or):
                ors.append(g)
            elif isinstance(g, (Eq, Ne)):
                pos = isinstance(g, Eq)
                if g.lhs is g.rhs:
                    if pos:
                        continue
                    return None
                got = assign.get(norm(g))
                if got is not None:
                    if got is not pos:
                        return None
                    continue
                assign[norm(g)] = pos
                cube.append(g)
                budget.spend()
                if not cc_sat(cube):
                    return None
            elif isinstance(g, FFalse):
                return None
            elif isinstance(g, FTrue):
                continue
            else:
                raise TypeError(f"unexpected node in NNF search: {g!r}")

        pending = []
        units = []
        for g in ors:
            parts = []
            satisfied = False
            for p in g.parts:
                if isinstance(p, (Eq, Ne)):
                    pos = isinstance(p, Eq)
                    if p.lhs is p.rhs:
                        if pos:
                            satisfied = True
                            break
                        continue
                    got = assign.get(norm(p))
                    if got is pos:
                        satisfied = True
                        break
                    if got is None:
                        parts.append(p)
                else:
                    parts.append(p)
            if satisfied:
                continue
            if not parts:
                return None
            if len(parts) == 1:
                units.append(parts[0])
            else:
                pending.append(parts)
        if units:
            return search(units + [Or(tuple(p)) for p in pending], cube, assign)
        if not pending:
            return cube
        pending.sort(key=len)
        parts, rest = pending[0], [Or(tuple(p)) for p in pending[1:]]
        for p in parts:
            res = search(rest + [p], cube, assign)
            if res is not None:
                return res
            if isinstance(p, (Eq, Ne)):
                assign[norm(p)] = isinstance(p, Ne)
                cube.append(Eq(p.lhs, p.rhs) if isinstance(p, Ne) else Ne(p.lhs, p.rhs))
                budget.spend()
                if not cc_sat(cube):
                    return None
        return None

    return search([f], [], {})


def euf_valid(hyp, concl, max_cubes: int = DEFAULT_MAX_CUBES):
    """(True, None) when hyp entails concl in EUF, else (False, witness cube).

    Both formulas are quantifier-free; any variables are read as fresh
    constants. Raises ResourceLimitError when the cube budget runs out.
    """
    query = mk_and([nnf(expand_lets(hyp)), nnf(expand_lets(concl), positive=False)])
    cube = _find_sat_cube(query, Budget(max_cubes))
    if cube is None:
        return True, None
    return False, cube


def euf_equiv(a, b, max_cubes: int = DEFAULT_MAX_CUBES):
    """(True, None) when a and b are EUF-equivalent, else (False, (direction, cube))."""
    ok, cube = euf_valid(a, b, max_cubes)
    if not ok:
        return False, ("forward", cube)
    ok, cube = euf_valid(b, a, max_cubes)
    if not ok:
        return False, ("backward", cube)
    return True, None
