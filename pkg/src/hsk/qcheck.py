"""Validity of ground quantifier-free formulas with identity.

A formula is valid exactly when its negation has no model, and for ground
formulas modulo uninterpreted functions/predicates that is decidable by
congruence closure: we search for a propositionally consistent way to
falsify the formula whose literal set is satisfiable modulo the identity
axioms (reflexivity, symmetry, transitivity, function and predicate
congruence).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .syntax import (
    And,
    Application,
    Atom,
    ContractError,
    Equality,
    Formula,
    Implies,
    Not,
    Or,
    PredApp,
    Term,
    Variable,
    canonical_key,
    is_quantifier_free,
    subterms,
)


class DomainError(ValueError):
    """A term fell outside the universe handed to the closure."""


@dataclass(frozen=True)
class Literal:
    positive: bool
    atom: Atom


# ---------------------------------------------------------------------------
# Union-find congruence closure


class CongruenceEngine:
    """Congruence closure over a fixed subterm-closed universe."""

    def __init__(self, universe: Iterable[Term]):
        self.ids: dict[Term, int] = {}
        self.terms: list[Term] = []
        self.parent: list[int] = []
        self.uses: list[list[int]] = []  # ids of applications using this id
        for t in universe:
            self._add(t)
        self.sig: dict[tuple, int] = {}
        for i, t in enumerate(self.terms):
            if isinstance(t, Application) and t.args:
                self._index_signature(i, t)

    def _add(self, t: Term) -> int:
        known = self.ids.get(t)
        if known is not None:
            return known
        if isinstance(t, Variable):
            raise ContractError("congruence closure requires ground terms")
        arg_ids = []
        if isinstance(t, Application):
            arg_ids = [self._add(a) for a in t.args]
        tid = len(self.terms)
        self.ids[t] = tid
        self.terms.append(t)
        self.parent.append(tid)
        self.uses.append([])
        for aid in arg_ids:
            self.uses[aid].append(tid)
        return tid

    def contains(self, t: Term) -> bool:
        return t in self.ids

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def _signature(self, t: Application) -> tuple:
        return (t.symbol, tuple(self.find(self.ids[a]) for a in t.args))

    def _index_signature(self, tid: int, t: Application) -> int | None:
        """Record t's signature; return a congruent id on collision."""
        key = self._signature(t)
        other = self.sig.get(key)
        if other is None:
            self.sig[key] = tid
            return None
        return other

    def merge(self, a: Term, b: Term) -> None:
        try:
            pending = [(self.ids[a], self.ids[b])]
        except KeyError as missing:
            raise DomainError(f"term outside universe: {missing.args[0]}") from None
        while pending:
            i, j = pending.pop()
            ri, rj = self.find(i), self.find(j)
            if ri == rj:
                continue
            # keep the use lists balanced
            if len(self.uses[ri]) < len(self.uses[rj]):
                ri, rj = rj, ri
            self.parent[rj] = ri
            moved = self.uses[rj]
            self.uses[ri].extend(moved)
            self.uses[rj] = []
            for uid in moved:
                user = self.terms[uid]
                assert isinstance(user, Application)
                other = self._index_signature(uid, user)
                if other is not None and self.find(other) != self.find(uid):
                    pending.append((other, uid))

    def same(self, a: Term, b: Term) -> bool:
        try:
            return self.find(self.ids[a]) == self.find(self.ids[b])
        except KeyError as missing:
            raise DomainError(f"term outside universe: {missing.args[0]}") from None

    def classes(self) -> list[list[Term]]:
        grouped: dict[int, list[Term]] = {}
        for i, t in enumerate(self.terms):
            grouped.setdefault(self.find(i), []).append(t)
        return list(grouped.values())


def subterm_closure(terms: Iterable[Term]) -> set[Term]:
    out: set[Term] = set()
    for t in terms:
        out.update(subterms(t))
    return out


@dataclass(frozen=True)
class CongruencePartition:
    universe: frozenset[Term]
    classes: tuple[frozenset[Term], ...]

    def class_of(self, t: Term) -> frozenset[Term]:
        for cls in self.classes:
            if t in cls:
                return cls
        raise DomainError(f"term outside universe: {t}")

    def same_class(self, a: Term, b: Term) -> bool:
        return self.class_of(a) is self.class_of(b)


def congruence_close(
    equalities: Sequence[tuple[Term, Term]], universe: Iterable[Term]
) -> CongruencePartition:
    """Smallest congruence over `universe` containing `equalities`.

    The universe must be subterm closed and contain both sides of every
    equality; violations raise DomainError.
    """
    universe_set = set(universe)
    for t in universe_set:
        if isinstance(t, Application):
            for a in t.args:
                if a not in universe_set:
                    raise DomainError(f"universe not subterm closed at {a}")
    closure = CongruenceEngine(universe_set)
    for lhs, rhs in equalities:
        closure.merge(lhs, rhs)
    classes = sorted(
        (sorted(cls, key=canonical_key) for cls in closure.classes()),
        key=lambda cls: canonical_key(cls[0]),
    )
    return CongruencePartition(
        frozenset(universe_set), tuple(frozenset(cls) for cls in classes)
    )


# ---------------------------------------------------------------------------
# Satisfiability of ground literal sets


def _check_ground_atom(atom: Atom) -> None:
    sides = (atom.lhs, atom.rhs) if isinstance(atom, Equality) else atom.args
    for t in sides:
        for sub in subterms(t):
            if isinstance(sub, Variable):
                raise ContractError(f"literal is not ground: {atom}")


def e_satisfiable(literals: Sequence[Literal]) -> bool:
    """Does some structure satisfy all the ground literals?

    Positive equalities are closed under the identity axioms; the set is
    unsatisfiable exactly when a negated equality joins one class or a
    predicate occurs positively and negatively on congruent argument
    tuples.
    """
    leaves: list[Term] = []
    for lit in literals:
        _check_ground_atom(lit.atom)
        if isinstance(lit.atom, Equality):
            leaves.extend((lit.atom.lhs, lit.atom.rhs))
        else:
            leaves.extend(lit.atom.args)
    closure = CongruenceEngine(subterm_closure(leaves))
    for lit in literals:
        if lit.positive and isinstance(lit.atom, Equality):
            closure.merge(lit.atom.lhs, lit.atom.rhs)
    for lit in literals:
        if not lit.positive and isinstance(lit.atom, Equality):
            if closure.same(lit.atom.lhs, lit.atom.rhs):
                return False
    positives = [lit.atom for lit in literals if lit.positive and isinstance(lit.atom, PredApp)]
    negatives = [lit.atom for lit in literals if not lit.positive and isinstance(lit.atom, PredApp)]
    for pos in positives:
        for neg in negatives:
            if pos.symbol != neg.symbol:
                continue
            if all(closure.same(a, b) for a, b in zip(pos.args, neg.args)):
                return False
    return True


# ---------------------------------------------------------------------------
# The decision procedure


def falsifying_literals(f: Formula) -> dict[Atom, bool] | None:
    """A satisfiable truth assignment (partial, as literals) making f false.

    Returns None when no structure falsifies f, i.e. when f is valid.
    The search walks the propositional structure, accumulating forced
    literals and branching where falsification allows a choice; complete
    branches are checked with `e_satisfiable`.
    """
    if not is_quantifier_free(f):
        raise ContractError("input must be quantifier-free")
    checked: dict[frozenset, bool] = {}

    def leaf_ok(lits: dict[Atom, bool]) -> bool:
        key = frozenset(lits.items())
        hit = checked.get(key)
        if hit is None:
            hit = e_satisfiable([Literal(v, a) for a, v in lits.items()])
            checked[key] = hit
        return hit

    def search(goals: list[tuple[Formula, bool]], lits: dict[Atom, bool]) -> dict[Atom, bool] | None:
        if not goals:
            return dict(lits) if leaf_ok(lits) else None
        g, want = goals[0]
        rest = goals[1:]
        if isinstance(g, (Equality, PredApp)):
            _check_ground_atom(g)
            seen = lits.get(g)
            if seen is not None:
                return search(rest, lits) if seen == want else None
            lits[g] = want
            found = search(rest, lits)
            if found is None:
                del lits[g]
            return found
        if isinstance(g, Not):
            return search([(g.body, not want)] + rest, lits)
        if isinstance(g, And):
            if want:
                return search([(g.lhs, True), (g.rhs, True)] + rest, lits)
            return (search([(g.lhs, False)] + rest, lits)
                    or search([(g.rhs, False)] + rest, lits))
        if isinstance(g, Or):
            if want:
                return (search([(g.lhs, True)] + rest, lits)
                        or search([(g.rhs, True)] + rest, lits))
            return search([(g.lhs, False), (g.rhs, False)] + rest, lits)
        if isinstance(g, Implies):
            if want:
                return (search([(g.lhs, False)] + rest, lits)
                        or search([(g.rhs, True)] + rest, lits))
            return search([(g.lhs, True), (g.rhs, False)] + rest, lits)
        raise ContractError(f"not a formula: {g!r}")

    return search([(f, False)], {})


_VERDICTS: dict[Formula, bool] = {}
_VERDICT_CACHE_LIMIT = 1 << 20


def is_quasitautology(f: Formula) -> bool:
    """True when the ground quantifier-free formula f holds in every structure."""
    verdict = _VERDICTS.get(f)
    if verdict is None:
        verdict = falsifying_literals(f) is None
        if len(_VERDICTS) >= _VERDICT_CACHE_LIMIT:
            _VERDICTS.clear()
        _VERDICTS[f] = verdict
    return verdict
