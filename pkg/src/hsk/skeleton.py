"""Existential formulas, skeletons, and bounded brute-force solving.

The solver enumerates candidate tuples in a fixed canonical order (total
size first, then component-wise term order) so results are reproducible.
Conjuncts of the target formula that constrain a single unknown through a
chain of ground equality hypotheses are used to narrow that unknown's
candidate stream to the matching congruence class, which keeps searches
with large bounds tractable; every reported witness is still verified
against the whole formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from . import qcheck
from .syntax import (
    Application,
    ContractError,
    Equality,
    Formula,
    FunctionSymbol,
    Implies,
    Signature,
    Substitution,
    Term,
    Unknown,
    Variable,
    canonical_key,
    disj,
    flatten_and,
    free_variables,
    is_quantifier_free,
    is_solution_eligible,
    signature_of,
    substitute,
    unknowns_of,
)

Solution = Substitution


@dataclass(frozen=True)
class ExistentialFormula:
    """exists x1 ... xk . matrix, with a quantifier-free matrix."""

    bound_vars: tuple[Variable, ...]
    matrix: Formula

    def __post_init__(self) -> None:
        if not is_quantifier_free(self.matrix):
            raise ContractError("matrix must be quantifier-free")
        if unknowns_of(self.matrix):
            raise ContractError("matrix must not contain unknowns")
        if len(set(self.bound_vars)) != len(self.bound_vars):
            raise ContractError("bound variables must be distinct")
        free = set(free_variables(self.matrix))
        if not free <= set(self.bound_vars):
            raise ContractError("matrix has variables outside the bound tuple")


def existential_of(f: Formula) -> ExistentialFormula:
    """Peel the leading exists-prefix of a closed formula."""
    from .syntax import Exists

    bound: list[Variable] = []
    while isinstance(f, Exists):
        bound.append(f.var)
        f = f.body
    return ExistentialFormula(tuple(bound), f)


@dataclass(frozen=True)
class Skeleton:
    source: ExistentialFormula
    n: int
    unknown_tuples: tuple[tuple[Unknown, ...], ...]
    formula: Formula

    def all_unknowns(self) -> tuple[Unknown, ...]:
        return tuple(u for tup in self.unknown_tuples for u in tup)


def make_skeleton(psi: ExistentialFormula, n: int) -> Skeleton:
    """The disjunction of n matrix copies over disjoint fresh unknown tuples.

    Unknowns are numbered 1.. in tuple order, so the result is a pure
    function of (psi, n).
    """
    if n < 1:
        raise ContractError("skeleton size must be >= 1")
    width = len(psi.bound_vars)
    tuples = []
    disjuncts = []
    counter = itertools.count(1)
    for _ in range(n):
        fresh = tuple(Unknown(next(counter)) for _ in range(width))
        tuples.append(fresh)
        sigma = Substitution(dict(zip(psi.bound_vars, fresh)))
        disjuncts.append(substitute(psi.matrix, sigma))
    return Skeleton(psi, n, tuple(tuples), disj(disjuncts))


def verify_solution(sk: Skeleton, sol: Solution) -> bool:
    """Substitute and decide validity; the assignment must cover exactly
    the skeleton's unknowns with variable- and unknown-free terms."""
    needed = set(sk.all_unknowns())
    if sol.domain() != needed:
        raise ContractError("assignment does not match the skeleton's unknowns")
    if not sol.is_solution():
        raise ContractError("assignment maps to non-ground terms")
    return qcheck.is_quasitautology(substitute(sk.formula, sol))


# ---------------------------------------------------------------------------
# Term enumeration


_INJECTED_CONSTANT = FunctionSymbol("c#0", 0)


def _sorted_symbols(sig: Signature) -> list[FunctionSymbol]:
    return sorted(sig.function_symbols, key=lambda f: (f.name, f.arity))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ways to write total as an ordered sum of `parts` positive ints."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for head in range(1, total - parts + 2):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _terms_by_size(sig: Signature, max_size: int) -> list[list[Term]]:
    """buckets[n] = all solution-eligible terms over sig of size n, sorted."""
    symbols = _sorted_symbols(sig)
    if not any(f.arity == 0 for f in symbols):
        symbols = sorted(symbols + [_INJECTED_CONSTANT], key=lambda f: (f.name, f.arity))
    buckets: list[list[Term]] = [[] for _ in range(max_size + 1)]
    for n in range(1, max_size + 1):
        batch: list[Term] = []
        for symbol in symbols:
            if symbol.arity == 0:
                if n == 1:
                    batch.append(Application(symbol, ()))
                continue
            for shape in _compositions(n - 1, symbol.arity):
                for args in itertools.product(*(buckets[s] for s in shape)):
                    batch.append(Application(symbol, args))
        batch.sort(key=canonical_key)
        buckets[n] = batch
    return buckets


def enumerate_terms(sig: Signature, max_size: int) -> Iterator[Term]:
    """All variable- and unknown-free terms over sig with size <= max_size,
    in canonical order, without duplicates.

    A signature without constants gets one fresh constant injected so the
    stream is never vacuously empty.
    """
    for bucket in _terms_by_size(sig, max_size):
        yield from bucket


# ---------------------------------------------------------------------------
# Candidate streams from single-unknown equality constraints


def _peel_implication(f: Formula) -> tuple[list[Formula], Formula]:
    hypotheses: list[Formula] = []
    while isinstance(f, Implies):
        hypotheses.extend(flatten_and(f.lhs))
        f = f.rhs
    return hypotheses, f


def _unary_constraint(conjunct: Formula, u: Unknown) -> tuple[tuple[tuple[Term, Term], ...], Term] | None:
    """Match `hyps -> s = u` (or `u = s`) with solution-eligible hyps and s."""
    hypotheses, conclusion = _peel_implication(conjunct)
    if not isinstance(conclusion, Equality):
        return None
    parts: list[tuple[Term, Term]] = []
    for h in hypotheses:
        if not isinstance(h, Equality):
            return None
        if not (is_solution_eligible(h.lhs) and is_solution_eligible(h.rhs)):
            return None
        parts.append((h.lhs, h.rhs))
    for target, slot in ((conclusion.lhs, conclusion.rhs), (conclusion.rhs, conclusion.lhs)):
        if slot == u and is_solution_eligible(target):
            return (tuple(parts), target)
    return None


@lru_cache(maxsize=None)
def _class_member_buckets(
    equalities: tuple[tuple[Term, Term], ...],
    target: Term,
    sig: Signature,
    max_size: int,
) -> tuple[tuple[Term, ...], ...]:
    """buckets[n] = terms t over sig of size n with `equalities -> target = t`
    valid, i.e. the members of target's congruence class, smallest first.

    The classes of the (finite) subterm universe act as automaton states:
    an application belongs to a universe class exactly when some universe
    application with the same symbol and argument classes does.
    """
    leaves = [target]
    for lhs, rhs in equalities:
        leaves.extend((lhs, rhs))
    universe = qcheck.subterm_closure(leaves)
    closure = qcheck.CongruenceEngine(universe)
    for lhs, rhs in equalities:
        closure.merge(lhs, rhs)

    def root_of(t: Term) -> int:
        return closure.find(closure.ids[t])

    transitions: dict[tuple, int] = {}
    for t in universe:
        if isinstance(t, Application):
            key = (t.symbol, tuple(root_of(a) for a in t.args))
            transitions[key] = root_of(t)

    symbols = _sorted_symbols(sig)
    target_root = root_of(target)
    # sized[n][cls] = universe-class members of size n built over sig
    sized: list[dict[int, list[Term]]] = [dict() for _ in range(max_size + 1)]
    for n in range(1, max_size + 1):
        fresh = sized[n]
        for symbol in symbols:
            if symbol.arity == 0:
                if n != 1:
                    continue
                cls = transitions.get((symbol, ()))
                if cls is not None:
                    fresh.setdefault(cls, []).append(Application(symbol, ()))
                continue
            for shape in _compositions(n - 1, symbol.arity):
                pools = [
                    [(cls, term) for cls, terms in sized[s].items() for term in terms]
                    for s in shape
                ]
                for combo in itertools.product(*pools):
                    key = (symbol, tuple(cls for cls, _ in combo))
                    cls = transitions.get(key)
                    if cls is not None:
                        fresh.setdefault(cls, []).append(
                            Application(symbol, tuple(term for _, term in combo))
                        )
        for terms in fresh.values():
            terms.sort(key=canonical_key)
    return tuple(
        tuple(sized[n].get(target_root, ())) for n in range(max_size + 1)
    )


# ---------------------------------------------------------------------------
# Bounded search


def _candidate_buckets(
    conjuncts: list[Formula],
    unknowns: tuple[Unknown, ...],
    sig: Signature,
    max_size: int,
) -> tuple[list[list[list[Term]]], set[int]] | None:
    """Per-unknown size buckets, narrowed by matching unary constraints.

    Returns the buckets plus the indices of conjuncts consumed as stream
    constraints (their validity is guaranteed for stream members), or None
    when some unknown-free conjunct is already invalid.
    """
    for c in conjuncts:
        if not unknowns_of(c) and not free_variables(c):
            if not qcheck.is_quasitautology(c):
                return None
    default: list[list[Term]] | None = None
    per_unknown: list[list[list[Term]]] = []
    consumed: set[int] = set()
    for u in unknowns:
        constraint = None
        for idx, c in enumerate(conjuncts):
            if idx not in consumed and unknowns_of(c) == [u]:
                constraint = _unary_constraint(c, u)
                if constraint is not None:
                    consumed.add(idx)
                    break
        if constraint is not None:
            eqs, target = constraint
            buckets = [list(b) for b in _class_member_buckets(eqs, target, sig, max_size)]
        else:
            if default is None:
                default = _terms_by_size(sig, max_size)
            buckets = default
        per_unknown.append(buckets)
    return per_unknown, consumed


def iter_formula_solutions(
    formula: Formula,
    unknowns: Sequence[Unknown],
    sig: Signature | None = None,
    max_size: int = 6,
) -> Iterator[Solution]:
    """Solutions for the given unknown tuple in canonical order.

    Order: smallest total size first, then lexicographically by the
    canonical term order along the tuple.
    """
    unknowns = tuple(unknowns)
    if sig is None:
        sig = signature_of(formula)
    if not unknowns:
        if qcheck.is_quasitautology(formula):
            yield Substitution({})
        return
    conjuncts = flatten_and(formula)
    narrowed = _candidate_buckets(conjuncts, unknowns, sig, max_size)
    if narrowed is None:
        return
    per_unknown, consumed = narrowed

    position = {u: i for i, u in enumerate(unknowns)}
    checks_at_depth: list[list[tuple[Formula, tuple[Unknown, ...]]]] = [
        [] for _ in unknowns
    ]
    for idx, c in enumerate(conjuncts):
        if idx in consumed:
            continue
        used = unknowns_of(c)
        if used and all(u in position for u in used):
            checks_at_depth[max(position[u] for u in used)].append((c, tuple(used)))

    min_size: list[int] = []
    max_of: list[int] = []
    for buckets in per_unknown:
        sizes = [n for n, b in enumerate(buckets) if b]
        if not sizes:
            return
        min_size.append(sizes[0])
        max_of.append(sizes[-1])
    suffix_min = [0] * (len(unknowns) + 1)
    suffix_max = [0] * (len(unknowns) + 1)
    for i in range(len(unknowns) - 1, -1, -1):
        suffix_min[i] = suffix_min[i + 1] + min_size[i]
        suffix_max[i] = suffix_max[i + 1] + max_of[i]

    assignment: dict[Unknown, Term] = {}
    check_memo: dict[tuple, bool] = {}

    def prune_fails(depth: int) -> bool:
        for index, (c, used) in enumerate(checks_at_depth[depth]):
            key = (depth, index, tuple(assignment[u] for u in used))
            verdict = check_memo.get(key)
            if verdict is None:
                verdict = qcheck.is_quasitautology(substitute(c, Substitution(assignment)))
                check_memo[key] = verdict
            if not verdict:
                return True
        return False

    def dfs(depth: int, budget: int) -> Iterator[Solution]:
        buckets = per_unknown[depth]
        last = depth == len(unknowns) - 1
        low = max(min_size[depth], budget - suffix_max[depth + 1])
        high = min(max_of[depth], budget - suffix_min[depth + 1])
        for n in range(low, high + 1):
            if last and n != budget:
                continue
            for term in buckets[n]:
                assignment[unknowns[depth]] = term
                if not prune_fails(depth):
                    if last:
                        candidate = Substitution(assignment)
                        if qcheck.is_quasitautology(substitute(formula, candidate)):
                            yield candidate
                    else:
                        yield from dfs(depth + 1, budget - n)
                del assignment[unknowns[depth]]

    for total in range(suffix_min[0], suffix_max[0] + 1):
        yield from dfs(0, total)


def iter_solutions(
    sk: Skeleton, sig: Signature | None = None, max_size: int = 6
) -> Iterator[Solution]:
    if sig is None:
        sig = signature_of(sk.formula)
    yield from iter_formula_solutions(sk.formula, sk.all_unknowns(), sig, max_size)


def solve_bounded(
    sk: Skeleton, sig: Signature | None = None, max_size: int = 6
) -> Solution | None:
    """First solution in canonical order with every term of size <= max_size,
    or None when the bounded space is exhausted (which does not imply the
    skeleton is unsolvable)."""
    for solution in iter_solutions(sk, sig, max_size):
        return solution
    return None
