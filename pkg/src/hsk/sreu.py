"""Rigid equality constraint problems and the clause conversion pipeline.

A quantifier-free formula is turned into a finite class of problems, each a
conjunction of constraints ``e1 & ... & em -> lhs = rhs``, such that a
substitution for the unknowns solves the formula exactly when it solves at
least one problem of the class.  The three steps: conversion to a
conjunction of clauses, splitting of multi-consequent clauses, and
elimination of predicate symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from . import skeleton as _skeleton
from .syntax import (
    And,
    Atom,
    ContractError,
    Equality,
    Formula,
    FunctionSymbol,
    Implies,
    Not,
    Or,
    PredApp,
    Signature,
    Substitution,
    Unknown,
    conj,
    const,
    disj,
    is_quantifier_free,
    signature_of,
    unknowns_of,
)


@dataclass(frozen=True)
class Clause:
    """antecedent atoms -> consequent atoms (disjunction on the right)."""

    antecedent: tuple[Atom, ...]
    consequent: tuple[Atom, ...]

    def is_horn(self) -> bool:
        return len(self.consequent) == 1

    def is_rigid(self) -> bool:
        return self.is_horn() and all(
            isinstance(a, Equality) for a in self.antecedent + self.consequent
        )

    def predicate_atom_count(self) -> int:
        return sum(
            1 for a in self.antecedent + self.consequent if isinstance(a, PredApp)
        )

    def formula(self) -> Formula:
        body: Formula = disj(self.consequent)
        if self.antecedent:
            return Implies(conj(self.antecedent), body)
        return body


ClauseConjunction = tuple[Clause, ...]


@dataclass(frozen=True)
class RigidConstraint:
    hypotheses: tuple[Equality, ...]
    conclusion: Equality

    def formula(self) -> Formula:
        if self.hypotheses:
            return Implies(conj(self.hypotheses), self.conclusion)
        return self.conclusion


@dataclass(frozen=True)
class SREUProblem:
    constraints: tuple[RigidConstraint, ...]

    def unknowns(self) -> tuple[Unknown, ...]:
        return unknowns_of(self.formula())

    def formula(self) -> Formula:
        if not self.constraints:
            raise ContractError("empty constraint conjunction")
        return conj(c.formula() for c in self.constraints)


# ---------------------------------------------------------------------------
# Step 1: conjunction of clauses


def _cnf(f: Formula, positive: bool) -> list[list[tuple[bool, Atom]]]:
    """Clause list (as signed atom rows) equivalent to f or its negation."""
    if isinstance(f, (Equality, PredApp)):
        return [[(positive, f)]]
    if isinstance(f, Not):
        return _cnf(f.body, not positive)
    if isinstance(f, And):
        if positive:
            return _cnf(f.lhs, True) + _cnf(f.rhs, True)
        return _distribute(_cnf(f.lhs, False), _cnf(f.rhs, False))
    if isinstance(f, Or):
        if positive:
            return _distribute(_cnf(f.lhs, True), _cnf(f.rhs, True))
        return _cnf(f.lhs, False) + _cnf(f.rhs, False)
    if isinstance(f, Implies):
        if positive:
            return _distribute(_cnf(f.lhs, False), _cnf(f.rhs, True))
        return _cnf(f.lhs, True) + _cnf(f.rhs, False)
    raise ContractError("clause conversion requires a quantifier-free formula")


def _distribute(
    left: list[list[tuple[bool, Atom]]], right: list[list[tuple[bool, Atom]]]
) -> list[list[tuple[bool, Atom]]]:
    return [l + r for l in left for r in right]


def to_clause_conjunction(f: Formula) -> list[Clause]:
    """Equivalent conjunction of clauses; distribution keeps the left-to-right
    literal order, and a clause without positive atoms gets the consequent
    ``c#i = d#i`` over two new distinct constants."""
    if not is_quantifier_free(f):
        raise ContractError("clause conversion requires a quantifier-free formula")
    clauses: list[Clause] = []
    fresh = 0
    for row in _cnf(f, True):
        antecedent = tuple(atom for sign, atom in row if not sign)
        consequent = tuple(atom for sign, atom in row if sign)
        if not consequent:
            fresh += 1
            consequent = (
                Equality(
                    const(FunctionSymbol(f"c#{fresh}", 0)),
                    const(FunctionSymbol(f"d#{fresh}", 0)),
                ),
            )
        clauses.append(Clause(antecedent, consequent))
    return clauses


# ---------------------------------------------------------------------------
# Step 2: splitting to Horn clauses


def _dedupe(formulas: list[ClauseConjunction]) -> list[ClauseConjunction]:
    seen: set[ClauseConjunction] = set()
    out: list[ClauseConjunction] = []
    for f in formulas:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def horn_split(gamma: Sequence[Sequence[Clause]]) -> list[ClauseConjunction]:
    """Replace every clause with m > 1 consequent atoms by m alternatives,
    iterated to a fixpoint; the class stays solution equivalent."""

    def split(clauses: ClauseConjunction) -> list[ClauseConjunction]:
        for i, c in enumerate(clauses):
            if not c.is_horn():
                if not c.consequent:
                    raise ContractError("clause with empty consequent")
                out: list[ClauseConjunction] = []
                for atom in c.consequent:
                    alternative = clauses[:i] + (Clause(c.antecedent, (atom,)),) + clauses[i + 1:]
                    out.extend(split(alternative))
                return out
        return [clauses]

    out: list[ClauseConjunction] = []
    for clauses in gamma:
        out.extend(split(tuple(clauses)))
    return _dedupe(out)


# ---------------------------------------------------------------------------
# Step 3: elimination of predicate symbols


def _pred_counts(clauses: ClauseConjunction) -> tuple[int, ...]:
    return tuple(sorted(c.predicate_atom_count() for c in clauses))


def _multiset_lt(smaller: tuple[int, ...], larger: tuple[int, ...]) -> bool:
    """Dershowitz-Manna ordering on multisets of naturals."""
    if smaller == larger:
        return False
    removed = list(larger)
    added = list(smaller)
    for x in list(added):
        if x in removed:
            removed.remove(x)
            added.remove(x)
    return all(any(x < y for y in removed) for x in added)


def _eliminate_step(clauses: ClauseConjunction) -> list[ClauseConjunction] | None:
    """One rewrite on the leftmost clause carrying a predicate atom.

    Returns None to delete the formula (an unmatched predicate consequent
    can always be falsified), otherwise the replacement alternatives.
    """
    for i, c in enumerate(clauses):
        if c.predicate_atom_count() == 0:
            continue
        consequent = c.consequent[0]
        if isinstance(consequent, PredApp):
            if not any(
                isinstance(a, PredApp) and a.symbol == consequent.symbol
                for a in c.antecedent
            ):
                return None
            j, atom = next(
                (j, a) for j, a in enumerate(c.antecedent) if isinstance(a, PredApp)
            )
            rest = c.antecedent[:j] + c.antecedent[j + 1:]
            if atom.symbol != consequent.symbol:
                replacement = (Clause(rest, c.consequent),)
                return [clauses[:i] + replacement + clauses[i + 1:]]
            # same predicate: either the arguments agree pairwise, or the
            # clause holds without this hypothesis
            equalities = tuple(
                Clause(rest, (Equality(b, a),))
                for b, a in zip(atom.args, consequent.args)
            )
            dropped = (Clause(rest, c.consequent),)
            return [
                clauses[:i] + equalities + clauses[i + 1:],
                clauses[:i] + dropped + clauses[i + 1:],
            ]
        # identity consequent with predicate hypotheses: such hypotheses
        # never constrain equational validity, drop the leftmost one
        j, _ = next((j, a) for j, a in enumerate(c.antecedent) if isinstance(a, PredApp))
        rest = c.antecedent[:j] + c.antecedent[j + 1:]
        return [clauses[:i] + (Clause(rest, c.consequent),) + clauses[i + 1:]]
    return [clauses]


def eliminate_predicates(gamma: Sequence[Sequence[Clause]]) -> list[SREUProblem]:
    """Rewrite Horn-clause conjunctions until only identity constraints
    remain; unsolvable branches are deleted, alternatives keep their order."""

    def process(clauses: ClauseConjunction) -> Iterator[ClauseConjunction]:
        if all(c.is_rigid() for c in clauses):
            yield clauses
            return
        before = _pred_counts(clauses)
        replacements = _eliminate_step(clauses)
        if replacements is None:
            return
        for replacement in replacements:
            assert _multiset_lt(_pred_counts(replacement), before), "measure must drop"
            yield from process(replacement)

    results: list[ClauseConjunction] = []
    for clauses in gamma:
        clauses = tuple(clauses)
        if not all(c.is_horn() for c in clauses):
            raise ContractError("predicate elimination needs Horn clauses")
        results.extend(process(clauses))
    problems = []
    for clauses in _dedupe(results):
        if not clauses:
            # every clause was eliminated as valid: anything solves this
            problems.append(SREUProblem((_trivial_constraint(),)))
            continue
        problems.append(
            SREUProblem(
                tuple(
                    RigidConstraint(
                        tuple(c.antecedent), c.consequent[0]  # type: ignore[arg-type]
                    )
                    for c in clauses
                )
            )
        )
    return problems


def _trivial_constraint() -> RigidConstraint:
    c = const(FunctionSymbol("c#0", 0))
    return RigidConstraint((), Equality(c, c))


def convert_to_sreu(f: Formula) -> list[SREUProblem]:
    """Compose the three steps; the resulting class is solution equivalent
    to f.  Formulas with no clauses left (f propositionally valid) yield a
    single trivially solvable problem."""
    clauses = to_clause_conjunction(f)
    if not clauses:
        return [SREUProblem((_trivial_constraint(),))]
    return eliminate_predicates(horn_split([clauses]))


def solve_sreu_bounded(
    problem: SREUProblem, sig: Signature | None = None, max_size: int = 6
) -> Substitution | None:
    """First substitution solving all constraints, in the deterministic
    search order of the bounded skeleton solver."""
    formula = problem.formula()
    if sig is None:
        sig = signature_of(formula)
    for solution in _skeleton.iter_formula_solutions(
        formula, problem.unknowns(), sig, max_size
    ):
        return solution
    return None
