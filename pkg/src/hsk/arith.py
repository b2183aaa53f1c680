"""Quantifier-free simulation of arithmetic over the pairing language.

Diophantine systems (conjunctions of ``a + b = c`` and ``a * b = c`` atoms)
are associated with conjunctions of small implication shapes over the
special constants, one table variable per additive atom and two per
multiplicative atom.  Renamed variants over the indexed languages, the
n-fold variant conjunction, and the numeral-parameterised reduction to
existential formulas are provided, together with the conjunct classifier
feeding the countermodel construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping

from . import qcheck
from .models import Diagnosis, FailureCase
from .skeleton import ExistentialFormula
from .syntax import (
    And,
    Application,
    ContractError,
    Equality,
    Formula,
    FunctionSymbol,
    Implies,
    SpecialBase,
    Substitution,
    Term,
    VarKind,
    Variable,
    conj,
    const,
    is_solution_eligible,
    numeral,
    numeral_of,
    pair,
    special_constant,
    substitute_term,
    succ,
)


def zero(lang: int = 0) -> Term:
    return const(special_constant(SpecialBase.ZERO, lang))


def zero_hat(lang: int = 0) -> Term:
    return const(special_constant(SpecialBase.ZERO_HAT, lang))


def zero_tilde(lang: int = 0) -> Term:
    return const(special_constant(SpecialBase.ZERO_TILDE, lang))


def k_plain(lang: int = 0) -> Term:
    return const(special_constant(SpecialBase.K, lang))


def k_tilde(lang: int = 0) -> Term:
    return const(special_constant(SpecialBase.K_TILDE, lang))


def zero_symbol(lang: int = 0) -> FunctionSymbol:
    return special_constant(SpecialBase.ZERO, lang)


# ---------------------------------------------------------------------------
# Primitive builders


def num(t: Term, lang: int = 0) -> Formula:
    """z = s(z) -> z = t"""
    z = zero(lang)
    return Implies(Equality(z, succ(z)), Equality(z, t))


def num_tilde(t: Term, lang: int = 0) -> Formula:
    """zt = s(zt) -> zt = t"""
    zt = zero_tilde(lang)
    return Implies(Equality(zt, succ(zt)), Equality(zt, t))


def sim(a: Term, b: Term, lang: int = 0) -> Formula:
    """z = zt -> a = b"""
    return Implies(Equality(zero(lang), zero_tilde(lang)), Equality(a, b))


def plus(a: Term, b: Term, c: Term, lang: int = 0) -> Formula:
    """zt = a -> c = b"""
    return Implies(Equality(zero_tilde(lang), a), Equality(c, b))


def add(a: Term, b: Term, c: Term, w: Term, lang: int = 0) -> Formula:
    return conj([num_tilde(w, lang), sim(b, w, lang), plus(a, w, c, lang)])


def tab(t: Term, lang: int = 0) -> Formula:
    """z = s(z) & k = pair(pair(z, z), k) -> k = t"""
    z, kk = zero(lang), k_plain(lang)
    hyp = And(Equality(z, succ(z)), Equality(kk, pair(pair(z, z), kk)))
    return Implies(hyp, Equality(kk, t))


def tab_tilde(t: Term, lang: int = 0) -> Formula:
    """zh = s(zh) & zt = s(zt) & kt = pair(pair(zh, zt), kt) -> kt = t"""
    zh, zt, kt = zero_hat(lang), zero_tilde(lang), k_tilde(lang)
    hyp = conj([
        Equality(zh, succ(zh)),
        Equality(zt, succ(zt)),
        Equality(kt, pair(pair(zh, zt), kt)),
    ])
    return Implies(hyp, Equality(kt, t))


def sim_tilde(a: Term, b: Term, lang: int = 0) -> Formula:
    """z = zh & z = zt & k = kt -> a = b"""
    z = zero(lang)
    hyp = conj([
        Equality(z, zero_hat(lang)),
        Equality(z, zero_tilde(lang)),
        Equality(k_plain(lang), k_tilde(lang)),
    ])
    return Implies(hyp, Equality(a, b))


def tim(x: Term, y: Term, z_arg: Term, w: Term, wt: Term, lang: int = 0) -> Formula:
    """zh = s(z) & zt = x & kt = pair(pair(z, z), k) -> wt = pair(pair(y, z'), w)"""
    z, kk = zero(lang), k_plain(lang)
    hyp = conj([
        Equality(zero_hat(lang), succ(z)),
        Equality(zero_tilde(lang), x),
        Equality(k_tilde(lang), pair(pair(z, z), kk)),
    ])
    return Implies(hyp, Equality(wt, pair(pair(y, z_arg), w)))


def mul(x: Term, y: Term, z_arg: Term, w: Term, wt: Term, lang: int = 0,
        literal_sim: bool = False) -> Formula:
    """Tab(w) & Tab~(wt) & Sim~(w, wt) & Tim(x, y, z, w, wt).

    `literal_sim` swaps the table-similarity conjunct for the plain numeral
    similarity, for comparison experiments; with it the multiplication
    characterisation breaks down (no table pair ever satisfies it).
    """
    similarity = sim(w, wt, lang) if literal_sim else sim_tilde(w, wt, lang)
    return conj([tab(w, lang), tab_tilde(wt, lang), similarity,
                 tim(x, y, z_arg, w, wt, lang)])


# ---------------------------------------------------------------------------
# Semitables


@dataclass(frozen=True)
class Semitable:
    """An exponent-pair list; row (p, q) instantiates to pair(s^p(x), s^q(y))
    and the rows chain right-associatively onto the z slot."""

    rows: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for p, q in self.rows:
            if p < 0 or q < 0:
                raise ContractError("semitable exponents must be naturals")

    def length(self) -> int:
        return len(self.rows)

    def instantiate(self, x: Term, y: Term, z_slot: Term) -> Term:
        out = z_slot
        for p, q in reversed(self.rows):
            row = pair(numeral_term(p, x), numeral_term(q, y))
            out = pair(row, out)
        return out

    def is_mp(self, m: int, p: int) -> bool:
        """Does this semitable record the course of values of m * j for
        j = p-1 down to 0?"""
        return self.rows == tuple((j, m * j) for j in range(p - 1, -1, -1))


def numeral_term(exponent: int, base: Term) -> Term:
    out = base
    for _ in range(exponent):
        out = succ(out)
    return out


def mp_semitable(m: int, p: int) -> Semitable:
    """The unique (m, p)-semitable."""
    if m < 0 or p < 0:
        raise ContractError("table parameters must be naturals")
    return Semitable(tuple((j, m * j) for j in range(p - 1, -1, -1)))


def parse_semitable(t: Term, x: Term, y: Term, z_slot: Term) -> Semitable | None:
    """Recognise t as a semitable instance over (x, y, z_slot)."""
    rows: list[tuple[int, int]] = []
    while t != z_slot:
        if not (isinstance(t, Application) and t.symbol.name == "pair"):
            return None
        row, t = t.args
        if not (isinstance(row, Application) and row.symbol.name == "pair"):
            return None
        p = _strip_numeral(row.args[0], x)
        q = _strip_numeral(row.args[1], y)
        if p is None or q is None:
            return None
        rows.append((p, q))
    return Semitable(tuple(rows))


def _strip_numeral(t: Term, base: Term) -> int | None:
    m = 0
    while t != base:
        if not (isinstance(t, Application) and t.symbol.name == "s"):
            return None
        t = t.args[0]
        m += 1
    return m


# ---------------------------------------------------------------------------
# Diophantine formulas


class DiophKind(Enum):
    ADD = "+"
    MUL = "*"


@dataclass(frozen=True)
class DiophAtom:
    kind: DiophKind
    a: Term
    b: Term
    c: Term

    def __post_init__(self) -> None:
        for t in (self.a, self.b, self.c):
            _check_dioph_argument(t)

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.a, self.b, self.c)


def _check_dioph_argument(t: Term) -> None:
    if isinstance(t, Variable):
        if t.kind is not VarKind.NUMERIC:
            raise ContractError(f"diophantine variables must be numeric (x...): {t}")
        return
    if numeral_of(t, zero_symbol(0)) is None:
        raise ContractError(f"diophantine arguments are variables or numerals: {t}")


@dataclass(frozen=True)
class DiophantineFormula:
    atoms: tuple[DiophAtom, ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ContractError("a diophantine formula needs at least one atom")

    def variables(self) -> tuple[Variable, ...]:
        out: list[Variable] = []
        for atom in self.atoms:
            for t in atom.terms():
                if isinstance(t, Variable) and t not in out:
                    out.append(t)
        return tuple(out)


def eval_diophantine(psi: DiophantineFormula) -> bool:
    """Arithmetic truth of a closed diophantine formula."""
    z0 = zero_symbol(0)
    total = True
    for atom in psi.atoms:
        values = []
        for t in atom.terms():
            m = numeral_of(t, z0) if not isinstance(t, Variable) else None
            if m is None:
                raise ContractError(f"free variable in closed formula: {t}")
            values.append(m)
        a, b, c = values
        total = total and ((a + b == c) if atom.kind is DiophKind.ADD else (a * b == c))
    return total


_DIOPH_LINE = re.compile(
    r"^\s*(?P<a>\S+)\s*(?P<op>[+*])\s*(?P<b>\S+?)\s*=\s*(?P<c>\S+)\s*$"
)
_DIOPH_NUMERAL = re.compile(r"^(?:s\^(?P<exp>[0-9]+)\((?P<base>z)\)|(?P<nat>[0-9]+))$")


def parse_diophantine(text: str) -> DiophantineFormula:
    """Parse a system of lines ``a + b = c`` / ``a * b = c``.

    Numerals are written ``s^k(z)`` or as decimals; anything else names a
    numeric variable (its name must start with ``x``).  Blank lines and
    lines starting with ``#`` are skipped.
    """
    atoms: list[DiophAtom] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _DIOPH_LINE.match(line)
        if m is None:
            raise ContractError(f"line {lineno}: expected 'a + b = c' or 'a * b = c'")
        kind = DiophKind.ADD if m.group("op") == "+" else DiophKind.MUL
        parts = [_parse_dioph_term(m.group(g), lineno) for g in ("a", "b", "c")]
        atoms.append(DiophAtom(kind, *parts))
    if not atoms:
        raise ContractError("empty diophantine system")
    return DiophantineFormula(tuple(atoms))


def _parse_dioph_term(text: str, lineno: int) -> Term:
    m = _DIOPH_NUMERAL.match(text)
    if m is not None:
        exponent = int(m.group("exp") if m.group("exp") is not None else m.group("nat"))
        return numeral(exponent, zero_symbol(0))
    if re.match(r"^x[A-Za-z0-9_]*$", text):
        return Variable(text)
    raise ContractError(
        f"line {lineno}: {text!r} is neither a numeral nor a variable (x...)"
    )


# ---------------------------------------------------------------------------
# The associated conjunctions


class PrimKind(Enum):
    NUM = "num"
    NUM_TILDE = "num~"
    SIM = "sim"
    PLUS = "plus"
    TAB = "tab"
    TAB_TILDE = "tab~"
    SIM_TILDE = "sim~"
    TIM = "tim"


_PRIM_BUILDERS: dict[PrimKind, Callable[..., Formula]] = {
    PrimKind.NUM: num,
    PrimKind.NUM_TILDE: num_tilde,
    PrimKind.SIM: sim,
    PrimKind.PLUS: plus,
    PrimKind.TAB: tab,
    PrimKind.TAB_TILDE: tab_tilde,
    PrimKind.SIM_TILDE: sim_tilde,
    PrimKind.TIM: tim,
}

_CASE_OF_KIND: dict[PrimKind, FailureCase] = {
    PrimKind.NUM: FailureCase.NUM_OR_TAB,
    PrimKind.TAB: FailureCase.NUM_OR_TAB,
    PrimKind.NUM_TILDE: FailureCase.TILDE_NUM_OR_TAB,
    PrimKind.TAB_TILDE: FailureCase.TILDE_NUM_OR_TAB,
    PrimKind.SIM: FailureCase.SIM_OR_SIM_TILDE,
    PrimKind.SIM_TILDE: FailureCase.SIM_OR_SIM_TILDE,
    PrimKind.PLUS: FailureCase.PLUS_OR_TIM,
    PrimKind.TIM: FailureCase.PLUS_OR_TIM,
}


@dataclass(frozen=True)
class Primitive:
    """One implication-shaped conjunct together with its role and arguments."""

    kind: PrimKind
    args: tuple[Term, ...]
    lang: int

    def formula(self) -> Formula:
        return _PRIM_BUILDERS[self.kind](*self.args, lang=self.lang)


@dataclass(frozen=True)
class NumBlock:
    term: Term

    def primitives(self, lang: int) -> tuple[Primitive, ...]:
        return (Primitive(PrimKind.NUM, (self.term,), lang),)

    def formula(self, lang: int) -> Formula:
        return num(self.term, lang)


@dataclass(frozen=True)
class AddBlock:
    a: Term
    b: Term
    c: Term
    w: Variable

    def primitives(self, lang: int) -> tuple[Primitive, ...]:
        return (
            Primitive(PrimKind.NUM_TILDE, (self.w,), lang),
            Primitive(PrimKind.SIM, (self.b, self.w), lang),
            Primitive(PrimKind.PLUS, (self.a, self.w, self.c), lang),
        )

    def formula(self, lang: int) -> Formula:
        return add(self.a, self.b, self.c, self.w, lang)


@dataclass(frozen=True)
class MulBlock:
    a: Term
    b: Term
    c: Term
    w1: Variable
    w2: Variable
    literal_sim: bool = False

    def primitives(self, lang: int) -> tuple[Primitive, ...]:
        similarity = PrimKind.SIM if self.literal_sim else PrimKind.SIM_TILDE
        return (
            Primitive(PrimKind.TAB, (self.w1,), lang),
            Primitive(PrimKind.TAB_TILDE, (self.w2,), lang),
            Primitive(similarity, (self.w1, self.w2), lang),
            Primitive(PrimKind.TIM, (self.a, self.b, self.c, self.w1, self.w2), lang),
        )

    def formula(self, lang: int) -> Formula:
        return mul(self.a, self.b, self.c, self.w1, self.w2, lang,
                   literal_sim=self.literal_sim)


Block = NumBlock | AddBlock | MulBlock


@dataclass(frozen=True)
class PCArithFormula:
    """A conjunction of Num/Add/Mul blocks over one language."""

    blocks: tuple[Block, ...]
    language_index: int = 0

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ContractError("empty block conjunction")
        covered = {
            b.term for b in self.blocks
            if isinstance(b, NumBlock) and isinstance(b.term, Variable)
        }
        for v in self.numeric_vars():
            if v not in covered:
                raise ContractError(f"numeric variable {v} lacks its Num conjunct")
        tables = self.table_vars()
        if len(set(tables)) != len(tables):
            raise ContractError("table variables must be disjoint across blocks")

    def numeric_vars(self) -> tuple[Variable, ...]:
        out: list[Variable] = []
        for block in self.blocks:
            terms = (block.term,) if isinstance(block, NumBlock) else (block.a, block.b, block.c)
            for t in terms:
                if isinstance(t, Variable) and t not in out:
                    out.append(t)
        return tuple(out)

    def table_vars(self) -> tuple[Variable, ...]:
        out: list[Variable] = []
        for block in self.blocks:
            if isinstance(block, AddBlock):
                out.append(block.w)
            elif isinstance(block, MulBlock):
                out.extend((block.w1, block.w2))
        return tuple(out)

    def primitives(self) -> tuple[Primitive, ...]:
        return tuple(
            p for block in self.blocks for p in block.primitives(self.language_index)
        )

    def formula(self) -> Formula:
        return conj(block.formula(self.language_index) for block in self.blocks)


def associate(psi: DiophantineFormula, lang: int = 0) -> PCArithFormula:
    """The associated conjunction: three Num conjuncts per atom plus an Add
    or Mul block with fresh table variables, left to right."""
    blocks: list[Block] = []
    counter = 0
    for atom in psi.atoms:
        a, b, c = (_retarget_language(t, lang) for t in atom.terms())
        blocks.extend([NumBlock(a), NumBlock(b), NumBlock(c)])
        if atom.kind is DiophKind.ADD:
            counter += 1
            blocks.append(AddBlock(a, b, c, Variable(f"w{counter}")))
        else:
            w1, w2 = Variable(f"w{counter + 1}"), Variable(f"w{counter + 2}")
            counter += 2
            blocks.append(MulBlock(a, b, c, w1, w2))
    return PCArithFormula(tuple(blocks), lang)


def _retarget_language(t: Term, lang: int) -> Term:
    if lang == 0 or isinstance(t, Variable):
        return t
    m = numeral_of(t, zero_symbol(0))
    if m is None:
        raise ContractError(f"cannot move {t} to language {lang}")
    return numeral(m, zero_symbol(lang))


def _map_block_terms(block: Block, fn: Callable[[Term], Term]) -> Block:
    if isinstance(block, NumBlock):
        return NumBlock(fn(block.term))
    if isinstance(block, AddBlock):
        return AddBlock(fn(block.a), fn(block.b), fn(block.c), _as_var(fn(block.w)))
    return MulBlock(fn(block.a), fn(block.b), fn(block.c),
                    _as_var(fn(block.w1)), _as_var(fn(block.w2)), block.literal_sim)


def _as_var(t: Term) -> Variable:
    if not isinstance(t, Variable):
        raise ContractError(f"table slot must stay a variable, got {t}")
    return t


def instantiate_numeral(phi: PCArithFormula, x: Variable, m: int) -> PCArithFormula:
    """Substitute s^m(0) of the formula's language for the numeric variable x."""
    if x.kind is not VarKind.NUMERIC:
        raise ContractError(f"{x} is not a numeric variable")
    if x not in phi.numeric_vars():
        raise ContractError(f"{x} does not occur in the formula")
    value = numeral(m, zero_symbol(phi.language_index))
    fn = lambda t: value if t == x else t
    return PCArithFormula(
        tuple(_map_block_terms(b, fn) for b in phi.blocks), phi.language_index
    )


@dataclass(frozen=True)
class VariantInstance:
    """A ground instance of a variant: its conjuncts with their roles."""

    primitives: tuple[Primitive, ...]
    language_index: int

    def formula(self) -> Formula:
        return conj(p.formula() for p in self.primitives)


def instantiate(phi: PCArithFormula, values: Mapping[Variable, Term]) -> VariantInstance:
    """Close the formula by substituting ground terms for all variables."""
    missing = [v for v in (*phi.numeric_vars(), *phi.table_vars()) if v not in values]
    if missing:
        raise ContractError(f"instantiation must cover all variables, missing {missing}")
    for value in values.values():
        if not is_solution_eligible(value):
            raise ContractError(f"instantiation values must be closed terms: {value}")
    sigma = Substitution(dict(values))
    ground = tuple(
        Primitive(p.kind, tuple(substitute_term(t, sigma) for t in p.args), p.lang)
        for p in phi.primitives()
    )
    return VariantInstance(ground, phi.language_index)


def make_variant(phi: PCArithFormula, i: int) -> PCArithFormula:
    """Rename constants to language i and suffix every variable with @i."""
    if phi.language_index != 0:
        raise ContractError("variants are formed from the unindexed language")
    if i < 1:
        raise ContractError("variant index must be >= 1")

    def rename(t: Term) -> Term:
        if isinstance(t, Variable):
            return Variable(f"{t.name}@{i}")
        if isinstance(t, Application):
            symbol = t.symbol
            if symbol.special is not None and symbol.special.language_index == 0:
                symbol = special_constant(symbol.special.base, i)
            return Application(symbol, tuple(rename(a) for a in t.args))
        return t

    return PCArithFormula(
        tuple(_map_block_terms(b, rename) for b in phi.blocks), i
    )


@dataclass(frozen=True)
class AssignedFormula:
    """The conjunction of variants 1..n of one formula."""

    variants: tuple[PCArithFormula, ...]

    def formula(self) -> Formula:
        return conj(v.formula() for v in self.variants)


def assign_n(phi: PCArithFormula, n: int) -> AssignedFormula:
    if n < 1:
        raise ContractError("variant count must be >= 1")
    return AssignedFormula(tuple(make_variant(phi, i) for i in range(1, n + 1)))


def _variant_bound_vars(phi: PCArithFormula) -> list[Variable]:
    return [*phi.numeric_vars(), *phi.table_vars()]


def reduction_f(
    psi: DiophantineFormula, x: Variable, m: int, n: int = 1
) -> ExistentialFormula:
    """The numeral-indexed family member: substitute s^m(0_i) for x in every
    variant and close the remaining variables existentially."""
    if x not in psi.variables():
        raise ContractError(f"{x} is not free in the system")
    if n == 1:
        phi = instantiate_numeral(associate(psi), x, m)
        return ExistentialFormula(tuple(_variant_bound_vars(phi)), phi.formula())
    assigned = assign_n(associate(psi), n)
    instantiated = []
    bound: list[Variable] = []
    for i, variant in enumerate(assigned.variants, start=1):
        xi = Variable(f"{x.name}@{i}")
        vi = instantiate_numeral(variant, xi, m)
        instantiated.append(vi)
        bound.extend(_variant_bound_vars(vi))
    matrix = conj(v.formula() for v in instantiated)
    return ExistentialFormula(tuple(bound), matrix)


# ---------------------------------------------------------------------------
# Failure classification


_CASE_ORDER = (
    FailureCase.NUM_OR_TAB,
    FailureCase.TILDE_NUM_OR_TAB,
    FailureCase.SIM_OR_SIM_TILDE,
    FailureCase.PLUS_OR_TIM,
)


def classify_failures(
    instance: VariantInstance,
    oracle: Callable[[Formula], bool] = qcheck.is_quasitautology,
) -> Diagnosis:
    """First applicable failure case of a non-valid ground variant instance.

    Conjunct classes are tried in the fixed case order; the additive or
    multiplicative case reports the numeral exponent of the failing
    conjunct's first argument.
    """
    failing = [p for p in instance.primitives if not oracle(p.formula())]
    if not failing:
        raise ContractError("instance is valid; nothing to diagnose")
    for case in _CASE_ORDER:
        for p in failing:
            if _CASE_OF_KIND[p.kind] is not case:
                continue
            if case is not FailureCase.PLUS_OR_TIM:
                return Diagnosis(case)
            m = numeral_of(p.args[0], zero_symbol(p.lang))
            if m is None:
                raise ContractError(
                    f"{p.kind.value} conjunct fails on a non-numeral first argument"
                )
            return Diagnosis(case, m)
    raise ContractError("unreachable: some failing conjunct must classify")


# ---------------------------------------------------------------------------
# Recognising instances from plain formulas


def _match_equalities(f: Formula) -> list[Equality] | None:
    parts: list[Equality] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.extend((g.rhs, g.lhs))  # left conjunct pops first
        elif isinstance(g, Equality):
            parts.append(g)
        else:
            return None
    return parts


def _candidate_languages(f: Formula) -> list[int]:
    """Language indices of the special constants occurring in f."""
    indices: list[int] = []

    def scan_term(t: Term) -> None:
        if isinstance(t, Application):
            if t.symbol.special is not None:
                index = t.symbol.special.language_index
                if index not in indices:
                    indices.append(index)
            for a in t.args:
                scan_term(a)

    def scan(g: Formula) -> None:
        if isinstance(g, Equality):
            scan_term(g.lhs)
            scan_term(g.rhs)
        elif isinstance(g, (And, Implies)):
            scan(g.lhs)
            scan(g.rhs)

    scan(f)
    return indices


def recognize_conjunct(f: Formula) -> Primitive | None:
    """Match one implication against the eight primitive shapes.

    The language is determined by the hypothesis pattern's fixed constants;
    argument slots may mention constants of other languages.
    """
    for lang in _candidate_languages(f):
        p = _recognize_in_language(f, lang)
        if p is not None:
            return p
    return None


def _recognize_in_language(f: Formula, lang: int) -> Primitive | None:
    if not isinstance(f, Implies) or not isinstance(f.rhs, Equality):
        return None
    hyp = _match_equalities(f.lhs)
    if hyp is None:
        return None
    concl: Equality = f.rhs
    z, zh, zt = zero(lang), zero_hat(lang), zero_tilde(lang)
    kk, kt = k_plain(lang), k_tilde(lang)
    if len(hyp) == 1:
        h = hyp[0]
        if h == Equality(z, succ(z)) and concl.lhs == z:
            return Primitive(PrimKind.NUM, (concl.rhs,), lang)
        if h == Equality(zt, succ(zt)) and concl.lhs == zt:
            return Primitive(PrimKind.NUM_TILDE, (concl.rhs,), lang)
        if h == Equality(z, zt):
            return Primitive(PrimKind.SIM, (concl.lhs, concl.rhs), lang)
        if h.lhs == zt:
            return Primitive(PrimKind.PLUS, (h.rhs, concl.rhs, concl.lhs), lang)
        return None
    if len(hyp) == 2:
        if hyp[0] == Equality(z, succ(z)) and hyp[1] == Equality(
            kk, pair(pair(z, z), kk)
        ) and concl.lhs == kk:
            return Primitive(PrimKind.TAB, (concl.rhs,), lang)
        return None
    if len(hyp) == 3:
        if (hyp[0] == Equality(zh, succ(zh)) and hyp[1] == Equality(zt, succ(zt))
                and hyp[2] == Equality(kt, pair(pair(zh, zt), kt)) and concl.lhs == kt):
            return Primitive(PrimKind.TAB_TILDE, (concl.rhs,), lang)
        if (hyp[0] == Equality(z, zh) and hyp[1] == Equality(z, zt)
                and hyp[2] == Equality(kk, kt)):
            return Primitive(PrimKind.SIM_TILDE, (concl.lhs, concl.rhs), lang)
        if (hyp[0].lhs == zh and hyp[0].rhs == succ(z) and hyp[1].lhs == zt
                and hyp[2] == Equality(kt, pair(pair(z, z), kk))
                and isinstance(concl.rhs, Application)
                and concl.rhs.symbol.name == "pair"):
            outer = concl.rhs
            row = outer.args[0]
            if isinstance(row, Application) and row.symbol.name == "pair":
                x = hyp[1].rhs
                y, z_arg = row.args
                return Primitive(
                    PrimKind.TIM, (x, y, z_arg, outer.args[1], concl.lhs), lang
                )
        return None
    return None


def recognize_instance(f: Formula) -> VariantInstance:
    """Split a conjunction into recognised primitive conjuncts.

    All conjuncts must match a primitive shape over one common language.
    """
    primitives: list[Primitive] = []
    stack = [f]
    flat: list[Formula] = []
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.extend((g.rhs, g.lhs))  # left conjunct pops first
        else:
            flat.append(g)
    for g in flat:
        p = recognize_conjunct(g)
        if p is None:
            raise ContractError(f"conjunct does not match a primitive shape: {g}")
        primitives.append(p)
    langs = {p.lang for p in primitives}
    if len(langs) != 1:
        raise ContractError("instance mixes conjuncts of several languages")
    return VariantInstance(tuple(primitives), langs.pop())
