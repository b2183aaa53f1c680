import pytest

import hsk.arith as arith_module
from hsk import qcheck, skeleton
from hsk.arith import (
    AddBlock,
    ContractError,
    Diagnosis,
    DiophAtom,
    DiophKind,
    FailureCase,
    MulBlock,
    NumBlock,
    PCArithFormula,
    Semitable,
    add,
    associate,
    assign_n,
    classify_failures,
    eval_diophantine,
    instantiate,
    instantiate_numeral,
    k_plain,
    k_tilde,
    make_variant,
    mp_semitable,
    mul,
    num,
    num_tilde,
    parse_diophantine,
    parse_semitable,
    plus,
    recognize_instance,
    reduction_f,
    sim,
    sim_tilde,
    tab,
    tab_tilde,
    tim,
    zero,
    zero_hat,
    zero_symbol,
    zero_tilde,
)
from hsk.models import construct_alpha, holds, m_alpha
from hsk.syntax import (
    Substitution,
    Variable,
    numeral,
    substitute,
)
from hsk.textform import parse_formula, parse_term, print_formula

X1 = Variable("x1")
W1 = Variable("w1")


# ---------------------------------------------------------------------------
# Builders produce the exact displayed shapes


def test_num_builder_shape():
    assert print_formula(num(parse_term("s(z)"))) == "z = s(z) -> z = s(z)"
    assert print_formula(num(X1)) == "z = s(z) -> z = ?x1"
    assert print_formula(num_tilde(X1)) == "zt = s(zt) -> zt = ?x1"


def test_sim_plus_shapes():
    assert print_formula(sim(X1, W1)) == "z = zt -> ?x1 = ?w1"
    assert print_formula(plus(X1, W1, zero())) == "zt = ?x1 -> z = ?w1"


def test_add_unfolds_to_three_conjuncts():
    f = add(X1, parse_term("s(z)"), zero(), W1)
    assert print_formula(f) == (
        "(zt = s(zt) -> zt = ?w1) & (z = zt -> s(z) = ?w1) & (zt = ?x1 -> z = ?w1)"
    )


def test_tab_shapes():
    assert print_formula(tab(W1)) == "z = s(z) & k = pair(pair(z, z), k) -> k = ?w1"
    assert print_formula(tab_tilde(W1)) == (
        "zh = s(zh) & zt = s(zt) & kt = pair(pair(zh, zt), kt) -> kt = ?w1"
    )
    assert print_formula(sim_tilde(W1, Variable("w2"))) == (
        "z = zh & z = zt & k = kt -> ?w1 = ?w2"
    )


def test_tim_shape():
    f = tim(X1, parse_term("s(z)"), zero(), W1, Variable("w2"))
    assert print_formula(f) == (
        "zh = s(z) & zt = ?x1 & kt = pair(pair(z, z), k) -> ?w2 = pair(pair(s(z), z), ?w1)"
    )


def test_mul_has_four_conjuncts_with_table_similarity():
    f = mul(X1, X1, X1, W1, Variable("w2"))
    conjuncts = print_formula(f).split(" & (")
    assert len(print_formula(f).split("->")) == 5  # four implications
    assert "z = zh & z = zt & k = kt" in print_formula(f)
    literal = mul(X1, X1, X1, W1, Variable("w2"), literal_sim=True)
    assert "z = zt -> ?w1 = ?w2" in print_formula(literal)


def test_literal_similarity_breaks_multiplication():
    # with the plain similarity conjunct no table pair is ever accepted
    m = p = 1
    table = mp_semitable(m, p)
    f = mul(numeral(m, zero_symbol()), numeral(p, zero_symbol()),
            numeral(m * p, zero_symbol()), W1, Variable("w2"), literal_sim=True)
    sigma = Substitution({
        W1: table.instantiate(zero(), zero(), k_plain()),
        Variable("w2"): table.instantiate(zero_hat(), zero_tilde(), k_tilde()),
    })
    assert not qcheck.is_quasitautology(substitute(f, sigma))


# ---------------------------------------------------------------------------
# Semitables


def test_semitable_instantiation_right_associates():
    t = Semitable(((1, 2), (0, 0)))
    inst = t.instantiate(zero(), zero(), k_plain())
    assert inst == parse_term("pair(pair(s(z), s(s(z))), pair(pair(z, z), k))")


def test_mp_semitable_recursion():
    assert mp_semitable(2, 0) == Semitable(())
    assert mp_semitable(2, 1) == Semitable(((0, 0),))
    assert mp_semitable(2, 2) == Semitable(((1, 2), (0, 0)))
    assert mp_semitable(3, 3) == Semitable(((2, 6), (1, 3), (0, 0)))
    assert mp_semitable(2, 2).is_mp(2, 2)
    assert not Semitable(((2, 4), (1, 2))).is_mp(2, 2)  # missing the (0, 0) row


def test_parse_semitable_round_trip():
    for rows in [(), ((0, 0),), ((2, 1), (1, 1), (0, 3))]:
        table = Semitable(rows)
        inst = table.instantiate(zero_hat(), zero_tilde(), k_tilde())
        assert parse_semitable(inst, zero_hat(), zero_tilde(), k_tilde()) == table
    assert parse_semitable(parse_term("pair(z, k)"), zero(), zero(), k_plain()) is None


def test_shift_equation_characterizes_mp_tables():
    # substituting (s(z), s^m(z), pair(pair(z,z),k)) into a semitable yields
    # the (p, m*p) row consed onto its plain instance exactly for (m,p)-tables
    shifted_base = parse_term("pair(pair(z, z), k)")
    candidates = [Semitable(rows) for rows in [
        (), ((0, 0),), ((1, 2), (0, 0)), ((1, 1), (0, 0)), ((2, 4), (1, 2), (0, 0)),
        ((0, 0), (1, 2)), ((2, 2), (0, 0)),
    ]]
    for m in range(4):
        for p in range(4):
            for table in candidates:
                lhs = table.instantiate(parse_term("s(z)"),
                                        numeral(m, zero_symbol()), shifted_base)
                rhs_row = parse_term(
                    f"pair({print_term_numeral(p)}, {print_term_numeral(m * p)})")
                from hsk.syntax import pair as mk_pair
                rhs = mk_pair(rhs_row, table.instantiate(zero(), zero(), k_plain()))
                assert (lhs == rhs) == (table.is_mp(m, p) and True), (m, p, table)


def print_term_numeral(exponent):
    out = "z"
    for _ in range(exponent):
        out = f"s({out})"
    return out


# ---------------------------------------------------------------------------
# Diophantine formulas


def test_parse_diophantine():
    psi = parse_diophantine("x1 + 1 = 0\nx1 * x2 = s^2(z)\n")
    assert psi.atoms[0] == DiophAtom(DiophKind.ADD, X1, numeral(1, zero_symbol()),
                                     numeral(0, zero_symbol()))
    assert psi.atoms[1].kind is DiophKind.MUL
    assert psi.variables() == (X1, Variable("x2"))


def test_parse_diophantine_rejects_bad_variables():
    with pytest.raises(ContractError):
        parse_diophantine("y + 1 = 0")
    with pytest.raises(ContractError):
        parse_diophantine("")


def test_eval_diophantine():
    assert eval_diophantine(parse_diophantine("2 + 3 = 5"))
    assert not eval_diophantine(parse_diophantine("1 * 2 = 3"))
    assert eval_diophantine(parse_diophantine("2 + 3 = 5\n2 * 2 = 4"))
    assert not eval_diophantine(parse_diophantine("2 + 3 = 5\n2 * 2 = 5"))
    with pytest.raises(ContractError):
        eval_diophantine(parse_diophantine("x1 + 1 = 0"))


# ---------------------------------------------------------------------------
# Association


def test_associate_add_atom():
    phi = associate(parse_diophantine("x1 + 1 = 0"))
    assert phi.blocks == (
        NumBlock(X1),
        NumBlock(numeral(1, zero_symbol())),
        NumBlock(numeral(0, zero_symbol())),
        AddBlock(X1, numeral(1, zero_symbol()), numeral(0, zero_symbol()), W1),
    )
    assert phi.numeric_vars() == (X1,)
    assert phi.table_vars() == (W1,)


def test_associate_mul_atom():
    phi = associate(parse_diophantine("x1 * x2 = 2"))
    assert isinstance(phi.blocks[3], MulBlock)
    assert phi.table_vars() == (W1, Variable("w2"))


def test_associate_keeps_table_variables_disjoint():
    phi = associate(parse_diophantine("x1 + 1 = 0\nx1 * x1 = 2"))
    assert phi.table_vars() == (W1, Variable("w2"), Variable("w3"))


def test_num_coverage_invariant_enforced():
    with pytest.raises(ContractError):
        PCArithFormula((AddBlock(X1, zero(), zero(), W1),))


def test_instantiate_numeral():
    phi = associate(parse_diophantine("x1 + 1 = 0"))
    inst = instantiate_numeral(phi, X1, 0)
    assert inst.blocks[0] == NumBlock(numeral(0, zero_symbol()))
    assert inst.numeric_vars() == ()
    inst1 = instantiate_numeral(phi, X1, 1)
    assert inst1.blocks[0] == NumBlock(numeral(1, zero_symbol()))
    with pytest.raises(ContractError):
        instantiate_numeral(phi, Variable("x9"), 1)
    with pytest.raises(ContractError):
        instantiate_numeral(phi, Variable("v"), 1)


# ---------------------------------------------------------------------------
# Variants and the n-fold assignment


def test_make_variant_renames_constants_and_variables():
    phi = associate(parse_diophantine("x1 + 1 = 0"))
    v2 = make_variant(phi, 2)
    assert v2.language_index == 2
    assert print_formula(v2.blocks[0].formula(2)) == "z_2 = s(z_2) -> z_2 = ?x1@2"
    assert v2.numeric_vars() == (Variable("x1@2"),)
    with pytest.raises(ContractError):
        make_variant(v2, 3)


def test_variant_renaming_is_invertible():
    phi = associate(parse_diophantine("x1 + 1 = 0\nx1 * x1 = 2"))
    variant = make_variant(phi, 4)

    def unrename(term):
        from hsk.syntax import Application, special_constant

        if isinstance(term, Variable):
            assert term.name.endswith("@4")
            return Variable(term.name[:-2])
        if isinstance(term, Application):
            symbol = term.symbol
            if symbol.special is not None and symbol.special.language_index == 4:
                symbol = special_constant(symbol.special.base, 0)
            return Application(symbol, tuple(unrename(a) for a in term.args))
        return term

    restored = tuple(
        arith_module._map_block_terms(b, unrename) for b in variant.blocks
    )
    assert restored == phi.blocks


def test_variant_shares_no_special_constants():
    phi = associate(parse_diophantine("x1 + 1 = 0"))
    from hsk.syntax import signature_of
    sig1 = signature_of(make_variant(phi, 1).formula())
    sig2 = signature_of(make_variant(phi, 2).formula())
    specials1 = {s for s in sig1.function_symbols if s.special}
    specials2 = {s for s in sig2.function_symbols if s.special}
    assert specials1.isdisjoint(specials2)


def test_variant_solvability_transfers():
    # renaming a solution moves it between the languages
    phi = associate(parse_diophantine("x1 + 1 = 2"))
    inst = instantiate(phi, {X1: numeral(1, zero_symbol()),
                             W1: numeral(1, zero_tilde().symbol)})
    assert qcheck.is_quasitautology(inst.formula())
    v3 = make_variant(phi, 3)
    inst3 = instantiate(v3, {Variable("x1@3"): numeral(1, zero_symbol(3)),
                             Variable("w1@3"): numeral(1, zero_tilde(3).symbol)})
    assert qcheck.is_quasitautology(inst3.formula())


def test_assign_n():
    phi = associate(parse_diophantine("x1 + 1 = 0"))
    assigned = assign_n(phi, 2)
    assert len(assigned.variants) == 2
    assert assigned.variants[0].language_index == 1
    one = assign_n(phi, 1)
    assert one.formula() == make_variant(phi, 1).formula()


# ---------------------------------------------------------------------------
# reduction_f


def test_reduction_f_single():
    psi = parse_diophantine("x1 + 1 = 0")
    f0 = reduction_f(psi, X1, 0, 1)
    assert f0.bound_vars == (W1,)
    expected = instantiate_numeral(associate(psi), X1, 0).formula()
    assert f0.matrix == expected


def test_reduction_f_varies_only_in_the_numeral():
    from hsk.syntax import And, Application, Implies, numeral_of

    def leaf_pairs(f, g, out):
        assert type(f) is type(g)
        if isinstance(f, (And, Implies)):
            leaf_pairs(f.lhs, g.lhs, out)
            leaf_pairs(f.rhs, g.rhs, out)
        else:
            from hsk.syntax import Equality
            assert isinstance(f, Equality) and isinstance(g, Equality)
            for a, b in ((f.lhs, g.lhs), (f.rhs, g.rhs)):
                if a != b:
                    out.append((a, b))

    psi = parse_diophantine("x1 + 1 = 0")
    members = {m: reduction_f(psi, X1, m, 1) for m in (0, 2)}
    assert members[0].bound_vars == members[2].bound_vars
    diffs = []
    leaf_pairs(members[0].matrix, members[2].matrix, diffs)
    assert diffs  # the numeral slot does change
    for a, b in diffs:
        assert numeral_of(a, zero_symbol()) == 0
        assert numeral_of(b, zero_symbol()) == 2


def test_reduction_f_two_variants():
    psi = parse_diophantine("x1 + 1 = 0")
    f = reduction_f(psi, X1, 0, 2)
    assert f.bound_vars == (Variable("w1@1"), Variable("w1@2"))
    from hsk.syntax import signature_of
    specials = {s.name for s in signature_of(f.matrix).function_symbols if s.special}
    assert specials == {"z_1", "zt_1", "z_2", "zt_2"}


# ---------------------------------------------------------------------------
# Failure classification


def _instance(system, values):
    phi = associate(parse_diophantine(system))
    return instantiate(phi, values)


def test_classify_num_failure():
    inst = _instance("x1 + 1 = 0",
                     {X1: parse_term("f(z)"), W1: zero_tilde()})
    assert classify_failures(inst) == Diagnosis(FailureCase.NUM_OR_TAB)


def test_classify_tilde_failure():
    inst = _instance("x1 + 1 = 0", {X1: zero(), W1: parse_term("s(k)")})
    assert classify_failures(inst) == Diagnosis(FailureCase.TILDE_NUM_OR_TAB)


def test_classify_similarity_failure():
    inst = _instance("x1 + 1 = 0", {X1: zero(), W1: zero_tilde()})
    assert classify_failures(inst) == Diagnosis(FailureCase.SIM_OR_SIM_TILDE)


def test_classify_additive_failure_reports_numeral():
    inst = _instance("x1 + 1 = 0",
                     {X1: numeral(2, zero_symbol()), W1: numeral(1, zero_tilde().symbol)})
    assert classify_failures(inst) == Diagnosis(FailureCase.PLUS_OR_TIM, m=2)


def test_classify_valid_instance_is_contract_error():
    inst = _instance("x1 + 1 = 2",
                     {X1: numeral(1, zero_symbol()), W1: numeral(1, zero_tilde().symbol)})
    with pytest.raises(ContractError):
        classify_failures(inst)


def test_classified_failures_are_falsified_by_their_alpha():
    cases = [
        ("x1 + 1 = 0", {X1: parse_term("pair(z, z)"), W1: zero_tilde()}),
        ("x1 + 1 = 0", {X1: zero(), W1: parse_term("s(k)")}),
        ("x1 + 1 = 0", {X1: zero(), W1: zero_tilde()}),
        ("x1 + 1 = 0", {X1: numeral(1, zero_symbol()), W1: parse_term("s(zt)")}),
        ("x1 * x1 = 1", {X1: zero(), W1: parse_term("s(k)"),
                         Variable("w2"): k_tilde()}),
    ]
    for system, values in cases:
        inst = _instance(system, values)
        assert not qcheck.is_quasitautology(inst.formula())
        diagnosis = classify_failures(inst)
        alpha = construct_alpha([(0, diagnosis)])
        assert not holds(m_alpha(alpha), inst.formula())


# ---------------------------------------------------------------------------
# Recognition of instances from plain formulas


def test_recognize_round_trip():
    phi = associate(parse_diophantine("x1 + 1 = 0\nx1 * x1 = 2"))
    v1 = make_variant(phi, 1)
    values = {
        Variable("x1@1"): numeral(1, zero_symbol(1)),
        Variable("w1@1"): numeral(1, zero_tilde(1).symbol),
        Variable("w2@1"): mp_semitable(1, 1).instantiate(zero(1), zero(1), k_plain(1)),
        Variable("w3@1"): mp_semitable(1, 1).instantiate(zero_hat(1), zero_tilde(1),
                                                         k_tilde(1)),
    }
    inst = instantiate(v1, values)
    recognized = recognize_instance(inst.formula())
    assert recognized.language_index == 1
    assert recognized.primitives == inst.primitives


def test_recognize_rejects_foreign_conjuncts():
    with pytest.raises(ContractError):
        recognize_instance(parse_formula("p(a) -> p(a)"))
    with pytest.raises(ContractError):
        recognize_instance(parse_formula("a = b -> c = d"))


def test_recognize_allows_cross_language_argument_slots():
    inst = recognize_instance(parse_formula("z_1 = s(z_1) -> z_1 = z_2"))
    assert inst.language_index == 1
    assert inst.primitives[0].kind.value == "num"


# ---------------------------------------------------------------------------
# A solution transfers to skeletons of the n-fold variant conjunction


@pytest.mark.parametrize("system,solution", [
    ("x1 + 1 = 2", {"x1": "s(z)", "w1": "s(zt)"}),
    ("2 + 0 = 2", {"w1": "zt"}),
])
def test_solution_transfers_to_variant_skeletons(system, solution):
    phi = associate(parse_diophantine(system))
    base_values = {Variable(name): parse_term(text) for name, text in solution.items()}
    assert qcheck.is_quasitautology(instantiate(phi, base_values).formula())

    n = 2
    assigned = assign_n(phi, n)
    bound = [v for variant in assigned.variants
             for v in (*variant.numeric_vars(), *variant.table_vars())]
    psi = skeleton.ExistentialFormula(tuple(bound), assigned.formula())
    sk = skeleton.make_skeleton(psi, n)

    def variant_term(term_text, lang):
        renamed = term_text
        for name in ("z", "zt"):
            renamed = renamed.replace(f"{name})", f"{name}_{lang})")
        if renamed == term_text and term_text in ("z", "zt"):
            renamed = f"{term_text}_{lang}"
        return parse_term(renamed)

    # fill one disjunct with the renamed solutions, reusing it for the rest
    per_variable = {}
    for i, variant in enumerate(assigned.variants, start=1):
        for v in (*variant.numeric_vars(), *variant.table_vars()):
            base = v.name.split("@")[0]
            per_variable[v] = variant_term(solution[base], i)
    ordered_terms = [per_variable[v] for v in bound]
    assignment = {}
    for tup in sk.unknown_tuples:
        for u, t in zip(tup, ordered_terms):
            assignment[u] = t
    assert skeleton.verify_solution(sk, Substitution(assignment))
