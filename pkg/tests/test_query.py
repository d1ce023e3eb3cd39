"""Query language: scanner, parser, evaluator, formatting."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflsym.model import (
    build_model,
    divergence_of,
    non_symmetrical_objects,
    symmetrical_elements,
    symmetry_stats,
)
from reflsym.query import (
    SIGNATURES,
    ArityError,
    Conjunct,
    Constant,
    PredicateTable,
    QueryAst,
    QuerySyntaxError,
    UnknownPredicateError,
    Variable,
    Wildcard,
    evaluate,
    format_query,
    format_solution,
    format_value,
    parse_query,
    register_predicates,
    solve,
)


@pytest.fixture()
def perfect_model(perfect_scene, default_config, taxonomy):
    return build_model(perfect_scene, default_config, taxonomy)


@pytest.fixture()
def people_model(people_scene, default_config, taxonomy):
    return build_model(people_scene, default_config, taxonomy)


class TestParse:
    def test_stats_signature(self):
        q = parse_query("symmetry_stats(NP, NSP, MD, MS)")
        assert len(q.conjuncts) == 1
        c = q.conjuncts[0]
        assert c.predicate == "symmetry_stats"
        assert c.args == (Variable("NP"), Variable("NSP"), Variable("MD"), Variable("MS"))

    def test_conjunction_shares_variable(self):
        q = parse_query("symmetrical_objects(SO), divergence(SO, D)")
        assert [c.predicate for c in q.conjuncts] == ["symmetrical_objects", "divergence"]
        assert q.conjuncts[0].args[0] == q.conjuncts[1].args[0]

    def test_trailing_period_accepted(self):
        assert parse_query("symmetrical_element(E).") == parse_query("symmetrical_element(E)")

    def test_wildcard_and_atom(self):
        q = parse_query("perceptual_similarity(pa_l, _, S)")
        assert q.conjuncts[0].args == (Constant("pa_l"), Wildcard(), Variable("S"))

    def test_numbers(self):
        q = parse_query("divergence(E, 0.5), perceptual_similarity(E, _, -2)")
        assert q.conjuncts[0].args[1] == Constant(0.5)
        assert q.conjuncts[1].args[2] == Constant(-2)
        assert isinstance(q.conjuncts[1].args[2].value, int)

    def test_quoted_string(self):
        q = parse_query('divergence("odd id", D)')
        assert q.conjuncts[0].args[0] == Constant("odd id")

    def test_unclosed_paren(self):
        with pytest.raises(QuerySyntaxError):
            parse_query("symmetrical_element(")

    def test_error_carries_position(self):
        with pytest.raises(QuerySyntaxError) as exc:
            parse_query("symmetrical_element(E")
        assert exc.value.line == 1
        assert exc.value.col >= 21

    def test_unknown_predicate(self):
        with pytest.raises(UnknownPredicateError):
            parse_query("frobnicate(X)")

    def test_wrong_arity(self):
        with pytest.raises(ArityError):
            parse_query("symmetry_stats(NP)")

    def test_lowercase_leading_underscore_rejected(self):
        with pytest.raises(QuerySyntaxError):
            parse_query("symmetrical_element(_x)")

    def test_garbage_after_query(self):
        with pytest.raises(QuerySyntaxError):
            parse_query("symmetrical_element(E). extra")

    def test_whitespace_insensitive(self):
        a = parse_query("symmetrical_element( E ),divergence(E,  D)")
        b = parse_query("symmetrical_element(E), divergence(E, D)")
        assert a == b


names = [name for name, _ in SIGNATURES]
terms = st.one_of(
    st.just(Wildcard()),
    st.sampled_from([Variable("X"), Variable("Y2"), Variable("Long_name")]),
    st.sampled_from([Constant("atom_id"), Constant('needs "quoting"'), Constant(3), Constant(-1.5)]),
)


@st.composite
def asts(draw):
    sigs = draw(st.lists(st.sampled_from(sorted(SIGNATURES)), min_size=1, max_size=4))
    conjuncts = []
    for name, arity in sigs:
        conjuncts.append(Conjunct(name, tuple(draw(terms) for _ in range(arity))))
    return QueryAst(tuple(conjuncts))


class TestFormat:
    @given(asts())
    @settings(max_examples=80)
    def test_parse_inverts_format(self, ast):
        assert parse_query(format_query(ast)) == ast

    def test_float_four_decimals(self):
        assert format_value(0.123456) == "0.1235"
        assert format_value(1.0) == "1.0000"

    def test_groups_bracketed(self):
        assert format_value(("a", "b")) == "[a, b]"
        assert format_value(("a",)) == "[a]"

    def test_solution_line(self):
        line = format_solution({"E": ("l", "r"), "D": 0.25})
        assert line == "E = [l, r], D = 0.2500"

    def test_empty_solution_is_true(self):
        assert format_solution({}) == "true"


class TestEvaluate:
    def test_symmetrical_elements_enumerated(self, perfect_model):
        result = evaluate(parse_query("symmetrical_element(E)"), perfect_model)
        got = {binding["E"] for binding in result.solutions}
        assert got == {g for g in symmetrical_elements(perfect_model)}
        assert not result.truncated

    def test_stats_binding(self, perfect_model):
        result = evaluate(parse_query("symmetry_stats(NP, _, _, _)"), perfect_model)
        assert len(result.solutions) == 1
        assert result.solutions[0]["NP"] == 4

    def test_no_solutions(self, perfect_model):
        result = evaluate(parse_query("non_symmetrical_objects(X)"), perfect_model)
        assert result.solutions == ()
        assert non_symmetrical_objects(perfect_model) == []

    def test_join_on_shared_variable(self, perfect_model):
        result = evaluate(
            parse_query("symmetrical_element(E), divergence(E, D)"), perfect_model
        )
        assert len(result.solutions) == len(symmetrical_elements(perfect_model))
        for binding in result.solutions:
            assert binding["D"] == divergence_of(perfect_model, binding["E"]).mean

    def test_soundness_by_replay(self, people_model):
        result = evaluate(
            parse_query("symmetrical_objects(SO), divergence(SO, D)"), people_model
        )
        table = register_predicates(people_model)
        for binding in result.solutions:
            assert (binding["SO"],) in table.facts("symmetrical_objects", 1)
            assert (binding["SO"], binding["D"]) in table.facts("divergence", 2)

    def test_completeness_single_conjunct(self, people_model):
        table = register_predicates(people_model)
        for name, arity in sorted(SIGNATURES):
            query = f"{name}({', '.join('_' * arity and ['V%d' % i for i in range(arity)])})"
            result = evaluate(parse_query(query), people_model)
            assert len(result.solutions) == len(table.facts(name, arity))

    def test_constant_filters(self, people_model):
        result = evaluate(parse_query("divergence(bench_c, D)"), people_model)
        assert len(result.solutions) == 1
        assert result.solutions[0]["D"] == divergence_of(people_model, "bench_c").mean

    def test_constant_matches_single_group(self, people_model):
        # bench_c names the 1-element group [bench_c]
        result = evaluate(parse_query("symmetrical_objects(bench_c)"), people_model)
        assert len(result.solutions) == 1

    def test_wildcard_never_binds(self, people_model):
        result = evaluate(parse_query("symmetrical_body_pose(_, Parts)"), people_model)
        assert result.solutions == ({"Parts": ("upper_body",)},)

    def test_independent_conjunct_order(self, people_model):
        a = evaluate(
            parse_query("symmetrical_objects(SO), symmetry_stats(NP, _, _, _)"),
            people_model,
        )
        b = evaluate(
            parse_query("symmetry_stats(NP, _, _, _), symmetrical_objects(SO)"),
            people_model,
        )
        key = lambda binding: sorted(binding.items(), key=lambda kv: (kv[0], repr(kv[1])))
        assert sorted(map(key, a.solutions)) == sorted(map(key, b.solutions))

    def test_type_mismatch_yields_nothing(self, people_model):
        result = evaluate(parse_query("divergence(no_such_element, D)"), people_model)
        assert result.solutions == ()

    def test_pose_parts_match_stats_example(self, people_model):
        stats = symmetry_stats(people_model)
        result = evaluate(parse_query("symmetry_stats(NP, NSP, MD, MS)"), people_model)
        binding = result.solutions[0]
        assert binding["NP"] == stats.num_elements
        assert binding["NSP"] == stats.num_symmetric

    def test_truncation(self, people_model):
        result = evaluate(
            parse_query("symmetrical_objects(A), symmetrical_objects(B)"),
            people_model,
            max_solutions=3,
        )
        assert len(result.solutions) == 3
        assert result.truncated


class TestPredicateTable:
    def test_exactly_registered_signatures(self, perfect_model):
        table = register_predicates(perfect_model)
        assert table.signatures() == SIGNATURES

    def test_first_registration_wins(self, perfect_model):
        table = register_predicates(perfect_model)
        before = table.facts("divergence", 2)
        assert table.register("divergence", 2, lambda: [("x", 0.0)]) is False
        assert table.facts("divergence", 2) == before

    def test_unregistered_lookup_absent(self, perfect_model):
        table = register_predicates(perfect_model)
        assert table.lookup("frobnicate", 1) is None

    def test_similarity_facts_cover_pairs(self, perfect_model):
        table = register_predicates(perfect_model)
        pairs = {(p.left_id, p.right_id) for p in perfect_model.pairs}
        twos = {fact[0] for fact in table.facts("perceptual_similarity", 2)}
        assert twos == pairs
        threes = table.facts("perceptual_similarity", 3)
        assert all(fact[1] in ("pa_l", "pa_r", "pb_l", "pb_r") for fact in threes)

    def test_solve_is_lazy(self, people_model):
        table = register_predicates(people_model)
        q = parse_query("symmetrical_objects(A), symmetrical_objects(B)")
        gen = solve(q, people_model, table)
        first = next(gen)
        assert "A" in first and "B" in first
