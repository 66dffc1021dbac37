import pytest

from mdres import (
    NotEligibleError,
    OracleBounds,
    enumerate_mris_oracle,
    eval_cq,
    eval_rewritten,
    is_ujcq,
    parse_query,
    resolved_answers,
    rewrite,
)
from mdres.errors import BoundsExceededError, InputError, ParseError

from conftest import load_bundle
from reference import ref_certain_answers


def test_parse_shape(majority_column):
    q = parse_query("Q(x, y, z) :- R(x, y, z).", majority_column.schema)
    assert q.name == "Q"
    assert [v.name for v in q.head] == ["x", "y", "z"]
    assert len(q.atoms) == 1
    assert str(q) == "Q(x, y, z) :- R(x, y, z)"


def test_parse_constants(majority_column):
    # unquoted lower-case identifiers are variables, quoted text is a constant
    q = parse_query("Q(x) :- R(x, 'b2', c1)", majority_column.schema)
    assert str(q) == "Q(x) :- R(x, 'b2', c1)"
    assert eval_cq(q, majority_column.instance).tuples == (("a1",),)


def test_parse_rejects():
    schema = load_bundle("majority_column").schema
    with pytest.raises(InputError, match="unknown relation"):
        parse_query("Q(x) :- T(x)", schema)
    with pytest.raises(InputError, match="arity"):
        parse_query("Q(x) :- R(x, y)", schema)
    with pytest.raises(InputError, match="head variable"):
        parse_query("Q(w) :- R(x, y, z)", schema)
    with pytest.raises(ParseError, match="lower-case"):
        parse_query("Q(X) :- R(X, y, z)", schema)
    with pytest.raises(ParseError, match="head terms"):
        parse_query("Q('a') :- R(x, y, z)", schema)
    with pytest.raises(ParseError, match="trailing"):
        parse_query("Q(x) :- R(x, y, z). extra", schema)


def test_eval_direct(majority_column):
    d = majority_column.instance
    q = parse_query("Q(x, y, z) :- R(x, y, z)", majority_column.schema)
    ans = eval_cq(q, d)
    assert ans.provenance == "direct"
    assert ans.tuples == (
        ("a1", "b1", "c1"), ("a1", "b2", "c2"), ("a1", "b2", "c3"),
    )
    filt = parse_query("Q(z) :- R(x, 'b2', z)", majority_column.schema)
    assert eval_cq(filt, d).tuples == (("c2",), ("c3",))


def test_eval_boolean(majority_column):
    d = majority_column.instance
    yes = parse_query("Q() :- R(x, 'b1', y)", majority_column.schema)
    no = parse_query("Q() :- R(x, 'b9', y)", majority_column.schema)
    assert eval_cq(yes, d).boolean_true
    assert not eval_cq(no, d).boolean_true


def test_join_safety_verdicts(conp_regression):
    schema = conp_regression.schema
    mdset = conp_regression.mdset
    ok, witness = is_ujcq(parse_query("Q(x) :- R(x, y, z)", schema), mdset)
    assert ok and witness is None
    # the scan reports the first offender in atom order
    q = conp_regression.query("query.txt")
    ok, witness = is_ujcq(q, mdset)
    assert not ok
    assert witness == (
        "variable y occurs 2 times and sits at changeable position R[B] (atom 1)"
    )
    qc = parse_query("Q(x) :- R(x, 'b', z)", schema)
    ok, witness = is_ujcq(qc, mdset)
    assert not ok
    assert witness == "constant 'b' sits at changeable position R[B] (atom 1)"


def test_free_variable_repetition_is_safe(dup_groups):
    q = parse_query("Q(y) :- R(y, y)", dup_groups.schema)
    ok, witness = is_ujcq(q, dup_groups.mdset)
    assert ok and witness is None


def test_rewrite_render_frozen(majority_column):
    q = majority_column.query("query.txt")
    rq = rewrite(q, majority_column.mdset)
    assert rq.render() == (
        "Q'(x, y, z) :- exists y' (R(x, y', z) & forall y'' ("
        "#{R(a1', y, c1') : ta(R(x, y', z)[B], R(a1', y, c1')[B])} > "
        "#{R(a1', y'', c1') : ta(R(x, y', z)[B], R(a1', y'', c1')[B]), y'' != y}))"
    )


def test_rewrite_leaves_clean_atoms_alone(three_rel_join):
    q = three_rel_join.query("query.txt")
    rq = rewrite(q, three_rel_join.mdset)
    by_rel = {ra.original.rel: ra for ra in rq.atoms}
    assert by_rel["S"].primed is None and by_rel["U"].primed is None
    r = by_rel["R"]
    assert [str(t) for t in r.primed.terms] == ["x", "y'", "z"]
    (cond,) = r.conditions
    assert cond.klass == (("R", "B"), ("S", "F"), ("U", "I"))
    rendered = rq.render()
    # one count term per class member on each side of the comparison
    assert rendered.count("#{") == 6
    assert " + #{S(" in rendered and " + #{U(" in rendered


def test_rewrite_primed_names_disambiguated(conp_regression):
    q = parse_query("Q(y) :- R(x, y, y)", conp_regression.schema)
    rq = rewrite(q, conp_regression.mdset)
    (ra,) = rq.atoms
    assert [str(t) for t in ra.primed.terms] == ["x", "y'2", "y'3"]
    assert len(ra.conditions) == 2


def test_rewrite_refuses(hard_chain, conp_regression):
    q = parse_query("Q(x) :- R(x, y, z)", hard_chain.schema)
    with pytest.raises(NotEligibleError, match="LinearPairHard"):
        rewrite(q, hard_chain.mdset)
    with pytest.raises(NotEligibleError, match="not join-safe"):
        rewrite(conp_regression.query("query.txt"), conp_regression.mdset)


def test_rewrite_matches_oracle_on_fixture(majority_column):
    d = majority_column.instance
    mdset = majority_column.mdset
    q = majority_column.query("query.txt")
    ans = eval_rewritten(rewrite(q, mdset), d)
    assert ans.provenance == "rewrite"
    assert ans.tuples == (
        ("a1", "b2", "c1"), ("a1", "b2", "c2"), ("a1", "b2", "c3"),
    )
    mris, _ = enumerate_mris_oracle(d, mdset)
    assert set(ans.tuples) == ref_certain_answers(q, mris)


def test_rewrite_on_cycle_instance(two_rule_cycle):
    d = two_rule_cycle.instance
    mdset = two_rule_cycle.mdset
    for fname in ("q1.txt", "q2.txt"):
        q = two_rule_cycle.query(fname)
        ans = eval_rewritten(rewrite(q, mdset), d)
        assert ans.tuples == ()
        mris, _ = enumerate_mris_oracle(d, mdset)
        assert ref_certain_answers(q, mris) == frozenset()


def test_resolved_answers_modes(majority_column):
    d = majority_column.instance
    mdset = majority_column.mdset
    q = majority_column.query("query.txt")
    auto = resolved_answers(q, d, mdset)
    fast = resolved_answers(q, d, mdset, mode="rewrite")
    slow = resolved_answers(q, d, mdset, mode="oracle")
    assert auto.tuples == fast.tuples == slow.tuples
    assert auto.provenance == "rewrite"
    assert slow.provenance == "oracle"
    with pytest.raises(InputError, match="unknown answer mode"):
        resolved_answers(q, d, mdset, mode="chase")


def test_auto_falls_back_to_oracle(conp_regression):
    d = conp_regression.instance
    mdset = conp_regression.mdset
    q = conp_regression.query("query.txt")
    ans = resolved_answers(q, d, mdset)
    assert ans.provenance == "oracle"
    # some minimal resolution collapses C to a single value, losing the pair
    assert not ans.boolean_true
    with pytest.raises(NotEligibleError, match="not available"):
        resolved_answers(q, d, mdset, mode="rewrite")


def test_auto_reports_both_failures(hard_chain):
    d = hard_chain.instance
    mdset = hard_chain.mdset
    q = parse_query("Q(x) :- R(x, y, z)", hard_chain.schema)
    tight = OracleBounds(max_tuples=1)
    with pytest.raises(BoundsExceededError) as exc:
        resolved_answers(q, d, mdset, bounds=tight)
    assert "rewrite path was not available" in str(exc.value)
    assert "LinearPairHard" in str(exc.value)


def test_answerset_helpers(majority_column):
    q = parse_query("Q(z) :- R(x, y, z)", majority_column.schema)
    ans = eval_cq(q, majority_column.instance)
    assert ("c2",) in ans
    assert len(ans) == 3
    assert ans.as_json() == [["c1"], ["c2"], ["c3"]]
