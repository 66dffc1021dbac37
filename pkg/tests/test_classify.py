"""Label corpus for the tractability classifier.

Every verdict here was worked out by hand from the defining conditions
before the classifier existed; the evidence strings pin down WHICH clause
produced each verdict, not just the label.
"""

import pytest

from mdres import classify, parse_mds, parse_schema
from mdres.mds import FAST_LABELS
from mdres.similarity import SimilaritySpec

from conftest import load_bundle


def _ev(cls, needle: str) -> bool:
    return any(needle in line for line in cls.evidence)


def test_non_interacting(dup_groups, three_rel_join):
    for bundle in (dup_groups, three_rel_join):
        cls = classify(bundle.mdset)
        assert cls.label == "NonInteracting"
        assert cls.fast
        assert _ev(cls, "no edges")


def test_simple_cycle_fixtures(two_rule_cycle):
    cls = classify(two_rule_cycle.mdset, two_rule_cycle.sims)
    assert cls.label == "SimpleCycle"
    assert cls.fast
    sc = load_bundle("simple_cycle")
    cls2 = classify(sc.mdset, sc.sims)
    assert cls2.label == "SimpleCycle"
    assert _ev(cls2, "at most one changeable")


def test_hit_simple_cycle_tail():
    schema = parse_schema("relation R(A:str, B:str, C:str, E:str)")
    mdset = parse_mds(
        "R[A] ~s R[A] -> R[B] == R[B];"
        "R[B] ~s R[B] -> R[A] == R[A];"
        "R[C] ~s R[C] -> R[A] == R[A], R[E] == R[E]",
        schema,
        {"s": SimilaritySpec(name="s", kind="lev", max_distance=1)},
    )
    cls = classify(mdset, mdset.sims)
    assert cls.label == "HitSimpleCycle"
    assert cls.fast


def test_hard_chain(hard_chain):
    cls = classify(hard_chain.mdset)
    assert cls.label == "LinearPairHard"
    assert not cls.fast
    assert _ev(cls, "no easiness clause holds")
    assert _ev(cls, "targets of m1 and m2 are disjoint")
    # the verdict leans on an assumption about the similarity space
    assert _ev(cls, "unboundedly many mutually dissimilar values")


def test_joined_chain_is_easy():
    bundle = load_bundle("hard_chain", mds="mds_joined.txt")
    cls = classify(bundle.mdset)
    assert cls.label == "LinearPairEasy"
    assert _ev(cls, "(iii)")


def test_overlap_pair_easy_under_equality():
    bundle = load_bundle("overlap_pair", sims="sims_eq.txt")
    cls = classify(bundle.mdset, bundle.sims)
    assert cls.label == "LinearPairEasy"
    # bound equivalent sets carry this one; the component clause fails
    assert _ev(cls, "(ii) every equivalent set on R is bound")
    assert _ev(cls, "(ii) every equivalent set on S is bound")


def test_overlap_pair_hard_under_table_sim():
    bundle = load_bundle("overlap_pair", sims="sims_table.txt")
    cls = classify(bundle.mdset, bundle.sims)
    assert cls.label == "LinearPairHard"
    assert _ev(cls, "non-transitive similarities break the easiness condition: w")


def test_filtered_chain_easy_via_components():
    bundle = load_bundle("filtered_chain")
    cls = classify(bundle.mdset, bundle.sims)
    assert cls.label == "LinearPairEasy"
    assert _ev(cls, "(iii) each condition component of m1 reaches")
    assert _ev(cls, "similarities transitive: s")


def test_multi_target_pair_hard():
    bundle = load_bundle("multi_target_pair")
    cls = classify(bundle.mdset, bundle.sims)
    assert cls.label == "LinearPairHard"
    assert _ev(cls, "unbound equivalent sets")


def test_bound_pair_easy_via_equivalent_sets():
    bundle = load_bundle("bound_pair")
    cls = classify(bundle.mdset, bundle.sims)
    assert cls.label == "LinearPairEasy"
    assert _ev(cls, "(ii) every equivalent set on R is bound")


def test_easy_and_hard_labels_are_not_fast():
    assert "LinearPairEasy" not in FAST_LABELS
    assert "LinearPairHard" not in FAST_LABELS
    assert FAST_LABELS == {"NonInteracting", "SimpleCycle", "HitSimpleCycle"}


def test_same_relation_chain_classified_through_occurrence_sides():
    schema = parse_schema("relation R(A:str, B:str, C:str)")
    mdset = parse_mds(
        "R[A] = R[A] -> R[B] == R[B]; R[B] = R[B] -> R[C] == R[C]", schema
    )
    cls = classify(mdset)
    assert cls.label == "LinearPairHard"
    assert _ev(cls, "R/left") and _ev(cls, "R/right")


def test_overlapping_targets_stay_unknown():
    schema = parse_schema(
        "relation R(A:str, B:str, C:str)\nrelation S(E:str, F:str, G:str)"
    )
    mdset = parse_mds(
        "R[A] = S[E] -> R[B] == S[F], R[C] == S[G];"
        "R[B] = S[F] -> R[C] == S[G]",
        schema,
    )
    cls = classify(mdset)
    assert cls.label == "Unknown"
    assert _ev(cls, "targets overlap")


def test_unchecked_transitivity_stays_unknown():
    lev = SimilaritySpec(name="s", kind="lev", max_distance=1,
                         declared_transitive=True)
    schema = parse_schema(
        "relation R(A:str, C:str, E:str, G:str, I:str)\n"
        "relation S(B:str, F:str, H:str, J:str)"
    )
    mdset = parse_mds(
        "R[A] ~s S[B], R[C] ~s S[B], R[E] ~s S[F] -> R[G] == S[H];"
        "R[G] ~s S[H], R[A] ~s S[B], R[E] ~s S[F] -> R[I] == S[J]",
        schema, {"s": lev},
    )
    cls = classify(mdset, mdset.sims)
    assert cls.label == "Unknown"
    assert _ev(cls, "transitivity not yet checked for: s")


def test_cross_relation_pair_chain_unknown():
    schema = parse_schema(
        "relation R(A:str, B:str)\nrelation S(E:str, F:str, G:str)\n"
        "relation T(H:str, I:str)"
    )
    mdset = parse_mds(
        "R[A] = S[E] -> R[B] == S[F]; S[F] = T[H] -> S[G] == T[I]", schema
    )
    cls = classify(mdset)
    assert cls.label == "Unknown"
    assert _ev(cls, "must span the same relations")


def test_longer_paths_unknown():
    schema = parse_schema("relation R(A:str, B:str, C:str, E:str)")
    mdset = parse_mds(
        "R[A] = R[A] -> R[B] == R[B];"
        "R[B] = R[B] -> R[C] == R[C];"
        "R[C] = R[C] -> R[E] == R[E]",
        schema,
    )
    cls = classify(mdset)
    assert cls.label == "Unknown"
    assert _ev(cls, "not a two-MD chain")
