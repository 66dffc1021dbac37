import itertools

import pytest

from mdres import (
    BoundsExceededError,
    NotEligibleError,
    OracleBounds,
    chase_step,
    diff_changeset,
    enumerate_mris_oracle,
    fast_mri_family,
    is_stable,
    merge_partition,
    modifiable_positions,
    parse_mds,
    parse_schema,
    resolved_values,
    similar,
)
from mdres.relation import Position
from mdres.resolver import ChaseState, _fresh_values

from conftest import load_bundle
from reference import ref_modifiable, ref_stable


def test_merge_partition_dup_groups(dup_groups):
    blocks = merge_partition(dup_groups.instance, dup_groups.mdset)
    shaped = [
        (tuple(b.positions), tuple(sorted(b.values)), b.uniform) for b in blocks
    ]
    assert shaped == [
        ((Position(1, ("R", "B")), Position(2, ("R", "B"))), ("c1", "c2"), False),
        ((Position(3, ("R", "B")), Position(4, ("R", "B"))), ("c3", "c4"), False),
    ]


def test_modifiable_positions_cross_relation_chain(hard_chain):
    got = modifiable_positions(hard_chain.instance, hard_chain.mdset)
    assert got == frozenset({
        Position(1, ("R", "B")),
        Position(2, ("S", "F")),
        Position(3, ("R", "B")),
        Position(4, ("S", "F")),
    })
    assert got == ref_modifiable(hard_chain.instance, hard_chain.mdset)


def test_stability(dup_groups):
    assert not is_stable(dup_groups.instance, dup_groups.mdset)
    assert is_stable(dup_groups.variant("D1"), dup_groups.mdset)
    assert is_stable(dup_groups.variant("D2"), dup_groups.mdset)
    assert ref_stable(dup_groups.variant("D1"), dup_groups.mdset)


def test_chase_step_counts_values_only(dup_groups):
    state = ChaseState.start(dup_groups.instance, dup_groups.mdset)
    succ = chase_step(state, dup_groups.mdset)
    # two open blocks with two candidate values each
    assert len(succ) == 4
    assert all(s.depth == 1 for s in succ)
    assert all(is_stable(s.instance, dup_groups.mdset) for s in succ)


def test_chase_step_counts_with_fresh(dup_groups):
    state = ChaseState.start(dup_groups.instance, dup_groups.mdset)
    succ = chase_step(state, dup_groups.mdset, choice="values+fresh")
    # each block gains one fresh option: (2+1) * (2+1)
    assert len(succ) == 9


def test_chase_step_on_stable_instance_is_identity(dup_groups):
    d1 = dup_groups.variant("D1")
    state = ChaseState.start(d1, dup_groups.mdset)
    succ = chase_step(state, dup_groups.mdset)
    assert len(succ) == 1
    assert succ[0].instance == d1
    assert succ[0].depth == 1


def test_fresh_values_dissimilar_everywhere(two_rule_cycle):
    fresh = _fresh_values(two_rule_cycle.instance, two_rule_cycle.mdset, 3)
    assert len(set(fresh)) == 3
    domain = two_rule_cycle.instance.active_domain()
    spec = two_rule_cycle.sims["s"]
    for v in fresh:
        assert v not in domain
        for other in itertools.chain(domain, (x for x in fresh if x != v)):
            assert not similar(spec, v, other)


def test_oracle_dup_groups_exact(dup_groups):
    mris, min_change = enumerate_mris_oracle(dup_groups.instance, dup_groups.mdset)
    assert min_change == 2
    assert len(mris) == 4
    d1 = dup_groups.variant("D1")
    assert any(mri == d1 for mri in mris)
    diffs = sorted(len(diff_changeset(dup_groups.instance, m)) for m in mris)
    assert diffs == [2, 2, 2, 2]
    for mri in mris:
        assert is_stable(mri, dup_groups.mdset)


def test_oracle_ignores_costlier_fresh_merges(dup_groups):
    # fresh values stabilize too, but they change every block member
    mris, min_change = enumerate_mris_oracle(dup_groups.instance, dup_groups.mdset)
    domain = dup_groups.instance.active_domain()
    for mri in mris:
        assert mri.active_domain() <= domain


def test_oracle_two_rule_cycle(two_rule_cycle):
    mris, min_change = enumerate_mris_oracle(
        two_rule_cycle.instance, two_rule_cycle.mdset
    )
    assert len(mris) == 16
    assert min_change == 6
    for mri in mris:
        a_col = set(mri.column("R", "A"))
        b_col = set(mri.column("R", "B"))
        assert len(a_col) == 1 and len(b_col) == 1


def test_oracle_bounds_enforced(two_rule_cycle):
    with pytest.raises(BoundsExceededError):
        enumerate_mris_oracle(
            two_rule_cycle.instance, two_rule_cycle.mdset,
            bounds=OracleBounds(max_values=2),
        )
    with pytest.raises(BoundsExceededError):
        enumerate_mris_oracle(
            two_rule_cycle.instance, two_rule_cycle.mdset,
            bounds=OracleBounds(max_tuples=3),
        )
    with pytest.raises(BoundsExceededError):
        enumerate_mris_oracle(
            two_rule_cycle.instance, two_rule_cycle.mdset,
            bounds=OracleBounds(max_states=5),
        )


def test_fast_family_matches_oracle_on_fixtures():
    for name in ("dup_groups", "simple_cycle", "two_rule_cycle",
                 "majority_column", "three_rel_join"):
        bundle = load_bundle(name)
        family = fast_mri_family(bundle.instance, bundle.mdset)
        mris, min_change = enumerate_mris_oracle(bundle.instance, bundle.mdset)
        assert family.count == len(mris), name
        assert family.min_change == min_change, name
        materialized, truncated = family.materialize()
        assert not truncated
        assert sorted(m.key() for m in materialized) == sorted(m.key() for m in mris), name


def test_fast_family_canonical_is_smallest(dup_groups):
    family = fast_mri_family(dup_groups.instance, dup_groups.mdset)
    materialized, _ = family.materialize()
    canon = family.canonical()
    assert min(m.key() for m in materialized) == canon.key()


def test_materialize_truncates(dup_groups):
    family = fast_mri_family(dup_groups.instance, dup_groups.mdset)
    materialized, truncated = family.materialize(limit=3)
    assert truncated and len(materialized) == 3


def test_fast_family_refuses_slow_classes(hard_chain):
    with pytest.raises(NotEligibleError):
        fast_mri_family(hard_chain.instance, hard_chain.mdset)


def test_resolved_values(majority_column):
    d, m = majority_column.instance, majority_column.mdset
    assert resolved_values(d, m, "R", "B") == ("b2",)
    # unchangeable columns resolve to their projection
    assert resolved_values(d, m, "R", "A") == ("a1",)
    assert resolved_values(d, m, "R", "C") == ("c1", "c2", "c3")


def test_resolved_values_empty_on_ties(dup_groups):
    assert resolved_values(dup_groups.instance, dup_groups.mdset, "R", "B") == ()


def test_resolved_values_validates_attr(dup_groups):
    from mdres import InputError

    with pytest.raises(InputError):
        resolved_values(dup_groups.instance, dup_groups.mdset, "R", "Z")
