"""Entity resolution with matching dependencies.

The package turns a set of matching dependencies (MDs) over an instance
into: a tractability classification, the family of minimal resolved
instances (MRIs) for the tractable classes, and resolved answers to
conjunctive queries, either by query rewriting or by an exhaustive chase
oracle that doubles as the ground truth in tests.
"""

from .cqa import KeyedRelation, build_cqa_instance, enumerate_key_repairs
from .errors import (
    BoundsExceededError,
    InputError,
    MDResError,
    NotEligibleError,
    ParseError,
)
from .mds import (
    MD,
    AttrPartition,
    Classification,
    Conjunct,
    MDGraph,
    MDSet,
    build_md_graph,
    changeable_attrs,
    classify,
    eqr_class,
    eqr_classes,
    equivalent_sets,
    lr_components,
    parse_mds,
    previous_set,
)
from .query import (
    AnswerSet,
    ConjunctiveQuery,
    RewrittenQuery,
    eval_cq,
    eval_rewritten,
    is_ujcq,
    parse_query,
    resolved_answers,
    rewrite,
)
from .relation import (
    ChangeSet,
    Instance,
    Position,
    RelationSchema,
    Schema,
    diff_changeset,
    load_csv_dir,
    load_instance,
    load_schema,
    parse_schema,
    write_csv_dir,
)
from .resolver import (
    ChaseState,
    MRIFamily,
    OracleBounds,
    chase_step,
    enumerate_mris_oracle,
    fast_mri_family,
    is_stable,
    merge_partition,
    modifiable_positions,
    resolved_values,
)
from .similarity import (
    SimilaritySpec,
    check_all,
    check_transitivity,
    levenshtein,
    load_sims,
    parse_sims,
    similar,
    verify_transitivity,
)
from .taclosure import TAPartition, emit_datalog, ta_closure

__version__ = "0.1.0"

__all__ = [
    "AnswerSet",
    "AttrPartition",
    "BoundsExceededError",
    "ChangeSet",
    "ChaseState",
    "Classification",
    "Conjunct",
    "ConjunctiveQuery",
    "Instance",
    "InputError",
    "KeyedRelation",
    "MD",
    "MDGraph",
    "MDResError",
    "MDSet",
    "MRIFamily",
    "NotEligibleError",
    "OracleBounds",
    "ParseError",
    "Position",
    "RelationSchema",
    "RewrittenQuery",
    "Schema",
    "SimilaritySpec",
    "TAPartition",
    "build_cqa_instance",
    "build_md_graph",
    "changeable_attrs",
    "chase_step",
    "check_all",
    "check_transitivity",
    "classify",
    "diff_changeset",
    "emit_datalog",
    "enumerate_key_repairs",
    "enumerate_mris_oracle",
    "eqr_class",
    "eqr_classes",
    "equivalent_sets",
    "eval_cq",
    "eval_rewritten",
    "fast_mri_family",
    "is_stable",
    "is_ujcq",
    "levenshtein",
    "load_csv_dir",
    "load_instance",
    "load_schema",
    "load_sims",
    "lr_components",
    "merge_partition",
    "modifiable_positions",
    "parse_mds",
    "parse_query",
    "parse_schema",
    "parse_sims",
    "previous_set",
    "resolved_answers",
    "resolved_values",
    "rewrite",
    "similar",
    "ta_closure",
    "verify_transitivity",
    "write_csv_dir",
]
