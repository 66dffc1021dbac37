"""Tuple-attribute closure: which positions are forced to agree.

For every MD m and every MD m' with a directed path to m (including m
itself), each pair of tuples satisfying the conditions of m' links the
target positions of m. The closure of that link relation partitions the
positions of changeable attributes into blocks; positions in one block take
a single value in any resolved instance reachable without extra edits.

Similarities are always evaluated on the original instance here. That is
what makes the fast resolution path a one-shot computation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .dsets import DisjointSet
from .errors import InputError
from .mds import MD, MDSet, previous_set
from .relation import Attr, Instance, Position
from .similarity import SimilaritySpec, similar


@dataclass(frozen=True)
class TAPartition:
    """Partition of the changeable positions, with value frequencies from D.

    Blocks are tuples of positions in sorted order; the block list is sorted
    by each block's first position. Unlinked positions appear as singletons.
    """

    blocks: tuple[tuple[Position, ...], ...]
    counts: tuple[tuple[tuple[str, int], ...], ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, pos: Position) -> int:
        for i, block in enumerate(self.blocks):
            if pos in block:
                return i
        raise InputError(f"position {pos} is not in the partition")

    def blocks_at(self, attr: Attr) -> tuple[int, ...]:
        return tuple(
            i for i, block in enumerate(self.blocks)
            if any(p.attr == attr for p in block)
        )

    def candidates(self, i: int) -> tuple[str, ...]:
        """Most frequent values of block i, sorted."""
        best = max(n for _, n in self.counts[i])
        return tuple(sorted(v for v, n in self.counts[i] if n == best))

    def min_changes(self, i: int) -> int:
        return len(self.blocks[i]) - max(n for _, n in self.counts[i])

    def as_json(self) -> list[dict]:
        return [
            {
                "positions": [[p.attr[0], p.tid, p.attr[1]] for p in block],
                "values": {v: n for v, n in self.counts[i]},
                "candidates": list(self.candidates(i)),
            }
            for i, block in enumerate(self.blocks)
        ]


def _lhs_checker(md: MD, instance: Instance, sims: Mapping[str, SimilaritySpec]):
    checks = []
    for c in md.lhs:
        li = instance.schema.relation(c.left[0]).index(c.left[1])
        ri = instance.schema.relation(c.right[0]).index(c.right[1])
        try:
            spec = sims[c.sim]
        except KeyError:
            raise InputError(f"no similarity spec for {c.sim!r}") from None
        checks.append((li, ri, spec))

    def holds(row_left: tuple[str, ...], row_right: tuple[str, ...]) -> bool:
        return all(
            similar(spec, row_left[li], row_right[ri]) for li, ri, spec in checks
        )

    return holds


def linked_pairs(md: MD, instance: Instance, sims: Mapping[str, SimilaritySpec]):
    """Ordered tuple pairs (left tid, right tid) satisfying the conditions of md.

    For a self-matched relation the pairs range over all ordered pairs,
    including a tuple with itself.
    """
    holds = _lhs_checker(md, instance, sims)
    left_rows = list(instance.rows(md.left_rel))
    right_rows = list(instance.rows(md.right_rel))
    out = []
    for t1, row1 in left_rows:
        for t2, row2 in right_rows:
            if holds(row1, row2):
                out.append((t1, t2))
    return out


def ta_closure(d: Instance, mdset: MDSet) -> TAPartition:
    """Compute the closure partition of d under the MD set."""
    universe = d.positions(mdset.changeable)
    ds: DisjointSet[Position] = DisjointSet(universe)
    graph = mdset.graph
    for mi in mdset.mds:
        feeders = sorted(previous_set(graph, mi.mid))
        for mj_id in feeders:
            mj = mdset.by_id(mj_id)
            if (mj.left_rel, mj.right_rel) != (mi.left_rel, mi.right_rel):
                continue  # conditions type-check only against the same pair
            for t1, t2 in linked_pairs(mj, d, mdset.sims):
                for left, right in mi.rhs:
                    ds.union(Position(t1, left), Position(t2, right))
    blocks = sorted(tuple(sorted(g)) for g in ds.groups())
    counts = tuple(
        tuple(sorted(Counter(d.value(p) for p in block).items()))
        for block in blocks
    )
    return TAPartition(tuple(blocks), counts)


# ---------------------------------------------------------------------------
# Datalog emission

def _quote(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def _attr_const(attr: Attr) -> str:
    return _quote(f"{attr[0]}.{attr[1]}")


def emit_datalog(d: Instance, mdset: MDSet) -> str:
    """Render the closure computation as a datalog program.

    Facts: one `rel_<name>(tid, values...)` atom per tuple and one
    `sim('<md>', t1, t2)` atom per linked tuple pair. Rules: one seed rule
    per (target MD, match pair, feeding MD) triple, then the two closure
    rules over `ta`. Evaluating the program reproduces ta_closure: grouping
    the derived `ta` facts yields the same blocks.
    """
    lines = ["% tuple-attribute closure program"]
    lines.append("% relation facts")
    for rschema in d.schema.relations:
        for tid, row in d.rows(rschema.name):
            args = ", ".join([str(tid)] + [_quote(v) for v in row])
            lines.append(f"rel_{rschema.name}({args}).")
    lines.append("% per-MD similarity facts over tuple ids")
    for md in mdset.mds:
        for t1, t2 in sorted(linked_pairs(md, d, mdset.sims)):
            lines.append(f"sim('{md.mid}', {t1}, {t2}).")
    lines.append("% seed rules: conditions of a feeding MD link the targets")
    graph = mdset.graph
    for mi in mdset.mds:
        left_arity = d.schema.relation(mi.left_rel).arity
        right_arity = d.schema.relation(mi.right_rel).arity
        left_atom = f"rel_{mi.left_rel}(" + ", ".join(
            ["X"] + [f"X{k}" for k in range(1, left_arity + 1)]
        ) + ")"
        right_atom = f"rel_{mi.right_rel}(" + ", ".join(
            ["Y"] + [f"Y{k}" for k in range(1, right_arity + 1)]
        ) + ")"
        for left, right in mi.rhs:
            for mj_id in sorted(previous_set(graph, mi.mid)):
                mj = mdset.by_id(mj_id)
                if (mj.left_rel, mj.right_rel) != (mi.left_rel, mi.right_rel):
                    continue
                lines.append(
                    f"eqp(X, {_attr_const(left)}, Y, {_attr_const(right)}) :- "
                    f"{left_atom}, {right_atom}, sim('{mj.mid}', X, Y)."
                )
    lines.append("% closure")
    lines.append("ta(X, A, Y, B) :- eqp(X, A, Y, B).")
    lines.append("ta(X, A, Z, C) :- ta(X, A, Y, B), eqp(Y, B, Z, C).")
    return "\n".join(lines) + "\n"


def datalog_partition(d: Instance, mdset: MDSet) -> tuple[tuple[Position, ...], ...]:
    """Evaluate the emitted program and read the partition off the ta facts.

    Used to cross-check ta_closure; the two must agree exactly.
    """
    from .datalog import evaluate, parse_program

    program = parse_program(emit_datalog(d, mdset))
    derived = evaluate(program)
    ds: DisjointSet[Position] = DisjointSet(d.positions(mdset.changeable))
    for t1, a1, t2, a2 in derived.get("ta", set()):
        rel1, attr1 = str(a1).split(".", 1)
        rel2, attr2 = str(a2).split(".", 1)
        ds.union(Position(int(t1), (rel1, attr1)), Position(int(t2), (rel2, attr2)))
    return tuple(sorted(tuple(sorted(g)) for g in ds.groups()))
