"""Matching dependencies: parsing, the dependency graph, and the classifier.

An MD has the shape `R[A1] ~s1 S[B1], ... -> R[C1] == S[E1], ...`: when the
left-hand similarity conditions hold on a pair of tuples, the right-hand
attribute pairs must be made equal. A set of MDs is kept in standard form
(no two MDs share a left-hand side; right-hand sides of duplicates merge).

The classifier places a set into one of six buckets that drive everything
downstream. Three of them admit the fast resolution path:

- NonInteracting: the dependency graph has no edges.
- SimpleCycle: the graph is one cycle and the MDs are symmetric in the sense
  that every corresponding pair relates an attribute to itself, with at most
  one changeable left-hand attribute per MD.
- HitSimpleCycle: same MD shape, and every graph vertex is on a cycle or
  points directly at one.

Two-MD chains (exactly one edge) get the easy/hard analysis based on
equivalent sets and component structure; everything else is Unknown.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .dsets import DisjointSet
from .errors import InputError, NotEligibleError, ParseError
from .relation import Attr, Schema, format_attr
from .similarity import EQUALITY, SimilaritySpec

FAST_LABELS = frozenset({"NonInteracting", "SimpleCycle", "HitSimpleCycle"})


@dataclass(frozen=True)
class Conjunct:
    """One left-hand condition: `left ~sim right`."""

    left: Attr
    right: Attr
    sim: str

    def __str__(self) -> str:
        op = "=" if self.sim == "=" else f"~{self.sim}"
        return f"{format_attr(self.left)} {op} {format_attr(self.right)}"

    def canonical(self):
        return (frozenset((self.left, self.right)), self.sim)


@dataclass(frozen=True)
class MD:
    mid: str
    left_rel: str
    right_rel: str
    lhs: tuple[Conjunct, ...]
    rhs: tuple[tuple[Attr, Attr], ...]

    @property
    def lhs_attrs(self) -> frozenset[Attr]:
        return frozenset(a for c in self.lhs for a in (c.left, c.right))

    @property
    def rhs_attrs(self) -> frozenset[Attr]:
        return frozenset(a for pair in self.rhs for a in pair)

    @property
    def sims_used(self) -> frozenset[str]:
        return frozenset(c.sim for c in self.lhs)

    def __str__(self) -> str:
        lhs = ", ".join(str(c) for c in self.lhs)
        rhs = ", ".join(
            f"{format_attr(c)} == {format_attr(e)}" for c, e in self.rhs
        )
        return f"{self.mid}: {lhs} -> {rhs}"


@dataclass(eq=False)
class MDSet:
    """A standard-form set of MDs together with its schema and similarities."""

    mds: tuple[MD, ...]
    schema: Schema
    sims: dict[str, SimilaritySpec]

    def by_id(self, mid: str) -> MD:
        for md in self.mds:
            if md.mid == mid:
                return md
        raise InputError(f"no MD named {mid!r}")

    @cached_property
    def changeable(self) -> frozenset[Attr]:
        return frozenset(a for md in self.mds for a in md.rhs_attrs)

    @cached_property
    def graph(self) -> "MDGraph":
        return build_md_graph(self)

    def sims_used(self) -> frozenset[str]:
        return frozenset(name for md in self.mds for name in md.sims_used)

    def with_sims(self, sims: Mapping[str, SimilaritySpec]) -> "MDSet":
        merged = dict(self.sims)
        merged.update(sims)
        return MDSet(self.mds, self.schema, merged)


@dataclass(frozen=True)
class MDGraph:
    """Dependency graph: an edge a -> b when RHS(a) shares attributes with LHS(b)."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    @property
    def edgeless(self) -> bool:
        return not self.edges

    def successors(self, mid: str) -> tuple[str, ...]:
        return tuple(sorted(b for a, b in self.edges if a == mid))

    def predecessors(self, mid: str) -> tuple[str, ...]:
        return tuple(sorted(a for a, b in self.edges if b == mid))

    def on_cycle(self, mid: str) -> bool:
        """True when some path of length >= 1 leads from mid back to itself."""
        seen: set[str] = set()
        frontier = [b for a, b in self.edges if a == mid]
        while frontier:
            v = frontier.pop()
            if v == mid:
                return True
            if v in seen:
                continue
            seen.add(v)
            frontier.extend(self.successors(v))
        return False

    def is_single_cycle(self) -> bool:
        outs = {v: self.successors(v) for v in self.vertices}
        ins = {v: self.predecessors(v) for v in self.vertices}
        if any(len(outs[v]) != 1 or len(ins[v]) != 1 for v in self.vertices):
            return False
        start = self.vertices[0]
        seen = [start]
        v = outs[start][0]
        while v != start:
            seen.append(v)
            v = outs[v][0]
        return len(seen) == len(self.vertices)


@dataclass(frozen=True)
class AttrPartition:
    """Named partition of a set of attributes into blocks."""

    role: str
    blocks: tuple[tuple[Attr, ...], ...]

    def block_of(self, attr: Attr) -> tuple[Attr, ...]:
        for block in self.blocks:
            if attr in block:
                return block
        raise InputError(f"{format_attr(attr)} is not covered by this partition")


@dataclass(frozen=True)
class ESInfo:
    """An equivalent set of a two-MD chain, with its boundedness verdict."""

    attrs: tuple[Attr, ...]
    bound: bool
    side: str  # relation name the set belongs to

    def __str__(self) -> str:
        members = ", ".join(format_attr(a) for a in self.attrs)
        return f"{{{members}}} ({'bound' if self.bound else 'unbound'}, side {self.side})"


@dataclass(frozen=True)
class Classification:
    label: str
    evidence: tuple[str, ...]

    @property
    def fast(self) -> bool:
        return self.label in FAST_LABELS


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<matcheq>==)
  | (?P<eq>=)
  | (?P<tilde>~)
  | (?P<comma>,)
  | (?P<semi>;)
  | (?P<lbrack>\[)
  | (?P<rbrack>\])
  | (?P<ident>[A-Za-z_]\w*)
""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} in MD text")
        pos = m.end()
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append((kind, m.group()))
    return tokens


class _TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, kind: str) -> str:
        if self.peek() != kind:
            got = self.tokens[self.i][1] if self.i < len(self.tokens) else "end of input"
            raise ParseError(f"expected {kind}, got {got!r} in MD text")
        value = self.tokens[self.i][1]
        self.i += 1
        return value


def _parse_attr(ts: _TokenStream, schema: Schema) -> Attr:
    rel = ts.take("ident")
    ts.take("lbrack")
    name = ts.take("ident")
    ts.take("rbrack")
    attr = (rel, name)
    if not schema.has_attr(attr):
        raise InputError(f"unknown attribute {format_attr(attr)}")
    return attr


def _attr_tag(schema: Schema, attr: Attr) -> str:
    rschema = schema.relation(attr[0])
    return rschema.tags[rschema.index(attr[1])]


def parse_mds(
    text: str, schema: Schema, sims: Mapping[str, SimilaritySpec] | None = None
) -> MDSet:
    """Parse MD text into a standard-form MDSet.

    MDs are separated by `;`. Ids m1, m2, ... are assigned in input order;
    MDs with the same left-hand side are merged (their right-hand sides are
    concatenated) and ids reassigned over the merged list.
    """
    sims = dict(sims or {})
    sims.setdefault("=", EQUALITY)
    ts = _TokenStream(_tokenize(text))
    raw = []
    while ts.peek() is not None:
        conjuncts = []
        while True:
            left = _parse_attr(ts, schema)
            kind = ts.peek()
            if kind == "eq":
                ts.take("eq")
                sim_name = "="
            elif kind == "tilde":
                ts.take("tilde")
                sim_name = ts.take("ident")
                if sim_name not in sims:
                    raise InputError(f"unknown similarity {sim_name!r}")
            else:
                raise ParseError("expected a similarity operator (= or ~name)")
            right = _parse_attr(ts, schema)
            if _attr_tag(schema, left) != _attr_tag(schema, right):
                raise InputError(
                    f"condition {format_attr(left)} / {format_attr(right)}: "
                    "domain tags differ"
                )
            conjuncts.append(Conjunct(left, right, sim_name))
            if ts.peek() == "comma":
                ts.take("comma")
                continue
            break
        ts.take("arrow")
        matches = []
        while True:
            left = _parse_attr(ts, schema)
            ts.take("matcheq")
            right = _parse_attr(ts, schema)
            if _attr_tag(schema, left) != _attr_tag(schema, right):
                raise InputError(
                    f"match {format_attr(left)} / {format_attr(right)}: "
                    "domain tags differ"
                )
            matches.append((left, right))
            if ts.peek() == "comma":
                ts.take("comma")
                continue
            break
        raw.append((conjuncts, matches))
        if ts.peek() == "semi":
            ts.take("semi")
    if not raw:
        raise InputError("no MDs given")

    normalized = [_normalize(conjs, matches) for conjs, matches in raw]

    # Standard form: merge MDs with equal left-hand sides.
    merged: dict[frozenset, list] = {}
    order: list[frozenset] = []
    for left_rel, right_rel, conjs, matches in normalized:
        key = frozenset(c.canonical() for c in conjs)
        if key not in merged:
            merged[key] = [left_rel, right_rel, list(conjs), []]
            order.append(key)
        for pair in matches:
            if pair not in merged[key][3]:
                merged[key][3].append(pair)
    mds = tuple(
        MD(
            mid=f"m{i}",
            left_rel=merged[key][0],
            right_rel=merged[key][1],
            lhs=tuple(merged[key][2]),
            rhs=tuple(merged[key][3]),
        )
        for i, key in enumerate(order, start=1)
    )
    used = {c.sim for md in mds for c in md.lhs}
    return MDSet(mds, schema, {n: s for n, s in sims.items() if n in used or n == "="})


def _normalize(conjuncts: Sequence[Conjunct], matches: Sequence[tuple[Attr, Attr]]):
    """Orient an MD so the two relation occurrences appear in a fixed order.

    Every condition and match must span the same two relations (or a single
    relation related to itself). Similarities and matches are symmetric, so
    swapping the sides of individual conditions is harmless.
    """
    rels: set[str] = set()
    for c in conjuncts:
        rels.update((c.left[0], c.right[0]))
    for left, right in matches:
        rels.update((left[0], right[0]))
    if len(rels) > 2:
        raise InputError(
            f"an MD relates exactly two relation occurrences, got {sorted(rels)}"
        )
    if len(rels) == 1:
        rel = next(iter(rels))
        return rel, rel, tuple(conjuncts), tuple(matches)
    left_rel, right_rel = sorted(rels)
    oriented_conjs = []
    for c in conjuncts:
        if c.left[0] == left_rel and c.right[0] == right_rel:
            oriented_conjs.append(c)
        elif c.left[0] == right_rel and c.right[0] == left_rel:
            oriented_conjs.append(Conjunct(c.right, c.left, c.sim))
        else:
            raise InputError(
                f"condition {c} stays inside one relation while the MD spans two"
            )
    oriented_matches = []
    for left, right in matches:
        if left[0] == left_rel and right[0] == right_rel:
            oriented_matches.append((left, right))
        elif left[0] == right_rel and right[0] == left_rel:
            oriented_matches.append((right, left))
        else:
            raise InputError(
                f"match {format_attr(left)} == {format_attr(right)} stays inside "
                "one relation while the MD spans two"
            )
    return left_rel, right_rel, tuple(oriented_conjs), tuple(oriented_matches)


# ---------------------------------------------------------------------------
# Graph and structural helpers

def build_md_graph(mdset: MDSet) -> MDGraph:
    vertices = tuple(md.mid for md in mdset.mds)
    edges = set()
    for a in mdset.mds:
        for b in mdset.mds:
            if a.rhs_attrs & b.lhs_attrs:
                edges.add((a.mid, b.mid))
    return MDGraph(vertices, frozenset(edges))


def changeable_attrs(mdset: MDSet) -> frozenset[Attr]:
    return mdset.changeable


def previous_set(graph: MDGraph, mid: str) -> frozenset[str]:
    """All MDs with a directed path into mid, plus mid itself."""
    if mid not in graph.vertices:
        raise InputError(f"no MD named {mid!r} in the graph")
    seen = {mid}
    frontier = [mid]
    while frontier:
        v = frontier.pop()
        for p in graph.predecessors(v):
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return frozenset(seen)


def _components(pairs: Iterable[tuple], universe: Iterable) -> list[tuple]:
    ds: DisjointSet = DisjointSet(universe)
    for a, b in pairs:
        ds.union(a, b)
    blocks = [tuple(sorted(g)) for g in ds.groups()]
    blocks.sort()
    return blocks


def lr_components(md: MD) -> tuple[AttrPartition, AttrPartition]:
    """Connected components of the left-hand conditions and right-hand matches.

    Two attributes are related when some condition (resp. match) of the MD
    mentions them together; components are the transitive closure.
    """
    lhs_pairs = [(c.left, c.right) for c in md.lhs]
    rhs_pairs = list(md.rhs)
    lhs_universe = {a for p in lhs_pairs for a in p}
    rhs_universe = {a for p in rhs_pairs for a in p}
    return (
        AttrPartition("L-component", tuple(_components(lhs_pairs, lhs_universe))),
        AttrPartition("R-component", tuple(_components(rhs_pairs, rhs_universe))),
    )


def eqr_classes(mdset: MDSet) -> AttrPartition:
    """Classes of changeable attributes under the closure of the match relation."""
    ds: DisjointSet[Attr] = DisjointSet(mdset.changeable)
    for md in mdset.mds:
        for left, right in md.rhs:
            ds.union(left, right)
    blocks = [tuple(sorted(g)) for g in ds.groups()]
    blocks.sort()
    return AttrPartition("match-class", tuple(blocks))


def eqr_class(mdset: MDSet, attr: Attr) -> tuple[Attr, ...]:
    if attr not in mdset.changeable:
        return (attr,)
    return eqr_classes(mdset).block_of(attr)


# ---------------------------------------------------------------------------
# Two-MD chain analysis (side space)
#
# A chain m1 -> m2 is analyzed over "side attributes" ("L"/"R" occurrence
# copies). For two distinct relations this is plain renaming; for a single
# relation matched against itself it keeps the two occurrences apart.

_SIDE_L = "L"
_SIDE_R = "R"


class _SideView:
    def __init__(self, m1: MD, m2: MD):
        if {m1.left_rel, m1.right_rel} != {m2.left_rel, m2.right_rel}:
            raise NotEligibleError(
                "the two MDs of a chain must span the same relations"
            )
        self.rel_l, self.rel_r = m1.left_rel, m1.right_rel
        self.same_rel = self.rel_l == self.rel_r
        self.m1 = m1
        self.m2 = m2
        # parse_mds orients every MD over sorted relation names, so the two
        # MDs of a chain always agree on which occurrence is which.
        self.lhs1 = [(self._l(c.left), self._r(c.right), c.sim) for c in m1.lhs]
        self.rhs1 = [(self._l(a), self._r(b)) for a, b in m1.rhs]
        self.lhs2 = [(self._l(c.left), self._r(c.right), c.sim) for c in m2.lhs]
        self.rhs2 = [(self._l(a), self._r(b)) for a, b in m2.rhs]
        self.lhs1_attrs = {a for l, r, _ in self.lhs1 for a in (l, r)}
        self.lhs2_attrs = {a for l, r, _ in self.lhs2 for a in (l, r)}
        self.rhs1_attrs = {a for p in self.rhs1 for a in p}

    def _l(self, attr: Attr):
        return (_SIDE_L, attr[1]) if attr[0] == self.rel_l else (_SIDE_R, attr[1])

    def _r(self, attr: Attr):
        if self.same_rel:
            return (_SIDE_R, attr[1])
        return (_SIDE_L, attr[1]) if attr[0] == self.rel_l else (_SIDE_R, attr[1])

    def real(self, side_attr) -> Attr:
        return (self.rel_l if side_attr[0] == _SIDE_L else self.rel_r, side_attr[1])

    def show(self, side_attr) -> str:
        base = format_attr(self.real(side_attr))
        if self.same_rel:
            base += "@left" if side_attr[0] == _SIDE_L else "@right"
        return base

    def side_name(self, side: str) -> str:
        if not self.same_rel:
            return self.rel_l if side == _SIDE_L else self.rel_r
        return f"{self.rel_l}/left" if side == _SIDE_L else f"{self.rel_l}/right"

    def equivalent_sets(self, side: str):
        """TC classes of the relating-relation restricted to one side, filtered
        to classes that touch LHS(m2)."""
        l_comp_m2 = DisjointSet(
            a for l, r, _ in self.lhs2 for a in (l, r)
        )
        for l, r, _ in self.lhs2:
            l_comp_m2.union(l, r)
        r_comp_m1 = DisjointSet(a for p in self.rhs1 for a in p)
        for a, b in self.rhs1:
            r_comp_m1.union(a, b)
        pool = sorted(
            a for a in (self.rhs1_attrs | self.lhs2_attrs) if a[0] == side
        )
        ds = DisjointSet(pool)
        for i, a in enumerate(pool):
            for b in pool[i + 1 :]:
                same_r1 = a in r_comp_m1 and b in r_comp_m1 and r_comp_m1.same(a, b)
                same_l2 = a in l_comp_m2 and b in l_comp_m2 and l_comp_m2.same(a, b)
                if same_r1 or same_l2:
                    ds.union(a, b)
        classes = [tuple(sorted(g)) for g in ds.groups()]
        classes.sort()
        return [c for c in classes if any(a in self.lhs2_attrs for a in c)]


def _chain_edge(mdset: MDSet) -> tuple[MD, MD] | None:
    g = mdset.graph
    if len(g.vertices) != 2 or len(g.edges) != 1:
        return None
    (a, b) = next(iter(g.edges))
    if a == b:
        return None
    return mdset.by_id(a), mdset.by_id(b)


def equivalent_sets(mdset: MDSet) -> list[ESInfo]:
    """Equivalent sets of a two-MD chain over distinct relations."""
    edge = _chain_edge(mdset)
    if edge is None:
        raise NotEligibleError("equivalent sets are defined for two-MD chains only")
    m1, m2 = edge
    if m1.left_rel == m1.right_rel:
        raise NotEligibleError(
            "equivalent sets over a self-matched relation are not exposed; "
            "classification handles that case internally"
        )
    view = _SideView(m1, m2)
    out = []
    for side in (_SIDE_L, _SIDE_R):
        for cls in view.equivalent_sets(side):
            attrs = tuple(sorted(view.real(a) for a in cls))
            bound = any(a in view.lhs1_attrs for a in cls)
            out.append(ESInfo(attrs, bound, view.side_name(side)))
    return out


def _classify_chain(mdset: MDSet, sims: Mapping[str, SimilaritySpec]) -> Classification:
    m1, m2 = _chain_edge(mdset)  # type: ignore[misc]
    evidence = [f"chain: {m1.mid} feeds {m2.mid}"]
    try:
        view = _SideView(m1, m2)
    except NotEligibleError as exc:
        return Classification("Unknown", (*evidence, str(exc)))

    overlap = view.rhs1_attrs & view.lhs2_attrs
    l_comps_m1 = _components(
        [(l, r) for l, r, _ in view.lhs1], view.lhs1_attrs
    )

    side_ok: dict[str, bool] = {}
    for side in (_SIDE_L, _SIDE_R):
        name = view.side_name(side)
        held = []
        if not any(a[0] == side for a in overlap):
            held.append(
                f"(i) no {name} attribute is shared between the targets of "
                f"{m1.mid} and the conditions of {m2.mid}"
            )
        es = view.equivalent_sets(side)
        unbound = [c for c in es if not any(a in view.lhs1_attrs for a in c)]
        if not unbound:
            held.append(
                f"(ii) every equivalent set on {name} is bound"
                + (f" ({len(es)} sets)" if es else " (no sets)")
            )
        comp_ok = all(
            any(a[0] == side and a in view.lhs2_attrs for a in comp)
            for comp in l_comps_m1
        )
        if comp_ok:
            held.append(
                f"(iii) each condition component of {m1.mid} reaches the "
                f"conditions of {m2.mid} through a {name} attribute"
            )
        if held:
            side_ok[side] = True
            evidence.append(f"side {name}: " + held[0])
        else:
            side_ok[side] = False
            shared = sorted(view.show(a) for a in overlap if a[0] == side)
            ubs = ["{" + ", ".join(view.show(a) for a in c) + "}" for c in unbound]
            evidence.append(
                f"side {name}: no easiness clause holds "
                f"(shared attributes: {shared or 'none'}; "
                f"unbound equivalent sets: {ubs or 'none'})"
            )

    syntactic_easy = side_ok[_SIDE_L] and side_ok[_SIDE_R]

    used = sorted(m1.sims_used | m2.sims_used)
    flags = {name: (sims[name].transitive if name in sims else None) for name in used}
    non_transitive = sorted(n for n, f in flags.items() if f is False)
    unchecked = sorted(n for n, f in flags.items() if f is None)

    if syntactic_easy and not non_transitive and not unchecked:
        evidence.append(f"similarities transitive: {', '.join(used)}")
        return Classification("LinearPairEasy", tuple(evidence))

    if syntactic_easy and unchecked and not non_transitive:
        evidence.append(
            "transitivity not yet checked for: " + ", ".join(unchecked)
        )
        return Classification("Unknown", tuple(evidence))

    if non_transitive:
        evidence.append(
            "non-transitive similarities break the easiness condition: "
            + ", ".join(non_transitive)
        )

    rhs_shared = sorted(m1.rhs_attrs & m2.rhs_attrs)
    if not rhs_shared:
        evidence.append(f"targets of {m1.mid} and {m2.mid} are disjoint")
        evidence.append(
            "hardness assumes each similarity admits unboundedly many "
            "mutually dissimilar values"
        )
        return Classification("LinearPairHard", tuple(evidence))

    evidence.append(
        "targets overlap ("
        + ", ".join(format_attr(a) for a in rhs_shared)
        + "); neither the easy nor the hard criterion applies"
    )
    return Classification("Unknown", tuple(evidence))


def classify(
    mdset: MDSet, sims: Mapping[str, SimilaritySpec] | None = None
) -> Classification:
    """Structural classification of an MD set.

    `sims` overrides the set's similarity specs; pass specs whose transitivity
    verdicts were checked against the instance at hand when chain labels
    should be decided rather than Unknown.
    """
    sims = dict(sims) if sims is not None else mdset.sims
    g = mdset.graph
    if g.edgeless:
        return Classification(
            "NonInteracting", ("dependency graph has no edges",)
        )

    pair_fail = None
    for md in mdset.mds:
        for c in md.lhs:
            if c.left != c.right:
                pair_fail = f"condition {c} of {md.mid} relates distinct attributes"
                break
        if pair_fail:
            break
        for left, right in md.rhs:
            if left != right:
                pair_fail = (
                    f"match {format_attr(left)} == {format_attr(right)} of "
                    f"{md.mid} relates distinct attributes"
                )
                break
        if pair_fail:
            break

    lhs_fail = None
    for md in mdset.mds:
        touched = sorted(md.lhs_attrs & mdset.changeable)
        if len(touched) > 1:
            lhs_fail = (
                f"{md.mid} conditions on {len(touched)} changeable attributes "
                f"({', '.join(format_attr(a) for a in touched)})"
            )
            break

    if pair_fail is None and lhs_fail is None:
        symmetric_ev = (
            "every condition and match relates an attribute to itself",
            "each MD conditions on at most one changeable attribute",
        )
        if g.is_single_cycle():
            cycle = " -> ".join(g.vertices + (g.vertices[0],))
            return Classification(
                "SimpleCycle", (f"dependency graph is the cycle {cycle}",) + symmetric_ev
            )
        on_cycle = {v for v in g.vertices if g.on_cycle(v)}
        if on_cycle and all(
            v in on_cycle or any(w in on_cycle for w in g.successors(v))
            for v in g.vertices
        ):
            outside = sorted(set(g.vertices) - on_cycle)
            ev = (
                "every MD is on a cycle"
                if not outside
                else "every MD is on a cycle or feeds one directly "
                f"(off-cycle: {', '.join(outside)})"
            )
            return Classification("HitSimpleCycle", (ev,) + symmetric_ev)

    if _chain_edge(mdset) is not None:
        return _classify_chain(mdset, sims)

    reasons = ["no fast structure and not a two-MD chain"]
    if pair_fail:
        reasons.append(pair_fail)
    if lhs_fail:
        reasons.append(lhs_fail)
    return Classification("Unknown", tuple(reasons))
