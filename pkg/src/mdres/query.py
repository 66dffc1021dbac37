"""Conjunctive queries and resolved-answer evaluation.

A resolved answer is a tuple returned by the query on every minimal resolved
instance. Two evaluation paths produce them:

- rewrite: for join-safe queries over fast-path MD sets, each atom touching
  changeable attributes is replaced by a copy that existentially ignores the
  stored value and instead demands, for every free variable at a changeable
  position, that the bound value win a strict majority inside the closure
  block of the witness position. Polynomial, no instances materialized.
- oracle: evaluate the query on every MRI produced by the exhaustive chase
  and intersect the answer sets.

Join safety (what the rewrite needs): no constant sits at a changeable
position, and no non-free variable with two or more occurrences does.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BoundsExceededError, InputError, NotEligibleError, ParseError
from .mds import MDSet, classify, eqr_class
from .relation import Attr, Instance, Position, Schema
from .resolver import OracleBounds, enumerate_mris_oracle
from .taclosure import ta_closure


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: str

    def __str__(self) -> str:
        return f"'{self.value}'"


@dataclass(frozen=True)
class Atom:
    rel: str
    terms: tuple

    def __str__(self) -> str:
        return f"{self.rel}({', '.join(str(t) for t in self.terms)})"


@dataclass(frozen=True)
class ConjunctiveQuery:
    name: str
    head: tuple[Var, ...]
    atoms: tuple[Atom, ...]

    @property
    def free(self) -> frozenset[str]:
        return frozenset(v.name for v in self.head)

    def __str__(self) -> str:
        head = f"{self.name}({', '.join(str(v) for v in self.head)})"
        return f"{head} :- {', '.join(str(a) for a in self.atoms)}"


@dataclass(frozen=True)
class AnswerSet:
    tuples: tuple[tuple[str, ...], ...]
    provenance: str  # "direct" | "rewrite" | "oracle"

    def __len__(self) -> int:
        return len(self.tuples)

    def __contains__(self, item) -> bool:
        return tuple(item) in self.tuples

    @property
    def boolean_true(self) -> bool:
        return () in self.tuples

    def as_json(self) -> list[list[str]]:
        return [list(t) for t in self.tuples]


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<impl>:-)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<dot>\.)
  | (?P<number>-?\d+)
  | (?P<string>'(?:[^']|'')*')
  | (?P<ident>[A-Za-z_]\w*)
""",
    re.VERBOSE,
)


def parse_query(text: str, schema: Schema) -> ConjunctiveQuery:
    """Parse `Q(x, y) :- R(x, 'c'), S(y, z)` against the schema.

    Head terms must be variables; every head variable must occur in the
    body; atom arities must match the schema. Variables are lower-case
    identifiers, constants are 'quoted' or integer literals.

    Free-variable repetition is legal here; whether a query is join-safe
    for the rewrite is a separate check (is_ujcq).
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} in query")
        pos = m.end()
        if m.lastgroup not in ("ws", "comment"):
            tokens.append((m.lastgroup, m.group()))
    i = 0

    def expect(kind: str) -> str:
        nonlocal i
        if i >= len(tokens) or tokens[i][0] != kind:
            got = tokens[i][1] if i < len(tokens) else "end of input"
            raise ParseError(f"expected {kind} in query, got {got!r}")
        value = tokens[i][1]
        i += 1
        return value

    def at(kind: str) -> bool:
        return i < len(tokens) and tokens[i][0] == kind

    def parse_term():
        nonlocal i
        kind, value = tokens[i]
        if kind == "number":
            i += 1
            return Const(value)
        if kind == "string":
            i += 1
            return Const(value[1:-1].replace("''", "'"))
        if kind == "ident":
            i += 1
            if not value[0].islower():
                raise ParseError(f"variables are lower-case, got {value!r}")
            return Var(value)
        raise ParseError(f"expected a term, got {value!r}")

    name = expect("ident")
    expect("lparen")
    head: list[Var] = []
    if not at("rparen"):
        while True:
            term = parse_term()
            if not isinstance(term, Var):
                raise ParseError("head terms must be variables")
            head.append(term)
            if at("comma"):
                expect("comma")
                continue
            break
    expect("rparen")
    expect("impl")
    atoms: list[Atom] = []
    while True:
        rel = expect("ident")
        if not schema.has_relation(rel):
            raise InputError(f"query mentions unknown relation {rel!r}")
        expect("lparen")
        terms = [parse_term()]
        while at("comma"):
            expect("comma")
            terms.append(parse_term())
        expect("rparen")
        arity = schema.relation(rel).arity
        if len(terms) != arity:
            raise InputError(
                f"atom over {rel} has {len(terms)} terms, relation has arity {arity}"
            )
        atoms.append(Atom(rel, tuple(terms)))
        if at("comma"):
            expect("comma")
            continue
        break
    if at("dot"):
        expect("dot")
    if i < len(tokens):
        raise ParseError(f"trailing input in query: {tokens[i][1]!r}")
    body_vars = {t.name for a in atoms for t in a.terms if isinstance(t, Var)}
    for v in head:
        if v.name not in body_vars:
            raise InputError(f"head variable {v.name} does not occur in the body")
    return ConjunctiveQuery(name, tuple(head), tuple(atoms))


# ---------------------------------------------------------------------------
# Plain evaluation

def _eval_tuples(q: ConjunctiveQuery, d: Instance) -> set[tuple[str, ...]]:
    results: set[tuple[str, ...]] = set()

    def rec(k: int, binding: dict):
        if k == len(q.atoms):
            results.add(tuple(binding[v.name] for v in q.head))
            return
        atom = q.atoms[k]
        for _, row in d.rows(atom.rel):
            nb = binding
            copied = False
            ok = True
            for term, value in zip(atom.terms, row):
                if isinstance(term, Const):
                    if term.value != value:
                        ok = False
                        break
                else:
                    bound = nb.get(term.name)
                    if bound is None:
                        if not copied:
                            nb = dict(nb)
                            copied = True
                        nb[term.name] = value
                    elif bound != value:
                        ok = False
                        break
            if ok:
                rec(k + 1, nb)

    rec(0, {})
    return results


def eval_cq(q: ConjunctiveQuery, d: Instance) -> AnswerSet:
    """Evaluate the query directly on the instance."""
    return AnswerSet(tuple(sorted(_eval_tuples(q, d))), "direct")


# ---------------------------------------------------------------------------
# Join safety

def is_ujcq(q: ConjunctiveQuery, mdset: MDSet) -> tuple[bool, str | None]:
    """Check join safety for the rewrite; returns (verdict, witness).

    The witness names the first offending constant or variable.
    """
    occurrences: dict[str, int] = {}
    for atom in q.atoms:
        for term in atom.terms:
            if isinstance(term, Var):
                occurrences[term.name] = occurrences.get(term.name, 0) + 1
    free = q.free
    schema = mdset.schema
    for idx, atom in enumerate(q.atoms, start=1):
        attrs = schema.relation(atom.rel).attrs
        for j, term in enumerate(atom.terms):
            attr = (atom.rel, attrs[j])
            if attr not in mdset.changeable:
                continue
            if isinstance(term, Const):
                return False, (
                    f"constant '{term.value}' sits at changeable position "
                    f"{atom.rel}[{attrs[j]}] (atom {idx})"
                )
            if term.name not in free and occurrences[term.name] >= 2:
                return False, (
                    f"variable {term.name} occurs {occurrences[term.name]} times "
                    f"and sits at changeable position {atom.rel}[{attrs[j]}] "
                    f"(atom {idx})"
                )
    return True, None


# ---------------------------------------------------------------------------
# Rewriting

@dataclass(frozen=True)
class MajorityCondition:
    """One strict-majority requirement: the value of `var` must be the unique
    winner of the closure block anchored at position `pos` of the atom."""

    pos: int
    var: str
    attr: Attr
    klass: tuple[Attr, ...]


@dataclass(frozen=True)
class RewrittenAtom:
    original: Atom
    primed: Atom | None  # None: the atom is untouched
    conditions: tuple[MajorityCondition, ...]


@dataclass(frozen=True)
class RewrittenQuery:
    name: str
    head: tuple[Var, ...]
    atoms: tuple[RewrittenAtom, ...]
    mdset: MDSet

    def render(self) -> str:
        head = f"{self.name}({', '.join(str(v) for v in self.head)})"
        parts = []
        for ra in self.atoms:
            if ra.primed is None:
                parts.append(str(ra.original))
            else:
                parts.append(_render_rewritten(ra, self.mdset.schema))
        return f"{head} :- {', '.join(parts)}"

    def __str__(self) -> str:
        return self.render()


def _render_count(
    schema: Schema, member: Attr, ordinal: int, value_var: str,
    anchor: str, exclude: str | None,
) -> str:
    rschema = schema.relation(member[0])
    slot = rschema.index(member[1])
    terms = [
        value_var if k == slot else f"{name.lower()}{ordinal}'"
        for k, name in enumerate(rschema.attrs)
    ]
    atom_txt = f"{member[0]}({', '.join(terms)})"
    ta_txt = f"ta({anchor}, {atom_txt}[{member[1]}])"
    guard = f", {value_var} != {exclude}" if exclude else ""
    return f"#{{{atom_txt} : {ta_txt}{guard}}}"


def _render_rewritten(ra: RewrittenAtom, schema: Schema) -> str:
    primed_vars = ", ".join(
        str(ra.primed.terms[c.pos]) for c in ra.conditions
    )
    pieces = [str(ra.primed)]
    for c in ra.conditions:
        anchor = f"{ra.primed}[{c.attr[1]}]"
        sum1 = " + ".join(
            _render_count(schema, member, k, c.var, anchor, None)
            for k, member in enumerate(c.klass, start=1)
        )
        sum2 = " + ".join(
            _render_count(schema, member, k, f"{c.var}''", anchor, c.var)
            for k, member in enumerate(c.klass, start=1)
        )
        pieces.append(f"forall {c.var}'' ({sum1} > {sum2})")
    return f"exists {primed_vars} ({' & '.join(pieces)})"


def rewrite(q: ConjunctiveQuery, mdset: MDSet) -> RewrittenQuery:
    """Instance-independent rewriting of a join-safe query.

    Atoms without free variables at changeable positions pass through. Every
    other atom gets a primed copy (the stored value at those positions is
    existentially quantified away) plus one strict-majority condition per
    affected position, summed over the position's match-class.
    """
    ok, witness = is_ujcq(q, mdset)
    if not ok:
        raise NotEligibleError(f"query is not join-safe for rewriting: {witness}")
    cls = classify(mdset)
    if not cls.fast:
        raise NotEligibleError(
            f"rewriting applies to NonInteracting, SimpleCycle and HitSimpleCycle "
            f"sets; this set classifies as {cls.label}"
        )
    free = q.free
    out = []
    for atom in q.atoms:
        attrs = mdset.schema.relation(atom.rel).attrs
        cpos = [
            j
            for j, term in enumerate(atom.terms)
            if isinstance(term, Var)
            and term.name in free
            and (atom.rel, attrs[j]) in mdset.changeable
        ]
        if not cpos:
            out.append(RewrittenAtom(atom, None, ()))
            continue
        per_var = {}
        for j in cpos:
            per_var[atom.terms[j].name] = per_var.get(atom.terms[j].name, 0) + 1
        primed_terms = list(atom.terms)
        conditions = []
        for j in cpos:
            var = atom.terms[j]
            primed_name = (
                f"{var.name}'" if per_var[var.name] == 1 else f"{var.name}'{j + 1}"
            )
            primed_terms[j] = Var(primed_name)
            attr = (atom.rel, attrs[j])
            conditions.append(
                MajorityCondition(j, var.name, attr, eqr_class(mdset, attr))
            )
        out.append(RewrittenAtom(atom, Atom(atom.rel, tuple(primed_terms)), tuple(conditions)))
    return RewrittenQuery(f"{q.name}'", q.head, tuple(out), mdset)


def eval_rewritten(rq: RewrittenQuery, d: Instance) -> AnswerSet:
    """Evaluate a rewritten query on the original instance.

    The majority conditions reduce to: the closure block of the witness
    position must have a unique most frequent value, and that value is what
    the free variable binds to. Summing the per-relation counts of the
    match-class over TA-linked tuples is exactly the block frequency table,
    so no per-candidate iteration is needed.
    """
    mdset = rq.mdset
    partition = ta_closure(d, mdset)
    winner_cache: dict[int, str | None] = {}

    def winner(pos: Position) -> str | None:
        i = partition.block_of(pos)
        if i not in winner_cache:
            pool = partition.candidates(i)
            winner_cache[i] = pool[0] if len(pool) == 1 else None
        return winner_cache[i]

    results: set[tuple[str, ...]] = set()

    def rec(k: int, binding: dict):
        if k == len(rq.atoms):
            results.add(tuple(binding[v.name] for v in rq.head))
            return
        ra = rq.atoms[k]
        atom = ra.original
        skip = {c.pos for c in ra.conditions}
        for tid, row in d.rows(atom.rel):
            nb = dict(binding)
            ok = True
            for j, (term, value) in enumerate(zip(atom.terms, row)):
                if j in skip:
                    continue
                if isinstance(term, Const):
                    if term.value != value:
                        ok = False
                        break
                else:
                    bound = nb.get(term.name)
                    if bound is None:
                        nb[term.name] = value
                    elif bound != value:
                        ok = False
                        break
            if not ok:
                continue
            for c in ra.conditions:
                w = winner(Position(tid, c.attr))
                if w is None:
                    ok = False
                    break
                bound = nb.get(c.var)
                if bound is None:
                    nb[c.var] = w
                elif bound != w:
                    ok = False
                    break
            if ok:
                rec(k + 1, nb)

    rec(0, {})
    return AnswerSet(tuple(sorted(results)), "rewrite")


# ---------------------------------------------------------------------------
# Entry point

def resolved_answers(
    q: ConjunctiveQuery,
    d: Instance,
    mdset: MDSet,
    mode: str = "auto",
    bounds: OracleBounds | None = None,
) -> AnswerSet:
    """Answers true on every minimal resolved instance.

    mode "rewrite" insists on the fast path and raises NotEligibleError when
    the query or the MD set disqualifies it; "oracle" intersects over the
    enumerated MRIs; "auto" prefers the rewrite and falls back to the oracle.
    """
    if mode not in ("auto", "rewrite", "oracle"):
        raise InputError(f"unknown answer mode {mode!r}")
    ok, witness = is_ujcq(q, mdset)
    cls = classify(mdset)
    fast_ok = ok and cls.fast
    if mode == "rewrite" or (mode == "auto" and fast_ok):
        if not fast_ok:
            reasons = []
            if not ok:
                reasons.append(witness)
            if not cls.fast:
                reasons.append(f"MD set classifies as {cls.label}")
            raise NotEligibleError(
                "rewrite path not available: " + "; ".join(reasons)
            )
        return eval_rewritten(rewrite(q, mdset), d)
    try:
        mris, _ = enumerate_mris_oracle(d, mdset, bounds)
    except BoundsExceededError as exc:
        if mode == "auto":
            note = witness or f"MD set classifies as {cls.label}"
            raise BoundsExceededError(
                f"{exc} (and the rewrite path was not available: {note})"
            ) from exc
        raise
    common: set[tuple[str, ...]] | None = None
    for mri in mris:
        tuples = _eval_tuples(q, mri)
        common = tuples if common is None else common & tuples
        if not common:
            break
    return AnswerSet(tuple(sorted(common or set())), "oracle")
