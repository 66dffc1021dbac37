"""A small positive-datalog engine: parser plus semi-naive evaluation.

Just enough to execute the programs this package emits and to let tests
treat the emitted text as an independent artifact. Vocabulary: constants are
integers, 'quoted strings' (with '' as the escaped quote) or bare
lower-case identifiers; variables start with an upper-case letter; `_` is an
anonymous variable. Statements end with a period; `%` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import Iterable

from .errors import ParseError

_VAR_RE = re.compile(r"^[A-Z]\w*$")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
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


@dataclass(frozen=True)
class Term:
    kind: str  # "var" | "const"
    value: object

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Atom:
    pred: str
    terms: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Atom, ...]


@dataclass
class Program:
    facts: list[Atom]
    rules: list[Rule]


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} in datalog text")
        pos = m.end()
        if m.lastgroup not in ("ws", "comment"):
            tokens.append((m.lastgroup, m.group()))
    return tokens


def parse_program(text: str) -> Program:
    tokens = _tokenize(text)
    i = 0
    fresh = count()

    def expect(kind: str) -> str:
        nonlocal i
        if i >= len(tokens) or tokens[i][0] != kind:
            got = tokens[i][1] if i < len(tokens) else "end of input"
            raise ParseError(f"expected {kind}, got {got!r}")
        value = tokens[i][1]
        i += 1
        return value

    def parse_term() -> Term:
        nonlocal i
        kind, value = tokens[i]
        if kind == "number":
            i += 1
            return Term("const", int(value))
        if kind == "string":
            i += 1
            return Term("const", value[1:-1].replace("''", "'"))
        if kind == "ident":
            i += 1
            if value == "_":
                return Term("var", f"_anon{next(fresh)}")
            if _VAR_RE.match(value) or value.startswith("_"):
                return Term("var", value)
            return Term("const", value)
        raise ParseError(f"expected a term, got {value!r}")

    def parse_atom() -> Atom:
        pred = expect("ident")
        expect("lparen")
        terms = [parse_term()]
        while i < len(tokens) and tokens[i][0] == "comma":
            expect("comma")
            terms.append(parse_term())
        expect("rparen")
        return Atom(pred, tuple(terms))

    program = Program([], [])
    arities: dict[str, int] = {}

    def note_arity(atom: Atom):
        seen = arities.setdefault(atom.pred, atom.arity)
        if seen != atom.arity:
            raise ParseError(
                f"predicate {atom.pred} used with arity {atom.arity} and {seen}"
            )

    while i < len(tokens):
        head = parse_atom()
        note_arity(head)
        if i < len(tokens) and tokens[i][0] == "impl":
            expect("impl")
            body = [parse_atom()]
            note_arity(body[-1])
            while i < len(tokens) and tokens[i][0] == "comma":
                expect("comma")
                body.append(parse_atom())
                note_arity(body[-1])
            expect("dot")
            head_vars = {t.value for t in head.terms if t.kind == "var"}
            body_vars = {t.value for a in body for t in a.terms if t.kind == "var"}
            if not head_vars <= body_vars:
                raise ParseError(f"unsafe rule: {head.pred} head variables unbound")
            program.rules.append(Rule(head, tuple(body)))
        else:
            expect("dot")
            if any(t.kind == "var" for t in head.terms):
                raise ParseError(f"fact {head.pred} contains variables")
            program.facts.append(head)
    return program


def _match(atom: Atom, values: tuple, binding: dict) -> dict | None:
    out = binding
    copied = False
    for term, value in zip(atom.terms, values):
        if term.kind == "const":
            if term.value != value:
                return None
        else:
            bound = out.get(term.value, _match)
            if bound is _match:
                if not copied:
                    out = dict(out)
                    copied = True
                out[term.value] = value
            elif bound != value:
                return None
    return out


def evaluate(program: Program) -> dict[str, set[tuple]]:
    """Least fixpoint of the program, computed semi-naively."""
    derived: dict[str, set[tuple]] = {}
    for fact in program.facts:
        derived.setdefault(fact.pred, set()).add(
            tuple(t.value for t in fact.terms)
        )
    delta = {pred: set(rows) for pred, rows in derived.items()}

    def join(rule: Rule, pivot: int) -> Iterable[tuple]:
        def rec(k: int, binding: dict):
            if k == len(rule.body):
                yield tuple(binding[t.value] if t.kind == "var" else t.value
                            for t in rule.head.terms)
                return
            atom = rule.body[k]
            source = delta if k == pivot else derived
            for values in source.get(atom.pred, ()):
                nb = _match(atom, values, binding)
                if nb is not None:
                    yield from rec(k + 1, nb)

        yield from rec(0, {})

    while True:
        fresh: dict[str, set[tuple]] = {}
        for rule in program.rules:
            for pivot in range(len(rule.body)):
                if rule.body[pivot].pred not in delta:
                    continue
                for row in join(rule, pivot):
                    if row not in derived.get(rule.head.pred, set()):
                        fresh.setdefault(rule.head.pred, set()).add(row)
        if not fresh:
            return derived
        for pred, rows in fresh.items():
            derived.setdefault(pred, set()).update(rows)
        delta = fresh
