"""Similarity predicates: equality, bounded edit distance, explicit tables.

Each named similarity is reflexive and symmetric by construction. Whether it
is also transitive matters to the classifier, so every spec carries a
`transitive` verdict:

- eq: transitive, always.
- table: decided exactly when the table is loaded. A violating triple needs
  both of its similar pairs in the table, so checking the values the table
  mentions decides the question for every domain.
- lev(k): transitive only if declared so in the sims file, and the declaration
  is downgraded when the active domain it is checked against exhibits a
  violating triple. It is never upgraded.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InputError, ParseError

KINDS = ("eq", "lev", "table")


@dataclass(frozen=True)
class SimilaritySpec:
    name: str
    kind: str
    max_distance: int = 0
    pairs: frozenset[tuple[str, str]] = frozenset()
    declared_transitive: bool = False
    transitive: bool | None = None  # None = not yet checked against a domain

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"similarity {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "lev" and self.max_distance < 0:
            raise InputError(f"similarity {self.name!r}: negative distance bound")


# Built-in equality, available in MD conditions as `=`.
EQUALITY = SimilaritySpec(name="=", kind="eq", declared_transitive=True, transitive=True)


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # deletion
                    current[j - 1] + 1,  # insertion
                    previous[j - 1] + (ca != cb),  # substitution
                )
            )
        previous = current
    return previous[-1]


def similar(spec: SimilaritySpec, a: str, b: str) -> bool:
    if a == b:
        return True
    if spec.kind == "eq":
        return False
    if spec.kind == "lev":
        if abs(len(a) - len(b)) > spec.max_distance:
            return False
        return levenshtein(a, b) <= spec.max_distance
    return (a, b) in spec.pairs


def verify_transitivity(
    spec: SimilaritySpec, domain: Iterable[str]
) -> list[tuple[str, str, str]]:
    """All violating triples (x, y, z) over the domain, with x ~ y ~ z, x !~ z.

    Triples are reported with x < z lexicographically and sorted.
    """
    values = sorted(set(domain))
    if spec.kind == "eq":
        return []
    violations = []
    for i, x in enumerate(values):
        for z in values[i + 1 :]:
            if similar(spec, x, z):
                continue
            for y in values:
                if y == x or y == z:
                    continue
                if similar(spec, x, y) and similar(spec, y, z):
                    violations.append((x, y, z))
    violations.sort()
    return violations


def _table_transitive(pairs: frozenset[tuple[str, str]]) -> bool:
    mentioned = {v for pair in pairs for v in pair}
    return not verify_transitivity(
        SimilaritySpec(name="_", kind="table", pairs=pairs), mentioned
    )


def check_transitivity(spec: SimilaritySpec, domain: Iterable[str]) -> SimilaritySpec:
    """Return a copy with the `transitive` verdict resolved for this domain."""
    if spec.kind == "eq":
        return replace(spec, transitive=True)
    if spec.kind == "table":
        # Exact at load time; re-deriving here keeps the call idempotent.
        return replace(spec, transitive=_table_transitive(spec.pairs))
    if not spec.declared_transitive:
        return replace(spec, transitive=False)
    return replace(spec, transitive=not verify_transitivity(spec, domain))


def check_all(
    specs: Mapping[str, SimilaritySpec], domain: Iterable[str]
) -> dict[str, SimilaritySpec]:
    values = sorted(set(domain))
    return {name: check_transitivity(spec, values) for name, spec in specs.items()}


def load_table(text: str, source: str = "<table>") -> frozenset[tuple[str, str]]:
    """Read `value,value` lines; the result is closed under symmetry."""
    pairs = set()
    for rownum, record in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        if record and record[0].lstrip().startswith("#"):
            continue
        if len(record) != 2:
            raise InputError(f"{source}, row {rownum}: expected two values")
        a, b = record[0], record[1]
        if a == "" or b == "":
            raise InputError(f"{source}, row {rownum}: blank value")
        pairs.add((a, b))
        pairs.add((b, a))
    return frozenset(pairs)


_SIM_LINE = re.compile(r"^sim\s+([A-Za-z_]\w*)\s*=\s*(.+)$")
_LEV_BODY = re.compile(r"^lev\s*<=\s*(\d+)\s*(\[transitive\])?$")
_TABLE_BODY = re.compile(r"^table\s+(\S+)$")


def parse_sims(
    text: str, base_dir: str | Path = "."
) -> dict[str, SimilaritySpec]:
    """Parse a sims file.

    Lines: `sim NAME = eq`, `sim NAME = lev <= K [transitive]`,
    `sim NAME = table FILE` (FILE relative to base_dir). Table specs get
    their transitivity verdict immediately; lev specs stay unchecked until
    check_transitivity sees an active domain.
    """
    base_dir = Path(base_dir)
    specs: dict[str, SimilaritySpec] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _SIM_LINE.match(line)
        if not m:
            raise ParseError(f"cannot parse similarity declaration: {line!r}", lineno)
        name, body = m.group(1), m.group(2).strip()
        if name in specs:
            raise ParseError(f"duplicate similarity {name!r}", lineno)
        if body == "eq":
            spec = SimilaritySpec(name=name, kind="eq", declared_transitive=True,
                                  transitive=True)
        elif lm := _LEV_BODY.match(body):
            spec = SimilaritySpec(
                name=name,
                kind="lev",
                max_distance=int(lm.group(1)),
                declared_transitive=lm.group(2) is not None,
            )
        elif tm := _TABLE_BODY.match(body):
            path = base_dir / tm.group(1)
            if not path.is_file():
                raise ParseError(f"similarity {name!r}: no such table file {path}", lineno)
            pairs = load_table(path.read_text(encoding="utf-8"), str(path))
            spec = SimilaritySpec(
                name=name, kind="table", pairs=pairs,
                transitive=_table_transitive(pairs),
            )
        else:
            raise ParseError(f"cannot parse similarity body: {body!r}", lineno)
        specs[name] = spec
    return specs


def load_sims(path: str | Path) -> dict[str, SimilaritySpec]:
    path = Path(path)
    return parse_sims(path.read_text(encoding="utf-8"), path.parent)
