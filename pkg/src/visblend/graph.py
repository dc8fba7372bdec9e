"""Concept graphs: the input mental spaces as labeled directed triples.

Two on-disk forms are accepted by :func:`parse_triples`:

* line-oriented text, one ``head relation tail`` triple per line, ``#`` comments;
* JSON, ``{"name": str, "triples": [[head, relation, tail], ...]}`` (or a bare list).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

OUT = "out"
IN = "in"
BOTH = "both"


class GraphError(ValueError):
    pass


class MalformedLine(GraphError):
    def __init__(self, line_no: int, detail: str = "expected 3 tokens"):
        super().__init__(f"line {line_no}: {detail}")
        self.line_no = line_no


class SelfLoop(GraphError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: head and tail are the same concept")
        self.line_no = line_no


class UnknownConcept(GraphError, KeyError):
    def __str__(self) -> str:
        return f"unknown concept {self.args[0]!r}"


@dataclass(frozen=True, order=True)
class Triple:
    head: str
    relation: str
    tail: str


@dataclass(frozen=True)
class ConceptGraph:
    """Immutable labeled digraph. Build with :meth:`from_triples`."""

    name: str
    concepts: frozenset[str]
    triples: frozenset[Triple]
    _out: dict = field(default_factory=dict, compare=False, repr=False, hash=False)
    _in: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[str, str, str] | Triple],
                     name: str = "", concepts: Iterable[str] = ()) -> ConceptGraph:
        ts = set()
        nodes = set(concepts)
        for t in triples:
            t = t if isinstance(t, Triple) else Triple(*t)
            for tok in (t.head, t.relation, t.tail):
                if not tok or any(ch.isspace() for ch in tok):
                    raise GraphError(f"invalid token {tok!r} in {t}")
            if t.head == t.tail:
                raise GraphError(f"self loop on {t.head!r}")
            ts.add(t)
            nodes.update((t.head, t.tail))
        out: dict[str, list] = {c: [] for c in nodes}
        inc: dict[str, list] = {c: [] for c in nodes}
        for t in ts:
            out[t.head].append((t.relation, t.tail, OUT))
            inc[t.tail].append((t.relation, t.head, IN))
        for d in (out, inc):
            for v in d.values():
                v.sort()
        return cls(name, frozenset(nodes), frozenset(ts), out, inc)

    @property
    def n_concepts(self) -> int:
        return len(self.concepts)

    @property
    def n_triples(self) -> int:
        return len(self.triples)

    def __contains__(self, concept: object) -> bool:
        return concept in self.concepts

    def __len__(self) -> int:
        return len(self.concepts)

    @property
    def relation_labels(self) -> set[str]:
        return {t.relation for t in self.triples}

    def to_text(self) -> str:
        lines = [f"# {self.name}"] if self.name else []
        lines += [f"{t.head} {t.relation} {t.tail}" for t in sorted(self.triples)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"name": self.name,
                "triples": [[t.head, t.relation, t.tail] for t in sorted(self.triples)]}


def neighbors(g: ConceptGraph, c: str, direction: str = BOTH) -> list[tuple[str, str, str]]:
    """Edges incident to ``c`` as ``(relation, other, direction)``, sorted."""
    if c not in g.concepts:
        raise UnknownConcept(c)
    if direction == OUT:
        return list(g._out[c])
    if direction == IN:
        return list(g._in[c])
    if direction == BOTH:
        return sorted(g._out[c] + g._in[c])
    raise ValueError(f"direction must be one of out/in/both, got {direction!r}")


def parse_triples(text: str, name: str = "") -> ConceptGraph:
    stripped = text.lstrip()
    if stripped[:1] in ("{", "["):
        return _parse_json(stripped, name)

    seen: dict[Triple, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 3:
            raise MalformedLine(line_no, f"expected 3 tokens, got {len(toks)}")
        if toks[0] == toks[2]:
            raise SelfLoop(line_no)
        seen.setdefault(Triple(*toks), line_no)
    if not name:
        # a leading "# name" comment doubles as the graph name
        for raw in text.splitlines():
            if raw.strip():
                if raw.strip().startswith("#"):
                    name = raw.strip().lstrip("#").strip()
                break
    return ConceptGraph.from_triples(seen, name=name)


def _parse_json(text: str, name: str) -> ConceptGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedLine(exc.lineno, f"invalid JSON: {exc.msg}") from None
    if isinstance(doc, dict):
        name = name or str(doc.get("name", ""))
        rows = doc.get("triples", [])
    else:
        rows = doc
    if not isinstance(rows, list):
        raise MalformedLine(1, "'triples' must be a list")
    triples = []
    for i, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != 3 or not all(isinstance(x, str) for x in row):
            raise MalformedLine(i, "triple must be a list of 3 strings")
        if row[0] == row[2]:
            raise SelfLoop(i)
        triples.append(Triple(*row))
    return ConceptGraph.from_triples(triples, name=name)


def load_graph(path) -> ConceptGraph:
    from pathlib import Path

    p = Path(path)
    g = parse_triples(p.read_text(encoding="utf-8"))
    if not g.name:
        g = ConceptGraph.from_triples(g.triples, name=p.stem, concepts=g.concepts)
    return g
