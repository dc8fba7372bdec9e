"""Analogy discovery between two concept graphs.

Starting from a root pair, the left and right graphs are expanded in lockstep:
a new pair ``(x, y)`` joins the mapping only if ``x`` and ``y`` are reached from
an already-mapped pair through edges with the same relation label and the same
orientation, at the same depth (at most ``max_depth``). Whenever a left concept
can be matched to several right concepts, each consistent choice is followed,
so one root can yield several analogies. Within one analogy the mapping is a
bijection and every concept is visited at most once.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .graph import ConceptGraph, neighbors

log = logging.getLogger(__name__)

MAX_ANALOGIES_PER_ROOT = 10_000


class MapperError(ValueError):
    pass


class EmptyGraph(MapperError):
    pass


class NoAnalogy(MapperError):
    pass


class AnalogyOverflow(MapperError):
    """Raised when one root yields more analogies than the configured cap."""


@dataclass(frozen=True)
class MapperParams:
    max_depth: int = 4
    cross_space_only: bool = True
    strict_direction: bool = True
    min_mappings: int = 2
    max_per_root: int = MAX_ANALOGIES_PER_ROOT

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


@dataclass(frozen=True)
class RootMapping:
    left: str
    right: str


@dataclass(frozen=True)
class Analogy:
    """One isomorphism: ``mappings[0]`` is the root pair.

    ``signature[k]`` describes how ``mappings[k + 1]`` was reached:
    ``(relation, direction, depth)``, direction being ``"out"`` when the edge
    points from the already-mapped concept to the new one.
    """

    root: RootMapping
    mappings: tuple[tuple[str, str], ...]
    signature: tuple[tuple[str, str, int], ...] = ()
    left_name: str = field(default="", compare=False)
    right_name: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.mappings)

    @property
    def pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.mappings)

    def left_to_right(self) -> dict[str, str]:
        return dict(self.mappings)

    def right_to_left(self) -> dict[str, str]:
        return {r: l for l, r in self.mappings}

    def reversed(self) -> Analogy:
        """Same analogy seen from the right space."""
        return Analogy(
            RootMapping(self.root.right, self.root.left),
            tuple((r, l) for l, r in self.mappings),
            self.signature,
            self.right_name,
            self.left_name,
        )

    def to_json(self) -> dict:
        return {
            "root": [self.root.left, self.root.right],
            "mappings": [list(m) for m in self.mappings],
            "signature": [list(s) for s in self.signature],
        }

    @classmethod
    def from_json(cls, doc: dict, left_name: str = "", right_name: str = "") -> Analogy:
        try:
            root = RootMapping(*doc["root"])
            mappings = tuple((str(a), str(b)) for a, b in doc["mappings"])
            signature = tuple((str(r), str(d), int(k)) for r, d, k in doc.get("signature", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise MapperError(f"malformed analogy: {exc}") from None
        if not mappings or mappings[0] != (root.left, root.right):
            raise MapperError("first mapping must be the root pair")
        return cls(root, mappings, signature, left_name, right_name)


def analogies_to_json(analogies: list[Analogy], left_name: str, right_name: str) -> dict:
    return {"left": left_name, "right": right_name,
            "analogies": [a.to_json() for a in analogies]}


def analogies_from_json(doc: dict) -> tuple[str, str, list[Analogy]]:
    if not isinstance(doc, dict) or not isinstance(doc.get("analogies", []), list):
        raise MapperError("analogy file must be an object with an 'analogies' list")
    left, right = str(doc.get("left", "")), str(doc.get("right", ""))
    return left, right, [Analogy.from_json(a, left, right) for a in doc.get("analogies", [])]


def enumerate_root_mappings(a: ConceptGraph, b: ConceptGraph,
                            p: MapperParams = MapperParams()) -> list[RootMapping]:
    if not a.concepts or not b.concepts:
        raise EmptyGraph("both concept graphs must be non-empty")
    if p.cross_space_only:
        return [RootMapping(x, y)
                for x in sorted(a.concepts) for y in sorted(b.concepts) if x != y]
    union = sorted(a.concepts | b.concepts)
    return [RootMapping(x, y) for x, y in itertools.combinations(union, 2)]


def _side(label: str, prefer: ConceptGraph, other: ConceptGraph) -> ConceptGraph:
    return prefer if label in prefer.concepts else other


def _edges(g: ConceptGraph, c: str, strict: bool):
    for rel, other, d in neighbors(g, c):
        yield (rel, d if strict else "any"), other, d


def _bfs_order(g: ConceptGraph, c: str, strict: bool) -> dict[tuple[str, str], list[str]]:
    """Right-hand neighbours of ``c`` bucketed by edge key, in breadth order."""
    buckets: dict[tuple[str, str], list[str]] = {}
    for key, other, _ in _edges(g, c, strict):
        buckets.setdefault(key, []).append(other)
    return buckets


def _pair_bfs(ga: ConceptGraph, gb: ConceptGraph, pairs, root, strict: bool):
    """Breadth-first layout of ``pairs`` from ``root`` in the pair graph.

    Returns ``[(pair, (relation, direction, depth))]`` in discovery order, the
    root carrying ``(None, None, 0)``. Pairs unreachable from the root are
    left out.
    """
    pairs = set(pairs)
    order = [(root, (None, None, 0))]
    seen = {root}
    i = 0
    while i < len(order):
        (u, v), (_, _, du) = order[i]
        i += 1
        right = _bfs_order(gb, v, strict)
        for key, x, d in _edges(ga, u, strict):
            for y in right.get(key, ()):
                if (x, y) in pairs and (x, y) not in seen:
                    seen.add((x, y))
                    order.append(((x, y), (key[0], d, du + 1)))
    return order


class _Expansion:
    """Backtracking state for one root.

    Candidate pairs are produced by walking the left graph depth-first from
    the mapped pairs (shallowest first) and matching each left edge against
    the breadth-ordered right neighbours with the same key. Each candidate is
    either taken or excluded; a leaf is emitted only when no excluded pair
    could still join, which makes every emitted mapping maximal and never
    emits one twice.
    """

    def __init__(self, a: ConceptGraph, b: ConceptGraph, root: RootMapping, p: MapperParams):
        self.a = _side(root.left, a, b)
        self.b = _side(root.right, b, a)
        self.root = (root.left, root.right)
        self.rootm = root
        self.p = p
        self.results: list[Analogy] = []
        self.names = (a.name, b.name)

    def run(self) -> list[Analogy]:
        self._search([self.root], frozenset())
        return self.results

    def _candidates(self, mapped: list[tuple[str, str]]):
        strict = self.p.strict_direction
        used_l = {l for l, _ in mapped}
        used_r = {r for _, r in mapped}
        out: list[tuple[str, str]] = []
        seen = set()
        for (u, v), (_, _, du) in _pair_bfs(self.a, self.b, mapped, self.root, strict):
            if du >= self.p.max_depth:
                continue
            right = _bfs_order(self.b, v, strict)
            for key, x, _ in _edges(self.a, u, strict):
                if x in used_l:
                    continue
                for y in right.get(key, ()):
                    if y not in used_r and (x, y) not in seen:
                        seen.add((x, y))
                        out.append((x, y))
        return out

    def _search(self, mapped: list[tuple[str, str]], excluded: frozenset):
        if len(self.results) > self.p.max_per_root:
            raise AnalogyOverflow(
                f"root ({self.rootm.left}, {self.rootm.right}) exceeded "
                f"{self.p.max_per_root} analogies")
        cands = self._candidates(mapped)
        open_ = [pair for pair in cands if pair not in excluded]
        if not open_:
            if cands:
                return  # a skipped pair could still join: not maximal
            layout = _pair_bfs(self.a, self.b, mapped, self.root, self.p.strict_direction)
            self.results.append(Analogy(
                self.rootm,
                tuple(pair for pair, _ in layout),
                tuple(sig for _, sig in layout[1:]),
                *self.names,
            ))
            return
        pair = open_[0]
        self._search(mapped + [pair], excluded)
        self._search(mapped, excluded | {pair})


def expand_root_mapping(a: ConceptGraph, b: ConceptGraph, root: RootMapping,
                        p: MapperParams = MapperParams()) -> list[Analogy]:
    if root.left == root.right:
        raise MapperError("root mapping needs two distinct concepts")
    if root.left not in a.concepts | b.concepts or root.right not in a.concepts | b.concepts:
        raise MapperError(f"root {root} not found in the input spaces")
    return _Expansion(a, b, root, p).run()


def find_analogies(a: ConceptGraph, b: ConceptGraph,
                   p: MapperParams = MapperParams()) -> list[Analogy]:
    """All analogies of globally maximal size, deduplicated by mapping set."""
    best: list[Analogy] = []
    best_size = 0
    seen: set[frozenset] = set()
    for root in enumerate_root_mappings(a, b, p):
        for an in expand_root_mapping(a, b, root, p):
            n = len(an)
            if n < best_size:
                continue
            if n > best_size:
                best, best_size, seen = [], n, set()
            if an.pairs in seen:
                continue
            seen.add(an.pairs)
            best.append(an)
    if best_size < max(p.min_mappings, 1):
        raise NoAnalogy(f"largest analogy has {best_size} mapping(s); "
                        f"at least {p.min_mappings} required")
    log.info("found %d analogies of size %d", len(best), best_size)
    return best


def replay(a: ConceptGraph, b: ConceptGraph, analogy: Analogy,
           strict_direction: bool = True) -> bool:
    """Check that every mapping is reachable as its signature claims.

    Each pair after the root must hang off an earlier pair one level
    shallower, via edges carrying the recorded relation and orientation in
    both graphs.
    """
    if len(analogy.signature) != len(analogy.mappings) - 1:
        return False
    ga = _side(analogy.root.left, a, b)
    gb = _side(analogy.root.right, b, a)
    depth = {analogy.mappings[0]: 0}
    ls, rs = set(), set()
    for (x, y), (rel, d, k) in zip(analogy.mappings, ((None, None, 0),) + analogy.signature):
        if x in ls or y in rs:
            return False
        ls.add(x)
        rs.add(y)
        if rel is None:
            continue
        ok = False
        for (u, v), du in depth.items():
            if du != k - 1:
                continue
            ea = {(r, o) for r, o, dd in neighbors(ga, u) if not strict_direction or dd == d}
            eb = {(r, o) for r, o, dd in neighbors(gb, v) if not strict_direction or dd == d}
            if (rel, x) in ea and (rel, y) in eb:
                ok = True
                break
        if not ok:
            return False
        depth[(x, y)] = k
    return True
