"""Spatial relation evaluators and blend fitness.

Directional relations are binary bounding-box tests in y-down coordinates
("above" means smaller y). ``inside`` is graded: the fraction of the subject's
sample points that fall within the object's region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .scene import RELATION_TYPES as _CATALOG
from .scene import BBox, Scene, SceneRelation, bounding_box, contains_points, sample_points

INSIDE_SAMPLES = 200
INSIDE_SEED = 0


def _above(a: BBox, b: BBox) -> float:
    return float(a.y1 < b.y0)


def _below(a: BBox, b: BBox) -> float:
    return float(a.y0 > b.y1)


def _left_of(a: BBox, b: BBox) -> float:
    return float(a.x1 < b.x0)


def _right_of(a: BBox, b: BBox) -> float:
    return float(a.x0 > b.x1)


def _overlaps(a: BBox, b: BBox) -> float:
    return float(a.intersects(b))


def _lower_part_of(a: BBox, b: BBox) -> float:
    cx, cy = a.center
    ok = b.x0 <= cx <= b.x1 and b.center[1] <= cy <= b.y1
    return float(ok and a.intersects(b))


def _upper_part_of(a: BBox, b: BBox) -> float:
    cx, cy = a.center
    ok = b.x0 <= cx <= b.x1 and b.y0 <= cy <= b.center[1]
    return float(ok and a.intersects(b))


BINARY: dict[str, Callable[[BBox, BBox], float]] = {
    "above": _above,
    "below": _below,
    "leftOf": _left_of,
    "rightOf": _right_of,
    "lowerPartOf": _lower_part_of,
    "upperPartOf": _upper_part_of,
    "overlaps": _overlaps,
}
GRADED = ("inside",)
RELATION_TYPES = tuple(BINARY) + GRADED
assert set(RELATION_TYPES) == set(_CATALOG)


class UnknownRelationType(ValueError):
    pass


@dataclass(frozen=True)
class RelationScore:
    relation: SceneRelation
    value: float


def inside_fraction(scene: Scene, a: str, b: str, n: int = INSIDE_SAMPLES,
                    seed: int = INSIDE_SEED) -> float:
    pts = sample_points(scene, a, n, seed)
    return float(contains_points(scene, b, pts).mean())


def eval_relation(scene: Scene, relation: SceneRelation) -> RelationScore:
    kind = relation.type
    if kind in BINARY:
        v = BINARY[kind](bounding_box(scene, relation.a), bounding_box(scene, relation.b))
    elif kind == "inside":
        v = inside_fraction(scene, relation.a, relation.b)
    else:
        raise UnknownRelationType(f"unknown relation type {kind!r}")
    return RelationScore(relation, min(1.0, max(0.0, v)))


def relation_scores(scene: Scene) -> list[RelationScore]:
    return [eval_relation(scene, r) for r in scene.relations]


def is_degenerate(scene: Scene) -> bool:
    """A scene with nothing to satisfy; its fitness is pinned to 0."""
    return not scene.relations


def fitness(scene: Scene) -> float:
    """Mean satisfaction of the scene's relations (0 for a relation-free scene)."""
    if not scene.relations:
        return 0.0
    scores = relation_scores(scene)
    return sum(s.value for s in scores) / len(scores)
