"""Building a visual blend from an analogy and two base representations.

For every mapping ``base concept -> donor concept`` of the analogy, the parts
of the base scene named after the base concept are located by name, matched to
donor parts by name, optionally replaced, and donor parts related to the match
are composed in. The result is repaired and rejected if it renders too close to
either input.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

from .mapper import Analogy
from .raster import rasterize, rmse
from .scene import (BBox, EmptyGeometry, GraphicObject, Scene, SceneError, SceneRelation,
                    absolute_position, bounding_box, check_integrity, join, scale_object)

log = logging.getLogger(__name__)

SIMILARITY_THRESHOLD = 0.02
RASTER_SIZE = (256, 256)
REPLACE_PROB = 0.5

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class PartName:
    """``prefix_base_suffix`` decomposition of an object name."""

    raw: str
    base: str
    prefix: str | None = None
    suffix: str | None = None

    @classmethod
    def parse(cls, raw: str) -> PartName:
        toks = raw.split("_")
        suffix = None
        if len(toks) > 1 and toks[-1].isdigit():
            suffix = toks.pop()
        base = toks.pop()
        return cls(raw, base, "_".join(toks) or None, suffix)

    @classmethod
    def parse_for(cls, raw: str, target: str) -> PartName | None:
        """Decompose ``raw`` around the token run ``target``, or None if absent."""
        toks = raw.split("_")
        tt = target.split("_")
        for i in range(len(toks) - len(tt) + 1):
            if toks[i:i + len(tt)] == tt:
                return cls(raw, target, "_".join(toks[:i]) or None,
                           "_".join(toks[i + len(tt):]) or None)
        return None

    def compose(self, base: str | None = None) -> str:
        return "_".join(t for t in (self.prefix, base or self.base, self.suffix) if t)


@dataclass
class Replacement:
    base_path: str
    donor_path: str
    new_path: str
    base_concept: str
    donor_concept: str

    def to_json(self) -> dict:
        return {"base": self.base_path, "donor": self.donor_path, "new": self.new_path,
                "mapping": [self.base_concept, self.donor_concept]}


@dataclass
class Composition:
    """``donor_path`` copied to ``new_path`` under ``anchor_path``, which stands in
    for the donor part ``donor_anchor``; ``offset`` is relative to that anchor."""

    donor_path: str
    new_path: str
    anchor_path: str
    offset: tuple[float, float]
    donor_anchor: str = ""

    def to_json(self) -> dict:
        return {"donor": self.donor_path, "new": self.new_path, "anchor": self.anchor_path,
                "donor_anchor": self.donor_anchor,
                "offset": [float(self.offset[0]), float(self.offset[1])]}


@dataclass
class BlendProvenance:
    analogy: Analogy
    base_choice: str
    base_concept: str
    base_scene: str
    donor_scene: str
    seed: int | None = None
    replacements: list[Replacement] = field(default_factory=list)
    compositions: list[Composition] = field(default_factory=list)
    repairs: list[str] = field(default_factory=list)

    def oriented_mappings(self) -> list[tuple[str, str]]:
        return oriented(self.analogy, self.base_choice)

    def copy(self) -> BlendProvenance:
        return BlendProvenance(self.analogy, self.base_choice, self.base_concept,
                               self.base_scene, self.donor_scene, self.seed,
                               list(self.replacements), list(self.compositions),
                               list(self.repairs))

    def to_json(self) -> dict:
        return {
            "analogy": self.analogy.to_json(),
            "base_choice": self.base_choice,
            "base_concept": self.base_concept,
            "base_scene": self.base_scene,
            "donor_scene": self.donor_scene,
            "seed": self.seed,
            "replacements": [r.to_json() for r in self.replacements],
            "compositions": [c.to_json() for c in self.compositions],
            "repairs": list(self.repairs),
        }


@dataclass
class Blend:
    scene: Scene
    provenance: BlendProvenance

    def copy(self) -> Blend:
        return Blend(self.scene.copy(), self.provenance.copy())


def oriented(analogy: Analogy, base_choice: str) -> list[tuple[str, str]]:
    """Mappings as ``(base concept, donor concept)`` for the chosen base."""
    if base_choice == LEFT:
        return list(analogy.mappings)
    if base_choice == RIGHT:
        return [(r, l) for l, r in analogy.mappings]
    raise ValueError(f"base_choice must be 'left' or 'right', got {base_choice!r}")


# ---------------------------------------------------------------------------
# locating parts


def find_parts(scene: Scene, mapping_name: str) -> list[str]:
    """Paths of non-root objects whose name contains ``mapping_name`` as a token run.

    ``left_leg``, ``right_leg_1`` and ``leftfront_leg`` all match ``leg``;
    ``legs`` does not.
    """
    if not mapping_name:
        raise ValueError("mapping name must be non-empty")
    return [p for p, obj in scene.walk()
            if p and PartName.parse_for(obj.name, mapping_name) is not None]


def _first_named(scene: Scene, name: str) -> str | None:
    for p, obj in scene.walk():
        if p and obj.name == name:
            return p
    return None


def match_donor_part(donor: Scene, found: PartName, mapping_target: str) -> str | None:
    """Donor path for ``found`` under ``mapping_target``.

    Tries the full name first (``right_leg_1`` -> ``right_arm_1``), then the
    bare target (``arm``). Plural objects (``arms``) never match since names
    are compared exactly.
    """
    if not mapping_target:
        raise ValueError("mapping target must be non-empty")
    full = found.compose(mapping_target)
    for name in dict.fromkeys((full, mapping_target)):
        if name == mapping_target + "s":
            continue
        p = _first_named(donor, name)
        if p is not None:
            return p
    return None


# ---------------------------------------------------------------------------
# replacement and composition


def _anchor_point(scene: Scene, path: str) -> tuple[float, float]:
    try:
        return bounding_box(scene, path).center
    except EmptyGeometry:
        return absolute_position(scene, path)


def _unique_name(siblings: set[str], wanted: list[str]) -> str:
    for w in wanted:
        if w not in siblings:
            return w
    base = wanted[-1]
    k = 2
    while f"{base}_{k}" in siblings:
        k += 1
    return f"{base}_{k}"


def replace_part(scene: Scene, pa: str, donor: Scene, pb: str,
                 base_concept: str | None = None, scale_to_fit: bool = False) -> str:
    """Swap the subtree at ``pa`` for a copy of ``donor``'s subtree at ``pb``.

    Mutates ``scene`` and returns the new path. The copy's bounding-box centre
    lands on the old part's centre, its children keep their offsets, and every
    relation that named ``pa`` now names the copy.
    """
    parent, idx = scene.parent_of(pa)
    old = parent.children[idx]
    target = _anchor_point(scene, pa)
    try:
        old_box = bounding_box(scene, pa)
    except EmptyGeometry:
        old_box = None

    new = donor.find(pb).copy()
    siblings = {c.name for i, c in enumerate(parent.children) if i != idx}
    wanted = [new.name]
    pn = PartName.parse_for(old.name, base_concept) if base_concept else None
    if pn is not None:
        wanted.append(pn.compose(PartName.parse(new.name).base))
    new.name = _unique_name(siblings, wanted)
    parent.children[idx] = new
    new_path = join(pa.rpartition("/")[0], new.name)

    if scale_to_fit and old_box is not None:
        try:
            nb = bounding_box(scene, new_path)
            span_new = max(nb.width, nb.height)
            if span_new > 0:
                scale_object(new, max(old_box.width, old_box.height) / span_new)
        except EmptyGeometry:
            pass
    here = _anchor_point(scene, new_path)
    new.offset = (new.offset[0] + target[0] - here[0], new.offset[1] + target[1] - here[1])

    scene.relations = [
        SceneRelation(new_path if r.a == pa else r.a, r.type, new_path if r.b == pa else r.b)
        for r in scene.relations
    ]
    return new_path


def _is_ancestor(p: str, q: str) -> bool:
    return p == "" or q.startswith(p + "/")


def compose_attachments(scene: Scene, donor: Scene, pb: str, anchor: str,
                        donor_concepts) -> list[Composition]:
    """Copy donor parts related to ``pb`` onto ``anchor`` (the object standing in for it).

    A donor part is taken only if the blend has no object of that name and no
    analogy mapping covers it. It keeps its offset relative to ``pb``.
    """
    added = []
    donor_concepts = list(donor_concepts)
    pb_abs = absolute_position(donor, pb)
    for r in donor.relations:
        if pb not in (r.a, r.b):
            continue
        q = r.b if r.a == pb else r.a
        if not q or q == pb or _is_ancestor(q, pb):
            continue
        qobj = donor.find(q)
        if qobj.name in scene.names():
            continue
        if any(PartName.parse_for(qobj.name, c) is not None for c in donor_concepts):
            continue
        q_abs = absolute_position(donor, q)
        copy = qobj.copy()
        copy.offset = (q_abs[0] - pb_abs[0], q_abs[1] - pb_abs[1])
        host = scene.find(anchor)
        host.children.append(copy)
        new_path = join(anchor, copy.name)
        for r2 in donor.relations:
            ends = {r2.a, r2.b}
            if ends == {pb, q}:
                scene.relations.append(SceneRelation(
                    new_path if r2.a == q else anchor, r2.type,
                    new_path if r2.b == q else anchor))
        added.append(Composition(q, new_path, anchor, copy.offset, pb))
    return added


# ---------------------------------------------------------------------------
# consistency repair


def _canvas_box(scene: Scene, k: float = 1.0) -> BBox:
    w, h = scene.canvas
    m = (k - 1.0) / 2.0
    return BBox(-m * w, -m * h, w + m * w, h + m * h)


def _extent(scene: Scene, path: str) -> BBox:
    try:
        return bounding_box(scene, path)
    except EmptyGeometry:
        x, y = absolute_position(scene, path)
        return BBox(x, y, x, y)


def repair_consistency(scene: Scene) -> list[str]:
    """Drop obsolete relations and pull far-away parts back; mutates, returns a log."""
    notes = []
    kept = []
    for r in scene.relations:
        if r.a == r.b or not scene.has(r.a) or not scene.has(r.b):
            notes.append(f"dropped relation {r.a} {r.type} {r.b}")
        elif r not in kept:
            kept.append(r)
    scene.relations = kept

    outer = _canvas_box(scene, 2.0)
    canvas = _canvas_box(scene)
    for path, obj in list(scene.walk()):
        if not path:
            continue
        box = _extent(scene, path)
        if box.intersects(outer):
            continue
        dx = dy = 0.0
        if box.x1 < canvas.x0:
            dx = canvas.x0 - box.x1
        elif box.x0 > canvas.x1:
            dx = canvas.x1 - box.x0
        if box.y1 < canvas.y0:
            dy = canvas.y0 - box.y1
        elif box.y0 > canvas.y1:
            dy = canvas.y1 - box.y0
        obj.offset = (obj.offset[0] + dx, obj.offset[1] + dy)
        notes.append(f"moved {path} by ({dx:g}, {dy:g})")
    check_integrity(scene)
    return notes


# ---------------------------------------------------------------------------
# similarity gate


def is_too_similar(blend: Scene, ra: Scene, rb: Scene,
                   threshold: float = SIMILARITY_THRESHOLD,
                   size: tuple[int, int] = RASTER_SIZE) -> bool:
    b = rasterize(blend, *size)
    return min(rmse(b, rasterize(ra, *size)), rmse(b, rasterize(rb, *size))) < threshold


class SimilarityGate:
    """:func:`is_too_similar` with the two base renders cached."""

    def __init__(self, ra: Scene, rb: Scene, threshold: float = SIMILARITY_THRESHOLD,
                 size: tuple[int, int] = RASTER_SIZE):
        self.threshold = threshold
        self.size = size
        self.bases = [rasterize(ra, *size), rasterize(rb, *size)]

    def distance(self, scene: Scene) -> float:
        img = rasterize(scene, *self.size)
        return min(rmse(img, b) for b in self.bases)

    def rejects(self, scene: Scene) -> bool:
        return self.distance(scene) < self.threshold


# ---------------------------------------------------------------------------
# driver


def construct_blend(analogy: Analogy, base_choice: str, ra: Scene, rb: Scene,
                    seed: int, gate: SimilarityGate | None = None,
                    threshold: float = SIMILARITY_THRESHOLD,
                    raster: tuple[int, int] = RASTER_SIZE,
                    replace_prob: float = REPLACE_PROB,
                    scale_to_fit: bool = False,
                    base_id: str | None = None, donor_id: str | None = None) -> Blend | None:
    """Blend ``ra`` (the base concept's scene) with parts of ``rb``.

    Which found parts get replaced is drawn from ``seed``: each independently
    with ``replace_prob``, and at least one overall when any match exists.
    Returns None when the result is too close to either input.
    """
    rng = random.Random(seed)
    mappings = oriented(analogy, base_choice)
    scene = ra.copy()
    prov = BlendProvenance(analogy, base_choice, mappings[0][0] if mappings else ra.concept,
                           base_id or ra.concept, donor_id or rb.concept, seed)

    plan = []
    for base_c, donor_c in mappings:
        for pa in find_parts(ra, base_c):
            pn = PartName.parse_for(ra.find(pa).name, base_c)
            pb = match_donor_part(rb, pn, donor_c)
            if pb is not None:
                plan.append((base_c, donor_c, pa, pb))
    chosen = [rng.random() < replace_prob for _ in plan]
    if plan and not any(chosen):
        chosen[rng.randrange(len(plan))] = True

    donor_concepts = [d for _, d in mappings]
    gone: list[str] = []
    for (base_c, donor_c, pa, pb), replace in zip(plan, chosen):
        if any(pa == g or pa.startswith(g + "/") for g in gone):
            continue  # swallowed by an earlier replacement of an ancestor
        anchor = pa
        if replace:
            anchor = replace_part(scene, pa, rb, pb, base_c, scale_to_fit)
            gone.append(pa)
            prov.replacements.append(Replacement(pa, pb, anchor, base_c, donor_c))
        prov.compositions += compose_attachments(scene, rb, pb, anchor, donor_concepts)

    prov.repairs = repair_consistency(scene)
    if gate is None:
        gate = SimilarityGate(ra, rb, threshold, raster)
    if gate.rejects(scene):
        log.debug("blend rejected by similarity gate (seed %s)", seed)
        return None
    return Blend(scene, prov)


# ---------------------------------------------------------------------------
# checks


def analogy_violations(blend: Blend) -> list[str]:
    """Replacements not licensed by the blend's analogy (empty when it is respected)."""
    allowed = set(blend.provenance.oriented_mappings())
    bad = []
    for r in blend.provenance.replacements:
        a_name = r.base_path.rsplit("/", 1)[-1]
        b_name = r.donor_path.rsplit("/", 1)[-1]
        ok = ((r.base_concept, r.donor_concept) in allowed
              and PartName.parse_for(a_name, r.base_concept) is not None
              and PartName.parse_for(b_name, r.donor_concept) is not None)
        if not ok:
            bad.append(f"{r.base_path} -> {r.donor_path} not licensed")
    return bad


def check_blend(blend: Blend) -> None:
    """Raise :class:`SceneError` unless the blend is legal (analogy, tree, relations)."""
    bad = analogy_violations(blend)
    if bad:
        raise SceneError("; ".join(bad))
    check_integrity(blend.scene)


def all_names(obj: GraphicObject) -> list[str]:
    return [o.name for _, o in obj.walk()]
