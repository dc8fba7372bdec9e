from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import obj, rect, scene
from visblend.blender import (LEFT, RIGHT, Blend, BlendProvenance, PartName, Replacement,
                              SimilarityGate, analogy_violations, check_blend,
                              compose_attachments, construct_blend, find_parts, is_too_similar,
                              match_donor_part, oriented, repair_consistency, replace_part)
from visblend.mapper import Analogy, RootMapping, find_analogies
from visblend.raster import rasterize
from visblend.scene import (SceneError, SceneRelation, absolute_position, bounding_box,
                            check_integrity, dumps_scene)


def named(*names):
    return scene(obj("root", None, (0, 0),
                     *[obj(n, rect(0, 0, 10, 10), (20 * i, 0)) for i, n in enumerate(names)]))


def analogy(*pairs):
    return Analogy(RootMapping(*pairs[0]), tuple(pairs), (), "A", "B")


# --- names -----------------------------------------------------------------


@pytest.mark.parametrize("raw,prefix,base,suffix", [
    ("right_leg_1", "right", "leg", "1"), ("leg", None, "leg", None),
    ("left_leg", "left", "leg", None), ("leftfront_leg", "leftfront", "leg", None),
])
def test_partname_parse(raw, prefix, base, suffix):
    pn = PartName.parse(raw)
    assert (pn.prefix, pn.base, pn.suffix) == (prefix, base, suffix)
    assert pn.compose() == raw


def test_partname_parse_for():
    pn = PartName.parse_for("right_leg_1", "leg")
    assert pn.compose("arm") == "right_arm_1"
    assert PartName.parse_for("legs", "leg") is None
    assert PartName.parse_for("x_right_arm", "right_arm").prefix == "x"


@given(st.lists(st.sampled_from(["left", "leg", "1", "x", "arm"]), min_size=1, max_size=4))
def test_partname_recomposes(tokens):
    raw = "_".join(tokens)
    assert PartName.parse(raw).compose() == raw
    for t in tokens:
        assert PartName.parse_for(raw, t).compose() == raw


def test_find_parts_pig(scenes):
    legs = find_parts(scenes["pig"], "leg")
    assert legs == ["leftfront_leg", "left_leg", "right_leg", "right_leg_1"]
    assert find_parts(scenes["pig"], "halo") == []
    assert find_parts(scenes["pig"], "eye") == ["head/eye"]


def test_find_parts_skips_plural_and_root():
    s = named("legs", "leg_2")
    assert find_parts(s, "leg") == ["leg_2"]
    assert find_parts(s, "root") == []
    with pytest.raises(ValueError):
        find_parts(s, "")


def test_match_donor_part():
    pn = PartName.parse_for("right_leg_1", "leg")
    assert match_donor_part(named("arm", "right_arm_1"), pn, "arm") == "right_arm_1"
    assert match_donor_part(named("arms"), pn, "arm") is None
    assert match_donor_part(named("arm"), pn, "arm") == "arm"
    nested = scene(obj("root", None, (0, 0), obj("torso", None, (0, 0), obj("arm", rect(0, 0, 1, 1)))))
    assert match_donor_part(nested, pn, "arm") == "torso/arm"


# --- replacement and composition ---------------------------------------------


def leg_scene():
    return scene(obj("root", None, (0, 0),
                     obj("body", rect(0, 0, 200, 100), (400, 400)),
                     obj("leg", rect(-10, 0, 10, 80), (450, 520))),
                 [("leg", "below", "body"), ("body", "above", "leg")])


def arm_scene():
    return scene(obj("root", None, (0, 0),
                     obj("arm", rect(0, 0, 60, 20), (100, 100),
                         obj("finger", rect(0, 0, 5, 5), (60, 0))),
                     obj("hand", rect(0, 0, 15, 15), (165, 100))),
                 [("hand", "overlaps", "arm"), ("arm", "leftOf", "hand")])


def test_replace_part_repoints_relations():
    s = leg_scene()
    center = bounding_box(s, "leg").center
    n = len(s.relations)
    new = replace_part(s, "leg", arm_scene(), "arm", "leg")
    assert new == "arm" and not s.has("leg") and s.has("arm/finger")
    assert SceneRelation("arm", "below", "body") in s.relations
    assert len(s.relations) == n
    assert bounding_box(s, "arm").center == pytest.approx(center)
    assert s.find("arm/finger").offset == (60, 0)
    check_integrity(s)


def test_replace_identical_geometry_keeps_raster():
    s = leg_scene()
    donor = leg_scene()
    before = rasterize(s, 64, 64)
    replace_part(s, "leg", donor, "leg", "leg")
    assert np.array_equal(before, rasterize(s, 64, 64))


def test_replace_name_clash_gets_fresh_name():
    s = scene(obj("root", None, (0, 0), obj("leg", rect(0, 0, 1, 1)), obj("arm", rect(5, 5, 6, 6))))
    new = replace_part(s, "leg", arm_scene(), "arm", "leg")
    assert new == "arm_2"
    check_integrity(s)


def test_replace_scale_to_fit():
    s = leg_scene()
    replace_part(s, "leg", arm_scene(), "arm", "leg", scale_to_fit=True)
    assert max(bounding_box(s, "arm").width, bounding_box(s, "arm").height) == pytest.approx(80)


def test_composition_after_replacement():
    s = leg_scene()
    donor = arm_scene()
    new = replace_part(s, "leg", donor, "arm", "leg")
    added = compose_attachments(s, donor, "arm", new, ["arm"])
    assert [c.new_path for c in added] == ["arm/hand"]
    assert added[0].offset == (65, 0)
    got = np.subtract(absolute_position(s, "arm/hand"), absolute_position(s, "arm"))
    assert got == pytest.approx((65, 0), abs=1e-6)
    assert SceneRelation("arm/hand", "overlaps", "arm") in s.relations
    assert SceneRelation("arm", "leftOf", "arm/hand") in s.relations


def test_composition_without_replacement_attaches_to_base_part():
    s = leg_scene()
    added = compose_attachments(s, arm_scene(), "arm", "leg", ["arm"])
    assert [c.new_path for c in added] == ["leg/hand"]
    assert SceneRelation("leg/hand", "overlaps", "leg") in s.relations


def test_composition_skips_existing_and_mapped_names():
    s = leg_scene()
    s.root.children.append(obj("hand", rect(0, 0, 1, 1)))
    assert compose_attachments(s, arm_scene(), "arm", "leg", ["arm"]) == []
    s2 = leg_scene()
    assert compose_attachments(s2, arm_scene(), "arm", "leg", ["arm", "hand"]) == []


def test_composition_skips_ancestors():
    donor = scene(obj("root", None, (0, 0),
                      obj("arm", rect(0, 0, 10, 10), (0, 0), obj("hand", rect(0, 0, 5, 5)))),
                  [("arm/hand", "overlaps", "arm")])
    s = leg_scene()
    added = compose_attachments(s, donor, "arm/hand", "leg", ["hand"])
    assert added == []


# --- repair ------------------------------------------------------------------


def test_repair_drops_obsolete_relations():
    s = leg_scene()
    s.relations.append(SceneRelation("tail", "below", "body"))
    s.relations.append(SceneRelation("body", "above", "body"))
    notes = repair_consistency(s)
    assert len(notes) == 2
    assert all(r.a != "tail" and r.a != r.b for r in s.relations)


def test_repair_pulls_far_objects_back():
    s = leg_scene()
    s.find("leg").offset = (5000, -3000)
    repair_consistency(s)
    b = bounding_box(s, "leg")
    assert b.x0 == pytest.approx(1000) and b.y1 == pytest.approx(0)


def test_repair_keeps_nearby_overhang():
    s = leg_scene()
    s.find("leg").offset = (1200, 520)
    assert repair_consistency(s) == []


def test_repair_idempotent(scenes):
    for sc in scenes.values():
        s = sc.copy()
        assert repair_consistency(s) == []
        assert dumps_scene(s) == dumps_scene(sc)
    s = leg_scene()
    s.find("leg").offset = (-4000, 9000)
    s.relations.append(SceneRelation("gone", "above", "leg"))
    repair_consistency(s)
    once = dumps_scene(s)
    assert repair_consistency(s) == []
    assert dumps_scene(s) == once


# --- gate and driver ----------------------------------------------------------


def test_gate_rejects_identity(scenes):
    pig, cactus = scenes["pig"], scenes["cactus"]
    assert is_too_similar(pig.copy(), pig, cactus)
    gate = SimilarityGate(pig, cactus)
    assert gate.rejects(pig) and gate.distance(pig) == 0.0


def test_empty_analogy_is_rejected(scenes):
    empty = Analogy(RootMapping("pig", "cactus"), (("pig", "cactus"),), (), "pig", "cactus")
    assert construct_blend(empty, LEFT, scenes["pig"], scenes["cactus"], seed=0) is None


def test_pig_cactus_blend(graphs, scenes):
    an = find_analogies(graphs["pig"], graphs["cactus"])[0]
    bl = construct_blend(an, LEFT, scenes["pig"], scenes["cactus"], seed=4)
    assert bl is not None
    assert bl.provenance.replacements
    assert analogy_violations(bl) == []
    check_blend(bl)
    allowed = set(an.mappings)
    for r in bl.provenance.replacements:
        assert (r.base_concept, r.donor_concept) in allowed
        assert not bl.scene.has(r.base_path) or r.base_path == r.new_path


def test_orientations_differ(graphs, scenes):
    an = find_analogies(graphs["pig"], graphs["cactus"])[0]
    a = construct_blend(an, LEFT, scenes["pig"], scenes["cactus"], seed=1)
    b = construct_blend(an, RIGHT, scenes["cactus"], scenes["pig"], seed=1)
    assert a.scene.concept == "pig" and b.scene.concept == "cactus"
    assert dumps_scene(a.scene) != dumps_scene(b.scene)
    assert oriented(an, RIGHT) == [(r, l) for l, r in an.mappings]
    with pytest.raises(ValueError):
        oriented(an, "middle")


def test_blend_deterministic(graphs, scenes):
    an = find_analogies(graphs["angel"], graphs["pig"])[0]
    one = construct_blend(an, RIGHT, scenes["pig"], scenes["angel"], seed=11)
    two = construct_blend(an, RIGHT, scenes["pig"], scenes["angel"], seed=11)
    assert dumps_scene(one.scene) == dumps_scene(two.scene)
    assert one.provenance.to_json() == two.provenance.to_json()


def test_seed_varies_replacements(graphs, scenes):
    an = find_analogies(graphs["angel"], graphs["pig"])[0]
    sets = {tuple(r.base_path for r in construct_blend(an, LEFT, scenes["angel"], scenes["pig"],
                                                       seed=s).provenance.replacements)
            for s in range(20)}
    assert len(sets) > 3


def test_base_scenes_untouched(graphs, scenes):
    before = {n: dumps_scene(s) for n, s in scenes.items()}
    an = find_analogies(graphs["angel"], graphs["cactus"])[0]
    for seed in range(5):
        construct_blend(an, LEFT, scenes["angel"], scenes["cactus"], seed)
        construct_blend(an, RIGHT, scenes["cactus"], scenes["angel"], seed)
    assert before == {n: dumps_scene(s) for n, s in scenes.items()}


def test_violation_checker_flags_unlicensed():
    an = analogy(("leg", "arm"))
    prov = BlendProvenance(an, LEFT, "leg", "A", "B",
                           replacements=[Replacement("tail", "arm", "arm", "tail", "arm")])
    bl = Blend(leg_scene(), prov)
    assert analogy_violations(bl)
    with pytest.raises(SceneError):
        check_blend(bl)
