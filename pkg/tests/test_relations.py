from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import circle, obj, rect, scene, two_boxes
from visblend import relations
from visblend.relations import (BINARY, RELATION_TYPES, UnknownRelationType, eval_relation,
                                fitness, inside_fraction, is_degenerate, relation_scores)
from visblend.scene import RELATION_TYPES as CATALOG
from visblend.scene import SceneRelation


def box():
    return st.tuples(st.integers(0, 900), st.integers(0, 900), st.integers(1, 100),
                     st.integers(1, 100)).map(lambda t: (t[0], t[1], t[0] + t[2], t[1] + t[3]))


def test_catalog():
    assert set(RELATION_TYPES) == set(CATALOG)
    assert len(RELATION_TYPES) == 8


def test_above_definitional():
    s = two_boxes((0, 0, 10, 10), (0, 20, 10, 30), "above")
    assert eval_relation(s, s.relations[0]).value == 1.0


def test_same_geometry_not_above():
    s = two_boxes((0, 0, 10, 10), (0, 0, 10, 10), "above")
    assert eval_relation(s, s.relations[0]).value == 0.0


def test_touching_is_not_separated():
    s = two_boxes((0, 0, 10, 10), (0, 10, 10, 20), "above")
    assert eval_relation(s, s.relations[0]).value == 0.0


@pytest.mark.parametrize("kind,a,b,want", [
    ("below", (0, 50, 10, 60), (0, 0, 10, 10), 1.0),
    ("leftOf", (0, 0, 10, 10), (20, 0, 30, 10), 1.0),
    ("rightOf", (0, 0, 10, 10), (20, 0, 30, 10), 0.0),
    ("overlaps", (0, 0, 10, 10), (5, 5, 30, 30), 1.0),
    ("overlaps", (0, 0, 10, 10), (11, 11, 30, 30), 0.0),
    ("lowerPartOf", (40, 70, 60, 120), (0, 0, 100, 100), 1.0),
    ("lowerPartOf", (40, 10, 60, 30), (0, 0, 100, 100), 0.0),
    ("lowerPartOf", (40, 101, 60, 120), (0, 0, 100, 100), 0.0),
    ("upperPartOf", (40, -10, 60, 30), (0, 0, 100, 100), 1.0),
    ("upperPartOf", (140, -10, 160, 30), (0, 0, 100, 100), 0.0),
    ("inside", (20, 20, 30, 30), (0, 0, 100, 100), 1.0),
    ("inside", (200, 200, 300, 300), (0, 0, 100, 100), 0.0),
])
def test_evaluator_table(kind, a, b, want):
    s = two_boxes(a, b, kind)
    assert eval_relation(s, s.relations[0]).value == want


def test_inside_is_the_point_ratio(monkeypatch):
    s = two_boxes((0, 0, 10, 10), (0, 0, 100, 100), "inside")
    pts = np.array([(50.0, 50.0)] * 50 + [(500.0, 500.0)] * 50)
    monkeypatch.setattr(relations, "sample_points", lambda *a, **k: pts)
    assert inside_fraction(s, "a", "b") == 0.5


def test_inside_partial_overlap_is_graded():
    s = two_boxes((50, 0, 150, 100), (0, 0, 100, 100), "inside")
    v = eval_relation(s, s.relations[0]).value
    assert 0.3 < v < 0.7


def test_unknown_type():
    s = two_boxes((0, 0, 1, 1), (5, 5, 6, 6), "above")
    with pytest.raises(UnknownRelationType):
        eval_relation(s, SceneRelation("a", "nextTo", "b"))


def test_fitness_mean_and_degenerate():
    s = two_boxes((0, 0, 10, 10), (0, 20, 10, 30), "above")
    s.relations.append(SceneRelation("a", "below", "b"))
    assert fitness(s) == 0.5
    s.relations = []
    assert fitness(s) == 0.0 and is_degenerate(s)


def test_fixture_scenes_score_one(scenes):
    for sc in scenes.values():
        assert fitness(sc) == 1.0
        assert all(r.value == 1.0 for r in relation_scores(sc))


@given(box(), box(), st.sampled_from(RELATION_TYPES))
def test_range(a, b, kind):
    s = two_boxes(a, b, kind)
    v = eval_relation(s, s.relations[0]).value
    assert 0.0 <= v <= 1.0
    if kind in BINARY:
        assert v in (0.0, 1.0)


@given(box(), box())
def test_antisymmetry(a, b):
    s = two_boxes(a, b, "above")
    rev = two_boxes(b, a, "below")
    assert eval_relation(s, s.relations[0]).value == eval_relation(rev, rev.relations[0]).value
    s = two_boxes(a, b, "leftOf")
    rev = two_boxes(b, a, "rightOf")
    assert eval_relation(s, s.relations[0]).value == eval_relation(rev, rev.relations[0]).value


@given(box(), box(), st.sampled_from(RELATION_TYPES), st.integers(-300, 300),
       st.integers(-300, 300))
def test_translation_invariance(a, b, kind, dx, dy):
    s = two_boxes(a, b, kind)
    before = eval_relation(s, s.relations[0]).value
    s.root.offset = (dx, dy)
    assert eval_relation(s, s.relations[0]).value == before


@given(st.lists(st.tuples(box(), box(), st.sampled_from(RELATION_TYPES)), min_size=1,
                max_size=5), st.randoms(use_true_random=False))
def test_permutation_invariance(rows, rnd):
    kids, rels = [], []
    for i, (a, b, kind) in enumerate(rows):
        kids += [obj(f"a{i}", rect(*a)), obj(f"b{i}", rect(*b))]
        rels.append((f"a{i}", kind, f"b{i}"))
    s = scene(obj("root", None, (0, 0), *kids), rels)
    f = fitness(s)
    rnd.shuffle(s.relations)
    assert fitness(s) == pytest.approx(f, abs=1e-12)


@given(box(), box(), st.integers(0, 500))
def test_monotone_repair(a, b, extra):
    for kind, (dx, dy) in (("above", (0, -1)), ("below", (0, 1)),
                           ("leftOf", (-1, 0)), ("rightOf", (1, 0))):
        s = two_boxes(a, b, kind)
        if eval_relation(s, s.relations[0]).value != 1.0:
            continue
        s.find("a").offset = (dx * extra, dy * extra)
        assert eval_relation(s, s.relations[0]).value == 1.0


def test_inside_uses_descendants():
    s = scene(obj("root", None, (0, 0),
                  obj("a", circle(5), (50, 50)),
                  obj("b", None, (0, 0), obj("part", rect(0, 0, 100, 100)))),
              [("a", "inside", "b")])
    assert fitness(s) == 1.0
