from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from visblend.graph import (BOTH, IN, OUT, ConceptGraph, MalformedLine, SelfLoop, Triple,
                            UnknownConcept, load_graph, neighbors, parse_triples)


def test_single_line():
    g = parse_triples("snout pw pig")
    assert (g.n_concepts, g.n_triples) == (2, 1)
    assert g.relation_labels == {"pw"}


def test_empty_text():
    g = parse_triples("")
    assert (g.n_concepts, g.n_triples) == (0, 0)


def test_comments_and_blank_lines():
    g = parse_triples("# pig\n\nsnout pw pig  # trailing\n   \n")
    assert g.name == "pig"
    assert g.triples == {Triple("snout", "pw", "pig")}


@pytest.mark.parametrize("text,line", [("pig pw", 1), ("a r b\na r b c", 2), ("a\n", 1)])
def test_malformed_line(text, line):
    with pytest.raises(MalformedLine) as exc:
        parse_triples(text)
    assert exc.value.line_no == line


def test_self_loop():
    with pytest.raises(SelfLoop) as exc:
        parse_triples("a r b\npig pw pig")
    assert exc.value.line_no == 2


def test_duplicates_collapse():
    assert parse_triples("a r b\na r b\n").n_triples == 1


def test_labels_are_case_sensitive():
    g = parse_triples("a R b\na r b")
    assert g.relation_labels == {"R", "r"}
    assert g.n_triples == 2


def test_json_form():
    doc = {"name": "pig", "triples": [["snout", "pw", "pig"], ["tail", "pw", "pig"]]}
    g = parse_triples(json.dumps(doc))
    assert g.name == "pig" and g.n_triples == 2
    assert parse_triples(json.dumps(doc["triples"])).triples == g.triples


@pytest.mark.parametrize("text", ['{"triples": [["a", "b"]]}', "[1, 2]", "{bad json"])
def test_json_malformed(text):
    with pytest.raises(MalformedLine):
        parse_triples(text)


def test_neighbors_examples():
    g = parse_triples("snout pw pig")
    assert neighbors(g, "pig", IN) == [("pw", "snout", "in")]
    assert neighbors(g, "pig", OUT) == []
    g2 = parse_triples("a r c\na r b")
    assert neighbors(g2, "a", BOTH) == [("r", "b", "out"), ("r", "c", "out")]


def test_neighbors_unknown():
    with pytest.raises(UnknownConcept):
        neighbors(parse_triples("a r b"), "z")


def test_load_graph_uses_stem(tmp_path):
    p = tmp_path / "cactus.triples"
    p.write_text("spine pw cactus\n")
    assert load_graph(p).name == "cactus"


def test_fixture_graphs_parse(graphs):
    for name, g in graphs.items():
        assert g.name == name
        assert g.n_triples >= 5


tokens = st.sampled_from(["a", "b", "c", "d", "e"])
labels = st.sampled_from(["pw", "isa", "r"])
triple_lists = st.lists(st.tuples(tokens, labels, tokens).filter(lambda t: t[0] != t[2]),
                        max_size=15)


@given(triple_lists)
def test_text_round_trip(rows):
    g = ConceptGraph.from_triples([Triple(*r) for r in rows], name="g")
    assert parse_triples(g.to_text()) == g
    assert parse_triples(json.dumps(g.to_json())) == g


@given(triple_lists, st.randoms(use_true_random=False))
def test_order_independent(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    text = "\n".join(" ".join(r) for r in rows)
    text2 = "\n".join(" ".join(r) for r in shuffled)
    assert parse_triples(text) == parse_triples(text2)


@given(triple_lists)
def test_both_is_disjoint_union(rows):
    g = parse_triples("\n".join(" ".join(r) for r in rows))
    for c in g.concepts:
        out, inc = neighbors(g, c, OUT), neighbors(g, c, IN)
        assert not set(out) & set(inc)
        assert sorted(out + inc) == neighbors(g, c, BOTH)
