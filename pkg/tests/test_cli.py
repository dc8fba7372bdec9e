from __future__ import annotations

import csv
import json
import logging
import subprocess
import sys

import pytest

from visblend.cli import main
from visblend.scene import load_scene
from visblend.svgio import import_svg


@pytest.fixture
def fx(tmp_path, fixture_dir):
    assert main(["fixtures", str(tmp_path / "fx")]) == 0
    return tmp_path / "fx"


def test_fixtures_command(fx):
    names = {p.name for p in fx.iterdir()}
    for c in ("pig", "cactus", "angel"):
        assert {f"{c}.triples", f"{c}.json", f"{c}.svg", f"{c}.relations.json"} <= names


def test_map(fx, tmp_path, capsys):
    out = tmp_path / "an.json"
    assert main(["map", str(fx / "pig.triples"), str(fx / "cactus.triples"), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["left"] == "pig" and doc["right"] == "cactus"
    assert len(doc["analogies"]) >= 1
    assert "max mapping size 7" in capsys.readouterr().out


def test_map_disjoint(tmp_path):
    (tmp_path / "a.triples").write_text("a r b\n")
    (tmp_path / "b.triples").write_text("x q y\n")
    code = main(["map", str(tmp_path / "a.triples"), str(tmp_path / "b.triples"),
                 "-o", str(tmp_path / "o.json")])
    assert code == 3


def test_map_missing_and_malformed(fx, tmp_path, capsys):
    assert main(["map", str(fx / "pig.triples"), str(tmp_path / "nope.triples"),
                 "-o", str(tmp_path / "o.json")]) == 2
    assert "nope.triples" in capsys.readouterr().err
    (tmp_path / "bad.triples").write_text("a r\n")
    assert main(["map", str(fx / "pig.triples"), str(tmp_path / "bad.triples"),
                 "-o", str(tmp_path / "o.json")]) == 2
    (tmp_path / "bin.triples").write_bytes(b"\xff\xfe\x00")
    assert main(["map", str(fx / "pig.triples"), str(tmp_path / "bin.triples"),
                 "-o", str(tmp_path / "o.json")]) == 2


def _analogies(fx, tmp_path, a="angel", b="pig"):
    out = tmp_path / f"{a}_{b}.json"
    assert main(["map", str(fx / f"{a}.triples"), str(fx / f"{b}.triples"), "-o", str(out)]) == 0
    return out


def test_blend(fx, tmp_path):
    an = _analogies(fx, tmp_path)
    out1, out2 = tmp_path / "b1", tmp_path / "b2"
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(out1), "--seed", "7"]) == 0
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(out2), "--seed", "7"]) == 0
    svgs = sorted(p.name for p in out1.glob("*.svg"))
    assert svgs
    for name in svgs:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        meta = json.loads((out1 / name).with_suffix(".json").read_text())
        assert {"analogy_index", "fitness", "provenance", "scene"} <= set(meta)
        assert meta["provenance"]["replacements"]
        scene = load_scene(meta["scene"])
        back = import_svg((out1 / name).read_text())
        assert back.paths() == scene.paths()


def test_blend_seed_from_env(fx, tmp_path, monkeypatch):
    an = _analogies(fx, tmp_path)
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(tmp_path / "a"),
                 "--seed", "12"]) == 0
    monkeypatch.setenv("BLEND_SEED", "12")
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(tmp_path / "b")]) == 0
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()
    monkeypatch.setenv("BLEND_SEED", "abc")
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(tmp_path / "c")]) == 2


def test_blend_empty_analogy_file(fx, tmp_path, caplog):
    p = tmp_path / "empty.json"
    p.write_text(json.dumps({"left": "pig", "right": "cactus", "analogies": []}))
    with caplog.at_level(logging.WARNING):
        assert main(["blend", str(p), "--scenes", str(fx), "-o", str(tmp_path / "o")]) == 0
    assert "no analogies" in caplog.text
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize("content", ["[1,", '{"analogies": [{"root": ["a"]}]}', '"text"'])
def test_blend_schema_errors(fx, tmp_path, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    assert main(["blend", str(p), "--scenes", str(fx), "-o", str(tmp_path / "o")]) == 2


def test_blend_bad_scene(fx, tmp_path):
    an = _analogies(fx, tmp_path)
    (fx / "pig.json").write_text('{"concept": "pig"}')
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(tmp_path / "o")]) == 2
    (fx / "pig.json").unlink()
    (fx / "pig.svg").unlink()
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(tmp_path / "o")]) == 2


def test_blend_falls_back_to_svg(fx, tmp_path):
    an = _analogies(fx, tmp_path)
    (fx / "pig.json").unlink()
    assert main(["blend", str(an), "--scenes", str(fx), "-o", str(tmp_path / "o"),
                 "--seed", "1"]) == 0
    assert list((tmp_path / "o").glob("*.svg"))


def _evolve(fx, out, *extra):
    return main(["evolve", str(fx / "pig.triples"), str(fx / "cactus.triples"),
                 str(fx / "angel.triples"), "-o", str(out), "--pop-size", "8", *extra])


def test_evolve_outputs(fx, tmp_path):
    out = tmp_path / "run"
    assert _evolve(fx, out, "--generations", "4", "--seed", "3") == 0
    rows = list(csv.DictReader((out / "elite.csv").open()))
    assert set(rows[0]) == {"generation", "population", "best", "mean"}
    pops = {r["population"] for r in rows}
    assert len(pops) == 5
    for p in pops:
        best = [float(r["best"]) for r in rows if r["population"] == p]
        assert best == sorted(best) and len(best) == 5
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["params"]["seed"] == 3 and manifest["params"]["max_size"] == 8
    for f in manifest["files"]:
        assert (out / f).exists()
    index = json.loads((out / "index.json").read_text())
    assert any(e["compositions"] for e in index if e["rank"] == 0)


def test_evolve_zero_generations(fx, tmp_path):
    out = tmp_path / "run"
    assert _evolve(fx, out, "--generations", "0") == 0
    rows = list(csv.DictReader((out / "elite.csv").open()))
    assert {r["generation"] for r in rows} == {"0"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert all(p["generations"] == 0 for p in manifest["populations"])


def test_evolve_deterministic(fx, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _evolve(fx, a, "--generations", "3", "--seed", "9") == 0
    assert _evolve(fx, b, "--generations", "3", "--seed", "9") == 0
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_evolve_input_errors(fx, tmp_path):
    assert _evolve(fx, tmp_path / "o", "--mutation", "2") == 2
    assert main(["evolve", str(fx / "pig.triples"), str(fx / "pig.triples"),
                 "-o", str(tmp_path / "o")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["evolve", str(fx / "pig.triples"), "-o", str(tmp_path / "o")])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        _evolve(fx, tmp_path / "o", "--raster", "big")
    assert exc.value.code == 2


def test_evolve_no_analogy(tmp_path):
    for n, line in (("a", "a r b"), ("b", "x q y")):
        (tmp_path / f"{n}.triples").write_text(line + "\n")
        (tmp_path / f"{n}.json").write_text(json.dumps(
            {"concept": n, "canvas": [1000, 1000], "relations": [],
             "root": {"name": n, "offset": [0, 0], "shape": None, "children": []}}))
    code = main(["evolve", str(tmp_path / "a.triples"), str(tmp_path / "b.triples"),
                 "-o", str(tmp_path / "o")])
    assert code == 3


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "visblend.cli", "--help"],
                         capture_output=True, text=True, check=True)
    for cmd in ("map", "blend", "evolve", "fixtures"):
        assert cmd in out.stdout
