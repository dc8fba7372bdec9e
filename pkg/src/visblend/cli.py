"""Command-line entry point: ``visblend map | blend | evolve | fixtures``.

Exit codes: 0 success, 2 input error, 3 empty result.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import shutil
import sys
from importlib import resources
from pathlib import Path

from .blender import LEFT, RIGHT, SIMILARITY_THRESHOLD, construct_blend
from .evolution import Bases, EvolutionError, EvolutionParams, evolve
from .graph import GraphError, load_graph
from .mapper import (Analogy, MapperError, MapperParams, NoAnalogy, analogies_from_json,
                     analogies_to_json, find_analogies)
from .relations import fitness
from .scene import Scene, SceneError, dumps_scene, read_scene
from .svgio import export_svg, read_svg_scene

log = logging.getLogger("visblend")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3


class InputError(Exception):
    pass


def _raster(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("raster dimensions must be positive")
    return (w, h)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("BLEND_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"BLEND_SEED must be an integer, got {env!r}") from None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _dump(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def _mapper_params(args) -> MapperParams:
    return MapperParams(max_depth=args.max_depth, cross_space_only=args.cross_space_only)


def _load_graph(path: str):
    try:
        return load_graph(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except (GraphError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_scene(scenes_dir: Path, name: str) -> Scene:
    """``name.json`` or else ``name.svg`` (with optional relations sidecar)."""
    js, svg = scenes_dir / f"{name}.json", scenes_dir / f"{name}.svg"
    try:
        if js.exists():
            return read_scene(js)
        if svg.exists():
            return read_svg_scene(svg, concept=name)
    except (OSError, SceneError, json.JSONDecodeError) as exc:
        raise InputError(f"scene {name!r}: {exc}") from None
    raise InputError(f"no scene for {name!r} in {scenes_dir} (looked for {js.name}, {svg.name})")


# ---------------------------------------------------------------------------
# map


def cmd_map(args) -> int:
    a, b = _load_graph(args.left), _load_graph(args.right)
    try:
        found = find_analogies(a, b, _mapper_params(args))
    except NoAnalogy as exc:
        print(f"no analogy: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except MapperError as exc:
        raise InputError(str(exc)) from None
    _write(Path(args.out), _dump(analogies_to_json(found, a.name, b.name)))
    print(f"{len(found)} analogies, max mapping size {max(len(x) for x in found)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# blend


def _read_analogies(path: str) -> tuple[str, str, list[Analogy]]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return analogies_from_json(doc)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except (json.JSONDecodeError, MapperError) as exc:
        raise InputError(f"{path}: {exc}") from None


def blend_seed(seed: int, index: int, choice: str) -> int:
    return seed * 1_000_003 + 2 * index + (choice == RIGHT)


def cmd_blend(args) -> int:
    left, right, analogies = _read_analogies(args.analogies)
    if not analogies:
        log.warning("%s holds no analogies; nothing to blend", args.analogies)
        return EXIT_OK
    scenes_dir = Path(args.scenes)
    ra, rb = _load_scene(scenes_dir, left), _load_scene(scenes_dir, right)
    out = Path(args.out)
    seed = _seed(args)
    bases = Bases(ra, rb, args.similarity_threshold, args.raster, left, right)
    written = 0
    for i, an in enumerate(analogies):
        for choice in (LEFT, RIGHT):
            base, donor = bases.oriented(choice)
            s = blend_seed(seed, i, choice)
            bl = construct_blend(an, choice, base, donor, s, gate=bases.gate(choice),
                                 base_id=bases.ids[choice],
                                 donor_id=bases.ids[RIGHT if choice == LEFT else LEFT])
            if bl is None:
                log.info("analogy %d (%s base): rejected by the similarity gate", i, choice)
                continue
            stem = f"blend_{i:03d}_{choice}"
            _write(out / f"{stem}.svg", export_svg(bl.scene))
            _write(out / f"{stem}.json", _dump({"analogy_index": i,
                                                "fitness": fitness(bl.scene),
                                                "provenance": bl.provenance.to_json(),
                                                "scene": json.loads(dumps_scene(bl.scene))}))
            written += 1
    print(f"{written} blends written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# evolve


def _evolution_params(args) -> EvolutionParams:
    try:
        return EvolutionParams(
            mutation_prob=args.mutation, recombination_prob=args.recombination,
            tournament_size=args.tournament, crossover_points=args.crossover_points,
            max_size=args.pop_size, generations=args.generations, step=args.step,
            seed=_seed(args), similarity_threshold=args.similarity_threshold,
            raster=args.raster)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _gather_analogies(graphs, mp: MapperParams) -> list[Analogy]:
    found = []
    for a, b in itertools.combinations(graphs, 2):
        try:
            found += find_analogies(a, b, mp)
        except NoAnalogy:
            log.warning("no analogy between %s and %s", a.name, b.name)
        except MapperError as exc:
            raise InputError(str(exc)) from None
    return found


def _fmt(v: float) -> str:
    return repr(float(v))


def cmd_evolve(args) -> int:
    params = _evolution_params(args)
    graphs = [_load_graph(p) for p in args.triples]
    names = [g.name for g in graphs]
    if len(set(names)) != len(names):
        raise InputError(f"concept graph names must be distinct, got {names}")
    scenes_dir = Path(args.scenes) if args.scenes else Path(args.triples[0]).parent
    scenes = {n: _load_scene(scenes_dir, n) for n in names}
    analogies = _gather_analogies(graphs, _mapper_params(args))
    if not analogies:
        print("no analogy between any pair of inputs", file=sys.stderr)
        return EXIT_EMPTY
    try:
        results = evolve(analogies, scenes, params, skip_exhausted=True)
    except EvolutionError as exc:
        raise InputError(str(exc)) from None
    if all(r is None for r in results):
        print("every population failed to produce an acceptable blend", file=sys.stderr)
        return EXIT_EMPTY

    out = Path(args.out)
    rows = io.StringIO(newline="")
    w = csv.writer(rows, lineterminator="\n")
    w.writerow(["generation", "population", "best", "mean"])
    index, pops = [], []
    for p, (an, res) in enumerate(zip(analogies, results)):
        entry = {"population": p, "left": an.left_name, "right": an.right_name,
                 "analogy": an.to_json()}
        if res is None:
            pops.append({**entry, "skipped": True})
            continue
        for gen, (best, mean) in enumerate(zip(res.elite_history, res.mean_history)):
            w.writerow([gen, p, _fmt(best), _fmt(mean)])
        ranked = sorted(res.population.individuals, key=lambda ind: -ind.fitness)
        for rank, ind in enumerate(ranked):
            rel = f"gallery/pop{p:02d}/rank{rank:03d}.svg"
            _write(out / rel, export_svg(ind.scene))
            index.append({"population": p, "rank": rank, "file": rel,
                          "fitness": ind.fitness,
                          "compositions": len(ind.blend.provenance.compositions),
                          "provenance": ind.blend.provenance.to_json()})
        pops.append({**entry, "skipped": False, "generations": res.population.generation,
                     "size": len(res.population), "elite_curve": res.elite_history,
                     "mean_curve": res.mean_history})
    _write(out / "elite.csv", rows.getvalue())
    _write(out / "index.json", _dump(index))
    manifest = {
        "inputs": [{"name": g.name, "triples": Path(t).name} for g, t in zip(graphs, args.triples)],
        "params": params.to_json(),
        "mapper": {"max_depth": args.max_depth, "cross_space_only": args.cross_space_only},
        "populations": pops,
        "files": ["elite.csv", "index.json"] + [e["file"] for e in index],
    }
    _write(out / "manifest.json", _dump(manifest))
    done = sum(r is not None for r in results)
    best = max(r.elite_history[-1] for r in results if r is not None)
    print(f"{done} populations evolved, best elite fitness {best:.4f}; output in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fixtures


def cmd_fixtures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    src = resources.files("visblend") / "fixtures"
    for item in sorted(src.iterdir(), key=lambda t: t.name):
        if item.is_file():
            with resources.as_file(item) as f:
                shutil.copyfile(f, out / item.name)
            print(out / item.name)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="visblend", description="Analogy-driven visual blending.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def mapper_flags(p):
        p.add_argument("--max-depth", type=int, default=MapperParams.max_depth)
        p.add_argument("--cross-space-only", action=argparse.BooleanOptionalAction,
                       default=True, help="root pairs take one concept from each side")

    def gate_flags(p):
        p.add_argument("--seed", type=int, default=None,
                       help="random seed (falls back to $BLEND_SEED, then 0)")
        p.add_argument("--similarity-threshold", type=float, default=SIMILARITY_THRESHOLD)
        p.add_argument("--raster", type=_raster, default=(256, 256), metavar="WxH")

    p = sub.add_parser("map", help="find analogies between two concept graphs")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("-o", "--out", required=True)
    mapper_flags(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("blend", help="build one blend per analogy and orientation")
    p.add_argument("analogies")
    p.add_argument("--scenes", required=True, help="directory holding <concept>.json or .svg")
    p.add_argument("-o", "--out", required=True)
    gate_flags(p)
    p.set_defaults(func=cmd_blend)

    d = EvolutionParams()
    p = sub.add_parser("evolve", help="map, blend and evolve populations for several concepts")
    p.add_argument("triples", nargs="+", help="two or more concept graph files")
    p.add_argument("--scenes", default=None,
                   help="scene directory (default: directory of the first graph)")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--generations", type=int, default=d.generations)
    p.add_argument("--pop-size", type=int, default=d.max_size)
    p.add_argument("--mutation", type=float, default=d.mutation_prob)
    p.add_argument("--recombination", type=float, default=d.recombination_prob)
    p.add_argument("--tournament", type=int, default=d.tournament_size)
    p.add_argument("--crossover-points", type=int, default=d.crossover_points)
    p.add_argument("--step", type=float, default=d.step)
    gate_flags(p)
    mapper_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("fixtures", help="copy the bundled pig/cactus/angel inputs")
    p.add_argument("out")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    if args.command == "evolve" and len(args.triples) < 2:
        ap.error("evolve needs at least two concept graph files")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
