"""Genetic search over blend layouts, one population per analogy.

A generation runs five tasks in order: refill to the maximum size, keep the
best individual aside, mutate object offsets, recombine same-named objects
between tournament-selected parents and drop duplicates. The stored elite is
put back afterwards, so the best fitness of a population never goes down.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field

from .blender import (LEFT, RASTER_SIZE, RIGHT, SIMILARITY_THRESHOLD, Blend,
                      SimilarityGate, construct_blend)
from .mapper import Analogy
from .relations import fitness as scene_fitness
from .scene import Scene, save_scene

log = logging.getLogger(__name__)

Gene = tuple[str, tuple[float, float]]


class EvolutionError(RuntimeError):
    pass


class RefillExhausted(EvolutionError):
    """Every blend attempted while refilling was rejected."""


@dataclass(frozen=True)
class EvolutionParams:
    mutation_prob: float = 0.05
    recombination_prob: float = 0.2
    tournament_size: int = 2
    crossover_points: int = 2
    max_size: int = 50
    generations: int = 100
    step: float = 30.0
    seed: int = 0
    similarity_threshold: float = SIMILARITY_THRESHOLD
    raster: tuple[int, int] = RASTER_SIZE
    retry_factor: int = 100

    def __post_init__(self):
        for name in ("mutation_prob", "recombination_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be >= 2")
        if self.crossover_points < 1:
            raise ValueError("crossover_points must be >= 1")
        if self.max_size < 1:
            raise ValueError("max_size must be positive")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.step < 0:
            raise ValueError("step must be >= 0")

    def to_json(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["raster"] = list(self.raster)
        return d


def genome(scene: Scene) -> list[Gene]:
    """One ``(path, offset)`` gene per non-root object, in tree pre-order."""
    return [(p, o.offset) for p, o in scene.walk() if p]


def genome_key(scene: Scene) -> bytes:
    """Canonical bytes of the whole individual, used for duplicate removal."""
    return json.dumps(save_scene(scene), separators=(",", ":")).encode()


@dataclass
class Individual:
    blend: Blend
    _fitness: float | None = field(default=None, repr=False)
    _key: bytes | None = field(default=None, repr=False)

    @property
    def scene(self) -> Scene:
        return self.blend.scene

    @property
    def fitness(self) -> float:
        if self._fitness is None:
            self._fitness = scene_fitness(self.blend.scene)
        return self._fitness

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = genome_key(self.blend.scene)
        return self._key

    def genome(self) -> list[Gene]:
        return genome(self.blend.scene)

    def invalidate(self) -> None:
        self._fitness = None
        self._key = None

    def copy(self) -> Individual:
        return Individual(self.blend.copy(), self._fitness, self._key)


class Bases:
    """The two input scenes of an analogy, with similarity gates cached per orientation."""

    def __init__(self, left: Scene, right: Scene, threshold: float = SIMILARITY_THRESHOLD,
                 raster: tuple[int, int] = RASTER_SIZE,
                 left_id: str | None = None, right_id: str | None = None):
        self.left = left
        self.right = right
        self.threshold = threshold
        self.raster = raster
        self.ids = {LEFT: left_id or left.concept, RIGHT: right_id or right.concept}
        self._gates: dict[str, SimilarityGate] = {}

    def oriented(self, choice: str) -> tuple[Scene, Scene]:
        return (self.left, self.right) if choice == LEFT else (self.right, self.left)

    def gate(self, choice: str) -> SimilarityGate:
        if choice not in self._gates:
            ra, rb = self.oriented(choice)
            self._gates[choice] = SimilarityGate(ra, rb, self.threshold, self.raster)
        return self._gates[choice]


@dataclass
class Population:
    analogy: Analogy
    individuals: list[Individual] = field(default_factory=list)
    max_size: int = 50
    generation: int = 0

    def __len__(self) -> int:
        return len(self.individuals)

    def best(self) -> Individual:
        if not self.individuals:
            raise EvolutionError("empty population has no best individual")
        return max(self.individuals, key=lambda ind: ind.fitness)

    def fitnesses(self) -> list[float]:
        return [ind.fitness for ind in self.individuals]


@dataclass
class EvolutionResult:
    population: Population
    elite_history: list[float]
    mean_history: list[float]


# ---------------------------------------------------------------------------
# refill


def refill(pop: Population, params: EvolutionParams, bases: Bases,
           rng: random.Random) -> Population:
    """Add fresh blends until the population is full or the retry budget runs out.

    Each candidate draws its own base orientation and construction seed.
    Candidates identical to a member are skipped.
    """
    deficit = pop.max_size - len(pop)
    if deficit <= 0:
        return pop
    seen = {ind.key for ind in pop.individuals}
    budget = params.retry_factor * deficit
    built = 0
    for _ in range(budget):
        if len(pop) >= pop.max_size:
            break
        choice = LEFT if rng.random() < 0.5 else RIGHT
        seed = rng.getrandbits(32)
        ra, rb = bases.oriented(choice)
        blend = construct_blend(pop.analogy, choice, ra, rb, seed, gate=bases.gate(choice),
                                base_id=bases.ids[choice],
                                donor_id=bases.ids[RIGHT if choice == LEFT else LEFT])
        if blend is None:
            continue
        built += 1
        ind = Individual(blend)
        if ind.key in seen:
            continue
        seen.add(ind.key)
        pop.individuals.append(ind)
    if built == 0:
        raise RefillExhausted(
            f"no acceptable blend in {budget} attempts for analogy rooted at "
            f"{pop.analogy.root.left}/{pop.analogy.root.right}")
    return pop


# ---------------------------------------------------------------------------
# variation


def mutate(ind: Individual, params: EvolutionParams, rng: random.Random) -> Individual:
    """Return a copy in which each gene moves by U[-step, step]^2 with ``mutation_prob``.

    Offsets are parent-relative, so an object's descendants follow it rigidly.
    """
    out = ind.copy()
    changed = False
    for _, obj in out.scene.walk():
        if obj is out.scene.root:
            continue
        if rng.random() < params.mutation_prob:
            dx = rng.uniform(-params.step, params.step)
            dy = rng.uniform(-params.step, params.step)
            obj.offset = (obj.offset[0] + dx, obj.offset[1] + dy)
            changed = True
    if changed:
        out.invalidate()
    return out


def cut_points(n_aligned: int, n_points: int, rng: random.Random) -> list[int]:
    """Sorted distinct cut positions in ``1..n_aligned-1`` (fewer if too short)."""
    slots = range(1, n_aligned)
    return sorted(rng.sample(slots, min(n_points, len(slots))))


def crossover(p1: Individual, p2: Individual, params: EvolutionParams,
              rng: random.Random) -> tuple[Individual, Individual]:
    """N-point crossover of offsets over the object paths both parents share.

    The shared paths, in ``p1``'s pre-order, are split at random cut points and
    every other segment swaps offsets between the children. Objects present in
    only one parent keep their own offset, and no tree structure moves.
    """
    c1, c2 = p1.copy(), p2.copy()
    objs2 = dict(c2.scene.walk())
    aligned = [(p, o, objs2[p]) for p, o in c1.scene.walk() if p and p in objs2]
    cuts = cut_points(len(aligned), params.crossover_points, rng)
    bounds = [0, *cuts, len(aligned)]
    swapped = False
    for k in range(1, len(bounds) - 1, 2):
        for _, a, b in aligned[bounds[k]:bounds[k + 1]]:
            if a.offset != b.offset:
                a.offset, b.offset = b.offset, a.offset
                swapped = True
    if swapped:
        c1.invalidate()
        c2.invalidate()
    return c1, c2


def tournament(pop: Population, size: int, rng: random.Random) -> int:
    """Index of the fittest of ``size`` distinct random members (first wins ties)."""
    picks = rng.sample(range(len(pop)), min(size, len(pop)))
    return max(picks, key=lambda i: (pop.individuals[i].fitness, -i))


# ---------------------------------------------------------------------------
# duplicate removal


def dedupe(individuals: list[Individual]) -> list[Individual]:
    seen = set()
    out = []
    for ind in individuals:
        if ind.key not in seen:
            seen.add(ind.key)
            out.append(ind)
    return out


# ---------------------------------------------------------------------------
# generation loop


def step_generation(pop: Population, params: EvolutionParams, bases: Bases,
                    rng: random.Random) -> Population:
    refill(pop, params, bases, rng)
    inds = pop.individuals
    elite_idx = max(range(len(inds)), key=lambda i: (inds[i].fitness, -i))
    elite = inds[elite_idx]
    inds = [ind if i == elite_idx else mutate(ind, params, rng)
            for i, ind in enumerate(inds)]
    pop.individuals = inds
    if len(inds) >= 2:
        for _ in range(len(inds)):
            if rng.random() >= params.recombination_prob:
                continue
            a = tournament(pop, params.tournament_size, rng)
            b = tournament(pop, params.tournament_size, rng)
            if a == b:
                continue
            inds[a], inds[b] = crossover(inds[a], inds[b], params, rng)
    inds = dedupe(inds)
    if all(ind.key != elite.key for ind in inds):
        inds.append(elite)
        if len(inds) > pop.max_size:
            worst = min(range(len(inds) - 1), key=lambda i: (inds[i].fitness, -i))
            del inds[worst]
    pop.individuals = inds
    pop.generation += 1
    return pop


def population_rng(seed: int, index: int) -> random.Random:
    return random.Random(seed + index)


def run_population(analogy: Analogy, bases: Bases, params: EvolutionParams,
                   index: int = 0) -> EvolutionResult:
    """Evolve one analogy's population; history entry 0 is the refilled start."""
    rng = population_rng(params.seed, index)
    pop = Population(analogy, max_size=params.max_size)
    refill(pop, params, bases, rng)
    elite = [pop.best().fitness]
    mean = [sum(pop.fitnesses()) / len(pop)]
    for _ in range(params.generations):
        step_generation(pop, params, bases, rng)
        elite.append(pop.best().fitness)
        mean.append(sum(pop.fitnesses()) / len(pop))
    return EvolutionResult(pop, elite, mean)


def bases_for(analogy: Analogy, scenes: dict[str, Scene], params: EvolutionParams) -> Bases:
    """Pick the scenes for both sides of ``analogy`` by graph name."""
    missing = [n for n in (analogy.left_name, analogy.right_name) if n not in scenes]
    if missing:
        raise EvolutionError(f"no scene for {', '.join(map(repr, missing))}")
    return Bases(scenes[analogy.left_name], scenes[analogy.right_name],
                 params.similarity_threshold, params.raster,
                 analogy.left_name, analogy.right_name)


def evolve(analogies: list[Analogy], scenes: dict[str, Scene],
           params: EvolutionParams, skip_exhausted: bool = False) -> list[EvolutionResult | None]:
    """Evolve one population per analogy.

    ``scenes`` maps each graph name to its scene. Population ``i`` uses the
    random stream ``seed + i``. With ``skip_exhausted`` an analogy that yields
    no acceptable blend gives ``None`` instead of raising.
    """
    if not analogies:
        raise EvolutionError("need at least one analogy")
    gates: dict[tuple[str, str], Bases] = {}
    results: list[EvolutionResult | None] = []
    for i, an in enumerate(analogies):
        k = (an.left_name, an.right_name)
        if k not in gates:
            gates[k] = bases_for(an, scenes, params)
        try:
            results.append(run_population(an, gates[k], params, i))
        except RefillExhausted as exc:
            if not skip_exhausted:
                raise
            log.warning("population %d skipped: %s", i, exc)
            results.append(None)
    return results
