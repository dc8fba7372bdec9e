"""Analogy-driven visual blending of vector-graphics scenes."""

from __future__ import annotations

from .blender import Blend, BlendProvenance, construct_blend
from .evolution import EvolutionParams, Individual, Population, evolve
from .graph import ConceptGraph, Triple, load_graph, parse_triples
from .kernels import BACKEND
from .mapper import Analogy, MapperParams, expand_root_mapping, find_analogies
from .relations import fitness
from .scene import GraphicObject, Scene, SceneRelation, Shape, Style, load_scene, read_scene

__version__ = "0.1.0"

__all__ = [
    "Analogy", "BACKEND", "Blend", "BlendProvenance", "ConceptGraph", "EvolutionParams",
    "GraphicObject", "Individual", "MapperParams", "Population", "Scene", "SceneRelation",
    "Shape", "Style", "Triple", "construct_blend", "evolve", "expand_root_mapping",
    "find_analogies", "fitness", "load_graph", "load_scene", "parse_triples", "read_scene",
]
