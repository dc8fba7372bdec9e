"""Composite graphic objects and the scenes built from them.

A :class:`Scene` is a tree of named :class:`GraphicObject` nodes. Each node has
an optional :class:`Shape` in its own local frame and an ``offset`` relative to
its parent, so moving a node carries its whole subtree. Relations between parts
live on the scene and address parts by slash-joined paths of names below the
root (the root itself is the empty path).

Coordinates are abstract units, origin top-left, y growing downwards.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import kernels

CANVAS = (1000.0, 1000.0)
SHAPE_KINDS = ("polyline", "polygon", "ellipse", "path")
RELATION_TYPES = ("above", "below", "leftOf", "rightOf", "lowerPartOf", "upperPartOf",
                  "overlaps", "inside")
ELLIPSE_VERTICES = 96
CUBIC_STEPS = 24


class SceneError(ValueError):
    pass


class SchemaError(SceneError):
    def __init__(self, where: str, detail: str):
        super().__init__(f"{where}: {detail}")
        self.where = where


class DanglingRelation(SceneError):
    def __init__(self, index: int, detail: str = ""):
        super().__init__(f"relation {index} does not resolve {detail}".rstrip())
        self.index = index


class UnknownPath(SceneError, KeyError):
    def __str__(self) -> str:
        return f"no object at path {self.args[0]!r}"


class EmptyGeometry(SceneError):
    pass


# ---------------------------------------------------------------------------
# geometry primitives


@dataclass(frozen=True)
class BBox:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def shifted(self, dx: float, dy: float) -> BBox:
        return BBox(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def union(self, other: BBox) -> BBox:
        return BBox(min(self.x0, other.x0), min(self.y0, other.y0),
                    max(self.x1, other.x1), max(self.y1, other.y1))

    def intersects(self, other: BBox) -> bool:
        return (self.x0 <= other.x1 and other.x0 <= self.x1
                and self.y0 <= other.y1 and other.y0 <= self.y1)

    def contains(self, other: BBox, tol: float = 0.0) -> bool:
        return (self.x0 - tol <= other.x0 and self.y0 - tol <= other.y0
                and other.x1 <= self.x1 + tol and other.y1 <= self.y1 + tol)


Color = tuple[int, int, int]


@dataclass
class Style:
    stroke_width: float = 2.0
    stroke: Color | None = (0, 0, 0)
    fill: Color | None = None


def _cubic_point(p0, p1, p2, p3, t):
    mt = 1.0 - t
    return (mt ** 3 * p0 + 3 * mt * mt * t * p1 + 3 * mt * t * t * p2 + t ** 3 * p3)


def _cubic_extrema(p0, p1, p2, p3) -> list[float]:
    # roots of the derivative in (0, 1), one coordinate at a time
    a = -p0 + 3 * p1 - 3 * p2 + p3
    b = 2 * (p0 - 2 * p1 + p2)
    c = p1 - p0
    ts = []
    if abs(a) < 1e-12:
        if abs(b) > 1e-12:
            ts.append(-c / b)
    else:
        disc = b * b - 4 * a * c
        if disc >= 0:
            r = math.sqrt(disc)
            ts += [(-b + r) / (2 * a), (-b - r) / (2 * a)]
    return [t for t in ts if 0.0 < t < 1.0]


@dataclass
class Shape:
    """A single primitive in its object's local frame.

    ``points`` is used by polylines and polygons, ``center``/``radii`` by
    ellipses, and ``segments`` by paths (``("M", x, y)``, ``("L", x, y)``,
    ``("C", x1, y1, x2, y2, x, y)``, ``("Z",)``).
    """

    kind: str
    points: list[tuple[float, float]] = field(default_factory=list)
    center: tuple[float, float] = (0.0, 0.0)
    radii: tuple[float, float] = (0.0, 0.0)
    segments: list[tuple] = field(default_factory=list)
    style: Style = field(default_factory=Style)

    def __post_init__(self):
        self.validate()

    def validate(self, where: str = "shape") -> None:
        if self.kind not in SHAPE_KINDS:
            raise SchemaError(where, f"unknown shape kind {self.kind!r}")
        if self.kind in ("polyline", "polygon") and len(self.points) < 2:
            raise SchemaError(where, f"{self.kind} needs at least 2 points")
        if self.kind == "ellipse" and not (self.radii[0] > 0 and self.radii[1] > 0):
            raise SchemaError(where, "ellipse radii must be positive")
        if self.kind == "path":
            if not self.segments or self.segments[0][0] != "M":
                raise SchemaError(where, "path must start with M")
            for seg in self.segments:
                want = {"M": 3, "L": 3, "C": 7, "Z": 1}.get(seg[0])
                if want is None or len(seg) != want:
                    raise SchemaError(where, f"bad path segment {seg!r}")

    @property
    def closed(self) -> bool:
        if self.kind in ("polygon", "ellipse"):
            return True
        if self.kind == "path":
            return any(s[0] == "Z" for s in self.segments)
        return False

    def copy(self) -> Shape:
        return Shape(self.kind, list(self.points), self.center, self.radii,
                     list(self.segments), Style(self.style.stroke_width,
                                                self.style.stroke, self.style.fill))

    def rings(self) -> list[tuple[np.ndarray, bool]]:
        """Flattened outlines as ``(points (k, 2), closed)``."""
        if self.kind == "polyline":
            return [(np.asarray(self.points, float), False)]
        if self.kind == "polygon":
            return [(np.asarray(self.points, float), True)]
        if self.kind == "ellipse":
            t = np.linspace(0.0, 2 * math.pi, ELLIPSE_VERTICES, endpoint=False)
            cx, cy = self.center
            rx, ry = self.radii
            return [(np.column_stack([cx + rx * np.cos(t), cy + ry * np.sin(t)]), True)]
        out = []
        cur: list[tuple[float, float]] = []
        closed = False
        for seg in self.segments:
            op = seg[0]
            if op == "M":
                if len(cur) >= 2:
                    out.append((np.asarray(cur, float), closed))
                cur, closed = [(seg[1], seg[2])], False
            elif op == "L":
                cur.append((seg[1], seg[2]))
            elif op == "C":
                x0, y0 = cur[-1]
                ts = np.linspace(0, 1, CUBIC_STEPS + 1)[1:]
                xs = _cubic_point(x0, seg[1], seg[3], seg[5], ts)
                ys = _cubic_point(y0, seg[2], seg[4], seg[6], ts)
                cur.extend(zip(xs.tolist(), ys.tolist()))
            else:
                closed = True
        if len(cur) >= 2:
            out.append((np.asarray(cur, float), closed))
        return out

    def bbox(self) -> BBox:
        if self.kind == "ellipse":
            (cx, cy), (rx, ry) = self.center, self.radii
            return BBox(cx - rx, cy - ry, cx + rx, cy + ry)
        if self.kind in ("polyline", "polygon"):
            pts = np.asarray(self.points, float)
            return BBox(*map(float, pts.min(axis=0)), *map(float, pts.max(axis=0)))
        xs, ys = [], []
        cur = (0.0, 0.0)
        for seg in self.segments:
            if seg[0] in ("M", "L"):
                cur = (seg[1], seg[2])
                xs.append(cur[0])
                ys.append(cur[1])
            elif seg[0] == "C":
                (x0, y0), (x3, y3) = cur, (seg[5], seg[6])
                for t in _cubic_extrema(x0, seg[1], seg[3], x3):
                    xs.append(_cubic_point(x0, seg[1], seg[3], x3, t))
                for t in _cubic_extrema(y0, seg[2], seg[4], y3):
                    ys.append(_cubic_point(y0, seg[2], seg[4], y3, t))
                xs.append(x3)
                ys.append(y3)
                cur = (x3, y3)
        return BBox(min(xs), min(ys), max(xs), max(ys))

    def to_json(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind in ("polyline", "polygon"):
            d["points"] = [[float(x), float(y)] for x, y in self.points]
        elif self.kind == "ellipse":
            d["center"] = [float(v) for v in self.center]
            d["radii"] = [float(v) for v in self.radii]
        else:
            d["segments"] = [[s[0], *map(float, s[1:])] for s in self.segments]
        d["stroke_width"] = float(self.style.stroke_width)
        d["stroke"] = list(self.style.stroke) if self.style.stroke is not None else None
        d["fill"] = list(self.style.fill) if self.style.fill is not None else None
        return d

    @classmethod
    def from_json(cls, d, where: str = "shape") -> Shape:
        if not isinstance(d, dict):
            raise SchemaError(where, "shape must be an object")
        try:
            kind = d["kind"]
            style = Style(float(d.get("stroke_width", 2.0)),
                          _color(d.get("stroke", [0, 0, 0]), f"{where}.stroke"),
                          _color(d.get("fill"), f"{where}.fill"))
            if kind in ("polyline", "polygon"):
                return cls(kind, points=[(float(x), float(y)) for x, y in d["points"]], style=style)
            if kind == "ellipse":
                cx, cy = d["center"]
                rx, ry = d["radii"]
                return cls(kind, center=(float(cx), float(cy)),
                           radii=(float(rx), float(ry)), style=style)
            if kind == "path":
                segs = [(s[0], *map(float, s[1:])) for s in d["segments"]]
                return cls(kind, segments=segs, style=style)
        except SchemaError as exc:
            raise SchemaError(where, str(exc).split(": ", 1)[-1]) from None
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(where, f"invalid shape ({exc})") from None
        raise SchemaError(where, f"unknown shape kind {d.get('kind')!r}")


def _color(v, where: str) -> Color | None:
    if v is None:
        return None
    if (isinstance(v, (list, tuple)) and len(v) == 3
            and all(isinstance(c, (int, float)) and 0 <= c <= 255 for c in v)):
        return (int(v[0]), int(v[1]), int(v[2]))
    raise SchemaError(where, f"color must be [r, g, b] in 0..255 or null, got {v!r}")


# ---------------------------------------------------------------------------
# object tree


@dataclass
class GraphicObject:
    name: str
    shape: Shape | None = None
    offset: tuple[float, float] = (0.0, 0.0)
    children: list[GraphicObject] = field(default_factory=list)

    def copy(self) -> GraphicObject:
        return GraphicObject(self.name, self.shape.copy() if self.shape else None,
                             self.offset, [c.copy() for c in self.children])

    def child(self, name: str) -> GraphicObject | None:
        for c in self.children:
            if c.name == name:
                return c
        return None

    def walk(self, prefix: str = "") -> Iterator[tuple[str, GraphicObject]]:
        """Pre-order ``(path, object)`` pairs; ``prefix`` is this node's path."""
        yield prefix, self
        for c in self.children:
            yield from c.walk(f"{prefix}/{c.name}" if prefix else c.name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "offset": [float(self.offset[0]), float(self.offset[1])],
            "shape": self.shape.to_json() if self.shape else None,
            "children": [c.to_json() for c in self.children],
        }

    @classmethod
    def from_json(cls, d, where: str = "root") -> GraphicObject:
        if not isinstance(d, dict):
            raise SchemaError(where, "object must be a JSON object")
        name = d.get("name")
        if not isinstance(name, str) or not name or "/" in name or any(c.isspace() for c in name):
            raise SchemaError(f"{where}.name", f"invalid object name {name!r}")
        off = d.get("offset", [0, 0])
        try:
            offset = (float(off[0]), float(off[1]))
            if len(off) != 2:
                raise ValueError
        except (TypeError, ValueError, IndexError):
            raise SchemaError(f"{where}.offset", "offset must be [x, y]") from None
        shape = None
        if d.get("shape") is not None:
            shape = Shape.from_json(d["shape"], f"{where}.shape")
        kids = d.get("children", [])
        if not isinstance(kids, list):
            raise SchemaError(f"{where}.children", "children must be a list")
        children = [cls.from_json(c, f"{where}.children[{i}]") for i, c in enumerate(kids)]
        names = [c.name for c in children]
        if len(set(names)) != len(names):
            raise SchemaError(f"{where}.children", "sibling names must be unique")
        return cls(name, shape, offset, children)


@dataclass(frozen=True)
class SceneRelation:
    a: str
    type: str
    b: str

    def to_json(self) -> dict:
        return {"a": self.a, "type": self.type, "b": self.b}


@dataclass
class Scene:
    concept: str
    root: GraphicObject
    relations: list[SceneRelation] = field(default_factory=list)
    canvas: tuple[float, float] = CANVAS

    def copy(self) -> Scene:
        return Scene(self.concept, self.root.copy(), list(self.relations), self.canvas)

    def walk(self) -> Iterator[tuple[str, GraphicObject]]:
        return self.root.walk("")

    def paths(self) -> list[str]:
        return [p for p, _ in self.walk()]

    def find(self, path: str) -> GraphicObject:
        node = self.root
        if path:
            for name in path.split("/"):
                node = node.child(name)
                if node is None:
                    raise UnknownPath(path)
        return node

    def has(self, path: str) -> bool:
        try:
            self.find(path)
        except UnknownPath:
            return False
        return True

    def parent_of(self, path: str) -> tuple[GraphicObject, int]:
        if not path:
            raise UnknownPath(path)
        head, _, name = path.rpartition("/")
        parent = self.find(head)
        for i, c in enumerate(parent.children):
            if c.name == name:
                return parent, i
        raise UnknownPath(path)

    def names(self) -> set[str]:
        return {o.name for _, o in self.walk()}


def join(parent: str, name: str) -> str:
    return f"{parent}/{name}" if parent else name


def scale_object(obj: GraphicObject, k: float) -> None:
    """Uniformly scale a subtree about its own origin (offsets of children included)."""
    for c in obj.children:
        c.offset = (c.offset[0] * k, c.offset[1] * k)
        scale_object(c, k)
    s = obj.shape
    if s is not None:
        s.points = [(x * k, y * k) for x, y in s.points]
        s.center = (s.center[0] * k, s.center[1] * k)
        s.radii = (s.radii[0] * k, s.radii[1] * k)
        s.segments = [seg[:1] + tuple(v * k for v in seg[1:]) for seg in s.segments]
        s.style.stroke_width *= k


def check_integrity(scene: Scene) -> None:
    """Raise :class:`SceneError` if the tree or its relations are inconsistent."""
    if not (scene.canvas[0] > 0 and scene.canvas[1] > 0):
        raise SchemaError("canvas", "canvas must be strictly positive")
    seen: set[int] = set()
    for path, obj in scene.walk():
        if id(obj) in seen:
            raise SceneError(f"object reachable twice at {path!r}")
        seen.add(id(obj))
        names = [c.name for c in obj.children]
        if len(set(names)) != len(names):
            raise SceneError(f"duplicate sibling names under {path!r}")
    for i, r in enumerate(scene.relations):
        if r.a == r.b:
            raise DanglingRelation(i, "(subject equals object)")
        if not scene.has(r.a) or not scene.has(r.b):
            raise DanglingRelation(i, f"({r.a!r} {r.type} {r.b!r})")


# ---------------------------------------------------------------------------
# JSON documents


def save_scene(scene: Scene) -> dict:
    return {
        "concept": scene.concept,
        "canvas": [float(scene.canvas[0]), float(scene.canvas[1])],
        "root": scene.root.to_json(),
        "relations": [r.to_json() for r in scene.relations],
    }


def dumps_scene(scene: Scene) -> str:
    return json.dumps(save_scene(scene), indent=1, sort_keys=False) + "\n"


def load_scene(doc) -> Scene:
    """Build a scene from a parsed document or JSON text."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("$", "scene must be a JSON object")
    concept = doc.get("concept", "")
    if not isinstance(concept, str):
        raise SchemaError("concept", "must be a string")
    canvas = doc.get("canvas", list(CANVAS))
    try:
        canvas = (float(canvas[0]), float(canvas[1]))
    except (TypeError, ValueError, IndexError):
        raise SchemaError("canvas", "canvas must be [w, h]") from None
    if "root" not in doc:
        raise SchemaError("root", "missing")
    root = GraphicObject.from_json(doc["root"])
    rels = doc.get("relations", [])
    if not isinstance(rels, list):
        raise SchemaError("relations", "must be a list")
    relations = []
    for i, r in enumerate(rels):
        if not (isinstance(r, dict) and all(isinstance(r.get(k), str) for k in ("a", "type", "b"))):
            raise SchemaError(f"relations[{i}]", "relation needs string fields a, type, b")
        if r["type"] not in RELATION_TYPES:
            raise SchemaError(f"relations[{i}].type", f"unknown relation type {r['type']!r}")
        relations.append(SceneRelation(r["a"], r["type"], r["b"]))
    scene = Scene(concept or root.name, root, relations, canvas)
    check_integrity(scene)
    return scene


def read_scene(path) -> Scene:
    from pathlib import Path

    return load_scene(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# geometry queries


def absolute_position(scene: Scene, path: str) -> tuple[float, float]:
    x, y = scene.root.offset
    node = scene.root
    if path:
        for name in path.split("/"):
            node = node.child(name)
            if node is None:
                raise UnknownPath(path)
            x += node.offset[0]
            y += node.offset[1]
    return (x, y)


def subtree_shapes(obj: GraphicObject, dx: float = 0.0, dy: float = 0.0):
    """``(shape, x, y)`` for every shape under ``obj``; ``(dx, dy)`` is obj's origin."""
    out = []
    if obj.shape is not None:
        out.append((obj.shape, dx, dy))
    for c in obj.children:
        out.extend(subtree_shapes(c, dx + c.offset[0], dy + c.offset[1]))
    return out


def _local_bbox(shapes) -> BBox:
    if not shapes:
        raise EmptyGeometry("no geometry in subtree")
    box = None
    for shape, x, y in shapes:
        b = shape.bbox().shifted(x, y)
        box = b if box is None else box.union(b)
    return box


def bounding_box(scene: Scene, path: str) -> BBox:
    obj = scene.find(path)
    ax, ay = absolute_position(scene, path)
    return _local_bbox(subtree_shapes(obj)).shifted(ax, ay)


def _seg_dist(px, py, pts) -> np.ndarray:
    """Distance from each point to an open polyline."""
    a = pts[:-1]
    b = pts[1:]
    d = b - a
    L2 = (d ** 2).sum(axis=1)
    L2[L2 == 0] = 1e-12
    P = np.column_stack([px, py])[:, None, :]
    t = np.clip(((P - a) * d).sum(axis=2) / L2, 0.0, 1.0)
    proj = a + t[..., None] * d
    return np.sqrt(((P - proj) ** 2).sum(axis=2)).min(axis=1)


def region_mask(shapes, px, py) -> np.ndarray:
    """Points inside the filled region of any shape, or within an open stroke band."""
    px = np.ascontiguousarray(px, float)
    py = np.ascontiguousarray(py, float)
    inside = np.zeros(len(px), bool)
    for k, (shape, x, y) in enumerate(shapes):
        if shape.kind == "ellipse":
            cx, cy = shape.center[0] + x, shape.center[1] + y
            rx, ry = shape.radii
            inside |= ((px - cx) / rx) ** 2 + ((py - cy) / ry) ** 2 <= 1.0
            continue
        closed = []
        for pts, is_closed in shape.rings():
            pts = pts + (x, y)
            if is_closed:
                closed.append(pts)
            else:
                band = max(shape.style.stroke_width / 2.0, 0.5)
                inside |= _seg_dist(px, py, pts) <= band
        if closed:
            xs = np.concatenate([c[:, 0] for c in closed])
            ys = np.concatenate([c[:, 1] for c in closed])
            starts = np.cumsum([0] + [len(c) for c in closed]).astype(np.int64)
            inside |= kernels.points_in_rings(px, py, xs, ys, starts).astype(bool)
    return inside


def contains_points(scene: Scene, path: str, points) -> np.ndarray:
    obj = scene.find(path)
    ax, ay = absolute_position(scene, path)
    pts = np.asarray(points, float).reshape(-1, 2)
    return region_mask(subtree_shapes(obj, ax, ay), pts[:, 0], pts[:, 1])


def _outline_points(rings: list[np.ndarray], n: int) -> np.ndarray:
    segs = []
    for pts, closed in rings:
        if closed:
            pts = np.vstack([pts, pts[:1]])
        segs.append(np.column_stack([pts[:-1], pts[1:]]))
    segs = np.vstack(segs)
    lens = np.hypot(segs[:, 2] - segs[:, 0], segs[:, 3] - segs[:, 1])
    total = lens.sum()
    if total <= 0:
        return np.repeat(segs[:1, :2], n, axis=0)
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    s = (np.arange(n) + 0.5) * total / n
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(segs) - 1)
    t = np.where(lens[idx] > 0, (s - cum[idx]) / np.where(lens[idx] > 0, lens[idx], 1), 0)
    a, b = segs[idx, :2], segs[idx, 2:]
    return a + t[:, None] * (b - a)


def _sample_local(shapes, n: int, seed: int) -> np.ndarray:
    """Points in the subtree's own frame: half on outlines, half stratified inside."""
    if not shapes:
        raise EmptyGeometry("no geometry in subtree")
    rings = [(pts + (x, y), closed) for shape, x, y in shapes for pts, closed in shape.rings()]
    n_out = n // 2
    n_in = n - n_out
    parts = [_outline_points(rings, n_out)] if n_out else []
    box = _local_bbox(shapes)
    rng = np.random.default_rng(seed)
    k = max(2, math.ceil(math.sqrt(4 * n_in)))
    found = np.empty((0, 2))
    for _ in range(6):
        w = max(box.width, 1e-9) / k
        h = max(box.height, 1e-9) / k
        gx, gy = np.meshgrid(np.arange(k), np.arange(k))
        px = box.x0 + (gx.ravel() + rng.random(k * k)) * w
        py = box.y0 + (gy.ravel() + rng.random(k * k)) * h
        keep = region_mask(shapes, px, py)
        found = np.column_stack([px[keep], py[keep]])
        if len(found) >= n_in:
            break
        k *= 2
    if len(found) >= n_in:
        idx = np.linspace(0, len(found) - 1, n_in).round().astype(int)
        parts.append(found[idx])
    else:
        parts.append(found)
        parts.append(_outline_points(rings, n_in - len(found)))
    return np.vstack(parts)[:n]


def sample_points(scene: Scene, path: str, n: int, seed: int = 0) -> np.ndarray:
    """``n`` deterministic points on and inside the part's geometry (incl. descendants)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    obj = scene.find(path)
    ax, ay = absolute_position(scene, path)
    return _sample_local(subtree_shapes(obj), n, seed) + (ax, ay)
