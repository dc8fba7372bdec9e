"""Import / export of a restricted SVG subset.

Supported on import: nested ``<g id=...>`` groups (each one a graphic object,
``transform`` limited to ``translate``), and the shape elements ``line``,
``polyline``, ``polygon``, ``rect``, ``circle``, ``ellipse`` and ``path`` with
``M/L/C/Z`` commands (absolute or relative). A group's first anonymous shape
becomes the group's own shape; shapes carrying an ``id`` become child objects.
Relations are not part of SVG; pass them separately (see
:func:`read_svg_scene` for the ``.relations.json`` sidecar).
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from pathlib import Path

from .scene import (CANVAS, GraphicObject, Scene, SceneError, SceneRelation, Shape,
                    Style, check_integrity, scale_object)

SVG_NS = "http://www.w3.org/2000/svg"
SHAPE_TAGS = {"line", "polyline", "polygon", "rect", "circle", "ellipse", "path"}
IGNORED_TAGS = {"title", "desc", "metadata"}

_NAMED = {
    "black": (0, 0, 0), "white": (255, 255, 255), "red": (255, 0, 0),
    "green": (0, 128, 0), "blue": (0, 0, 255), "yellow": (255, 255, 0),
    "gray": (128, 128, 128), "grey": (128, 128, 128), "pink": (255, 192, 203),
    "orange": (255, 165, 0), "brown": (165, 42, 42),
}
_NUM = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


class SvgError(SceneError):
    pass


class UnsupportedElement(SvgError):
    def __init__(self, tag: str, detail: str = ""):
        super().__init__(f"unsupported SVG element <{tag}>{': ' + detail if detail else ''}")
        self.tag = tag


class MissingId(SvgError):
    def __init__(self, tag: str):
        super().__init__(f"<{tag}> needs an id attribute")
        self.tag = tag


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _nums(text: str | None) -> list[float]:
    return [float(v) for v in _NUM.findall(text or "")]


def _color(v: str | None, default):
    if v is None:
        return default
    v = v.strip().lower()
    if v in ("none", "transparent"):
        return None
    if v.startswith("#"):
        h = v[1:]
        if len(h) == 3:
            h = "".join(c * 2 for c in h)
        if len(h) == 6:
            return (int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16))
    m = re.fullmatch(r"rgb\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)", v)
    if m:
        return tuple(int(x) for x in m.groups())
    if v in _NAMED:
        return _NAMED[v]
    raise SvgError(f"unsupported color {v!r}")


def _attrs(el) -> dict:
    a = dict(el.attrib)
    for decl in a.pop("style", "").split(";"):
        if ":" in decl:
            k, v = decl.split(":", 1)
            a.setdefault(k.strip(), v.strip())
    return a


def _translate(el) -> tuple[float, float]:
    t = el.get("transform")
    if not t or not t.strip():
        return (0.0, 0.0)
    m = re.fullmatch(r"\s*translate\(([^)]*)\)\s*", t)
    if not m:
        raise UnsupportedElement(_local(el.tag), f"transform {t!r} (only translate)")
    v = _nums(m.group(1))
    if len(v) == 1:
        v.append(0.0)
    if len(v) != 2:
        raise SvgError(f"bad translate {t!r}")
    return (v[0], v[1])


def _parse_path(d: str) -> list[tuple]:
    toks = re.findall(r"[A-Za-z]|" + _NUM.pattern, d)
    segs: list[tuple] = []
    cur = (0.0, 0.0)
    start = (0.0, 0.0)
    cmd = None
    i = 0
    while i < len(toks):
        if toks[i].isalpha():
            cmd = toks[i]
            i += 1
            if cmd in "Zz":
                segs.append(("Z",))
                cur = start
                continue
        if cmd is None or cmd not in "MmLlCc":
            raise UnsupportedElement("path", f"command {cmd!r}")
        n = 6 if cmd in "Cc" else 2
        vals = [float(v) for v in toks[i:i + n]]
        if len(vals) != n or any(t.isalpha() for t in toks[i:i + n]):
            raise SvgError(f"truncated path data near token {i}")
        i += n
        rel = cmd.islower()
        if rel:
            vals = [v + (cur[0] if k % 2 == 0 else cur[1]) for k, v in enumerate(vals)]
        if cmd in "Mm":
            segs.append(("M", vals[0], vals[1]))
            start = (vals[0], vals[1])
            cmd = "l" if rel else "L"  # implicit lineto after moveto
        elif cmd in "Ll":
            segs.append(("L", vals[0], vals[1]))
        else:
            segs.append(("C", *vals))
        cur = (vals[-2], vals[-1])
    return segs


def _shape(el, dx: float, dy: float) -> Shape:
    tag = _local(el.tag)
    a = _attrs(el)
    tx, ty = _translate(el)
    dx, dy = dx + tx, dy + ty
    style = Style(float(a.get("stroke-width", 1.0)),
                  _color(a.get("stroke"), None),
                  _color(a.get("fill"), (0, 0, 0)))

    def f(k, default=0.0):
        return float(a.get(k, default))

    if tag == "line":
        pts = [(f("x1") + dx, f("y1") + dy), (f("x2") + dx, f("y2") + dy)]
        return Shape("polyline", points=pts, style=style)
    if tag in ("polyline", "polygon"):
        v = _nums(a.get("points"))
        pts = [(v[k] + dx, v[k + 1] + dy) for k in range(0, len(v) - 1, 2)]
        return Shape(tag, points=pts, style=style)
    if tag == "rect":
        x, y, w, h = f("x") + dx, f("y") + dy, f("width"), f("height")
        return Shape("polygon", points=[(x, y), (x + w, y), (x + w, y + h), (x, y + h)],
                     style=style)
    if tag == "circle":
        r = f("r")
        return Shape("ellipse", center=(f("cx") + dx, f("cy") + dy), radii=(r, r), style=style)
    if tag == "ellipse":
        return Shape("ellipse", center=(f("cx") + dx, f("cy") + dy),
                     radii=(f("rx"), f("ry")), style=style)
    segs = _parse_path(a.get("d", ""))
    out = []
    for s in segs:
        if s[0] == "Z":
            out.append(s)
        else:
            out.append((s[0], *[v + (dx if k % 2 == 0 else dy) for k, v in enumerate(s[1:])]))
    return Shape("path", segments=out, style=style)


def _group(el, name: str) -> GraphicObject:
    obj = GraphicObject(name, offset=_translate(el))
    for child in el:
        tag = _local(child.tag)
        if tag in IGNORED_TAGS:
            continue
        if tag == "g":
            cid = child.get("id")
            if not cid:
                raise MissingId("g")
            obj.children.append(_group(child, cid))
        elif tag in SHAPE_TAGS:
            cid = child.get("id")
            if cid:
                obj.children.append(GraphicObject(cid, _shape(child, 0.0, 0.0)))
            elif obj.shape is None:
                obj.shape = _shape(child, 0.0, 0.0)
            else:
                raise MissingId(tag)
        else:
            raise UnsupportedElement(tag)
    return obj


def import_svg(text: str, relations=None, concept: str | None = None,
               normalize: bool = True) -> Scene:
    """Parse restricted SVG into a scene.

    With ``normalize`` the drawing is scaled uniformly so that its longer side
    spans the canonical 1000 units and the viewBox origin moves to (0, 0).
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise SvgError(f"invalid XML: {exc}") from None
    if _local(root.tag) != "svg":
        raise SvgError("document root must be <svg>")
    vb = _nums(root.get("viewBox"))
    if len(vb) == 4:
        minx, miny, w, h = vb
    else:
        minx = miny = 0.0
        w = _nums(root.get("width"))[0] if _nums(root.get("width")) else CANVAS[0]
        h = _nums(root.get("height"))[0] if _nums(root.get("height")) else CANVAS[1]
    if w <= 0 or h <= 0:
        raise SvgError("canvas must be strictly positive")

    content = [c for c in root if _local(c.tag) not in IGNORED_TAGS]
    if len(content) == 1 and _local(content[0].tag) == "g":
        top = content[0]
        if not top.get("id"):
            raise MissingId("g")
        obj = _group(top, top.get("id"))
    else:
        obj = _group(root, root.get("id") or concept or "root")
        obj.offset = (0.0, 0.0)

    k = 1.0
    if normalize:
        k = max(CANVAS) / max(w, h)
    obj.offset = (obj.offset[0] - minx, obj.offset[1] - miny)
    if k != 1.0:
        obj.offset = (obj.offset[0] * k, obj.offset[1] * k)
        scale_object(obj, k)
    rels = [r if isinstance(r, SceneRelation) else SceneRelation(r["a"], r["type"], r["b"])
            for r in (relations or [])]
    scene = Scene(concept or obj.name, obj, rels, (w * k, h * k))
    check_integrity(scene)
    return scene


def _fmt(v: float) -> str:
    v = float(v)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _hex(c) -> str:
    return "none" if c is None else "#%02x%02x%02x" % tuple(c)


def _shape_element(shape: Shape) -> ET.Element:
    st = shape.style
    attrs = {}
    if shape.kind in ("polyline", "polygon"):
        el = ET.Element(shape.kind)
        attrs["points"] = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in shape.points)
    elif shape.kind == "ellipse":
        el = ET.Element("ellipse")
        attrs.update(cx=_fmt(shape.center[0]), cy=_fmt(shape.center[1]),
                     rx=_fmt(shape.radii[0]), ry=_fmt(shape.radii[1]))
    else:
        el = ET.Element("path")
        parts = []
        for s in shape.segments:
            parts.append(s[0] + (" " + " ".join(_fmt(v) for v in s[1:]) if len(s) > 1 else ""))
        attrs["d"] = " ".join(parts)
    attrs["fill"] = _hex(st.fill)
    attrs["stroke"] = _hex(st.stroke)
    attrs["stroke-width"] = _fmt(st.stroke_width)
    for k, v in attrs.items():
        el.set(k, v)
    return el


def _object_element(obj: GraphicObject) -> ET.Element:
    g = ET.Element("g")
    g.set("id", obj.name)
    if obj.offset != (0.0, 0.0):
        g.set("transform", f"translate({_fmt(obj.offset[0])},{_fmt(obj.offset[1])})")
    if obj.shape is not None:
        g.append(_shape_element(obj.shape))
    for c in obj.children:
        g.append(_object_element(c))
    return g


def export_svg(scene: Scene) -> str:
    """Serialise deterministically: one nested ``<g id=name>`` per object."""
    w, h = scene.canvas
    svg = ET.Element("svg")
    svg.set("xmlns", SVG_NS)
    svg.set("width", _fmt(w))
    svg.set("height", _fmt(h))
    svg.set("viewBox", f"0 0 {_fmt(w)} {_fmt(h)}")
    svg.append(_object_element(scene.root))
    ET.indent(svg, space=" ")
    return ET.tostring(svg, encoding="unicode") + "\n"


def read_svg_scene(path, concept: str | None = None) -> Scene:
    """Load ``name.svg`` plus its ``name.relations.json`` sidecar if present."""
    p = Path(path)
    side = p.with_name(p.stem + ".relations.json")
    rels = []
    if side.exists():
        doc = json.loads(side.read_text(encoding="utf-8"))
        rels = doc["relations"] if isinstance(doc, dict) else doc
    return import_svg(p.read_text(encoding="utf-8"), rels, concept=concept)


def write_relations(scene: Scene, path) -> None:
    Path(path).write_text(
        json.dumps({"relations": [r.to_json() for r in scene.relations]}, indent=1) + "\n",
        encoding="utf-8")
