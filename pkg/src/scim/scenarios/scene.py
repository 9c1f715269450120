"""Scene files: one colored shape per line, laid out in a 2-D scene context."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import SceneParseError
from ..memory import BranchState, create_instance, situate
from ..places import Box, Disc

SHAPES = ("square", "rectangle", "circle")
COLORS = ("red", "blue", "green", "black", "white")
SCENE_ID = "scene"


@dataclass(frozen=True)
class SceneObject:
    id: str
    shape: str
    width: float
    height: float
    color: str
    x: float
    y: float

    @property
    def place(self):
        if self.shape == "circle":
            return Disc(self.x, self.y, self.width / 2)
        return Box(self.x - self.width / 2, self.y - self.height / 2,
                   self.x + self.width / 2, self.y + self.height / 2)

    @property
    def area(self):
        if self.shape == "circle":
            return math.pi * (self.width / 2) ** 2
        return self.width * self.height


def parse_scene(text: str) -> list:
    """Parse ``id shape width height color x y`` lines; ``#`` starts a comment."""
    objects, seen = [], set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 7:
            raise SceneParseError(f"expected 7 fields, found {len(parts)}", lineno)
        oid, shape, w, h, color, x, y = parts
        if oid in seen:
            raise SceneParseError(f"duplicate object id {oid!r}", lineno)
        if shape not in SHAPES:
            raise SceneParseError(f"unknown shape {shape!r}", lineno)
        if color not in COLORS:
            raise SceneParseError(f"unknown color {color!r}", lineno)
        try:
            w, h, x, y = float(w), float(h), float(x), float(y)
        except ValueError:
            raise SceneParseError("width, height, x and y must be numbers", lineno) from None
        if not (w > 0 and h > 0) or not all(map(math.isfinite, (w, h, x, y))):
            raise SceneParseError("width and height must be positive and finite", lineno)
        if shape == "circle" and w != h:
            raise SceneParseError("a circle's width and height are its diameter and must match", lineno)
        seen.add(oid)
        objects.append(SceneObject(oid, shape, w, h, color, x, y))
    return objects


def load_scene(text: str, program, b: BranchState = None) -> BranchState:
    """Populate a SceneContext2D instance with one situated SceneObject per line."""
    objects = parse_scene(text)
    b = b or BranchState(program.hierarchy)
    create_instance(b, "SceneContext2D", instance_id=SCENE_ID)
    for o in objects:
        create_instance(b, "SceneObject", {"shape": o.shape, "width": o.width,
                                           "height": o.height, "color": o.color},
                        instance_id=o.id)
        situate(b, o.id, SCENE_ID, o.place)
    return b


def load_scene_file(path, program, b=None) -> BranchState:
    with open(path, encoding="utf-8") as f:
        return load_scene(f.read(), program, b)


def scene_objects(b: BranchState, ctx=SCENE_ID) -> list:
    """Present scene objects rebuilt from working memory, sorted by id."""
    out = []
    for s in sorted(b.present_in(ctx), key=lambda s: s.instance):
        inst = b.instance(s.instance)
        cx, cy = s.place.center
        f = inst.fillers
        out.append(SceneObject(inst.id, f["shape"], f["width"], f["height"], f["color"], cx, cy))
    return out
