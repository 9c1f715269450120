"""Place values: positions of situated instances inside a context."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class Place:
    kind = "place"

    def to_json(self):
        raise NotImplementedError

    def bounds(self):
        """(xmin, ymin, xmax, ymax) of the place; 1-D places use y = 0."""
        raise NotImplementedError

    @property
    def center(self):
        x1, y1, x2, y2 = self.bounds()
        return ((x1 + x2) / 2, (y1 + y2) / 2)


@dataclass(frozen=True)
class Point(Place):
    x: float
    y: Optional[float] = None
    kind = "point"

    def bounds(self):
        y = self.y or 0.0
        return (self.x, y, self.x, y)

    def to_json(self):
        return {"kind": "point", "x": self.x} if self.y is None else \
            {"kind": "point", "x": self.x, "y": self.y}


@dataclass(frozen=True)
class Segment(Place):
    start: float
    end: float
    kind = "segment"

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"segment start {self.start} > end {self.end}")

    def bounds(self):
        return (self.start, 0.0, self.end, 0.0)

    def to_json(self):
        return {"kind": "segment", "start": self.start, "end": self.end}


@dataclass(frozen=True)
class MultiSegment(Place):
    segments: tuple
    kind = "multi-segment"

    def __post_init__(self):
        prev = None
        for s in self.segments:
            if prev is not None and s.start <= prev.end:
                raise ValueError("multi-segment parts must be ordered and non-overlapping")
            prev = s
        if not self.segments:
            raise ValueError("empty multi-segment")

    def bounds(self):
        return (self.segments[0].start, 0.0, self.segments[-1].end, 0.0)

    def to_json(self):
        return {"kind": "multi-segment", "segments": [[s.start, s.end] for s in self.segments]}


@dataclass(frozen=True)
class Line(Place):
    x1: float
    y1: float
    x2: float
    y2: float
    kind = "line"

    def __post_init__(self):
        if (self.x1, self.y1) == (self.x2, self.y2):
            raise ValueError("line anchors must be distinct")

    def bounds(self):
        return (min(self.x1, self.x2), min(self.y1, self.y2),
                max(self.x1, self.x2), max(self.y1, self.y2))

    def to_json(self):
        return {"kind": "line", "anchors": [[self.x1, self.y1], [self.x2, self.y2]]}


@dataclass(frozen=True)
class Box(Place):
    x1: float
    y1: float
    x2: float
    y2: float
    kind = "box"

    def __post_init__(self):
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise ValueError(f"malformed box {self}")

    def bounds(self):
        return (self.x1, self.y1, self.x2, self.y2)

    def to_json(self):
        return {"kind": "box", "x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2}


@dataclass(frozen=True)
class Disc(Place):
    cx: float
    cy: float
    r: float
    kind = "disc"

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("disc radius must be positive")

    def bounds(self):
        return (self.cx - self.r, self.cy - self.r, self.cx + self.r, self.cy + self.r)

    def to_json(self):
        return {"kind": "disc", "cx": self.cx, "cy": self.cy, "r": self.r}


def place_from_json(d) -> Place:
    kind = d["kind"]
    if kind == "point":
        return Point(d["x"], d.get("y"))
    if kind == "segment":
        return Segment(d["start"], d["end"])
    if kind == "multi-segment":
        return MultiSegment(tuple(Segment(a, b) for a, b in d["segments"]))
    if kind == "line":
        (x1, y1), (x2, y2) = d["anchors"]
        return Line(x1, y1, x2, y2)
    if kind == "box":
        return Box(d["x1"], d["y1"], d["x2"], d["y2"])
    if kind == "disc":
        return Disc(d["cx"], d["cy"], d["r"])
    raise ValueError(f"unknown place kind {kind!r}")


def normalize_segments(segments) -> Place:
    """Merge overlapping/touching closed intervals; one part collapses to a Segment."""
    parts = sorted((s.start, s.end) for s in segments)
    merged = []
    for a, b in parts:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if len(merged) == 1:
        return Segment(*merged[0])
    return MultiSegment(tuple(Segment(a, b) for a, b in merged))


def as_segments(p: Place) -> list:
    if isinstance(p, Point):
        return [Segment(p.x, p.x)]
    if isinstance(p, Segment):
        return [p]
    if isinstance(p, MultiSegment):
        return list(p.segments)
    raise TypeError(f"{p.kind} is not a linear place")
