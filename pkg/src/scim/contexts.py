"""Built-in context topologies: linear (form pole), 2-D scene, and unstructured set.

Their declarations live in :data:`PRELUDE`; the place arithmetic lives here.
"""

from __future__ import annotations

from .errors import EmptyResult, PlaceKindMismatch, UnknownOperation, UnknownRelation
from .places import Box, Point, Segment, as_segments, normalize_segments

PRELUDE = """\
// Built-in contexts. Place types are opaque; their arithmetic is native code.
context LinearContext
places
  point
  segment
  multi-segment
relations
  before(point, point) |-> Boolean
  before(segment, segment) |-> Boolean
  before(point, segment) |-> Boolean
  before(segment, point) |-> Boolean
  meets(point, point) |-> Boolean
  meets(segment, segment) |-> Boolean
  meets(point, segment) |-> Boolean
  meets(segment, point) |-> Boolean
  overlaps(point, point) |-> Boolean
  overlaps(segment, segment) |-> Boolean
  overlaps(point, segment) |-> Boolean
  overlaps(segment, point) |-> Boolean
  overlaps(multi-segment, segment) |-> Boolean
  overlaps(segment, multi-segment) |-> Boolean
operations
  union(segment, segment) |-> multi-segment
  union(multi-segment, segment) |-> multi-segment
  union(segment, multi-segment) |-> multi-segment
  intersection(segment, segment) |-> segment
  span(point, point) |-> segment
  span(point, segment) |-> segment
  span(segment, point) |-> segment
  span(segment, segment) |-> segment

context SceneContext2D
places
  point
  box
  disc
  line
relations
  left-of(box, box) |-> Boolean
  left-of(box, disc) |-> Boolean
  left-of(disc, box) |-> Boolean
  left-of(disc, disc) |-> Boolean
  right-of(box, box) |-> Boolean
  right-of(box, disc) |-> Boolean
  right-of(disc, box) |-> Boolean
  right-of(disc, disc) |-> Boolean
  above(box, box) |-> Boolean
  above(box, disc) |-> Boolean
  above(disc, box) |-> Boolean
  above(disc, disc) |-> Boolean
  below(box, box) |-> Boolean
  below(box, disc) |-> Boolean
  below(disc, box) |-> Boolean
  below(disc, disc) |-> Boolean
  contains(box, box) |-> Boolean
  contains(box, disc) |-> Boolean
  contains(box, point) |-> Boolean
  overlaps(box, box) |-> Boolean
  overlaps(box, disc) |-> Boolean
  overlaps(disc, box) |-> Boolean
  overlaps(disc, disc) |-> Boolean
  on-line(point, line) |-> Boolean
  same-place(line, line) |-> Boolean
  same-place(point, point) |-> Boolean
operations
  bounding-box(box, box) |-> box
  bounding-box(box, disc) |-> box
  bounding-box(disc, box) |-> box
  bounding-box(disc, disc) |-> box
  center(box) |-> point
  center(disc) |-> point

context SetContext
places
  point
"""

BUILTIN_CONTEXTS = ("LinearContext", "SceneContext2D", "SetContext")


def _lo(p):
    return as_segments(p)[0].start


def _hi(p):
    return as_segments(p)[-1].end


def _intersect(a, b):
    out = []
    for s in as_segments(a):
        for t in as_segments(b):
            lo, hi = max(s.start, t.start), min(s.end, t.end)
            if lo <= hi:
                out.append(Segment(lo, hi))
    return out


def _interval_overlap(a1, a2, b1, b2):
    return min(a2, b2) - max(a1, b1)


def _area_overlap(a, b):
    ax1, ay1, ax2, ay2 = a.bounds()
    bx1, by1, bx2, by2 = b.bounds()
    return _interval_overlap(ax1, ax2, bx1, bx2) > 0 and _interval_overlap(ay1, ay2, by1, by2) > 0


def _contains(a, b):
    ax1, ay1, ax2, ay2 = a.bounds()
    bx1, by1, bx2, by2 = b.bounds()
    return ax1 <= bx1 and ay1 <= by1 and bx2 <= ax2 and by2 <= ay2


def _on_line(p, line):
    cross = (line.x2 - line.x1) * ((p.y or 0.0) - line.y1) - (line.y2 - line.y1) * (p.x - line.x1)
    return abs(cross) <= 1e-9


def _intersection(a, b):
    parts = _intersect(a, b)
    if not parts:
        raise EmptyResult(f"intersection of disjoint places {a} and {b}")
    return normalize_segments(parts)


def _bounding_box(a, b):
    ax1, ay1, ax2, ay2 = a.bounds()
    bx1, by1, bx2, by2 = b.bounds()
    return Box(min(ax1, bx1), min(ay1, by1), max(ax2, bx2), max(ay2, by2))


def _center(a):
    cx, cy = a.center
    return Point(cx, cy)


IMPLEMENTATIONS = {
    "LinearContext": {
        "relations": {
            "before": lambda a, b: _hi(a) < _lo(b),
            # token-index adjacency: b starts at the token right after a ends
            "meets": lambda a, b: _hi(a) + 1 == _lo(b),
            "overlaps": lambda a, b: bool(_intersect(a, b)),
        },
        "operations": {
            "union": lambda a, b: normalize_segments(as_segments(a) + as_segments(b)),
            "intersection": _intersection,
            "span": lambda a, b: Segment(min(_lo(a), _lo(b)), max(_hi(a), _hi(b))),
        },
    },
    "SceneContext2D": {
        "relations": {
            "left-of": lambda a, b: a.center[0] < b.center[0],
            "right-of": lambda a, b: a.center[0] > b.center[0],
            "above": lambda a, b: a.center[1] > b.center[1],
            "below": lambda a, b: a.center[1] < b.center[1],
            "contains": _contains,
            "overlaps": _area_overlap,
            "on-line": _on_line,
            "same-place": lambda a, b: a == b,
        },
        "operations": {
            "bounding-box": _bounding_box,
            "center": _center,
        },
    },
    "SetContext": {"relations": {}, "operations": {}},
}


def builtin_base(h, ctx_type: str) -> str | None:
    """The built-in context a (possibly user-declared) context type derives from."""
    ancestors = h.ancestors(ctx_type)
    for name in BUILTIN_CONTEXTS:
        if name in ancestors:
            return name
    return None


def _check_signature(sigs, places, what, name):
    kinds = tuple(p.kind for p in places)
    for sig in sigs:
        if sig.params == kinds:
            return sig
    raise PlaceKindMismatch(f"{what} {name} does not accept ({', '.join(kinds)}); declared: "
                            + "; ".join(f"({', '.join(s.params)})" for s in sigs))


def eval_relation(h, ctx_type: str, name: str, places):
    sigs = h.relation_signatures(ctx_type, name)
    if not sigs:
        raise UnknownRelation(f"{ctx_type} declares no relation {name!r}")
    _check_signature(sigs, places, "relation", name)
    base = builtin_base(h, ctx_type)
    fn = IMPLEMENTATIONS.get(base, {}).get("relations", {}).get(name)
    if fn is None:
        raise UnknownRelation(f"relation {name!r} has no implementation for {ctx_type}")
    return fn(*places)


def eval_operation(h, ctx_type: str, name: str, places):
    sigs = h.operation_signatures(ctx_type, name)
    if not sigs:
        raise UnknownOperation(f"{ctx_type} declares no operation {name!r}")
    _check_signature(sigs, places, "operation", name)
    base = builtin_base(h, ctx_type)
    fn = IMPLEMENTATIONS.get(base, {}).get("operations", {}).get(name)
    if fn is None:
        raise UnknownOperation(f"operation {name!r} has no implementation for {ctx_type}")
    return fn(*places)


def is_linear(h, ctx_type: str) -> bool:
    return builtin_base(h, ctx_type) == "LinearContext"


def is_set(h, ctx_type: str) -> bool:
    return builtin_base(h, ctx_type) == "SetContext"

