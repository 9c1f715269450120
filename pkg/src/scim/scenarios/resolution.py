"""Reference resolution by successive sorting steps over candidate wrappers.

Categorical predicates drop candidates; gradable ones rank them by a measure
taken relative to the current survivors. The margin between the two best
measures of the last gradable step sets how confidently rank 1 is preferred.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from ..contexts import _area_overlap
from ..errors import EmptyCandidateSet, UnknownPredicate
from ..memory import BranchState, Ref, create_instance, mutate_role, situate
from ..places import Box, Point
from ..predicates import approx_square
from .scene import SCENE_ID, SceneObject, scene_objects

INFLATE = 1.5  # neighbourhood box around a candidate, as a factor of its size


@dataclass(frozen=True)
class Ranked:
    object: str
    wrapper: str
    measure: float
    trust: float


def _is_square(o: SceneObject):
    return o.shape != "circle" and approx_square(o.width, o.height)


CATEGORICAL = {
    "square": _is_square,
    "rectangle": lambda o: o.shape != "circle",
    "circle": lambda o: o.shape == "circle",
    "red": lambda o: o.color == "red",
    "blue": lambda o: o.color == "blue",
    "green": lambda o: o.color == "green",
    "black": lambda o: o.color == "black",
    "white": lambda o: o.color == "white",
}


def scene_box(objects) -> Box:
    xs1, ys1, xs2, ys2 = zip(*(o.place.bounds() for o in objects))
    return Box(min(xs1), min(ys1), max(xs2), max(ys2))


def region_of(o: SceneObject, box: Box) -> str:
    """Which horizontal third of the scene box holds the object's center."""
    width = box.x2 - box.x1
    if width <= 0:
        return "center"
    t = (o.x - box.x1) / width
    if t < 1 / 3:
        return "left"
    if t < 2 / 3:
        return "center"
    return "right"


def neighbours(o: SceneObject, objects) -> list:
    half_w, half_h = o.width * INFLATE / 2, o.height * INFLATE / 2
    zone = Box(o.x - half_w, o.y - half_h, o.x + half_w, o.y + half_h)
    return [n for n in objects if n.id != o.id and _area_overlap(zone, n.place)]


def small_measures(survivors, objects, neighborhood=True) -> dict:
    """Area relative to the median area of the comparison set."""
    out = {}
    for o in survivors:
        group = {s.id: s for s in survivors}
        if neighborhood:
            group.update((n.id, n) for n in neighbours(o, objects))
        out[o.id] = o.area / statistics.median(g.area for g in group.values())
    return out


def left_measures(survivors, objects, neighborhood=True) -> dict:
    box = scene_box(objects)
    width = (box.x2 - box.x1) or 1.0
    return {o.id: (o.x - box.x1) / width for o in survivors}


GRADABLE = {
    "small": small_measures,
    "on-the-left": left_measures,
}
# gradable predicates that also drop candidates above this relative measure
THRESHOLDS = {"small": 1.0}


def hesitation(measures: list) -> float:
    """gap / (gap + median) between the two best measures, in [0, 1)."""
    if len(measures) < 2:
        return 1.0
    ordered = sorted(measures)
    gap = ordered[1] - ordered[0]
    eps = statistics.median(ordered)
    if gap + eps <= 0:
        return 0.0
    return gap / (gap + eps)


def candidate_trusts(n: int, h: float) -> list:
    if n == 1:
        return [1.0]
    return [0.5 + 0.5 * h] + [0.5] * (n - 1)


def build_resolution_context(b: BranchState, object_ids=None, scene=SCENE_ID, rc_id="rc") -> str:
    """Wrap each present scene object in a Candidate situated in a new ResolutionContext."""
    ids = object_ids if object_ids is not None else [o.id for o in scene_objects(b, scene)]
    create_instance(b, "ResolutionContext", instance_id=rc_id)
    for i, oid in enumerate(sorted(ids)):
        wid = f"{rc_id}-{oid}"
        create_instance(b, "Candidate", {"object": Ref(oid), "survived": True}, parents=[oid],
                        instance_id=wid)
        situate(b, wid, rc_id, Point(float(i)))
    return rc_id


def resolve_referents(b: BranchState, rc: str, predicates, neighborhood=True,
                      scene=SCENE_ID) -> list:
    """Run the sorting steps in order; returns surviving candidates best first."""
    objects = {o.id: o for o in scene_objects(b, scene)}
    wrappers = {}
    for s in b.present_in(rc):
        w = b.instance(s.instance)
        if w.fillers.get("survived", True):
            wrappers[w.fillers["object"].id] = w.id
    order = sorted(wrappers)
    measures = {}
    for pred in predicates:
        survivors = [objects[i] for i in order]
        if pred in CATEGORICAL:
            keep = [o.id for o in survivors if CATEGORICAL[pred](o)]
        elif pred in GRADABLE:
            m = GRADABLE[pred](survivors, list(objects.values()), neighborhood)
            limit = THRESHOLDS.get(pred)
            keep = sorted((i for i in m if limit is None or m[i] <= limit),
                          key=lambda i: (m[i], i))
            measures = {i: m[i] for i in keep}
        else:
            raise UnknownPredicate(f"no sorting step for predicate {pred!r}")
        for i in order:
            if i not in keep:
                mutate_role(b, wrappers[i], "survived", False)
        order = keep
        if not order:
            raise EmptyCandidateSet(f"no candidate survives {pred!r}")
    trusts = candidate_trusts(len(order), hesitation([measures[i] for i in order]) if measures else 0.0)
    if not measures and len(order) > 1:
        trusts = [0.5] * len(order)
    out = []
    for rank, (oid, trust) in enumerate(zip(order, trusts), 1):
        w = wrappers[oid]
        mutate_role(b, w, "rank", rank)
        mutate_role(b, w, "trust", trust)
        if oid in measures:
            mutate_role(b, w, "measure", float(measures[oid]))
        out.append(Ranked(oid, w, measures.get(oid, 0.0), trust))
    return out
