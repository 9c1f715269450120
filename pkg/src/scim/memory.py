"""Working memory: instances, situations and time-stamped, branchable state."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import (AlreadySituatedHere, ImmutableRole, NotSituated,
                     PlaceKindMismatch, TypeMismatch, UnknownInstance, UnknownType)
from .nodes import Filler, Literal
from .places import Place, place_from_json


@dataclass(frozen=True)
class Ref:
    """A role filler pointing at another instance."""

    id: str

    def __str__(self):
        return f"@{self.id}"


UNBOUND = None


def value_to_json(v):
    if isinstance(v, Ref):
        return {"ref": v.id}
    return v


def value_from_json(v):
    if isinstance(v, dict) and "ref" in v:
        return Ref(v["ref"])
    return v


def atomic_equal(a, b) -> bool:
    """Equality that keeps booleans apart from numbers."""
    if isinstance(a, bool) or isinstance(b, bool):
        return type(a) is type(b) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    return type(a) is type(b) and a == b


def values_equal(a, b) -> bool:
    if isinstance(a, Ref) or isinstance(b, Ref):
        return a == b
    return atomic_equal(a, b)


@dataclass
class Instance:
    id: str
    type: str
    fillers: dict = field(default_factory=dict)  # slot key -> value
    capacity: float = 1.0
    trust: float = 1.0
    parents: tuple = ()
    created_at: int = 0

    def copy(self):
        return Instance(self.id, self.type, dict(self.fillers), self.capacity, self.trust,
                        self.parents, self.created_at)

    def to_json(self):
        return {
            "id": self.id,
            "type": self.type,
            "fillers": {k: value_to_json(self.fillers[k]) for k in sorted(self.fillers)},
            "capacity": self.capacity,
            "trust": self.trust,
            "parents": list(self.parents),
            "created_at": self.created_at,
        }


@dataclass
class Situation:
    instance: str
    place: Place
    present: bool
    placed_at: int
    removed_at: Optional[int] = None

    def copy(self):
        return Situation(self.instance, self.place, self.present, self.placed_at, self.removed_at)

    def to_json(self):
        return {"instance": self.instance, "place": self.place.to_json(), "present": self.present,
                "placed_at": self.placed_at, "removed_at": self.removed_at}


@dataclass(frozen=True)
class Firing:
    construction: str
    binding: tuple  # ((label, instance id), ...) in constituent order
    constructional: tuple  # ((label, firing index), ...)
    time: int
    created: tuple
    branch: str

    def bound(self, label):
        return dict(self.binding).get(label)

    def to_json(self):
        return {"construction": self.construction, "binding": dict(self.binding),
                "constructional": dict(self.constructional), "time": self.time,
                "created": list(self.created), "branch": self.branch}


def check_value(h, declared: str, value, instances) -> bool:
    kind = h.kind_of(declared)
    if kind == "atomic":
        if declared == "Integer":
            return isinstance(value, int) and not isinstance(value, bool)
        if declared == "Float":
            return isinstance(value, (int, float)) and not isinstance(value, bool)
        if declared == "Boolean":
            return isinstance(value, bool)
        return isinstance(value, str)
    if kind == "enum":
        return isinstance(value, str) and value in h.enums[declared]
    if not isinstance(value, Ref) or value.id not in instances:
        return False
    return h.is_subtype(instances[value.id].type, declared)


class BranchState:
    """One alternative interpretation world.

    Every state change is appended to ``log`` with a strictly increasing clock
    stamp, so the live state can be rebuilt by replaying the log.
    """

    def __init__(self, hierarchy, branch_id="b0", parent_id=None):
        self.h = hierarchy
        self.id = branch_id
        self.parent_id = parent_id
        self.clock = 0
        self.instances: dict[str, Instance] = {}
        self.situations: dict[str, list[Situation]] = {}
        self.log: list[dict] = []
        self.firings: list[Firing] = []
        self.refractory: dict[tuple, int] = {}
        self.dead: list[dict] = []
        self.score = 0.0
        self.incomplete = False
        self.serial = 0

    # bookkeeping
    def tick(self) -> int:
        self.clock += 1
        return self.clock

    def fresh_id(self, prefix="i") -> str:
        while True:
            self.serial += 1
            candidate = f"{prefix}{self.serial}"
            if candidate not in self.instances:
                return candidate

    def instance(self, iid) -> Instance:
        try:
            return self.instances[iid]
        except KeyError:
            raise UnknownInstance(f"no instance {iid!r} in branch {self.id}") from None

    @property
    def mutation_log(self):
        return [e for e in self.log if e["event"] in ("mutate", "bind")]

    @property
    def situation_log(self):
        return [e for e in self.log if e["event"] in ("situate", "remove")]

    def copy(self, branch_id=None) -> "BranchState":
        b = BranchState(self.h, branch_id or self.id, self.parent_id)
        b.clock = self.clock
        b.instances = {k: v.copy() for k, v in self.instances.items()}
        b.situations = {k: [s.copy() for s in v] for k, v in self.situations.items()}
        b.log = list(self.log)  # entries are never modified in place
        b.firings = list(self.firings)
        b.refractory = dict(self.refractory)
        b.dead = list(self.dead)
        b.score = self.score
        b.incomplete = self.incomplete
        b.serial = self.serial
        return b

    def restore(self, snapshot: "BranchState"):
        """Overwrite this branch with a snapshot taken by :meth:`copy`."""
        dead = self.dead
        self.__dict__.update(snapshot.copy().__dict__)
        self.dead = dead

    # situations
    def entries(self, ctx: str) -> list:
        return self.situations.get(ctx, [])

    def present_in(self, ctx: str) -> list:
        return [s for s in self.entries(ctx) if s.present]

    def place_of(self, inst: str, ctx: str, include_removed=False) -> Optional[Place]:
        for s in reversed(self.entries(ctx)):
            if s.instance == inst and (s.present or include_removed):
                return s.place
        return None

    def contexts_of(self, inst: str) -> list:
        return sorted(c for c, entries in self.situations.items()
                      if any(s.instance == inst and s.present for s in entries))

    def ever_situated(self, inst: str) -> bool:
        return any(s.instance == inst for entries in self.situations.values() for s in entries)

    def is_live(self, inst: str) -> bool:
        """Never situated (a role instance) or present in at least one context."""
        return not self.ever_situated(inst) or bool(self.contexts_of(inst))

    # dumps
    def to_json(self, include_dead=True) -> dict:
        out = {
            "branch": self.id,
            "parent": self.parent_id,
            "clock": self.clock,
            "score": self.score,
            "incomplete": self.incomplete,
            "instances": [self.instances[k].to_json() for k in sorted(self.instances)],
            "situations": {c: [s.to_json() for s in self.situations[c]]
                           for c in sorted(self.situations)},
            "log": self.log,
            "firings": [f.to_json() for f in self.firings],
            "refractory": [[list(k[:1]) + list(k[1]), t] for k, t in sorted(self.refractory.items())],
        }
        if include_dead:
            out["dead"] = self.dead
        return out

    def dump(self, include_dead=True) -> str:
        return json.dumps(self.to_json(include_dead), indent=2)

    def live_signature(self) -> str:
        """Canonical text of the live state only (no logs, clock, or ids of the branch)."""
        insts = []
        for k in sorted(self.instances):
            inst = self.instances[k]
            insts.append([k, inst.type, {s: value_to_json(v) for s, v in sorted(inst.fillers.items())},
                          inst.capacity, inst.trust, list(inst.parents)])
        sits = {c: sorted([s.instance, s.place.to_json()] for s in self.present_in(c))
                for c in sorted(self.situations)}
        return json.dumps([insts, sits, len(self.firings)], sort_keys=True)


# operations -----------------------------------------------------------------

def _slot_for(h, type_name, role):
    """Resolve ``role`` (a slot key, tuple, or ``A*B*r`` string) to its descriptor."""
    if isinstance(role, tuple):
        parts = list(role)
    else:
        parts = role.split("*")
    return h.resolve_group(type_name, tuple(parts[:-1]), parts[-1])


def _initial_fillers(h, type_name):
    out = {}
    for c in h.effective_constraints(type_name):
        if isinstance(c, Filler) and isinstance(c.value, Literal):
            groups = c.path.groups()
            if len(groups) == 1:
                desc = h.resolve_group(type_name, *groups[0])
                out[desc.slot] = c.value.value
    return out


def create_instance(b: BranchState, type_name: str, fillers=None, parents=(), *,
                    capacity=1.0, trust=1.0, instance_id=None) -> str:
    h = b.h
    node = h.require(type_name)
    if node.kind == "s-construction":
        raise UnknownType(f"{type_name} is an s-construction, not a schema or context")
    if not capacity > 0:
        raise ValueError("capacity must be positive")
    if not 0 < trust <= 1:
        raise ValueError("trust must lie in (0, 1]")
    iid = instance_id or b.fresh_id()
    if iid in b.instances:
        raise ValueError(f"duplicate instance id {iid!r}")
    parents = tuple(parents)
    if len(set(parents)) != len(parents) or iid in parents:
        raise ValueError("parents must be distinct and exclude the instance itself")
    for p in parents:
        b.instance(p)
    slots = _initial_fillers(h, type_name)
    for role, value in (fillers or {}).items():
        desc = _slot_for(h, type_name, role)
        if value is UNBOUND:
            continue
        if not check_value(h, desc.type, value, b.instances):
            raise TypeMismatch(f"{type_name}.{desc.slot} expects {desc.type}, got {value!r}")
        slots[desc.slot] = value
    t = b.tick()
    inst = Instance(iid, type_name, slots, float(capacity), float(trust), parents, t)
    b.instances[iid] = inst
    b.log.append({"event": "create", "time": t, "instance": inst.to_json()})
    return iid


def situate(b: BranchState, inst: str, ctx: str, place: Place):
    b.instance(inst)
    ctx_inst = b.instance(ctx)
    if not b.h.is_context(ctx_inst.type):
        raise PlaceKindMismatch(f"{ctx} ({ctx_inst.type}) is not a context")
    allowed = b.h.context_places(ctx_inst.type)
    if place.kind not in allowed:
        raise PlaceKindMismatch(f"{ctx_inst.type} has no {place.kind} places (declared: "
                                f"{', '.join(allowed)})")
    if any(s.instance == inst for s in b.present_in(ctx)):
        raise AlreadySituatedHere(f"{inst} is already present in {ctx}")
    t = b.tick()
    b.situations.setdefault(ctx, []).append(Situation(inst, place, True, t))
    b.log.append({"event": "situate", "time": t, "instance": inst, "context": ctx,
                  "place": place.to_json()})


def remove_situated(b: BranchState, inst: str, ctx: str):
    for s in b.entries(ctx):
        if s.instance == inst and s.present:
            t = b.tick()
            s.present = False
            s.removed_at = t
            b.log.append({"event": "remove", "time": t, "instance": inst, "context": ctx})
            return
    raise NotSituated(f"{inst} is not present in {ctx}")


def _write(b, inst_id, role, value, event):
    inst = b.instance(inst_id)
    desc = _slot_for(b.h, inst.type, role)
    if event == "mutate" and not desc.mutable:
        raise ImmutableRole(f"{inst.type}.{desc.slot} is not declared mutable")
    if not check_value(b.h, desc.type, value, b.instances):
        raise TypeMismatch(f"{inst.type}.{desc.slot} expects {desc.type}, got {value!r}")
    old = inst.fillers.get(desc.slot)
    t = b.tick()
    inst.fillers[desc.slot] = value
    b.log.append({"event": event, "time": t, "instance": inst_id, "role": desc.slot,
                  "old": value_to_json(old), "new": value_to_json(value)})


def mutate_role(b: BranchState, inst: str, role, value):
    _write(b, inst, role, value, "mutate")


def bind_role(b: BranchState, inst: str, role, value):
    """First binding of an underspecified role (any role, mutable or not)."""
    current = b.instance(inst).fillers.get(_slot_for(b.h, b.instance(inst).type, role).slot)
    if current is not UNBOUND:
        raise ImmutableRole(f"{inst}.{role} is already bound")
    _write(b, inst, role, value, "bind")


def firing_event(f: Firing) -> dict:
    return {"event": "fire", "time": f.time, "construction": f.construction,
            "binding": [list(p) for p in f.binding],
            "constructional": [list(p) for p in f.constructional],
            "created": list(f.created)}


def record_firing(b: BranchState, f: Firing):
    b.firings.append(f)
    b.log.append(firing_event(f))


def fork_branch(b: BranchState, branch_id=None) -> BranchState:
    child = b.copy(branch_id or f"{b.id}.{len(b.firings)}")
    child.parent_id = b.id
    return child


def replay(b: BranchState) -> BranchState:
    """Rebuild a branch's live state from its event log alone."""
    r = BranchState(b.h, b.id, b.parent_id)
    for e in b.log:
        ev = e["event"]
        if ev == "create":
            d = e["instance"]
            r.instances[d["id"]] = Instance(d["id"], d["type"],
                                            {k: value_from_json(v) for k, v in d["fillers"].items()},
                                            d["capacity"], d["trust"], tuple(d["parents"]),
                                            d["created_at"])
        elif ev == "situate":
            r.situations.setdefault(e["context"], []).append(
                Situation(e["instance"], place_from_json(e["place"]), True, e["time"]))
        elif ev == "remove":
            for s in r.situations[e["context"]]:
                if s.instance == e["instance"] and s.present:
                    s.present = False
                    s.removed_at = e["time"]
        elif ev in ("mutate", "bind"):
            r.instances[e["instance"]].fillers[e["role"]] = value_from_json(e["new"])
        elif ev == "fire":
            r.firings.append(Firing(e["construction"], tuple(map(tuple, e["binding"])),
                                    tuple(map(tuple, e["constructional"])), e["time"],
                                    tuple(e["created"]), b.id))
        r.clock = e["time"]
    return r


def load_state(data: dict, hierarchy, branch_id="b0") -> BranchState:
    """Build a branch from ``{"instances": [...], "situations": [...]}``.

    Instances are created in list order, so parents and references must come first.
    """
    b = BranchState(hierarchy, branch_id)
    for d in data.get("instances", []):
        fillers = {k: value_from_json(v) for k, v in d.get("fillers", {}).items()}
        create_instance(b, d["type"], fillers, d.get("parents", ()),
                        capacity=d.get("capacity", 1.0), trust=d.get("trust", 1.0),
                        instance_id=d["id"])
    for s in data.get("situations", []):
        situate(b, s["instance"], s["context"], place_from_json(s["place"]))
    return b
