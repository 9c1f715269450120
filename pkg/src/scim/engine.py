"""Forward-chaining execution: matching, firing, beam search over branches, scoring."""

from __future__ import annotations

import functools
import hashlib
import itertools
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .constraints import (BindingEnv, Context, Verdict, ancestry, compute_place,
                          compute_value, evaluate, resolve_path, validate_instance,
                          value_of, _Undetermined)
from .contexts import is_linear
from .errors import PostConstraintViolated, ScimError
from .memory import (UNBOUND, BranchState, Firing, Ref, bind_role, create_instance,
                     fork_branch, mutate_role, record_firing, remove_situated, situate)
from .nodes import Identification, Out, iter_paths
from .places import Point
from .program import CompiledProgram, CompiledSConstruction


@dataclass
class SearchConfig:
    beam_width: int = 8
    max_firings: int = 200
    score_floor: float = -math.inf
    cost_per_firing: float = 0.01
    halt_on_type: Optional[str] = None

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam width must be at least 1")
        if self.max_firings < 1:
            raise ValueError("max firings must be at least 1")

    def to_json(self):
        d = asdict(self)
        if d["score_floor"] == -math.inf:
            d["score_floor"] = None
        return d


# matching ---------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _labels(c) -> frozenset:
    return frozenset(p.head for p in iter_paths(c) if p.head is not None)


def _binding_order(sc: CompiledSConstruction) -> list:
    """Input constituents with every situating context ahead of what it hosts."""
    inputs = sc.inputs
    order = []

    def visit(label, trail=()):
        if label in order or label not in inputs or label in trail:
            return
        ctx = sc.constituents[label].situated_in
        if ctx:
            visit(ctx, trail + (label,))
        order.append(label)

    for label in inputs:
        visit(label)
    return order


def _candidates(b: BranchState, sc, label, assignment) -> list:
    decl = sc.constituents[label]
    h = b.h
    if decl.situated_in and decl.situated_in in sc.constituents:
        ctx_id = assignment.get(decl.situated_in)
        if ctx_id is None:
            return []
        ids = sorted({s.instance for s in b.present_in(ctx_id)})
    else:
        ids = sorted(i for i in b.instances if b.is_live(i))
    return [i for i in ids if h.is_subtype(b.instances[i].type, decl.type)]


def _refractory(b: BranchState, key) -> bool:
    stamp = b.refractory.get(key)
    if stamp is None:
        return False
    bound = set(key[1])
    for e in reversed(b.log):
        if e["time"] <= stamp:
            break
        if e["event"] == "mutate" and e["instance"] in bound:
            return False
    return True


def refractory_key(sc, env: BindingEnv):
    return (sc.name, tuple(sorted(env.constituents.values())))


def _constructional(b: BranchState, program, sc, ids):
    """Firing indices for positive labels, or None if a requirement fails."""
    if not sc.positive and not sc.negative:
        return {}
    h = b.h
    scope = ancestry(b, ids)

    def supporting(t):
        return [k for k, f in enumerate(b.firings)
                if h.is_subtype(f.construction, t) and scope.intersection(f.created)]

    chosen = {}
    for label, t in sc.positive:
        hits = supporting(t)
        if not hits:
            return None
        chosen[label] = hits[-1]
    for label, t in sc.negative:
        if supporting(t):
            return None
    return chosen


def _pre_env(b, sc, env, ctx, labels_bound, newly=None):
    """Apply identifications whose labels are bound; None if one fails.

    With ``newly`` set, only those mentioning that label are applied (the
    others were applied when an earlier label was bound).
    """
    for c in sc.pre:
        if isinstance(c, Identification) and _labels(c) <= labels_bound \
                and (newly is None or newly in _labels(c)):
            v, env = evaluate(b, c, env, ctx)
            if v is Verdict.VIOLATED:
                return None
    return env


def _violates(b, sc, env, ctx, labels_bound, newly=None) -> bool:
    for c in sc.pre:
        if isinstance(c, Identification) or not _labels(c) <= labels_bound:
            continue
        if newly is not None and newly not in _labels(c):
            continue
        v, _ = evaluate(b, c, env, ctx)
        if v is Verdict.VIOLATED:
            return True
    return False


def admissible(b: BranchState, program: CompiledProgram, sc, assignment: dict):
    """Full admissibility test of a complete input assignment; returns env or None."""
    h = b.h
    ids = list(assignment.values())
    if len(set(ids)) != len(ids):
        return None
    for label, iid in assignment.items():
        decl = sc.constituents[label]
        inst = b.instances.get(iid)
        if inst is None or not h.is_subtype(inst.type, decl.type):
            return None
        if decl.situated_in:
            ctx_id = assignment.get(decl.situated_in)
            if ctx_id is None or b.place_of(iid, ctx_id) is None:
                return None
        elif not b.is_live(iid):
            return None
    env = BindingEnv(dict(assignment))
    if _refractory(b, refractory_key(sc, env)):
        return None
    chosen = _constructional(b, program, sc, ids)
    if chosen is None:
        return None
    env.firings = chosen
    ctx = Context(program, sc, "pre")
    bound = set(assignment) | set(chosen) | {l for l, _ in sc.negative}
    env = _pre_env(b, sc, env, ctx, bound)
    if env is None or _violates(b, sc, env, ctx, bound):
        return None
    return env


def enumerate_matches(b: BranchState, program: CompiledProgram, sc) -> list:
    """All admissible bindings of ``sc``'s input constituents, in canonical order."""
    order = _binding_order(sc)
    ctx = Context(program, sc, "pre")
    results = []

    # partial assignments are pruned on Violated only; admissible() re-checks the leaf
    def extend(i, assignment, env):
        if i == len(order):
            found = admissible(b, program, sc, assignment)
            if found is not None:
                results.append(found)
            return
        label = order[i]
        used = set(assignment.values())
        for cand in _candidates(b, sc, label, assignment):
            if cand in used:
                continue
            assignment[label] = cand
            bound = set(assignment)
            nxt = env.copy()
            nxt.constituents[label] = cand
            nxt = _pre_env(b, sc, nxt, ctx, bound, label)
            if nxt is not None and not _violates(b, sc, nxt, ctx, bound, label):
                extend(i + 1, assignment, nxt)
            del assignment[label]

    if order or not sc.inputs:
        extend(0, {}, BindingEnv())
    return sorted(results, key=lambda e: (e.bound_ids(), sorted(e.constituents.items())))


def oracle_matches(b: BranchState, program: CompiledProgram, sc) -> list:
    """Brute force: every tuple of instances, filtered by the admissibility test."""
    labels = sc.inputs
    out = []
    for combo in itertools.product(sorted(b.instances), repeat=len(labels)):
        env = admissible(b, program, sc, dict(zip(labels, combo)))
        if env is not None:
            out.append(env)
    return sorted(out, key=lambda e: (e.bound_ids(), sorted(e.constituents.items())))


# firing ---------------------------------------------------------------------

def _derived_id(b, sc, label, env, type_name):
    inputs = sorted((l, env.constituents[l]) for l in sc.inputs)
    bound = json.dumps([sc.name, label, inputs,
                        sum(1 for f in b.firings if f.construction == sc.name)])
    digest = hashlib.sha1(bound.encode()).hexdigest()[:8]
    iid = f"{type_name.lower()}-{digest}"
    n = 1
    while iid in b.instances:
        n += 1
        iid = f"{type_name.lower()}-{digest}-{n}"
    return iid


class _Abort(Exception):
    pass


def _flush(b, env: BindingEnv):
    """Write values proven by identification into still-unbound slots."""
    for root, members in sorted(env.classes().items(), key=lambda kv: (kv[0].instance, kv[0].slot)):
        value = env.pending.get(root, UNBOUND)
        if value is UNBOUND:
            for m in sorted(members, key=lambda s: (s.instance, s.slot)):
                v = b.instance(m.instance).fillers.get(m.slot, UNBOUND)
                if v is not UNBOUND:
                    value = v
                    break
        if value is UNBOUND:
            continue
        for m in sorted(members, key=lambda s: (s.instance, s.slot)):
            if b.instance(m.instance).fillers.get(m.slot, UNBOUND) is UNBOUND:
                bind_role(b, m.instance, m.slot, value)


def _fire_effects(b, program, sc, env, firing_ctx):
    h = b.h
    inputs = [env.constituents[l] for l in sc.inputs]
    pre_values = {(iid, slot): v for iid, inst in b.instances.items() for slot, v in inst.fillers.items()}
    created = []
    # (1) outputs
    for label in sc.outputs:
        decl = sc.constituents[label]
        parents = [b.instance(i) for i in inputs]
        capacity = sum(p.capacity for p in parents) if parents else 1.0
        trust = min((p.trust for p in parents), default=1.0) * sc.confidence
        iid = create_instance(b, decl.type, {}, inputs, capacity=capacity,
                              trust=min(max(trust, 1e-9), 1.0),
                              instance_id=_derived_id(b, sc, label, env, decl.type))
        env.constituents[label] = iid
        created.append(iid)
    for c in sc.initializers:
        try:
            slot = resolve_path(b, c.path, env, firing_ctx)
            value = compute_value(b, c.value, env, firing_ctx)
        except _Undetermined:
            continue
        current = value_of(b, slot, env, firing_ctx)
        if current is UNBOUND:
            bind_role(b, slot.instance, slot.slot, value)
    for c in sc.identifications:
        v, env2 = evaluate(b, c, env, firing_ctx)
        if v is Verdict.VIOLATED:
            raise _Abort(f"identification failed: {c}")
        env = env2
    _flush(b, env)
    # (2) mutations, all computed before any is applied
    writes = []
    for c in sc.mutations:
        try:
            slot = resolve_path(b, c.path, env, firing_ctx)
            value = compute_value(b, c.value, env, firing_ctx)
        except _Undetermined:
            raise _Abort(f"mutation target or value undetermined: {c}") from None
        writes.append((slot, value))
    mutated = []
    for slot, value in writes:
        if b.instance(slot.instance).fillers.get(slot.slot, UNBOUND) != value:
            mutate_role(b, slot.instance, slot.slot, value)
            mutated.append(slot.instance)
    # (4 before 3) places are computed while OUT constituents are still present
    placements = []
    for label in sc.outputs:
        decl = sc.constituents[label]
        if not decl.situated_in:
            continue
        ctx_id = env.constituents[decl.situated_in]
        expr = sc.placements.get(label)
        if expr is None:
            place = Point(float(len(b.entries(ctx_id))))
        else:
            try:
                place = compute_place(b, expr, env, firing_ctx, ctx_id)
            except _Undetermined:
                raise _Abort(f"placement of {label} undetermined") from None
        placements.append((env.constituents[label], ctx_id, place))
    # (3) OUT
    for label in sc.outs:
        ctx_id = env.constituents[sc.constituents[label].situated_in]
        remove_situated(b, env.constituents[label], ctx_id)
    for iid, ctx_id, place in placements:
        situate(b, iid, ctx_id, place)
    # (5) post-phase constraints
    post_ctx = Context(program, sc, "post", pre_values)
    for c in sc.post:
        if isinstance(c, Out):
            continue
        v, env = evaluate(b, c, env, post_ctx)
        if v is Verdict.VIOLATED:
            raise _Abort(f"post-phase constraint violated: {c}")
    for iid in created + sorted(set(mutated)):
        if not validate_instance(b, iid):
            raise _Abort(f"instance {iid} violates its type's constraints")
    return env, created


def fire(b: BranchState, program: CompiledProgram, sc, env: BindingEnv,
         cfg: Optional[SearchConfig] = None) -> Firing:
    """Apply one admissible binding; atomic: on failure the branch is rolled back."""
    cfg = cfg or SearchConfig()
    snapshot = b.copy()
    bound = dict(env.constituents)
    env = env.copy()
    ctx = Context(program, sc, "fire")
    try:
        env, created = _fire_effects(b, program, sc, env, ctx)
    except (_Abort, ScimError) as e:
        b.restore(snapshot)
        b.dead.append({"construction": sc.name, "binding": dict(sorted(bound.items())),
                       "time": b.clock, "reason": str(e)})
        raise PostConstraintViolated(f"{sc.name}: {e}") from None
    t = b.tick()
    firing = Firing(sc.name, tuple((l, bound[l]) for l in sc.inputs),
                    tuple(sorted(env.firings.items())), t, tuple(created), b.id)
    record_firing(b, firing)
    b.refractory[refractory_key(sc, BindingEnv(bound))] = t
    b.score = score(b, cfg)
    return firing


# scoring --------------------------------------------------------------------

def _meaning_bearing(b: BranchState, iid: str) -> bool:
    h = b.h
    if h.is_context(b.instance(iid).type):
        return False
    for ctx in b.contexts_of(iid):
        if is_linear(h, b.instance(ctx).type):
            return False
    return True


def score(b: BranchState, cfg: Optional[SearchConfig] = None) -> float:
    cfg = cfg or SearchConfig()
    total = 0.0
    for f in b.firings:
        for iid in f.created:
            if iid in b.instances and b.is_live(iid) and _meaning_bearing(b, iid):
                inst = b.instances[iid]
                total += inst.trust * inst.capacity
    return total - cfg.cost_per_firing * len(b.firings)


# run loop -------------------------------------------------------------------

def candidates(b: BranchState, program: CompiledProgram) -> list:
    out = []
    for name in sorted(program.sconstructions):
        sc = program.sconstructions[name]
        for env in enumerate_matches(b, program, sc):
            out.append((sc, env))
    return out


def _halted(b, cfg) -> bool:
    if not cfg.halt_on_type:
        return False
    return any(b.h.is_subtype(i.type, cfg.halt_on_type) for i in b.instances.values()
               if i.type in b.h.nodes)


def _order_key(b: BranchState):
    last = b.firings[-1] if b.firings else None
    return (-b.score, last.construction if last else "",
            sorted(v for _, v in last.binding) if last else [], b.id)


def run(program: CompiledProgram, initial: BranchState, cfg: Optional[SearchConfig] = None) -> list:
    """Beam search over interpretations; returns terminal branches, best first."""
    cfg = cfg or SearchConfig()
    counter = itertools.count(1)
    frontier, terminal = [initial], []
    initial.score = score(initial, cfg)
    while frontier:
        children = []
        for br in frontier:
            if _halted(br, cfg):
                terminal.append(br)
                continue
            if len(br.firings) >= cfg.max_firings:
                br.incomplete = True
                terminal.append(br)
                continue
            cands = candidates(br, program)
            ok, dead = [], []
            for sc, env in cands:
                child = fork_branch(br, f"{initial.id}.{next(counter)}")
                try:
                    fire(child, program, sc, env, cfg)
                except PostConstraintViolated:
                    dead.extend(child.dead[len(br.dead):])
                    continue
                ok.append(child)
            if not ok:
                br.dead.extend(dead)
                terminal.append(br)
                continue
            for child in ok:
                child.dead.extend(dead)
            children.extend(ok)
        children.sort(key=_order_key)
        seen, unique = set(), []
        for c in children:
            sig = c.live_signature()
            if sig not in seen and c.score >= cfg.score_floor:
                seen.add(sig)
                unique.append(c)
        frontier = unique[:cfg.beam_width]
    terminal.sort(key=lambda br: (-br.score, br.id))
    return terminal


def trace(forest: list, cfg: SearchConfig) -> dict:
    return {
        "config": cfg.to_json(),
        "branches": [{
            "branch": br.id,
            "parent": br.parent_id,
            "score": br.score,
            "incomplete": br.incomplete,
            "firings": [f.to_json() for f in br.firings],
            "dead": br.dead,
        } for br in forest],
    }


def dump_trace(forest, cfg) -> str:
    return json.dumps(trace(forest, cfg), indent=2)
