"""Three-valued constraint evaluation and identification (unification) of role references."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .contexts import eval_operation, eval_relation
from .errors import (CyclicStructure, EmptyResult, NotSituated, PlaceKindMismatch,
                     UnknownInstance, UnknownPredicate)
from .memory import UNBOUND, BranchState, Ref, value_to_json, values_equal
from .nodes import (BoolOp, Equality, Filler, FuncCall, Identification, Literal,
                    Out, Parent, PlaceOp, Predicate, Relation, RolePath)
from .predicates import FUNCTIONS, PREDICATES


class Verdict(enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    UNDETERMINED = "Undetermined"

    def __invert__(self):
        if self is Verdict.SATISFIED:
            return Verdict.VIOLATED
        if self is Verdict.VIOLATED:
            return Verdict.SATISFIED
        return self


S, V, U = Verdict.SATISFIED, Verdict.VIOLATED, Verdict.UNDETERMINED


def v_and(*vs):
    if any(v is V for v in vs):
        return V
    return S if all(v is S for v in vs) else U


def v_or(*vs):
    if any(v is S for v in vs):
        return S
    return V if all(v is V for v in vs) else U


def v_not(v):
    return ~v


def v_nand(*vs):
    return ~v_and(*vs)


BOOL_TABLE = {"AND": v_and, "OR": v_or, "NOT": v_not, "NAND": v_nand}


@dataclass(frozen=True)
class Slot:
    """A role slot on a concrete instance."""

    instance: str
    slot: str

    def __str__(self):
        return f"{self.instance}.{self.slot}"


@dataclass(frozen=True)
class Const:
    value: object


Term = Union[Slot, Const]


@dataclass
class BindingEnv:
    """Constituent bindings plus the substitution produced by identifications.

    The substitution is a union-find over slots; a class may carry a pending
    value that will be written into its unbound slots when the firing happens.
    """

    constituents: dict = field(default_factory=dict)  # label -> instance id
    firings: dict = field(default_factory=dict)  # constructional label -> firing index
    parent: dict = field(default_factory=dict)  # slot -> slot
    pending: dict = field(default_factory=dict)  # root slot -> value

    def copy(self):
        return BindingEnv(dict(self.constituents), dict(self.firings), dict(self.parent),
                          dict(self.pending))

    def find(self, s: Slot) -> Slot:
        root = s
        while root in self.parent:
            root = self.parent[root]
        return root

    def union(self, a: Slot, b: Slot):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if (rb.instance, rb.slot) < (ra.instance, ra.slot):
            ra, rb = rb, ra
        self.parent[rb] = ra
        if rb in self.pending:
            self.pending.setdefault(ra, self.pending.pop(rb))

    def classes(self) -> dict:
        out = {}
        for s in set(self.parent) | set(self.parent.values()) | set(self.pending):
            out.setdefault(self.find(s), set()).add(s)
        return out

    def canonical(self):
        """Hashable normal form: equal for envs with the same equivalence closure."""
        classes = []
        for root, members in self.classes().items():
            val = self.pending.get(root)
            classes.append((tuple(sorted((m.instance, m.slot) for m in members)),
                            repr(value_to_json(val))))
        return (tuple(sorted(self.constituents.items())), tuple(sorted(self.firings.items())),
                tuple(sorted(classes)))

    def key(self):
        return self.canonical()

    def __eq__(self, other):
        return isinstance(other, BindingEnv) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def bound_ids(self) -> tuple:
        return tuple(sorted(self.constituents.values()))

    def to_json(self):
        return {"constituents": dict(sorted(self.constituents.items())),
                "constructional": dict(sorted(self.firings.items()))}


class Context:
    """What an evaluation needs besides the branch: scope and phase.

    ``sc`` is the s-construction whose constraints are evaluated (None for a
    schema's own constraints, where paths start at ``env.constituents['self']``).
    ``pre_values`` maps (instance, slot) to the value before a firing; during
    the post phase, non-muted references read those.
    """

    def __init__(self, program=None, sc=None, phase="pre", pre_values=None, self_type=None):
        self.program = program
        self.sc = sc
        self.phase = phase
        self.pre_values = pre_values or {}
        self.self_type = self_type


def _live_value(b: BranchState, s: Slot, env: BindingEnv, ctx: Context, muted=False):
    root = env.find(s)
    if root in env.pending:
        return env.pending[root]
    if root in env.parent or any(env.find(k) == root for k in env.parent):
        for m in sorted(env.classes().get(root, {s}), key=lambda x: (x.instance, x.slot)):
            v = _raw(b, m, ctx, muted)
            if v is not UNBOUND:
                return v
        return UNBOUND
    return _raw(b, s, ctx, muted)


def _raw(b, s, ctx, muted):
    if not muted and ctx.phase == "post" and (s.instance, s.slot) in ctx.pre_values:
        return ctx.pre_values[(s.instance, s.slot)]
    inst = b.instances.get(s.instance)
    if inst is None:
        return UNBOUND
    return inst.fillers.get(s.slot, UNBOUND)


def value_of(b, term: Term, env, ctx, muted=False):
    if isinstance(term, Const):
        return term.value
    return _live_value(b, term, env, ctx, muted)


class _Undetermined(Exception):
    pass


def resolve_path(b: BranchState, path: RolePath, env: BindingEnv, ctx: Context):
    """Turn a path into a Term; raises _Undetermined when an intermediate hop is unbound."""
    h = b.h
    groups = path.groups()
    if ctx.sc is None or path.is_self:
        inst = env.constituents["self"]
        decl = ctx.self_type or b.instance(inst).type
        rest = groups
    else:
        label = groups[0][1]
        sc = ctx.sc
        if label in sc.constituents:
            if label not in env.constituents:
                raise _Undetermined(label)
            inst = env.constituents[label]
            decl = sc.constituents[label].type
            rest = groups[1:]
        else:
            ctype = sc.constructional_type(label)
            if ctype is None or label not in env.firings:
                raise _Undetermined(label)
            firing = b.firings[env.firings[label]]
            const = groups[1][1]
            inst = firing.bound(const)
            if inst is None:
                raise _Undetermined(const)
            decl = ctx.program.sconstructions[ctype].constituents[const].type
            rest = groups[2:]
    if not rest:
        return Const(Ref(inst))
    cur, cur_decl = inst, decl
    for i, (inherits, role) in enumerate(rest):
        desc = h.resolve_group(cur_decl, inherits, role)
        actual = b.instance(cur).type
        slot = Slot(cur, "*".join(h.slot_prefix(actual, cur_decl) + desc.key))
        if i == len(rest) - 1:
            return slot
        v = value_of(b, slot, env, ctx, path.muted)
        if not isinstance(v, Ref):
            raise _Undetermined(str(slot))
        cur, cur_decl = v.id, desc.type
    raise AssertionError("unreachable")


# unification -----------------------------------------------------------------

def _type_compatible(h, ta, tb):
    return h.is_subtype(ta, tb) or h.is_subtype(tb, ta)


def _unify(b, a: Term, c: Term, env: BindingEnv, ctx: Context, active: set):
    if a == c:
        return True
    va, vc = value_of(b, a, env, ctx), value_of(b, c, env, ctx)
    if va is UNBOUND and vc is UNBOUND:
        env.union(a, c)  # both are slots: constants are never unbound
        return True
    if va is UNBOUND:
        env.pending[env.find(a)] = vc
        if isinstance(c, Slot):
            env.union(a, c)
        return True
    if vc is UNBOUND:
        env.pending[env.find(c)] = va
        if isinstance(a, Slot):
            env.union(a, c)
        return True
    if isinstance(va, Ref) != isinstance(vc, Ref):
        return False
    if isinstance(va, Ref):
        if va != vc:
            if not _identify_instances(b, va.id, vc.id, env, ctx, active):
                return False
    elif not values_equal(va, vc):
        return False
    if isinstance(a, Slot) and isinstance(c, Slot):
        env.union(a, c)
    return True


def _identify_instances(b, ia, ic, env, ctx, active):
    h = b.h
    ta, tc = b.instance(ia).type, b.instance(ic).type
    if not _type_compatible(h, ta, tc):
        return False
    pair = frozenset((ia, ic))
    if pair in active:
        raise CyclicStructure(f"cyclic identification of {ia} and {ic}")
    active.add(pair)
    try:
        general, specific = (ia, ic) if h.is_subtype(tc, ta) else (ic, ia)
        tg, ts = b.instance(general).type, b.instance(specific).type
        prefix = h.slot_prefix(ts, tg)
        for key in sorted(h.effective_roles(tg)):
            sg = Slot(general, "*".join(key))
            ss = Slot(specific, "*".join(prefix + key))
            if value_of(b, sg, env, ctx) is UNBOUND or value_of(b, ss, env, ctx) is UNBOUND:
                continue
            if not _unify(b, sg, ss, env, ctx, active):
                return False
        return True
    finally:
        active.discard(pair)


def unify(b: BranchState, a: Term, c: Term, env: BindingEnv, ctx: Optional[Context] = None):
    """Identify two role references; returns the extended env or None on failure."""
    ctx = ctx or Context()
    work = env.copy()
    try:
        ok = _unify(b, a, c, work, ctx, set())
    except CyclicStructure:
        return None
    return work if ok else None


# evaluation -------------------------------------------------------------------

def _atomic_args(b, args, env, ctx):
    out = []
    for a in args:
        if isinstance(a, Literal):
            out.append(a.value)
            continue
        v = value_of(b, resolve_path(b, a, env, ctx), env, ctx, a.muted)
        if v is UNBOUND:
            raise _Undetermined(str(a))
        out.append(v)
    return out


def compute_value(b, value, env, ctx):
    """Evaluate a filler right-hand side to an atomic value or Ref."""
    if isinstance(value, Literal):
        return value.value
    if isinstance(value, FuncCall):
        arity, fn = FUNCTIONS[value.name]
        return fn(*_atomic_args(b, value.args, env, ctx))
    if isinstance(value, RolePath):
        v = value_of(b, resolve_path(b, value, env, ctx), env, ctx, value.muted)
        if v is UNBOUND:
            raise _Undetermined(str(value))
        return v
    raise TypeError(f"not an atomic value expression: {value!r}")


def _context_instance(b, path, env, ctx):
    v = value_of(b, resolve_path(b, path, env, ctx), env, ctx)
    if not isinstance(v, Ref):
        raise _Undetermined(str(path))
    return v.id


def compute_place(b, expr, env, ctx, ctx_id=None):
    """Place of a constituent inside a context, or the result of a context operation."""
    if isinstance(expr, PlaceOp):
        cid = _context_instance(b, expr.context, env, ctx)
        places = [compute_place(b, a, env, ctx, cid) for a in expr.args]
        return eval_operation(b.h, b.instance(cid).type, expr.name, places)
    term = resolve_path(b, expr, env, ctx)
    v = value_of(b, term, env, ctx)
    if not isinstance(v, Ref):
        raise _Undetermined(str(expr))
    place = b.place_of(v.id, ctx_id)
    if place is None and ctx.phase == "post":
        place = b.place_of(v.id, ctx_id, include_removed=True)
    if place is None:
        raise NotSituated(f"{v.id} is not situated in {ctx_id}")
    return place


def evaluate(b: BranchState, c, env: BindingEnv, ctx: Optional[Context] = None):
    """Evaluate one constraint; returns (Verdict, env) where env may be extended."""
    ctx = ctx or Context()
    try:
        return _evaluate(b, c, env, ctx)
    except _Undetermined:
        return U, env


def _evaluate(b, c, env, ctx):
    if isinstance(c, BoolOp):
        fn = BOOL_TABLE[c.op]
        if c.op == "AND":
            cur, verdicts = env, []
            for a in c.args:
                v, cur = evaluate(b, a, cur, ctx)
                verdicts.append(v)
            result = fn(*verdicts)
            return result, (cur if result is S else env)
        verdicts = [evaluate(b, a, env, ctx)[0] for a in c.args]
        return fn(*verdicts), env
    if isinstance(c, Out):
        return S, env
    if isinstance(c, Filler):
        if isinstance(c.value, PlaceOp) or (
                ctx.sc is not None and c.path.head in ctx.sc.placements
                and len(c.path.groups()) == 1 and not c.path.muted):
            return _placement_verdict(b, c, env, ctx), env
        if c.path.muted and ctx.phase == "pre":
            return U, env
        lhs = value_of(b, resolve_path(b, c.path, env, ctx), env, ctx, c.path.muted)
        if lhs is UNBOUND:
            return U, env
        want = compute_value(b, c.value, env, ctx)
        return (S if values_equal(lhs, want) else V), env
    if isinstance(c, Identification):
        if (c.left.muted or c.right.muted) and ctx.phase == "pre":
            return U, env
        left = resolve_path(b, c.left, env, ctx)
        right = resolve_path(b, c.right, env, ctx)
        if c.function:
            rv = value_of(b, right, env, ctx, c.right.muted)
            if rv is UNBOUND:
                return U, env
            if isinstance(rv, Ref):
                return V, env
            right = Const(FUNCTIONS[c.function][1](rv))
        out = unify(b, left, right, env, ctx)
        return (S, out) if out is not None else (V, env)
    if isinstance(c, Equality):
        if (c.left.muted or c.right.muted) and ctx.phase == "pre":
            return U, env
        lv = value_of(b, resolve_path(b, c.left, env, ctx), env, ctx, c.left.muted)
        rv = value_of(b, resolve_path(b, c.right, env, ctx), env, ctx, c.right.muted)
        if lv is UNBOUND or rv is UNBOUND:
            return U, env
        return (S if values_equal(lv, rv) else V), env
    if isinstance(c, Predicate):
        if c.name not in PREDICATES:
            raise UnknownPredicate(c.name)
        if ctx.phase == "pre" and any(isinstance(a, RolePath) and a.muted for a in c.args):
            return U, env
        args = _atomic_args(b, c.args, env, ctx)
        try:
            ok = PREDICATES[c.name][1](*args)
        except (TypeError, ZeroDivisionError):
            return V, env
        return (S if ok else V), env
    if isinstance(c, Relation):
        cid = _context_instance(b, c.context, env, ctx)
        try:
            places = [compute_place(b, a, env, ctx, cid) for a in c.args]
            ok = eval_relation(b.h, b.instance(cid).type, c.name, places)
        except (EmptyResult, PlaceKindMismatch):
            # no signature accepts these place kinds: the relation cannot hold
            return V, env
        return (S if ok else V), env
    if isinstance(c, Parent):
        child = value_of(b, resolve_path(b, c.child, env, ctx), env, ctx, c.child.muted)
        parent = value_of(b, resolve_path(b, c.parent, env, ctx), env, ctx, c.parent.muted)
        if child is UNBOUND or parent is UNBOUND:
            return U, env
        if not (isinstance(child, Ref) and isinstance(parent, Ref)):
            return V, env
        return (S if is_ancestor(b, parent.id, child.id) else V), env
    raise TypeError(f"unknown constraint {c!r}")


def _placement_verdict(b, c, env, ctx):
    if ctx.phase == "pre":
        return U
    label = c.path.head
    decl = ctx.sc.constituents[label]
    inst = env.constituents.get(label)
    ctx_id = env.constituents.get(decl.situated_in) if decl.situated_in else None
    if inst is None or ctx_id is None:
        return U
    want = compute_place(b, c.value, env, ctx, ctx_id)
    return S if b.place_of(inst, ctx_id) == want else V


def is_ancestor(b: BranchState, ancestor: str, inst: str) -> bool:
    """True iff ``ancestor`` is reachable from ``inst`` through parents lists."""
    b.instance(ancestor)
    seen, stack = set(), list(b.instance(inst).parents)
    while stack:
        cur = stack.pop()
        if cur == ancestor:
            return True
        if cur in seen:
            continue
        seen.add(cur)
        node = b.instances.get(cur)
        if node is None:
            raise UnknownInstance(cur)
        stack.extend(node.parents)
    return False


def ancestry(b: BranchState, ids) -> set:
    """The given instances together with all their ancestors."""
    out, stack = set(), list(ids)
    while stack:
        cur = stack.pop()
        if cur in out:
            continue
        out.add(cur)
        stack.extend(b.instance(cur).parents)
    return out


def instance_verdict(b: BranchState, inst: str) -> Verdict:
    h = b.h
    itype = b.instance(inst).type
    env = BindingEnv({"self": inst})
    ctx = Context(self_type=itype)
    verdicts = []
    for c in h.effective_constraints(itype):
        v, env = evaluate(b, c, env, ctx)
        verdicts.append(v)
    # situated roles: the filler must be present in the context filling the named role
    node_roles = h.effective_roles(itype)
    for key, desc in node_roles.items():
        if not desc.situated_in:
            continue
        filler = b.instance(inst).fillers.get("*".join(key))
        ctx_key = key[:-1] + (desc.situated_in,)
        ctx_filler = b.instance(inst).fillers.get("*".join(ctx_key))
        if not isinstance(filler, Ref) or not isinstance(ctx_filler, Ref):
            verdicts.append(U)
        else:
            verdicts.append(S if b.place_of(filler.id, ctx_filler.id) is not None else V)
    return v_and(*verdicts) if verdicts else S


def validate_instance(b: BranchState, inst: str) -> bool:
    """Valid unless some effective constraint is Violated (Undetermined is provisional)."""
    return instance_verdict(b, inst) is not V
