"""Static validation and compilation of parsed definitions into a runnable program."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .contexts import PRELUDE, is_set
from .errors import (AmbiguousRole, ScimError, UnknownType, UnresolvedRolePath,
                     ValidationError)
from .hierarchy import ATOMIC_TYPES, PLACE_KINDS, TypeHierarchy
from .nodes import (BoolOp, Definition, EnumDef, Equality, Filler, FuncCall,
                    Identification, Literal, Out, Parent, PlaceOp, Predicate,
                    Relation, RolePath, iter_paths)
from .parser import parse_source
from .predicates import FUNCTIONS, PREDICATES


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    column: int = 0

    def __str__(self):
        return f"{self.line}:{self.column}: {self.code}: {self.message}"


@dataclass
class CompiledSConstruction:
    name: str
    confidence: float
    positive: tuple  # ((label, s-construction type), ...)
    negative: tuple
    constituents: dict  # label -> ConstituentDecl, declaration order
    constraints: list
    pre: list = field(default_factory=list)
    post: list = field(default_factory=list)
    outs: list = field(default_factory=list)
    placements: dict = field(default_factory=dict)  # O label -> PlaceOp | RolePath
    initializers: list = field(default_factory=list)  # fillers on O-constituent roles
    mutations: list = field(default_factory=list)  # fillers on muted paths
    identifications: list = field(default_factory=list)  # post-phase identifications

    @property
    def inputs(self):
        return [l for l, c in self.constituents.items() if c.direction in ("I", "IO")]

    @property
    def outputs(self):
        return [l for l, c in self.constituents.items() if c.direction == "O"]

    def constructional_type(self, label) -> Optional[str]:
        for l, t in self.positive + self.negative:
            if l == label:
                return t
        return None


@dataclass
class CompiledProgram:
    definitions: list
    hierarchy: TypeHierarchy
    sconstructions: dict  # name -> CompiledSConstruction

    def sconstruction(self, name) -> CompiledSConstruction:
        return self.sconstructions[name]


def _loc(node):
    loc = getattr(node, "loc", (0, 0)) or (0, 0)
    return loc


def _references_output(c, outputs) -> bool:
    for p in iter_paths(c):
        if p.muted or p.head in outputs:
            return True
    return False


def compile_sconstruction(h: TypeHierarchy, name: str, cache: dict) -> CompiledSConstruction:
    if name in cache:
        return cache[name]
    node = h.require(name)
    d = node.definition
    constituents, constraints, positive, negative = {}, [], [], []
    for p in node.parents:
        parent = compile_sconstruction(h, p, cache)
        for label, c in parent.constituents.items():
            constituents.setdefault(label, c)
        constraints.extend(c for c in parent.constraints if c not in constraints)
        positive.extend(x for x in parent.positive if x not in positive)
        negative.extend(x for x in parent.negative if x not in negative)
    for c in d.constituents:
        constituents[c.label] = c
    for c in d.constructional:
        (negative if c.negative else positive).append((c.label, c.type))
    constraints.extend(d.constraints)
    sc = CompiledSConstruction(name, 1.0 if d.confidence is None else d.confidence,
                               tuple(positive), tuple(negative), constituents, constraints)
    outputs = set(sc.outputs)
    for c in constraints:
        if isinstance(c, Out):
            sc.outs.append(c.label)
            continue
        if isinstance(c, Filler) and c.path.head in outputs and len(c.path.groups()) == 1 \
                and not c.path.muted:
            sc.placements[c.path.head] = c.value
            sc.post.append(c)
            continue
        if _references_output(c, outputs):
            sc.post.append(c)
            if isinstance(c, Filler) and c.path.muted:
                sc.mutations.append(c)
            elif isinstance(c, Filler) and c.path.head in outputs:
                sc.initializers.append(c)
            elif isinstance(c, Identification):
                sc.identifications.append(c)
        else:
            sc.pre.append(c)
    cache[name] = sc
    return sc


# path typing -----------------------------------------------------------------

class PathTyper:
    """Computes the declared type a path denotes, in schema or s-construction scope."""

    def __init__(self, h: TypeHierarchy, sconstructions: dict):
        self.h = h
        self.scs = sconstructions

    def start(self, path: RolePath, owner: str, sc: Optional[CompiledSConstruction]):
        """Return (declared type, remaining groups) for the path's starting instance."""
        groups = path.groups()
        if sc is None or path.is_self:
            return owner, groups
        if not groups:
            raise UnresolvedRolePath(f"empty path {path}")
        inherits, label = groups[0]
        if inherits:
            raise UnresolvedRolePath(f"{path}: a constituent label cannot carry an inheritance hop")
        if label in sc.constituents:
            return sc.constituents[label].type, groups[1:]
        ctype = sc.constructional_type(label)
        if ctype is not None:
            if len(groups) < 2:
                raise UnresolvedRolePath(f"{path}: constructional label needs a constituent")
            target = self.scs[ctype]
            inh, const = groups[1]
            if inh or const not in target.constituents:
                raise UnresolvedRolePath(f"{ctype} has no constituent {const!r}")
            return target.constituents[const].type, groups[2:]
        raise UnresolvedRolePath(f"{name_of(sc)} has no constituent or constructional label {label!r}")

    def type_of(self, path: RolePath, owner: str, sc=None):
        """(type name, final RoleDescriptor or None when the path denotes an instance)."""
        current, groups = self.start(path, owner, sc)
        desc = None
        for inherits, role in groups:
            if desc is not None:
                if desc.type_kind not in ("schema", "context"):
                    raise UnresolvedRolePath(f"{path}: cannot descend into atomic role {desc.name}")
                current = desc.type
            desc = self.h.resolve_group(current, inherits, role)
        if desc is None:
            return current, None
        return desc.type, desc


def name_of(sc):
    return sc.name if sc is not None else "schema"


# validation -----------------------------------------------------------------

def _find_cycle(defs_by_name):
    color = {}
    stack = []

    def visit(n):
        color[n] = 1
        stack.append(n)
        for p in defs_by_name[n].inherits:
            if p not in defs_by_name:
                continue
            if color.get(p) == 1:
                return stack[stack.index(p):]
            if color.get(p) is None:
                cyc = visit(p)
                if cyc:
                    return cyc
        stack.pop()
        color[n] = 2
        return None

    for n in sorted(defs_by_name):
        if color.get(n) is None:
            cyc = visit(n)
            if cyc:
                return cyc
    return None


def _literal_type_ok(h, declared, value):
    from .memory import check_value
    return check_value(h, declared, value, {})


class Validator:
    def __init__(self, defs):
        self.defs = list(defs)
        self.diags: list[Diagnostic] = []

    def report(self, code, message, node=None):
        line, col = _loc(node) if node is not None else (0, 0)
        self.diags.append(Diagnostic(code, message, line, col))

    def run(self) -> Optional[CompiledProgram]:
        by_name = {}
        for d in self.defs:
            if d.name in by_name or d.name in ATOMIC_TYPES:
                self.report("DuplicateDefinition", f"{d.name} is declared twice", d)
            by_name.setdefault(d.name, d)
        types = {n: d for n, d in by_name.items() if isinstance(d, Definition)}
        for d in types.values():
            for p in d.inherits:
                if p not in types:
                    self.report("UnknownType", f"{d.name} inherits from undeclared type {p}", d)
                    continue
                pk = types[p].kind
                ok = {"schema": ("schema",), "context": ("schema", "context"),
                      "s-construction": ("s-construction",)}[d.kind]
                if pk not in ok:
                    self.report("KindMismatch", f"{d.kind} {d.name} cannot inherit from {pk} {p}", d)
        cycle = _find_cycle(types)
        if cycle:
            self.report("InheritanceCycle", "inheritance cycle: " + " -> ".join(cycle + cycle[:1]),
                        types[cycle[0]])
            return None
        if self.diags:
            return None
        h = TypeHierarchy(self.defs)
        scs = {}
        for name in h.topological_order:
            if h.nodes[name].kind == "s-construction":
                compile_sconstruction(h, name, scs)
        self.h, self.scs = h, scs
        self.typer = PathTyper(h, scs)
        for d in types.values():
            self.check_roles(d)
            if d.kind == "context":
                self.check_context(d)
            if d.kind == "s-construction":
                self.check_sconstruction(d, scs[d.name])
            else:
                for c in d.constraints:
                    self.check_constraint(c, d.name, None)
        if self.diags:
            return None
        return CompiledProgram(self.defs, h, scs)

    # pieces
    def check_roles(self, d):
        h = self.h
        for r in d.roles:
            if not h.is_declared(r.type):
                self.report("UnknownType", f"role {d.name}.{r.name} has undeclared type {r.type}", r)
                continue
            if h.kind_of(r.type) == "s-construction":
                self.report("KindMismatch", f"role {d.name}.{r.name} cannot be typed by an s-construction", r)
            if r.situated_in:
                if h.kind_of(r.type) in ("atomic", "enum"):
                    self.report("KindMismatch",
                                f"atomic role {d.name}.{r.name} cannot be situated (@{r.situated_in})", r)
                    continue
                try:
                    target = h.resolve_group(d.name, (), r.situated_in)
                except ScimError as e:
                    self.report("UnresolvedRolePath", str(e), r)
                    continue
                if target.type_kind != "context":
                    self.report("KindMismatch", f"@{r.situated_in} on {d.name}.{r.name} is not a context role", r)

    def check_context(self, d):
        places = self.h.context_places(d.name)
        for p in d.places:
            if p not in PLACE_KINDS:
                self.report("PlaceKindMismatch", f"unknown place kind {p!r} in {d.name}", d)
        for sig in d.relations:
            for p in sig.params:
                if p not in places:
                    self.report("PlaceKindMismatch", f"relation {sig.name} of {d.name} uses undeclared place {p}", sig)
            if not self.h.is_declared(sig.result) or self.h.kind_of(sig.result) not in ("atomic", "enum"):
                self.report("UnknownType", f"relation {sig.name} must map to an atomic type, not {sig.result}", sig)
        for sig in d.operations:
            for p in sig.params + (sig.result,):
                if p not in places:
                    self.report("PlaceKindMismatch", f"operation {sig.name} of {d.name} uses undeclared place {p}", sig)

    def check_sconstruction(self, d, sc):
        h = self.h
        for label, t in sc.positive + sc.negative:
            if t not in h.nodes or h.nodes[t].kind != "s-construction":
                self.report("UnknownType", f"constructional {label} names {t}, not a declared s-construction", d)
        for label, c in sc.constituents.items():
            if c.type not in h.nodes:
                self.report("UnknownType", f"constituent {label} has undeclared type {c.type}", c)
                continue
            if h.nodes[c.type].kind == "s-construction":
                self.report("KindMismatch", f"constituent {label} cannot be an s-construction", c)
            if c.situated_in:
                ctx = sc.constituents.get(c.situated_in)
                if ctx is None or ctx.type not in h.nodes or not h.is_context(ctx.type):
                    self.report("UnresolvedRolePath",
                                f"@{c.situated_in} on constituent {label} must name a context constituent", c)
                elif c.direction == "O" and label not in sc.placements and not is_set(h, ctx.type):
                    self.report("PlaceKindMismatch",
                                f"output {label} is situated in {ctx.type} but no placement is given", c)
        for c in sc.constraints:
            self.check_constraint(c, d.name, sc)

    def path_type(self, path, owner, sc, node):
        try:
            return self.typer.type_of(path, owner, sc)
        except (UnresolvedRolePath, AmbiguousRole, UnknownType) as e:
            self.report(type(e).__name__, str(e), node)
            return None

    def check_constraint(self, c, owner, sc):
        h = self.h
        for p in iter_paths(c):
            if sc is not None and p.is_self:
                self.report("UnresolvedRolePath",
                            f"{p}: an s-construction's own roles have no instance to live on", c)
                return
            if p.muted:
                if sc is None:
                    self.report("ImmutableRole", f"muted reference {p} outside an s-construction", c)
                    continue
                res = self.path_type(p, owner, sc, c)
                if res and (res[1] is None or not res[1].mutable):
                    self.report("ImmutableRole", f"{p} does not end in a mutable role", c)
        if isinstance(c, BoolOp):
            if c.op == "NOT" and len(c.args) != 1:
                self.report("ArityMismatch", "NOT takes exactly one constraint", c)
            for a in c.args:
                if isinstance(a, Out):
                    self.report("KindMismatch", "OUT cannot appear inside a boolean operation", a)
                self.check_constraint(a, owner, sc)
        elif isinstance(c, Out):
            if sc is None:
                self.report("KindMismatch", "OUT is only allowed in s-constructions", c)
            elif c.label not in sc.constituents:
                self.report("UnresolvedRolePath", f"OUT names undeclared constituent {c.label}", c)
            elif sc.constituents[c.label].direction not in ("I", "IO"):
                self.report("KindMismatch", f"OUT names output constituent {c.label}", c)
            elif not sc.constituents[c.label].situated_in:
                self.report("KindMismatch", f"OUT names unsituated constituent {c.label}", c)
        elif isinstance(c, Filler):
            self.check_filler(c, owner, sc)
        elif isinstance(c, (Identification, Equality, Parent)):
            left, right = (c.child, c.parent) if isinstance(c, Parent) else (c.left, c.right)
            lt, rt = self.path_type(left, owner, sc, c), self.path_type(right, owner, sc, c)
            if isinstance(c, Identification) and c.function:
                if c.function not in FUNCTIONS:
                    self.report("UnknownPredicate", f"unknown function {c.function}", c)
                elif FUNCTIONS[c.function][0] not in (None, 1):
                    self.report("ArityMismatch", f"{c.function} is not unary", c)
            if isinstance(c, Parent):
                for t in (lt, rt):
                    if t and h.kind_of(t[0]) in ("atomic", "enum"):
                        self.report("KindMismatch", "parent constraint needs instance-valued operands", c)
        elif isinstance(c, Predicate):
            if c.name not in PREDICATES:
                self.report("UnknownPredicate", f"unknown predicate {c.name}", c)
            elif PREDICATES[c.name][0] != len(c.args):
                self.report("ArityMismatch", f"{c.name} takes {PREDICATES[c.name][0]} arguments, "
                                             f"got {len(c.args)}", c)
            for a in c.args:
                if isinstance(a, RolePath):
                    t = self.path_type(a, owner, sc, c)
                    if t and h.kind_of(t[0]) not in ("atomic", "enum"):
                        self.report("KindMismatch", f"predicate argument {a} is not atomic", c)
        elif isinstance(c, Relation):
            self.check_relation(c, owner, sc)

    def check_filler(self, c, owner, sc):
        h = self.h
        if sc is not None and c.path.head in sc.constituents and len(c.path.groups()) == 1 \
                and not c.path.muted and sc.constituents[c.path.head].direction == "O":
            # placement of an output constituent
            if isinstance(c.value, PlaceOp):
                self.check_place_expr(c.value, owner, sc, c)
            elif isinstance(c.value, RolePath):
                if c.value.head not in sc.constituents or len(c.value.groups()) != 1:
                    self.report("UnresolvedRolePath", f"placement of {c.path.head} must name a constituent", c)
            else:
                self.report("KindMismatch", f"placement of {c.path.head} must be a place", c)
            return
        t = self.path_type(c.path, owner, sc, c)
        if isinstance(c.value, Literal):
            if t and h.is_declared(t[0]) and not _literal_type_ok(h, t[0], c.value.value):
                self.report("TypeMismatch", f"{c.path} expects {t[0]}, got {c.value.value!r}", c)
        elif isinstance(c.value, FuncCall):
            f = FUNCTIONS.get(c.value.name)
            if f is None:
                self.report("UnknownPredicate", f"unknown function {c.value.name}", c)
            elif f[0] is not None and f[0] != len(c.value.args):
                self.report("ArityMismatch", f"{c.value.name} takes {f[0]} arguments", c)
            for a in c.value.args:
                if isinstance(a, RolePath):
                    self.path_type(a, owner, sc, c)
        elif isinstance(c.value, RolePath):
            self.path_type(c.value, owner, sc, c)
        elif isinstance(c.value, PlaceOp):
            self.report("KindMismatch", f"{c.path} is not an output constituent; cannot take a place", c)

    def _context_type(self, path, owner, sc, node):
        t = self.path_type(path, owner, sc, node)
        if t is None:
            return None
        if not self.h.is_context(t[0]):
            self.report("KindMismatch", f"{path} does not denote a context", node)
            return None
        return t[0]

    def check_place_expr(self, e, owner, sc, node):
        ctx_type = self._context_type(e.context, owner, sc, node)
        if ctx_type is None:
            return
        if not self.h.operation_signatures(ctx_type, e.name):
            self.report("UnknownOperation", f"{ctx_type} declares no operation {e.name}", node)
        elif all(len(s.params) != len(e.args) for s in self.h.operation_signatures(ctx_type, e.name)):
            self.report("ArityMismatch", f"operation {e.name} does not take {len(e.args)} places", node)
        for a in e.args:
            self.check_place_arg(a, e.context, owner, sc, node)

    def check_place_arg(self, a, ctx_path, owner, sc, node):
        if isinstance(a, PlaceOp):
            self.check_place_expr(a, owner, sc, node)
            return
        if sc is None:
            self.path_type(a, owner, sc, node)
            return
        label = a.head
        if label not in sc.constituents or len(a.groups()) != 1:
            self.report("UnresolvedRolePath", f"place argument {a} must be a constituent label", node)
            return
        situated = sc.constituents[label].situated_in
        if ctx_path.head is not None and len(ctx_path.groups()) == 1 and situated != ctx_path.head:
            self.report("PlaceKindMismatch", f"{label} is not situated in {ctx_path}", node)

    def check_relation(self, c, owner, sc):
        ctx_type = self._context_type(c.context, owner, sc, c)
        if ctx_type is None:
            return
        sigs = self.h.relation_signatures(ctx_type, c.name)
        if not sigs:
            self.report("UnknownRelation", f"{ctx_type} declares no relation {c.name}", c)
        elif all(len(s.params) != len(c.args) for s in sigs):
            self.report("ArityMismatch", f"relation {c.name} does not take {len(c.args)} places", c)
        for a in c.args:
            self.check_place_arg(a, c.context, owner, sc, c)


def diagnose(defs) -> list[Diagnostic]:
    v = Validator(defs)
    v.run()
    return v.diags


def validate(defs) -> CompiledProgram:
    """Check definitions and build the program; raise ValidationError on any diagnostic."""
    v = Validator(defs)
    program = v.run()
    if program is None:
        raise ValidationError(v.diags)
    return program


def load_program(*sources: str, prelude=True) -> CompiledProgram:
    """Parse and validate program text (the built-in context prelude is prepended)."""
    defs = parse_source(PRELUDE) if prelude else []
    for src in sources:
        defs.extend(parse_source(src))
    return validate(defs)


def load_files(paths, prelude=True) -> CompiledProgram:
    texts = []
    for p in paths:
        with open(p, encoding="utf-8") as f:
            texts.append(f.read())
    return load_program(*texts, prelude=prelude)

