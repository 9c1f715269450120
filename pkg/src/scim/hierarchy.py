"""Multiple-inheritance type hierarchy over schemas, contexts and s-constructions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

from .errors import AmbiguousRole, UnknownType, UnresolvedRolePath
from .nodes import Definition, EnumDef, RolePath, map_paths, rebase

ATOMIC_TYPES = ("Integer", "Float", "Boolean", "String")
PLACE_KINDS = ("point", "segment", "multi-segment", "line", "box", "disc")


@dataclass(frozen=True)
class RoleDescriptor:
    owner: str
    name: str
    type: str
    type_kind: str  # atomic | enum | schema | context | s-construction
    mutable: bool = False
    situated_in: Optional[str] = None
    # inheritance-qualified slot key on the querying type, e.g. ("Rectangle", "Figure", "color")
    key: tuple = ()
    # one key per hop group when returned by resolve_role_path
    access: tuple = ()

    @property
    def slot(self) -> str:
        return "*".join(self.key)


@dataclass
class TypeNode:
    kind: str
    name: str
    parents: tuple
    definition: Definition
    roles: dict = field(default_factory=dict)  # own roles: name -> RoleDecl


class TypeHierarchy:
    """Immutable once built; every query is read-only."""

    def __init__(self, defs):
        self.nodes: dict[str, TypeNode] = {}
        self.enums: dict[str, tuple] = {}
        for d in defs:
            if isinstance(d, EnumDef):
                self.enums[d.name] = d.members
                continue
            node = TypeNode(d.kind, d.name, tuple(d.inherits), d)
            node.roles = {r.name: r for r in d.roles}
            self.nodes[d.name] = node
        self._ancestors: dict[str, frozenset] = {}
        self._roles: dict[str, dict] = {}
        self._constraints: dict[str, list] = {}
        self._places: dict[str, tuple] = {}

    # basic lookups
    def __contains__(self, name):
        return name in self.nodes

    def require(self, name) -> TypeNode:
        try:
            return self.nodes[name]
        except KeyError:
            raise UnknownType(f"unknown type {name!r}") from None

    def kind_of(self, name: str) -> str:
        if name in ATOMIC_TYPES:
            return "atomic"
        if name in self.enums:
            return "enum"
        return self.require(name).kind

    def is_declared(self, name: str) -> bool:
        return name in ATOMIC_TYPES or name in self.enums or name in self.nodes

    def ancestors(self, name: str) -> frozenset:
        """Reflexive-transitive closure of the direct-parent relation."""
        if name not in self._ancestors:
            node = self.require(name)
            acc = {name}
            for p in node.parents:
                acc |= self.ancestors(p)
            self._ancestors[name] = frozenset(acc)
        return self._ancestors[name]

    def is_subtype(self, sub: str, sup: str) -> bool:
        if sub in ATOMIC_TYPES or sub in self.enums or sup in ATOMIC_TYPES or sup in self.enums:
            if not (self.is_declared(sub) and self.is_declared(sup)):
                raise UnknownType(f"unknown type {sub if not self.is_declared(sub) else sup!r}")
            return sub == sup or (sub == "Integer" and sup == "Float")
        self.require(sup)
        return sup in self.ancestors(sub)

    @cached_property
    def topological_order(self) -> list:
        order, seen = [], set()

        def visit(n):
            if n in seen:
                return
            seen.add(n)
            for p in self.nodes[n].parents:
                visit(p)
            order.append(n)

        for n in sorted(self.nodes):
            visit(n)
        return order

    def inheritance_paths(self, sub: str, sup: str) -> list:
        """All parent-hop sequences leading from ``sub`` up to ``sup`` (sorted)."""
        if sub == sup:
            return [()]
        out = []
        for p in self.require(sub).parents:
            for rest in self.inheritance_paths(p, sup):
                out.append((p,) + rest)
        return sorted(out)

    # roles
    def effective_roles(self, name: str) -> dict:
        """Own roles plus every parent's roles namespaced under ``Parent*``."""
        if name not in self._roles:
            node = self.require(name)
            table = {}
            for r in node.roles.values():
                table[(r.name,)] = self._descriptor(name, r, (r.name,))
            for p in node.parents:
                for key, desc in self.effective_roles(p).items():
                    table[(p,) + key] = replace(desc, key=(p,) + key)
            self._roles[name] = table
        return self._roles[name]

    def _descriptor(self, owner, decl, key):
        return RoleDescriptor(owner, decl.name, decl.type, self.kind_of(decl.type),
                              decl.mutable, decl.situated_in, key)

    def resolve_group(self, type_name: str, inherits: tuple, role: str) -> RoleDescriptor:
        table = self.effective_roles(type_name)
        if inherits:
            key = tuple(inherits) + (role,)
            if key not in table:
                raise UnresolvedRolePath(f"{type_name} has no role {'*'.join(key)}")
            return table[key]
        if (role,) in table:
            return table[(role,)]
        hits = [k for k in table if k[-1] == role]
        if not hits:
            raise UnresolvedRolePath(f"{type_name} has no role {role!r}")
        if len(hits) > 1:
            raise AmbiguousRole(f"role {role!r} of {type_name} is reachable via "
                                + ", ".join("*".join(k) for k in sorted(hits)))
        return table[hits[0]]

    def resolve_role_path(self, start: str, path) -> RoleDescriptor:
        """Walk ``path`` from type ``start`` and return the final role."""
        if not isinstance(path, RolePath):
            from .parser import Parser
            from .lexer import tokenize
            path = Parser(tokenize(path)).role_path()
        groups = path.groups()
        if not groups:
            raise UnresolvedRolePath(f"path {path} names no role")
        current = start
        access = []
        desc = None
        for inherits, role in groups:
            if desc is not None:
                if desc.type_kind not in ("schema", "context"):
                    raise UnresolvedRolePath(
                        f"cannot descend into atomic role {desc.name!r} ({desc.type})")
                current = desc.type
            desc = self.resolve_group(current, inherits, role)
            access.append(desc.key)
        return replace(desc, access=tuple(access))

    def slot_prefix(self, actual: str, declared: str) -> tuple:
        """Parent hops from an instance's actual type up to a declared supertype.

        With several inheritance paths the lexicographically first is used.
        """
        paths = self.inheritance_paths(actual, declared)
        if not paths:
            raise UnresolvedRolePath(f"{actual} is not a subtype of {declared}")
        return paths[0]

    # constraints
    def effective_constraints(self, name: str) -> list:
        """Ancestors' constraints rebased through each inheritance path, then own."""
        if name not in self._constraints:
            node = self.require(name)
            out = []
            for p in node.parents:
                for c in self.effective_constraints(p):
                    out.append(map_paths(c, lambda path, p=p: rebase(path, p)))
            out.extend(node.definition.constraints)
            self._constraints[name] = out
        return list(self._constraints[name])

    # contexts
    def context_places(self, name: str) -> tuple:
        if name not in self._places:
            node = self.require(name)
            acc = []
            for p in node.parents:
                for k in self.context_places(p):
                    if k not in acc:
                        acc.append(k)
            for k in node.definition.places:
                if k not in acc:
                    acc.append(k)
            self._places[name] = tuple(acc)
        return self._places[name]

    def _signatures(self, name, block):
        node = self.require(name)
        out = []
        for p in node.parents:
            out.extend(s for s in self._signatures(p, block) if s not in out)
        out.extend(s for s in getattr(node.definition, block) if s not in out)
        return out

    def relation_signatures(self, ctx: str, rel: str) -> list:
        return [s for s in self._signatures(ctx, "relations") if s.name == rel]

    def operation_signatures(self, ctx: str, op: str) -> list:
        return [s for s in self._signatures(ctx, "operations") if s.name == op]

    def is_context(self, name: str) -> bool:
        return name in self.nodes and self.nodes[name].kind == "context"


def build_hierarchy(defs) -> TypeHierarchy:
    return TypeHierarchy(defs)


def is_subtype(h: TypeHierarchy, sub: str, sup: str) -> bool:
    if sub not in h.nodes and not h.is_declared(sub):
        raise UnknownType(f"unknown type {sub!r}")
    return h.is_subtype(sub, sup)


def resolve_role_path(h: TypeHierarchy, start: str, path) -> RoleDescriptor:
    h.require(start)
    return h.resolve_role_path(start, path)


def effective_constraints(h: TypeHierarchy, name: str) -> list:
    return h.effective_constraints(name)
