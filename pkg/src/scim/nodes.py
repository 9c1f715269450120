"""Syntax tree for parsed programs.

Every node is a frozen dataclass; source locations are carried but excluded
from equality so that pretty-print/re-parse round trips compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

Loc = tuple  # (line, column)


def _loc():
    return field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class RolePath:
    """A role access path.

    ``segments`` holds ``(kind, name)`` pairs where kind is one of ``self``,
    ``inherit`` (written ``Parent*``), ``role`` (the first named role or
    constituent) and ``sub`` (written ``.role``).
    """

    segments: tuple
    muted: bool = False
    loc: Loc = _loc()

    @property
    def head(self) -> Optional[str]:
        for kind, name in self.segments:
            if kind == "inherit":
                return None
            if kind == "role":
                return name
        return None

    @property
    def is_self(self) -> bool:
        return bool(self.segments) and self.segments[0][0] == "self"

    def groups(self):
        """Split into hop groups: ``[(inherit_names, role_name), ...]``."""
        out, pending = [], []
        for kind, name in self.segments:
            if kind == "self":
                continue
            if kind == "inherit":
                pending.append(name)
            else:
                out.append((tuple(pending), name))
                pending = []
        return out

    def __str__(self):
        out = "?" if self.muted else ""
        prev = None
        for kind, name in self.segments:
            if kind == "self":
                out += "self"
            elif kind == "inherit":
                out += ("." if prev in ("self", "role", "sub") else "") + name + "*"
            elif kind == "role":
                out += ("." if prev == "self" else "") + name
            else:
                out += ("" if prev == "inherit" else ".") + name
            prev = kind
        return out


@dataclass(frozen=True)
class Literal:
    value: object
    loc: Loc = _loc()


@dataclass(frozen=True)
class FuncCall:
    """A registry function applied to atomic values (filler right-hand sides)."""

    name: str
    args: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class PlaceOp:
    """``ctx.op(place, ...)``: a context operation producing a place."""

    context: RolePath
    name: str
    args: tuple
    loc: Loc = _loc()


Value = Union[Literal, FuncCall, RolePath, PlaceOp]


@dataclass(frozen=True)
class BoolOp:
    op: str  # AND | OR | NOT | NAND
    args: tuple
    loc: Loc = _loc()
    form = "boolean-op"


@dataclass(frozen=True)
class Filler:
    path: RolePath
    value: Value
    loc: Loc = _loc()
    form = "filler"


@dataclass(frozen=True)
class Identification:
    left: RolePath
    right: RolePath
    function: Optional[str] = None
    loc: Loc = _loc()
    form = "identification"


@dataclass(frozen=True)
class Equality:
    left: RolePath
    right: RolePath
    loc: Loc = _loc()
    form = "equality"


@dataclass(frozen=True)
class Predicate:
    name: str
    args: tuple  # RolePath | Literal
    loc: Loc = _loc()
    form = "predicate"


@dataclass(frozen=True)
class Relation:
    context: RolePath
    name: str
    args: tuple  # RolePath (constituent label) | PlaceOp
    loc: Loc = _loc()
    form = "context-relation"


@dataclass(frozen=True)
class Parent:
    """``child C parent``: the right-hand side must be an ancestor."""

    child: RolePath
    parent: RolePath
    loc: Loc = _loc()
    form = "parent"


@dataclass(frozen=True)
class Out:
    label: str
    loc: Loc = _loc()
    form = "out"


Constraint = Union[BoolOp, Filler, Identification, Equality, Predicate, Relation, Parent, Out]


@dataclass(frozen=True)
class RoleDecl:
    name: str
    type: str
    mutable: bool = False
    situated_in: Optional[str] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class ConstituentDecl:
    label: str
    type: str
    direction: str  # I | O | IO
    situated_in: Optional[str] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class ConstructionalDecl:
    label: str
    type: str
    negative: bool = False
    loc: Loc = _loc()


@dataclass(frozen=True)
class Signature:
    name: str
    params: tuple
    result: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class Definition:
    kind: str  # schema | context | s-construction
    name: str
    inherits: tuple = ()
    roles: tuple = ()
    constraints: tuple = ()
    places: tuple = ()
    relations: tuple = ()
    operations: tuple = ()
    constructional: tuple = ()
    constituents: tuple = ()
    confidence: Optional[float] = None
    blocks: tuple = ()  # names of the blocks present, in source order
    loc: Loc = _loc()


@dataclass(frozen=True)
class EnumDef:
    name: str
    members: tuple
    loc: Loc = _loc()
    kind = "enum"


def iter_paths(node):
    """Yield every RolePath reachable inside a constraint or value."""
    if isinstance(node, RolePath):
        yield node
    elif isinstance(node, (BoolOp,)):
        for a in node.args:
            yield from iter_paths(a)
    elif isinstance(node, Filler):
        yield node.path
        yield from iter_paths(node.value)
    elif isinstance(node, (Identification, Equality)):
        yield node.left
        yield node.right
    elif isinstance(node, Parent):
        yield node.child
        yield node.parent
    elif isinstance(node, (Predicate, FuncCall)):
        for a in node.args:
            yield from iter_paths(a)
    elif isinstance(node, (Relation, PlaceOp)):
        yield node.context
        for a in node.args:
            yield from iter_paths(a)


def map_paths(node, fn):
    """Return a copy of ``node`` with every RolePath replaced by ``fn(path)``."""
    if isinstance(node, RolePath):
        return fn(node)
    if isinstance(node, (Literal, Out)) or node is None:
        return node
    if isinstance(node, BoolOp):
        return replace(node, args=tuple(map_paths(a, fn) for a in node.args))
    if isinstance(node, Filler):
        return replace(node, path=fn(node.path), value=map_paths(node.value, fn))
    if isinstance(node, (Identification, Equality)):
        return replace(node, left=fn(node.left), right=fn(node.right))
    if isinstance(node, Parent):
        return replace(node, child=fn(node.child), parent=fn(node.parent))
    if isinstance(node, (Predicate, FuncCall)):
        return replace(node, args=tuple(map_paths(a, fn) for a in node.args))
    if isinstance(node, (Relation, PlaceOp)):
        return replace(node, context=fn(node.context),
                       args=tuple(map_paths(a, fn) for a in node.args))
    raise TypeError(f"unexpected node {node!r}")


def rebase(path: RolePath, parent: str) -> RolePath:
    """Prefix ``parent*`` to a schema-relative path (bare ``self`` is kept)."""
    segs = path.segments
    if segs and segs[0][0] == "self":
        if len(segs) == 1:
            return path
        return replace(path, segments=(segs[0], ("inherit", parent)) + segs[1:])
    return replace(path, segments=(("inherit", parent),) + segs)
