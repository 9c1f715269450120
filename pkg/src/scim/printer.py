"""Pretty-printer emitting concrete syntax that re-parses to the same tree."""

from __future__ import annotations

import json

from .nodes import (BoolOp, Definition, EnumDef, Equality, Filler, FuncCall,
                    Identification, Literal, Out, Parent, PlaceOp, Predicate,
                    Relation, RolePath)


def format_literal(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    return repr(value)


def format_value(v):
    if isinstance(v, Literal):
        return format_literal(v.value)
    if isinstance(v, RolePath):
        return str(v)
    if isinstance(v, FuncCall):
        return f"{v.name}({', '.join(format_value(a) for a in v.args)})"
    if isinstance(v, PlaceOp):
        return f"{v.context}.{v.name}({', '.join(format_value(a) for a in v.args)})"
    raise TypeError(f"not a value: {v!r}")


def format_constraint(c) -> str:
    if isinstance(c, BoolOp):
        return f"{c.op}({', '.join(format_constraint(a) for a in c.args)})"
    if isinstance(c, Filler):
        return f"{c.path} <- {format_value(c.value)}"
    if isinstance(c, Identification):
        right = f"{c.function}({c.right})" if c.function else str(c.right)
        return f"{c.left} <-> {right}"
    if isinstance(c, Equality):
        return f"{c.left} = {c.right}"
    if isinstance(c, Predicate):
        return f"{c.name}({', '.join(format_value(a) for a in c.args)})"
    if isinstance(c, Relation):
        return f"{c.context}.{c.name}({', '.join(format_value(a) for a in c.args)})"
    if isinstance(c, Parent):
        return f"{c.child} C {c.parent}"
    if isinstance(c, Out):
        return f"OUT({c.label})"
    raise TypeError(f"not a constraint: {c!r}")


def format_definition(d) -> str:
    if isinstance(d, EnumDef):
        return f"enum {d.name} {{ {', '.join(d.members)} }}\n"
    assert isinstance(d, Definition)
    header = f"{d.kind} {d.name}"
    if d.confidence is not None:
        header += f" confidence {d.confidence!r}"
    lines = [header]
    for block in d.blocks:
        lines.append(block)
        if block == "inherits":
            lines[-1] = "inherits " + ", ".join(d.inherits)
        elif block == "roles":
            for r in d.roles:
                s = ("?" if r.mutable else "") + f"{r.name}: {r.type}"
                if r.situated_in:
                    s += f" @{r.situated_in}"
                lines.append("  " + s)
        elif block == "constraints":
            lines.extend("  " + format_constraint(c) for c in d.constraints)
        elif block == "places":
            lines.extend("  " + p for p in d.places)
        elif block in ("relations", "operations"):
            for sig in getattr(d, block):
                lines.append(f"  {sig.name}({', '.join(sig.params)}) |-> {sig.result}")
        elif block == "constructional":
            for c in d.constructional:
                lines.append(f"  {'not ' if c.negative else ''}{c.label}: {c.type}")
        elif block == "constituents":
            for c in d.constituents:
                s = f"{c.label}: {c.type}"
                if c.situated_in:
                    s += f" @{c.situated_in}"
                lines.append(f"  {s} /{c.direction}")
    return "\n".join(lines) + "\n"


def format_program(defs) -> str:
    return "\n".join(format_definition(d) for d in defs)
