"""Seeded random programs and states for checking the matcher against brute force."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .engine import enumerate_matches, oracle_matches
from .memory import (BranchState, Firing, Ref, create_instance, record_firing, remove_situated,
                     situate)
from .places import Point
from .program import load_program

BASE = """\
schema T0
roles
  a: Integer
  b: String
  ?c: Integer
  link: T0

schema T1
inherits T0
roles
  d: Integer

schema T2
roles
  a: Integer
  ?c: Integer
  link: T0

context Ctx
inherits LinearContext
"""

TYPES = ("T0", "T1", "T2")
STRINGS = ("x", "y")


@dataclass
class Case:
    seed: int
    source: str
    program: object
    state: BranchState


def _path_role(rng, label, type_name, kind="int"):
    if kind == "str":
        return f"{label}.b" if type_name != "T2" else None
    return f"{label}.{rng.choice(['a', 'c'])}"


def _constraint(rng, labels, types, placed, prior):
    x = rng.choice(labels)
    y = rng.choice(labels)
    roll = rng.random()
    if roll < 0.2:
        return f"{x}.a <- {rng.randint(0, 2)}"
    if roll < 0.35:
        return f"{rng.choice(['lt', 'le', 'neq', 'eq'])}({_path_role(rng, x, types[x])}, " \
               f"{_path_role(rng, y, types[y])})"
    if roll < 0.5:
        return f"{x}.a <-> {y}.a"
    if roll < 0.58:
        return f"{x}.link = {y}.link"
    if roll < 0.66 and types[x] != "T2" and types[y] != "T2":
        return f"{x}.b <-> upper({y}.b)" if rng.random() < 0.3 else f"{x}.link <-> {y}.link"
    if roll < 0.76 and len(placed) > 1:
        u, v = rng.sample(sorted(placed), 2)
        return f"ctx.{rng.choice(['before', 'meets', 'overlaps'])}({u}, {v})"
    if roll < 0.84 and x != y:
        return f"{x} C {y}"
    if roll < 0.92:
        inner = [_constraint(rng, labels, types, placed, prior) for _ in range(rng.randint(1, 2))]
        op = rng.choice(["OR", "NOT", "NAND", "AND"])
        if op == "NOT":
            inner = inner[:1]
        if any(i.startswith(("OUT", "pc.", "nc.")) for i in inner):
            return f"{x}.a <- 1"
        return f"{op}({', '.join(inner)})"
    if prior:
        return f"eq(pc.k0.a, {x}.a)" if rng.random() < 0.5 else f"{x}.a <- 0"
    return f"{x}.c <- {rng.randint(0, 2)}"


def random_sconstruction(rng, name, prior=None, outputs=False):
    """Source text of one random s-construction (``prior`` names one it may require)."""
    n = rng.randint(1, 3)
    situated = rng.random() < 0.5
    labels = [f"k{i}" for i in range(n)]
    types = {l: rng.choice(TYPES) for l in labels}
    lines = [f"s-construction {name}"]
    if outputs and rng.random() < 0.3:
        lines.append(f"confidence {rng.choice(['0.5', '0.9', '1.0'])}")
    constructional = []
    use_prior = prior and rng.random() < 0.4
    if use_prior:
        constructional.append(f"  pc: {prior}")
        if rng.random() < 0.3:
            constructional.append(f"  not nc: {prior}")
    elif prior and rng.random() < 0.2:
        constructional.append(f"  not nc: {prior}")
    if constructional:
        lines.append("constructional")
        lines.extend(constructional)
    lines.append("constituents")
    if situated:
        lines.append("  ctx: Ctx /I")
    placed = set()
    for l in labels:
        at = situated and rng.random() < 0.7
        if at:
            placed.add(l)
        direction = "/IO" if outputs and rng.random() < 0.3 else "/I"
        lines.append(f"  {l}: {types[l]}{' @ctx' if at else ''} {direction}")
    body = [_constraint(rng, labels, types, placed, use_prior)
            for _ in range(rng.randint(0, 3))]
    if outputs:
        on_ctx = situated and rng.random() < 0.6
        lines.append(f"  out: {rng.choice(TYPES)}{' @ctx' if on_ctx else ''} /O")
        ends = [l for l in labels if l in placed]
        if on_ctx and ends:
            body.append(f"out <- ctx.span({ends[0]}, {ends[-1]})")
        elif on_ctx:
            lines[-1] = lines[-1].replace(" @ctx", "")
        body.append(f"out.a <- {labels[0]}.a" if rng.random() < 0.5 else f"out.a <- {rng.randint(0, 3)}")
        if rng.random() < 0.5:
            body.append(f"?{labels[0]}.c <- {rng.randint(0, 3)}")
        if rng.random() < 0.3:
            body.append(f"neq(out.a, {rng.randint(0, 3)})")
        if ends and rng.random() < 0.3:
            body.append(f"OUT({ends[0]})")
    body = [c for c in body if c]
    if body:
        lines.append("constraints")
        lines.extend(f"  {c}" for c in body)
    return "\n".join(lines) + "\n"


def random_source(rng, n_rules=2, outputs=False) -> str:
    parts = [BASE]
    for i in range(n_rules):
        parts.append(random_sconstruction(rng, f"r{i}", prior="r0" if i else None, outputs=outputs))
    return "\n".join(parts)


def _fill(rng, type_name, existing):
    f = {}
    if rng.random() < 0.8:
        f["a"] = rng.randint(0, 2)
    if rng.random() < 0.5:
        f["c"] = rng.randint(0, 2)
    if type_name != "T2" and rng.random() < 0.7:
        f["b"] = rng.choice(STRINGS + ("X",))
    if type_name == "T1" and rng.random() < 0.5:
        f["d"] = rng.randint(0, 2)
    links = [i for i, t in existing if t in ("T0", "T1")]
    if links and rng.random() < 0.5:
        f["link"] = Ref(rng.choice(links))
    return f


def random_state(rng, program, max_instances=8) -> BranchState:
    """At most ``max_instances`` instances, some situated, some removed, a fake firing log."""
    b = BranchState(program.hierarchy)
    create_instance(b, "Ctx", instance_id="ctx0")
    existing = []
    for i in range(rng.randint(0, max_instances - 1)):
        t = rng.choice(TYPES)
        parents = [p for p, _ in existing if rng.random() < 0.25]
        iid = create_instance(b, t, _fill(rng, t, existing), parents, instance_id=f"n{i}")
        existing.append((iid, t))
        if rng.random() < 0.6:
            lo = rng.randint(0, 5)
            situate(b, iid, "ctx0", Point(lo))
            if rng.random() < 0.15:
                remove_situated(b, iid, "ctx0")
    names = sorted(program.sconstructions)
    for k in range(rng.randint(0, 2)):
        if not existing or not names:
            break
        created = tuple(sorted({rng.choice(existing)[0] for _ in range(rng.randint(1, 2))}))
        record_firing(b, Firing(rng.choice(names), (), (), b.tick(), created, b.id))
    return b


def random_case(seed: int, max_instances=8) -> Case:
    rng = random.Random(seed)
    while True:
        src = random_source(rng, rng.randint(1, 3))
        try:
            program = load_program(src)
        except Exception:
            continue  # regenerate: random text may be ill-typed
        return Case(seed, src, program, random_state(rng, program, max_instances))


def check_case(case: Case):
    """(ok, details) comparing the indexed matcher with brute force for every rule."""
    bad = []
    for name in sorted(case.program.sconstructions):
        sc = case.program.sconstructions[name]
        fast = {e.canonical() for e in enumerate_matches(case.state, case.program, sc)}
        slow = {e.canonical() for e in oracle_matches(case.state, case.program, sc)}
        if fast != slow:
            bad.append((name, sorted(fast - slow), sorted(slow - fast)))
    return not bad, bad


def run_oracle(seed: int, cases: int = 50):
    """Check ``cases`` consecutive seeds starting at ``seed``; returns (passed, failures)."""
    passed, failures = 0, []
    for k in range(cases):
        case = random_case(seed + k)
        ok, bad = check_case(case)
        if ok:
            passed += 1
        else:
            failures.append((case.seed, bad))
    return passed, failures
