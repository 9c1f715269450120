"""Command-line entry point: ``scim check | run | oracle``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .engine import SearchConfig, run, trace
from .errors import NoInterpretation, ScimError, ValidationError
from .memory import BranchState, load_state
from .program import diagnose, load_files
from .parser import parse_source
from .contexts import PRELUDE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scim", description="Situated construction grammar interpreter")
    sub = ap.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="parse and validate grammar files")
    check.add_argument("grammars", nargs="+")

    r = sub.add_parser("run", help="interpret an utterance or run the engine on a state")
    r.add_argument("grammars", nargs="+")
    r.add_argument("--scene")
    r.add_argument("--utterance")
    r.add_argument("--state", help="JSON file with initial instances and situations")
    r.add_argument("--beam-width", type=int, default=8)
    r.add_argument("--max-firings", type=int, default=200)
    r.add_argument("--halt-on-type")
    r.add_argument("--trace", help="write the JSON trace here")
    r.add_argument("--no-neighborhood", action="store_true",
                   help="compare sizes only among surviving candidates")

    o = sub.add_parser("oracle", help="compare the matcher with brute force on random cases")
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--cases", type=int, default=50)
    return ap


def _err(msg):
    print(msg, file=sys.stderr)


def cmd_check(args) -> int:
    defs = parse_source(PRELUDE)
    for path in args.grammars:
        with open(path, encoding="utf-8") as f:
            defs.extend(parse_source(f.read()))
    diags = diagnose(defs)
    for d in diags:
        _err(str(d))
    if diags:
        return 1
    print(f"ok: {len(args.grammars)} file(s), {len(defs)} definitions")
    return 0


def _write_trace(path, doc):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def cmd_run(args) -> int:
    from .scenarios.interpret import interpret_state, initial_state

    if (args.scene is None) != (args.utterance is None):
        _err("run: --scene and --utterance must be given together")
        return 2
    try:
        cfg = SearchConfig(args.beam_width, args.max_firings, halt_on_type=args.halt_on_type)
    except ValueError as e:
        _err(f"run: {e}")
        return 2
    program = load_files(args.grammars)
    if args.scene is not None:
        with open(args.scene, encoding="utf-8") as f:
            scene_text = f.read()
        b = initial_state(program, scene_text, args.utterance)
        runs = []
        try:
            found = interpret_state(program, b, cfg, not args.no_neighborhood, runs)
        except NoInterpretation as e:
            if args.trace:
                _write_trace(args.trace, {"config": cfg.to_json(), "runs": runs,
                                          "interpretations": []})
            _err(f"no interpretation: {e}")
            return 1
        for rank, interp in enumerate(found, 1):
            print(interp.line(rank))
        if args.trace:
            _write_trace(args.trace, {"config": cfg.to_json(), "runs": runs,
                                      "interpretations": [i.__dict__ for i in found]})
        return 0
    if args.state:
        with open(args.state, encoding="utf-8") as f:
            b = load_state(json.load(f), program.hierarchy)
    else:
        b = BranchState(program.hierarchy)
    forest = run(program, b, cfg)
    for rank, br in enumerate(forest, 1):
        names = ",".join(f.construction for f in br.firings) or "-"
        flag = " incomplete" if br.incomplete else ""
        print(f"{rank} {br.score:.4f} {br.id} {names}{flag}")
    if args.trace:
        _write_trace(args.trace, trace(forest, cfg))
    return 0


def cmd_oracle(args) -> int:
    from .oracle import run_oracle

    if args.cases < 1:
        _err("oracle: --cases must be positive")
        return 2
    passed, failures = run_oracle(args.seed, args.cases)
    print(f"{passed}/{args.cases} pass")
    for seed, bad in failures:
        _err(f"seed {seed}: mismatch in {', '.join(name for name, *_ in bad)}")
    return 0 if not failures else 1


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return {"check": cmd_check, "run": cmd_run, "oracle": cmd_oracle}[args.command](args)
    except ValidationError as e:
        for d in e.diagnostics:
            _err(str(d))
        return 1
    except (ScimError, OSError, ValueError, KeyError) as e:
        _err(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
