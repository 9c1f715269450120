"""End-to-end interpretation of a command utterance against a scene."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Optional

from ..engine import SearchConfig, run, trace
from ..errors import EmptyCandidateSet, NoInterpretation
from ..memory import BranchState, Ref, create_instance, situate
from ..places import Point
from ..program import CompiledProgram, load_program
from .resolution import build_resolution_context, region_of, resolve_referents, scene_box
from .scene import load_scene, scene_objects
from .utterance import MEANING_ID, lay_out_utterance

TOP_K = 2  # referent candidates kept per command


@dataclass(frozen=True)
class Interpretation:
    verb: str
    referent: Optional[str]
    goal: Optional[str]
    score: float
    branch: str

    def line(self, rank: int) -> str:
        return f"{rank} {self.score:.4f} {self.verb} {self.referent or '-'} {self.goal or '-'}"


def data_text(name: str) -> str:
    return resources.files("scim.scenarios").joinpath("data", name).read_text(encoding="utf-8")


def demo_program() -> CompiledProgram:
    return load_program(data_text("demo.scim"))


def count_program() -> CompiledProgram:
    return load_program(data_text("count.scim"))


def initial_state(program, scene_text: str, utterance: str) -> BranchState:
    b = load_scene(scene_text, program)
    lay_out_utterance(utterance, b)
    return b


def _commands(b: BranchState):
    h = b.h
    for s in b.present_in(MEANING_ID):
        inst = b.instance(s.instance)
        if h.is_subtype(inst.type, "CauseMotion"):
            yield inst


def _with_referents(b: BranchState, cmd, neighborhood=True) -> list:
    """Fork ``b`` once per top-ranked candidate referent of ``cmd``'s theme."""
    theme = cmd.fillers["theme"].id
    preds = b.instance(theme).fillers["preds"].split()
    work = b.copy()
    rc = build_resolution_context(work, rc_id=f"rc-{cmd.id}")
    try:
        ranked = resolve_referents(work, rc, preds, neighborhood)
    except EmptyCandidateSet:
        return []
    objects = {o.id: o for o in scene_objects(b)}
    box = scene_box(list(objects.values()))
    out = []
    for r in ranked[:TOP_K]:
        child = work.copy(f"{b.id}-{r.object}")
        rid = f"ref-{cmd.id}-{r.object}"
        create_instance(child, "Referent",
                        {"refexp": Ref(theme), "object": Ref(r.object),
                         "region": region_of(objects[r.object], box)},
                        parents=[theme, r.object, r.wrapper], capacity=1.0, trust=r.trust,
                        instance_id=rid)
        situate(child, rid, MEANING_ID, Point(float(len(child.entries(MEANING_ID)))))
        out.append(child)
    return out


def _read_request(b: BranchState):
    h = b.h
    for inst in sorted(b.instances.values(), key=lambda i: i.id):
        if not h.is_subtype(inst.type, "Request"):
            continue
        cmd = b.instance(inst.fillers["command"].id)
        ref = b.instance(inst.fillers["referent"].id)
        f = cmd.fillers
        return (f.get("verb"), ref.fillers["object"].id, f.get("SourcePathGoal*goal"))
    return None


def interpret_state(program: CompiledProgram, b: BranchState, cfg: SearchConfig = None,
                    neighborhood=True, traces: Optional[list] = None) -> list:
    """Parse, resolve referents, then link them; ``traces`` collects each engine run."""
    cfg = cfg or SearchConfig()
    cfg = SearchConfig(cfg.beam_width, cfg.max_firings, cfg.score_floor, cfg.cost_per_firing,
                       cfg.halt_on_type or "Request")
    parses = run(program, b, cfg)
    if traces is not None:
        traces.append({"phase": "parse", "start": b.id, **trace(parses, cfg)})
    best = {}
    for parse in parses:
        for cmd in list(_commands(parse)):
            for start in _with_referents(parse, cmd, neighborhood):
                forest = run(program, start, cfg)
                if traces is not None:
                    traces.append({"phase": "link", "start": start.id, **trace(forest, cfg)})
                for br in forest:
                    found = _read_request(br)
                    if found is None:
                        continue
                    verb, referent, goal = found
                    cur = Interpretation(verb, referent, goal, round(br.score, 10), br.id)
                    key = (verb, referent, goal)
                    if key not in best or (-cur.score, cur.branch) < (-best[key].score, best[key].branch):
                        best[key] = cur
    if not best:
        raise NoInterpretation("no branch produced a valid Request")
    return sorted(best.values(), key=lambda i: (-i.score, i.verb, i.referent or "", i.branch))


def interpret(program: CompiledProgram, scene_text: str, utterance: str,
              cfg: SearchConfig = None, neighborhood=True) -> list:
    """Ranked interpretations (best first); raises NoInterpretation when none survive."""
    return interpret_state(program, initial_state(program, scene_text, utterance), cfg, neighborhood)
