import json

import pytest

from scim.constraints import is_ancestor
from scim.engine import (SearchConfig, dump_trace, enumerate_matches, fire, oracle_matches, run,
                         score)
from scim.errors import PostConstraintViolated
from scim.memory import BranchState, Ref, create_instance, load_state, situate
from scim.oracle import check_case, random_case
from scim.places import Point
from scim.program import load_program
from scim.scenarios.interpret import _commands, data_text, initial_state
from scim.scenarios.utterance import MEANING_ID

import stress

MAKE_SRC = """\
schema Seed
roles
  n: Integer

schema Made
roles
  n: Integer

context Pool
inherits SetContext

s-construction make
constituents
  s: Seed /I
  o: Made /O
constraints
  o.n <- s.n
  neq(o.n, 13)
"""

COUNTER_SRC = """\
schema Counter
roles
  ?n: Integer

schema Note
roles
  n: Integer

s-construction bump
constituents
  c: Counter /IO
constraints
  lt(c.n, 2)
  ?c.n <- succ(c.n)

s-construction watch
constituents
  c: Counter /I
  o: Note /O
constraints
  o.n <- c.n
"""


@pytest.fixture(scope="module")
def make():
    return load_program(MAKE_SRC)


@pytest.fixture(scope="module")
def counter():
    return load_program(COUNTER_SRC)


def count_state(counting):
    return load_state(json.loads(data_text("count_state.json")), counting.hierarchy)


class TestMatching:
    def test_empty_memory(self, make):
        b = BranchState(make.hierarchy)
        sc = make.sconstructions["make"]
        assert enumerate_matches(b, make, sc) == []
        assert oracle_matches(b, make, sc) == []

    def test_start_rule_single_binding(self, counting):
        b = count_state(counting)
        envs = enumerate_matches(b, counting, counting.sconstructions["start-rule"])
        assert [e.constituents for e in envs] == [{"buf": "buf", "g": "goal"}]

    def test_single_constituent_subset(self, make):
        b = BranchState(make.hierarchy)
        for n in (1, 13, 2):
            create_instance(b, "Seed", {"n": n}, instance_id=f"s{n}")
        create_instance(b, "Made", {"n": 5})
        sc = make.sconstructions["make"]
        fast = [e.constituents["s"] for e in enumerate_matches(b, make, sc)]
        assert fast == ["s1", "s13", "s2"]  # neq on the output is a post constraint
        assert {e.canonical() for e in oracle_matches(b, make, sc)} == \
            {e.canonical() for e in enumerate_matches(b, make, sc)}

    def test_two_referents_two_bindings(self, demo):
        scene = data_text("sit2.scene")
        parse = run(demo, initial_state(demo, scene, "remove the small red square on the left"))[0]
        cmd = next(_commands(parse))
        theme = cmd.fillers["theme"].id
        for k, obj in enumerate(["mid", "right"]):
            rid = create_instance(parse, "Referent",
                                  {"refexp": Ref(theme), "object": Ref(obj), "region": "center"},
                                  instance_id=f"ref{k}")
            situate(parse, rid, MEANING_ID, Point(10.0 + k))
        envs = enumerate_matches(parse, demo, demo.sconstructions["CxImperative"])
        assert sorted(e.constituents["ref"] for e in envs) == ["ref0", "ref1"]

    @pytest.mark.parametrize("seed", range(50))
    def test_oracle_equivalence(self, seed):
        ok, bad = check_case(random_case(seed))
        assert ok, bad


class TestFire:
    def test_counting_first_firing(self, counting):
        b = count_state(counting)
        sc = counting.sconstructions["start-rule"]
        env = enumerate_matches(b, counting, sc)[0]
        f = fire(b, counting, sc, env)
        assert b.instance("goal").fillers["step"] == "counting"
        req = b.instance(f.created[0])
        assert req.type == "Retrieval" and req.fillers["first"] == 2
        assert set(req.parents) == {"buf", "goal"}

    def test_post_violation_rolls_back(self, make):
        b = BranchState(make.hierarchy)
        create_instance(b, "Seed", {"n": 13}, instance_id="s")
        sc = make.sconstructions["make"]
        env = enumerate_matches(b, make, sc)[0]
        before = json.dumps(b.to_json(include_dead=False))
        with pytest.raises(PostConstraintViolated):
            fire(b, make, sc, env)
        assert json.dumps(b.to_json(include_dead=False)) == before
        assert [d["construction"] for d in b.dead] == ["make"]
        assert not any(i.type == "Made" for i in b.instances.values())

    def test_out_removes_from_matching(self, counting):
        b = count_state(counting)
        for name in ("start-rule", "count-rule"):
            sc = counting.sconstructions[name]
            f = fire(b, counting, sc, enumerate_matches(b, counting, sc)[0])
        old_req = dict(f.binding)["req"]
        envs = enumerate_matches(b, counting, counting.sconstructions["count-rule"])
        assert all(e.constituents["req"] != old_req for e in envs)

    def test_refractory_and_rearm(self, counter):
        b = BranchState(counter.hierarchy)
        create_instance(b, "Counter", {"n": 0}, instance_id="c")
        watch, bump = counter.sconstructions["watch"], counter.sconstructions["bump"]
        fire(b, counter, watch, enumerate_matches(b, counter, watch)[0])
        assert enumerate_matches(b, counter, watch) == []
        fire(b, counter, bump, enumerate_matches(b, counter, bump)[0])
        assert b.instance("c").fillers["n"] == 1
        assert len(enumerate_matches(b, counter, watch)) == 1  # re-armed by the mutation
        assert enumerate_matches(b, counter, bump) == []  # its own write does not re-arm it

    def test_parent_completeness(self, counting):
        forest = run(counting, count_state(counting))
        b = forest[0]
        for f in b.firings:
            for c in f.created:
                for _, i in f.binding:
                    assert is_ancestor(b, i, c)


class TestScore:
    def test_fresh_branch(self, make):
        assert score(BranchState(make.hierarchy)) == 0.0

    def test_one_instance(self, make):
        b = BranchState(make.hierarchy)
        create_instance(b, "Seed", {"n": 1}, capacity=2.0)
        sc = make.sconstructions["make"]
        fire(b, make, sc, enumerate_matches(b, make, sc)[0])
        assert b.score == pytest.approx(2.0 - 0.01)

    def test_pure(self, make):
        b = BranchState(make.hierarchy)
        create_instance(b, "Seed", {"n": 1}, capacity=2.0, trust=0.5)
        sc = make.sconstructions["make"]
        fire(b, make, sc, enumerate_matches(b, make, sc)[0])
        assert score(b) == score(b.copy()) == b.score

    def test_scaling_keeps_order(self, make):
        def forest(k):
            b = BranchState(make.hierarchy)
            for i, (cap, trust) in enumerate([(1.0, 1.0), (3.0, 0.5), (2.0, 0.9)]):
                create_instance(b, "Seed", {"n": i}, capacity=cap * k, trust=trust)
            cfg = SearchConfig(beam_width=8, max_firings=1, cost_per_firing=0.01 * k)
            return run(make, b, cfg)

        base, scaled = forest(1.0), forest(7.0)
        assert [br.id for br in base] == [br.id for br in scaled]
        for x, y in zip(base, scaled):
            assert y.score == pytest.approx(7.0 * x.score)


class TestRun:
    def test_zero_sconstructions(self):
        p = load_program("schema A\nroles\n  n: Integer\n")
        b = BranchState(p.hierarchy)
        create_instance(b, "A", {"n": 1})
        forest = run(p, b)
        assert forest == [b] and b.score == 0.0 and not b.incomplete

    def test_counting_trace(self, counting):
        forest = run(counting, count_state(counting))
        assert len(forest) == 1
        b = forest[0]
        assert [f.construction for f in b.firings] == \
            ["start-rule", "count-rule", "count-rule", "stop-rule"]
        counts = [e["new"] for e in b.mutation_log if e["role"] == "count"]
        assert counts == [2, 3, 4]
        assert b.instance("goal").fillers["step"] == "stop"

    def test_budget_marks_incomplete(self, counting):
        forest = run(counting, count_state(counting), SearchConfig(max_firings=2))
        assert all(br.incomplete for br in forest)
        assert all(len(br.firings) == 2 for br in forest)

    def test_halt_on_type(self, counting):
        forest = run(counting, count_state(counting), SearchConfig(halt_on_type="Retrieval"))
        assert [f.construction for f in forest[0].firings] == ["start-rule"]

    def test_beam_branches_and_sorting(self, make):
        b = BranchState(make.hierarchy)
        for n, cap in [(1, 1.0), (2, 3.0), (3, 2.0)]:
            create_instance(b, "Seed", {"n": n}, capacity=cap, instance_id=f"s{n}")
        forest = run(make, b, SearchConfig(beam_width=2, max_firings=1))
        assert len(forest) == 2
        assert [br.score for br in forest] == sorted((br.score for br in forest), reverse=True)
        assert forest[0].score == pytest.approx(3.0 - 0.01)

    def test_config_invariants(self):
        with pytest.raises(ValueError):
            SearchConfig(beam_width=0)
        with pytest.raises(ValueError):
            SearchConfig(max_firings=0)

    def test_deterministic_trace(self, counting, demo):
        cfg = SearchConfig()
        one = dump_trace(run(counting, count_state(counting), cfg), cfg)
        two = dump_trace(run(counting, count_state(counting), cfg), cfg)
        assert one == two
        scene = data_text("sit3.scene")
        utt = "move the small red square on the left"
        a = dump_trace(run(demo, initial_state(demo, scene, utt), cfg), cfg)
        b = dump_trace(run(demo, initial_state(demo, scene, utt), cfg), cfg)
        assert a == b


def test_stress_small():
    programs, fired, failed, violations = stress.stress(seed=5, programs=5, min_firings=100)
    assert fired >= 100
    assert violations == []
