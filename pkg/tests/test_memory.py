import json

import pytest

from scim.errors import (AlreadySituatedHere, ImmutableRole, NotSituated, PlaceKindMismatch,
                         TypeMismatch, UnknownType)
from scim.memory import (Ref, bind_role, create_instance, fork_branch, load_state, mutate_role,
                         remove_situated, replay, situate)
from scim.places import Box, Point, Segment
from scim.scenarios.interpret import data_text

from conftest import fresh


def test_partial_specification(skeleton):
    b = fresh(skeleton)
    sq = create_instance(b, "Square", {"width": 30.0, "height": 30.0})
    inst = b.instance(sq)
    assert inst.fillers["Shape*width"] == 30.0
    assert "Shape*name" not in inst.fillers


def test_constant_filler_applied_at_creation(skeleton):
    b = fresh(skeleton)
    sq = create_instance(b, "Square")
    assert b.instance(sq).fillers["Shape*color"] == "red"


def test_goal_chunk(counting):
    b = fresh(counting)
    g = create_instance(b, "Goal", {"start": 2, "step": "start"})
    assert b.instance(g).fillers == {"start": 2, "step": "start"}


def test_parents_pass_through(skeleton):
    b = fresh(skeleton)
    a = create_instance(b, "Shape")
    c = create_instance(b, "Shape")
    d = create_instance(b, "Shape", parents=[a, c])
    assert b.instance(d).parents == (a, c)


def test_create_errors(skeleton):
    b = fresh(skeleton)
    with pytest.raises(TypeMismatch):
        create_instance(b, "Shape", {"width": "wide"})
    with pytest.raises(TypeMismatch):
        create_instance(b, "Shape", {"color": "green"})
    with pytest.raises(UnknownType):
        create_instance(b, "Hexagon")
    with pytest.raises(UnknownType):
        create_instance(b, "CxBase")
    a = create_instance(b, "Shape")
    with pytest.raises(ValueError):
        create_instance(b, "Shape", parents=[a, a])
    with pytest.raises(ValueError):
        create_instance(b, "Shape", trust=0.0)
    with pytest.raises(ValueError):
        create_instance(b, "Shape", capacity=0.0)


def test_role_type_is_checked_against_subtypes(skeleton):
    b = fresh(skeleton)
    board = create_instance(b, "Board")
    sq = create_instance(b, "Square")
    create_instance(b, "Square", {"twin": Ref(sq), "board": Ref(board)})
    with pytest.raises(TypeMismatch):
        create_instance(b, "Square", {"twin": Ref(board)})


def test_situate(skeleton, demo):
    b = fresh(skeleton)
    t = create_instance(b, "Timeline")
    w = create_instance(b, "Shape")
    situate(b, w, t, Point(3))
    assert b.place_of(w, t) == Point(3)
    board = create_instance(b, "Board")
    sq = create_instance(b, "Square")
    situate(b, sq, board, Box(10, 10, 40, 40))
    assert b.contexts_of(sq) == [board]


def test_situate_errors(skeleton):
    b = fresh(skeleton)
    t = create_instance(b, "Timeline")
    w = create_instance(b, "Shape")
    with pytest.raises(PlaceKindMismatch):
        situate(b, w, t, Box(0, 0, 1, 1))
    situate(b, w, t, Segment(0, 1))
    with pytest.raises(AlreadySituatedHere):
        situate(b, w, t, Point(4))


def test_remove_and_resituate(skeleton):
    b = fresh(skeleton)
    t = create_instance(b, "Timeline")
    w = create_instance(b, "Shape", {"name": "w"})
    situate(b, w, t, Point(1))
    remove_situated(b, w, t)
    assert b.present_in(t) == []
    assert b.instance(w).fillers["name"] == "w"
    with pytest.raises(NotSituated):
        remove_situated(b, w, t)
    situate(b, w, t, Point(5))
    history = b.entries(t)
    assert [(s.present, s.removed_at is None) for s in history] == [(False, False), (True, True)]
    assert replay(b).situations[t][0].removed_at == history[0].removed_at


def test_mutate(counting):
    b = fresh(counting)
    g = create_instance(b, "Goal", {"start": 2, "step": "start"})
    mutate_role(b, g, "step", "counting")
    e = b.mutation_log[-1]
    assert (e["instance"], e["role"], e["old"], e["new"]) == (g, "step", "start", "counting")
    mutate_role(b, g, "count", 2)
    assert b.mutation_log[-1]["old"] is None
    with pytest.raises(ImmutableRole):
        mutate_role(b, g, "start", 3)
    with pytest.raises(TypeMismatch):
        mutate_role(b, g, "count", "three")


def test_bind_only_once(counting):
    b = fresh(counting)
    g = create_instance(b, "Goal")
    bind_role(b, g, "end", 4)
    with pytest.raises(ImmutableRole):
        bind_role(b, g, "end", 5)


def test_clock_is_strictly_monotone(counting):
    b = fresh(counting)
    g = create_instance(b, "Goal", {"step": "start"})
    buf = create_instance(b, "Buffer")
    situate(b, g, buf, Point(0))
    mutate_role(b, g, "step", "x")
    remove_situated(b, g, buf)
    times = [e["time"] for e in b.log]
    assert times == sorted(set(times))


def test_fork_isolation(counting):
    b = fresh(counting)
    g = create_instance(b, "Goal", {"step": "start"})
    child = fork_branch(b)
    mutate_role(child, g, "step", "counting")
    assert b.instance(g).fillers["step"] == "start"
    create_instance(b, "Goal", instance_id="later")
    assert "later" not in child.instances
    assert child.score == b.score


def test_fork_identical_changes_are_equal(counting):
    b = fresh(counting)
    g = create_instance(b, "Goal", {"step": "start"})
    x, y = fork_branch(b, "x"), fork_branch(b, "y")
    for br in (x, y):
        mutate_role(br, g, "count", 7)
    assert x.live_signature() == y.live_signature()
    dx, dy = x.to_json(), y.to_json()
    dx.pop("branch"), dy.pop("branch")
    assert dx == dy


def test_replay_reconstructs(skeleton):
    b = fresh(skeleton)
    t = create_instance(b, "Timeline")
    s = create_instance(b, "Square", {"name": "Q"})
    situate(b, s, t, Point(1))
    mutate_role(b, s, "label", "q")
    remove_situated(b, s, t)
    situate(b, s, t, Point(2))
    assert replay(b).live_signature() == b.live_signature()


def test_dump_is_stable_json(skeleton):
    b = fresh(skeleton)
    create_instance(b, "Square", {"name": "Q"})
    text = b.dump()
    assert json.loads(text)["instances"][0]["type"] == "Square"
    assert b.dump() == text


def test_load_state(counting):
    b = load_state(json.loads(data_text("count_state.json")), counting.hierarchy)
    assert b.instance("goal").fillers["end"] == 4
    assert sum(1 for i in b.instances.values() if i.type == "CountOrder") == 5
