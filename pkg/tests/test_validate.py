import pytest

from conftest import SKELETON_SRC
from scim.contexts import PRELUDE
from scim.errors import ValidationError
from scim.parser import parse_source
from scim.program import diagnose, load_program, validate
from scim.scenarios.interpret import data_text


def codes(src):
    return [d.code for d in diagnose(parse_source(PRELUDE) + parse_source(src))]


def test_skeletons_validate(skeleton):
    sk = skeleton.sconstructions["CxSkeleton"]
    # inherited constituents are merged in front of the own ones
    assert list(sk.constituents) == ["f", "a", "b", "c"]
    assert sk.outputs == ["c"] and sk.inputs == ["f", "a", "b"]
    assert sk.outs == ["a"]
    assert [str(m.path) for m in sk.mutations] == ["?b.label"]
    assert "c" in sk.placements


def test_validation_is_idempotent(skeleton):
    again = validate(skeleton.definitions)
    assert again.sconstructions.keys() == skeleton.sconstructions.keys()
    assert diagnose(again.definitions) == []


def test_bundled_grammars_are_clean():
    for name in ("demo.scim", "count.scim"):
        assert codes(data_text(name)) == []


def test_figure_chain_path_is_valid():
    src = ("schema Figure\nroles\n  color: String\n\nschema Rectangle\ninherits Figure\n\n"
           "schema Square\ninherits Rectangle\nconstraints\n  Rectangle*Figure*color <- \"red\"\n")
    assert codes(src) == []


def test_inheritance_cycle_lists_members():
    diags = diagnose(parse_source("schema A\ninherits B\n\nschema B\ninherits A\n"))
    assert [d.code for d in diags] == ["InheritanceCycle"]
    assert "A -> B -> A" in diags[0].message


@pytest.mark.parametrize("src, code", [
    ("schema A\nroles\n  x: Nope\n", "UnknownType"),
    ("schema A\ninherits Nope\n", "UnknownType"),
    ("schema A\nroles\n  x: Integer\nconstraints\n  y <- 1\n", "UnresolvedRolePath"),
    ("schema A\nroles\n  x: Integer\nconstraints\n  x <- \"s\"\n", "TypeMismatch"),
    ("schema A\nroles\n  x: Integer\nconstraints\n  neq(x)\n", "ArityMismatch"),
    ("schema A\nroles\n  x: Integer\nconstraints\n  frob(x, x)\n", "UnknownPredicate"),
    ("schema A\nroles\n  x: Integer\nconstraints\n  ?x <- 1\n", "ImmutableRole"),
    ("context K\ninherits LinearContext\nrelations\n  near(box, box) |-> Boolean\n",
     "PlaceKindMismatch"),
    ("schema A\n\nschema A\n", "DuplicateDefinition"),
    ("schema A\n\ns-construction S\ninherits A\n", "KindMismatch"),
    ("schema A\nroles\n  n: Integer @n\n", "KindMismatch"),
    ("schema A\n\ns-construction S\nconstituents\n  a: A /I\nconstraints\n  OUT(b)\n",
     "UnresolvedRolePath"),
    ("schema A\n\ns-construction S\nconstituents\n  a: A @k /I\n", "UnresolvedRolePath"),
    ("schema A\nroles\n  ?m: Integer\n\ns-construction S\nconstituents\n  a: A /I\n"
     "constraints\n  ?a.m <- 1\n  OUT(a)\n", "KindMismatch"),
    ("s-construction S\nroles\n  r: Integer\nconstraints\n  self.r <- 1\n", "UnresolvedRolePath"),
    ("schema A\n\ns-construction S\nconstituents\n  f: LinearContext /I\n  a: A @f /I\n"
     "constraints\n  f.near(a, a)\n", "UnknownRelation"),
    ("schema A\n\ns-construction S\nconstituents\n  f: LinearContext /I\n  a: A @f /I\n"
     "  o: A @f /O\n", "PlaceKindMismatch"),
])
def test_diagnostics(src, code):
    assert code in codes(src)


def test_diagnostics_carry_locations():
    (d,) = diagnose(parse_source("schema A\nroles\n  x: Integer\nconstraints\n  y <- 1\n"))
    assert (d.line, d.column) == (5, 3)


def test_load_program_raises_with_all_diagnostics():
    with pytest.raises(ValidationError) as e:
        load_program("schema A\nroles\n  x: Nope\n  y: Nope\n")
    assert len(e.value.diagnostics) == 2


def test_multi_file_programs_concatenate(tmp_path):
    a = tmp_path / "a.scim"
    b = tmp_path / "b.scim"
    a.write_text("schema A\nroles\n  x: Integer\n")
    b.write_text("schema B\ninherits A\n")
    from scim.program import load_files
    assert load_files([a, b]).hierarchy.is_subtype("B", "A")
    assert "UnknownType" in codes(b.read_text())
