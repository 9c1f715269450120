import pytest

from scim.memory import BranchState
from scim.program import load_program
from scim.scenarios.interpret import count_program, data_text, demo_program

# schema skeleton: inheritance, mutable and situated roles, every constraint form
SCHEMA_SRC = """\
enum Color { red, blue }

context Board
inherits SceneContext2D

schema Shape
roles
  color: Color
  width: Float
  height: Float
  name: String

schema Square
inherits Shape
roles
  board: Board
  ?label: String
  twin: Shape @board
  other: Shape @board
constraints
  Shape*color <- "red"
  width <-> height
  label <-> lower(name)
  twin = other
  approx-square(width, height)
  OR(lt(width, 100.0), NOT(eq(height, 0.0)))
  NAND(eq(name, "a"), eq(name, "b"))
  board.left-of(twin, other)
"""

# context skeleton with the place, relation and operation blocks
CONTEXT_SRC = """\
context Timeline
inherits LinearContext
roles
  origin: Integer
constraints
  origin <- 0
places
  point
  segment
relations
  before(point, point) |-> Boolean
  precedes(segment, segment) |-> Boolean
operations
  intersection(segment, segment) |-> segment
"""

# s-construction skeleton: constructional block, directions, muted role, OUT, parent
SCONSTRUCTION_SRC = """\
s-construction CxBase
constituents
  f: Timeline /I
  a: Shape @f /I

s-construction CxSkeleton confidence 0.9
inherits CxBase
roles
  note: String
constructional
  prior: CxBase
  not veto: CxBase
constituents
  b: Square @f /I/O
  c: Shape @f /O
constraints
  prior.a.color <- "red"
  ?b.label <- "moved"
  c <- f.intersection(a, b)
  c.width <- 1.0
  b C a
  f.before(a, b)
  OUT(a)
"""

SKELETON_SRC = SCHEMA_SRC + "\n" + CONTEXT_SRC + "\n" + SCONSTRUCTION_SRC


@pytest.fixture(scope="session")
def demo():
    return demo_program()


@pytest.fixture(scope="session")
def counting():
    return count_program()


@pytest.fixture
def scene_text():
    return data_text


@pytest.fixture
def skeleton():
    return load_program(SKELETON_SRC)


def fresh(program):
    return BranchState(program.hierarchy)
