import pytest

from scim.errors import IllegalCharacter, UnterminatedLiteral
from scim.lexer import tokenize


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)]


def test_signature_line_tokens():
    toks = kinds("before(point, point) |-> Boolean")
    assert len(toks) == 8
    assert toks[-2] == ("symbol", "|->")


def test_arrows_are_longest_match():
    assert [t for _, t in kinds("a <-> b <- c |-> d")] == ["a", "<->", "b", "<-", "c", "|->", "d"]


def test_directions_and_marks():
    assert [t for _, t in kinds("x: T @ctx /I /O /IO ?r")] == \
        ["x", ":", "T", "@", "ctx", "/I", "/O", "/IO", "?", "r"]


def test_hyphenated_identifiers_and_negative_numbers():
    toks = tokenize("approx-square(w, -2) x <- -1")
    assert toks[0].text == "approx-square"
    assert toks[4].value == -2
    assert toks[-1].value == -1


def test_minus_after_operand_is_not_a_sign():
    # there is no subtraction operator, so "f(x) -1" cannot be read
    with pytest.raises(IllegalCharacter):
        tokenize("f(x) -1")


def test_literals_carry_values():
    toks = tokenize('"a\\"b" 3 2.5 true false')
    assert [t.value for t in toks] == ['a"b', 3, 2.5, True, False]
    assert isinstance(toks[1].value, int)


def test_keywords():
    toks = tokenize("schema OUT not AND self inherits")
    assert all(t.kind == "keyword" for t in toks)


def test_comments_and_locations():
    toks = tokenize("// header\n  x <- 1 // trailing\n")
    assert toks[0].location == (2, 3)
    assert len(toks) == 3


def test_unterminated_string_reports_location():
    with pytest.raises(UnterminatedLiteral) as e:
        tokenize('x <- "open\n')
    assert (e.value.line, e.value.column) == (1, 6)


def test_illegal_character():
    with pytest.raises(IllegalCharacter) as e:
        tokenize("x <- 1 $")
    assert e.value.column == 8


def test_empty_source():
    assert tokenize("") == []
