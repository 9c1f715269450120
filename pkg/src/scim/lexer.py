"""Tokenizer for the ``.scim`` grammar language."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import IllegalCharacter, UnterminatedLiteral

KEYWORDS = frozenset({
    "schema", "context", "s-construction", "inherits", "roles", "constraints",
    "places", "relations", "operations", "constructional", "constituents",
    "OUT", "self", "not", "AND", "OR", "NOT", "NAND",
})

BLOCK_KEYWORDS = ("inherits", "roles", "constraints", "places", "relations",
                  "operations", "constructional", "constituents")

# longest first
SYMBOLS = ("|->", "<->", "<-", "/IO", "/I", "/O", "(", ")", "{", "}", ",",
           ":", ".", "*", "?", "@", "=")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z_][A-Za-z0-9_]*)*")
_NUMBER = re.compile(r"-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | symbol | literal
    text: str
    line: int
    column: int
    value: object = None

    @property
    def location(self):
        return (self.line, self.column)

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.column})"


def _string_value(text):
    out = []
    i = 1
    while i < len(text) - 1:
        ch = text[i]
        if ch == "\\":
            nxt = text[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(source: str) -> list[Token]:
    """Split program text into tokens, skipping whitespace and ``//`` comments."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r\f":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            j = n if j < 0 else j
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    break
                j += 2 if source[j] == "\\" else 1
            if j >= n or source[j] != '"':
                raise UnterminatedLiteral("unterminated string literal", line, col)
            text = source[i:j + 1]
            tokens.append(Token("literal", text, line, col, _string_value(text)))
            col += j + 1 - i
            i = j + 1
            continue
        m = _NUMBER.match(source, i)
        if m and (ch != "-" or not (tokens and tokens[-1].kind in ("identifier", "literal")
                                     or tokens and tokens[-1].text == ")")):
            text = m.group()
            value = float(text) if any(c in text for c in ".eE") else int(text)
            tokens.append(Token("literal", text, line, col, value))
            col += len(text)
            i = m.end()
            continue
        m = _IDENT.match(source, i)
        if m:
            text = m.group()
            if text in KEYWORDS:
                tokens.append(Token("keyword", text, line, col))
            elif text in ("true", "false"):
                tokens.append(Token("literal", text, line, col, text == "true"))
            else:
                tokens.append(Token("identifier", text, line, col))
            col += len(text)
            i = m.end()
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                # "/I" must not swallow the start of an identifier like "/Index"
                if sym[0] == "/" and i + len(sym) < n and (
                        source[i + len(sym)].isalnum() or source[i + len(sym)] == "_"):
                    continue
                tokens.append(Token("symbol", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise IllegalCharacter(f"illegal character {ch!r}", line, col)
    return tokens
