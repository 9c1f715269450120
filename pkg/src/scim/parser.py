"""Recursive-descent parser producing :class:`Definition` trees."""

from __future__ import annotations

from .errors import DuplicateBlock, ScimSyntaxError
from .lexer import BLOCK_KEYWORDS, Token, tokenize
from .nodes import (BoolOp, ConstituentDecl, ConstructionalDecl, Definition,
                    EnumDef, Equality, Filler, FuncCall, Identification,
                    Literal, Out, Parent, PlaceOp, Predicate, Relation,
                    RoleDecl, RolePath, Signature)

DECL_KEYWORDS = ("schema", "context", "s-construction")
BOOL_OPS = ("AND", "OR", "NOT", "NAND")

BLOCK_ORDER = {
    "schema": ("inherits", "roles", "constraints"),
    "context": ("inherits", "roles", "constraints", "places", "relations", "operations"),
    "s-construction": ("inherits", "roles", "constructional", "constituents", "constraints"),
}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # token helpers
    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, text, offset=0):
        tok = self.peek(offset)
        return tok is not None and tok.kind in ("symbol", "keyword") and tok.text == text

    def at_kind(self, kind, offset=0):
        tok = self.peek(offset)
        return tok is not None and tok.kind == kind

    def error(self, what, expected):
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line, col = (last.line, last.column + len(last.text)) if last else (1, 1)
            found = "end of input"
        else:
            line, col, found = tok.line, tok.column, repr(tok.text)
        raise ScimSyntaxError(f"{what}: expected {' or '.join(sorted(set(expected)))}, found {found}",
                              line, col, expected)

    def expect(self, text, what):
        if not self.at(text):
            self.error(what, [text])
        tok = self.peek()
        self.pos += 1
        return tok

    def ident(self, what):
        if not self.at_kind("identifier"):
            self.error(what, ["identifier"])
        tok = self.peek()
        self.pos += 1
        return tok

    # program
    def program(self):
        defs = []
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == "keyword" and tok.text in DECL_KEYWORDS:
                defs.append(self.declaration())
            elif tok.kind == "identifier" and tok.text == "enum":
                defs.append(self.enum())
            else:
                self.error("top-level declaration", list(DECL_KEYWORDS) + ["enum"])
        return defs

    def enum(self):
        start = self.peek()
        self.pos += 1
        name = self.ident("enum name").text
        self.expect("{", "enum body")
        members = [self.ident("enum member").text]
        while self.at(","):
            self.pos += 1
            members.append(self.ident("enum member").text)
        self.expect("}", "enum body")
        return EnumDef(name, tuple(members), loc=start.location)

    def declaration(self):
        start = self.peek()
        kind = start.text
        self.pos += 1
        name = self.ident(f"{kind} name").text
        confidence = None
        if self.at_kind("identifier") and self.peek().text == "confidence":
            self.pos += 1
            tok = self.peek()
            if tok is None or tok.kind != "literal" or isinstance(tok.value, (str, bool)):
                self.error("confidence annotation", ["number"])
            confidence = float(tok.value)
            self.pos += 1
        order = BLOCK_ORDER[kind]
        fields = {}
        seen = []
        while self.peek() is not None and self.peek().kind == "keyword" \
                and self.peek().text in BLOCK_KEYWORDS:
            tok = self.peek()
            block = tok.text
            if block in seen:
                raise DuplicateBlock(f"{kind} {name} repeats block '{block}'", tok.line, tok.column)
            if block not in order:
                self.error(f"{kind} {name}", [b for b in order if b not in seen] + list(DECL_KEYWORDS))
            if seen and order.index(block) < order.index(seen[-1]):
                allowed = order[order.index(seen[-1]) + 1:]
                self.error(f"block order in {kind} {name}", list(allowed) + list(DECL_KEYWORDS))
            self.pos += 1
            seen.append(block)
            fields[block] = getattr(self, "block_" + block)()
        return Definition(kind=kind, name=name, confidence=confidence, blocks=tuple(seen),
                          loc=start.location, **fields)

    def block_ended(self):
        tok = self.peek()
        if tok is None:
            return True
        if tok.kind == "keyword" and (tok.text in BLOCK_KEYWORDS or tok.text in DECL_KEYWORDS):
            return True
        return tok.kind == "identifier" and tok.text == "enum" and self.at_kind("identifier", 1) \
            and self.at("{", 2)

    # blocks
    def block_inherits(self):
        names = [self.ident("inherited type").text]
        while self.at(","):
            self.pos += 1
            names.append(self.ident("inherited type").text)
        return tuple(names)

    def block_roles(self):
        roles = []
        while not self.block_ended():
            start = self.peek()
            mutable = False
            if self.at("?"):
                mutable = True
                self.pos += 1
            name = self.ident("role name").text
            self.expect(":", "role declaration")
            type_name = self.ident("role type").text
            situated = None
            if self.at("@"):
                self.pos += 1
                situated = self.ident("situating context").text
            roles.append(RoleDecl(name, type_name, mutable, situated, loc=start.location))
        return tuple(roles)

    def block_constructional(self):
        out = []
        while not self.block_ended():
            start = self.peek()
            negative = False
            if self.at("not"):
                negative = True
                self.pos += 1
            label = self.ident("constructional label").text
            self.expect(":", "constructional declaration")
            type_name = self.ident("s-construction type").text
            out.append(ConstructionalDecl(label, type_name, negative, loc=start.location))
        return tuple(out)

    def block_constituents(self):
        out = []
        while not self.block_ended():
            start = self.peek()
            label = self.ident("constituent label").text
            self.expect(":", "constituent declaration")
            type_name = self.ident("constituent type").text
            situated = None
            if self.at("@"):
                self.pos += 1
                situated = self.ident("situating context").text
            marks = ""
            while self.peek() is not None and self.peek().kind == "symbol" \
                    and self.peek().text in ("/I", "/O", "/IO"):
                marks += self.peek().text[1:]
                self.pos += 1
            direction = {"I": "I", "O": "O", "IO": "IO", "OI": "IO"}.get(marks)
            if direction is None:
                self.error(f"direction of constituent {label}", ["/I", "/O", "/IO"])
            out.append(ConstituentDecl(label, type_name, direction, situated, loc=start.location))
        return tuple(out)

    def block_places(self):
        out = []
        while not self.block_ended():
            out.append(self.ident("place kind").text)
        return tuple(out)

    def signature(self):
        start = self.peek()
        name = self.ident("signature name").text
        self.expect("(", "signature")
        params = [self.ident("place kind").text]
        while self.at(","):
            self.pos += 1
            params.append(self.ident("place kind").text)
        self.expect(")", "signature")
        self.expect("|->", "signature")
        result = self.ident("result type").text
        return Signature(name, tuple(params), result, loc=start.location)

    def block_relations(self):
        out = []
        while not self.block_ended():
            out.append(self.signature())
        return tuple(out)

    block_operations = block_relations

    def block_constraints(self):
        out = []
        while not self.block_ended():
            out.append(self.constraint())
        return tuple(out)

    # constraints
    def constraint(self):
        tok = self.peek()
        if tok is None:
            self.error("constraint", ["constraint"])
        if self.at("OUT"):
            self.pos += 1
            self.expect("(", "OUT constraint")
            label = self.ident("OUT constituent").text
            self.expect(")", "OUT constraint")
            return Out(label, loc=tok.location)
        if tok.kind == "keyword" and tok.text in BOOL_OPS:
            self.pos += 1
            self.expect("(", f"{tok.text} operation")
            args = [self.constraint()]
            while self.at(","):
                self.pos += 1
                args.append(self.constraint())
            self.expect(")", f"{tok.text} operation")
            return BoolOp(tok.text, tuple(args), loc=tok.location)
        if tok.kind == "identifier" and self.at("(", 1):
            name = tok.text
            self.pos += 1
            return Predicate(name, self.call_args(self.atomic_arg), loc=tok.location)
        left = self.role_path()
        if self.at("("):
            if len(left.segments) < 2 or left.muted or left.segments[-1][0] != "sub":
                self.error("context relation", ["<-", "<->", "=", "C"])
            ctx, name = self._split_call(left)
            return Relation(ctx, name, self.call_args(self.place_arg), loc=tok.location)
        if self.at("<-"):
            self.pos += 1
            return Filler(left, self.value(), loc=tok.location)
        if self.at("<->"):
            self.pos += 1
            nxt = self.peek()
            if nxt is not None and nxt.kind == "identifier" and self.at("(", 1):
                self.pos += 2
                right = self.role_path()
                self.expect(")", "identification function")
                return Identification(left, right, nxt.text, loc=tok.location)
            return Identification(left, self.role_path(), loc=tok.location)
        if self.at("="):
            self.pos += 1
            return Equality(left, self.role_path(), loc=tok.location)
        if self.at_kind("identifier") and self.peek().text == "C":
            self.pos += 1
            return Parent(left, self.role_path(), loc=tok.location)
        self.error("constraint", ["<-", "<->", "=", "C", "("])

    def _split_call(self, path):
        ctx = RolePath(path.segments[:-1], loc=path.loc)
        return ctx, path.segments[-1][1]

    def call_args(self, item):
        self.expect("(", "argument list")
        args = []
        if not self.at(")"):
            args.append(item())
            while self.at(","):
                self.pos += 1
                args.append(item())
        self.expect(")", "argument list")
        return tuple(args)

    def atomic_arg(self):
        tok = self.peek()
        if tok is not None and tok.kind == "literal":
            self.pos += 1
            return Literal(tok.value, loc=tok.location)
        return self.role_path()

    def place_arg(self):
        tok = self.peek()
        path = self.role_path()
        if self.at("("):
            if len(path.segments) < 2 or path.segments[-1][0] != "sub":
                self.error("place expression", [")", ","])
            ctx, name = self._split_call(path)
            return PlaceOp(ctx, name, self.call_args(self.place_arg), loc=tok.location)
        return path

    def value(self):
        tok = self.peek()
        if tok is not None and tok.kind == "literal":
            self.pos += 1
            return Literal(tok.value, loc=tok.location)
        if tok is not None and tok.kind == "identifier" and self.at("(", 1):
            self.pos += 1
            return FuncCall(tok.text, self.call_args(self.atomic_arg), loc=tok.location)
        path = self.role_path()
        if self.at("("):
            if len(path.segments) < 2 or path.segments[-1][0] != "sub":
                self.error("value", ["literal", "role path"])
            ctx, name = self._split_call(path)
            return PlaceOp(ctx, name, self.call_args(self.place_arg), loc=tok.location)
        return path

    def role_path(self):
        start = self.peek()
        muted = False
        if self.at("?"):
            muted = True
            self.pos += 1
        segments = []
        if self.at("self"):
            self.pos += 1
            segments.append(("self", "self"))
            if not self.at("."):
                return RolePath(tuple(segments), muted, loc=start.location)
            self.pos += 1
        first_group = True
        while True:
            name = self.ident("role path segment").text
            if self.at("*"):
                self.pos += 1
                segments.append(("inherit", name))
                continue
            segments.append(("role" if first_group else "sub", name))
            first_group = False
            if self.at(".") and self.at_kind("identifier", 1):
                self.pos += 1
                continue
            break
        return RolePath(tuple(segments), muted, loc=start.location)


def parse_program(tokens) -> list:
    """Parse a token list (or raw source text) into definitions."""
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    return Parser(list(tokens)).program()


def parse_source(source: str) -> list:
    return parse_program(tokenize(source))
