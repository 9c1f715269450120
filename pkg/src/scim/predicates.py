"""Registries of boolean predicates and value functions usable in grammars."""

from __future__ import annotations

from .memory import atomic_equal


def _num(*xs):
    return all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in xs)


def _cmp(op):
    def fn(a, b):
        if not (_num(a, b) or (isinstance(a, str) and isinstance(b, str))):
            raise TypeError(f"cannot compare {a!r} and {b!r}")
        return op(a, b)
    return fn


def approx_square(w, h, tolerance=0.2):
    """Width and height within a relative tolerance of each other."""
    return abs(w - h) / max(w, h) <= tolerance


PREDICATES = {
    "eq": (2, atomic_equal),
    "neq": (2, lambda a, b: not atomic_equal(a, b)),
    "lt": (2, _cmp(lambda a, b: a < b)),
    "le": (2, _cmp(lambda a, b: a <= b)),
    "gt": (2, _cmp(lambda a, b: a > b)),
    "ge": (2, _cmp(lambda a, b: a >= b)),
    "approx-square": (2, approx_square),
    "color-is": (2, lambda c, name: c == name),
}

# name -> (arity or None for variadic, function)
FUNCTIONS = {
    "concat": (None, lambda *xs: "".join(str(x) for x in xs)),
    "words": (None, lambda *xs: " ".join(str(x) for x in xs if x != "")),
    "add": (2, lambda a, b: a + b),
    "sub": (2, lambda a, b: a - b),
    "succ": (1, lambda a: a + 1),
    "pred": (1, lambda a: a - 1),
    "neg": (1, lambda a: -a),
    "upper": (1, lambda s: s.upper()),
    "lower": (1, lambda s: s.lower()),
}


def register_predicate(name, arity, fn):
    PREDICATES[name] = (arity, fn)


def register_function(name, arity, fn):
    FUNCTIONS[name] = (arity, fn)
