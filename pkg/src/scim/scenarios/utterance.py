"""Lay an utterance out on the form pole: word i at point i of a linear context."""

from __future__ import annotations

from ..errors import UnknownWord
from ..memory import BranchState, create_instance, situate
from ..places import Point

LEXICON = {
    "put": "verb",
    "remove": "verb",
    "move": "verb",
    "the": "det",
    "small": "adj",
    "red": "adj",
    "square": "noun",
    "on": "prep",
    "left": "region",
}

FORM_ID = "form"
MEANING_ID = "meaning"


def lay_out_utterance(text: str, b: BranchState, lexicon=None) -> list:
    """Create the form and meaning contexts and one Word per token; returns word ids.

    A non-empty utterance also gets an End marker one point past the last word.
    """
    lexicon = LEXICON if lexicon is None else lexicon
    tokens = text.split()
    unknown = sorted({t for t in tokens if t not in lexicon})
    if unknown:
        raise UnknownWord(unknown)
    create_instance(b, "LinearContext", instance_id=FORM_ID)
    if MEANING_ID not in b.instances:
        create_instance(b, "SetContext", instance_id=MEANING_ID)
    ids = []
    for i, tok in enumerate(tokens):
        wid = f"w{i}"
        create_instance(b, "Word", {"text": tok, "cat": lexicon[tok]}, instance_id=wid)
        situate(b, wid, FORM_ID, Point(i))
        ids.append(wid)
    if tokens:
        create_instance(b, "End", instance_id="end")
        situate(b, "end", FORM_ID, Point(len(tokens)))
    return ids
