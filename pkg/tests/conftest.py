"""Shared test fixtures: random document generation and feed fixtures."""

from __future__ import annotations

import json
import random
import string

from tidewire.ir import Intent, IntentDocument, canonical_intent_name, canonical_key

NAME_ALPHA = string.ascii_uppercase + string.digits + "_"
KEY_ALPHA = string.ascii_lowercase + string.digits + "_"
# printable-ish pool including the characters that need escaping
VALUE_POOL = string.ascii_letters + string.digits + ' .,;()=%/º°ç ã"\\\n-'


def random_name(rng: random.Random) -> str:
    # canonical fixed point: no leading/trailing/doubled underscores
    length = rng.randint(1, 12)
    first = rng.choice(string.ascii_uppercase)
    raw = first + "".join(rng.choice(NAME_ALPHA) for _ in range(length - 1))
    return canonical_intent_name(raw) or "X"


def random_key(rng: random.Random) -> str:
    length = rng.randint(1, 10)
    first = rng.choice(string.ascii_lowercase)
    raw = first + "".join(rng.choice(KEY_ALPHA) for _ in range(length - 1))
    return canonical_key(raw) or "k"


def random_value(rng: random.Random) -> str:
    length = rng.randint(1, 20)
    return "".join(rng.choice(VALUE_POOL) for _ in range(length))


def random_document(rng: random.Random, max_intents: int = 6) -> IntentDocument:
    """Structurally valid document in canonical form (the round-trip oracle)."""
    n = rng.randint(1, max_intents)
    intents = []
    location_used = False
    for i in range(n):
        name = random_name(rng)
        if name == "LOCATION":
            if location_used:
                name = "LOCATION_X"
            location_used = True
        attrs = {}
        for _ in range(rng.randint(1, 5)):
            key = random_key(rng)
            while key in attrs:
                key += rng.choice(string.ascii_lowercase)
            attrs[key] = random_value(rng)
        intents.append(Intent(name=name, attributes=attrs, id=i))
    return IntentDocument.from_intents(intents)


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path
