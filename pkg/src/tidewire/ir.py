"""Intent-attribute-value intermediate representation.

An intent document is the interchange format between content selection and
every report generator: an ordered list of intent messages, each holding an
ordered key/value attribute map, e.g.::

    LOCATION(city="Ubatuba",uf="SP"); WEATHER(condition="sunny",temperature="31ºC")

This module owns the grammar: parsing, canonical serialization, schema
validation and the flat single-line form consumed by sequence generators.

Grammar (normative)::

    document   = intent *( ";" intent ) [ ";" ]
    intent     = name "(" attr *( "," attr ) ")"
    name       = word *( SP word )
    attr       = key "=" DQUOTE value DQUOTE
    key        = word *( (SP|"_") word )
    value      = *( escaped | any char except DQUOTE or backslash )
    escaped    = "\\" ( DQUOTE | "\\" | "n" )

Whitespace between tokens is ignored.  Intent names canonicalize to
UPPER_SNAKE and attribute keys to lower_snake (accents folded, spaces and
hyphens collapsed to underscores); a built-in alias table maps the
Portuguese vocabulary used by upstream feeds onto the canonical one, so
``CLIMA(condição="nublado")`` and ``WEATHER(condition="nublado")`` parse to
the same intent.

All values are immutable once parsed; documents can be shared freely
across threads.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field


class IRError(Exception):
    """Base class for all IR-level failures."""


class IRSyntaxError(IRError):
    """Malformed document text; carries 1-based line/column of the offence."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class DuplicateKeyError(IRSyntaxError):
    """An attribute key occurs twice within a single intent."""


class DuplicateLocationError(IRSyntaxError):
    """More than one LOCATION intent in one document."""


class EmptyDocumentError(IRError):
    """No intent found in the input."""


# ---------------------------------------------------------------------------
# canonicalization

# Upstream sources name the same intent in several languages and casings.
# Keys of these tables are already folded (accent-stripped, underscored).
INTENT_ALIASES = {
    "LOCALIZACAO": "LOCATION",
    "CLIMA": "WEATHER",
    "TEMPO": "WEATHER",
    "NAVIOS": "VESSELS_IN_PORT",
    "NAVIOS_NO_PORTO": "VESSELS_IN_PORT",
    "VESSELS": "VESSELS_IN_PORT",
    "TERREMOTO": "EARTHQUAKE",
    "OCEANO": "OCEAN",
    "MARE": "TIDES",
    "MARES": "TIDES",
    "PETROLEO": "OIL",
    "OLEO": "OIL",
    "OIL_EXTRACTION": "OIL",
    "EXTRACAO_DE_PETROLEO": "OIL",
}

KEY_ALIASES = {
    "cidade": "city",
    "estado": "uf",
    "state": "uf",
    "data": "timestamp",
    "condicao": "condition",
    "climate": "condition",
    "temperatura": "temperature",
    "vento": "wind",
    "umidade": "humidity",
    "nebulosidade": "cloudiness",
    "mar": "sea",
    "protetor": "sunscreen",
    "protetor_solar": "sunscreen",
    "quantidade": "quantity",
    "tendencia": "trend",
    "dias_max": "days_max",
    "profundidade": "depth",
    "entidade": "entity",
    "condicao_de_pesca": "fishing_condition",
    "fishing_conditions": "fishing_condition",
    "altura_do_mar": "sea_height",
    "height_of_the_sea": "sea_height",
    "nivel": "level",
    "mare_alta": "high_tide",
    "mare_baixa": "low_tide",
}


def _fold_ascii(text: str) -> str:
    """Strip combining marks: LOCALIZAÇÃO -> LOCALIZACAO."""
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _canonical_words(raw: str) -> str:
    folded = _fold_ascii(raw)
    parts = [p for p in folded.replace("-", " ").replace("_", " ").split() if p]
    return "_".join(parts)


def canonical_intent_name(raw: str) -> str:
    """UPPER_SNAKE canonical form of an intent name, alias-resolved."""
    name = _canonical_words(raw).upper()
    return INTENT_ALIASES.get(name, name)


def canonical_key(raw: str) -> str:
    """lower_snake canonical form of an attribute key, alias-resolved."""
    key = _canonical_words(raw).lower()
    return KEY_ALIASES.get(key, key)


def _valid_canonical_name(name: str) -> bool:
    return bool(name) and name[0].isalpha() and all(c.isalnum() or c == "_" for c in name)


# ---------------------------------------------------------------------------
# domain types

@dataclass
class Intent:
    """One intent message: canonical name plus ordered attribute map."""

    name: str
    attributes: dict[str, str]
    id: int = 0

    def __eq__(self, other: object) -> bool:
        # dict equality ignores insertion order; attribute order is meaningful
        if not isinstance(other, Intent):
            return NotImplemented
        return (
            self.name == other.name
            and self.id == other.id
            and list(self.attributes.items()) == list(other.attributes.items())
        )

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.attributes.get(key, default)


@dataclass
class Provenance:
    city: str | None = None
    uf: str | None = None
    date: str | None = None


@dataclass
class IntentDocument:
    """Ordered list of intents; ids always run 0..n-1 in document order."""

    intents: list[Intent]
    provenance: Provenance | None = None

    @classmethod
    def from_intents(cls, intents: list[Intent]) -> "IntentDocument":
        for i, intent in enumerate(intents):
            intent.id = i
        return cls(intents=intents, provenance=_extract_provenance(intents))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntentDocument):
            return NotImplemented
        return self.intents == other.intents

    def __iter__(self):
        return iter(self.intents)

    def __len__(self) -> int:
        return len(self.intents)

    def names(self) -> list[str]:
        return [i.name for i in self.intents]

    def first(self, name: str) -> Intent | None:
        for intent in self.intents:
            if intent.name == name:
                return intent
        return None

    def by_id(self, intent_id: int) -> Intent:
        return self.intents[intent_id]


def _extract_provenance(intents: list[Intent]) -> Provenance | None:
    for intent in intents:
        if intent.name == "LOCATION":
            return Provenance(
                city=intent.get("city"),
                uf=intent.get("uf"),
                date=intent.get("timestamp"),
            )
    return None


def build_document(spec: list[tuple[str, dict[str, str]]]) -> IntentDocument:
    """Convenience constructor from (name, attrs) pairs; names/keys canonicalized."""
    intents = []
    for name, attrs in spec:
        canon = {canonical_key(k): str(v) for k, v in attrs.items()}
        intents.append(Intent(name=canonical_intent_name(name), attributes=canon))
    return IntentDocument.from_intents(intents)


# ---------------------------------------------------------------------------
# parsing

class _Scanner:
    __slots__ = ("text", "pos", "n")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.n = len(text)

    def at_end(self) -> bool:
        return self.pos >= self.n

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < self.n else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        return ch

    def skip_ws(self) -> None:
        while self.pos < self.n and self.text[self.pos].isspace():
            self.pos += 1

    def location(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        last_nl = self.text.rfind("\n", 0, pos)
        return line, pos - last_nl

    def error(self, message: str, pos: int | None = None, cls=IRSyntaxError) -> IRSyntaxError:
        line, col = self.location(pos)
        return cls(message, line, col)

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = repr(self.peek()) if not self.at_end() else "end of input"
            raise self.error(f"expected {ch!r}, found {found}")
        self.advance()


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_-"


def _scan_words(sc: _Scanner) -> str:
    """Scan a run of words separated by whitespace (hyphen/underscore bind tighter)."""
    start = sc.pos
    pieces: list[str] = []
    while True:
        sc.skip_ws()
        wstart = sc.pos
        while not sc.at_end() and _is_word_char(sc.peek()):
            sc.advance()
        if sc.pos > wstart:
            pieces.append(sc.text[wstart:sc.pos])
            continue
        break
    if not pieces:
        raise sc.error("expected an identifier", pos=start)
    return " ".join(pieces)


def _scan_value(sc: _Scanner) -> str:
    """Scan a double-quoted value, resolving \\" \\\\ and \\n escapes."""
    open_pos = sc.pos
    sc.expect('"')
    out: list[str] = []
    while True:
        if sc.at_end():
            raise sc.error("unterminated value", pos=open_pos)
        ch = sc.advance()
        if ch == '"':
            break
        if ch == "\\":
            if sc.at_end():
                raise sc.error("dangling escape at end of input", pos=sc.pos - 1)
            esc = sc.advance()
            if esc == '"':
                out.append('"')
            elif esc == "\\":
                out.append("\\")
            elif esc == "n":
                out.append("\n")
            else:
                raise sc.error(f"unknown escape \\{esc}", pos=sc.pos - 2)
        else:
            out.append(ch)
    value = "".join(out)
    if not value:
        raise sc.error("empty attribute value", pos=open_pos)
    return value


def _parse_intent(sc: _Scanner, index: int) -> Intent:
    name_pos = sc.pos
    raw_name = _scan_words(sc)
    name = canonical_intent_name(raw_name)
    if not _valid_canonical_name(name):
        raise sc.error(f"invalid intent name {raw_name!r}", pos=name_pos)
    sc.skip_ws()
    sc.expect("(")
    attrs: dict[str, str] = {}
    while True:
        sc.skip_ws()
        key_pos = sc.pos
        raw_key = _scan_words(sc)
        key = canonical_key(raw_key)
        if not key or not (key[0].isalpha() and all(c.isalnum() or c == "_" for c in key)):
            raise sc.error(f"invalid attribute key {raw_key!r}", pos=key_pos)
        if key in attrs:
            raise sc.error(f"duplicate attribute key {key!r}", pos=key_pos, cls=DuplicateKeyError)
        sc.skip_ws()
        sc.expect("=")
        sc.skip_ws()
        attrs[key] = _scan_value(sc)
        sc.skip_ws()
        if sc.peek() == ",":
            sc.advance()
            continue
        sc.expect(")")
        break
    return Intent(name=name, attributes=attrs, id=index)


def parse_ir(text: str) -> IntentDocument:
    """Parse document text into an :class:`IntentDocument`.

    Raises :class:`IRSyntaxError` (with line/column) on malformed input,
    :class:`DuplicateKeyError` on a repeated key within one intent,
    :class:`DuplicateLocationError` on a second LOCATION intent and
    :class:`EmptyDocumentError` when no intent is present.
    """
    if not isinstance(text, str):
        raise TypeError("parse_ir expects str input")
    sc = _Scanner(text)
    intents: list[Intent] = []
    location_seen = False
    sc.skip_ws()
    if sc.at_end():
        raise EmptyDocumentError("no intent found")
    while not sc.at_end():
        start = sc.pos
        intent = _parse_intent(sc, index=len(intents))
        if intent.name == "LOCATION":
            if location_seen:
                raise sc.error("second LOCATION intent", pos=start, cls=DuplicateLocationError)
            location_seen = True
        intents.append(intent)
        sc.skip_ws()
        if sc.at_end():
            break
        sc.expect(";")
        sc.skip_ws()
    return IntentDocument(intents=intents, provenance=_extract_provenance(intents))


# ---------------------------------------------------------------------------
# serialization

def escape_value(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def serialize_ir(doc: IntentDocument) -> str:
    """Canonical text form; ``parse_ir(serialize_ir(d)) == d`` for valid docs."""
    rendered = []
    for intent in doc.intents:
        attrs = ",".join(f'{k}="{escape_value(v)}"' for k, v in intent.attributes.items())
        rendered.append(f"{intent.name}({attrs})")
    return "; ".join(rendered)


def linearize(doc: IntentDocument) -> str:
    """Flat single-line NFC form fed to sequence-to-sequence generators."""
    return unicodedata.normalize("NFC", serialize_ir(doc))


# ---------------------------------------------------------------------------
# schema validation

class KindError(ValueError):
    pass


@dataclass(frozen=True)
class KindSpec:
    """Expected shape of one attribute value."""

    kind: str  # text | number_unit | date | enum
    tokens: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("text", "number_unit", "date", "enum"):
            raise KindError(f"unknown kind {self.kind!r}")
        if self.kind == "enum" and not self.tokens:
            raise KindError("enum kind needs allowed tokens")


@dataclass(frozen=True)
class IntentSchema:
    name: str
    required: tuple[str, ...] = ()
    optional: tuple[str, ...] = ()
    kinds: dict[str, KindSpec] = field(default_factory=dict)

    def __post_init__(self):
        overlap = set(self.required) & set(self.optional)
        if overlap:
            raise ValueError(f"keys both required and optional: {sorted(overlap)}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning
    intent_id: int
    message: str


_NUMBER_UNIT_OK = re.compile(r"^\s*-?\d+(?:[.,]\d+)?(?:\s*\S.*)?$")


def _kind_ok(value: str, spec: KindSpec) -> bool:
    if spec.kind == "text":
        return bool(value.strip())
    if spec.kind == "number_unit":
        return bool(_NUMBER_UNIT_OK.match(value))
    if spec.kind == "date":
        from .dates import parse_flex_date

        return parse_flex_date(value) is not None
    if spec.kind == "enum":
        return value in spec.tokens
    return False


def validate(doc: IntentDocument, registry: list[IntentSchema]) -> list[Diagnostic]:
    """Check a document against a schema registry.

    Returns one diagnostic per problem: unknown intent, missing required
    key, or a value that does not fit its declared kind.  Attribute keys a
    schema does not mention are tolerated (feeds evolve faster than
    schemas).  An empty list means the document is valid.
    """
    if not registry:
        raise ValueError("registry must be non-empty")
    by_name = {s.name: s for s in registry}
    diags: list[Diagnostic] = []
    for intent in doc.intents:
        schema = by_name.get(intent.name)
        if schema is None:
            diags.append(Diagnostic("error", intent.id, f"unknown intent {intent.name}"))
            continue
        for key in schema.required:
            if key not in intent.attributes:
                diags.append(
                    Diagnostic("error", intent.id, f"{intent.name} missing required key {key!r}")
                )
        for key, value in intent.attributes.items():
            spec = schema.kinds.get(key)
            if spec is not None and not _kind_ok(value, spec):
                diags.append(
                    Diagnostic(
                        "error",
                        intent.id,
                        f"{intent.name}.{key}={value!r} does not fit kind {spec.kind}",
                    )
                )
    return diags


BRAZILIAN_UFS = (
    "AC", "AL", "AP", "AM", "BA", "CE", "DF", "ES", "GO", "MA", "MT", "MS", "MG",
    "PA", "PB", "PR", "PE", "PI", "RJ", "RN", "RS", "RO", "RR", "SC", "SP", "SE", "TO",
)

_UF_KIND = KindSpec("enum", BRAZILIAN_UFS)
_NUM = KindSpec("number_unit")

DEFAULT_REGISTRY: list[IntentSchema] = [
    IntentSchema(
        "LOCATION",
        required=("city",),
        optional=("uf", "timestamp"),
        kinds={"uf": _UF_KIND, "timestamp": KindSpec("date")},
    ),
    IntentSchema(
        "WEATHER",
        required=("condition",),
        optional=("temperature", "wind", "humidity", "cloudiness", "sea", "sunscreen", "max_since_days"),
        kinds={
            "temperature": _NUM,
            "wind": _NUM,
            "humidity": _NUM,
            "cloudiness": _NUM,
            "sea": _NUM,
            "max_since_days": _NUM,
        },
    ),
    IntentSchema(
        "EARTHQUAKE",
        required=("magnitude",),
        optional=("depth", "city", "uf", "entity"),
        kinds={"magnitude": _NUM, "depth": _NUM, "uf": _UF_KIND},
    ),
    IntentSchema(
        "VESSELS_IN_PORT",
        required=("quantity",),
        optional=("trend", "days_max"),
        kinds={"quantity": _NUM, "days_max": _NUM, "trend": KindSpec("enum", ("high", "low"))},
    ),
    IntentSchema(
        "OCEAN",
        optional=("fishing_condition", "sea_height"),
        kinds={"sea_height": _NUM},
    ),
    IntentSchema(
        "TIDES",
        optional=("high_tide", "low_tide"),
    ),
    IntentSchema(
        "OIL",
        required=("level",),
        kinds={"level": _NUM},
    ),
]
